//! Catalog of commuting Fibonacci pairs `(w, x)`.
//!
//! Each pair stores exact rational matrices plus symbolic entry templates:
//! `scale * w^n` and `scale * x * w^n` written entrywise as [`FibExpr`]s in
//! `n` and the family parameters. [`certify`] checks the templates against
//! exact matrix powers.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::expr::{parse_expr, AffineIndex, Assignment, FibExpr};
use crate::seq::{fib, lucas};
use crate::{Polynomial, QMatrix, QPolynomial, QF5};

pub type Params = BTreeMap<String, i64>;

/// Catalog names accepted by [`make_pair`].
pub const CATALOG: [&str; 7] = [
    "thm11",
    "rank2_fr",
    "rank2_25",
    "prop21",
    "rank3_wx",
    "rank3_zv",
    "singular_zv",
];

/// Exponent variable used by every template.
pub const EXPONENT_VAR: &str = "n";

/// Square matrix of expressions.
#[derive(Debug, Clone, PartialEq)]
pub struct Template {
    rows: Vec<Vec<FibExpr>>,
}

impl Template {
    pub fn new(rows: Vec<Vec<FibExpr>>) -> Self {
        let dim = rows.len();
        assert!(rows.iter().all(|r| r.len() == dim), "template must be square");
        Self {
            rows: rows
                .into_iter()
                .map(|r| r.into_iter().map(|e| e.normalize()).collect())
                .collect(),
        }
    }

    fn parse(rows: &[&[&str]]) -> Self {
        Self::new(
            rows.iter()
                .map(|r| {
                    r.iter()
                        .map(|s| parse_expr(s).expect("catalog template parses"))
                        .collect()
                })
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &FibExpr {
        &self.rows[i][j]
    }

    pub fn rows(&self) -> &[Vec<FibExpr>] {
        &self.rows
    }

    pub fn map(&self, f: impl Fn(&FibExpr) -> FibExpr) -> Self {
        Self::new(self.rows.iter().map(|r| r.iter().map(&f).collect()).collect())
    }

    pub fn substitute(&self, var: &str, replacement: &AffineIndex) -> Self {
        self.map(|e| e.substitute(var, replacement))
    }

    pub fn rename(&self, from: &str, to: &str) -> Self {
        let map = BTreeMap::from([(from.to_string(), to.to_string())]);
        self.map(|e| e.rename(&map))
    }

    /// `a * T(n + 1) + b * T(n)`: the template of `(a w + b I) w^n`.
    pub fn shift_combination(&self, a: &BigRational, b: &BigRational) -> Self {
        let next = self.substitute(EXPONENT_VAR, &AffineIndex::var(EXPONENT_VAR).offset(1));
        Self::new(
            (0..self.dim())
                .map(|i| {
                    (0..self.dim())
                        .map(|j| &next.get(i, j).scale(a) + &self.get(i, j).scale(b))
                        .collect()
                })
                .collect(),
        )
    }

    /// Sum of the diagonal.
    pub fn trace(&self) -> FibExpr {
        (0..self.dim()).fold(FibExpr::zero(), |acc, i| &acc + self.get(i, i))
    }

    pub fn eval(&self, assignment: &Assignment) -> Result<QMatrix> {
        let rows = self
            .rows
            .iter()
            .map(|r| r.iter().map(|e| e.eval(assignment)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(QMatrix::from_rows(rows))
    }
}

impl fmt::Display for Template {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, row) in self.rows.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            let cells: Vec<String> = row.iter().map(|e| e.to_string()).collect();
            write!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairSpec {
    pub name: String,
    pub rank: usize,
    pub params: Params,
    /// `a` such that the entries of `a w^n` and `a x w^n` are templates.
    pub scale: FibExpr,
    pub w: QMatrix,
    pub x: QMatrix,
    pub w_template: Option<Template>,
    pub xw_template: Option<Template>,
    pub det_w: BigRational,
    pub det_x: BigRational,
    pub singular_w: bool,
    /// Declared characteristic polynomial of `w`.
    pub char_poly: QPolynomial,
}

impl PairSpec {
    /// Variable bindings for templates at exponent `n`.
    pub fn bindings(&self, n: i64) -> Assignment {
        let mut a = self.params.clone();
        a.insert(EXPONENT_VAR.to_string(), n);
        a
    }

    pub fn scale_value(&self) -> BigRational {
        self.scale
            .eval(&self.params)
            .expect("scale uses only family parameters")
    }

    /// Smallest exponent at which templates hold.
    pub fn min_exponent(&self) -> Option<i64> {
        self.singular_w.then_some(1)
    }

    pub fn w_power(&self, n: i64) -> Result<QMatrix> {
        self.w.pow(n)
    }

    pub fn xw_power(&self, n: i64) -> Result<QMatrix> {
        self.x.mul(&self.w.pow(n)?)
    }

    /// `Some(c)` when `x^2 = c I`.
    pub fn x_square_scalar(&self) -> Option<BigRational> {
        let sq = self.x.mul(&self.x).expect("square");
        let c = sq.get(0, 0).clone();
        (sq == QMatrix::scalar(self.rank, c.clone())).then_some(c)
    }

    pub fn w_template(&self) -> Result<&Template> {
        self.w_template
            .as_ref()
            .ok_or_else(|| Error::MissingTemplate(self.name.clone()))
    }

    pub fn xw_template(&self) -> Result<&Template> {
        self.xw_template
            .as_ref()
            .ok_or_else(|| Error::MissingTemplate(self.name.clone()))
    }
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn big(v: BigInt) -> BigRational {
    BigRational::from_integer(v)
}

fn poly(coeffs: &[i64]) -> QPolynomial {
    Polynomial::new(coeffs.iter().map(|&c| rat(c)).collect())
}

/// `X^2 - X - 1`
pub fn golden_poly() -> QPolynomial {
    poly(&[-1, -1, 1])
}

/// `X^3 - 2X^2 - 2X + 1`
pub fn rank3_poly() -> QPolynomial {
    poly(&[1, -2, -2, 1])
}

/// `X^3 - X^2 - X`
pub fn singular_poly() -> QPolynomial {
    poly(&[0, -1, -1, 1])
}

pub fn default_params(name: &str) -> Result<Params> {
    let pairs: &[(&str, i64)] = match name {
        "rank2_fr" => &[("r", 2)],
        "prop21" => &[("d", -2), ("a", 1), ("b", 2)],
        n if CATALOG.contains(&n) => &[],
        other => return Err(Error::UnknownPair(other.to_string())),
    };
    Ok(pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect())
}

/// Builds a catalog pair. Missing parameters take their defaults
/// (`r = 2`; `d = -2, a = 1, b = 2`).
pub fn make_pair(name: &str, params: &Params) -> Result<PairSpec> {
    let mut full = default_params(name)?;
    for (k, v) in params {
        if !full.contains_key(k) {
            return Err(Error::InvalidParameter(format!("`{name}` takes no parameter `{k}`")));
        }
        full.insert(k.clone(), *v);
    }
    let spec = match name {
        "thm11" => thm11(),
        "rank2_fr" => rank2_fr(full["r"])?,
        "rank2_25" => rank2_25(),
        "prop21" => prop21(full["d"], full["a"], full["b"]),
        "rank3_wx" => rank3_wx(),
        "rank3_zv" => rank3_zv(),
        _ => singular_zv(),
    };
    Ok(PairSpec { params: full, ..spec })
}

fn base(name: &str, w: QMatrix, x: QMatrix, char_poly: QPolynomial) -> PairSpec {
    PairSpec {
        name: name.to_string(),
        rank: w.dim(),
        params: Params::new(),
        scale: FibExpr::int(1),
        det_w: w.det(),
        det_x: x.det(),
        singular_w: false,
        w,
        x,
        w_template: None,
        xw_template: None,
        char_poly,
    }
}

fn thm11() -> PairSpec {
    PairSpec {
        det_w: rat(-1),
        det_x: rat(-5),
        w_template: Some(Template::parse(&[&["F[n+1]", "F[n]"], &["F[n]", "F[n-1]"]])),
        xw_template: Some(Template::parse(&[&["L[n+1]", "L[n]"], &["L[n]", "L[n-1]"]])),
        ..base(
            "thm11",
            QMatrix::from_ints(&[[1, 1], [1, 0]]),
            QMatrix::from_ints(&[[1, 2], [2, -1]]),
            golden_poly(),
        )
    }
}

fn rank2_fr(r: i64) -> Result<PairSpec> {
    if r == 0 {
        return Err(Error::InvalidParameter("rank2_fr needs r != 0 (F_0 = 0)".into()));
    }
    let inv = big(fib(r)).recip();
    let s = if r % 2 == 0 { rat(-1) } else { rat(1) };
    let w = QMatrix::from_rows(vec![
        vec![big(fib(r + 1)), rat(1)],
        vec![s.clone(), &s * big(fib(1 - r))],
    ])
    .scale(&inv);
    let x = QMatrix::from_rows(vec![
        vec![big(lucas(r)), rat(2)],
        vec![&s * rat(2), &s * big(lucas(-r))],
    ])
    .scale(&inv);
    Ok(PairSpec {
        scale: parse_expr("F[r]").expect("literal"),
        det_w: rat(-1),
        det_x: rat(-5),
        w_template: Some(Template::parse(&[
            &["F[n+r]", "F[n]"],
            &["(-1)^(r+1)*F[n]", "(-1)^(r+1)*F[n-r]"],
        ])),
        xw_template: Some(Template::parse(&[
            &["L[n+r]", "L[n]"],
            &["(-1)^(r+1)*L[n]", "(-1)^(r+1)*L[n-r]"],
        ])),
        ..base("rank2_fr", w, x, golden_poly())
    })
}

fn rank2_25() -> PairSpec {
    let half = BigRational::new(1.into(), 2.into());
    let w = QMatrix::from_ints(&[[1, 5], [1, 1]]).scale(&half);
    let x = QMatrix::from_ints(&[[0, 10], [2, 0]]).scale(&half);
    PairSpec {
        scale: FibExpr::int(2),
        det_w: rat(-1),
        det_x: rat(-5),
        w_template: Some(Template::parse(&[&["L[n]", "5*F[n]"], &["F[n]", "L[n]"]])),
        xw_template: Some(Template::parse(&[&["5*F[n]", "5*L[n]"], &["L[n]", "5*F[n]"]])),
        ..base("rank2_25", w, x, golden_poly())
    }
}

/// `w_d = [[1-d, 1], [1+d-d^2, d]]`, `x = a w_d + b I`. Templates exist only
/// for `d = -2`.
fn prop21(d: i64, a: i64, b: i64) -> PairSpec {
    let w = QMatrix::from_ints(&[[1 - d, 1], [1 + d - d * d, d]]);
    let x = w.scale(&rat(a)).add(&QMatrix::scalar(2, rat(b))).expect("2x2");
    let (w_template, xw_template) = if d == -2 {
        let t = Template::parse(&[&["L[n+1]", "F[n]"], &["-5*F[n]", "-L[n-1]"]]);
        let xt = t.shift_combination(&rat(a), &rat(b));
        (Some(t), Some(xt))
    } else {
        (None, None)
    };
    PairSpec {
        det_w: rat(-1),
        det_x: rat(-a * a + a * b + b * b),
        w_template,
        xw_template,
        ..base("prop21", w, x, golden_poly())
    }
}

fn rank3_wx() -> PairSpec {
    PairSpec {
        det_w: rat(-1),
        det_x: rat(-4),
        w_template: Some(Template::parse(&[
            &["F[n-1]^2", "F[n-1]*F[n]", "F[n]^2"],
            &["2*F[n-1]*F[n]", "F[n-1]^2 + F[n]*F[n+1]", "2*F[n]*F[n+1]"],
            &["F[n]^2", "F[n]*F[n+1]", "F[n+1]^2"],
        ])),
        xw_template: Some(Template::parse(&[
            &["2*F[n-1]*F[n]", "F[n-1]^2 + F[n]*F[n+1]", "2*F[n]*F[n+1]"],
            &[
                "F[n-1]^2 + F[n]^2 + F[n+1]^2",
                "F[n-1]^2 + 2*F[n-1]*F[n] + 3*F[n]*F[n+1]",
                "F[n]^2 + F[n+1]^2 + F[n+2]^2",
            ],
            &["2*F[n]*F[n+1]", "F[n+2]^2 - F[n]*F[n+1]", "2*F[n+1]*F[n+2]"],
        ])),
        ..base(
            "rank3_wx",
            QMatrix::from_ints(&[[0, 0, 1], [0, 1, 2], [1, 1, 1]]),
            QMatrix::from_ints(&[[0, 1, 0], [2, 1, 2], [0, 1, 2]]),
            rank3_poly(),
        )
    }
}

/// `z` is the rational canonical form of `X^3 - 2X^2 - 2X + 1` and
/// `v = z - 2I`.
fn rank3_zv() -> PairSpec {
    let t = Template::parse(&[
        &["-F[n-1]*F[n-2]", "-F[n]*F[n-1]", "-F[n+1]*F[n]"],
        &["F[n]*F[n-2]", "F[n+1]*F[n-1]", "F[n+2]*F[n]"],
        &["F[n]*F[n-1]", "F[n+1]*F[n]", "F[n+2]*F[n+1]"],
    ]);
    let xt = t.shift_combination(&rat(1), &rat(-2));
    PairSpec {
        det_w: rat(-1),
        det_x: rat(3),
        w_template: Some(t),
        xw_template: Some(xt),
        ..base(
            "rank3_zv",
            QMatrix::from_ints(&[[0, 0, -1], [1, 0, 2], [0, 1, 2]]),
            QMatrix::from_ints(&[[-2, 0, -1], [1, -2, 2], [0, 1, 0]]),
            rank3_poly(),
        )
    }
}

/// Singular `z` with characteristic polynomial `X^3 - X^2 - X` and
/// `v = 2I + z`; templates hold for `n >= 1`.
fn singular_zv() -> PairSpec {
    let z = QMatrix::from_ints(&[[1, 0, 1], [1, -1, 0], [0, 1, 1]]);
    let v = QMatrix::scalar(3, rat(2)).add(&z).expect("3x3");
    let t = Template::parse(&[
        &["F[n]", "F[n-1]", "F[n+1]"],
        &["F[n-2]", "F[n-3]", "F[n-1]"],
        &["F[n-1]", "F[n-2]", "F[n]"],
    ]);
    let xt = t.shift_combination(&rat(1), &rat(2));
    PairSpec {
        det_w: rat(0),
        det_x: rat(10),
        singular_w: true,
        w_template: Some(t),
        xw_template: Some(xt),
        ..base("singular_zv", z, v, singular_poly())
    }
}

fn check_char_poly(a: &QMatrix, expected: &QPolynomial) -> Result<()> {
    let found = a.char_poly()?;
    if &found != expected {
        return Err(Error::WrongCharPoly {
            expected: expected.to_string(),
            found: found.to_string(),
        });
    }
    Ok(())
}

/// `A^n = F_n A + F_{n-1} I` for `A` with characteristic polynomial
/// `X^2 - X - 1`.
pub fn closed_power_rank2(a: &QMatrix, n: i64) -> Result<QMatrix> {
    check_char_poly(a, &golden_poly())?;
    a.scale(&big(fib(n))).add(&QMatrix::scalar(2, big(fib(n - 1))))
}

/// `A^n = F_n F_{n-1} A^2 + F_n F_{n-2} A - F_{n-1} F_{n-2} I` for `A` with
/// characteristic polynomial `X^3 - 2X^2 - 2X + 1`.
pub fn closed_power_rank3(a: &QMatrix, n: i64) -> Result<QMatrix> {
    check_char_poly(a, &rank3_poly())?;
    let (f0, f1, f2) = (big(fib(n)), big(fib(n - 1)), big(fib(n - 2)));
    let sq = a.mul(a)?;
    sq.scale(&(&f0 * &f1))
        .add(&a.scale(&(&f0 * &f2)))?
        .add(&QMatrix::scalar(3, -(&f1 * &f2)))
}

/// `prod_{i=0}^{r} (X - phi^i psi^(r-i))` with integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyPhi {
    pub r: i64,
    pub poly: Polynomial<BigInt>,
}

/// Expands the root product in `Q(sqrt 5)` and checks every coefficient is
/// an integer.
pub fn phi_poly(r: i64) -> Result<PolyPhi> {
    if r < 1 {
        return Err(Error::InvalidParameter(format!("phi_poly needs r >= 1, got {r}")));
    }
    let mut acc: Polynomial<QF5> = Polynomial::constant(QF5::from_int(1));
    for i in 0..=r {
        let root = QF5::phi().pow(i)? * QF5::psi().pow(r - i)?;
        acc = &acc * &Polynomial::new(vec![-root, QF5::from_int(1)]);
    }
    let coeffs = acc
        .coeffs()
        .iter()
        .map(|c| {
            assert!(
                c.is_base() && c.p.is_integer(),
                "root product has a non-integer coefficient {c}"
            );
            c.p.to_integer()
        })
        .collect();
    Ok(PolyPhi {
        r,
        poly: Polynomial::new(coeffs),
    })
}

/// Companion matrix: ones on the superdiagonal, last row `-a_0 .. -a_{d-1}`.
pub fn companion(p: &Polynomial<BigInt>) -> Result<QMatrix> {
    if !p.is_monic() {
        return Err(Error::NotMonic);
    }
    let d = p.degree().unwrap_or(0);
    Ok(QMatrix::from_fn(d, |i, j| {
        if i + 1 == d {
            big(-p.coeff(j))
        } else if j == i + 1 {
            rat(1)
        } else {
            rat(0)
        }
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TemplateKind {
    W,
    XW,
}

impl fmt::Display for TemplateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TemplateKind::W => "w^n",
            TemplateKind::XW => "x*w^n",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CertifyFailure {
    NotCommuting,
    CharPoly {
        expected: String,
        found: String,
    },
    Determinant {
        which: &'static str,
        declared: BigRational,
        actual: BigRational,
    },
    Template {
        kind: TemplateKind,
        n: i64,
        entry: (usize, usize),
        expected: BigRational,
        found: BigRational,
    },
}

impl fmt::Display for CertifyFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CertifyFailure::NotCommuting => write!(f, "w and x do not commute"),
            CertifyFailure::CharPoly { expected, found } => {
                write!(f, "characteristic polynomial {found}, declared {expected}")
            }
            CertifyFailure::Determinant {
                which,
                declared,
                actual,
            } => {
                write!(f, "det({which}) = {actual}, declared {declared}")
            }
            CertifyFailure::Template {
                kind,
                n,
                entry,
                expected,
                found,
            } => write!(
                f,
                "{kind} at n = {n}, entry ({},{}): scaled matrix has {expected}, template gives {found}",
                entry.0 + 1,
                entry.1 + 1
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertifyReport {
    pub pair: String,
    pub params: Params,
    /// Exponents whose templates were compared.
    pub exponents_checked: usize,
    pub failure: Option<CertifyFailure>,
}

impl CertifyReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// Checks commutation, the declared characteristic polynomial and
/// determinants, and every stored template against `scale * w^n` and
/// `scale * x * w^n` for `n` in `lo..=hi`.
pub fn certify(spec: &PairSpec, (lo, hi): (i64, i64)) -> Result<CertifyReport> {
    if let Some(min) = spec.min_exponent() {
        if lo < min {
            return Err(Error::InvalidParameter(format!(
                "`{}` has singular w; exponent range must start at {min} or above",
                spec.name
            )));
        }
    }
    let mut report = CertifyReport {
        pair: spec.name.clone(),
        params: spec.params.clone(),
        exponents_checked: 0,
        failure: None,
    };
    report.failure = certify_inner(spec, lo, hi, &mut report.exponents_checked)?;
    Ok(report)
}

fn certify_inner(spec: &PairSpec, lo: i64, hi: i64, checked: &mut usize) -> Result<Option<CertifyFailure>> {
    if !spec.w.commutes(&spec.x)? {
        return Ok(Some(CertifyFailure::NotCommuting));
    }
    if let Some(found) = spec.w.char_poly().ok().filter(|p| p != &spec.char_poly) {
        return Ok(Some(CertifyFailure::CharPoly {
            expected: spec.char_poly.to_string(),
            found: found.to_string(),
        }));
    }
    for (which, declared, m) in [("w", &spec.det_w, &spec.w), ("x", &spec.det_x, &spec.x)] {
        let actual = m.det();
        if &actual != declared {
            return Ok(Some(CertifyFailure::Determinant {
                which,
                declared: declared.clone(),
                actual,
            }));
        }
    }
    let templates = [
        (TemplateKind::W, &spec.w_template),
        (TemplateKind::XW, &spec.xw_template),
    ];
    if templates.iter().all(|(_, t)| t.is_none()) {
        return Ok(None);
    }
    let scale = spec.scale_value();
    for n in lo..=hi {
        for (kind, template) in &templates {
            let Some(template) = template else { continue };
            let power = match kind {
                TemplateKind::W => spec.w_power(n)?,
                TemplateKind::XW => spec.xw_power(n)?,
            };
            let expected = power.scale(&scale);
            let found = template.eval(&spec.bindings(n))?;
            for i in 0..spec.rank {
                for j in 0..spec.rank {
                    if expected.get(i, j) != found.get(i, j) {
                        return Ok(Some(CertifyFailure::Template {
                            kind: *kind,
                            n,
                            entry: (i, j),
                            expected: expected.get(i, j).clone(),
                            found: found.get(i, j).clone(),
                        }));
                    }
                }
            }
        }
        *checked += 1;
    }
    Ok(None)
}

/// Parameter samples used when certifying a whole family: `r` in `1..=8`
/// for `rank2_fr`, the default parameters otherwise.
pub fn family_samples(name: &str) -> Result<Vec<Params>> {
    let defaults = default_params(name)?;
    Ok(match name {
        "rank2_fr" => (1..=8).map(|r| Params::from([("r".to_string(), r)])).collect(),
        _ => vec![defaults],
    })
}

/// Exponent range used by [`certify_family`]: `[-8, 8]`, or `[1, 10]` when
/// `w` is singular.
pub fn default_certify_range(spec: &PairSpec) -> (i64, i64) {
    if spec.singular_w {
        (1, 10)
    } else {
        (-8, 8)
    }
}

/// Certifies every parameter sample of a catalog family; stops at the first
/// failing sample.
pub fn certify_family(name: &str, range: Option<(i64, i64)>) -> Result<Vec<CertifyReport>> {
    let mut out = Vec::new();
    for params in family_samples(name)? {
        let spec = make_pair(name, &params)?;
        let report = certify(&spec, range.unwrap_or_else(|| default_certify_range(&spec)))?;
        let failed = !report.passed();
        out.push(report);
        if failed {
            break;
        }
    }
    Ok(out)
}

/// Whether `(-1)^k` style sign factors of a determinant are expressible:
/// the determinant must be `1` or `-1`.
pub(crate) fn unit_sign(det: &BigRational) -> Result<bool> {
    if det.is_one() {
        Ok(false)
    } else if (-det).is_one() {
        Ok(true)
    } else {
        Err(Error::NonUnitDeterminant(det.to_string()))
    }
}
