//! Identity generators.
//!
//! Matrix identities come from entries of `M N = target` with `M, N` in
//! `{w^a, x w^b}`, written through the stored templates. Trace identities
//! come from the commuting 2x2 relations
//!
//! ```text
//! t(M)^2 d(N) + t(N)^2 d(M) + t(MN)^2 = t(M) t(N) t(MN) + 4 d(M) d(N)
//! t(MN) + d(M) t(M^-1 N) = t(M) t(N)
//! t(NMN) + d(N) t(M) = t(N) t(MN)
//! ```
//!
//! which hold for any commuting `M`, `N` without normalizing determinants.
//! Traces of `x^j w^e` are read off the eigenvalues: if `w` has roots
//! `phi, psi` (or `phi^2, psi^2`, `-1` in rank 3) and `x = p(w)`, then
//! `p(phi)^j = A + B sqrt5` gives `t(x^j w^e) = A L[e] + 5B F[e]`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::expr::{prove_binet, AffineIndex, Constraint, FibExpr, Identity, Parity, Predicate};
use crate::pairs::{rank3_poly, PairSpec, Template, EXPONENT_VAR};
use crate::{QMatrix, QF5};

/// The three matrix equations `w^n w^m`, `w^n (x w^m)`, `(x w^n)(x w^m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EqKind {
    WW,
    WX,
    XX,
}

impl EqKind {
    /// Default factors: `(w^n, w^m)`, `(w^n, x w^m)`, `(x w^n, x w^m)`.
    pub fn factors(self) -> (FactorSpec, FactorSpec) {
        match self {
            EqKind::WW => (FactorSpec::w("n"), FactorSpec::w("m")),
            EqKind::WX => (FactorSpec::w("n"), FactorSpec::xw("m")),
            EqKind::XX => (FactorSpec::xw("n"), FactorSpec::xw("m")),
        }
    }
}

impl FromStr for EqKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "WW" => Ok(EqKind::WW),
            "WX" => Ok(EqKind::WX),
            "XX" => Ok(EqKind::XX),
            _ => Err(Error::InvalidParameter(format!(
                "unknown equation kind `{s}` (expected WW, WX or XX)"
            ))),
        }
    }
}

impl fmt::Display for EqKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EqKind::WW => "WW",
            EqKind::WX => "WX",
            EqKind::XX => "XX",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExpParity {
    Any,
    Even,
    Odd,
}

/// `w^e` or `x w^e`, where `e` is `v`, `2v`, `2v+1` or a constant.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FactorSpec {
    pub uses_x: bool,
    pub exponent_var: Option<String>,
    pub parity: ExpParity,
    /// Constant part of the exponent: 0 or 1 for parity-restricted
    /// variables, the whole exponent when there is no variable.
    pub offset: i64,
}

impl FactorSpec {
    pub fn w(var: &str) -> Self {
        Self {
            uses_x: false,
            exponent_var: Some(var.to_string()),
            parity: ExpParity::Any,
            offset: 0,
        }
    }

    pub fn xw(var: &str) -> Self {
        Self {
            uses_x: true,
            ..Self::w(var)
        }
    }

    pub fn w_const(e: i64) -> Self {
        Self {
            uses_x: false,
            exponent_var: None,
            parity: ExpParity::Any,
            offset: e,
        }
    }

    pub fn xw_const(e: i64) -> Self {
        Self {
            uses_x: true,
            ..Self::w_const(e)
        }
    }

    pub fn even(self) -> Self {
        Self {
            parity: ExpParity::Even,
            offset: 0,
            ..self
        }
    }

    pub fn odd(self) -> Self {
        Self {
            parity: ExpParity::Odd,
            offset: 1,
            ..self
        }
    }

    pub fn exponent(&self) -> AffineIndex {
        match &self.exponent_var {
            None => AffineIndex::constant(self.offset),
            Some(v) => {
                let k = if self.parity == ExpParity::Any { 1 } else { 2 };
                AffineIndex::term(v, k).offset(self.offset)
            }
        }
    }

    fn x_power(&self) -> i64 {
        i64::from(self.uses_x)
    }

    /// Parses `w`, `xw`, optionally followed by `:var`, `:even`, `:odd` or
    /// `:<integer>`; `default_var` names the exponent when none is given.
    pub fn parse(text: &str, default_var: &str) -> Result<Self> {
        let mut parts = text.split(':').map(str::trim);
        let bad = || {
            Error::InvalidParameter(format!(
                "bad factor `{text}` (expected w or xw with :var, :even, :odd or :k)"
            ))
        };
        let mut spec = match parts.next() {
            Some("w") => Self::w(default_var),
            Some("xw") => Self::xw(default_var),
            _ => return Err(bad()),
        };
        for part in parts {
            spec = match part {
                "even" if spec.exponent_var.is_some() => spec.even(),
                "odd" if spec.exponent_var.is_some() => spec.odd(),
                "any" => spec,
                p if p.parse::<i64>().is_ok() => Self {
                    exponent_var: None,
                    parity: ExpParity::Any,
                    offset: p.parse().expect("checked"),
                    ..spec
                },
                p if !p.is_empty() && p.chars().all(|c| c.is_ascii_alphabetic()) && spec.exponent_var.is_some() => {
                    Self {
                        exponent_var: Some(p.to_string()),
                        ..spec
                    }
                }
                _ => return Err(bad()),
            };
        }
        Ok(spec)
    }
}

impl fmt::Display for FactorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.uses_x {
            write!(f, "x*")?;
        }
        let e = self.exponent();
        if e.is_constant() || (self.parity == ExpParity::Any && self.offset == 0) {
            write!(f, "w^{e}")
        } else {
            write!(f, "w^({e})")
        }
    }
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn check_exponent_vars(pair: &PairSpec, factors: &[&FactorSpec]) -> Result<()> {
    for f in factors {
        if let Some(v) = &f.exponent_var {
            if pair.params.contains_key(v) {
                return Err(Error::InvalidParameter(format!(
                    "exponent variable `{v}` clashes with a parameter of `{}`",
                    pair.name
                )));
            }
        }
    }
    Ok(())
}

/// Constraints implied by the pair: family parameters bounded below by 1,
/// and exponents at least 1 when `w` is singular.
fn pair_constraints(pair: &PairSpec, id: &Identity, factors: &[&FactorSpec]) -> Vec<Constraint> {
    let mut out = Vec::new();
    if pair.params.contains_key("r") && id.variables.iter().any(|v| v == "r") {
        out.push(Constraint::new("r", Predicate::AtLeast(1)));
    }
    if pair.singular_w {
        for f in factors {
            if let Some(v) = &f.exponent_var {
                if id.variables.contains(v) && !out.iter().any(|c: &Constraint| &c.var == v) {
                    out.push(Constraint::new(v, Predicate::AtLeast(1)));
                }
            }
        }
    }
    out
}

fn factor_template(pair: &PairSpec, f: &FactorSpec) -> Result<Template> {
    let t = if f.uses_x {
        pair.xw_template()?
    } else {
        pair.w_template()?
    };
    Ok(t.substitute(EXPONENT_VAR, &f.exponent()))
}

fn matrix_label(pair: &PairSpec, m: &FactorSpec, n: &FactorSpec, entry: (usize, usize)) -> String {
    let key = (pair.name.as_str(), m.to_string(), n.to_string(), entry);
    let default_prop21 =
        pair.params.get("d") == Some(&-2) && pair.params.get("a") == Some(&1) && pair.params.get("b") == Some(&2);
    let known = match (key.0, key.1.as_str(), key.2.as_str(), key.3) {
        ("thm11", "w^n", "x*w^m", (0, 0)) => Some("(1.7)"),
        ("rank2_fr", "w^n", "w^m", (0, 0)) => Some("M1"),
        ("rank2_fr", "w^n", "x*w^m", (0, 0)) => Some("M2"),
        ("rank2_fr", "x*w^n", "x*w^m", (0, 0)) => Some("M3"),
        ("rank2_25", "w^n", "w^m", (0, 0)) => Some("M4"),
        ("rank2_25", "w^n", "x*w^m", (0, 0)) => Some("M5"),
        ("rank3_wx", "w^1", "x*w^n", (0, 1)) => Some("N1"),
        ("rank3_wx", "w^1", "x*w^n", (1, 0)) => Some("N2"),
        ("rank3_wx", "w^1", "x*w^n", (1, 1)) => Some("N3"),
        ("rank3_wx", "w^1", "x*w^n", (2, 1)) => Some("N4"),
        ("rank3_wx", "w^n", "x*w^n", (0, 0)) => Some("N5"),
        ("rank3_zv", "w^n", "w^n", (0, 0)) => Some("(7.2a)"),
        ("rank3_zv", "w^n", "w^n", (1, 0)) => Some("(7.2b)"),
        ("singular_zv", "w^n", "x*w^m", (0, 0)) => Some("(1.3)"),
        ("prop21", "w^n", "w^m", (0, 0)) if default_prop21 => Some("(7.1a)"),
        ("prop21", "w^n", "x*w^m", (0, 0)) if default_prop21 => Some("(7.1b)"),
        _ => None,
    };
    match known {
        Some(l) => l.to_string(),
        None => format!("{}:({})({})[{},{}]", pair.name, m, n, entry.0 + 1, entry.1 + 1),
    }
}

/// One identity per entry of `M N = target` for the default factors of
/// `kind`.
pub fn matrix_identities(pair: &PairSpec, kind: EqKind) -> Result<Vec<Identity>> {
    let (m, n) = kind.factors();
    matrix_identities_for(pair, &m, &n)
}

/// Entry `(i, j)`: `sum_k T_M[i,k] T_N[k,j] = scale * T_target[i,j]`, where
/// the target of `(x w^a)(x w^b)` is `c * w^(a+b)` for `x^2 = c I`.
pub fn matrix_identities_for(pair: &PairSpec, m: &FactorSpec, n: &FactorSpec) -> Result<Vec<Identity>> {
    check_exponent_vars(pair, &[m, n])?;
    let tm = factor_template(pair, m)?;
    let tn = factor_template(pair, n)?;
    let sum = m.exponent().add(&n.exponent());
    let (target, factor) = match (m.uses_x, n.uses_x) {
        (false, false) => (pair.w_template()?, FibExpr::int(1)),
        (true, true) => {
            let c = pair
                .x_square_scalar()
                .ok_or_else(|| Error::NonScalarSquare(pair.name.clone()))?;
            (pair.w_template()?, FibExpr::constant(c))
        }
        _ => (pair.xw_template()?, FibExpr::int(1)),
    };
    let target = target.substitute(EXPONENT_VAR, &sum);
    let rhs_scale = &pair.scale * &factor;
    let dim = pair.rank;
    let mut out = Vec::with_capacity(dim * dim);
    for i in 0..dim {
        for j in 0..dim {
            let lhs = (0..dim).fold(FibExpr::zero(), |acc, k| &acc + &(tm.get(i, k) * tn.get(k, j)));
            let rhs = &rhs_scale * target.get(i, j);
            let id = Identity::new(&matrix_label(pair, m, n, (i, j)), lhs.normalize(), rhs.normalize());
            let constraints = pair_constraints(pair, &id, &[m, n]);
            out.push(id.with_constraints(constraints)?);
        }
    }
    Ok(out)
}

/// Exact solution of `x = sum c_i w^i` for `i < dim`, if one exists.
pub fn polynomial_in(w: &QMatrix, x: &QMatrix) -> Option<Vec<BigRational>> {
    let d = w.dim();
    let mut powers = vec![QMatrix::identity(d)];
    for i in 1..d {
        powers.push(powers[i - 1].mul(w).ok()?);
    }
    // One equation per entry, one unknown per power.
    let mut rows: Vec<Vec<BigRational>> = (0..d * d)
        .map(|e| {
            let (i, j) = (e / d, e % d);
            let mut row: Vec<BigRational> = powers.iter().map(|p| p.get(i, j).clone()).collect();
            row.push(x.get(i, j).clone());
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..d {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let lead = rows[r][col].clone();
        for v in rows[r].iter_mut() {
            *v = &*v / &lead;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][col].is_zero() {
                let f = rows[i][col].clone();
                let pivot_row = rows[r].clone();
                for (v, p) in rows[i].iter_mut().zip(pivot_row) {
                    *v = &*v - &f * p;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    if rows[r..].iter().any(|row| !row[d].is_zero()) || pivots.len() < d {
        return None;
    }
    Some(rows[..d].iter().map(|row| row[d].clone()).collect())
}

/// Eigenvalue data of a nonsingular rank-2 pair: `x = alpha w + beta I`.
struct Rank2Eigen {
    /// `alpha phi + beta`
    x_at_phi: QF5,
    det_w: BigRational,
    det_x: BigRational,
}

impl Rank2Eigen {
    fn new(pair: &PairSpec) -> Result<Self> {
        if pair.rank != 2 {
            return Err(Error::RankRestriction {
                name: pair.name.clone(),
                rank: pair.rank,
            });
        }
        let found = pair.w.char_poly()?;
        if found != crate::pairs::golden_poly() {
            return Err(Error::WrongCharPoly {
                expected: crate::pairs::golden_poly().to_string(),
                found: found.to_string(),
            });
        }
        let c = polynomial_in(&pair.w, &pair.x)
            .ok_or_else(|| Error::InvalidParameter(format!("x is not a polynomial in w for `{}`", pair.name)))?;
        let x_at_phi = QF5::from_base(c[0].clone()) + QF5::phi().scale(&c[1]);
        Ok(Self {
            x_at_phi,
            det_w: pair.w.det(),
            det_x: pair.x.det(),
        })
    }

    /// `t(x^j w^e)`
    fn trace(&self, j: i64, e: &AffineIndex) -> Result<FibExpr> {
        let p = self.x_at_phi.pow(j)?;
        Ok(lucas_fib_combination(&p, e))
    }

    /// `d(x^j w^e)`
    fn det(&self, j: i64, e: &AffineIndex) -> Result<FibExpr> {
        let negative = crate::pairs::unit_sign(&self.det_w)?;
        let dx = if j >= 0 {
            num_traits::pow(self.det_x.clone(), j as usize)
        } else {
            if self.det_x.is_zero() {
                return Err(Error::Singular);
            }
            num_traits::pow(self.det_x.recip(), j.unsigned_abs() as usize)
        };
        let c = FibExpr::constant(dx);
        Ok(if negative { &c * &FibExpr::sign(e.clone()) } else { c })
    }
}

/// `A L[e] + 5B F[e]` for `p = A + B sqrt5`.
fn lucas_fib_combination(p: &QF5, e: &AffineIndex) -> FibExpr {
    let l = FibExpr::lucas(e.clone()).scale(&p.p);
    let f = FibExpr::fib(e.clone()).scale(&(&p.q * rat(5)));
    (&l + &f).normalize()
}

/// Divides both sides by the gcd of their coefficients when all are
/// integers.
fn reduce_content(lhs: FibExpr, rhs: FibExpr) -> (FibExpr, FibExpr) {
    let coeffs: Vec<&BigRational> = lhs.coefficients().chain(rhs.coefficients()).collect();
    if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_integer()) {
        return (lhs, rhs);
    }
    let g = coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c.numer()));
    if g.is_zero() || g.is_one() {
        return (lhs, rhs);
    }
    let inv = BigRational::from_integer(g).recip();
    (lhs.scale(&inv), rhs.scale(&inv))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TraceForm {
    Fricke,
    SumAB,
    BAB,
}

impl FromStr for TraceForm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fricke" => Ok(TraceForm::Fricke),
            "sumAB" | "sumab" => Ok(TraceForm::SumAB),
            "BAB" | "bab" => Ok(TraceForm::BAB),
            _ => Err(Error::InvalidParameter(format!(
                "unknown trace form `{s}` (expected fricke, sumAB or BAB)"
            ))),
        }
    }
}

impl fmt::Display for TraceForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TraceForm::Fricke => "fricke",
            TraceForm::SumAB => "sumAB",
            TraceForm::BAB => "BAB",
        })
    }
}

fn trace_label(pair: &PairSpec, form: TraceForm, m: &FactorSpec, n: &FactorSpec) -> String {
    let (ms, ns) = (m.to_string(), n.to_string());
    let known = match (pair.name.as_str(), form, ms.as_str(), ns.as_str()) {
        ("thm11" | "rank2_fr", TraceForm::Fricke, "w^n", "w^m") => Some("(4.4)"),
        ("rank2_fr", TraceForm::Fricke, "w^(2n)", "w^(2m)") => Some("T1"),
        ("rank2_fr", TraceForm::Fricke, "x*w^(2n)", "x*w^(2m)") => Some("T2"),
        ("rank2_fr", TraceForm::Fricke, "x*w^(2n)", "x*w^(2m+1)") => Some("T3"),
        ("rank2_fr", TraceForm::Fricke, "x*w^(2n+1)", "x*w^(2m+1)") => Some("T4"),
        ("rank2_25", TraceForm::Fricke, "w^(2n)", "x*w^(2m)") => Some("T5"),
        ("rank2_25", TraceForm::Fricke, "w^(2n)", "x*w^(2m+1)") => Some("T6"),
        ("rank2_25", TraceForm::Fricke, "w^(2n+1)", "x*w^(2m)") => Some("T7"),
        ("thm11", TraceForm::BAB, "w^n", "w^m") => Some("T8"),
        ("thm11", TraceForm::SumAB, "w^n", "w^m") => Some("T9"),
        ("thm11", TraceForm::BAB, "x*w^n", "w^m") => Some("T10"),
        ("thm11", TraceForm::SumAB, "x*w^n", "w^m") => Some("T11"),
        _ => None,
    };
    match known {
        Some(l) => l.to_string(),
        None => format!("{}:{form}({ms}, {ns})", pair.name),
    }
}

/// Cleared Fricke relation for commuting `M`, `N`.
pub fn trace_fricke(pair: &PairSpec, m: &FactorSpec, n: &FactorSpec) -> Result<Identity> {
    trace_identity(pair, TraceForm::Fricke, m, n)
}

/// Cleared `t(MN) + t(A^-1 B) = t(A) t(B)` (`SumAB`) or
/// `t(BAB) + t(A) = t(B) t(AB)` (`BAB`).
pub fn trace_linear(pair: &PairSpec, m: &FactorSpec, n: &FactorSpec, form: TraceForm) -> Result<Identity> {
    trace_identity(pair, form, m, n)
}

pub fn trace_identity(pair: &PairSpec, form: TraceForm, m: &FactorSpec, n: &FactorSpec) -> Result<Identity> {
    check_exponent_vars(pair, &[m, n])?;
    let eig = Rank2Eigen::new(pair)?;
    let (jm, em) = (m.x_power(), m.exponent());
    let (jn, en) = (n.x_power(), n.exponent());
    let t = |j: i64, e: &AffineIndex| eig.trace(j, e);
    let (tm, tn, tmn) = (t(jm, &em)?, t(jn, &en)?, t(jm + jn, &em.add(&en))?);
    let (lhs, rhs) = match form {
        TraceForm::Fricke => {
            let (dm, dn) = (eig.det(jm, &em)?, eig.det(jn, &en)?);
            let lhs = &(&(&(&tm * &tm) * &dn) + &(&(&tn * &tn) * &dm)) + &(&tmn * &tmn);
            let rhs = &(&(&tm * &tn) * &tmn) + &(&FibExpr::int(4) * &(&dm * &dn));
            (lhs, rhs)
        }
        TraceForm::SumAB => {
            let dm = eig.det(jm, &em)?;
            let q = t(jn - jm, &en.sub(&em))?;
            (&tmn + &(&dm * &q), &tm * &tn)
        }
        TraceForm::BAB => {
            let dn = eig.det(jn, &en)?;
            let nmn = t(jm + 2 * jn, &em.add(&en.scale(2)))?;
            (&nmn + &(&dn * &tm), &tn * &tmn)
        }
    };
    let (lhs, rhs) = reduce_content(lhs.normalize(), rhs.normalize());
    Ok(Identity::new(&trace_label(pair, form, m, n), lhs, rhs))
}

/// Whether `scale * t(w^n)` and `scale * t(x w^n)` from eigenvalues agree
/// with the traces of the stored templates, decided by [`prove_binet`].
pub fn traces_match_templates(pair: &PairSpec) -> Result<bool> {
    let n = AffineIndex::var(EXPONENT_VAR);
    let eigen: Vec<FibExpr> = if pair.rank == 2 {
        let eig = Rank2Eigen::new(pair)?;
        vec![eig.trace(0, &n)?, eig.trace(1, &n)?]
    } else {
        let (w, xw) = rank3_traces(pair)?;
        vec![w, xw]
    };
    let templates = [pair.w_template()?, pair.xw_template()?];
    for (t, e) in templates.iter().zip(eigen) {
        let id = Identity::new("", t.trace(), &pair.scale * &e);
        if !prove_binet(&id)?.is_proven() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `t(w^n)` and `t(x w^n)` for `w` with roots `-1, phi^2, psi^2`.
fn rank3_traces(pair: &PairSpec) -> Result<(FibExpr, FibExpr)> {
    let expected = rank3_poly();
    let found = pair.w.char_poly()?;
    if found != expected {
        return Err(Error::WrongCharPoly {
            expected: expected.to_string(),
            found: found.to_string(),
        });
    }
    let c = polynomial_in(&pair.w, &pair.x)
        .ok_or_else(|| Error::InvalidParameter(format!("x is not a polynomial in w for `{}`", pair.name)))?;
    let n = AffineIndex::var(EXPONENT_VAR);
    let two_n = AffineIndex::term(EXPONENT_VAR, 2);
    let tau = QF5::phi().pow(2)?;
    let p_tau = QF5::from_base(c[0].clone()) + tau.scale(&c[1]) + (tau.clone() * tau).scale(&c[2]);
    let p_minus_one = &c[0] - &c[1] + &c[2];
    let sign = FibExpr::sign(n);
    let w_trace = &lucas_fib_combination(&QF5::from_int(1), &two_n) + &sign;
    let xw_trace = &lucas_fib_combination(&p_tau, &two_n) + &sign.scale(&p_minus_one);
    Ok((w_trace.normalize(), xw_trace.normalize()))
}

/// `t(template of w^n) = L[2n] + (-1)^n` and, when an `x w^n` template is
/// stored, the matching trace identity for `x w^n`.
pub fn rank3_trace_identities(pair: &PairSpec) -> Result<Vec<Identity>> {
    let (w_trace, xw_trace) = rank3_traces(pair)?;
    let label = |which: &str| match (pair.name.as_str(), which) {
        ("rank3_wx", "w") => "(5.5)".to_string(),
        ("rank3_wx", "xw") => "(5.7)".to_string(),
        ("rank3_zv", "w") => "(5.4t)".to_string(),
        (name, "w") => format!("{name}:t(w^n)"),
        (name, _) => format!("{name}:t(x*w^n)"),
    };
    let mut out = vec![Identity::new(
        &label("w"),
        pair.w_template()?.trace(),
        &pair.scale * &w_trace,
    )];
    if let Some(t) = &pair.xw_template {
        out.push(Identity::new(&label("xw"), t.trace(), &pair.scale * &xw_trace));
    }
    Ok(out)
}

/// Exact check of `t(A)^2 + t(B)^2 + t(AB)^2 = t(A) t(B) t(AB) + t(A B A^-1 B^-1) + 2`.
pub fn fricke_general_check(a: &QMatrix, b: &QMatrix) -> Result<bool> {
    for m in [a, b] {
        if m.dim() != 2 {
            return Err(Error::UnsupportedDimension(m.dim()));
        }
        let d = m.det();
        if !d.is_one() {
            return Err(Error::NotUnimodular(d.to_string()));
        }
    }
    let ab = a.mul(b)?;
    let commutator = ab.mul(&a.inverse()?)?.mul(&b.inverse()?)?;
    let (ta, tb, tab) = (a.trace(), b.trace(), ab.trace());
    let lhs = &ta * &ta + &tb * &tb + &tab * &tab;
    let rhs = &ta * &tb * &tab + commutator.trace() + rat(2);
    Ok(lhs == rhs)
}

/// Substitutes `v -> 2v` or `v -> 2v + 1` for each assigned variable.
pub fn parity_specialize(id: &Identity, assignment: &BTreeMap<String, Parity>) -> Identity {
    let mut out = id.clone();
    for (v, p) in assignment {
        out = out.substitute(v, &AffineIndex::term(v, 2).offset(p.residue()));
    }
    out
}

/// How a generated identity relates to a reference one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reproduction {
    /// `gen.lhs - gen.rhs = ratio * (-1)^sign * (ref.lhs - ref.rhs)` term by term.
    Structural { ratio: BigRational, sign: AffineIndex },
    /// The difference of the two identities is identically zero.
    Semantic,
}

/// Structural proportionality if present, otherwise the semantic check.
/// `Ok(None)` when neither holds.
pub fn reproduces(generated: &Identity, reference: &Identity) -> Result<Option<Reproduction>> {
    let g = generated.difference();
    let r = reference.difference();
    if let Some((ratio, sign)) = r.ratio_to(&g) {
        return Ok(Some(Reproduction::Structural { ratio, sign }));
    }
    let diff = Identity::new("", &g - &r, FibExpr::zero());
    Ok(prove_binet(&diff)?.is_proven().then_some(Reproduction::Semantic))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_identity;
    use crate::pairs::{make_pair, Params};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pair(name: &str) -> PairSpec {
        make_pair(name, &Params::new()).unwrap()
    }

    fn find<'a>(ids: &'a [Identity], label: &str) -> &'a Identity {
        ids.iter()
            .find(|i| i.label == label)
            .unwrap_or_else(|| panic!("no {label}"))
    }

    fn structural(generated: &Identity, text: &str) -> BigRational {
        match reproduces(generated, &parse_identity(text).unwrap()).unwrap() {
            Some(Reproduction::Structural { ratio, .. }) => ratio,
            other => panic!("{generated} vs {text}: {other:?}"),
        }
    }

    #[test]
    fn m1_is_entry_one_one() {
        let ids = matrix_identities(&pair("rank2_fr"), EqKind::WW).unwrap();
        assert_eq!(ids.len(), 4);
        let m1 = &ids[0];
        assert_eq!(m1.label, "M1");
        assert_eq!(m1.constraints, vec![Constraint::new("r", Predicate::AtLeast(1))]);
        let r = structural(m1, "F[n+r]*F[m+r] + (-1)^(r+1)*F[n]*F[m] = F[r]*F[n+m+r]");
        assert_eq!(r, rat(1));
        for id in &ids {
            assert!(id.prove().unwrap().is_proven(), "{id}");
        }
    }

    #[test]
    fn rank2_25_wx_entries() {
        let ids = matrix_identities(&pair("rank2_25"), EqKind::WX).unwrap();
        let m5 = "L[n]*F[m] + F[n]*L[m] = 2*F[m+n]";
        let m4 = "L[n]*L[m] + 5*F[n]*F[m] = 2*L[m+n]";
        assert_eq!(ids[0].label, "M5");
        assert_eq!(structural(&ids[0], m5), rat(5));
        assert_eq!(structural(&ids[3], m5), rat(5));
        assert_eq!(structural(&ids[2], m4), rat(1));
        assert!(reproduces(&ids[2], &parse_identity(m5).unwrap()).unwrap().is_some());
    }

    #[test]
    fn rank3_wx_entries_reduce_to_corpus() {
        let p = pair("rank3_wx");
        let ids = matrix_identities_for(&p, &FactorSpec::w_const(1), &FactorSpec::xw("n")).unwrap();
        let n1 = find(&ids, "N1");
        assert!(reproduces(n1, &parse_identity("F[n+2]^2 - F[n]^2 = F[2n+2]").unwrap())
            .unwrap()
            .is_some());
        let bogus = parse_identity("F[n+2]^2 - F[n]^2 = F[2n+1]").unwrap();
        assert_eq!(reproduces(n1, &bogus).unwrap(), None);
        let n5 = matrix_identities_for(&p, &FactorSpec::w("n"), &FactorSpec::xw("n")).unwrap();
        let n5 = find(&n5, "N5");
        let text = "3*F[n-1]^3 - F[n]^3 + F[n+1]^3 + F[n+1]*F[n]*L[n-1] = 2*L[n]*F[2n-1]";
        assert!(reproduces(n5, &parse_identity(text).unwrap()).unwrap().is_some());
    }

    #[test]
    fn xx_needs_scalar_square() {
        assert_eq!(
            matrix_identities(&pair("prop21"), EqKind::XX),
            Err(Error::NonScalarSquare("prop21".into()))
        );
        assert_eq!(
            matrix_identities(&pair("rank3_wx"), EqKind::XX),
            Err(Error::NonScalarSquare("rank3_wx".into()))
        );
        let m3 = &matrix_identities(&pair("rank2_fr"), EqKind::XX).unwrap()[0];
        assert_eq!(m3.label, "M3");
        assert_eq!(
            structural(m3, "L[n+r]*L[m+r] + (-1)^(r+1)*L[n]*L[m] = 5*F[r]*F[n+m+r]"),
            rat(1)
        );
        let missing = make_pair("prop21", &Params::from([("d".into(), 1)])).unwrap();
        assert_eq!(
            matrix_identities(&missing, EqKind::WW),
            Err(Error::MissingTemplate("prop21".into()))
        );
    }

    #[test]
    fn singular_pair_gives_one_three() {
        let ids = matrix_identities(&pair("singular_zv"), EqKind::WX).unwrap();
        let id = &ids[0];
        assert_eq!(id.label, "(1.3)");
        assert!(id.constraints.contains(&Constraint::new("n", Predicate::AtLeast(1))));
        assert!(id.verify_grid(&Default::default()).passed());
        let text = "F[n]*L[m+1] + F[n-1]*L[m-1] + F[n+1]*L[m] = L[n+m+1]";
        assert!(reproduces(id, &parse_identity(text).unwrap()).unwrap().is_some());
    }

    #[test]
    fn generated_entries_match_numeric_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for name in [
            "thm11",
            "rank2_fr",
            "rank2_25",
            "prop21",
            "rank3_wx",
            "rank3_zv",
            "singular_zv",
        ] {
            let p = pair(name);
            for kind in [EqKind::WW, EqKind::WX, EqKind::XX] {
                let Ok(ids) = matrix_identities(&p, kind) else { continue };
                let (fm, fn_) = kind.factors();
                for _ in 0..50 {
                    let lo = if p.singular_w { 1 } else { -9 };
                    let (a, b) = (rng.gen_range(lo..=9), rng.gen_range(lo..=9));
                    let mut asg = p.params.clone();
                    asg.insert("n".into(), a);
                    asg.insert("m".into(), b);
                    let pow = |f: &FactorSpec, e| if f.uses_x { p.xw_power(e) } else { p.w_power(e) };
                    let s = p.scale_value();
                    let product = pow(&fm, a)
                        .unwrap()
                        .scale(&s)
                        .mul(&pow(&fn_, b).unwrap().scale(&s))
                        .unwrap();
                    for (k, id) in ids.iter().enumerate() {
                        let (i, j) = (k / p.rank, k % p.rank);
                        assert_eq!(&id.lhs.eval(&asg).unwrap(), product.get(i, j), "{name} {kind} {id}");
                        assert_eq!(
                            id.lhs.eval(&asg).unwrap(),
                            id.rhs.eval(&asg).unwrap(),
                            "{name} {kind} {id}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn fricke_tables() {
        let fr = pair("rank2_fr");
        let t1 = trace_fricke(&fr, &FactorSpec::w("n").even(), &FactorSpec::w("m").even()).unwrap();
        assert_eq!(t1.label, "T1");
        assert_eq!(
            structural(&t1, "L[2n]^2 + L[2m]^2 + L[2m+2n]^2 = L[2n]*L[2m]*L[2m+2n] + 4"),
            rat(1)
        );
        let t3 = trace_fricke(&fr, &FactorSpec::xw("n").even(), &FactorSpec::xw("m").odd()).unwrap();
        assert_eq!(t3.label, "T3");
        let text = "-5*F[2n]^2 + 5*F[2m+1]^2 - L[2m+2n+1]^2 = -5*F[2n]*F[2m+1]*L[2m+2n+1] + 4";
        assert_eq!(structural(&t3, text), rat(-1));

        let t6 = trace_fricke(
            &pair("rank2_25"),
            &FactorSpec::w("n").even(),
            &FactorSpec::xw("m").odd(),
        )
        .unwrap();
        assert_eq!(t6.label, "T6");
        assert_eq!(
            structural(
                &t6,
                "L[2n]^2 + 5*F[2m+1]^2 + 5*F[2n+2m+1]^2 = 5*L[2n]*F[2m+1]*F[2n+2m+1] + 4"
            ),
            rat(1)
        );
    }

    #[test]
    fn fricke_trivial_and_general_forms() {
        let p = pair("thm11");
        let id = trace_fricke(&p, &FactorSpec::w_const(0), &FactorSpec::w_const(0)).unwrap();
        assert!(id.difference().is_zero());
        let general = trace_fricke(&p, &FactorSpec::w("n"), &FactorSpec::w("m")).unwrap();
        assert_eq!(general.label, "(4.4)");
        let text = "(-1)^(n)*L[n]^2 + (-1)^(m)*L[m]^2 + (-1)^(m+n)*L[m+n]^2 = (-1)^(m+n)*L[n]*L[m]*L[m+n] + 4";
        match reproduces(&general, &parse_identity(text).unwrap()).unwrap() {
            Some(Reproduction::Structural { ratio, sign }) => {
                assert_eq!(ratio, rat(1));
                assert_eq!(sign, AffineIndex::var("m").add(&AffineIndex::var("n")));
            }
            other => panic!("{other:?}"),
        }
        let even = trace_fricke(&p, &FactorSpec::w("n").even(), &FactorSpec::w("m").even()).unwrap();
        assert_eq!(
            structural(&even, "L[2n]^2 + L[2m]^2 + L[2m+2n]^2 = L[2n]*L[2m]*L[2m+2n] + 4"),
            rat(1)
        );
        assert!(even.prove().unwrap().is_proven());
    }

    #[test]
    fn thm11_linear_trace_forms() {
        let p = pair("thm11");
        let (w_n, w_m, xw_n) = (FactorSpec::w("n"), FactorSpec::w("m"), FactorSpec::xw("n"));
        let cases = [
            (TraceForm::BAB, &w_n, "T8", "L[2m+n] + (-1)^(m)*L[n] = L[m]*L[m+n]"),
            (TraceForm::SumAB, &w_n, "T9", "L[m+n] + (-1)^(n)*L[m-n] = L[m]*L[n]"),
            (TraceForm::BAB, &xw_n, "T10", "F[2m+n] + (-1)^(m)*F[n] = L[m]*F[m+n]"),
            (TraceForm::SumAB, &xw_n, "T11", "F[m+n] - (-1)^(n)*F[m-n] = L[m]*F[n]"),
        ];
        for (form, m, label, text) in cases {
            let id = trace_linear(&p, m, &w_m, form).unwrap();
            assert_eq!(id.label, label);
            assert_eq!(structural(&id, text), rat(1), "{label}");
        }
        let trivial = trace_linear(&p, &FactorSpec::w_const(0), &FactorSpec::w_const(0), TraceForm::SumAB).unwrap();
        assert!(trivial.difference().is_zero());
    }

    #[test]
    fn every_rank2_trace_combination_is_true() {
        let specs = [
            FactorSpec::w("n"),
            FactorSpec::xw("n"),
            FactorSpec::w("n").odd(),
            FactorSpec::xw("n").even(),
        ];
        let others = [FactorSpec::w("m"), FactorSpec::xw("m"), FactorSpec::xw("m").odd()];
        for name in ["thm11", "rank2_fr", "rank2_25", "prop21"] {
            let p = pair(name);
            assert!(traces_match_templates(&p).unwrap(), "{name}");
            for m in &specs {
                for n in &others {
                    for form in [TraceForm::Fricke, TraceForm::SumAB, TraceForm::BAB] {
                        let id = trace_identity(&p, form, m, n).unwrap();
                        assert!(id.prove().unwrap().is_proven(), "{name} {form} {id}");
                    }
                }
            }
        }
    }

    #[test]
    fn rank_restriction() {
        let err = trace_fricke(&pair("rank3_wx"), &FactorSpec::w("n"), &FactorSpec::w("m"));
        assert_eq!(
            err,
            Err(Error::RankRestriction {
                name: "rank3_wx".into(),
                rank: 3
            })
        );
    }

    #[test]
    fn fricke_general_examples() {
        assert!(fricke_general_check(&QMatrix::identity(2), &QMatrix::identity(2)).unwrap());
        let a = QMatrix::from_ints(&[[1, 1], [0, 1]]);
        let b = QMatrix::from_ints(&[[1, 0], [1, 1]]);
        let ab = a.mul(&b).unwrap();
        let comm = ab
            .mul(&a.inverse().unwrap())
            .unwrap()
            .mul(&b.inverse().unwrap())
            .unwrap();
        assert_eq!(comm.trace(), rat(3));
        assert!(fricke_general_check(&a, &b).unwrap());
        let w = pair("thm11").w;
        assert_eq!(fricke_general_check(&w, &a), Err(Error::NotUnimodular("-1".into())));
    }

    #[test]
    fn rank3_traces() {
        let ids = rank3_trace_identities(&pair("rank3_wx")).unwrap();
        assert_eq!(ids[0].label, "(5.5)");
        let b = parse_identity("L[2n] + (-1)^(n) = 2*F[n-1]^2 + F[n]*F[n+1] + F[n+1]^2").unwrap();
        assert_eq!(
            reproduces(&ids[0], &b).unwrap(),
            Some(Reproduction::Structural {
                ratio: rat(-1),
                sign: AffineIndex::default()
            })
        );
        let mut n1 = BTreeMap::new();
        n1.insert("n".to_string(), 1);
        assert_eq!(ids[0].lhs.eval(&n1).unwrap(), rat(2));
        let ex = parse_identity("F[n-1]^2 + F[n+1]*F[n+3] = (-1)^(n) + L[2n] + F[2n]").unwrap();
        assert_eq!(reproduces(&ids[1], &ex).unwrap(), Some(Reproduction::Semantic));
        assert_eq!(ids[1].rhs.to_string(), "5*F[2n] + L[2n] + (-1)^(n)");

        let zv = rank3_trace_identities(&pair("rank3_zv")).unwrap();
        assert_eq!(zv[0].label, "(5.4t)");
        assert!(zv.iter().all(|i| i.prove().unwrap().is_proven()));
        assert!(traces_match_templates(&pair("rank3_zv")).unwrap());
        assert!(matches!(
            rank3_trace_identities(&pair("singular_zv")),
            Err(Error::WrongCharPoly { .. })
        ));
    }

    #[test]
    fn parity_specialization() {
        let g =
            parse_identity("(-1)^(n)*L[n]^2 + (-1)^(m)*L[m]^2 + (-1)^(m+n)*L[m+n]^2 = (-1)^(m+n)*L[n]*L[m]*L[m+n] + 4")
                .unwrap();
        assert_eq!(parity_specialize(&g, &BTreeMap::new()), g);
        let even = BTreeMap::from([("n".to_string(), Parity::Even), ("m".to_string(), Parity::Even)]);
        let t1 = parse_identity("L[2n]^2 + L[2m]^2 + L[2m+2n]^2 = L[2n]*L[2m]*L[2m+2n] + 4").unwrap();
        let s = parity_specialize(&g, &even);
        assert_eq!((s.lhs, s.rhs), (t1.lhs, t1.rhs));

        let fr = pair("rank2_fr");
        let gen = trace_fricke(&fr, &FactorSpec::xw("n"), &FactorSpec::xw("m")).unwrap();
        let mixed = BTreeMap::from([("n".to_string(), Parity::Even), ("m".to_string(), Parity::Odd)]);
        let t3 = "-5*F[2n]^2 + 5*F[2m+1]^2 - L[2m+2n+1]^2 = -5*F[2n]*F[2m+1]*L[2m+2n+1] + 4";
        let s = parity_specialize(&gen, &mixed);
        assert!(reproduces(&s, &parse_identity(t3).unwrap()).unwrap().is_some());
    }

    #[test]
    fn factor_spec_parsing() {
        assert_eq!(FactorSpec::parse("w:even", "n").unwrap(), FactorSpec::w("n").even());
        assert_eq!(FactorSpec::parse("xw:odd", "m").unwrap(), FactorSpec::xw("m").odd());
        assert_eq!(FactorSpec::parse("w:1", "n").unwrap(), FactorSpec::w_const(1));
        assert_eq!(FactorSpec::parse("xw:k:even", "n").unwrap(), FactorSpec::xw("k").even());
        assert!(FactorSpec::parse("y", "n").is_err());
        assert_eq!(FactorSpec::xw("m").odd().to_string(), "x*w^(2m+1)");
        assert_eq!(FactorSpec::w("n").to_string(), "w^n");
        let fr = pair("rank2_fr");
        assert!(matches!(
            matrix_identities_for(&fr, &FactorSpec::w("r"), &FactorSpec::w("m")),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn polynomial_representation() {
        let p = pair("thm11");
        assert_eq!(polynomial_in(&p.w, &p.x), Some(vec![rat(-1), rat(2)]));
        let z = pair("rank3_zv");
        assert_eq!(polynomial_in(&z.w, &z.x), Some(vec![rat(-2), rat(1), rat(0)]));
        let w3 = pair("rank3_wx");
        let c = polynomial_in(&w3.w, &w3.x).unwrap();
        let rebuilt = crate::Polynomial::new(c);
        assert_eq!(w3.w.eval_poly(&rebuilt), w3.x);
    }
}
