//! Decision procedure for identities via the Binet forms.
//!
//! Each variable `v` is split by parity, `v = 2u + e` with `e` in `{0, 1}`.
//! Writing `Y_v = phi^(2u)` and using `psi^2 = phi^-2`, an index
//! `a = sum k_v v + c` becomes
//!
//! ```text
//! phi^a = phi^c' * prod Y_v^k_v        psi^a = psi^c' * prod Y_v^-k_v
//! ```
//!
//! with `c' = c + sum k_v e_v`, and `(-1)^a` turns into a constant. So
//! `F[a] = (phi^a - psi^a)/sqrt5` and `L[a] = phi^a + psi^a` are Laurent
//! polynomials in the `Y_v` over `Q(sqrt 5)`. An identity holds on a parity
//! class iff `lhs - rhs` expands to zero there: a nonzero Laurent
//! polynomial cannot vanish on the infinite grid `{phi^(2u)}`, so grid
//! truth and polynomial vanishing coincide.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;

use super::{default_range, AffineIndex, Assignment, FibExpr, GridRanges, Identity, Predicate, DEFAULT_SPAN};
use crate::error::{Error, Result};
use crate::seq::SeqKind;
use crate::{LaurentQF, QF5};

/// Maximum number of variables split by parity (at most `2^4` cases).
pub const PARITY_VARIABLE_CAP: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn residue(self) -> i64 {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }

    pub fn admits(self, v: i64) -> bool {
        v.rem_euclid(2) == self.residue()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProofOutcome {
    /// Zero in every parity case considered.
    Proven { cases: usize },
    /// Nonzero in the given parity case; `witness` is a concrete failing
    /// point when a small search finds one.
    Refuted {
        parity: BTreeMap<String, Parity>,
        witness: Option<Assignment>,
    },
}

impl ProofOutcome {
    pub fn is_proven(&self) -> bool {
        matches!(self, ProofOutcome::Proven { .. })
    }
}

struct PowerCache {
    phi: Vec<(i64, QF5)>,
    psi: Vec<(i64, QF5)>,
}

impl PowerCache {
    fn new() -> Self {
        Self {
            phi: Vec::new(),
            psi: Vec::new(),
        }
    }

    fn get(table: &mut Vec<(i64, QF5)>, base: fn() -> QF5, e: i64) -> QF5 {
        if let Some((_, v)) = table.iter().find(|(k, _)| *k == e) {
            return v.clone();
        }
        let v = base().pow(e).expect("golden roots are units");
        table.push((e, v.clone()));
        v
    }

    fn phi(&mut self, e: i64) -> QF5 {
        Self::get(&mut self.phi, QF5::phi, e)
    }

    fn psi(&mut self, e: i64) -> QF5 {
        Self::get(&mut self.psi, QF5::psi, e)
    }
}

fn binet_factor(
    kind: SeqKind,
    index: &AffineIndex,
    parity: &BTreeMap<String, Parity>,
    cache: &mut PowerCache,
) -> LaurentQF {
    let mut shift = index.constant_part();
    let mut up = crate::laurent::Exponents::one();
    for (v, k) in index.terms() {
        shift += k * parity[v].residue();
        up = up.mul(&crate::laurent::Exponents::var(v, k));
    }
    let down = up.scale(-1);
    let (a, b) = (cache.phi(shift), cache.psi(shift));
    match kind {
        SeqKind::F => {
            let inv_sqrt5 = QF5::new(BigRational::zero(), BigRational::new(1.into(), 5.into()));
            let p = LaurentQF::term(up, a * inv_sqrt5.clone());
            let q = LaurentQF::term(down, b * inv_sqrt5);
            &p - &q
        }
        SeqKind::L => &LaurentQF::term(up, a) + &LaurentQF::term(down, b),
    }
}

/// Expands `expr` into a Laurent polynomial for one parity case.
pub fn expand_case(expr: &FibExpr, parity: &BTreeMap<String, Parity>) -> LaurentQF {
    let mut cache = PowerCache::new();
    let mut total = LaurentQF::zero();
    for m in expr.monomials() {
        let sign = m.sign.terms().map(|(v, k)| k * parity[v].residue()).sum::<i64>() + m.sign.constant_part();
        let coeff = if sign.rem_euclid(2) == 1 {
            -m.coeff.clone()
        } else {
            m.coeff.clone()
        };
        let mut term = LaurentQF::constant(QF5::from_base(coeff));
        for f in &m.factors {
            let base = binet_factor(f.kind, &f.index, parity, &mut cache);
            term = &term * &base.pow(f.power);
        }
        total = &total + &term;
    }
    total
}

fn parity_cases(id: &Identity) -> Vec<BTreeMap<String, Parity>> {
    let fixed = |v: &str| {
        id.constraints.iter().find_map(|c| match (c.var == v, c.pred) {
            (true, Predicate::Even) => Some(Parity::Even),
            (true, Predicate::Odd) => Some(Parity::Odd),
            _ => None,
        })
    };
    let mut cases = vec![BTreeMap::new()];
    for v in &id.variables {
        let options = match fixed(v) {
            Some(p) => vec![p],
            None => vec![Parity::Even, Parity::Odd],
        };
        cases = cases
            .into_iter()
            .flat_map(|c| {
                options.iter().map(move |p| {
                    let mut c = c.clone();
                    c.insert(v.clone(), *p);
                    c
                })
            })
            .collect();
    }
    cases
}

fn search_witness(id: &Identity, parity: &BTreeMap<String, Parity>) -> Option<Assignment> {
    let mut restricted = id.clone();
    restricted.constraints.extend(parity.iter().map(|(v, p)| {
        let pred = match p {
            Parity::Even => Predicate::Even,
            Parity::Odd => Predicate::Odd,
        };
        super::Constraint::new(v, pred)
    }));
    [12i64, 30].into_iter().find_map(|span| {
        let ranges: GridRanges = id
            .variables
            .iter()
            .map(|v| {
                let (lo, hi) = default_range(&id.constraints, v);
                let r = if (lo, hi) == DEFAULT_SPAN {
                    (-span, span)
                } else {
                    (lo, lo + span)
                };
                (v.clone(), r)
            })
            .collect();
        restricted.find_counterexample(&ranges).map(|f| f.assignment)
    })
}

/// Proves or refutes `id` symbolically. Parity constraints restrict which
/// cases are examined; bounds such as `r >= 1` do not, since an infinite
/// subset of a parity class already forces the polynomial to vanish.
pub fn prove_binet(id: &Identity) -> Result<ProofOutcome> {
    if id.variables.len() > PARITY_VARIABLE_CAP {
        return Err(Error::TooManyVariables {
            vars: id.variables.len(),
            cap: PARITY_VARIABLE_CAP,
        });
    }
    let diff = id.difference();
    if let Some(v) = diff.variables().into_iter().find(|v| !id.variables.contains(v)) {
        return Err(Error::UnknownVariable(v));
    }
    let cases = parity_cases(id);
    for parity in &cases {
        let poly = expand_case(&diff, parity);
        if !poly.is_zero() {
            return Ok(ProofOutcome::Refuted {
                parity: parity.clone(),
                witness: search_witness(id, parity),
            });
        }
    }
    Ok(ProofOutcome::Proven { cases: cases.len() })
}

/// Whether `expr` is identically zero as a function of its variables.
pub fn is_identically_zero(expr: &FibExpr) -> Result<bool> {
    let id = Identity::new("", expr.clone(), FibExpr::zero());
    Ok(prove_binet(&id)?.is_proven())
}
