//! Golden identity files.
//!
//! One entry per line, `LABEL | constraints | identity | source`, with `#`
//! starting a comment line. Constraints are comma separated, e.g.
//! `n even, r >= 1`.

use std::collections::BTreeSet;
use std::fmt;
use std::time::Instant;

use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::expr::{prove_binet, Assignment, Constraint, GridRanges, Identity, ProofOutcome, PARITY_VARIABLE_CAP};

/// The shipped corpus.
pub const BUILTIN: &str = include_str!("../corpus/identities.fib");

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusEntry {
    pub label: String,
    pub identity: Identity,
    pub identity_text: String,
    pub source: String,
    /// 1-based line in the source file.
    pub line: usize,
}

pub fn parse_corpus(text: &str) -> Result<Vec<CorpusEntry>> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let err = |msg: String| Error::Corpus { line, msg };
        let fields: Vec<&str> = trimmed.split('|').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(err(format!("expected 4 `|`-separated fields, found {}", fields.len())));
        }
        let [label, constraints, identity_text, source] = [fields[0], fields[1], fields[2], fields[3]];
        if label.is_empty() {
            return Err(err("empty label".into()));
        }
        if !seen.insert(label.to_string()) {
            return Err(err(format!("duplicate label `{label}`")));
        }
        let constraints = constraints
            .split(',')
            .map(str::trim)
            .filter(|c| !c.is_empty())
            .map(|c| c.parse::<Constraint>())
            .collect::<Result<Vec<_>>>()
            .map_err(|e| err(e.to_string()))?;
        let identity = Identity::parse(label, identity_text)
            .and_then(|id| id.with_constraints(constraints))
            .map_err(|e| err(e.to_string()))?;
        out.push(CorpusEntry {
            label: label.to_string(),
            identity,
            identity_text: identity_text.to_string(),
            source: source.to_string(),
            line,
        });
    }
    Ok(out)
}

pub fn builtin() -> Vec<CorpusEntry> {
    parse_corpus(BUILTIN).expect("shipped corpus parses")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Verify,
    Prove,
    /// Prove when the parity split is within the cap, verify otherwise.
    Auto,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Status {
    Verified {
        points: usize,
    },
    Proven {
        cases: usize,
    },
    /// `witness` is a failing point; absent only when the prover refuted
    /// the identity and no small counterexample turned up.
    Failed {
        witness: Option<Assignment>,
        lhs: Option<BigRational>,
        rhs: Option<BigRational>,
    },
    /// The entry could not be processed in the requested mode.
    Error(String),
}

impl Status {
    pub fn passed(&self) -> bool {
        matches!(self, Status::Verified { .. } | Status::Proven { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Status::Verified { .. } => "verified",
            Status::Proven { .. } => "proven",
            Status::Failed { .. } => "failed",
            Status::Error(_) => "error",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Verified { points } => write!(f, "verified ({points} points)"),
            Status::Proven { cases } => write!(f, "proven ({cases} parity cases)"),
            Status::Failed { witness: None, .. } => write!(f, "failed (refuted symbolically)"),
            Status::Failed {
                witness: Some(w),
                lhs,
                rhs,
            } => {
                let at: Vec<String> = w.iter().map(|(k, v)| format!("{k}={v}")).collect();
                write!(f, "failed at {}", at.join(", "))?;
                if let (Some(l), Some(r)) = (lhs, rhs) {
                    write!(f, ": {l} != {r}")?;
                }
                Ok(())
            }
            Status::Error(msg) => write!(f, "error: {msg}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntryReport {
    pub label: String,
    pub status: Status,
    pub millis: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub entries: Vec<EntryReport>,
    pub millis: f64,
}

impl RunReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.status.passed())
    }

    pub fn failures(&self) -> impl Iterator<Item = &EntryReport> {
        self.entries.iter().filter(|e| !e.status.passed())
    }
}

fn evaluate_at(id: &Identity, witness: &Assignment) -> (Option<BigRational>, Option<BigRational>) {
    (id.lhs.eval(witness).ok(), id.rhs.eval(witness).ok())
}

/// Checks one identity.
pub fn check(id: &Identity, mode: Mode, grid: &GridRanges) -> Status {
    let prove = match mode {
        Mode::Verify => false,
        Mode::Prove => true,
        Mode::Auto => id.variables.len() <= PARITY_VARIABLE_CAP,
    };
    if prove {
        match prove_binet(id) {
            Ok(ProofOutcome::Proven { cases }) => Status::Proven { cases },
            Ok(ProofOutcome::Refuted { witness, .. }) => {
                let (lhs, rhs) = witness.as_ref().map_or((None, None), |w| evaluate_at(id, w));
                Status::Failed { witness, lhs, rhs }
            }
            Err(e) => Status::Error(e.to_string()),
        }
    } else {
        let report = id.verify_grid(grid);
        // Report the failing point nearest the origin.
        let nearest = report.failures.into_iter().min_by_key(|f| {
            (
                f.assignment.values().map(|v| v.unsigned_abs()).sum::<u64>(),
                f.assignment.clone(),
            )
        });
        match nearest {
            None => Status::Verified { points: report.total },
            Some(f) => Status::Failed {
                witness: Some(f.assignment),
                lhs: Some(f.lhs),
                rhs: Some(f.rhs),
            },
        }
    }
}

/// Checks every entry on scoped worker threads; the report keeps file
/// order regardless of scheduling.
pub fn run(entries: &[CorpusEntry], mode: Mode, grid: &GridRanges) -> RunReport {
    let start = Instant::now();
    let workers = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(entries.len().max(1));
    let mut slots: Vec<Option<EntryReport>> = vec![None; entries.len()];
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                s.spawn(move || {
                    entries
                        .iter()
                        .enumerate()
                        .skip(w)
                        .step_by(workers)
                        .map(|(i, e)| {
                            let t = Instant::now();
                            let status = check(&e.identity, mode, grid);
                            (
                                i,
                                EntryReport {
                                    label: e.label.clone(),
                                    status,
                                    millis: t.elapsed().as_secs_f64() * 1e3,
                                },
                            )
                        })
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for (i, r) in h.join().expect("worker panicked") {
                slots[i] = Some(r);
            }
        }
    });
    RunReport {
        entries: slots.into_iter().map(|r| r.expect("every entry checked")).collect(),
        millis: start.elapsed().as_secs_f64() * 1e3,
    }
}

/// Copies of `id` with one coefficient increased by 1, covering every
/// coefficient of both sides.
pub fn mutants(id: &Identity) -> Vec<Identity> {
    let one = BigRational::one();
    let lhs_count = id.lhs.coefficients().count();
    let rhs_count = id.rhs.coefficients().count();
    let mut out = Vec::with_capacity(lhs_count + rhs_count);
    for (i, c) in id.lhs.coefficients().enumerate() {
        let mut m = id.clone();
        m.lhs = id.lhs.with_coefficient(i, c + &one);
        out.push(m);
    }
    for (i, c) in id.rhs.coefficients().enumerate() {
        let mut m = id.clone();
        m.rhs = id.rhs.with_coefficient(i, c + &one);
        out.push(m);
    }
    out
}

/// Serializes entries back into the file format.
pub fn format_corpus(entries: &[CorpusEntry]) -> String {
    let mut out = String::from("# label | constraints | identity | source\n");
    for e in entries {
        let constraints: Vec<String> = e.identity.constraints.iter().map(|c| c.to_string()).collect();
        out.push_str(&format!(
            "{} | {} | {} | {}\n",
            e.label,
            constraints.join(", "),
            e.identity,
            e.source
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Predicate;

    #[test]
    fn builtin_parses_with_unique_labels() {
        let entries = builtin();
        assert_eq!(entries.len(), 42);
        for label in [
            "M1", "M5", "N1", "N5", "T1", "T11", "(1.2)", "(7.2a)", "HB", "Cat", "(4.4)",
        ] {
            assert!(entries.iter().any(|e| e.label == label), "{label}");
        }
        let m1 = entries.iter().find(|e| e.label == "M1").unwrap();
        assert_eq!(
            m1.identity.constraints,
            vec![Constraint::new("r", Predicate::AtLeast(1))]
        );
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let dup = "A | | F[n] = F[n] | x\n# c\nA | | L[n] = L[n] | y\n";
        assert_eq!(
            parse_corpus(dup),
            Err(Error::Corpus {
                line: 3,
                msg: "duplicate label `A`".into()
            })
        );
        assert!(matches!(
            parse_corpus("\nB | | F[n = 1 | x"),
            Err(Error::Corpus { line: 2, .. })
        ));
        assert!(matches!(
            parse_corpus("B | n odd | F[m] = F[m] | x"),
            Err(Error::Corpus { line: 1, .. })
        ));
        assert!(matches!(
            parse_corpus("B | F[n] = F[n]"),
            Err(Error::Corpus { line: 1, .. })
        ));
    }

    #[test]
    fn round_trip_through_format() {
        let entries = builtin();
        let again = parse_corpus(&format_corpus(&entries)).unwrap();
        assert_eq!(entries.len(), again.len());
        for (a, b) in entries.iter().zip(&again) {
            assert_eq!(
                (&a.label, &a.identity.lhs, &a.identity.rhs),
                (&b.label, &b.identity.lhs, &b.identity.rhs)
            );
            assert_eq!(a.identity.constraints, b.identity.constraints);
        }
    }

    #[test]
    fn mutated_m4_fails_at_origin() {
        let text = "M4 | | L[n]*L[m] + 5*F[n]*F[m] = 3*L[m+n] | Table 3\n";
        let entries = parse_corpus(text).unwrap();
        let report = run(&entries, Mode::Verify, &GridRanges::new());
        match &report.entries[0].status {
            Status::Failed {
                witness: Some(w),
                lhs,
                rhs,
            } => {
                assert_eq!(w.values().copied().collect::<Vec<_>>(), vec![0, 0]);
                assert_eq!(
                    (lhs.clone().unwrap(), rhs.clone().unwrap()),
                    (BigRational::from_integer(4.into()), BigRational::from_integer(6.into()))
                );
            }
            other => panic!("{other:?}"),
        }
        let proved = run(&entries, Mode::Prove, &GridRanges::new());
        assert!(!proved.passed());
    }

    #[test]
    fn mutants_cover_every_coefficient() {
        let id = Identity::parse("", "L[n]*L[m] + 5*F[n]*F[m] = 2*L[m+n]").unwrap();
        let ms = mutants(&id);
        assert_eq!(ms.len(), 3);
        assert!(ms.iter().all(|m| m.find_counterexample(&GridRanges::new()).is_some()));
    }

    #[test]
    fn report_order_is_file_order() {
        let entries = builtin();
        let report = run(&entries[..6], Mode::Verify, &GridRanges::new());
        let labels: Vec<_> = report.entries.iter().map(|e| e.label.as_str()).collect();
        let expected: Vec<_> = entries[..6].iter().map(|e| e.label.as_str()).collect();
        assert_eq!(labels, expected);
        assert!(report.passed());
    }
}
