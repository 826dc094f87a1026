//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use fibpairs::corpus::{self, Mode};
use fibpairs::expr::GridRanges;
use fibpairs::identities::{
    fricke_general_check, matrix_identities, matrix_identities_for, reproduces, trace_identity, EqKind, FactorSpec,
    Reproduction, TraceForm,
};
use fibpairs::pairs::{certify_family, companion, make_pair, phi_poly, Params, CATALOG};
use fibpairs::seq::{self, linear};
use fibpairs::{Identity, QMatrix, QPolynomial, Rational, QF5};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rat(v: i64) -> Rational {
    Rational::from_integer(v.into())
}

fn pair(name: &str) -> fibpairs::pairs::PairSpec {
    make_pair(name, &Params::new()).expect("catalog pair")
}

fn certification() -> Outcome {
    let start = Instant::now();
    let mut checked = 0;
    for name in CATALOG {
        for report in certify_family(name, None).map_err(|e| e.to_string())? {
            ensure(report.passed(), || {
                format!("{} {:?}: {}", name, report.params, report.failure.as_ref().unwrap())
            })?;
            checked += 1;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 5.0, || format!("took {secs:.2} s"))?;
    Ok(format!("{checked} pair instances certified in {secs:.2} s"))
}

fn generated() -> Result<Vec<Identity>, fibpairs::Error> {
    let (n, m) = (|| FactorSpec::w("n"), || FactorSpec::w("m"));
    let (xn, xm) = (|| FactorSpec::xw("n"), || FactorSpec::xw("m"));
    let fr = pair("rank2_fr");
    let r25 = pair("rank2_25");
    let thm = pair("thm11");
    let wx = pair("rank3_wx");
    let mut out = Vec::new();
    for kind in [EqKind::WW, EqKind::WX, EqKind::XX] {
        out.extend(matrix_identities(&fr, kind)?);
    }
    for kind in [EqKind::WW, EqKind::WX] {
        out.extend(matrix_identities(&r25, kind)?);
    }
    out.extend(matrix_identities_for(&wx, &FactorSpec::w_const(1), &xn())?);
    out.extend(matrix_identities_for(&wx, &n(), &xn())?);
    let traces = [
        (&fr, TraceForm::Fricke, n().even(), m().even()),
        (&fr, TraceForm::Fricke, xn().even(), xm().even()),
        (&fr, TraceForm::Fricke, xn().even(), xm().odd()),
        (&fr, TraceForm::Fricke, xn().odd(), xm().odd()),
        (&r25, TraceForm::Fricke, n().even(), xm().even()),
        (&r25, TraceForm::Fricke, n().even(), xm().odd()),
        (&r25, TraceForm::Fricke, n().odd(), xm().even()),
        (&thm, TraceForm::BAB, n(), m()),
        (&thm, TraceForm::SumAB, n(), m()),
        (&thm, TraceForm::BAB, xn(), m()),
        (&thm, TraceForm::SumAB, xn(), m()),
        (&thm, TraceForm::Fricke, n(), m()),
        (&fr, TraceForm::Fricke, n(), m()),
    ];
    for (p, form, a, b) in traces {
        out.push(trace_identity(p, form, &a, &b)?);
    }
    Ok(out)
}

fn generation_fidelity() -> Outcome {
    let corpus: BTreeMap<String, Identity> = corpus::builtin().into_iter().map(|e| (e.label, e.identity)).collect();
    let mut by_label: BTreeMap<String, Vec<Identity>> = BTreeMap::new();
    for id in generated().map_err(|e| e.to_string())? {
        by_label.entry(id.label.clone()).or_default().push(id);
    }
    let mut targets: Vec<String> = ["M", "N"]
        .iter()
        .flat_map(|p| (1..=5).map(move |i| format!("{p}{i}")))
        .collect();
    targets.extend((1..=11).map(|i| format!("T{i}")));
    targets.push("(4.4)".into());
    let (mut structural, mut semantic) = (0, Vec::new());
    for label in &targets {
        let reference = corpus
            .get(label)
            .ok_or_else(|| format!("{label} missing from corpus"))?;
        let gens = by_label.get(label).ok_or_else(|| format!("{label} not generated"))?;
        for g in gens {
            match reproduces(g, reference).map_err(|e| e.to_string())? {
                Some(Reproduction::Structural { .. }) => structural += 1,
                Some(Reproduction::Semantic) => semantic.push(label.as_str()),
                None => return Err(format!("{label}: generated `{g}` does not reproduce `{reference}`")),
            }
        }
    }
    Ok(format!(
        "{} labels reproduced; {structural} structurally proportional, by difference only: [{}]",
        targets.len(),
        semantic.join(", ")
    ))
}

fn prover_completeness() -> Outcome {
    let entries = corpus::builtin();
    let start = Instant::now();
    let report = corpus::run(&entries, Mode::Prove, &GridRanges::new());
    let secs = start.elapsed().as_secs_f64();
    let mut max_cases = 0;
    for e in &report.entries {
        match e.status {
            corpus::Status::Proven { cases } => {
                ensure(cases <= 8, || format!("{} needed {cases} cases", e.label))?;
                max_cases = max_cases.max(cases);
            }
            ref s => return Err(format!("{}: {s}", e.label)),
        }
    }
    ensure(secs < 10.0, || format!("took {secs:.2} s"))?;
    Ok(format!(
        "{} entries proven, at most {max_cases} parity cases, {secs:.2} s",
        entries.len()
    ))
}

fn grid_verification() -> Outcome {
    let entries = corpus::builtin();
    let grid: GridRanges = [("n", (-12, 12)), ("m", (-12, 12)), ("r", (1, 8))]
        .into_iter()
        .map(|(v, r)| (v.to_string(), r))
        .collect();
    let report = corpus::run(&entries, Mode::Verify, &grid);
    if let Some(f) = report.failures().next() {
        return Err(format!("{}: {}", f.label, f.status));
    }
    let points: usize = report
        .entries
        .iter()
        .map(|e| match e.status {
            corpus::Status::Verified { points } => points,
            _ => 0,
        })
        .sum();
    let mut mutants = 0;
    for e in &entries {
        for m in corpus::mutants(&e.identity) {
            ensure(m.find_counterexample(&grid).is_some(), || {
                format!("mutant of {} survives: {m}", e.label)
            })?;
            mutants += 1;
        }
    }
    Ok(format!("{points} grid points clean, {mutants} mutants all caught"))
}

fn rank3_power_traces() -> Outcome {
    for name in ["rank3_wx", "rank3_zv"] {
        let w = pair(name).w;
        for n in 1..=15 {
            let t = w.pow(n).map_err(|e| e.to_string())?.trace();
            let sign = if n % 2 == 0 { 1 } else { -1 };
            let expected = linear::lucas(2 * n) + BigInt::from(sign);
            ensure(t == Rational::from_integer(expected.clone()), || {
                format!("{name} n={n}: trace {t}")
            })?;
            let f3 = linear::fib(3 * n);
            let f1 = linear::fib(n);
            ensure(&f3 % &f1 == BigInt::from(0) && f3 / f1 == expected, || {
                format!("F(3n)/F(n) at n={n}")
            })?;
        }
    }
    Ok("trace of w^n = L(2n) + (-1)^n = F(3n)/F(n) for n in 1..=15 on both rank-3 pairs".into())
}

fn elementary(rng: &mut ChaCha8Rng) -> QMatrix {
    let k = loop {
        let k = rng.gen_range(-3..=3);
        if k != 0 {
            break k;
        }
    };
    if rng.gen_bool(0.5) {
        QMatrix::from_ints(&[[1, k], [0, 1]])
    } else {
        QMatrix::from_ints(&[[1, 0], [k, 1]])
    }
}

fn random_unimodular(rng: &mut ChaCha8Rng) -> QMatrix {
    let len = rng.gen_range(1..=10);
    (0..len).fold(QMatrix::identity(2), |acc, _| acc.mul(&elementary(rng)).expect("2x2"))
}

fn fricke() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x4f1b);
    let mut non_commuting = 0;
    for i in 0..100 {
        let (a, b) = (random_unimodular(&mut rng), random_unimodular(&mut rng));
        if !a.commutes(&b).map_err(|e| e.to_string())? {
            non_commuting += 1;
        }
        ensure(fricke_general_check(&a, &b).map_err(|e| e.to_string())?, || {
            format!("sample {i}: {a} {b}")
        })?;
    }
    ensure(non_commuting > 0, || "no non-commuting sample drawn".into())?;
    let mut powers = 0;
    for name in CATALOG {
        let p = pair(name);
        if p.rank != 2 {
            continue;
        }
        let w2 = p.w.pow(2).map_err(|e| e.to_string())?;
        ensure(w2.det() == rat(1), || format!("{name}: det w^2 = {}", w2.det()))?;
        for i in -3..=3 {
            for j in -3..=3 {
                let a = w2.pow(i).map_err(|e| e.to_string())?;
                let b = w2.pow(j).map_err(|e| e.to_string())?;
                let (ta, tb, tab) = (a.trace(), b.trace(), a.mul(&b).map_err(|e| e.to_string())?.trace());
                let lhs = &ta * &ta + &tb * &tb + &tab * &tab;
                let rhs = &ta * &tb * &tab + rat(4);
                ensure(lhs == rhs, || format!("{name}: w^{} w^{}", 2 * i, 2 * j))?;
                powers += 1;
            }
        }
    }
    Ok(format!(
        "100 random unimodular pairs ({non_commuting} non-commuting), {powers} commuting power pairs"
    ))
}

fn to_rational(p: &fibpairs::Polynomial<BigInt>) -> QPolynomial {
    QPolynomial::new(p.coeffs().iter().map(|c| Rational::from_integer(c.clone())).collect())
}

fn auxiliary_polynomials() -> Outcome {
    let coeffs =
        |r: i64| -> Result<Vec<BigInt>, String> { Ok(phi_poly(r).map_err(|e| e.to_string())?.poly.coeffs().to_vec()) };
    let ints = |v: &[i64]| v.iter().map(|&c| BigInt::from(c)).collect::<Vec<_>>();
    ensure(coeffs(1)? == ints(&[-1, -1, 1]), || "phi_poly(1)".into())?;
    ensure(coeffs(2)? == ints(&[1, -2, -2, 1]), || "phi_poly(2)".into())?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for r in 1..=8 {
        let p = phi_poly(r).map_err(|e| e.to_string())?.poly;
        ensure(p.degree() == Some(r as usize + 1), || format!("phi_poly({r}) degree"))?;
        let c = companion(&p).map_err(|e| e.to_string())?;
        ensure(c.eval_poly(&to_rational(&p)) == QMatrix::zeros(c.dim()), || {
            format!("phi_poly({r}) does not annihilate its companion")
        })?;
        for _ in 0..5 {
            let q = QPolynomial::new((0..rng.gen_range(1..=5)).map(|_| rat(rng.gen_range(-9..=9))).collect());
            let qc = c.eval_poly(&q);
            ensure(c.commutes(&qc).map_err(|e| e.to_string())?, || {
                format!("companion of phi_poly({r})")
            })?;
        }
    }
    Ok("phi_poly(1), phi_poly(2) exact; r in 1..=8 integral, companions commute with sampled polynomials".into())
}

fn sequence_kernel() -> Outcome {
    let (mut a, mut b) = (BigInt::from(0), BigInt::from(1));
    for k in 0..=2000u64 {
        ensure(seq::fib_fast(k) == a, || format!("fib_fast({k})"))?;
        let next = &a + &b;
        a = std::mem::replace(&mut b, next);
    }
    ensure(seq::fib_fast(2000) == linear::fib(2000), || {
        "fib_fast(2000) vs linear".into()
    })?;
    for k in -200..=200i64 {
        ensure(
            QF5::binet_fib(k) == QF5::from_base(Rational::from_integer(seq::fib(k))),
            || format!("binet_fib({k})"),
        )?;
    }
    for k in -100..=100i64 {
        let (f, l) = (linear::fib(k), linear::lucas(k));
        let sign = if k % 2 == 0 { 4 } else { -4 };
        ensure(&l * &l - 5 * &f * &f == BigInt::from(sign), || {
            format!("L^2 - 5F^2 at {k}")
        })?;
    }
    Ok("fast doubling, Binet and L^2 - 5F^2 = 4(-1)^k agree".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("pair certification", certification),
        ("generation fidelity", generation_fidelity),
        ("prover completeness on corpus", prover_completeness),
        ("grid verification and mutants", grid_verification),
        ("rank-3 power traces", rank3_power_traces),
        ("general and commuting Fricke", fricke),
        ("auxiliary polynomials", auxiliary_polynomials),
        ("sequence kernel", sequence_kernel),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {}. {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {}. {name}: {why}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
