//! Acceptance suite: one pass/fail line per criterion.
//!
//! Runs with `harness = false`. The process fails when a criterion fails,
//! except for criteria listed in `KNOWN_UNATTAINABLE`, which are still run
//! and still reported as FAIL.

mod common;

use std::cmp::Ordering;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use num_traits::Signed;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sonckit::circuit::{
    detect_circuit, logs_affinely_independent, zero_locus, CircuitKind, Nonnegativity, ZeroLocusOutcome,
};
use sonckit::corpus::{self, corpus_entries, run_corpus};
use sonckit::geometry::{half_newton_support, hull_vertices, support_partition};
use sonckit::grid::{evaluate_grid, Grid};
use sonckit::mediated::{circuit_is_sos, maximal_mediated_set};
use sonckit::rational::{format_rational, q, qr};
use sonckit::report::{analyze, AnalyzeOptions, Conclusion};
use sonckit::search::{sonc_feasibility_search, SearchBudget, SearchOutcome};
use sonckit::sonc::{necessary_condition, ConditionVerdict};
use sonckit::{ExponentVector, SparseForm};

/// M̂ is strictly positive on the open orthant, so it has no zero locus to
/// sample there.
const KNOWN_UNATTAINABLE: &[usize] = &[9];

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn ev(v: &[u32]) -> ExponentVector {
    ExponentVector(v.to_vec())
}

fn not_sonc(f: &SparseForm) -> Result<bool, String> {
    let r = analyze(f, &AnalyzeOptions::default()).map_err(|e| e.to_string())?;
    Ok(r.has(Conclusion::NotSonc))
}

fn criterion_1() -> Outcome {
    let m = corpus::motzkin();
    let c = detect_circuit(&m).map_err(|e| e.to_string())?;
    ensure(c.kind == CircuitKind::ProperCircuit, "not a proper circuit")?;
    ensure(c.barycentric == vec![qr(1, 3); 3], format!("λ = {:?}", c.barycentric))?;
    let theta = c.circuit_number().map_err(|e| e.to_string())?;
    ensure(theta.compare(&q(3)) == Ordering::Equal, "|f_β| = 3 does not equal Θ")?;
    ensure(
        c.decide_nonnegativity() == Nonnegativity::Nonnegative { boundary: true },
        "not a boundary nonnegative circuit",
    )?;
    let outer: Vec<ExponentVector> = c.outer.iter().map(|(a, _)| a.clone()).collect();
    let mms = maximal_mediated_set(&outer).map_err(|e| e.to_string())?;
    ensure(!mms.contains(&ev(&[2, 2, 2])), "(2,2,2) in Δ*")?;
    ensure(circuit_is_sos(&c, &mms) == Ok(false), "circuit reported SOS")?;
    Ok(format!("λ = (1/3,1/3,1/3), Θ = 3 = |f_β|, boundary, |Δ*| = {}, not SOS", mms.star.len()))
}

fn criterion_2() -> Outcome {
    let mut parts = Vec::new();
    for (f, inner, outer) in [
        (corpus::robinson_r1(), q(6), q(3)),
        (corpus::robinson_r2(), q(16), q(6)),
        (corpus::q_family(3, 6), q(6), q(3)),
    ] {
        let name = f.name().unwrap().to_string();
        let nc = necessary_condition(&f, &support_partition(&f).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        ensure(nc.verdict == ConditionVerdict::Violated, format!("{name}: {:?}", nc.verdict))?;
        ensure(nc.inner_sum == inner && nc.outer_sum == outer, format!("{name}: sums differ"))?;
        ensure(not_sonc(&f)?, format!("{name}: no not-SONC verdict"))?;
        parts.push(format!("{name} {} > {}", format_rational(&inner), format_rational(&outer)));
    }
    Ok(parts.join(", "))
}

fn criterion_3() -> Outcome {
    let p = corpus::p_family(2, 6);
    let part = support_partition(&p).map_err(|e| e.to_string())?;
    let nc = necessary_condition(&p, &part).map_err(|e| e.to_string())?;
    ensure(nc.verdict == ConditionVerdict::Equality, "not the equality case")?;
    ensure(nc.inner_sum == q(8) && nc.outer_sum == q(8), "sums are not 8")?;
    let (alpha, beta) = (ev(&[2, 4]), ev(&[3, 3]));
    let fam = &part.simplex_families[&beta];
    let lambdas: Vec<_> = fam.iter().map(|s| s.lambda_for(&alpha)).collect();
    ensure(fam.len() == 2, format!("N(β) = {}", fam.len()))?;
    ensure(lambdas == vec![qr(1, 2), qr(3, 4)], format!("λ = {lambdas:?}"))?;
    let v = nc
        .corollary
        .as_ref()
        .and_then(|c| c.violations.iter().find(|v| v.alpha == alpha && v.beta == beta))
        .ok_or("no violation at α = (2,4), β = (3,3)")?;
    ensure(v.bound == q(2) && v.coefficient == q(1), "wrong bound")?;
    ensure(not_sonc(&p)?, "no not-SONC verdict")?;
    Ok("8 = 8, N((3,3)) = 2 with λ = {1/2, 3/4}, f_(2,4) = 1 < 2".into())
}

fn criterion_4() -> Outcome {
    let f = corpus::not_sufficient_example();
    let part = support_partition(&f).map_err(|e| e.to_string())?;
    let nc = necessary_condition(&f, &part).map_err(|e| e.to_string())?;
    ensure(nc.verdict == ConditionVerdict::StrictlySatisfied, "condition not satisfied")?;
    ensure(nc.inner_sum == q(4) && nc.outer_sum == qr(33, 4), "sums are not 4 and 33/4")?;
    let outcome = sonc_feasibility_search(&f, &part, &SearchBudget::default()).map_err(|e| e.to_string())?;
    let SearchOutcome::InfeasibleWithMargin { margin, .. } = outcome else {
        return Err(format!("search returned {outcome:?}"));
    };
    ensure(margin >= 0.5, format!("margin {margin}"))?;
    let r = analyze(
        &f,
        &AnalyzeOptions {
            search: true,
            ..Default::default()
        },
    )
    .map_err(|e| e.to_string())?;
    let label = r
        .verdict_texts()
        .into_iter()
        .find(|t| t.starts_with("not SONC (numeric, margin"))
        .ok_or("no numeric not-SONC verdict")?
        .to_string();
    Ok(format!("4 < 33/4, margin {margin:.4}, \"{label}\""))
}

fn criterion_5() -> Outcome {
    let t = corpus::separator_ternary();
    let nc = necessary_condition(&t, &support_partition(&t).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    ensure(
        nc.verdict == ConditionVerdict::Violated && nc.inner_sum == q(6) && nc.outer_sum == q(4),
        "ternary sums are not 6 > 4",
    )?;
    let mut expected = vec![ev(&[2, 1, 0]), ev(&[1, 2, 0]), ev(&[1, 1, 1]), ev(&[0, 0, 3])];
    expected.sort();
    let half = half_newton_support(&t).map_err(|e| e.to_string())?;
    ensure(half == expected, format!("half Newton support {half:?}"))?;
    let u = corpus::separator_quaternary();
    let nc = necessary_condition(&u, &support_partition(&u).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    ensure(
        nc.verdict == ConditionVerdict::Violated && nc.inner_sum == q(10) && nc.outer_sum == q(8),
        "quaternary sums are not 10 > 8",
    )?;
    Ok("ternary 6 > 4 with half support {x²y, xy², xyz, z³}; quaternary 10 > 8".into())
}

fn criterion_6() -> Outcome {
    let cases = [
        (corpus::robinson_r1(), Grid::X, 8, vec![q(0), q(0), q(1)], q(1)),
        (corpus::schmudgen(), Grid::Xprime, 8, vec![q(2), q(0), q(1)], q(256)),
        (corpus::robinson_r2(), Grid::Y, 7, vec![q(1); 4], q(2)),
    ];
    let mut parts = Vec::new();
    for (f, grid, zeros, point, value) in cases {
        let r = evaluate_grid(&f, grid).map_err(|e| e.to_string())?;
        let name = f.name().unwrap().to_string();
        ensure(r.zero_count() == zeros, format!("{name}: {} zeros", r.zero_count()))?;
        let nz = r.nonzero();
        ensure(
            nz.len() == 1 && nz[0].point == point && nz[0].value == value,
            format!("{name}: unexpected nonzero set"),
        )?;
        parts.push(format!("{name} on {grid}: {zeros} zeros"));
    }
    Ok(parts.join(", "))
}

fn mms_agrees(delta: &[ExponentVector]) -> Result<(), String> {
    let lattice = common::box_lattice(delta);
    let m = maximal_mediated_set(delta).map_err(|e| e.to_string())?;
    ensure(m.lattice == lattice, format!("lattice differs for {delta:?}"))?;
    ensure(m.star == common::sweep_mms(delta, &lattice), format!("star differs for {delta:?}"))?;
    if lattice.len() - delta.len() <= 14 {
        ensure(
            m.star == common::exhaustive_mms(delta, &lattice),
            format!("exhaustive oracle differs for {delta:?}"),
        )?;
    }
    Ok(())
}

fn criterion_7() -> Outcome {
    let mut sets = std::collections::BTreeSet::new();
    for e in corpus_entries() {
        let verts = hull_vertices(&e.form.support());
        if verts.iter().all(|v| v.is_even()) && common::independent(&verts) {
            sets.insert(verts);
        }
        if let Ok(p) = support_partition(&e.form) {
            for s in p.simplex_families.values().flatten() {
                sets.insert(s.vertices.clone());
            }
        }
    }
    let corpus_sets = sets.len();
    for s in &sets {
        mms_agrees(s)?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let (delta, _) = common::random_even_simplex(&mut rng, 60);
        mms_agrees(&delta)?;
    }
    for f in [corpus::choi_lam_q1(), corpus::choi_lam_q2()] {
        let c = detect_circuit(&f).map_err(|e| e.to_string())?;
        let outer: Vec<ExponentVector> = c.outer.iter().map(|(a, _)| a.clone()).collect();
        let mms = maximal_mediated_set(&outer).map_err(|e| e.to_string())?;
        ensure(!mms.contains(c.inner_exponent().unwrap()), format!("{} inner point in Δ*", f.name().unwrap()))?;
    }
    Ok(format!("{corpus_sets} corpus simplices and 50 random sets agree; Q₁, Q₂ inner points excluded"))
}

fn criterion_8() -> Outcome {
    let forms = [
        corpus::robinson_r1(),
        corpus::robinson_r2(),
        corpus::p_family(2, 6),
        corpus::p_family(3, 6),
        corpus::q_family(3, 6),
    ];
    for f in &forms {
        let name = f.name().unwrap();
        ensure(not_sonc(f)?, format!("{name}: base form not disproved"))?;
        let n = f.num_vars();
        let lifted = [
            f.embed_variables(1),
            f.multiply_monomial_square(n, 1).map_err(|e| e.to_string())?,
        ];
        for g in &lifted {
            ensure(not_sonc(g)?, format!("{name}: verdict lost after reduction step"))?;
        }
    }
    Ok(format!("{} forms keep not-SONC under both reduction steps", forms.len()))
}

fn locus_residual(f: &SparseForm) -> Result<f64, String> {
    let c = detect_circuit(f).map_err(|e| e.to_string())?;
    let outcome = zero_locus(&c).map_err(|e| e.to_string())?;
    let ZeroLocusOutcome::Locus(locus) = outcome else {
        return Err(format!("{}: zero locus outcome {outcome:?}", f.name().unwrap()));
    };
    ensure(locus.dimension == 1, format!("dimension {}", locus.dimension))?;
    Ok(locus
        .sample(100, 3.0, 9)
        .iter()
        .map(|y| {
            let x: Vec<f64> = y.iter().map(|v| v.exp()).collect();
            f.evaluate_float(&x).unwrap().abs() / f.max_term_magnitude(&x)
        })
        .fold(0.0, f64::max))
}

fn criterion_9() -> Outcome {
    let e = std::f64::consts::E;
    let pts = vec![vec![1.0, -2.0, 1.0], vec![-2.0, 1.0, 1.0], vec![e, e, e], vec![1.0, 1.0, 1.0]];
    ensure(logs_affinely_independent(&pts) == Ok(true), "log points reported dependent")?;
    let m = locus_residual(&corpus::motzkin())?;
    ensure(m <= 1e-8, format!("Motzkin residual {m:e}"))?;
    let mut detail = format!("log points independent; Motzkin max relative residual {m:.1e}");
    match locus_residual(&corpus::modified_motzkin()) {
        Ok(r) if r <= 1e-8 => Ok(format!("{detail}; M̂ residual {r:.1e}")),
        Ok(r) => Err(format!("{detail}; M̂ residual {r:e}")),
        Err(msg) => {
            detail.push_str("; ");
            detail.push_str(&msg);
            detail.push_str(" (|f_β| = 1 < Θ = 3, so M̂ > 0 on the open orthant)");
            Err(detail)
        }
    }
}

fn criterion_10() -> Outcome {
    let forms = [
        corpus::motzkin(),
        corpus::modified_motzkin(),
        corpus::choi_lam_q1(),
        corpus::choi_lam_q2(),
    ];
    for f in &forms {
        let name = f.name().unwrap();
        let r = analyze(
            f,
            &AnalyzeOptions {
                search: true,
                ..Default::default()
            },
        )
        .map_err(|e| e.to_string())?;
        ensure(!r.has(Conclusion::NotSonc), format!("{name}: not-SONC verdict"))?;
        let c = detect_circuit(f).map_err(|e| e.to_string())?;
        ensure(c.decide_nonnegativity().is_nonnegative(), format!("{name}: not nonnegative"))?;
        let min = common::sampled_minimum(f, 10_000, 10);
        ensure(!min.is_negative(), format!("{name}: negative sample {min}"))?;
    }
    Ok("M, M̂, Q₁, Q₂: no not-SONC verdict, 10⁴ exact samples each ≥ 0".into())
}

fn main() {
    let start = Instant::now();
    let results = run_corpus(None);
    let elapsed = start.elapsed();
    let mismatches: Vec<_> = results.iter().filter(|r| !r.pass).collect();
    println!(
        "corpus: {} checks, {} mismatches, {:.2}s",
        results.len(),
        mismatches.len(),
        elapsed.as_secs_f64()
    );
    for m in &mismatches {
        println!("  mismatch {} / {}: expected {}, got {}", m.entry, m.check, m.expected, m.got);
    }
    let corpus_ok = mismatches.is_empty() && elapsed.as_secs() < 60;

    let criteria: [Criterion; 10] = [
        ("Motzkin circuit, Θ and mediated set", criterion_1),
        ("necessary-condition disproofs", criterion_2),
        ("equality case refinement", criterion_3),
        ("condition not sufficient, numeric search", criterion_4),
        ("separating forms", criterion_5),
        ("grid vanishing", criterion_6),
        ("mediated set oracle equivalence", criterion_7),
        ("reduction invariance", criterion_8),
        ("zero locus", criterion_9),
        ("soundness", criterion_10),
    ];
    let mut unexpected = !corpus_ok;
    for (i, (title, run)) in criteria.iter().enumerate() {
        let n = i + 1;
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panic: {msg}"))
        });
        let known = KNOWN_UNATTAINABLE.contains(&n);
        match outcome {
            Ok(detail) => println!("criterion {n:>2} PASS  {title}: {detail}"),
            Err(detail) => {
                let tag = if known { " [known unattainable]" } else { "" };
                println!("criterion {n:>2} FAIL  {title}: {detail}{tag}");
                unexpected |= !known;
            }
        }
    }
    if unexpected {
        std::process::exit(1);
    }
}
