//! Built-in regression corpus of classical nonnegative forms and the
//! constructions derived from them, each with expected exact outcomes.

use std::fmt::Write as _;

use num_traits::Signed;
use rayon::prelude::*;
use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::circuit::{detect_circuit, CircuitKind, Nonnegativity};
use crate::form::{parse_form, ExponentVector, SparseForm};
use crate::geometry::{self, support_partition};
use crate::grid::{evaluate_grid, Grid};
use crate::linalg::{self, Matrix};
use crate::mediated::{circuit_is_sos, maximal_mediated_set};
use crate::rational::{format_rational, q, qr, Rational};
use crate::report::{analyze, AnalyzeOptions, Conclusion};
use crate::sonc::{necessary_condition, ConditionVerdict};

/// One expected outcome for a corpus form.
#[derive(Debug, Clone)]
pub enum Check {
    /// Exact sums and verdict of the coefficient-sum condition.
    NecessaryCondition {
        verdict: ConditionVerdict,
        inner: Rational,
        outer: Rational,
    },
    /// Condition holds and the equality refinement finds nothing.
    ConditionInconclusive,
    CorollaryViolation {
        alpha: ExponentVector,
        beta: ExponentVector,
        bound: Rational,
        coefficient: Rational,
    },
    /// `λ_α` over each simplex of `D(β)`, in canonical order.
    FamilyLambdas {
        alpha: ExponentVector,
        beta: ExponentVector,
        lambdas: Vec<Rational>,
    },
    CoveringSquares(Vec<ExponentVector>),
    RSet(Vec<ExponentVector>),
    InnerCount(usize),
    Vertices(Vec<ExponentVector>),
    /// Proper circuit with these barycentric coordinates and `|f_β|` vs `Θ`.
    Circuit {
        lambda: Vec<Rational>,
        theta: Rational,
        boundary: bool,
    },
    CircuitSos(bool),
    HasConclusion(Conclusion),
    LacksConclusion(Conclusion),
    HalfNewton(Vec<ExponentVector>),
    HalfNewtonHull {
        vertices: Vec<ExponentVector>,
        count: usize,
    },
    GridZeros {
        grid: Grid,
        zeros: usize,
        point: Vec<Rational>,
        value: Rational,
    },
    SearchInfeasible {
        min_margin: f64,
    },
    /// Verdict of the condition is unchanged by adding a variable and by
    /// multiplying with the square of the last variable.
    ReductionInvariant,
    /// `f(A⁻¹ x)` equals the given form.
    UndoSubstitution {
        matrix: Matrix,
        original: SparseForm,
    },
}

#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub name: String,
    pub form: SparseForm,
    pub checks: Vec<Check>,
    pub provenance: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub entry: String,
    pub check: String,
    pub expected: String,
    pub got: String,
    pub pass: bool,
    pub provenance: String,
}

fn ev(v: &[u32]) -> ExponentVector {
    ExponentVector(v.to_vec())
}

fn evs(v: &[&[u32]]) -> Vec<ExponentVector> {
    let mut out: Vec<ExponentVector> = v.iter().map(|e| ev(e)).collect();
    out.sort();
    out
}

fn list(v: &[ExponentVector]) -> String {
    let mut v = v.to_vec();
    v.sort();
    let parts: Vec<String> = v.iter().map(|e| e.to_string()).collect();
    format!("{{{}}}", parts.join(" "))
}

fn qlist(v: &[Rational]) -> String {
    let parts: Vec<String> = v.iter().map(format_rational).collect();
    format!("[{}]", parts.join(", "))
}

fn form(n: usize, text: &str) -> SparseForm {
    parse_form(text, Some(n)).expect("corpus form parses")
}

fn verdict_name(v: ConditionVerdict) -> &'static str {
    match v {
        ConditionVerdict::Violated => "violated",
        ConditionVerdict::Equality => "equality",
        ConditionVerdict::StrictlySatisfied => "strictly satisfied",
    }
}

impl Check {
    pub fn name(&self) -> &'static str {
        match self {
            Check::NecessaryCondition { .. } => "necessary condition",
            Check::ConditionInconclusive => "condition inconclusive",
            Check::CorollaryViolation { .. } => "equality-case violation",
            Check::FamilyLambdas { .. } => "simplex family",
            Check::CoveringSquares(_) => "S minus R",
            Check::RSet(_) => "R set",
            Check::InnerCount(_) => "inner count",
            Check::Vertices(_) => "Newton vertices",
            Check::Circuit { .. } => "circuit",
            Check::CircuitSos(_) => "circuit SOS",
            Check::HasConclusion(_) => "verdict present",
            Check::LacksConclusion(_) => "verdict absent",
            Check::HalfNewton(_) => "half Newton support",
            Check::HalfNewtonHull { .. } => "half Newton hull",
            Check::GridZeros { .. } => "grid vanishing",
            Check::SearchInfeasible { .. } => "feasibility search",
            Check::ReductionInvariant => "reduction invariance",
            Check::UndoSubstitution { .. } => "inverse substitution",
        }
    }

    pub fn expected(&self) -> String {
        match self {
            Check::NecessaryCondition { verdict, inner, outer } => {
                format!("{} ({} vs {})", verdict_name(*verdict), format_rational(inner), format_rational(outer))
            }
            Check::ConditionInconclusive => "holds, no violation".into(),
            Check::CorollaryViolation {
                alpha,
                beta,
                bound,
                coefficient,
            } => format!(
                "α={alpha} β={beta}: {} < {}",
                format_rational(coefficient),
                format_rational(bound)
            ),
            Check::FamilyLambdas { alpha, beta, lambdas } => {
                format!("N({beta})={}, λ_{alpha}={}", lambdas.len(), qlist(lambdas))
            }
            Check::CoveringSquares(v) | Check::RSet(v) | Check::Vertices(v) | Check::HalfNewton(v) => list(v),
            Check::InnerCount(n) => n.to_string(),
            Check::Circuit { lambda, theta, boundary } => format!(
                "λ={} Θ={} {}",
                qlist(lambda),
                format_rational(theta),
                if *boundary { "boundary" } else { "interior" }
            ),
            Check::CircuitSos(b) => b.to_string(),
            Check::HasConclusion(c) => format!("{c:?}"),
            Check::LacksConclusion(c) => format!("no {c:?}"),
            Check::HalfNewtonHull { vertices, count } => format!("{} with {count} points", list(vertices)),
            Check::GridZeros { grid, zeros, point, value } => format!(
                "{grid}: {zeros} zeros, f({})={}",
                qlist(point),
                format_rational(value)
            ),
            Check::SearchInfeasible { min_margin } => format!("infeasible, margin ≥ {min_margin}"),
            Check::ReductionInvariant => "preserved".into(),
            Check::UndoSubstitution { .. } => "recovers original".into(),
        }
    }

    /// Observed outcome in the same textual form as [`Check::expected`].
    pub fn observe(&self, f: &SparseForm) -> String {
        self.observe_inner(f).unwrap_or_else(|e| format!("error: {e}"))
    }

    fn observe_inner(&self, f: &SparseForm) -> Result<String, String> {
        let partition = || support_partition(f).map_err(|e| e.to_string());
        Ok(match self {
            Check::NecessaryCondition { .. } => {
                let nc = necessary_condition(f, &partition()?).map_err(|e| e.to_string())?;
                format!(
                    "{} ({} vs {})",
                    verdict_name(nc.verdict),
                    format_rational(&nc.inner_sum),
                    format_rational(&nc.outer_sum)
                )
            }
            Check::ConditionInconclusive => {
                let nc = necessary_condition(f, &partition()?).map_err(|e| e.to_string())?;
                if nc.disproves_sonc() {
                    format!("{} with violation", verdict_name(nc.verdict))
                } else {
                    "holds, no violation".into()
                }
            }
            Check::CorollaryViolation { alpha, beta, .. } => {
                let nc = necessary_condition(f, &partition()?).map_err(|e| e.to_string())?;
                let hit = nc
                    .corollary
                    .as_ref()
                    .and_then(|c| c.violations.iter().find(|v| &v.alpha == alpha && &v.beta == beta));
                match hit {
                    Some(v) => format!(
                        "α={alpha} β={beta}: {} < {}",
                        format_rational(&v.coefficient),
                        format_rational(&v.bound)
                    ),
                    None => format!("no violation at α={alpha} β={beta}"),
                }
            }
            Check::FamilyLambdas { alpha, beta, .. } => {
                let p = partition()?;
                let fam = p.simplex_families.get(beta).cloned().unwrap_or_default();
                let lambdas: Vec<Rational> = fam.iter().map(|s| s.lambda_for(alpha)).collect();
                format!("N({beta})={}, λ_{alpha}={}", lambdas.len(), qlist(&lambdas))
            }
            Check::CoveringSquares(_) => list(&partition()?.covering_squares()),
            Check::RSet(_) => list(&partition()?.r_set),
            Check::InnerCount(_) => partition()?.i_set.len().to_string(),
            Check::Vertices(_) => list(&geometry::hull_vertices(&f.support())),
            Check::Circuit { .. } => {
                let c = detect_circuit(f).map_err(|e| e.to_string())?;
                if c.kind != CircuitKind::ProperCircuit {
                    return Ok("monomial square sum".into());
                }
                let theta = c.circuit_number().map_err(|e| e.to_string())?;
                let fb = c.inner.as_ref().expect("proper").1.abs();
                let theta_text = if theta.compare(&fb) == std::cmp::Ordering::Equal {
                    format_rational(&fb)
                } else {
                    format!("{:.6}", theta.float_value)
                };
                let kind = match c.decide_nonnegativity() {
                    Nonnegativity::Nonnegative { boundary: true } => "boundary",
                    Nonnegativity::Nonnegative { boundary: false } => "interior",
                    Nonnegativity::NotNonnegative => "negative",
                };
                format!("λ={} Θ={} {}", qlist(&c.barycentric), theta_text, kind)
            }
            Check::CircuitSos(_) => {
                let c = detect_circuit(f).map_err(|e| e.to_string())?;
                let outer: Vec<ExponentVector> = c.outer.iter().map(|(a, _)| a.clone()).collect();
                let mms = maximal_mediated_set(&outer).map_err(|e| e.to_string())?;
                circuit_is_sos(&c, &mms).map_err(|e| e.to_string())?.to_string()
            }
            Check::HasConclusion(c) | Check::LacksConclusion(c) => {
                let r = analyze(f, &AnalyzeOptions::default()).map_err(|e| e.to_string())?;
                match (self, r.has(*c)) {
                    (Check::HasConclusion(_), true) | (Check::LacksConclusion(_), false) => self.expected(),
                    (Check::HasConclusion(_), false) => format!("no {c:?}"),
                    _ => format!("{c:?}"),
                }
            }
            Check::HalfNewton(_) => list(&geometry::half_newton_support(f).map_err(|e| e.to_string())?),
            Check::HalfNewtonHull { .. } => {
                let pts = geometry::half_newton_support(f).map_err(|e| e.to_string())?;
                format!("{} with {} points", list(&geometry::hull_vertices(&pts)), pts.len())
            }
            Check::GridZeros { grid, point, .. } => {
                let r = evaluate_grid(f, *grid).map_err(|e| e.to_string())?;
                let value = r
                    .values
                    .iter()
                    .find(|v| &v.point == point)
                    .map(|v| v.value.clone())
                    .ok_or("point not on grid")?;
                format!(
                    "{grid}: {} zeros, f({})={}",
                    r.zero_count(),
                    qlist(point),
                    format_rational(&value)
                )
            }
            Check::SearchInfeasible { min_margin } => {
                let opts = AnalyzeOptions {
                    search: true,
                    ..Default::default()
                };
                let r = analyze(f, &opts).map_err(|e| e.to_string())?;
                let fs = r.feasibility.ok_or("search did not run")?;
                match (fs.outcome.as_str(), fs.margin) {
                    ("infeasible_with_margin", Some(m)) if m >= *min_margin => self.expected(),
                    (o, m) => format!("{o}, margin {m:?}"),
                }
            }
            Check::ReductionInvariant => {
                let base = necessary_condition(f, &partition()?).map_err(|e| e.to_string())?;
                let n = f.num_vars();
                let variants = [
                    f.embed_variables(1),
                    f.multiply_monomial_square(n, 1).map_err(|e| e.to_string())?,
                ];
                for g in &variants {
                    let p = support_partition(g).map_err(|e| e.to_string())?;
                    let nc = necessary_condition(g, &p).map_err(|e| e.to_string())?;
                    if nc.verdict != base.verdict || nc.disproves_sonc() != base.disproves_sonc() {
                        return Ok(format!("changed to {}", verdict_name(nc.verdict)));
                    }
                }
                "preserved".into()
            }
            Check::UndoSubstitution { matrix, original } => {
                let inv = linalg::inverse(matrix).ok_or("singular matrix")?;
                let back = f.substitute_linear(&inv).map_err(|e| e.to_string())?;
                if &back == original {
                    "recovers original".into()
                } else {
                    format!("got {back}")
                }
            }
        })
    }
}

fn mat(rows: &[&[i64]]) -> Matrix {
    rows.iter().map(|r| r.iter().map(|&v| q(v)).collect()).collect()
}

pub fn motzkin() -> SparseForm {
    form(3, "x1^4*x2^2 + x1^2*x2^4 - 3*x1^2*x2^2*x3^2 + x3^6").with_name("motzkin")
}

pub fn modified_motzkin() -> SparseForm {
    form(3, "x3^6 - x1^2*x2^2*x3^2 + x1^4*x2^2 + x1^2*x2^4").with_name("modified_motzkin")
}

pub fn robinson_r1() -> SparseForm {
    form(
        3,
        "x1^6 + x2^6 + x3^6 - x1^4*x2^2 - x1^4*x3^2 - x2^4*x1^2 - x2^4*x3^2 - x3^4*x1^2 - x3^4*x2^2 + 3*x1^2*x2^2*x3^2",
    )
    .with_name("robinson_r1")
}

/// `x²(x−w)² + y²(y−w)² + z²(z−w)² + 2xyz(x+y+z−2w)`.
pub fn robinson_r2() -> SparseForm {
    let sq = |i: usize| {
        let t = form(4, &format!("x{i}^2 - x{i}*x4"));
        t.mul(&t).unwrap()
    };
    let cross = form(4, "x1*x2*x3").mul(&form(4, "2*x1 + 2*x2 + 2*x3 - 4*x4")).unwrap();
    sq(1).add(&sq(2)).unwrap().add(&sq(3)).unwrap().add(&cross).unwrap().with_name("robinson_r2")
}

pub fn choi_lam_q1() -> SparseForm {
    form(4, "x1^2*x2^2 + x1^2*x3^2 + x2^2*x3^2 + x4^4 - 4*x4*x1*x2*x3").with_name("choi_lam_q1")
}

pub fn choi_lam_q2() -> SparseForm {
    form(3, "x1^4*x2^2 + x2^4*x3^2 + x3^4*x1^2 - 3*x1^2*x2^2*x3^2").with_name("choi_lam_q2")
}

/// `200[(x³−4xz²)² + (y³−4yz²)²] + (y²−x²)x(x+2z)[x(x−2z) + 2(y²−4z²)]`.
pub fn schmudgen() -> SparseForm {
    let a = form(3, "x1^3 - 4*x1*x3^2");
    let b = form(3, "x2^3 - 4*x2*x3^2");
    let squares = a.mul(&a).unwrap().add(&b.mul(&b).unwrap()).unwrap().scale(&q(200));
    let left = form(3, "x2^2 - x1^2")
        .mul(&form(3, "x1"))
        .unwrap()
        .mul(&form(3, "x1 + 2*x3"))
        .unwrap();
    let right = form(3, "x1^2 - 2*x1*x3 + 2*x2^2 - 8*x3^2");
    squares.add(&left.mul(&right).unwrap()).unwrap().with_name("schmudgen")
}

/// `Σ_{i<n} (x_i^{d−2} x_n² + 2 x_i^{d−1} x_n + x_i^d)²`.
pub fn p_family(n: usize, two_d: u32) -> SparseForm {
    let d = two_d / 2;
    let mut total = SparseForm::zero(n, two_d);
    for i in 1..n {
        let t = form(
            n,
            &format!("x{i}^{}*x{n}^2 + 2*x{i}^{}*x{n} + x{i}^{d}", d - 2, d - 1),
        );
        total = total.add(&t.mul(&t).unwrap()).unwrap();
    }
    total.with_name(format!("p_{n}_{two_d}"))
}

/// `(x₁x_n + x₂x_n + x₁x₂)² x_n^{2d−4} + Σ_{i=3}^{n−1} x_i^{2d}`.
pub fn q_family(n: usize, two_d: u32) -> SparseForm {
    let t = form(n, &format!("x1*x{n} + x2*x{n} + x1*x2"));
    let mut total = t.mul(&t).unwrap();
    if two_d > 4 {
        total = total.multiply_monomial_square(n, (two_d - 4) / 2).unwrap();
    }
    for i in 3..n {
        total = total.add(&form(n, &format!("x{i}^{two_d}"))).unwrap();
    }
    total.with_name(format!("q_{n}_{two_d}"))
}

/// `(2x²z² + 2x²y² − ½y²z²)²`: satisfies the coefficient-sum condition but is not SONC.
pub fn not_sufficient_example() -> SparseForm {
    let t = form(3, "2*x1^2*x3^2 + 2*x1^2*x2^2 - 1/2*x2^2*x3^2");
    t.mul(&t).unwrap().with_name("condition_not_sufficient")
}

/// `½(z³ + 2xyz + x²y)² + M`.
pub fn separator_ternary() -> SparseForm {
    let t = form(3, "x3^3 + 2*x1*x2*x3 + x1^2*x2");
    t.mul(&t)
        .unwrap()
        .scale(&qr(1, 2))
        .add(&motzkin())
        .unwrap()
        .with_name("separator_ternary")
}

/// `(xy + xz + yz)² + w⁴ + Q₁`.
pub fn separator_quaternary() -> SparseForm {
    let t = form(4, "x1*x2 + x1*x3 + x2*x3");
    t.mul(&t)
        .unwrap()
        .add(&form(4, "x4^4"))
        .unwrap()
        .add(&choi_lam_q1())
        .unwrap()
        .with_name("separator_quaternary")
}

pub fn motzkin_matrix() -> Matrix {
    mat(&[&[1, 0, -1], &[0, 1, -1], &[0, 0, 1]])
}

pub fn q1_matrix() -> Matrix {
    mat(&[&[1, 0, 0, -1], &[0, 1, 0, -1], &[0, 0, 1, 1], &[0, 0, 0, 1]])
}

/// `M(x−z, y−z, z)`.
pub fn motzkin_transformed() -> SparseForm {
    motzkin().substitute_linear(&motzkin_matrix()).unwrap().with_name("motzkin_transformed")
}

/// `Q₁(x−w, y−w, z+w, w)`.
pub fn q1_transformed() -> SparseForm {
    choi_lam_q1().substitute_linear(&q1_matrix()).unwrap().with_name("q1_transformed")
}

/// `(x + y + z)² · M`.
pub fn motzkin_times_linear_square() -> SparseForm {
    let l = form(3, "x1 + x2 + x3");
    l.mul(&l)
        .unwrap()
        .mul(&motzkin())
        .unwrap()
        .with_name("motzkin_times_linear_square")
}

fn nc(verdict: ConditionVerdict, inner: i64, outer: i64) -> Check {
    Check::NecessaryCondition {
        verdict,
        inner: q(inner),
        outer: q(outer),
    }
}

fn point(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| q(x)).collect()
}

fn p_family_checks(n: usize, two_d: u32) -> Vec<Check> {
    let mut alpha = vec![0u32; n];
    let mut beta = vec![0u32; n];
    alpha[0] = two_d - 4;
    alpha[n - 1] = 4;
    beta[0] = two_d - 3;
    beta[n - 1] = 3;
    let total = 8 * (n as i64 - 1);
    vec![
        nc(ConditionVerdict::Equality, total, total),
        Check::FamilyLambdas {
            alpha: ev(&alpha),
            beta: ev(&beta),
            lambdas: vec![qr(1, 2), qr(3, 4)],
        },
        Check::CorollaryViolation {
            alpha: ev(&alpha),
            beta: ev(&beta),
            bound: q(2),
            coefficient: q(1),
        },
        Check::HasConclusion(Conclusion::NotSonc),
        Check::ReductionInvariant,
    ]
}

pub fn corpus_entries() -> Vec<CorpusEntry> {
    use ConditionVerdict::*;
    let entry = |form: SparseForm, checks: Vec<Check>, provenance: &str| CorpusEntry {
        name: form.name().unwrap_or("unnamed").to_string(),
        form,
        checks,
        provenance: provenance.to_string(),
    };
    let third = qr(1, 3);
    let quarter = qr(1, 4);
    let mut entries = vec![
        entry(
            motzkin(),
            vec![
                Check::Circuit {
                    lambda: vec![third.clone(), third.clone(), third.clone()],
                    theta: q(3),
                    boundary: true,
                },
                Check::CircuitSos(false),
                nc(Equality, 3, 3),
                Check::ConditionInconclusive,
                Check::LacksConclusion(Conclusion::NotSonc),
                Check::HasConclusion(Conclusion::NotSos),
            ],
            "Motzkin (1967)",
        ),
        entry(
            modified_motzkin(),
            vec![
                Check::CircuitSos(false),
                nc(StrictlySatisfied, 1, 3),
                Check::LacksConclusion(Conclusion::NotSonc),
                Check::HasConclusion(Conclusion::Sonc),
            ],
            "Berg, Christensen, Jensen (1979)",
        ),
        entry(
            robinson_r1(),
            vec![
                nc(Violated, 6, 3),
                Check::CoveringSquares(evs(&[&[6, 0, 0], &[0, 6, 0], &[0, 0, 6]])),
                Check::RSet(evs(&[&[2, 2, 2]])),
                Check::InnerCount(6),
                Check::GridZeros {
                    grid: Grid::X,
                    zeros: 8,
                    point: point(&[0, 0, 1]),
                    value: q(1),
                },
                Check::HasConclusion(Conclusion::NotSonc),
                Check::ReductionInvariant,
            ],
            "Robinson (1969), ternary sextic",
        ),
        entry(
            robinson_r2(),
            vec![
                nc(Violated, 16, 6),
                Check::CoveringSquares(evs(&[
                    &[4, 0, 0, 0],
                    &[2, 0, 0, 2],
                    &[0, 4, 0, 0],
                    &[0, 2, 0, 2],
                    &[0, 0, 4, 0],
                    &[0, 0, 2, 2],
                ])),
                Check::GridZeros {
                    grid: Grid::Y,
                    zeros: 7,
                    point: point(&[1, 1, 1, 1]),
                    value: q(2),
                },
                Check::HasConclusion(Conclusion::NotSonc),
                Check::ReductionInvariant,
            ],
            "Robinson (1969), quaternary quartic",
        ),
        entry(
            choi_lam_q1(),
            vec![
                Check::Circuit {
                    lambda: vec![quarter.clone(), quarter.clone(), quarter.clone(), quarter.clone()],
                    theta: q(4),
                    boundary: true,
                },
                Check::CircuitSos(false),
                nc(Equality, 4, 4),
                Check::LacksConclusion(Conclusion::NotSonc),
            ],
            "Choi, Lam (1977)",
        ),
        entry(
            choi_lam_q2(),
            vec![
                Check::Circuit {
                    lambda: vec![third.clone(), third.clone(), third.clone()],
                    theta: q(3),
                    boundary: true,
                },
                Check::CircuitSos(false),
                Check::LacksConclusion(Conclusion::NotSonc),
            ],
            "Choi, Lam (1977)",
        ),
        entry(
            schmudgen(),
            vec![
                Check::ConditionInconclusive,
                Check::GridZeros {
                    grid: Grid::Xprime,
                    zeros: 8,
                    point: point(&[2, 0, 1]),
                    value: q(256),
                },
            ],
            "Schmüdgen (1979)",
        ),
        entry(p_family(2, 6), p_family_checks(2, 6), "sums of squares that are not SONC, p family"),
        entry(p_family(3, 6), p_family_checks(3, 6), "sums of squares that are not SONC, p family"),
        entry(p_family(3, 8), p_family_checks(3, 8), "sums of squares that are not SONC, p family"),
    ];
    for two_d in [6, 8] {
        entries.push(entry(
            q_family(3, two_d),
            vec![
                nc(Violated, 6, 3),
                Check::HasConclusion(Conclusion::NotSonc),
                Check::ReductionInvariant,
            ],
            "sums of squares that are not SONC, q family",
        ));
    }
    entries.extend([
        entry(
            not_sufficient_example(),
            vec![
                Check::NecessaryCondition {
                    verdict: StrictlySatisfied,
                    inner: q(4),
                    outer: qr(33, 4),
                },
                Check::RSet(evs(&[&[4, 2, 2]])),
                Check::SearchInfeasible { min_margin: 0.5 },
            ],
            "square of a trinomial with a shared vertex",
        ),
        entry(
            separator_ternary(),
            vec![
                nc(Violated, 6, 4),
                Check::HalfNewton(evs(&[&[2, 1, 0], &[1, 2, 0], &[1, 1, 1], &[0, 0, 3]])),
                Check::HasConclusion(Conclusion::NotSonc),
            ],
            "SOS plus Motzkin, ternary sextic",
        ),
        entry(
            separator_quaternary(),
            vec![nc(Violated, 10, 8), Check::HasConclusion(Conclusion::NotSonc)],
            "SOS plus Choi-Lam, quaternary quartic",
        ),
        entry(
            motzkin_transformed(),
            vec![
                Check::Vertices(evs(&[
                    &[2, 0, 4],
                    &[4, 0, 2],
                    &[4, 2, 0],
                    &[2, 4, 0],
                    &[0, 4, 2],
                    &[0, 2, 4],
                ])),
                Check::UndoSubstitution {
                    matrix: motzkin_matrix(),
                    original: motzkin(),
                },
            ],
            "Motzkin under a unimodular change of variables",
        ),
        entry(
            q1_transformed(),
            vec![
                Check::Vertices(evs(&[
                    &[2, 2, 0, 0],
                    &[2, 0, 2, 0],
                    &[2, 0, 0, 2],
                    &[0, 2, 2, 0],
                    &[0, 2, 0, 2],
                    &[0, 0, 2, 2],
                ])),
                Check::UndoSubstitution {
                    matrix: q1_matrix(),
                    original: choi_lam_q1(),
                },
            ],
            "Choi-Lam Q1 under a unimodular change of variables",
        ),
        entry(
            motzkin_times_linear_square(),
            vec![Check::HalfNewtonHull {
                vertices: evs(&[&[3, 1, 0], &[1, 0, 3], &[1, 3, 0], &[0, 1, 3], &[0, 0, 4]]),
                count: 9,
            }],
            "Motzkin times a square of a linear form",
        ),
    ]);
    entries
}

pub fn run_entry(e: &CorpusEntry) -> Vec<CheckResult> {
    e.checks
        .iter()
        .map(|c| {
            let expected = c.expected();
            let got = c.observe(&e.form);
            CheckResult {
                entry: e.name.clone(),
                check: c.name().to_string(),
                pass: expected == got,
                expected,
                got,
                provenance: e.provenance.clone(),
            }
        })
        .collect()
}

/// Runs every entry whose name matches `filter`, in canonical entry order.
pub fn run_corpus(filter: Option<&Regex>) -> Vec<CheckResult> {
    let entries: Vec<CorpusEntry> = corpus_entries()
        .into_iter()
        .filter(|e| filter.is_none_or(|re| re.is_match(&e.name)))
        .collect();
    entries.par_iter().map(run_entry).collect::<Vec<_>>().into_iter().flatten().collect()
}

pub fn render_table(results: &[CheckResult]) -> String {
    let headers = ["entry", "check", "expected", "got", "status", "source"];
    let rows: Vec<[String; 6]> = results
        .iter()
        .map(|r| {
            [
                r.entry.clone(),
                r.check.clone(),
                r.expected.clone(),
                r.got.clone(),
                if r.pass { "ok".into() } else { "MISMATCH".into() },
                r.provenance.clone(),
            ]
        })
        .collect();
    let mut widths = headers.map(|h| h.chars().count());
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let line = |cells: &[String]| -> String {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    let _ = writeln!(out, "{}", line(&headers.map(String::from)));
    for row in &rows {
        let _ = writeln!(out, "{}", line(row));
    }
    let failed = results.iter().filter(|r| !r.pass).count();
    let _ = writeln!(out, "{} checks, {} mismatches", results.len(), failed);
    out
}
