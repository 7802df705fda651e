//! Bounded numeric search for a cancellation-free SONC decomposition.
//!
//! Each covering simplex `Δ_k ∈ D(β)` contributes one circuit
//! `Σ_α μ_αβ^{(k)} f_α x^α + ν_β^{(k)} f_β x^β`. The weights satisfy
//! `Σ_{β,k} μ_αβ^{(k)} = 1` for every `α ∈ S ⧵ R` and `Σ_k ν_β^{(k)} = 1` for
//! every `β ∈ I`. A circuit is nonnegative iff `ν |f_β| ≤ Θ(μ)`.
//!
//! For fixed `μ` the best `ν` is found in closed form by water-filling, which
//! leaves a convex minimax problem over the `μ` simplices. That problem is
//! solved by normalized subgradient steps in softmax coordinates from several
//! deterministic starts. A positive optimum is reported as a numeric margin;
//! a non-positive one is rounded to rationals and re-verified exactly.

use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, CircuitNumber};
use crate::form::{ExponentVector, SparseForm};
use crate::geometry::SupportPartition;
use crate::rational::{self, Rational};
use crate::sonc::{verify_decomposition, CircuitWeights, SoncDecomposition, Verification};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchBudget {
    pub max_params: usize,
    /// Threshold on `margin / max |f_β|` for reporting infeasibility.
    pub infeasibility_margin: f64,
    pub max_iters: usize,
    pub seeds: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_params: 6,
            infeasibility_margin: 1e-3,
            max_iters: 100_000,
            seeds: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SearchOutcome {
    /// `exact` is true iff `decomposition` passed exact verification.
    Feasible {
        decomposition: Option<SoncDecomposition>,
        exact: bool,
        margin: f64,
    },
    InfeasibleWithMargin {
        margin: f64,
        normalized: f64,
    },
    /// Best margin is positive but below the reporting threshold.
    Inconclusive {
        margin: f64,
        normalized: f64,
    },
    BudgetExceeded {
        params: usize,
        max: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("inner exponents without a covering simplex: {0:?}")]
    UncoveredInnerExponent(Vec<ExponentVector>),
    #[error("operation requires a nonzero form")]
    ZeroFormInput,
}

struct Slot {
    beta: usize,
    simplex_index: usize,
    /// `(alpha index, position in that alpha's weight vector)`.
    members: Vec<(usize, usize)>,
    lambda: Vec<Rational>,
    lambda_f: Vec<f64>,
}

struct Problem {
    alphas: Vec<ExponentVector>,
    alpha_coeff: Vec<Rational>,
    alpha_coeff_f: Vec<f64>,
    /// For each alpha, the slots using it.
    alpha_slots: Vec<Vec<usize>>,
    betas: Vec<ExponentVector>,
    beta_coeff: Vec<Rational>,
    beta_abs_f: Vec<f64>,
    beta_slots: Vec<Vec<usize>>,
    slots: Vec<Slot>,
}

impl Problem {
    fn build(f: &SparseForm, partition: &SupportPartition) -> Problem {
        let alphas = partition.covering_squares();
        let betas = partition.i_set.clone();
        let mut alpha_slots = vec![Vec::new(); alphas.len()];
        let mut beta_slots = vec![Vec::new(); betas.len()];
        let mut slots = Vec::new();
        for (bi, beta) in betas.iter().enumerate() {
            for (k, s) in partition.simplex_families[beta].iter().enumerate() {
                let idx = slots.len();
                let members = s
                    .vertices
                    .iter()
                    .map(|v| {
                        let ai = alphas.iter().position(|a| a == v).expect("vertex in S ⧵ R");
                        alpha_slots[ai].push(idx);
                        (ai, alpha_slots[ai].len() - 1)
                    })
                    .collect();
                beta_slots[bi].push(idx);
                slots.push(Slot {
                    beta: bi,
                    simplex_index: k,
                    members,
                    lambda: s.barycentric.clone(),
                    lambda_f: s.barycentric.iter().map(rational::to_f64).collect(),
                });
            }
        }
        Problem {
            alpha_coeff: alphas.iter().map(|a| f.coefficient(a)).collect(),
            alpha_coeff_f: alphas.iter().map(|a| rational::to_f64(&f.coefficient(a))).collect(),
            alphas,
            alpha_slots,
            beta_coeff: betas.iter().map(|b| f.coefficient(b)).collect(),
            beta_abs_f: betas.iter().map(|b| rational::to_f64(&f.coefficient(b)).abs()).collect(),
            betas,
            beta_slots,
            slots,
        }
    }

    fn free_params(&self) -> usize {
        self.alpha_slots.iter().map(|s| s.len().saturating_sub(1)).sum::<usize>()
            + self.beta_slots.iter().map(|s| s.len().saturating_sub(1)).sum::<usize>()
    }

    fn thetas(&self, mu: &[Vec<f64>]) -> Vec<f64> {
        self.slots
            .iter()
            .map(|s| {
                s.members
                    .iter()
                    .zip(&s.lambda_f)
                    .map(|(&(a, p), l)| l * (mu[a][p] * self.alpha_coeff_f[a] / l).ln())
                    .sum::<f64>()
                    .exp()
            })
            .collect()
    }

    /// Margin and a subgradient with respect to `μ`.
    fn evaluate(&self, mu: &[Vec<f64>]) -> (f64, Vec<Vec<f64>>) {
        let thetas = self.thetas(mu);
        let mut worst = f64::NEG_INFINITY;
        let mut worst_active: Vec<usize> = Vec::new();
        for (bi, slots) in self.beta_slots.iter().enumerate() {
            let th: Vec<f64> = slots.iter().map(|&s| thetas[s]).collect();
            let (t, active) = water_fill(&th, self.beta_abs_f[bi]);
            if t > worst {
                worst = t;
                worst_active = active.into_iter().map(|i| slots[i]).collect();
            }
        }
        let mut grad: Vec<Vec<f64>> = mu.iter().map(|v| vec![0.0; v.len()]).collect();
        let share = 1.0 / worst_active.len().max(1) as f64;
        for &s in &worst_active {
            let slot = &self.slots[s];
            for (&(a, p), l) in slot.members.iter().zip(&slot.lambda_f) {
                grad[a][p] -= share * thetas[s] * l / mu[a][p];
            }
        }
        (worst, grad)
    }
}

/// Solves `Σ_k max(0, Θ_k + t) = c` for `t`; returns `t` and the active indices.
fn water_fill(thetas: &[f64], c: f64) -> (f64, Vec<usize>) {
    let mut order: Vec<usize> = (0..thetas.len()).collect();
    order.sort_by(|&a, &b| thetas[b].total_cmp(&thetas[a]));
    let mut sum = 0.0;
    for m in 1..=order.len() {
        sum += thetas[order[m - 1]];
        let t = (c - sum) / m as f64;
        let next_inactive = m == order.len() || thetas[order[m]] + t <= 0.0;
        if next_inactive {
            return (t, order[..m].to_vec());
        }
    }
    unreachable!("loop returns at m = len")
}

fn softmax(z: &[f64]) -> Vec<f64> {
    let mx = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = z.iter().map(|v| (v - mx).exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| v / s).collect()
}

struct StartResult {
    margin: f64,
    mu: Vec<Vec<f64>>,
}

fn run_start(problem: &Problem, seed: u64, budget: &SearchBudget, scale: f64) -> StartResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut z: Vec<Vec<f64>> = problem
        .alpha_slots
        .iter()
        .map(|s| {
            (0..s.len())
                .map(|_| if seed == 0 { 0.0 } else { rng.gen_range(-2.0..2.0) })
                .collect()
        })
        .collect();
    let free = problem.alpha_slots.iter().any(|s| s.len() > 1);
    let mut mu: Vec<Vec<f64>> = z.iter().map(|v| softmax(v)).collect();
    let (mut margin, mut grad) = problem.evaluate(&mu);
    let mut best = StartResult { margin, mu: mu.clone() };
    if !free {
        return best;
    }
    for k in 0..budget.max_iters {
        if best.margin < -1e-4 * scale {
            break;
        }
        // Softmax chain rule: ∂/∂z_j = μ_j (g_j − Σ_i μ_i g_i).
        let dz: Vec<Vec<f64>> = mu
            .iter()
            .zip(&grad)
            .map(|(m, g)| {
                let avg: f64 = m.iter().zip(g).map(|(a, b)| a * b).sum();
                m.iter().zip(g).map(|(a, b)| a * (b - avg)).collect()
            })
            .collect();
        let norm = dz.iter().flatten().fold(0.0f64, |acc, v| acc.max(v.abs()));
        if norm == 0.0 {
            break;
        }
        let step = 0.5 / ((k + 1) as f64).sqrt() / norm;
        for (zv, dv) in z.iter_mut().zip(&dz) {
            for (a, b) in zv.iter_mut().zip(dv) {
                *a -= step * b;
            }
        }
        mu = z.iter().map(|v| softmax(v)).collect();
        (margin, grad) = problem.evaluate(&mu);
        if margin < best.margin {
            best = StartResult { margin, mu: mu.clone() };
        }
    }
    best
}

const ROUNDING_CAPS: [u64; 8] = [1, 2, 4, 10, 100, 1_000, 10_000, 1_000_000];

/// Rounds `μ` to rationals, chooses rational `ν`, and verifies exactly.
fn round_and_verify(problem: &Problem, f: &SparseForm, partition: &SupportPartition, mu: &[Vec<f64>]) -> Option<SoncDecomposition> {
    ROUNDING_CAPS
        .iter()
        .find_map(|&cap| try_rounding(problem, f, partition, mu, cap))
}

fn try_rounding(
    problem: &Problem,
    f: &SparseForm,
    partition: &SupportPartition,
    mu: &[Vec<f64>],
    cap: u64,
) -> Option<SoncDecomposition> {
    let mut mu_q: Vec<Vec<Rational>> = Vec::with_capacity(mu.len());
    for m in mu {
        let mut row: Vec<Rational> = Vec::with_capacity(m.len());
        for v in &m[..m.len() - 1] {
            let r = rational::approximate(*v, cap)?;
            if !r.is_positive() {
                return None;
            }
            row.push(r);
        }
        let last = Rational::one() - row.iter().cloned().sum::<Rational>();
        if !last.is_positive() {
            return None;
        }
        row.push(last);
        mu_q.push(row);
    }
    let thetas: Vec<CircuitNumber> = problem
        .slots
        .iter()
        .map(|s| {
            let bases = s
                .members
                .iter()
                .zip(&s.lambda)
                .map(|(&(a, p), l)| &mu_q[a][p] * &problem.alpha_coeff[a] / l)
                .collect();
            CircuitNumber::new(bases, s.lambda.clone())
        })
        .collect();
    let mut nu = vec![Rational::zero(); problem.slots.len()];
    for (bi, slots) in problem.beta_slots.iter().enumerate() {
        let fb = problem.beta_coeff[bi].abs();
        let lower: Vec<Rational> = slots.iter().map(|&s| rational_lower_bound(&thetas[s])).collect();
        let total: Rational = lower.iter().cloned().sum();
        if total < fb || total.is_zero() {
            return None;
        }
        for (&s, q) in slots.iter().zip(&lower) {
            nu[s] = q / &total;
        }
    }
    let mut circuits = Vec::with_capacity(problem.slots.len());
    let mut weights = Vec::with_capacity(problem.slots.len());
    for (si, s) in problem.slots.iter().enumerate() {
        let outer: Vec<(ExponentVector, Rational)> = s
            .members
            .iter()
            .map(|&(a, p)| (problem.alphas[a].clone(), &mu_q[a][p] * &problem.alpha_coeff[a]))
            .collect();
        let inner = (!nu[si].is_zero()).then(|| (problem.betas[s.beta].clone(), &nu[si] * &problem.beta_coeff[s.beta]));
        circuits.push(Circuit::from_parts(&outer, inner).ok()?);
        weights.push(CircuitWeights {
            beta: problem.betas[s.beta].clone(),
            simplex_index: s.simplex_index,
            nu: nu[si].clone(),
            mu: s.members.iter().map(|&(a, p)| mu_q[a][p].clone()).collect(),
        });
    }
    let remainder = SparseForm::from_terms(
        f.num_vars(),
        f.degree(),
        partition.r_set.iter().map(|a| (a.clone(), f.coefficient(a))),
    )
    .ok()?;
    let d = SoncDecomposition {
        circuits,
        monomial_square_remainder: remainder,
        weights,
    };
    (verify_decomposition(f, &d) == Verification::Valid).then_some(d)
}

/// Largest rational among a few approximations of `Θ` that is provably `≤ Θ`.
fn rational_lower_bound(theta: &CircuitNumber) -> Rational {
    let mut best = Rational::zero();
    let x = theta.float_value;
    let mut candidates: Vec<Rational> = ROUNDING_CAPS.iter().filter_map(|&c| rational::approximate(x, c)).collect();
    candidates.push(rational::floor_with_denominator(x * (1.0 - 1e-12), 1_000_000_000));
    for q in candidates {
        if q.is_positive() && q > best && theta.compare(&q) != std::cmp::Ordering::Greater {
            best = q;
        }
    }
    best
}

/// Searches for a cancellation-free SONC decomposition of `f`.
pub fn sonc_feasibility_search(
    f: &SparseForm,
    partition: &SupportPartition,
    budget: &SearchBudget,
) -> Result<SearchOutcome, SearchError> {
    if f.is_zero() {
        return Err(SearchError::ZeroFormInput);
    }
    let uncovered = partition.uncovered_inner();
    if !uncovered.is_empty() {
        return Err(SearchError::UncoveredInnerExponent(uncovered));
    }
    let problem = Problem::build(f, partition);
    let params = problem.free_params();
    if params > budget.max_params {
        return Ok(SearchOutcome::BudgetExceeded {
            params,
            max: budget.max_params,
        });
    }
    if problem.betas.is_empty() {
        let d = SoncDecomposition {
            circuits: Vec::new(),
            monomial_square_remainder: f.clone(),
            weights: Vec::new(),
        };
        let exact = verify_decomposition(f, &d) == Verification::Valid;
        return Ok(SearchOutcome::Feasible {
            decomposition: exact.then_some(d),
            exact,
            margin: 0.0,
        });
    }
    let scale = problem.beta_abs_f.iter().cloned().fold(0.0, f64::max);
    let seeds = budget.seeds.max(1) as u64;
    let starts: Vec<StartResult> = (0..seeds)
        .into_par_iter()
        .map(|s| run_start(&problem, s, budget, scale))
        .collect();
    let margin = starts.iter().map(|s| s.margin).fold(f64::INFINITY, f64::min);
    let normalized = margin / scale;
    if normalized <= budget.infeasibility_margin {
        for s in &starts {
            if s.margin / scale <= budget.infeasibility_margin {
                if let Some(d) = round_and_verify(&problem, f, partition, &s.mu) {
                    return Ok(SearchOutcome::Feasible {
                        decomposition: Some(d),
                        exact: true,
                        margin,
                    });
                }
            }
        }
    }
    Ok(if margin <= 0.0 {
        SearchOutcome::Feasible {
            decomposition: None,
            exact: false,
            margin,
        }
    } else if normalized > budget.infeasibility_margin {
        SearchOutcome::InfeasibleWithMargin { margin, normalized }
    } else {
        SearchOutcome::Inconclusive { margin, normalized }
    })
}
