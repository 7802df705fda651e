//! The coefficient-sum necessary condition for SONC membership, its
//! equality-case refinement, and exact checking of SONC decompositions.

use std::cmp::Ordering;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::Circuit;
use crate::form::{ExponentVector, SparseForm};
use crate::geometry::{is_monomial_square, SupportPartition};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SoncError {
    #[error("operation requires a nonzero form")]
    ZeroFormInput,
    #[error("the coefficient sums are not equal")]
    PreconditionNotEquality,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionVerdict {
    Violated,
    Equality,
    StrictlySatisfied,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorollaryViolation {
    pub alpha: ExponentVector,
    pub beta: ExponentVector,
    #[serde(with = "rational::serde_str")]
    pub bound: Rational,
    #[serde(with = "rational::serde_str")]
    pub coefficient: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorollaryReport {
    pub violations: Vec<CorollaryViolation>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NecessaryConditionReport {
    /// `Σ_{β ∈ I} |f_β|`.
    #[serde(with = "rational::serde_str")]
    pub inner_sum: Rational,
    /// `Σ_{α ∈ S ⧵ R} f_α`.
    #[serde(with = "rational::serde_str")]
    pub outer_sum: Rational,
    pub verdict: ConditionVerdict,
    /// Inner exponents covered by no simplex.
    pub uncovered_inner: Vec<ExponentVector>,
    pub corollary: Option<CorollaryReport>,
}

impl NecessaryConditionReport {
    /// Whether this report alone proves the form is not SONC.
    pub fn disproves_sonc(&self) -> bool {
        self.verdict == ConditionVerdict::Violated
            || self.corollary.as_ref().is_some_and(|c| !c.violations.is_empty())
    }
}

pub fn necessary_condition(f: &SparseForm, partition: &SupportPartition) -> Result<NecessaryConditionReport, SoncError> {
    if f.is_zero() {
        return Err(SoncError::ZeroFormInput);
    }
    let inner_sum: Rational = partition.i_set.iter().map(|b| f.coefficient(b).abs()).sum();
    let outer_sum: Rational = partition.covering_squares().iter().map(|a| f.coefficient(a)).sum();
    let uncovered_inner = partition.uncovered_inner();
    let verdict = if !uncovered_inner.is_empty() {
        ConditionVerdict::Violated
    } else {
        match inner_sum.cmp(&outer_sum) {
            Ordering::Greater => ConditionVerdict::Violated,
            Ordering::Equal => ConditionVerdict::Equality,
            Ordering::Less => ConditionVerdict::StrictlySatisfied,
        }
    };
    let corollary = if verdict == ConditionVerdict::Equality {
        Some(corollary_check(f, partition)?)
    } else {
        None
    };
    Ok(NecessaryConditionReport {
        inner_sum,
        outer_sum,
        verdict,
        uncovered_inner,
        corollary,
    })
}

/// For every `α ∈ S ⧵ R`, `β ∈ I`: `f_α ≥ min_k λ_αβ^{(k)} |f_β|`, with
/// `λ = 0` when `α` is not a vertex of the `k`-th simplex.
pub fn corollary_check(f: &SparseForm, partition: &SupportPartition) -> Result<CorollaryReport, SoncError> {
    if f.is_zero() {
        return Err(SoncError::ZeroFormInput);
    }
    let inner_sum: Rational = partition.i_set.iter().map(|b| f.coefficient(b).abs()).sum();
    let outer_sum: Rational = partition.covering_squares().iter().map(|a| f.coefficient(a)).sum();
    if inner_sum != outer_sum {
        return Err(SoncError::PreconditionNotEquality);
    }
    let mut violations = Vec::new();
    for alpha in partition.covering_squares() {
        let fa = f.coefficient(&alpha);
        for beta in &partition.i_set {
            let Some(min_lambda) = partition
                .simplex_families
                .get(beta)
                .and_then(|fam| fam.iter().map(|s| s.lambda_for(&alpha)).min())
            else {
                continue;
            };
            let bound = min_lambda * f.coefficient(beta).abs();
            if fa < bound {
                violations.push(CorollaryViolation {
                    alpha: alpha.clone(),
                    beta: beta.clone(),
                    bound,
                    coefficient: fa.clone(),
                });
            }
        }
    }
    Ok(CorollaryReport { violations })
}

/// Weights `μ_α` and `ν` that produced one circuit of a decomposition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitWeights {
    pub beta: ExponentVector,
    pub simplex_index: usize,
    #[serde(with = "rational::serde_str")]
    pub nu: Rational,
    #[serde(with = "rational::serde_str::vec")]
    pub mu: Vec<Rational>,
}

/// `f = Σ circuits + remainder`, with a monomial-square remainder.
#[derive(Debug, Clone, PartialEq)]
pub struct SoncDecomposition {
    pub circuits: Vec<Circuit>,
    pub monomial_square_remainder: SparseForm,
    /// Aligned with `circuits` when the decomposition came from the search.
    pub weights: Vec<CircuitWeights>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "reason")]
pub enum InvalidReason {
    SumMismatch,
    NotNonnegative { index: usize },
    RemainderNotMonomialSquares,
    NotCancellationFree { index: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verification {
    Valid,
    Invalid(InvalidReason),
}

/// Exact check of sum equality, circuit nonnegativity, remainder shape and the
/// cancellation-free support condition, in that order.
pub fn verify_decomposition(f: &SparseForm, d: &SoncDecomposition) -> Verification {
    let mut total = d.monomial_square_remainder.clone();
    for c in &d.circuits {
        match total.add(&c.form) {
            Ok(t) => total = t,
            Err(_) => return Verification::Invalid(InvalidReason::SumMismatch),
        }
    }
    if total.terms() != f.terms() || total.num_vars() != f.num_vars() {
        return Verification::Invalid(InvalidReason::SumMismatch);
    }
    if let Some(i) = d.circuits.iter().position(|c| !c.decide_nonnegativity().is_nonnegative()) {
        return Verification::Invalid(InvalidReason::NotNonnegative { index: i });
    }
    let rem = &d.monomial_square_remainder;
    if rem.support().iter().any(|a| !is_monomial_square(rem, a)) {
        return Verification::Invalid(InvalidReason::RemainderNotMonomialSquares);
    }
    if let Some(i) = d
        .circuits
        .iter()
        .position(|c| c.form.support().iter().any(|a| f.coefficient(a).is_zero()))
    {
        return Verification::Invalid(InvalidReason::NotCancellationFree { index: i });
    }
    Verification::Valid
}
