//! Circuit forms: detection, circuit numbers with exact comparison,
//! nonnegativity, and zero loci on the positive orthant.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector};
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::form::{ExponentVector, SparseForm};
use crate::geometry::{self, is_monomial_square};
use crate::linalg::{self, Matrix};
use crate::rational::{self, Rational};

/// Singular values below this count as zero in [`logs_affinely_independent`].
pub const LOG_RANK_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CircuitKind {
    MonomialSquareSum,
    ProperCircuit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NotACircuitReason {
    /// Some Newton-polytope vertex is not a monomial square.
    VertexSquareMismatch,
    /// The Newton-polytope vertices are affinely dependent.
    AffinelyDependent,
    /// More than one exponent lies off the vertex set.
    TooManyInner,
    /// The single non-vertex exponent is on the relative boundary.
    InnerNotInRelint,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CircuitError {
    #[error("operation requires a nonzero form")]
    ZeroFormInput,
    #[error("not a circuit: {0:?}")]
    NotACircuit(NotACircuitReason),
    #[error("a sum of monomial squares has no circuit number")]
    MonomialSquareSumHasNoCircuitNumber,
    #[error("circuit is not nonnegative")]
    NotNonnegativeCircuit,
    #[error("point has a zero coordinate")]
    ZeroCoordinate,
}

/// A validated circuit form.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub form: SparseForm,
    pub outer: Vec<(ExponentVector, Rational)>,
    pub inner: Option<(ExponentVector, Rational)>,
    /// Barycentric coordinates of the inner exponent, aligned with `outer`.
    /// Empty when there is no inner exponent.
    pub barycentric: Vec<Rational>,
    pub kind: CircuitKind,
}

pub fn detect_circuit(f: &SparseForm) -> Result<Circuit, CircuitError> {
    if f.is_zero() {
        return Err(CircuitError::ZeroFormInput);
    }
    let support = f.support();
    let vertices = geometry::hull_vertices(&support);
    if vertices.iter().any(|v| !is_monomial_square(f, v)) {
        return Err(CircuitError::NotACircuit(NotACircuitReason::VertexSquareMismatch));
    }
    let vq: Vec<Vec<Rational>> = vertices.iter().map(|v| v.to_rationals()).collect();
    if !linalg::affinely_independent(&vq) {
        return Err(CircuitError::NotACircuit(NotACircuitReason::AffinelyDependent));
    }
    let others: Vec<&ExponentVector> = support.iter().filter(|a| !vertices.contains(a)).collect();
    if others.len() > 1 {
        return Err(CircuitError::NotACircuit(NotACircuitReason::TooManyInner));
    }
    let outer: Vec<(ExponentVector, Rational)> = vertices.iter().map(|v| (v.clone(), f.coefficient(v))).collect();
    let Some(beta) = others.first() else {
        return Ok(Circuit {
            form: f.clone(),
            outer,
            inner: None,
            barycentric: Vec::new(),
            kind: CircuitKind::MonomialSquareSum,
        });
    };
    let lambda = geometry::barycentric_coordinates(beta, &vertices)
        .map_err(|_| CircuitError::NotACircuit(NotACircuitReason::AffinelyDependent))?
        .ok_or(CircuitError::NotACircuit(NotACircuitReason::InnerNotInRelint))?;
    let kind = if is_monomial_square(f, beta) {
        CircuitKind::MonomialSquareSum
    } else {
        CircuitKind::ProperCircuit
    };
    Ok(Circuit {
        form: f.clone(),
        outer,
        inner: Some(((*beta).clone(), f.coefficient(beta))),
        barycentric: lambda,
        kind,
    })
}

impl Circuit {
    /// Builds the circuit `Σ c_i x^{α_i} + c_β x^β` and validates it.
    pub fn from_parts(
        outer: &[(ExponentVector, Rational)],
        inner: Option<(ExponentVector, Rational)>,
    ) -> Result<Circuit, CircuitError> {
        let n = outer.first().map(|(a, _)| a.len()).unwrap_or(0);
        let degree = outer.first().map(|(a, _)| a.degree()).unwrap_or(0);
        let f = SparseForm::from_terms(n, degree, outer.iter().cloned().chain(inner))
            .map_err(|_| CircuitError::NotACircuit(NotACircuitReason::AffinelyDependent))?;
        detect_circuit(&f)
    }

    pub fn inner_exponent(&self) -> Option<&ExponentVector> {
        self.inner.as_ref().map(|(b, _)| b)
    }

    pub fn circuit_number(&self) -> Result<CircuitNumber, CircuitError> {
        if self.kind != CircuitKind::ProperCircuit {
            return Err(CircuitError::MonomialSquareSumHasNoCircuitNumber);
        }
        let bases: Vec<Rational> = self
            .outer
            .iter()
            .zip(&self.barycentric)
            .map(|((_, c), l)| c / l)
            .collect();
        Ok(CircuitNumber::new(bases, self.barycentric.clone()))
    }

    pub fn decide_nonnegativity(&self) -> Nonnegativity {
        match self.kind {
            CircuitKind::MonomialSquareSum => Nonnegativity::Nonnegative { boundary: false },
            CircuitKind::ProperCircuit => {
                let theta = self.circuit_number().expect("proper circuit");
                let fb = self.inner.as_ref().expect("proper circuit").1.abs();
                match theta.compare(&fb) {
                    Ordering::Less => Nonnegativity::Nonnegative { boundary: false },
                    Ordering::Equal => Nonnegativity::Nonnegative { boundary: true },
                    Ordering::Greater => Nonnegativity::NotNonnegative,
                }
            }
        }
    }
}

/// `Θ = Π base_i^{λ_i}` with `base_i = f_{α_i} / λ_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitNumber {
    #[serde(with = "rational::serde_str::vec")]
    pub factor_bases: Vec<Rational>,
    #[serde(with = "rational::serde_str::vec")]
    pub exponents: Vec<Rational>,
    /// Display only; never used for decisions.
    pub float_value: f64,
}

impl CircuitNumber {
    pub fn new(factor_bases: Vec<Rational>, exponents: Vec<Rational>) -> Self {
        let float_value = factor_bases
            .iter()
            .zip(&exponents)
            .map(|(b, l)| rational::to_f64(l) * rational::to_f64(b).ln())
            .sum::<f64>()
            .exp();
        CircuitNumber {
            factor_bases,
            exponents,
            float_value,
        }
    }

    /// Exact ordering of `t` relative to `Θ`, for `t ≥ 0`.
    ///
    /// With `L` the lcm of the exponent denominators, compares `t^L` against
    /// `Π base_i^{L·λ_i}`; both sides are rationals.
    pub fn compare(&self, t: &Rational) -> Ordering {
        if t.is_negative() {
            return Ordering::Less;
        }
        let l = rational::lcm_of_denominators(&self.exponents);
        let l_u64: u64 = l.clone().try_into().expect("lcm fits in u64");
        let lhs = rational::pow(t, l_u64);
        let l_q = Rational::from_integer(l);
        let mut rhs = Rational::one();
        for (b, lam) in self.factor_bases.iter().zip(&self.exponents) {
            let e = (lam * &l_q).to_integer();
            let e: u64 = e.try_into().expect("exponent fits in u64");
            rhs *= rational::pow(b, e);
        }
        lhs.cmp(&rhs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Nonnegativity {
    Nonnegative { boundary: bool },
    NotNonnegative,
}

impl Nonnegativity {
    pub fn is_nonnegative(&self) -> bool {
        matches!(self, Nonnegativity::Nonnegative { .. })
    }
}

/// Solution set of `f(e^y) = 0`:
/// `(α_i − α_0)ᵀ y = (log λ_i − log f_i) − (log λ_0 − log f_0)` for `i = 1..m`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroLocus {
    pub matrix: Matrix,
    /// `(λ_i, f_i)` for `i = 0..m`; row `i` uses entries `i` and `0`.
    pub rhs_symbolic: Vec<(Rational, Rational)>,
    pub dimension: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ZeroLocusOutcome {
    Locus(ZeroLocus),
    EmptyInOpenOrthant,
    SignCaseOutOfScope,
}

pub fn zero_locus(c: &Circuit) -> Result<ZeroLocusOutcome, CircuitError> {
    if c.kind != CircuitKind::ProperCircuit {
        return Ok(ZeroLocusOutcome::EmptyInOpenOrthant);
    }
    match c.decide_nonnegativity() {
        Nonnegativity::NotNonnegative => Err(CircuitError::NotNonnegativeCircuit),
        Nonnegativity::Nonnegative { boundary: false } => Ok(ZeroLocusOutcome::EmptyInOpenOrthant),
        Nonnegativity::Nonnegative { boundary: true } => {
            let fb = &c.inner.as_ref().expect("proper circuit").1;
            if fb.is_positive() {
                return Ok(ZeroLocusOutcome::SignCaseOutOfScope);
            }
            let a0 = c.outer[0].0.to_rationals();
            let matrix: Matrix = c.outer[1..]
                .iter()
                .map(|(a, _)| a.to_rationals().iter().zip(&a0).map(|(x, y)| x - y).collect())
                .collect();
            let n = a0.len();
            let rank = linalg::rank(&matrix);
            let rhs_symbolic = c
                .barycentric
                .iter()
                .zip(&c.outer)
                .map(|(l, (_, fa))| (l.clone(), fa.clone()))
                .collect();
            Ok(ZeroLocusOutcome::Locus(ZeroLocus {
                matrix,
                rhs_symbolic,
                dimension: n - rank,
            }))
        }
    }
}

impl ZeroLocus {
    pub fn num_vars(&self) -> usize {
        self.matrix.first().map(|r| r.len()).unwrap_or(self.dimension)
    }

    pub fn numeric_rhs(&self) -> Vec<f64> {
        let log_term = |(l, f): &(Rational, Rational)| rational::to_f64(l).ln() - rational::to_f64(f).ln();
        let base = log_term(&self.rhs_symbolic[0]);
        self.rhs_symbolic[1..].iter().map(|p| log_term(p) - base).collect()
    }

    /// Minimum-norm solution via the pseudo-inverse.
    pub fn particular_solution(&self) -> Vec<f64> {
        least_squares(&self.matrix, &self.numeric_rhs(), self.num_vars())
    }

    /// Float basis of the direction space.
    pub fn direction_basis(&self) -> Vec<Vec<f64>> {
        if self.matrix.is_empty() {
            return (0..self.num_vars())
                .map(|i| (0..self.num_vars()).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                .collect();
        }
        linalg::nullspace(&self.matrix, self.num_vars())
            .iter()
            .map(|v| v.iter().map(rational::to_f64).collect())
            .collect()
    }

    /// `count` points of the locus, `y = y* + Σ t_k d_k` with `t_k ∈ [−spread, spread]`.
    pub fn sample(&self, count: usize, spread: f64, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let base = self.particular_solution();
        let dirs = self.direction_basis();
        (0..count)
            .map(|_| {
                let mut y = base.clone();
                for d in &dirs {
                    let t: f64 = rng.gen_range(-spread..=spread);
                    for (yi, di) in y.iter_mut().zip(d) {
                        *yi += t * di;
                    }
                }
                y
            })
            .collect()
    }
}

fn least_squares(matrix: &Matrix, rhs: &[f64], n: usize) -> Vec<f64> {
    if matrix.is_empty() {
        return vec![0.0; n];
    }
    let m = matrix.len();
    let a = DMatrix::from_fn(m, n, |i, j| rational::to_f64(&matrix[i][j]));
    let b = DVector::from_column_slice(rhs);
    let svd = a.svd(true, true);
    svd.solve(&b, 1e-12).map(|x| x.iter().copied().collect()).unwrap_or_else(|_| vec![0.0; n])
}

/// Whether `{log|v_i|}` is affinely independent, via singular values of the
/// difference matrix. Approximate: singular values below 1e-9 count as zero.
pub fn logs_affinely_independent(points: &[Vec<f64>]) -> Result<bool, CircuitError> {
    if points.iter().flatten().any(|&x| x == 0.0) {
        return Err(CircuitError::ZeroCoordinate);
    }
    if points.len() <= 1 {
        return Ok(true);
    }
    let n = points[0].len();
    if points.len() > n + 1 {
        return Ok(false);
    }
    let logs: Vec<Vec<f64>> = points.iter().map(|p| p.iter().map(|x| x.abs().ln()).collect()).collect();
    let rows = logs.len() - 1;
    let diff = DMatrix::from_fn(rows, n, |i, j| logs[i + 1][j] - logs[0][j]);
    let rank = diff.singular_values().iter().filter(|s| **s > LOG_RANK_TOLERANCE).count();
    Ok(rank == rows)
}

/// A rational point where a circuit that is not nonnegative takes a negative
/// value. Tries the AM-GM equality direction first, then random sampling.
pub fn negative_witness(c: &Circuit) -> Option<Vec<Rational>> {
    if c.decide_nonnegativity().is_nonnegative() {
        return None;
    }
    let (beta, fb) = c.inner.as_ref()?;
    let n = beta.len();
    // Sign flip on an odd coordinate of β turns a positive inner term negative.
    let flip = if fb.is_positive() {
        Some(beta.entries().iter().position(|e| e % 2 == 1)?)
    } else {
        None
    };
    let a0 = c.outer[0].0.to_rationals();
    let matrix: Matrix = c.outer[1..]
        .iter()
        .map(|(a, _)| a.to_rationals().iter().zip(&a0).map(|(x, y)| x - y).collect())
        .collect();
    let locus = ZeroLocus {
        matrix,
        rhs_symbolic: c
            .barycentric
            .iter()
            .zip(&c.outer)
            .map(|(l, (_, f))| (l.clone(), f.clone()))
            .collect(),
        dimension: 0,
    };
    let y = least_squares(&locus.matrix, &locus.numeric_rhs(), n);
    let to_point = |y: &[f64]| -> Option<Vec<Rational>> {
        y.iter()
            .enumerate()
            .map(|(i, yi)| {
                let v = rational::approximate(yi.exp(), 1_000_000)?;
                if v.is_zero() {
                    return None;
                }
                Some(if Some(i) == flip { -v } else { v })
            })
            .collect()
    };
    if let Some(p) = to_point(&y) {
        if c.form.evaluate(&p).ok()?.is_negative() {
            return Some(p);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..10_000 {
        let p: Vec<Rational> = (0..n).map(|_| rational::qr(rng.gen_range(-30..=30), 10)).collect();
        if c.form.evaluate(&p).ok()?.is_negative() {
            return Some(p);
        }
    }
    None
}
