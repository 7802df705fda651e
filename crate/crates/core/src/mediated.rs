//! Maximal mediated sets and the SOS test for nonnegative circuits.

use std::collections::{BTreeSet, VecDeque};

use rand::seq::SliceRandom;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, CircuitError, CircuitKind};
use crate::form::ExponentVector;
use crate::geometry;
use crate::linalg;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MediatedError {
    #[error("point {0} has an odd entry")]
    OddPointInDelta(ExponentVector),
    #[error("empty point set")]
    EmptyInput,
    #[error("points have different lengths")]
    DimensionMismatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    /// `Δ* = Δ ∪ Mid(Δ)`.
    MSimplex,
    /// `Δ* = conv(Δ) ∩ ℤⁿ`.
    HSimplex,
    Intermediate,
    NotSimplicial,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MediatedSet {
    pub delta: Vec<ExponentVector>,
    pub star: Vec<ExponentVector>,
    pub lattice: Vec<ExponentVector>,
    pub mid_delta: Vec<ExponentVector>,
    pub classification: Classification,
}

/// `Mid(L)`: midpoints of distinct pairs of even points of `L`.
pub fn mid_set(points: &[ExponentVector]) -> Vec<ExponentVector> {
    let even: Vec<&ExponentVector> = points.iter().filter(|p| p.is_even()).collect::<BTreeSet<_>>().into_iter().collect();
    let mut out = BTreeSet::new();
    for (i, s) in even.iter().enumerate() {
        for t in &even[i + 1..] {
            out.insert(midpoint(s, t));
        }
    }
    out.into_iter().collect()
}

fn midpoint(s: &ExponentVector, t: &ExponentVector) -> ExponentVector {
    ExponentVector(s.0.iter().zip(&t.0).map(|(a, b)| (a + b) / 2).collect())
}

/// Whether `q` is the midpoint of two distinct even points of `set`.
fn has_witness(q: &ExponentVector, set: &BTreeSet<ExponentVector>) -> bool {
    set.iter().filter(|s| s.is_even() && *s != q).any(|s| {
        let t: Option<Vec<u32>> = q.0.iter().zip(&s.0).map(|(qi, si)| (2 * qi).checked_sub(*si)).collect();
        t.map(ExponentVector).is_some_and(|t| t.is_even() && t != *s && set.contains(&t))
    })
}

fn validate(delta: &[ExponentVector]) -> Result<Vec<ExponentVector>, MediatedError> {
    let first = delta.first().ok_or(MediatedError::EmptyInput)?;
    if delta.iter().any(|p| p.len() != first.len()) {
        return Err(MediatedError::DimensionMismatch);
    }
    if let Some(p) = delta.iter().find(|p| !p.is_even()) {
        return Err(MediatedError::OddPointInDelta(p.clone()));
    }
    Ok(delta.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect())
}

/// Computes `Δ*` by deleting non-midpoints from `conv(Δ) ∩ ℤⁿ` until stable.
pub fn maximal_mediated_set(delta: &[ExponentVector]) -> Result<MediatedSet, MediatedError> {
    maximal_mediated_set_ordered(delta, None)
}

/// Same fixpoint, with the initial worklist shuffled by `seed`.
pub fn maximal_mediated_set_ordered(delta: &[ExponentVector], seed: Option<u64>) -> Result<MediatedSet, MediatedError> {
    let delta = validate(delta)?;
    let simplicial = linalg::affinely_independent(&delta.iter().map(|p| p.to_rationals()).collect::<Vec<_>>());
    let lattice = if simplicial {
        geometry::lattice_points(&delta).expect("affinely independent")
    } else {
        geometry::polytope_lattice_points(&delta)
    };
    let star = fixpoint(&lattice, &delta, seed);
    let mid_delta = mid_set(&delta);
    let classification = if !simplicial {
        Classification::NotSimplicial
    } else if star == lattice {
        Classification::HSimplex
    } else {
        let lower: BTreeSet<_> = delta.iter().chain(&mid_delta).cloned().collect();
        if star.iter().cloned().collect::<BTreeSet<_>>() == lower {
            Classification::MSimplex
        } else {
            Classification::Intermediate
        }
    };
    Ok(MediatedSet {
        delta,
        star,
        lattice,
        mid_delta,
        classification,
    })
}

fn fixpoint(lattice: &[ExponentVector], delta: &[ExponentVector], seed: Option<u64>) -> Vec<ExponentVector> {
    let mut set: BTreeSet<ExponentVector> = lattice.iter().cloned().collect();
    let fixed: BTreeSet<&ExponentVector> = delta.iter().collect();
    let mut initial: Vec<ExponentVector> = lattice.iter().filter(|p| !fixed.contains(p)).cloned().collect();
    if let Some(s) = seed {
        initial.shuffle(&mut ChaCha8Rng::seed_from_u64(s));
    }
    let mut queued: BTreeSet<ExponentVector> = initial.iter().cloned().collect();
    let mut work: VecDeque<ExponentVector> = initial.into();
    while let Some(q) = work.pop_front() {
        queued.remove(&q);
        if !set.contains(&q) || has_witness(&q, &set) {
            continue;
        }
        set.remove(&q);
        if !q.is_even() {
            continue;
        }
        // Points that may have used q as a witness endpoint.
        for s in set.iter().filter(|s| s.is_even()) {
            let m = midpoint(&q, s);
            if !fixed.contains(&m) && set.contains(&m) && queued.insert(m.clone()) {
                work.push_back(m);
            }
        }
    }
    set.into_iter().collect()
}

impl MediatedSet {
    /// Re-checks `Δ ⊆ L ⊆ Mid(L) ∪ Δ` on the computed star.
    pub fn is_mediated(&self) -> bool {
        let set: BTreeSet<ExponentVector> = self.star.iter().cloned().collect();
        self.delta.iter().all(|d| set.contains(d))
            && self.star.iter().all(|q| self.delta.contains(q) || has_witness(q, &set))
    }

    pub fn contains(&self, p: &ExponentVector) -> bool {
        self.star.binary_search(p).is_ok()
    }
}

/// A nonnegative circuit is a sum of squares iff its inner exponent lies in
/// the maximal mediated set of its outer exponents.
pub fn circuit_is_sos(c: &Circuit, mms: &MediatedSet) -> Result<bool, CircuitError> {
    if !c.decide_nonnegativity().is_nonnegative() {
        return Err(CircuitError::NotNonnegativeCircuit);
    }
    Ok(match c.kind {
        CircuitKind::MonomialSquareSum => true,
        CircuitKind::ProperCircuit => mms.contains(c.inner_exponent().expect("proper circuit")),
    })
}
