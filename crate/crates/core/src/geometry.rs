//! Newton-polytope geometry over exponent supports: vertices, barycentric
//! coordinates, covering simplices `D(β)`, lattice points and the support
//! partition `S / I / R`.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::form::{ExponentVector, SparseForm};
use crate::linalg::{self, Matrix};
use crate::lp;
use crate::rational::{self, Rational};

pub const DEFAULT_CANDIDATE_CAP: usize = 22;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("operation requires a nonzero form")]
    ZeroFormInput,
    #[error("point set is affinely dependent")]
    AffinelyDependentInput,
    #[error("inner exponent {beta} has {candidates} candidate vertices, above the cap of {cap}")]
    CapExceeded {
        beta: ExponentVector,
        candidates: usize,
        cap: usize,
    },
    #[error("half Newton polytope needs an even degree, got {0}")]
    OddDegree(u32),
    #[error("empty point set")]
    EmptyInput,
}

fn to_q(points: &[ExponentVector]) -> Vec<Vec<Rational>> {
    points.iter().map(|p| p.to_rationals()).collect()
}

/// Vertices of `conv(points)`, in graded-lex order. Duplicates are merged.
pub fn hull_vertices(points: &[ExponentVector]) -> Vec<ExponentVector> {
    let unique: Vec<ExponentVector> = points.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    if unique.len() <= 1 {
        return unique;
    }
    let q = to_q(&unique);
    (0..unique.len())
        .filter(|&i| {
            let others: Vec<Vec<Rational>> = q
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, p)| p.clone())
                .collect();
            !lp::in_convex_hull(&q[i], &others)
        })
        .map(|i| unique[i].clone())
        .collect()
}

/// Exact barycentric coordinates of `beta` with respect to affinely independent
/// `vertices`. `Ok(None)` means `beta` is not in the relative interior.
pub fn barycentric_coordinates(
    beta: &ExponentVector,
    vertices: &[ExponentVector],
) -> Result<Option<Vec<Rational>>, GeometryError> {
    barycentric_q(&beta.to_rationals(), &to_q(vertices))
}

fn barycentric_q(beta: &[Rational], vertices: &[Vec<Rational>]) -> Result<Option<Vec<Rational>>, GeometryError> {
    if vertices.is_empty() {
        return Err(GeometryError::EmptyInput);
    }
    if !linalg::affinely_independent(vertices) {
        return Err(GeometryError::AffinelyDependentInput);
    }
    Ok(affine_coordinates(beta, vertices).filter(|l| l.iter().all(|x| x.is_positive())))
}

/// Affine coordinates of `p` in `aff(vertices)`, if it lies there.
fn affine_coordinates(p: &[Rational], vertices: &[Vec<Rational>]) -> Option<Vec<Rational>> {
    let mut a: Matrix = (0..p.len())
        .map(|r| vertices.iter().map(|v| v[r].clone()).collect())
        .collect();
    a.push(vec![Rational::one(); vertices.len()]);
    let mut b = p.to_vec();
    b.push(Rational::one());
    linalg::solve(&a, &b).map(|(x, _)| x)
}

/// A simplex `Δ` with `β ∈ relint(Δ)` and the barycentric coordinates of `β`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Simplex {
    pub vertices: Vec<ExponentVector>,
    #[serde(with = "rational::serde_str::vec")]
    pub barycentric: Vec<Rational>,
}

impl Simplex {
    /// `λ_α` for a vertex, zero for any other point.
    pub fn lambda_for(&self, alpha: &ExponentVector) -> Rational {
        self.vertices
            .iter()
            .position(|v| v == alpha)
            .map(|i| self.barycentric[i].clone())
            .unwrap_or_else(Rational::zero)
    }

    pub fn contains_vertex(&self, alpha: &ExponentVector) -> bool {
        self.vertices.contains(alpha)
    }
}

/// Every affinely independent subset of `candidates` (at most `n + 1` points)
/// whose relative interior contains `beta`, sorted by size then vertex list.
pub fn enumerate_simplices(
    beta: &ExponentVector,
    candidates: &[ExponentVector],
    cap: usize,
) -> Result<Vec<Simplex>, GeometryError> {
    let mut cands: Vec<ExponentVector> = candidates.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    cands.retain(|c| c != beta);
    if cands.len() > cap {
        return Err(GeometryError::CapExceeded {
            beta: beta.clone(),
            candidates: cands.len(),
            cap,
        });
    }
    let bq = beta.to_rationals();
    let q = to_q(&cands);
    let max_size = beta.len() + 1;
    let mut out = Vec::new();
    let mut chosen: Vec<usize> = Vec::new();
    search_subsets(&q, &bq, max_size, 0, &mut chosen, &mut out);
    let mut simplices: Vec<Simplex> = out
        .into_iter()
        .map(|(idx, lambda)| Simplex {
            vertices: idx.iter().map(|&i| cands[i].clone()).collect(),
            barycentric: lambda,
        })
        .collect();
    simplices.sort_by(|a, b| (a.vertices.len(), &a.vertices).cmp(&(b.vertices.len(), &b.vertices)));
    Ok(simplices)
}

fn search_subsets(
    q: &[Vec<Rational>],
    beta: &[Rational],
    max_size: usize,
    start: usize,
    chosen: &mut Vec<usize>,
    out: &mut Vec<(Vec<usize>, Vec<Rational>)>,
) {
    for i in start..q.len() {
        chosen.push(i);
        let pts: Vec<Vec<Rational>> = chosen.iter().map(|&k| q[k].clone()).collect();
        if linalg::affinely_independent(&pts) {
            if let Some(l) = affine_coordinates(beta, &pts) {
                if l.iter().all(|x| x.is_positive()) {
                    out.push((chosen.clone(), l));
                }
            }
            if chosen.len() < max_size {
                search_subsets(q, beta, max_size, i + 1, chosen, out);
            }
        }
        chosen.pop();
    }
}

/// Integer points of the simplex spanned by affinely independent `vertices`.
pub fn lattice_points(vertices: &[ExponentVector]) -> Result<Vec<ExponentVector>, GeometryError> {
    if vertices.is_empty() {
        return Err(GeometryError::EmptyInput);
    }
    let q = to_q(vertices);
    if !linalg::affinely_independent(&q) {
        return Err(GeometryError::AffinelyDependentInput);
    }
    let degree = common_degree(vertices);
    Ok(box_scan(vertices, degree, |p| {
        affine_coordinates(&p.to_rationals(), &q).is_some_and(|l| l.iter().all(|x| !x.is_negative()))
    }))
}

/// Integer points of `conv(points)` for an arbitrary point set.
pub fn polytope_lattice_points(points: &[ExponentVector]) -> Vec<ExponentVector> {
    if points.is_empty() {
        return Vec::new();
    }
    let verts = hull_vertices(points);
    let q = to_q(&verts);
    let degree = common_degree(&verts);
    box_scan(&verts, degree, |p| lp::in_convex_hull(&p.to_rationals(), &q))
}

fn common_degree(points: &[ExponentVector]) -> Option<u32> {
    let d = points[0].degree();
    points.iter().all(|p| p.degree() == d).then_some(d)
}

fn box_scan<F: Fn(&ExponentVector) -> bool>(
    points: &[ExponentVector],
    degree: Option<u32>,
    accept: F,
) -> Vec<ExponentVector> {
    let n = points[0].len();
    let lo: Vec<u32> = (0..n).map(|i| points.iter().map(|p| p.0[i]).min().unwrap()).collect();
    let hi: Vec<u32> = (0..n).map(|i| points.iter().map(|p| p.0[i]).max().unwrap()).collect();
    let mut out = Vec::new();
    let mut cur = lo.clone();
    loop {
        let p = ExponentVector(cur.clone());
        if degree.is_none_or(|d| p.degree() == d) && accept(&p) {
            out.push(p);
        }
        let mut k = 0;
        loop {
            if k == n {
                out.sort();
                return out;
            }
            if cur[k] < hi[k] {
                cur[k] += 1;
                break;
            }
            cur[k] = lo[k];
            k += 1;
        }
    }
}

/// Lattice points of `½ New(f)`: the candidate supports of SOS summands.
pub fn half_newton_support(f: &SparseForm) -> Result<Vec<ExponentVector>, GeometryError> {
    if f.degree() % 2 == 1 {
        return Err(GeometryError::OddDegree(f.degree()));
    }
    if f.is_zero() {
        return Ok(Vec::new());
    }
    let verts = hull_vertices(&f.support());
    let two = Rational::from_integer(BigInt::from(2));
    let halves: Vec<Vec<Rational>> = verts
        .iter()
        .map(|v| v.to_rationals().into_iter().map(|x| x / &two).collect())
        .collect();
    let n = f.num_vars();
    let half_deg = f.degree() / 2;
    let lo: Vec<u32> = (0..n).map(|i| verts.iter().map(|v| v.0[i]).min().unwrap().div_ceil(2)).collect();
    let hi: Vec<u32> = (0..n).map(|i| verts.iter().map(|v| v.0[i]).max().unwrap() / 2).collect();
    if lo.iter().zip(&hi).any(|(l, h)| l > h) {
        return Ok(Vec::new());
    }
    let corners = vec![ExponentVector(lo), ExponentVector(hi)];
    Ok(box_scan(&corners, Some(half_deg), |p| {
        lp::in_convex_hull(&p.to_rationals(), &halves)
    }))
}

/// Result of checking that every Newton-polytope vertex is a monomial square.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PsdPrecheck {
    Pass,
    CertifiedNotPsd(ExponentVector),
}

pub fn psd_newton_precheck(f: &SparseForm) -> PsdPrecheck {
    for v in hull_vertices(&f.support()) {
        if !(v.is_even() && f.coefficient(&v).is_positive()) {
            return PsdPrecheck::CertifiedNotPsd(v);
        }
    }
    PsdPrecheck::Pass
}

/// `S(f)`, `I(f)`, `V(f)`, `R(f)` and the covering simplex families `D(β)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportPartition {
    pub s_set: Vec<ExponentVector>,
    pub i_set: Vec<ExponentVector>,
    pub vertices: Vec<ExponentVector>,
    pub r_set: Vec<ExponentVector>,
    pub simplex_families: BTreeMap<ExponentVector, Vec<Simplex>>,
}

impl SupportPartition {
    /// `N(β)`.
    pub fn family_size(&self, beta: &ExponentVector) -> usize {
        self.simplex_families.get(beta).map_or(0, |v| v.len())
    }

    /// `S(f) ⧵ R(f)`.
    pub fn covering_squares(&self) -> Vec<ExponentVector> {
        self.s_set.iter().filter(|a| !self.r_set.contains(a)).cloned().collect()
    }

    pub fn uncovered_inner(&self) -> Vec<ExponentVector> {
        self.i_set.iter().filter(|b| self.family_size(b) == 0).cloned().collect()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PartitionOptions {
    pub candidate_cap: usize,
}

impl Default for PartitionOptions {
    fn default() -> Self {
        PartitionOptions {
            candidate_cap: DEFAULT_CANDIDATE_CAP,
        }
    }
}

pub fn is_monomial_square(f: &SparseForm, alpha: &ExponentVector) -> bool {
    alpha.is_even() && f.coefficient(alpha).is_positive()
}

pub fn support_partition(f: &SparseForm) -> Result<SupportPartition, GeometryError> {
    support_partition_with(f, PartitionOptions::default())
}

pub fn support_partition_with(f: &SparseForm, opts: PartitionOptions) -> Result<SupportPartition, GeometryError> {
    if f.is_zero() {
        return Err(GeometryError::ZeroFormInput);
    }
    let support = f.support();
    let (s_set, i_set): (Vec<_>, Vec<_>) = support.iter().cloned().partition(|a| is_monomial_square(f, a));
    let vertices = hull_vertices(&support);
    let families: Vec<(ExponentVector, Vec<Simplex>)> = i_set
        .par_iter()
        .map(|beta| enumerate_simplices(beta, &s_set, opts.candidate_cap).map(|fam| (beta.clone(), fam)))
        .collect::<Result<_, _>>()?;
    let simplex_families: BTreeMap<_, _> = families.into_iter().collect();
    let used: BTreeSet<&ExponentVector> = simplex_families
        .values()
        .flatten()
        .flat_map(|s| s.vertices.iter())
        .collect();
    let r_set = s_set.iter().filter(|a| !used.contains(a)).cloned().collect();
    Ok(SupportPartition {
        s_set,
        i_set,
        vertices,
        r_set,
        simplex_families,
    })
}
