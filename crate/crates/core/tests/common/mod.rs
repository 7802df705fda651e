//! Independent brute-force oracles shared by the integration tests. None of
//! these call into the geometry, LP or mediated-set code under test.
#![allow(dead_code)]

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use sonckit::rational::q;
use sonckit::{ExponentVector, Rational};

/// Solves `Σ λ_i v_i = p, Σ λ_i = 1` by Gauss-Jordan on the augmented matrix.
/// Returns `None` when inconsistent or not uniquely solvable.
pub fn affine_coordinates(vertices: &[Vec<Rational>], p: &[Rational]) -> Option<Vec<Rational>> {
    let k = vertices.len();
    let mut rows: Vec<Vec<Rational>> = (0..p.len())
        .map(|r| {
            let mut row: Vec<Rational> = vertices.iter().map(|v| v[r].clone()).collect();
            row.push(p[r].clone());
            row
        })
        .collect();
    let mut ones = vec![Rational::one(); k];
    ones.push(Rational::one());
    rows.push(ones);

    let mut pivot_row = 0;
    for col in 0..k {
        let r = (pivot_row..rows.len()).find(|&r| !rows[r][col].is_zero())?;
        rows.swap(pivot_row, r);
        let inv = rows[pivot_row][col].recip();
        for x in rows[pivot_row].iter_mut() {
            *x *= &inv;
        }
        for r in 0..rows.len() {
            if r != pivot_row && !rows[r][col].is_zero() {
                let factor = rows[r][col].clone();
                for c in 0..=k {
                    let delta = &factor * &rows[pivot_row][c];
                    rows[r][c] -= delta;
                }
            }
        }
        pivot_row += 1;
    }
    if rows[pivot_row..].iter().any(|r| !r[k].is_zero()) {
        return None;
    }
    Some((0..k).map(|i| rows[i][k].clone()).collect())
}

pub fn rat(v: &ExponentVector) -> Vec<Rational> {
    v.entries().iter().map(|&x| q(x as i64)).collect()
}

/// Exact affine independence by checking that the coordinates of each vertex
/// with respect to all of them are unique.
pub fn independent(points: &[ExponentVector]) -> bool {
    let pts: Vec<Vec<Rational>> = points.iter().map(rat).collect();
    affine_coordinates(&pts, &pts[0]).is_some()
}

/// `conv(vertices) ∩ ℤⁿ` for an affinely independent set, by scanning the
/// bounding box.
pub fn box_lattice(vertices: &[ExponentVector]) -> Vec<ExponentVector> {
    let n = vertices[0].len();
    let lo: Vec<u32> = (0..n).map(|i| vertices.iter().map(|v| v.entries()[i]).min().unwrap()).collect();
    let hi: Vec<u32> = (0..n).map(|i| vertices.iter().map(|v| v.entries()[i]).max().unwrap()).collect();
    let verts: Vec<Vec<Rational>> = vertices.iter().map(rat).collect();
    let mut out = Vec::new();
    let mut cur = lo.clone();
    loop {
        let p: Vec<Rational> = cur.iter().map(|&x| q(x as i64)).collect();
        if affine_coordinates(&verts, &p).is_some_and(|l| l.iter().all(|x| !x.is_negative())) {
            out.push(ExponentVector(cur.clone()));
        }
        let mut i = 0;
        loop {
            if i == n {
                out.sort();
                return out;
            }
            if cur[i] < hi[i] {
                cur[i] += 1;
                break;
            }
            cur[i] = lo[i];
            i += 1;
        }
    }
}

pub fn subsets<T: Clone>(items: &[T], max_len: usize) -> Vec<Vec<T>> {
    let mut out = vec![Vec::new()];
    for it in items {
        let extra: Vec<Vec<T>> = out
            .iter()
            .filter(|s| s.len() < max_len)
            .map(|s| {
                let mut s = s.clone();
                s.push(it.clone());
                s
            })
            .collect();
        out.extend(extra);
    }
    out
}

/// Whether `p` is a convex combination of `others` (Carathéodory: some
/// affinely independent subset of size at most n+1 suffices).
pub fn in_hull(p: &ExponentVector, others: &[ExponentVector]) -> bool {
    let target = rat(p);
    subsets(others, p.len() + 1).into_iter().filter(|s| !s.is_empty()).any(|s| {
        let verts: Vec<Vec<Rational>> = s.iter().map(rat).collect();
        affine_coordinates(&verts, &target).is_some_and(|l| l.iter().all(|x| !x.is_negative()))
    })
}

pub fn brute_hull_vertices(points: &[ExponentVector]) -> Vec<ExponentVector> {
    let pts: Vec<ExponentVector> = points.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    pts.iter()
        .filter(|p| {
            let others: Vec<ExponentVector> = pts.iter().filter(|o| o != p).cloned().collect();
            !in_hull(p, &others)
        })
        .cloned()
        .collect()
}

fn is_witnessed(p: &ExponentVector, set: &BTreeSet<ExponentVector>) -> bool {
    let even: Vec<&ExponentVector> = set.iter().filter(|s| s.is_even()).collect();
    even.iter().enumerate().any(|(i, s)| {
        even[i + 1..]
            .iter()
            .any(|t| s.entries().iter().zip(t.entries()).zip(p.entries()).all(|((a, b), c)| a + b == 2 * c))
    })
}

fn mediated(set: &BTreeSet<ExponentVector>, delta: &BTreeSet<ExponentVector>) -> bool {
    set.iter().all(|p| delta.contains(p) || is_witnessed(p, set))
}

/// Largest mediated set by trying every subset of the non-vertex lattice
/// points, largest first. Only for small lattices.
pub fn exhaustive_mms(delta: &[ExponentVector], lattice: &[ExponentVector]) -> Vec<ExponentVector> {
    let d: BTreeSet<ExponentVector> = delta.iter().cloned().collect();
    let rest: Vec<ExponentVector> = lattice.iter().filter(|p| !d.contains(p)).cloned().collect();
    assert!(rest.len() <= 16, "lattice too large for the exhaustive oracle");
    let mut masks: Vec<u32> = (0..(1u32 << rest.len())).collect();
    masks.sort_by_key(|m| std::cmp::Reverse(m.count_ones()));
    for m in masks {
        let mut set = d.clone();
        set.extend(rest.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, p)| p.clone()));
        if mediated(&set, &d) {
            return set.into_iter().collect();
        }
    }
    unreachable!("delta itself is mediated")
}

/// Largest mediated set by whole-set sweeps: drop every unwitnessed point
/// until nothing changes.
pub fn sweep_mms(delta: &[ExponentVector], lattice: &[ExponentVector]) -> Vec<ExponentVector> {
    let d: BTreeSet<ExponentVector> = delta.iter().cloned().collect();
    let mut set: BTreeSet<ExponentVector> = lattice.iter().cloned().collect();
    loop {
        let drop: Vec<ExponentVector> = set
            .iter()
            .filter(|p| !d.contains(*p) && !is_witnessed(p, &set))
            .cloned()
            .collect();
        if drop.is_empty() {
            return set.into_iter().collect();
        }
        for p in drop {
            set.remove(&p);
        }
    }
}

/// Every affinely independent subset of `squares` that has `beta` in its
/// relative interior, as sorted vertex lists.
pub fn brute_simplices(beta: &ExponentVector, squares: &[ExponentVector]) -> BTreeSet<Vec<ExponentVector>> {
    let target = rat(beta);
    subsets(squares, beta.len() + 1)
        .into_iter()
        .filter(|s| s.len() >= 2)
        .filter(|s| {
            let verts: Vec<Vec<Rational>> = s.iter().map(rat).collect();
            independent(s) && affine_coordinates(&verts, &target).is_some_and(|l| l.iter().all(|x| x.is_positive()))
        })
        .map(|mut s| {
            s.sort();
            s
        })
        .collect()
}

/// Random affinely independent set of even points in `{0,2,…,2·max_half}ⁿ`
/// with at most `max_lattice` lattice points.
pub fn random_even_simplex(rng: &mut ChaCha8Rng, max_lattice: usize) -> (Vec<ExponentVector>, Vec<ExponentVector>) {
    loop {
        let n = rng.gen_range(2..=4);
        let k = rng.gen_range(2..=n + 1);
        let pts: Vec<ExponentVector> = (0..k)
            .map(|_| ExponentVector((0..n).map(|_| 2 * rng.gen_range(0..=3u32)).collect()))
            .collect();
        if pts.iter().collect::<BTreeSet<_>>().len() != k || !independent(&pts) {
            continue;
        }
        let lattice = box_lattice(&pts);
        if lattice.len() <= max_lattice {
            return (pts, lattice);
        }
    }
}

/// Smallest value of `f` over `count` random points with coordinates in
/// `{k/4 : |k| ≤ 12}`, evaluated exactly.
pub fn sampled_minimum(f: &sonckit::SparseForm, count: usize, seed: u64) -> Rational {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = f.num_vars();
    (0..count)
        .map(|_| {
            let x: Vec<Rational> = (0..n).map(|_| sonckit::rational::qr(rng.gen_range(-12..=12), 4)).collect();
            f.evaluate(&x).unwrap()
        })
        .min()
        .unwrap()
}
