//! Exact feasibility of `A x = b, x ≥ 0` by the phase-one simplex method with
//! Bland's anti-cycling rule.

use num_traits::{One, Signed, Zero};

use crate::linalg::Matrix;
use crate::rational::Rational;

/// Returns a feasible `x` or `None`.
pub fn feasible_point(a: &Matrix, b: &[Rational]) -> Option<Vec<Rational>> {
    let m = a.len();
    let n = a.first().map(|r| r.len()).unwrap_or(0);
    if m == 0 {
        return Some(vec![Rational::zero(); n]);
    }
    // Tableau rows: [A | I | b] with rows sign-flipped so that b ≥ 0.
    let width = n + m + 1;
    let mut t: Matrix = (0..m)
        .map(|i| {
            let flip = b[i].is_negative();
            let mut row = Vec::with_capacity(width);
            for j in 0..n {
                row.push(if flip { -a[i][j].clone() } else { a[i][j].clone() });
            }
            for k in 0..m {
                row.push(if k == i { Rational::one() } else { Rational::zero() });
            }
            row.push(if flip { -b[i].clone() } else { b[i].clone() });
            row
        })
        .collect();
    let mut basis: Vec<usize> = (n..n + m).collect();
    // Reduced costs for minimizing the sum of artificials.
    let mut cost = vec![Rational::zero(); width];
    for row in &t {
        for j in 0..width {
            if j < n || j == width - 1 {
                cost[j] -= &row[j];
            }
        }
    }
    loop {
        let Some(enter) = (0..n + m).find(|&j| cost[j].is_negative()) else {
            break;
        };
        let mut leave: Option<(usize, Rational)> = None;
        for i in 0..m {
            if t[i][enter].is_positive() {
                let ratio = &t[i][width - 1] / &t[i][enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((r, _)) = leave else {
            // unbounded cannot happen for a phase-one objective bounded below by 0
            break;
        };
        pivot(&mut t, &mut cost, r, enter);
        basis[r] = enter;
    }
    if !cost[width - 1].is_zero() {
        return None;
    }
    let mut x = vec![Rational::zero(); n];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < n {
            x[bv] = t[i][width - 1].clone();
        }
    }
    Some(x)
}

fn pivot(t: &mut Matrix, cost: &mut [Rational], r: usize, c: usize) {
    let inv = Rational::one() / &t[r][c];
    for v in t[r].iter_mut() {
        *v *= &inv;
    }
    let pivot_row = t[r].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i != r && !row[c].is_zero() {
            let f = row[c].clone();
            for (v, p) in row.iter_mut().zip(&pivot_row) {
                *v -= &f * p;
            }
        }
    }
    if !cost[c].is_zero() {
        let f = cost[c].clone();
        for (v, p) in cost.iter_mut().zip(&pivot_row) {
            *v -= &f * p;
        }
    }
}

/// Whether `target` is a convex combination of `points`.
pub fn in_convex_hull(target: &[Rational], points: &[Vec<Rational>]) -> bool {
    convex_weights(target, points).is_some()
}

/// Weights `μ ≥ 0`, `Σμ = 1`, `Σ μ_i p_i = target`, if any.
pub fn convex_weights(target: &[Rational], points: &[Vec<Rational>]) -> Option<Vec<Rational>> {
    if points.is_empty() {
        return None;
    }
    let dim = target.len();
    let mut a: Matrix = (0..dim)
        .map(|r| points.iter().map(|p| p[r].clone()).collect())
        .collect();
    a.push(vec![Rational::one(); points.len()]);
    let mut b = target.to_vec();
    b.push(Rational::one());
    feasible_point(&a, &b)
}
