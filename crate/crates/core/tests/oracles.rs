mod common;

use std::collections::BTreeSet;

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sonckit::corpus::corpus_entries;
use sonckit::geometry::{hull_vertices, lattice_points, polytope_lattice_points, support_partition};
use sonckit::lp::in_convex_hull;
use sonckit::mediated::maximal_mediated_set;
use sonckit::{ExponentVector, SparseForm};

fn random_points(rng: &mut ChaCha8Rng, n: usize, count: usize, max: u32) -> Vec<ExponentVector> {
    (0..count)
        .map(|_| ExponentVector((0..n).map(|_| rng.gen_range(0..=max)).collect()))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

#[test]
fn hull_matches_caratheodory_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..60 {
        let n = rng.gen_range(1..=3);
        let count = rng.gen_range(1..=7);
        let pts = random_points(&mut rng, n, count, 5);
        assert_eq!(hull_vertices(&pts), brute_hull_vertices(&pts), "points {pts:?}");
    }
}

#[test]
fn hull_of_corpus_supports() {
    for e in corpus_entries().iter().filter(|e| e.form.len() <= 12) {
        assert_eq!(hull_vertices(&e.form.support()), brute_hull_vertices(&e.form.support()), "{}", e.name);
    }
}

#[test]
fn lp_membership_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..80 {
        let pts = random_points(&mut rng, 3, 5, 4);
        let p = random_points(&mut rng, 3, 1, 4).remove(0);
        let target = rat(&p);
        let q: Vec<_> = pts.iter().map(rat).collect();
        assert_eq!(in_convex_hull(&target, &q), in_hull(&p, &pts), "{p} in {pts:?}");
    }
}

#[test]
fn lattice_points_match_box_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..40 {
        let (delta, lattice) = random_even_simplex(&mut rng, 200);
        assert_eq!(lattice_points(&delta).unwrap(), lattice, "{delta:?}");
    }
    // Non-simplicial: the square with corners (0,0) and (2,2).
    let sq: Vec<ExponentVector> = [[0, 0], [2, 0], [0, 2], [2, 2]].into_iter().map(ExponentVector::from).collect();
    assert_eq!(polytope_lattice_points(&sq).len(), 9);
}

#[test]
fn mms_matches_exhaustive_search_on_small_simplices() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let mut checked = 0;
    while checked < 30 {
        let (delta, lattice) = random_even_simplex(&mut rng, 60);
        if lattice.len() - delta.len() > 14 {
            continue;
        }
        let m = maximal_mediated_set(&delta).unwrap();
        assert_eq!(m.star, exhaustive_mms(&delta, &lattice), "{delta:?}");
        assert!(m.is_mediated());
        checked += 1;
    }
}

#[test]
fn mms_matches_sweep_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..50 {
        let (delta, lattice) = random_even_simplex(&mut rng, 60);
        let m = maximal_mediated_set(&delta).unwrap();
        assert_eq!(m.lattice, lattice);
        assert_eq!(m.star, sweep_mms(&delta, &lattice), "{delta:?}");
    }
}

fn check_families(f: &SparseForm, label: &str) {
    let p = support_partition(f).unwrap();
    for beta in &p.i_set {
        let got: BTreeSet<Vec<ExponentVector>> = p.simplex_families[beta]
            .iter()
            .map(|s| {
                let mut v = s.vertices.clone();
                v.sort();
                v
            })
            .collect();
        assert_eq!(got, brute_simplices(beta, &p.s_set), "{label}: β = {beta}");
    }
}

#[test]
fn simplex_families_match_exhaustive_closure() {
    for e in corpus_entries().iter().filter(|e| e.form.len() <= 16) {
        check_families(&e.form, &e.name);
    }
}

#[test]
fn simplex_families_on_random_forms() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for i in 0..25 {
        let n = rng.gen_range(2..=3);
        let deg = 2 * rng.gen_range(1..=3u32);
        let mut terms = Vec::new();
        for _ in 0..rng.gen_range(3..=7) {
            // Random point of degree `deg`.
            let mut e = vec![0u32; n];
            for _ in 0..deg {
                e[rng.gen_range(0..n)] += 1;
            }
            let c: i64 = if e.iter().all(|x| x % 2 == 0) && rng.gen_bool(0.7) {
                rng.gen_range(1..=5)
            } else {
                rng.gen_range(-5..=5)
            };
            terms.push((e, c));
        }
        let refs: Vec<(&[u32], i64)> = terms.iter().map(|(e, c)| (e.as_slice(), *c)).collect();
        let f = SparseForm::from_int_terms(n, &refs);
        if f.is_zero() {
            continue;
        }
        check_families(&f, &format!("random form {i}: {f}"));
    }
}
