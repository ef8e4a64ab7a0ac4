mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tropcert::lattice::{kernel_primitive, normalize_direction, rank, unimodular_with_first_column, IntMatrix, IntVector};
use tropcert::mixedvol::{mixed_volume, mixed_volume_recursive, tau_tropisms};
use tropcert::polytope::{face, SupportSet};
use tropcert::tropism::{enumerate_pretropisms, initial_form_system, permute_vector, pretropism_rays, EnumerationOptions};

const SEED: u64 = 0xC0FFEE;

fn all_rays() -> EnumerationOptions {
    EnumerationOptions { positive_first: false }
}

fn differences(points: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            out.push(q.iter().zip(p).map(|(a, b)| a - b).collect());
        }
    }
    out
}

fn diff_rank(rows: &[Vec<i64>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    rank(&IntMatrix::from_rows(rows).unwrap())
}

/// Rays by exhaustion: every ray is orthogonal to n-1 independent edge
/// directions, so try the kernel of each such choice of differences.
fn brute_force_rays(supports: &[SupportSet]) -> BTreeSet<Vec<i64>> {
    let n = supports[0].dim();
    let mut diffs: Vec<Vec<i64>> = supports.iter().flat_map(|a| differences(a.points())).collect();
    diffs.retain(|d| d.iter().any(|&x| x != 0));
    let diffs: Vec<Vec<i64>> = diffs
        .into_iter()
        .map(|d| normalize_direction(&IntVector::from_i64s(&d)).unwrap().to_i64s().unwrap())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut out = BTreeSet::new();
    let mut pick = Vec::new();
    choose(&diffs, n - 1, 0, &mut pick, &mut |rows| {
        let Ok(v) = kernel_primitive(&IntMatrix::from_rows(rows).unwrap()) else { return };
        for w in [v.clone(), v.neg()] {
            let faces: Vec<SupportSet> = supports.iter().map(|a| face(a, &w)).collect();
            if faces.iter().any(|f| f.len() < 2) {
                continue;
            }
            let fd: Vec<Vec<i64>> = faces.iter().flat_map(|f| differences(f.points())).collect();
            if diff_rank(&fd) == n - 1 {
                out.insert(w.to_i64s().unwrap());
            }
        }
    });
    out
}

fn choose(items: &[Vec<i64>], k: usize, from: usize, pick: &mut Vec<Vec<i64>>, f: &mut impl FnMut(&[Vec<i64>])) {
    if pick.len() == k {
        f(pick);
        return;
    }
    for i in from..items.len() {
        pick.push(items[i].clone());
        choose(items, k, i + 1, pick, f);
        pick.pop();
    }
}

/// Random supports whose Minkowski sum is full dimensional, so the rays
/// of the prevariety are well defined.
fn full_dimensional(seed: u64, max_n: usize, max_points: usize) -> Vec<SupportSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let n = rng.gen_range(2..=max_n);
        let sup = common::random_supports(&mut rng, n, max_points);
        let all: Vec<Vec<i64>> = sup.iter().flat_map(|a| differences(a.points())).collect();
        if diff_rank(&all) == n {
            return sup;
        }
    }
}

fn ray_set(supports: &[SupportSet]) -> BTreeSet<Vec<i64>> {
    pretropism_rays(supports, &all_rays()).unwrap().into_iter().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rays_match_exhaustive_search(seed in any::<u64>()) {
        let sup = full_dimensional(seed, 4, 4);
        prop_assert_eq!(ray_set(&sup), brute_force_rays(&sup));
    }

    #[test]
    fn every_initial_form_has_two_terms(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sup = full_dimensional(rng.gen(), 3, 5);
        let s = common::random_system(&mut rng, &sup);
        for t in enumerate_pretropisms(&s).unwrap() {
            prop_assert!(t.v.0[0] > 0.into());
            for f in initial_form_system(&s, &t.v).polys() {
                prop_assert!(f.num_terms() >= 2, "initial form along {}", t.v);
            }
        }
    }

    #[test]
    fn rays_follow_variable_permutations(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sup = full_dimensional(rng.gen(), 4, 5);
        let n = sup[0].dim();
        let mut p: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            p.swap(i, rng.gen_range(0..=i));
        }
        let moved: Vec<SupportSet> =
            sup.iter().map(|a| SupportSet::new(a.points().iter().map(|q| permute_vector(q, &p)).collect())).collect();
        let expect: BTreeSet<Vec<i64>> = ray_set(&sup).iter().map(|v| permute_vector(v, &p)).collect();
        prop_assert_eq!(ray_set(&moved), expect);
    }

    #[test]
    fn mixed_volume_oracles_agree(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..=3);
        let sup = common::random_supports(&mut rng, n, 6);
        prop_assert_eq!(mixed_volume(&sup, seed).unwrap(), mixed_volume_recursive(&sup).unwrap());
    }

    #[test]
    fn mixed_volume_is_lattice_invariant(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(2..=3);
        let sup = common::random_supports(&mut rng, n, 5);
        let v = loop {
            let raw: Vec<i64> = (0..n).map(|_| rng.gen_range(-2..=2)).collect();
            if let Ok(v) = normalize_direction(&IntVector::from_i64s(&raw)) {
                break v;
            }
        };
        let m = unimodular_with_first_column(&v).unwrap();
        let shift: Vec<i64> = (0..n).map(|_| rng.gen_range(-3..=3)).collect();
        let moved: Vec<SupportSet> = sup
            .iter()
            .map(|a| {
                SupportSet::new(
                    a.points()
                        .iter()
                        .map(|q| {
                            let r = m.vec_mul(&IntVector::from_i64s(q)).unwrap().to_i64s().unwrap();
                            r.iter().zip(&shift).map(|(x, s)| x + s).collect()
                        })
                        .collect(),
                )
            })
            .collect();
        prop_assert_eq!(mixed_volume(&moved, seed).unwrap(), mixed_volume(&sup, seed).unwrap());
    }
}

fn set(points: &[&[i64]]) -> SupportSet {
    SupportSet::new(points.iter().map(|p| p.to_vec()).collect())
}

/// Three faces are parallel segments, so no mixed cell of the slack
/// lifting is normal to this ray.
#[test]
fn slack_cells_can_miss_a_ray() {
    let sup = vec![
        set(&[&[0, 0, 0, 1], &[0, 1, 0, 1]]),
        set(&[&[0, 0, 0, 1], &[0, 1, 0, 1], &[0, 1, 1, 1], &[1, 0, 0, 1], &[1, 1, 0, 1]]),
        set(&[&[0, 0, 0, 0], &[0, 1, 0, 0], &[0, 1, 0, 1], &[1, 1, 1, 1]]),
        set(&[&[0, 0, 0, 1], &[0, 1, 1, 0], &[1, 0, 0, 0], &[1, 1, 1, 1]]),
    ];
    let ray = vec![1, 0, 1, 1];
    assert!(ray_set(&sup).contains(&ray));
    assert!(brute_force_rays(&sup).contains(&ray));
    let cells: Vec<Vec<i64>> = tau_tropisms(&sup, SEED, false).unwrap().iter().map(|v| v.to_i64s().unwrap()).collect();
    assert!(!cells.contains(&ray));
}
