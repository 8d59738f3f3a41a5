//! Generator laws against the oracle: closed form vs branch expansion, the
//! hook walk, bounds, and empirical frequencies.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use svt_core::generator::{hook_walk, svgen};
use svt_core::oracle::{branch_tree_law, enumerate_svt, hook_walk_law};
use svt_core::probability::{exact_distribution, exact_probability, probability_bounds};
use svt_core::rng::RngStream;
use svt_core::shapes::{count_syt, lower_right_boxes, partitions_of};
use svt_core::{Partition, PreTableau, TableauKey};

fn empty(rows: &[usize], n: usize) -> PreTableau {
    PreTableau::empty(&Partition::new(rows.to_vec()).unwrap(), n).unwrap()
}

/// Every pre-tableau at level >= 1 obtained by restricting a completion of `start`.
fn reachable(start: &PreTableau) -> Vec<PreTableau> {
    let mut seen = BTreeMap::<TableauKey, PreTableau>::new();
    for t in enumerate_svt(start).unwrap().tableaux {
        for m in 1..=start.level() {
            let s = t.restrict(m).unwrap();
            seen.entry(s.key()).or_insert(s);
        }
    }
    seen.into_values().collect()
}

fn small_family() -> impl Iterator<Item = PreTableau> {
    (1..=4).flat_map(partitions_of).flat_map(|lambda| {
        let size = lambda.size();
        (size..=size + 2).map(move |n| PreTableau::empty(&lambda, n).unwrap())
    })
}

#[test]
fn hook_walk_corner_law_matches_syt_ratio() {
    for n in 1..=6 {
        for lambda in partitions_of(n) {
            let law = hook_walk_law(&lambda).unwrap();
            let total = count_syt(&lambda);
            for corner in lower_right_boxes(&lambda).unwrap() {
                let expected = BigRational::new(
                    count_syt(&lambda.remove_corner(corner).unwrap()).into(),
                    total.clone().into(),
                );
                assert_eq!(law[&corner], expected, "({lambda}) corner {corner}");
            }
            assert_eq!(law.len(), lower_right_boxes(&lambda).unwrap().len());
        }
    }
}

#[test]
fn hook_walk_lands_on_corners() {
    let lambda = Partition::new(vec![4, 3, 3, 1]).unwrap();
    let corners = lower_right_boxes(&lambda).unwrap();
    let mut rng = RngStream::new(5);
    for _ in 0..2000 {
        assert!(corners.contains(&hook_walk(&lambda, &mut rng).unwrap()));
    }
}

#[test]
fn closed_form_matches_branching_from_every_reachable_start() {
    for start in small_family() {
        for s in reachable(&start) {
            let closed = exact_distribution(&s).unwrap();
            assert_eq!(closed, branch_tree_law(&s).unwrap(), "start\n{s}");
            assert!(closed.total().is_one());
        }
    }
}

#[test]
fn top_value_factors_out_of_the_full_law() {
    // from the empty start the top value goes by hook walk, then the rest is
    // the level N-1 law
    for start in small_family() {
        let n = start.capacity();
        for t in enumerate_svt(&start).unwrap().tableaux {
            let corner = t.cell_of(n).unwrap();
            let lambda = t.shape();
            let walk = BigRational::new(
                count_syt(&lambda.remove_corner(corner).unwrap()).into(),
                count_syt(lambda).into(),
            );
            let full = exact_probability(&t, n).unwrap();
            assert_eq!(full, walk * exact_probability(&t, n - 1).unwrap(), "\n{t}");
        }
    }
}

#[test]
fn bounds_hold_at_every_level() {
    for start in small_family() {
        for s in reachable(&start) {
            let k = s.level();
            for t in enumerate_svt(&s).unwrap().tableaux {
                let p = exact_probability(&t, k).unwrap();
                let b = probability_bounds::<BigRational>(&t, k).unwrap();
                assert!(b.contains(&p), "k={k}: {p} outside [{}, {}]\n{t}", b.lower, b.upper);
                let f = probability_bounds::<f64>(&t, k).unwrap();
                assert!(f.lower <= p.to_f64().unwrap() * (1.0 + 1e-12));
            }
        }
    }
}

#[test]
fn syt_law_is_uniform() {
    // with N = |λ| every cell is a singleton and the generator is the hook walk
    for lambda in partitions_of(5) {
        let law = exact_distribution(&PreTableau::empty(&lambda, 5).unwrap()).unwrap();
        let f = count_syt(&lambda);
        assert_eq!(BigUint::from(law.len()), f);
        let u = BigRational::new(BigUint::one().into(), f.into());
        assert!(law.iter().all(|(_, p)| *p == u), "({lambda})");
    }
}

#[test]
fn empirical_frequencies_within_four_sigma() {
    const DRAWS: usize = 1_000_000;
    let instances = (1..=4).flat_map(partitions_of).flat_map(|lambda| {
        (lambda.size()..=6).map(move |n| PreTableau::empty(&lambda, n).unwrap())
    });
    for (i, start) in instances.enumerate() {
        let law = exact_distribution(&start).unwrap();
        let index: HashMap<TableauKey, usize> = law.keys().cloned().enumerate().map(|(j, k)| (k, j)).collect();
        let mut counts = vec![0usize; law.len()];
        let mut rng = RngStream::new(1000 + i as u64);
        for _ in 0..DRAWS {
            counts[index[&svgen(&start, &mut rng).unwrap().key()]] += 1;
        }
        for ((t, p), observed) in law.iter().zip(&counts) {
            let p = p.to_f64().unwrap();
            let freq = *observed as f64 / DRAWS as f64;
            let sigma = (p * (1.0 - p) / DRAWS as f64).sqrt();
            assert!((freq - p).abs() <= 4.0 * sigma, "({}),{}: {freq} vs {p}\n{t}", start.shape(), start.capacity());
        }
    }
}

#[test]
fn intermediate_start_outputs_contain_start() {
    let start = empty(&[3, 2], 8);
    let mut rng = RngStream::new(3);
    for s in reachable(&start).into_iter().step_by(7) {
        for _ in 0..20 {
            let t = svgen(&s, &mut rng).unwrap();
            assert!(t.is_complete());
            assert!(s.is_contained_in(&t).unwrap());
            PreTableau::validate(&t.entries(), t.shape(), t.capacity()).unwrap();
        }
    }
}
