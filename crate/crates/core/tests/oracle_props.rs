mod common;

use cneigh::geometry::{voronoi_summary, DesignSample, Domain, NnIndex, SamplingMeasure, VolumeOptions};
use cneigh::rng;
use cneigh::weights::{control_weights_nn, control_weights_unbiased, WeightOptions};
use proptest::prelude::*;

fn sample(dim: usize, m: usize, seed: u64) -> DesignSample {
    let mut r = rng::from_seed(seed);
    DesignSample::draw(Domain::cube(dim).unwrap(), SamplingMeasure::Uniform, m, &mut r).unwrap()
}

fn pts(s: &DesignSample) -> Vec<Vec<f64>> {
    s.points().map(|p| p.to_vec()).collect()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn weights_match_brute_force(seed in any::<u64>(), m in 2usize..25, dim in 1usize..=2) {
        let s = sample(dim, m, seed);
        let p = pts(&s);
        let opts = WeightOptions::default().with_expensive_loo();
        let wu = control_weights_unbiased(&s, &opts).unwrap();
        let wn = control_weights_nn(&s, &opts).unwrap();
        prop_assert!(max_diff(&wu.weights, &common::unbiased_weights(&p)) < 1e-10);
        prop_assert!(max_diff(&wn.weights, &common::nn_weights(&p)) < 1e-10);
        prop_assert_eq!(&wu.source.degrees, &common::degrees(&p));
    }

    #[test]
    fn grid_designs_match_brute_force(n in 2usize..6, dim in 1usize..=2) {
        // regular lattices: every neighbor query has ties
        let coords: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let p: Vec<Vec<f64>> = if dim == 1 {
            coords.iter().map(|&x| vec![x]).collect()
        } else {
            coords.iter().flat_map(|&x| coords.iter().map(move |&y| vec![x, y])).collect()
        };
        let s = DesignSample::from_points(Domain::cube(dim).unwrap(), &p, SamplingMeasure::Uniform).unwrap();
        let summary = voronoi_summary(&s, &VolumeOptions::default(), true).unwrap();
        prop_assert_eq!(&summary.degrees, &common::degrees(&p));
        prop_assert!(max_diff(summary.loo_cum_volumes.as_ref().unwrap(), &common::cumulative_volumes(&p)) < 1e-10);
    }

    #[test]
    fn nearest_excluding_matches_brute_force(seed in any::<u64>(), m in 2usize..60, dim in 1usize..=3, q in prop::collection::vec(0.0f64..1.0, 3)) {
        let s = sample(dim, m, seed);
        let p = pts(&s);
        let index = NnIndex::new(&s);
        let t = &q[..dim];
        for ex in [0, m / 2, m - 1] {
            prop_assert_eq!(index.nearest_excluding(t, ex).unwrap(), common::nearest_excluding(&p, t, ex));
            prop_assert_eq!(index.nearest_excluding(&p[ex], ex).unwrap(), common::nearest_excluding(&p, &p[ex], ex));
        }
    }

    #[test]
    fn monte_carlo_volumes_track_exact(seed in any::<u64>(), m in 4usize..30) {
        let s = sample(2, m, seed);
        let exact = voronoi_summary(&s, &VolumeOptions::default(), true).unwrap();
        let mc = voronoi_summary(&s, &VolumeOptions::monte_carlo(200_000, seed), true).unwrap();
        let tol = mc.tolerance();
        prop_assert!(max_diff(&exact.std_volumes, &mc.std_volumes) < 2.0 * tol);
        let c_tol = 2.0 * tol * m as f64;
        prop_assert!(max_diff(exact.loo_cum_volumes.as_ref().unwrap(), mc.loo_cum_volumes.as_ref().unwrap()) < c_tol);
    }
}

#[test]
fn sphere_identities() {
    let mut r = rng::from_seed(3);
    let s = DesignSample::draw(Domain::sphere(2).unwrap(), SamplingMeasure::Uniform, 40, &mut r).unwrap();
    let w = control_weights_unbiased(&s, &WeightOptions::default().with_expensive_loo()).unwrap();
    assert!((w.sum() - 1.0).abs() < 1e-9);
    assert_eq!(w.source.degrees.iter().sum::<usize>(), 40);
    w.source.validate().unwrap();
}

#[test]
fn three_dimensional_cube_uses_monte_carlo() {
    let s = sample(3, 50, 8);
    let w = control_weights_nn(&s, &WeightOptions::default()).unwrap();
    assert_eq!(w.source.volume_method, cneigh::geometry::VolumeMethod::MonteCarlo);
    assert!((w.sum() - 1.0).abs() < 1e-9);
}

#[test]
fn oracle_agrees_with_hand_example() {
    let p = vec![vec![0.1], vec![0.5], vec![0.9]];
    assert_eq!(common::degrees(&p), vec![1, 2, 0]);
    let v = common::volumes(&p, &[0, 1, 2]);
    assert!(max_diff(&v, &[0.3, 0.4, 0.3]) < 1e-15);
    assert!(max_diff(&common::cumulative_volumes(&p), &[0.8, 1.4, 0.8]) < 1e-15);
}
