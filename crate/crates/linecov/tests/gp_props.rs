//! GP-layer properties: exact covariance symmetry, PSD up to integration
//! error, permutation invariance, and entrywise oracle agreement.

mod common;

use common::adaptive_quad;
use linecov::bench::{sample_lines, CounterRng};
use linecov::double_integral::{reference_double_integral, DegeneracyPolicy, MethodChoice};
use linecov::gp::{build_covariance, cross_covariance, gp_predict, LineDataset};
use linecov::kernel::ScalingMatrix;
use linecov::quadrature::Tolerance;
use nalgebra::DMatrix;

fn dataset(n: usize, seed: u64, noise: f64) -> LineDataset {
    let lines = sample_lines(n, 2, seed);
    let y = vec![0.1; n];
    LineDataset::new(lines, y, noise).unwrap()
}

#[test]
fn covariance_is_exactly_symmetric() {
    let data = dataset(12, 4, 1e-3);
    let v = ScalingMatrix::identity(2);
    let k = build_covariance(
        &data,
        &v,
        MethodChoice::Proposed,
        &DegeneracyPolicy::default(),
    )
    .unwrap();
    for i in 0..12 {
        for j in 0..12 {
            assert_eq!(k.get(i, j).to_bits(), k.get(j, i).to_bits());
        }
    }
}

#[test]
fn noisy_covariance_is_psd_up_to_integration_error() {
    let v = ScalingMatrix::identity(2);
    let policy = DegeneracyPolicy::default();
    let sigma = 1e-3;
    for seed in 0..100 {
        let data = dataset(50, 1000 + seed, sigma);
        let k = build_covariance(&data, &v, MethodChoice::Proposed, &policy).unwrap();
        let n = data.len();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = k.get(i, j) + if i == j { sigma * sigma } else { 0.0 };
            }
        }
        let min_eig = m
            .symmetric_eigenvalues()
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        assert!(min_eig > -1e-8, "seed {seed}: min eigenvalue {min_eig:e}");
    }
}

#[test]
fn covariance_entries_match_reference_for_set1_lines() {
    let lines = sample_lines(5, 2, 7);
    let data = LineDataset::new(lines.clone(), vec![0.0; 5], 0.1).unwrap();
    let v = ScalingMatrix::identity(2);
    let k = build_covariance(
        &data,
        &v,
        MethodChoice::Proposed,
        &DegeneracyPolicy::default(),
    )
    .unwrap();
    for i in 0..5 {
        for j in 0..5 {
            let want =
                reference_double_integral(&lines[i], &lines[j], &v, Tolerance::oracle()).unwrap();
            assert!(
                (k.get(i, j) - want).abs() <= 1e-12,
                "entry ({i}, {j}): {} vs {want}",
                k.get(i, j)
            );
        }
    }
}

#[test]
fn cross_covariance_matches_adaptive_oracle() {
    let lines = sample_lines(6, 2, 13);
    let data = LineDataset::new(lines.clone(), vec![0.0; 6], 0.1).unwrap();
    let v = ScalingMatrix::identity(2);
    let grid = vec![
        vec![0.25, 0.25],
        vec![0.25, 0.75],
        vec![0.75, 0.25],
        vec![0.75, 0.75],
    ];
    let k = cross_covariance(&data, &grid, &v).unwrap();
    for (i, line) in lines.iter().enumerate() {
        for (j, z) in grid.iter().enumerate() {
            let w = line.span().to_vec();
            let v0: Vec<f64> = line.start().iter().zip(z).map(|(p, zz)| p - zz).collect();
            let want = line.length()
                * adaptive_quad(
                    &|t| {
                        let q: f64 = w
                            .iter()
                            .zip(&v0)
                            .map(|(wk, vk)| (wk * t + vk) * (wk * t + vk))
                            .sum();
                        (-0.5 * q).exp()
                    },
                    0.0,
                    1.0,
                    1e-15,
                );
            assert!(
                (k.get(i, j) - want).abs() <= 1e-13,
                "entry ({i}, {j}): {} vs {want}",
                k.get(i, j)
            );
        }
    }
}

#[test]
fn prediction_is_invariant_under_dataset_permutation() {
    let v = ScalingMatrix::identity(2);
    let policy = DegeneracyPolicy::default();
    let lines = sample_lines(10, 2, 21);
    let mut rng = CounterRng::new(0x0b5);
    let y: Vec<f64> = (0..10).map(|_| rng.uniform(-1.0, 1.0)).collect();

    let fwd = LineDataset::new(lines.clone(), y.clone(), 1e-2).unwrap();
    // reverse order
    let rev_lines: Vec<_> = lines.iter().rev().cloned().collect();
    let rev_y: Vec<f64> = y.iter().rev().cloned().collect();
    let rev = LineDataset::new(rev_lines, rev_y, 1e-2).unwrap();

    let points = vec![vec![0.3, 0.4], vec![0.9, 0.1], vec![0.5, 0.5]];
    let a = gp_predict(&fwd, &points, &v, MethodChoice::Proposed, &policy).unwrap();
    let b = gp_predict(&rev, &points, &v, MethodChoice::Proposed, &policy).unwrap();
    for k in 0..points.len() {
        assert!((a.mean[k] - b.mean[k]).abs() < 1e-10);
        assert!((a.variance[k] - b.variance[k]).abs() < 1e-10);
    }
}

#[test]
fn posterior_variance_bounded_by_prior() {
    let v = ScalingMatrix::identity(2);
    let policy = DegeneracyPolicy::default();
    let lines = sample_lines(20, 2, 33);
    let mut rng = CounterRng::new(0xbdd);
    let y: Vec<f64> = (0..20).map(|_| rng.uniform(-1.0, 1.0)).collect();
    let data = LineDataset::new(lines, y, 1e-3).unwrap();
    let points: Vec<Vec<f64>> = (0..30)
        .map(|_| vec![rng.uniform(-0.5, 1.5), rng.uniform(-0.5, 1.5)])
        .collect();
    let post = gp_predict(&data, &points, &v, MethodChoice::Proposed, &policy).unwrap();
    for var in &post.variance {
        assert!(*var <= 1.0 + 1e-10 && *var >= 0.0);
    }
}
