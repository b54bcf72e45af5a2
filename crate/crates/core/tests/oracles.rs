//! Checks against independent reference computations.

use mixreduce_core::impute::{self, evaluate_imputation, initial_guess, ImputeParams};
use mixreduce_core::pca::fit_pca;
use mixreduce_core::synthetic::amputed_benchmark;
use mixreduce_core::{ForestParams, Matrix, StopReason};

/// Cyclic Jacobi eigenvalues of a symmetric matrix, descending.
fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    ev
}

fn sample_covariance(m: &Matrix) -> Vec<Vec<f64>> {
    let (n, q) = m.shape();
    let means: Vec<f64> = (0..q).map(|j| (0..n).map(|i| m[(i, j)]).sum::<f64>() / n as f64).collect();
    (0..q)
        .map(|a| {
            (0..q)
                .map(|b| {
                    (0..n)
                        .map(|i| (m[(i, a)] - means[a]) * (m[(i, b)] - means[b]))
                        .sum::<f64>()
                        / (n - 1) as f64
                })
                .collect()
        })
        .collect()
}

/// Small LCG so matrix generation shares nothing with the library.
fn lcg_matrix(n: usize, q: usize, seed: u64) -> Matrix {
    let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    Matrix::from_fn(n, q, |_, _| {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((state >> 11) as f64 / (1u64 << 53) as f64) * 4.0 - 2.0
    })
}

#[test]
fn pca_variances_match_covariance_eigenvalues() {
    let m = lcg_matrix(50, 8, 1);
    let model = fit_pca(&m).unwrap();
    let eig = jacobi_eigenvalues(sample_covariance(&m));
    assert_eq!(model.n_components(), 8);
    for (s, e) in model.sdev().iter().zip(&eig) {
        let rel = (s * s - e).abs() / e.abs();
        assert!(rel < 1e-8, "sdev^2 {} vs eigenvalue {e}", s * s);
    }
}

#[test]
fn pca_wide_and_rank_deficient_inputs() {
    for (n, q, seed) in [(2, 6, 3), (2, 7, 4), (3, 12, 5), (5, 9, 6), (12, 12, 7)] {
        let m = lcg_matrix(n, q, seed);
        let model = fit_pca(&m).unwrap();
        let eig = jacobi_eigenvalues(sample_covariance(&m));
        assert_eq!(model.n_components(), (n - 1).min(q));
        for (s, e) in model.sdev().iter().zip(&eig) {
            let rel = (s * s - e).abs() / e.abs();
            assert!(rel < 1e-8, "{n}x{q}: sdev^2 {} vs eigenvalue {e}", s * s);
        }
    }
}

#[test]
fn missforest_beats_mean_imputation_on_benchmark() {
    let params = ImputeParams {
        forest: ForestParams::default(),
        max_iterations: 10,
        seed: 0,
    };
    let b = amputed_benchmark(200, 0.1, 1234).unwrap();
    let mf = impute::missforest_impute(&b.amputed, &params).unwrap();
    let baseline = initial_guess(&b.amputed).unwrap();
    let e_mf = evaluate_imputation(&b.truth, &mf.imputed, &b.holes).unwrap();
    let e_base = evaluate_imputation(&b.truth, &baseline, &b.holes).unwrap();
    assert!(e_mf.nrmse.unwrap() < e_base.nrmse.unwrap(), "{e_mf:?} vs {e_base:?}");
    assert!(mf.iterations >= 1);
    if mf.stopped_by == StopReason::DeltaIncrease {
        assert!(mf.iterations >= 2);
    }
}
