//! Seeded mixed-type benchmark data.
//!
//! Four quantitative columns share one latent factor (population pairwise
//! correlation about 0.86). Two categorical columns are functions of the
//! quantitative ones with a share of labels replaced at random.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::data_model::{Column, Mask, MixedTable};
use crate::error::Result;
use crate::ingest::{ampute_mcar, AmputationConfig};
use crate::rng;

pub const QUANT_COLUMNS: usize = 4;
const MEANS: [f64; QUANT_COLUMNS] = [10.0, -3.0, 0.5, 100.0];
const SCALES: [f64; QUANT_COLUMNS] = [2.0, 0.5, 1.0, 15.0];
const NOISE: f64 = 0.4;

/// Complete benchmark table with `n` rows and the given label-noise rate.
pub fn mixed_benchmark(n: usize, label_noise: f64, seed: u64) -> Result<MixedTable> {
    let mut rng = rng::child_rng(seed, &[0]);
    let mut quant: Vec<Vec<f64>> = (0..QUANT_COLUMNS).map(|_| Vec::with_capacity(n)).collect();
    let mut std_values: Vec<Vec<f64>> = (0..QUANT_COLUMNS).map(|_| Vec::with_capacity(n)).collect();
    for _ in 0..n {
        let z: f64 = rng.sample(StandardNormal);
        for j in 0..QUANT_COLUMNS {
            let e: f64 = rng.sample(StandardNormal);
            let s = z + NOISE * e;
            std_values[j].push(s);
            quant[j].push(MEANS[j] + SCALES[j] * s);
        }
    }

    let tiers = ["low", "mid", "high"];
    let signs = ["neg", "pos"];
    let mut tier = Vec::with_capacity(n);
    let mut sign = Vec::with_capacity(n);
    for i in 0..n {
        let s0 = std_values[0][i];
        let mut t = if s0 < -0.5 {
            0
        } else if s0 > 0.5 {
            2
        } else {
            1
        };
        let mut g = usize::from(std_values[1][i] + std_values[2][i] > 0.0);
        if rng.random::<f64>() < label_noise {
            t = rng.random_range(0..tiers.len());
        }
        if rng.random::<f64>() < label_noise {
            g = rng.random_range(0..signs.len());
        }
        tier.push(Some(tiers[t]));
        sign.push(Some(signs[g]));
    }

    let mut columns: Vec<Column> = quant
        .into_iter()
        .enumerate()
        .map(|(j, v)| Column::quantitative(format!("x{}", j + 1), v.into_iter().map(Some).collect()))
        .collect::<Result<_>>()?;
    columns.push(Column::categorical_from_labels("tier", &tier)?);
    columns.push(Column::categorical_from_labels("sign", &sign)?);
    MixedTable::new(n, columns)
}

/// A complete table, its amputed copy and the mask of removed cells.
#[derive(Debug, Clone)]
pub struct Benchmark {
    pub truth: MixedTable,
    pub amputed: MixedTable,
    pub holes: Mask,
}

/// The standard imputation benchmark: 10% label noise and `rate` MCAR holes.
pub fn amputed_benchmark(n: usize, rate: f64, seed: u64) -> Result<Benchmark> {
    let truth = mixed_benchmark(n, 0.1, seed)?;
    let (amputed, holes) = ampute_mcar(
        &truth,
        &AmputationConfig {
            rate,
            seed: rng::derive_seed(seed, &[1]),
        },
    )?;
    Ok(Benchmark {
        truth,
        amputed,
        holes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ColumnKind;

    fn correlation(a: &[f64], b: &[f64]) -> f64 {
        let n = a.len() as f64;
        let ma = a.iter().sum::<f64>() / n;
        let mb = b.iter().sum::<f64>() / n;
        let cov: f64 = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum();
        let va: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
        let vb: f64 = b.iter().map(|y| (y - mb).powi(2)).sum();
        cov / (va * vb).sqrt()
    }

    #[test]
    fn benchmark_shape_and_correlation() {
        for seed in 0..20 {
            let t = mixed_benchmark(200, 0.1, seed).unwrap();
            assert_eq!(t.n_cols(), 6);
            assert_eq!(t.column(4).kind(), ColumnKind::Categorical);
            for a in 0..4 {
                for b in a + 1..4 {
                    let r = correlation(
                        t.column(a).quantitative_values().unwrap(),
                        t.column(b).quantitative_values().unwrap(),
                    );
                    assert!(r >= 0.7, "seed {seed}: corr({a},{b}) = {r}");
                }
            }
        }
    }

    #[test]
    fn amputation_rate() {
        let b = amputed_benchmark(200, 0.1, 3).unwrap();
        assert_eq!(b.holes.count(), 120);
        assert_eq!(b.amputed.mask(), b.holes);
    }
}
