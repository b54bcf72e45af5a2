//! Gaussian kernel density estimates for the density diagnostic plot.

use std::f64::consts::PI;

use mixreduce_core::{Error, Result};

pub const GRID_POINTS: usize = 512;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityCurve {
    pub grid: Vec<f64>,
    pub density: Vec<f64>,
    pub bandwidth: f64,
}

impl DensityCurve {
    /// Trapezoidal integral over the grid.
    pub fn integral(&self) -> f64 {
        self.grid
            .windows(2)
            .zip(self.density.windows(2))
            .map(|(x, y)| (x[1] - x[0]) * (y[0] + y[1]) / 2.0)
            .sum()
    }

    /// Abscissa of the highest ordinate (first one on ties).
    pub fn mode(&self) -> f64 {
        let mut best = 0;
        for (i, &d) in self.density.iter().enumerate() {
            if d > self.density[best] {
                best = i;
            }
        }
        self.grid[best]
    }
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn check_sample(values: &[f64]) -> Result<()> {
    if values.len() < 2 {
        return Err(Error::InvalidArgument(
            "density estimation needs at least two values".into(),
        ));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("density sample must be finite".into()));
    }
    Ok(())
}

/// Silverman's rule: `0.9 * min(sd, IQR / 1.34) * m^(-1/5)`. Falls back to the
/// standard deviation alone when the interquartile range is zero.
pub fn silverman_bandwidth(values: &[f64]) -> Result<f64> {
    check_sample(values)?;
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    let sd = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0)).sqrt();
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let iqr = quantile(&sorted, 0.75) - quantile(&sorted, 0.25);
    let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
    if !(spread > 0.0) {
        return Err(Error::InvalidArgument(
            "density estimation needs values with positive spread".into(),
        ));
    }
    Ok(0.9 * spread * m.powf(-0.2))
}

/// Density of `values` on a 512-point grid over `[min - 3h, max + 3h]`.
pub fn kde(values: &[f64], bandwidth: Option<f64>) -> Result<DensityCurve> {
    check_sample(values)?;
    let h = match bandwidth {
        Some(h) if h > 0.0 && h.is_finite() => h,
        Some(h) => {
            return Err(Error::InvalidArgument(format!(
                "bandwidth {h} must be positive"
            )))
        }
        None => silverman_bandwidth(values)?,
    };
    let (min, max) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let lo = min - 3.0 * h;
    let hi = max + 3.0 * h;
    let step = (hi - lo) / (GRID_POINTS - 1) as f64;
    let grid: Vec<f64> = (0..GRID_POINTS).map(|i| lo + step * i as f64).collect();
    let norm = 1.0 / (values.len() as f64 * h * (2.0 * PI).sqrt());
    let density = grid
        .iter()
        .map(|&x| {
            values
                .iter()
                .map(|&v| {
                    let u = (x - v) / h;
                    (-0.5 * u * u).exp()
                })
                .sum::<f64>()
                * norm
        })
        .collect();
    Ok(DensityCurve {
        grid,
        density,
        bandwidth: h,
    })
}
