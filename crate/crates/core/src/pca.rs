//! Principal component analysis of the encoded matrix and the end-to-end
//! reduction pipeline.

use std::time::Instant;

use nalgebra::linalg::SVD;
use serde::Serialize;

use crate::data_model::MixedTable;
use crate::encode::{self, ColumnProvenance, WeightingScheme};
use crate::error::{Error, Result};
use crate::impute::{self, ImputationResult, ImputationSummary, ImputeParams};
use crate::Matrix;

/// Convergence tolerance handed to the SVD; a tolerance of one ulp gives
/// wrong singular values on some rank-deficient inputs.
const SVD_EPS: f64 = 5.0 * f64::EPSILON;

/// Components whose standard deviation falls below this fraction of the
/// leading one are treated as exact zeros and dropped.
pub const RELATIVE_SDEV_CUTOFF: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel {
    rotation: Matrix,
    sdev: Vec<f64>,
    center: Vec<f64>,
    proportion: Vec<f64>,
    cumulative: Vec<f64>,
}

impl PcaModel {
    /// Rebuild a model from stored parts; proportions are recomputed.
    pub fn from_parts(rotation: Matrix, sdev: Vec<f64>, center: Vec<f64>) -> Result<Self> {
        if rotation.ncols() != sdev.len() || rotation.nrows() != center.len() {
            return Err(Error::mismatch(
                format!("{}x{} rotation", center.len(), sdev.len()),
                format!("{}x{}", rotation.nrows(), rotation.ncols()),
            ));
        }
        if sdev.is_empty() {
            return Err(Error::invalid("a model needs at least one component"));
        }
        let (proportion, cumulative) = proportion_variance(&sdev);
        Ok(PcaModel {
            rotation,
            sdev,
            center,
            proportion,
            cumulative,
        })
    }

    /// Loadings, one column per component.
    pub fn rotation(&self) -> &Matrix {
        &self.rotation
    }

    pub fn sdev(&self) -> &[f64] {
        &self.sdev
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn proportion(&self) -> &[f64] {
        &self.proportion
    }

    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    pub fn n_components(&self) -> usize {
        self.sdev.len()
    }

    pub fn n_features(&self) -> usize {
        self.center.len()
    }

    pub fn select_components(&self, threshold: f64) -> Result<usize> {
        select_components(&self.proportion, threshold)
    }
}

/// Center the columns of `m` and decompose by SVD. Columns are not rescaled.
pub fn fit_pca(m: &Matrix) -> Result<PcaModel> {
    let (n, q) = m.shape();
    if n < 2 {
        return Err(Error::invalid("PCA needs at least two rows"));
    }
    if q == 0 {
        return Err(Error::invalid("PCA needs at least one column"));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("PCA input must be finite"));
    }

    let center: Vec<f64> = (0..q).map(|j| m.column(j).sum() / n as f64).collect();
    let mut centered = m.clone();
    for (j, &c) in center.iter().enumerate() {
        centered.column_mut(j).add_scalar_mut(-c);
    }

    // Right singular vectors of the centered data are the loadings. For wide
    // inputs the transpose is decomposed and its left vectors used instead.
    let (singular, loadings) = if n >= q {
        let svd = SVD::try_new(centered, false, true, SVD_EPS, 0)
            .ok_or_else(|| Error::Numerical("SVD did not converge".into()))?;
        let v_t = svd.v_t.expect("requested");
        (svd.singular_values, v_t.transpose())
    } else {
        let svd = SVD::try_new(centered.transpose(), true, false, SVD_EPS, 0)
            .ok_or_else(|| Error::Numerical("SVD did not converge".into()))?;
        (svd.singular_values, svd.u.expect("requested"))
    };

    let mut order: Vec<usize> = (0..singular.len()).collect();
    order.sort_by(|&a, &b| singular[b].total_cmp(&singular[a]).then(a.cmp(&b)));
    let scale = ((n - 1) as f64).sqrt();
    let lead = singular[order[0]] / scale;
    if !(lead > 0.0) {
        return Err(Error::Numerical("input has no variance".into()));
    }
    let max_r = (n - 1).min(q);
    let kept: Vec<usize> = order
        .into_iter()
        .take(max_r)
        .take_while(|&k| singular[k] / scale > RELATIVE_SDEV_CUTOFF * lead)
        .collect();

    let sdev: Vec<f64> = kept.iter().map(|&k| singular[k] / scale).collect();
    let mut rotation = loadings.select_columns(&kept);
    for mut col in rotation.column_iter_mut() {
        let mut pivot = 0;
        for (i, v) in col.iter().enumerate() {
            if v.abs() > col[pivot].abs() {
                pivot = i;
            }
        }
        if col[pivot] < 0.0 {
            col.neg_mut();
        }
    }
    PcaModel::from_parts(rotation, sdev, center)
}

/// Variance share of each component and the running total.
pub fn proportion_variance(sdev: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let total: f64 = sdev.iter().map(|s| s * s).sum();
    let proportion: Vec<f64> = sdev.iter().map(|s| s * s / total).collect();
    let cumulative = proportion
        .iter()
        .scan(0.0, |acc, p| {
            *acc += p;
            Some(*acc)
        })
        .collect();
    (proportion, cumulative)
}

/// Smallest `k` whose cumulative proportion reaches `threshold`.
pub fn select_components(proportion: &[f64], threshold: f64) -> Result<usize> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::invalid(format!(
            "threshold {threshold} is outside (0, 1]"
        )));
    }
    if proportion.is_empty() {
        return Err(Error::invalid("no components to select from"));
    }
    let mut acc = 0.0;
    for (k, p) in proportion.iter().enumerate() {
        acc += p;
        if acc >= threshold {
            return Ok(k + 1);
        }
    }
    // The total is one up to rounding, so every threshold is reached by the end.
    Ok(proportion.len())
}

/// Scores on the first `k` components.
pub fn transform(model: &PcaModel, m: &Matrix, k: usize) -> Result<Matrix> {
    if m.ncols() != model.n_features() {
        return Err(Error::mismatch(
            format!("{} columns", model.n_features()),
            m.ncols(),
        ));
    }
    if k > model.n_components() {
        return Err(Error::invalid(format!(
            "requested {k} components, model has {}",
            model.n_components()
        )));
    }
    let mut centered = m.clone();
    for (j, &c) in model.center.iter().enumerate() {
        centered.column_mut(j).add_scalar_mut(-c);
    }
    Ok(centered * model.rotation.columns(0, k))
}

/// Map scores back to the encoded space.
pub fn reconstruct(model: &PcaModel, scores: &Matrix) -> Result<Matrix> {
    let k = scores.ncols();
    if k > model.n_components() {
        return Err(Error::mismatch(model.n_components(), k));
    }
    let mut out = scores * model.rotation.columns(0, k).transpose();
    for (j, &c) in model.center.iter().enumerate() {
        out.column_mut(j).add_scalar_mut(c);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct InputShape {
    pub rows: usize,
    pub original_columns: usize,
    pub encoded_columns: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageTimings {
    pub impute_seconds: f64,
    pub encode_seconds: f64,
    pub pca_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReductionReport {
    pub selected_components: usize,
    pub threshold: f64,
    pub cumulative_at_selected: f64,
    pub available_components: usize,
    pub elapsed_seconds: f64,
    pub timings: StageTimings,
    pub input_shape: InputShape,
    pub weighting: WeightingScheme,
    pub rounded: bool,
    pub imputation_summary: Option<ImputationSummary>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct Reduction {
    pub scores: Matrix,
    pub model: PcaModel,
    pub imputation: ImputationResult,
    pub provenance: Vec<ColumnProvenance>,
    pub report: ReductionReport,
}

/// Impute, encode, run PCA and keep the smallest number of components whose
/// cumulative variance share reaches `threshold`.
pub fn reduce(
    table: &MixedTable,
    impute_params: &ImputeParams,
    scheme: WeightingScheme,
    threshold: f64,
    round_enabled: bool,
) -> Result<Reduction> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::invalid(format!(
            "threshold {threshold} is outside (0, 1]"
        )));
    }
    let start = Instant::now();
    let imputation = impute::missforest_impute(table, impute_params)?;
    let impute_seconds = start.elapsed().as_secs_f64();

    let t = Instant::now();
    let encoded = encode::encode_table(&imputation.imputed, scheme, round_enabled)?;
    for w in &encoded.warnings {
        log::warn!("{w}");
    }
    let encode_seconds = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let model = fit_pca(&encoded.values)?;
    let k = model.select_components(threshold)?;
    let scores = transform(&model, &encoded.values, k)?;
    let pca_seconds = t.elapsed().as_secs_f64();

    let report = ReductionReport {
        selected_components: k,
        threshold,
        cumulative_at_selected: model.cumulative()[k - 1],
        available_components: model.n_components(),
        elapsed_seconds: start.elapsed().as_secs_f64(),
        timings: StageTimings {
            impute_seconds,
            encode_seconds,
            pca_seconds,
        },
        input_shape: InputShape {
            rows: table.n_rows(),
            original_columns: table.n_cols(),
            encoded_columns: encoded.ncols(),
        },
        weighting: scheme,
        rounded: round_enabled,
        imputation_summary: (imputation.iterations > 0).then(|| imputation.summary()),
        warnings: encoded.warnings.clone(),
    };
    Ok(Reduction {
        scores,
        model,
        imputation,
        provenance: encoded.provenance,
        report,
    })
}
