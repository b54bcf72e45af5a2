//! Iterative random-forest imputation and imputation error metrics.
//!
//! Missing cells start from the column mean or mode. Each sweep then visits
//! the columns by increasing missingness; for every column with holes a forest
//! is fitted on the rows where it is observed, using the current values of all
//! other columns as predictors, and its predictions overwrite the holes. After
//! each sweep the relative change of the quantitative block and the share of
//! changed categorical cells are recorded. The loop stops the first time every
//! applicable change grows, returning the iterate from before that sweep.

use serde::Serialize;

use crate::data_model::{column_order_by_missingness, Column, ColumnData, ColumnKind, Mask, MixedTable};
use crate::error::{Error, Result};
use crate::forest::{self, ForestParams, Response};
use crate::{rng, Matrix};

#[derive(Debug, Clone, PartialEq)]
pub struct ImputeParams {
    /// Forest settings; the seed field is replaced per fit by one derived
    /// from [`ImputeParams::seed`].
    pub forest: ForestParams,
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for ImputeParams {
    fn default() -> Self {
        ImputeParams {
            forest: ForestParams::default(),
            max_iterations: 10,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StopReason {
    DeltaIncrease,
    IterationCap,
    NoMissing,
}

/// Changes recorded after one sweep; `None` where the measure does not apply.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepDelta {
    pub quantitative: Option<f64>,
    pub categorical: Option<f64>,
}

impl SweepDelta {
    /// True when every applicable change is strictly larger than in `prev`.
    pub fn all_increased(&self, prev: &SweepDelta) -> bool {
        let grew = |new: Option<f64>, old: Option<f64>| match (new, old) {
            (Some(n), Some(o)) => Some(n > o),
            _ => None,
        };
        let checks: Vec<bool> = [
            grew(self.quantitative, prev.quantitative),
            grew(self.categorical, prev.categorical),
        ]
        .into_iter()
        .flatten()
        .collect();
        !checks.is_empty() && checks.iter().all(|&b| b)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImputationResult {
    pub imputed: MixedTable,
    pub iterations: usize,
    pub delta_history: Vec<SweepDelta>,
    pub stopped_by: StopReason,
}

impl ImputationResult {
    pub fn summary(&self) -> ImputationSummary {
        ImputationSummary {
            iterations: self.iterations,
            stopped_by: self.stopped_by,
            delta_history: self.delta_history.clone(),
        }
    }
}

/// Serializable digest of an [`ImputationResult`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ImputationSummary {
    pub iterations: usize,
    pub stopped_by: StopReason,
    pub delta_history: Vec<SweepDelta>,
}

fn fill_column(col: &Column) -> Result<ColumnData> {
    let observed = col.len() - col.missing_count();
    if observed == 0 {
        return Err(Error::FullyMissing(col.name().to_string()));
    }
    let missing = col.missing();
    Ok(match col.data() {
        ColumnData::Quantitative(v) => {
            let sum: f64 = v.iter().zip(missing).filter(|(_, &m)| !m).map(|(x, _)| x).sum();
            let mean = sum / observed as f64;
            ColumnData::Quantitative(
                v.iter()
                    .zip(missing)
                    .map(|(&x, &m)| if m { mean } else { x })
                    .collect(),
            )
        }
        ColumnData::Categorical(c) => {
            let mut counts = vec![0usize; col.spec().levels.len()];
            for (&code, &m) in c.iter().zip(missing) {
                if !m {
                    counts[code as usize] += 1;
                }
            }
            let mut mode = 0;
            for (k, &n) in counts.iter().enumerate() {
                if n > counts[mode] {
                    mode = k;
                }
            }
            ColumnData::Categorical(
                c.iter()
                    .zip(missing)
                    .map(|(&x, &m)| if m { mode as u32 } else { x })
                    .collect(),
            )
        }
    })
}

/// Fill holes with the column mean (quantitative) or the mode, ties to the
/// earliest level (categorical).
pub fn initial_guess(table: &MixedTable) -> Result<MixedTable> {
    let columns = table
        .columns()
        .iter()
        .map(|col| {
            let data = fill_column(col)?;
            Column::new(col.spec().clone(), data, vec![false; col.len()])
        })
        .collect::<Result<_>>()?;
    MixedTable::new(table.n_rows(), columns)
}

/// Squared change of the quantitative block relative to its new squared norm,
/// summed over every cell.
pub fn delta_continuous(new: &[&[f64]], old: &[&[f64]]) -> Result<f64> {
    if new.len() != old.len() {
        return Err(Error::mismatch(new.len(), old.len()));
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for (a, b) in new.iter().zip(old) {
        if a.len() != b.len() {
            return Err(Error::mismatch(a.len(), b.len()));
        }
        for (x, y) in a.iter().zip(b.iter()) {
            num += (x - y).powi(2);
            den += x * x;
        }
    }
    if den == 0.0 {
        return Err(Error::Numerical(
            "quantitative change is undefined for an all-zero matrix".into(),
        ));
    }
    Ok(num / den)
}

/// Number of changed categorical cells over the number of categorical holes.
/// `None` when there are no categorical holes.
pub fn delta_categorical(new: &[&[u32]], old: &[&[u32]], na_count: usize) -> Result<Option<f64>> {
    if new.len() != old.len() {
        return Err(Error::mismatch(new.len(), old.len()));
    }
    if na_count == 0 {
        return Ok(None);
    }
    let mut changed = 0usize;
    for (a, b) in new.iter().zip(old) {
        if a.len() != b.len() {
            return Err(Error::mismatch(a.len(), b.len()));
        }
        changed += a.iter().zip(b.iter()).filter(|(x, y)| x != y).count();
    }
    Ok(Some(changed as f64 / na_count as f64))
}

/// Working copy of the table during the sweeps.
#[derive(Clone)]
struct State {
    data: Vec<ColumnData>,
}

impl State {
    fn quantitative(&self) -> Vec<&[f64]> {
        self.data
            .iter()
            .filter_map(|d| match d {
                ColumnData::Quantitative(v) => Some(v.as_slice()),
                ColumnData::Categorical(_) => None,
            })
            .collect()
    }

    fn categorical(&self) -> Vec<&[u32]> {
        self.data
            .iter()
            .filter_map(|d| match d {
                ColumnData::Categorical(v) => Some(v.as_slice()),
                ColumnData::Quantitative(_) => None,
            })
            .collect()
    }

    fn into_table(self, template: &MixedTable) -> Result<MixedTable> {
        let columns = template
            .columns()
            .iter()
            .zip(self.data)
            .map(|(col, data)| Column::new(col.spec().clone(), data, vec![false; col.len()]))
            .collect::<Result<_>>()?;
        MixedTable::new(template.n_rows(), columns)
    }
}

/// Predictor matrix over `rows` built from every column but `target`;
/// categorical columns enter as 0/1 indicators.
fn predictors(table: &MixedTable, state: &State, target: usize, rows: &[usize]) -> Matrix {
    let width: usize = table
        .columns()
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != target)
        .map(|(_, c)| match c.kind() {
            ColumnKind::Quantitative => 1,
            ColumnKind::Categorical => c.spec().levels.len(),
        })
        .sum();
    let mut x = Matrix::zeros(rows.len(), width);
    let mut offset = 0;
    for (j, data) in state.data.iter().enumerate() {
        if j == target {
            continue;
        }
        match data {
            ColumnData::Quantitative(v) => {
                for (i, &r) in rows.iter().enumerate() {
                    x[(i, offset)] = v[r];
                }
                offset += 1;
            }
            ColumnData::Categorical(c) => {
                for (i, &r) in rows.iter().enumerate() {
                    x[(i, offset + c[r] as usize)] = 1.0;
                }
                offset += table.column(j).spec().levels.len();
            }
        }
    }
    x
}

fn impute_column(
    table: &MixedTable,
    state: &mut State,
    target: usize,
    params: &ForestParams,
) -> Result<()> {
    let col = table.column(target);
    let (obs, mis): (Vec<usize>, Vec<usize>) =
        (0..table.n_rows()).partition(|&i| !col.is_missing(i));
    let x_obs = predictors(table, state, target, &obs);
    let x_mis = predictors(table, state, target, &mis);
    let response = match &state.data[target] {
        ColumnData::Quantitative(v) => Response::Regression(obs.iter().map(|&i| v[i]).collect()),
        ColumnData::Categorical(c) => Response::Classification {
            labels: obs.iter().map(|&i| c[i]).collect(),
            n_classes: col.spec().levels.len(),
        },
    };
    let mut fit_params = params.clone();
    if let Some(m) = fit_params.mtry {
        fit_params.mtry = Some(m.min(x_obs.ncols()));
    }
    let model = forest::fit_forest(&x_obs, &response, &fit_params)?;
    match (forest::predict(&model, &x_mis)?, &mut state.data[target]) {
        (Response::Regression(pred), ColumnData::Quantitative(v)) => {
            for (&i, p) in mis.iter().zip(pred) {
                v[i] = p;
            }
        }
        (Response::Classification { labels, .. }, ColumnData::Categorical(c)) => {
            for (&i, p) in mis.iter().zip(labels) {
                c[i] = p;
            }
        }
        _ => unreachable!("response kind follows the column kind"),
    }
    Ok(())
}

fn sweep_deltas(
    new: &State,
    old: &State,
    quant_holes: usize,
    cat_holes: usize,
) -> Result<SweepDelta> {
    let quantitative = if quant_holes > 0 {
        Some(delta_continuous(&new.quantitative(), &old.quantitative())?)
    } else {
        None
    };
    let categorical = delta_categorical(&new.categorical(), &old.categorical(), cat_holes)?;
    Ok(SweepDelta {
        quantitative,
        categorical,
    })
}

/// Run the imputation loop. Forest seeds depend only on `params.seed`, the
/// sweep number and the column, so a run capped at `k` sweeps reproduces the
/// first `k` sweeps of a longer run exactly.
pub fn missforest_impute(table: &MixedTable, params: &ImputeParams) -> Result<ImputationResult> {
    if params.max_iterations == 0 {
        return Err(Error::invalid("max_iterations must be at least 1"));
    }
    let start = initial_guess(table)?;
    if !table.has_missing() {
        return Ok(ImputationResult {
            imputed: start,
            iterations: 0,
            delta_history: Vec::new(),
            stopped_by: StopReason::NoMissing,
        });
    }
    if table.n_cols() < 2 {
        return Err(Error::invalid(
            "imputation needs at least one predictor column besides the incomplete one",
        ));
    }

    let counts: Vec<usize> = table.columns().iter().map(Column::missing_count).collect();
    let (quant_holes, cat_holes) = table
        .columns()
        .iter()
        .zip(&counts)
        .fold((0, 0), |(q, c), (col, &k)| match col.kind() {
            ColumnKind::Quantitative => (q + k, c),
            ColumnKind::Categorical => (q, c + k),
        });
    let order: Vec<usize> = column_order_by_missingness(table)
        .into_iter()
        .filter(|&j| counts[j] > 0)
        .collect();

    let mut current = State {
        data: start.into_columns().into_iter().map(|c| c.data().clone()).collect(),
    };
    let mut history: Vec<SweepDelta> = Vec::new();
    for sweep in 1..=params.max_iterations {
        let previous = current.clone();
        for &j in &order {
            let mut fit = params.forest.clone();
            fit.seed = rng::derive_seed(params.seed, &[sweep as u64, j as u64]);
            impute_column(table, &mut current, j, &fit)?;
        }
        let delta = sweep_deltas(&current, &previous, quant_holes, cat_holes)?;
        let increased = history.last().is_some_and(|prev| delta.all_increased(prev));
        history.push(delta);
        if increased {
            log::debug!("imputation stopped after sweep {sweep}: change increased");
            return Ok(ImputationResult {
                imputed: previous.into_table(table)?,
                iterations: sweep,
                delta_history: history,
                stopped_by: StopReason::DeltaIncrease,
            });
        }
    }
    Ok(ImputationResult {
        imputed: current.into_table(table)?,
        iterations: params.max_iterations,
        delta_history: history,
        stopped_by: StopReason::IterationCap,
    })
}

/// Normalized root-mean-square error over the `holes` positions, normalized
/// by the population variance of the true values there.
pub fn nrmse(truth: &[f64], imputed: &[f64], holes: &[bool]) -> Result<f64> {
    if truth.len() != imputed.len() || truth.len() != holes.len() {
        return Err(Error::mismatch(truth.len(), imputed.len().max(holes.len())));
    }
    let pairs: Vec<(f64, f64)> = truth
        .iter()
        .zip(imputed)
        .zip(holes)
        .filter(|(_, &h)| h)
        .map(|((&t, &i), _)| (t, i))
        .collect();
    let m = pairs.len() as f64;
    if pairs.len() < 2 {
        return Err(Error::invalid("NRMSE needs at least two evaluated cells"));
    }
    let mean = pairs.iter().map(|p| p.0).sum::<f64>() / m;
    let var = pairs.iter().map(|p| (p.0 - mean).powi(2)).sum::<f64>() / m;
    if var == 0.0 {
        return Err(Error::Numerical(
            "NRMSE is undefined when the true values do not vary".into(),
        ));
    }
    let mse = pairs.iter().map(|p| (p.0 - p.1).powi(2)).sum::<f64>() / m;
    Ok((mse / var).sqrt())
}

/// Proportion of falsely classified cells among `holes`; `None` when no cell
/// is evaluated.
pub fn pfc<T: PartialEq>(truth: &[T], imputed: &[T], holes: &[bool]) -> Result<Option<f64>> {
    if truth.len() != imputed.len() || truth.len() != holes.len() {
        return Err(Error::mismatch(truth.len(), imputed.len().max(holes.len())));
    }
    let mut total = 0usize;
    let mut wrong = 0usize;
    for ((t, i), &h) in truth.iter().zip(imputed).zip(holes) {
        if h {
            total += 1;
            if t != i {
                wrong += 1;
            }
        }
    }
    Ok((total > 0).then(|| wrong as f64 / total as f64))
}

/// NRMSE and PFC of a complete table against the ground truth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ImputationErrors {
    /// `None` without quantitative holes.
    pub nrmse: Option<f64>,
    /// `None` without categorical holes.
    pub pfc: Option<f64>,
    pub quantitative_holes: usize,
    pub categorical_holes: usize,
}

/// Pool every quantitative hole into one NRMSE and every categorical hole into
/// one PFC. Categorical cells are compared by label.
pub fn evaluate_imputation(
    truth: &MixedTable,
    imputed: &MixedTable,
    holes: &Mask,
) -> Result<ImputationErrors> {
    if truth.n_rows() != imputed.n_rows()
        || truth.n_cols() != imputed.n_cols()
        || holes.n_rows() != truth.n_rows()
        || holes.n_cols() != truth.n_cols()
    {
        return Err(Error::mismatch(
            format!("{}x{}", truth.n_rows(), truth.n_cols()),
            format!(
                "{}x{} imputed, {}x{} holes",
                imputed.n_rows(),
                imputed.n_cols(),
                holes.n_rows(),
                holes.n_cols()
            ),
        ));
    }
    let mut qt = Vec::new();
    let mut qi = Vec::new();
    let mut ct: Vec<String> = Vec::new();
    let mut ci: Vec<String> = Vec::new();
    for (j, (t, i)) in truth.columns().iter().zip(imputed.columns()).enumerate() {
        if t.name() != i.name() || t.kind() != i.kind() {
            return Err(Error::Schema(format!(
                "column {j} differs: `{}` vs `{}`",
                t.name(),
                i.name()
            )));
        }
        for r in 0..truth.n_rows() {
            if !holes.get(r, j) {
                continue;
            }
            let (Some(tv), Some(iv)) = (t.get(r), i.get(r)) else {
                return Err(Error::invalid(format!(
                    "cell ({r}, `{}`) is missing in truth or imputed table",
                    t.name()
                )));
            };
            match (tv, iv) {
                (crate::Cell::Quantitative(a), crate::Cell::Quantitative(b)) => {
                    qt.push(a);
                    qi.push(b);
                }
                _ => {
                    ct.push(t.label(r).unwrap_or_default());
                    ci.push(i.label(r).unwrap_or_default());
                }
            }
        }
    }
    let nrmse = if qt.is_empty() {
        None
    } else {
        Some(nrmse(&qt, &qi, &vec![true; qt.len()])?)
    };
    let pfc = pfc(&ct, &ci, &vec![true; ct.len()])?;
    Ok(ImputationErrors {
        nrmse,
        pfc,
        quantitative_holes: qt.len(),
        categorical_holes: ct.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{ampute_mcar, AmputationConfig};
    use crate::Cell;
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn q(name: &str, v: Vec<Option<f64>>) -> Column {
        Column::quantitative(name, v).unwrap()
    }

    fn c(name: &str, v: &[Option<&str>]) -> Column {
        Column::categorical_from_labels(name, v).unwrap()
    }

    fn small_params(seed: u64) -> ImputeParams {
        ImputeParams {
            forest: ForestParams {
                n_trees: 30,
                ..Default::default()
            },
            max_iterations: 10,
            seed,
        }
    }

    #[test]
    fn initial_guess_mean_and_mode() {
        let t = MixedTable::from_columns(vec![
            q("x", vec![Some(1.0), None, Some(3.0), Some(2.0)]),
            c("a", &[Some("a"), Some("a"), Some("b"), None]),
            c("b", &[Some("a"), Some("b"), None, Some("b")]),
        ])
        .unwrap();
        let g = initial_guess(&t).unwrap();
        assert_eq!(g.get(1, 0), Some(Cell::Quantitative(2.0)));
        assert_eq!(g.column(1).label(3).as_deref(), Some("a"));
        assert_eq!(g.column(2).label(2).as_deref(), Some("b"));
        assert!(!g.has_missing());

        let tie = MixedTable::from_columns(vec![c("t", &[Some("a"), Some("b"), None])]).unwrap();
        assert_eq!(initial_guess(&tie).unwrap().column(0).label(2).as_deref(), Some("a"));

        let empty = MixedTable::from_columns(vec![q("x", vec![None, None])]).unwrap();
        assert!(matches!(initial_guess(&empty), Err(Error::FullyMissing(_))));
    }

    #[test]
    fn delta_continuous_examples() {
        let a: &[f64] = &[1.0, 2.0];
        assert_eq!(delta_continuous(&[a], &[a]).unwrap(), 0.0);
        let old: &[f64] = &[1.0, 0.0];
        assert!((delta_continuous(&[a], &[old]).unwrap() - 0.8).abs() < 1e-15);

        let scaled_new: Vec<f64> = a.iter().map(|v| v * -3.5).collect();
        let scaled_old: Vec<f64> = old.iter().map(|v| v * -3.5).collect();
        let d = delta_continuous(&[&scaled_new], &[&scaled_old]).unwrap();
        assert!((d - 0.8).abs() < 1e-12);

        let z: &[f64] = &[0.0, 0.0];
        assert!(delta_continuous(&[z], &[a]).is_err());
    }

    #[test]
    fn delta_categorical_examples() {
        let a: &[u32] = &[0, 1, 2, 0];
        let b: &[u32] = &[0, 1, 1, 0];
        assert_eq!(delta_categorical(&[a], &[a], 4).unwrap(), Some(0.0));
        assert_eq!(delta_categorical(&[a], &[b], 4).unwrap(), Some(0.25));
        assert_eq!(delta_categorical(&[a], &[b], 0).unwrap(), None);
    }

    #[test]
    fn nrmse_examples() {
        let holes = [true, true];
        assert_eq!(nrmse(&[0.0, 2.0], &[0.0, 2.0], &holes).unwrap(), 0.0);
        assert_eq!(nrmse(&[0.0, 2.0], &[1.0, 1.0], &holes).unwrap(), 1.0);
        let v = nrmse(&[0.0, 2.0], &[0.0, 0.0], &holes).unwrap();
        assert!((v - 2f64.sqrt()).abs() < 1e-15);
        assert!(nrmse(&[1.0, 1.0], &[0.0, 0.0], &holes).is_err());
        assert!(nrmse(&[1.0, 2.0], &[0.0, 0.0], &[true, false]).is_err());
    }

    #[test]
    fn pfc_examples() {
        let h = [true; 4];
        assert_eq!(pfc(&[1, 2, 3, 4], &[1, 2, 3, 4], &h).unwrap(), Some(0.0));
        assert_eq!(pfc(&[1, 2, 3, 4], &[1, 2, 3, 0], &h).unwrap(), Some(0.25));
        assert_eq!(pfc(&[1, 2, 3, 4], &[0, 0, 0, 0], &h).unwrap(), Some(1.0));
        assert_eq!(pfc(&[1, 2], &[0, 0], &[false, false]).unwrap(), None);
    }

    #[test]
    fn complete_table_returns_immediately() {
        let t = MixedTable::from_columns(vec![
            q("x", vec![Some(1.0), Some(2.0)]),
            c("a", &[Some("u"), Some("v")]),
        ])
        .unwrap();
        let r = missforest_impute(&t, &small_params(0)).unwrap();
        assert_eq!(r.imputed, t);
        assert_eq!(r.iterations, 0);
        assert_eq!(r.stopped_by, StopReason::NoMissing);
        assert!(r.delta_history.is_empty());
    }

    #[test]
    fn single_incomplete_column_rejected() {
        let t = MixedTable::from_columns(vec![q("x", vec![Some(1.0), None, Some(2.0)])]).unwrap();
        assert!(missforest_impute(&t, &small_params(0)).is_err());
    }

    fn linear_table(seed: u64) -> MixedTable {
        let mut rng = rng::rng_from_seed(seed);
        let n = 200;
        let mut x: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
        x[0] = 1.0;
        let y: Vec<Option<f64>> = x
            .iter()
            .enumerate()
            .map(|(i, &xi)| {
                let noise: f64 = rng.sample(StandardNormal);
                (i != 0).then_some(2.0 * xi + 0.1 * noise)
            })
            .collect();
        MixedTable::from_columns(vec![q("x", x.into_iter().map(Some).collect()), q("y", y)]).unwrap()
    }

    #[test]
    fn recovers_linear_relationship() {
        let t = linear_table(5);
        let mut params = small_params(3);
        params.forest.n_trees = 100;
        let r = missforest_impute(&t, &params).unwrap();
        let Some(Cell::Quantitative(v)) = r.imputed.get(0, 1) else {
            panic!()
        };
        assert!((v - 2.0).abs() < 0.3, "imputed {v}");
    }

    #[test]
    fn observed_cells_kept_and_deterministic() {
        let mut rng = rng::rng_from_seed(9);
        let n = 60;
        let a: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
        let b: Vec<Option<f64>> = a.iter().map(|&v| Some(v * 3.0 + 1.0)).collect();
        let labels: Vec<Option<&str>> = a.iter().map(|&v| Some(if v > 0.5 { "hi" } else { "lo" })).collect();
        let full = MixedTable::from_columns(vec![
            q("a", a.iter().copied().map(Some).collect()),
            q("b", b),
            c("c", &labels),
        ])
        .unwrap();
        let (t, _) = ampute_mcar(&full, &AmputationConfig { rate: 0.15, seed: 4 }).unwrap();
        let r1 = missforest_impute(&t, &small_params(11)).unwrap();
        let r2 = missforest_impute(&t, &small_params(11)).unwrap();
        assert_eq!(r1, r2);
        assert!(!r1.imputed.has_missing());
        assert_eq!(r1.delta_history.len(), r1.iterations);
        for j in 0..t.n_cols() {
            for i in 0..n {
                if let Some(cell) = t.get(i, j) {
                    match (cell, r1.imputed.get(i, j).unwrap()) {
                        (Cell::Quantitative(x), Cell::Quantitative(y)) => assert_eq!(x.to_bits(), y.to_bits()),
                        (x, y) => assert_eq!(x, y),
                    }
                }
            }
        }
        for d in &r1.delta_history {
            assert!(d.quantitative.unwrap() >= 0.0);
            let f = d.categorical.unwrap();
            assert!((0.0..=1.0).contains(&f));
        }
    }

    #[test]
    fn evaluate_pools_holes() {
        let truth = MixedTable::from_columns(vec![
            q("x", vec![Some(0.0), Some(2.0), Some(5.0)]),
            c("c", &[Some("a"), Some("b"), Some("a")]),
        ])
        .unwrap();
        let imputed = MixedTable::from_columns(vec![
            q("x", vec![Some(1.0), Some(1.0), Some(5.0)]),
            c("c", &[Some("b"), Some("b"), Some("a")]),
        ])
        .unwrap();
        let mut holes = Mask::new(3, 2);
        holes.set(0, 0, true);
        holes.set(1, 0, true);
        holes.set(0, 1, true);
        let e = evaluate_imputation(&truth, &imputed, &holes).unwrap();
        assert_eq!(e.nrmse, Some(1.0));
        // "a" vs "b": labels compared even though level indices differ
        assert_eq!(e.pfc, Some(1.0));

        let e = evaluate_imputation(&truth, &truth, &holes).unwrap();
        assert_eq!((e.nrmse, e.pfc), (Some(0.0), Some(0.0)));

        let mut quant_only = Mask::new(3, 2);
        quant_only.set(0, 0, true);
        quant_only.set(2, 0, true);
        assert_eq!(evaluate_imputation(&truth, &imputed, &quant_only).unwrap().pfc, None);
    }
}
