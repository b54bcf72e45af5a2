//! Numeric encoding of a complete mixed table ahead of PCA.
//!
//! Quantitative columns become z-scores. Each categorical column with `K`
//! levels becomes `K` indicator columns, scaled by `1/sqrt(p_s)` under the
//! FAMD scheme where `p_s` is the share of rows holding the category. The two
//! blocks are concatenated (quantitative first) and optionally rounded to three
//! decimals.

use serde::Serialize;

use crate::data_model::{split_by_kind, ColumnData, MixedTable};
use crate::error::{Error, Result};
use crate::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightingScheme {
    #[default]
    Famd,
    None,
}

impl std::str::FromStr for WeightingScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "famd" => Ok(WeightingScheme::Famd),
            "none" => Ok(WeightingScheme::None),
            other => Err(Error::invalid(format!("unknown weighting scheme `{other}`"))),
        }
    }
}

/// Where an encoded column came from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColumnProvenance {
    pub source: String,
    /// Category label for indicator columns.
    pub category: Option<String>,
    pub weight: f64,
    /// Mean removed during standardization.
    pub center: Option<f64>,
    /// Standard deviation divided out during standardization.
    pub scale: Option<f64>,
    /// Share of rows holding the category.
    pub frequency: Option<f64>,
    /// Indicator of a single-level variable (all ones).
    pub constant: bool,
}

impl ColumnProvenance {
    fn quantitative(source: &str, center: f64, scale: f64) -> Self {
        ColumnProvenance {
            source: source.to_string(),
            category: None,
            weight: 1.0,
            center: Some(center),
            scale: Some(scale),
            frequency: None,
            constant: false,
        }
    }
}

/// Dense encoded block with per-column provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedMatrix {
    pub values: Matrix,
    pub provenance: Vec<ColumnProvenance>,
    pub warnings: Vec<String>,
}

impl EncodedMatrix {
    pub fn empty(n_rows: usize) -> Self {
        EncodedMatrix {
            values: Matrix::zeros(n_rows, 0),
            provenance: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub fn nrows(&self) -> usize {
        self.values.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.values.ncols()
    }

    /// Means of the standardized columns, in column order.
    pub fn center(&self) -> Vec<f64> {
        self.provenance.iter().filter_map(|p| p.center).collect()
    }

    /// Standard deviations of the standardized columns, in column order.
    pub fn scale(&self) -> Vec<f64> {
        self.provenance.iter().filter_map(|p| p.scale).collect()
    }

    fn keep_columns(&self, keep: &[usize]) -> EncodedMatrix {
        EncodedMatrix {
            values: self.values.select_columns(keep),
            provenance: keep.iter().map(|&j| self.provenance[j].clone()).collect(),
            warnings: self.warnings.clone(),
        }
    }
}

/// Observed quantitative columns of a table as a matrix.
pub fn quantitative_matrix(table: &MixedTable) -> Result<Matrix> {
    let mut m = Matrix::zeros(table.n_rows(), table.n_cols());
    for (j, col) in table.columns().iter().enumerate() {
        let values = col.quantitative_values().ok_or_else(|| {
            Error::invalid(format!("column `{}` is not quantitative", col.name()))
        })?;
        if col.missing_count() > 0 {
            return Err(Error::invalid(format!(
                "column `{}` still has missing cells",
                col.name()
            )));
        }
        m.column_mut(j).copy_from_slice(values);
    }
    Ok(m)
}

/// z-score each column using the sample standard deviation.
pub fn standardize(quant: &Matrix, names: &[String]) -> Result<EncodedMatrix> {
    let (n, p) = quant.shape();
    if names.len() != p {
        return Err(Error::mismatch(format!("{p} column names"), names.len()));
    }
    if p == 0 {
        return Ok(EncodedMatrix::empty(n));
    }
    if n < 2 {
        return Err(Error::invalid("standardization needs at least two rows"));
    }
    let mut z = quant.clone();
    let mut provenance = Vec::with_capacity(p);
    for (j, name) in names.iter().enumerate() {
        let col = quant.column(j);
        let mean = col.iter().sum::<f64>() / n as f64;
        let ss: f64 = col.iter().map(|v| (v - mean).powi(2)).sum();
        let sd = (ss / (n - 1) as f64).sqrt();
        if !(sd > 0.0) || !sd.is_finite() {
            return Err(Error::ConstantColumn(name.clone()));
        }
        for v in z.column_mut(j).iter_mut() {
            *v = (*v - mean) / sd;
        }
        provenance.push(ColumnProvenance::quantitative(name, mean, sd));
    }
    Ok(EncodedMatrix {
        values: z,
        provenance,
        warnings: Vec::new(),
    })
}

/// Complete disjunctive coding: one 0/1 column per level.
pub fn disjunctive(qual: &MixedTable) -> Result<EncodedMatrix> {
    let n = qual.n_rows();
    let q: usize = qual.columns().iter().map(|c| c.spec().levels.len()).sum();
    let mut values = Matrix::zeros(n, q);
    let mut provenance = Vec::with_capacity(q);
    let mut offset = 0;
    for col in qual.columns() {
        let spec = col.spec();
        let ColumnData::Categorical(codes) = col.data() else {
            return Err(Error::invalid(format!(
                "column `{}` is not categorical",
                spec.name
            )));
        };
        if spec.levels.is_empty() {
            return Err(Error::Schema(format!("column `{}` has no levels", spec.name)));
        }
        if col.missing_count() > 0 {
            return Err(Error::invalid(format!(
                "column `{}` still has missing cells",
                spec.name
            )));
        }
        for (i, &c) in codes.iter().enumerate() {
            values[(i, offset + c as usize)] = 1.0;
        }
        let constant = spec.levels.len() == 1;
        for level in &spec.levels {
            provenance.push(ColumnProvenance {
                source: spec.name.clone(),
                category: Some(level.clone()),
                weight: 1.0,
                center: None,
                scale: None,
                frequency: None,
                constant,
            });
        }
        offset += spec.levels.len();
    }
    Ok(EncodedMatrix {
        values,
        provenance,
        warnings: Vec::new(),
    })
}

/// Weight indicator columns. A category that never occurs is dropped with a
/// warning.
pub fn weight_indicators(indicators: &EncodedMatrix, scheme: WeightingScheme) -> EncodedMatrix {
    let n = indicators.nrows();
    let mut out = indicators.clone();
    let mut keep = Vec::with_capacity(out.ncols());
    for j in 0..out.ncols() {
        let count = out.values.column(j).iter().filter(|&&v| v != 0.0).count();
        let share = if n == 0 { 0.0 } else { count as f64 / n as f64 };
        let prov = &mut out.provenance[j];
        if count == 0 {
            out.warnings.push(format!(
                "dropped level `{}` of `{}`: no rows hold it",
                prov.category.as_deref().unwrap_or(""),
                prov.source
            ));
            continue;
        }
        prov.frequency = Some(share);
        if scheme == WeightingScheme::Famd {
            let w = 1.0 / share.sqrt();
            out.values.column_mut(j).iter_mut().for_each(|v| *v *= w);
            prov.weight *= w;
        }
        keep.push(j);
    }
    if keep.len() == out.ncols() {
        out
    } else {
        out.keep_columns(&keep)
    }
}

/// Concatenate two blocks by columns, `a` first.
pub fn combine_columns(a: &EncodedMatrix, b: &EncodedMatrix) -> Result<EncodedMatrix> {
    if a.nrows() != b.nrows() {
        return Err(Error::mismatch(
            format!("{} rows", a.nrows()),
            format!("{} rows", b.nrows()),
        ));
    }
    let n = a.nrows();
    let mut values = Matrix::zeros(n, a.ncols() + b.ncols());
    values.columns_mut(0, a.ncols()).copy_from(&a.values);
    values.columns_mut(a.ncols(), b.ncols()).copy_from(&b.values);
    Ok(EncodedMatrix {
        values,
        provenance: a.provenance.iter().chain(&b.provenance).cloned().collect(),
        warnings: a.warnings.iter().chain(&b.warnings).cloned().collect(),
    })
}

/// Round to three decimals, halves away from zero.
pub fn round3(m: &Matrix) -> Matrix {
    m.map(|v| (v * 1000.0).round() / 1000.0)
}

/// Full encoding of a complete table. Constant quantitative columns and
/// indicators of single-level variables carry no variance and are dropped
/// with a warning.
pub fn encode_table(
    table: &MixedTable,
    scheme: WeightingScheme,
    round: bool,
) -> Result<EncodedMatrix> {
    if table.has_missing() {
        return Err(Error::invalid("encoding requires a table without missing cells"));
    }
    let split = split_by_kind(table);
    let mut warnings = Vec::new();

    let quant = quantitative_matrix(&split.quant)?;
    let mut varying = Vec::new();
    let mut names = Vec::new();
    for (j, col) in split.quant.columns().iter().enumerate() {
        let c = quant.column(j);
        if c.iter().all(|&v| v == c[0]) {
            warnings.push(format!("dropped constant quantitative column `{}`", col.name()));
        } else {
            varying.push(j);
            names.push(col.name().to_string());
        }
    }
    let z = standardize(&quant.select_columns(&varying), &names)?;

    let single: Vec<usize> = split
        .qual
        .columns()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.spec().levels.len() == 1)
        .map(|(j, _)| j)
        .collect();
    for &j in &single {
        warnings.push(format!(
            "dropped single-level categorical column `{}`",
            split.qual.column(j).name()
        ));
    }
    let multi: Vec<usize> = (0..split.qual.n_cols())
        .filter(|j| !single.contains(j))
        .collect();
    let indicators = disjunctive(&split.qual.select(&multi))?;
    let weighted = weight_indicators(&indicators, scheme);

    let mut combined = combine_columns(&z, &weighted)?;
    if round {
        combined.values = round3(&combined.values);
    }
    warnings.append(&mut combined.warnings);
    combined.warnings = warnings;
    debug_assert!(combined
        .provenance
        .iter()
        .all(|p| p.weight > 0.0 && (p.category.is_some() || p.center.is_some())));
    Ok(combined)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data_model::Column;
    use proptest::prelude::*;

    fn names(p: usize) -> Vec<String> {
        (0..p).map(|j| format!("x{j}")).collect()
    }

    fn cat(name: &str, labels: &[&str]) -> Column {
        let v: Vec<Option<&str>> = labels.iter().map(|&l| Some(l)).collect();
        Column::categorical_from_labels(name, &v).unwrap()
    }

    #[test]
    fn standardize_by_hand() {
        let m = Matrix::from_column_slice(3, 1, &[2.0, 4.0, 6.0]);
        let z = standardize(&m, &names(1)).unwrap();
        assert_eq!(z.values.as_slice(), &[-1.0, 0.0, 1.0]);
        assert_eq!(z.center(), vec![4.0]);
        assert_eq!(z.scale(), vec![2.0]);

        let again = standardize(&z.values, &names(1)).unwrap();
        for (a, b) in again.values.iter().zip(z.values.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_column_rejected() {
        let m = Matrix::from_column_slice(3, 2, &[1.0, 2.0, 3.0, 5.0, 5.0, 5.0]);
        match standardize(&m, &names(2)) {
            Err(Error::ConstantColumn(name)) => assert_eq!(name, "x1"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn disjunctive_rows() {
        let t = MixedTable::from_columns(vec![cat("c", &["a", "b", "a"])]).unwrap();
        let d = disjunctive(&t).unwrap();
        assert_eq!(d.values, Matrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 0.0]));
        assert_eq!(d.provenance[1].category.as_deref(), Some("b"));

        let t = MixedTable::from_columns(vec![
            cat("c", &["a", "b", "a"]),
            cat("d", &["u", "v", "w"]),
        ])
        .unwrap();
        let d = disjunctive(&t).unwrap();
        for i in 0..3 {
            assert_eq!(d.values.row(i).sum(), 2.0);
        }

        let t = MixedTable::from_columns(vec![cat("s", &["k", "k"])]).unwrap();
        let d = disjunctive(&t).unwrap();
        assert_eq!(d.values.as_slice(), &[1.0, 1.0]);
        assert!(d.provenance[0].constant);
    }

    #[test]
    fn famd_weights() {
        let t = MixedTable::from_columns(vec![cat("c", &["a", "b", "b", "b"])]).unwrap();
        let d = disjunctive(&t).unwrap();
        assert_eq!(weight_indicators(&d, WeightingScheme::None).values, d.values);

        let w = weight_indicators(&d, WeightingScheme::Famd);
        // "a" holds 25% of rows
        assert_eq!(w.values[(0, 0)], 2.0);
        assert_eq!(w.provenance[0].weight, 2.0);
        assert_eq!(w.provenance[0].frequency, Some(0.25));

        let t = MixedTable::from_columns(vec![cat("c", &["a", "a"])]).unwrap();
        let w = weight_indicators(&disjunctive(&t).unwrap(), WeightingScheme::Famd);
        assert_eq!(w.provenance[0].weight, 1.0);
    }

    #[test]
    fn unseen_level_dropped() {
        let col = Column::categorical("c", vec!["a".into(), "b".into()], vec![Some(0), Some(0)]).unwrap();
        let t = MixedTable::from_columns(vec![col]).unwrap();
        let w = weight_indicators(&disjunctive(&t).unwrap(), WeightingScheme::Famd);
        assert_eq!(w.ncols(), 1);
        assert_eq!(w.warnings.len(), 1);
    }

    #[test]
    fn combine_shapes() {
        let a = standardize(&Matrix::from_fn(3, 2, |i, j| (i * (j + 1)) as f64), &names(2)).unwrap();
        let t = MixedTable::from_columns(vec![cat("c", &["a", "b", "c"])]).unwrap();
        let b = disjunctive(&t).unwrap();
        let c = combine_columns(&a, &b).unwrap();
        assert_eq!(c.values.shape(), (3, 5));
        assert_eq!(c.values.columns(0, 2), a.values);
        assert_eq!(c.values.columns(2, 3), b.values);

        let c = combine_columns(&a, &EncodedMatrix::empty(3)).unwrap();
        assert_eq!(c, a);
        assert!(combine_columns(&a, &EncodedMatrix::empty(4)).is_err());
    }

    #[test]
    fn round3_examples() {
        let m = Matrix::from_row_slice(1, 3, &[1.23456, -0.0005, 2.0]);
        assert_eq!(round3(&m).as_slice(), &[1.235, -0.001, 2.0]);
    }

    #[test]
    fn encode_table_drops_degenerate_columns() {
        let t = MixedTable::from_columns(vec![
            Column::quantitative("x", vec![Some(1.0), Some(2.0), Some(3.0)]).unwrap(),
            Column::quantitative("k", vec![Some(7.0); 3]).unwrap(),
            cat("s", &["u", "u", "u"]),
            cat("c", &["a", "b", "a"]),
        ])
        .unwrap();
        let e = encode_table(&t, WeightingScheme::Famd, true).unwrap();
        assert_eq!(e.ncols(), 3);
        assert_eq!(e.warnings.len(), 2);
        assert_eq!(e.provenance[0].source, "x");
        assert_eq!(e.provenance[1].category.as_deref(), Some("a"));
    }

    proptest! {
        #[test]
        fn round3_bounded_and_idempotent(v in -1e6f64..1e6) {
            let m = Matrix::from_element(1, 1, v);
            let r = round3(&m);
            prop_assert!((r[(0, 0)] - v).abs() <= 0.0005 + 1e-9);
            prop_assert_eq!(round3(&r), r);
        }

        #[test]
        fn standardized_moments(cells in proptest::collection::vec(-1000i32..1000, 12)) {
            let cells: Vec<f64> = cells.iter().map(|&c| c as f64 / 8.0).collect();
            let m = Matrix::from_column_slice(6, 2, &cells);
            prop_assume!((0..2).all(|j| m.column(j).iter().any(|&v| v != m[(0, j)])));
            let z = standardize(&m, &names(2)).unwrap();
            for j in 0..2 {
                let c = z.values.column(j);
                let mean = c.sum() / 6.0;
                let sd = (c.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 5.0).sqrt();
                prop_assert!(mean.abs() < 1e-10);
                prop_assert!((sd - 1.0).abs() < 1e-10);
            }
        }
    }
}
