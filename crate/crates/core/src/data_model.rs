//! Mixed-type table with an explicit missingness mask.
//!
//! Quantitative columns store `f64`, categorical columns store indices into
//! their level list. Missing cells keep a placeholder in storage (`0.0` or
//! level `0`) but every read goes through [`Column::get`], which reports them
//! as `None`.

use std::collections::HashSet;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ColumnKind {
    Quantitative,
    Categorical,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnSpec {
    pub name: String,
    pub kind: ColumnKind,
    /// Category labels in first-appearance order; empty for quantitative columns.
    pub levels: Vec<String>,
}

impl ColumnSpec {
    pub fn quantitative(name: impl Into<String>) -> Self {
        ColumnSpec {
            name: name.into(),
            kind: ColumnKind::Quantitative,
            levels: Vec::new(),
        }
    }

    pub fn categorical<S: Into<String>>(
        name: impl Into<String>,
        levels: impl IntoIterator<Item = S>,
    ) -> Self {
        ColumnSpec {
            name: name.into(),
            kind: ColumnKind::Categorical,
            levels: levels.into_iter().map(Into::into).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            ColumnKind::Quantitative if !self.levels.is_empty() => Err(Error::Schema(format!(
                "quantitative column `{}` declares levels",
                self.name
            ))),
            ColumnKind::Quantitative => Ok(()),
            ColumnKind::Categorical => {
                if self.levels.is_empty() {
                    return Err(Error::Schema(format!(
                        "categorical column `{}` has no levels",
                        self.name
                    )));
                }
                let mut seen = HashSet::new();
                for level in &self.levels {
                    if !seen.insert(level.as_str()) {
                        return Err(Error::Schema(format!(
                            "categorical column `{}` repeats level `{level}`",
                            self.name
                        )));
                    }
                }
                Ok(())
            }
        }
    }

    pub fn level_index(&self, label: &str) -> Option<u32> {
        self.levels.iter().position(|l| l == label).map(|i| i as u32)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ColumnData {
    Quantitative(Vec<f64>),
    Categorical(Vec<u32>),
}

impl ColumnData {
    pub fn len(&self) -> usize {
        match self {
            ColumnData::Quantitative(v) => v.len(),
            ColumnData::Categorical(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn kind(&self) -> ColumnKind {
        match self {
            ColumnData::Quantitative(_) => ColumnKind::Quantitative,
            ColumnData::Categorical(_) => ColumnKind::Categorical,
        }
    }
}

/// A single observed cell value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Quantitative(f64),
    Categorical(u32),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    spec: ColumnSpec,
    data: ColumnData,
    missing: Vec<bool>,
}

impl Column {
    /// Build a column from raw storage. Masked cells are normalized to the
    /// placeholder value so that equal tables compare equal.
    pub fn new(spec: ColumnSpec, mut data: ColumnData, missing: Vec<bool>) -> Result<Self> {
        spec.validate()?;
        if spec.kind != data.kind() {
            return Err(Error::Schema(format!(
                "column `{}` storage does not match its kind",
                spec.name
            )));
        }
        if data.len() != missing.len() {
            return Err(Error::mismatch(
                format!("{} mask entries in `{}`", data.len(), spec.name),
                missing.len(),
            ));
        }
        match &mut data {
            ColumnData::Quantitative(values) => {
                for (i, (v, &m)) in values.iter_mut().zip(&missing).enumerate() {
                    if m {
                        *v = 0.0;
                    } else if !v.is_finite() {
                        return Err(Error::invalid(format!(
                            "non-finite value in column `{}` row {i}",
                            spec.name
                        )));
                    }
                }
            }
            ColumnData::Categorical(codes) => {
                let k = spec.levels.len() as u32;
                for (i, (c, &m)) in codes.iter_mut().zip(&missing).enumerate() {
                    if m {
                        *c = 0;
                    } else if *c >= k {
                        return Err(Error::invalid(format!(
                            "level index {c} out of range in column `{}` row {i}",
                            spec.name
                        )));
                    }
                }
            }
        }
        Ok(Column {
            spec,
            data,
            missing,
        })
    }

    pub fn quantitative(name: impl Into<String>, values: Vec<Option<f64>>) -> Result<Self> {
        let missing = values.iter().map(Option::is_none).collect();
        let data = values.into_iter().map(|v| v.unwrap_or(0.0)).collect();
        Column::new(
            ColumnSpec::quantitative(name),
            ColumnData::Quantitative(data),
            missing,
        )
    }

    /// Categorical column from labels; levels follow first appearance.
    pub fn categorical_from_labels<S: AsRef<str>>(
        name: impl Into<String>,
        labels: &[Option<S>],
    ) -> Result<Self> {
        let mut levels: Vec<String> = Vec::new();
        let mut codes = Vec::with_capacity(labels.len());
        let mut missing = Vec::with_capacity(labels.len());
        for label in labels {
            match label {
                Some(l) => {
                    let l = l.as_ref();
                    let idx = match levels.iter().position(|x| x == l) {
                        Some(i) => i,
                        None => {
                            levels.push(l.to_string());
                            levels.len() - 1
                        }
                    };
                    codes.push(idx as u32);
                    missing.push(false);
                }
                None => {
                    codes.push(0);
                    missing.push(true);
                }
            }
        }
        Column::new(
            ColumnSpec::categorical(name, levels),
            ColumnData::Categorical(codes),
            missing,
        )
    }

    pub fn categorical(
        name: impl Into<String>,
        levels: Vec<String>,
        codes: Vec<Option<u32>>,
    ) -> Result<Self> {
        let missing = codes.iter().map(Option::is_none).collect();
        let data = codes.into_iter().map(|c| c.unwrap_or(0)).collect();
        Column::new(
            ColumnSpec::categorical(name, levels),
            ColumnData::Categorical(data),
            missing,
        )
    }

    pub fn spec(&self) -> &ColumnSpec {
        &self.spec
    }

    pub fn name(&self) -> &str {
        &self.spec.name
    }

    pub fn kind(&self) -> ColumnKind {
        self.spec.kind
    }

    pub fn len(&self) -> usize {
        self.missing.len()
    }

    pub fn is_empty(&self) -> bool {
        self.missing.is_empty()
    }

    /// Raw storage, placeholders included at masked positions.
    pub fn data(&self) -> &ColumnData {
        &self.data
    }

    pub fn missing(&self) -> &[bool] {
        &self.missing
    }

    pub fn is_missing(&self, row: usize) -> bool {
        self.missing[row]
    }

    pub fn missing_count(&self) -> usize {
        self.missing.iter().filter(|&&m| m).count()
    }

    pub fn get(&self, row: usize) -> Option<Cell> {
        if self.missing[row] {
            return None;
        }
        Some(match &self.data {
            ColumnData::Quantitative(v) => Cell::Quantitative(v[row]),
            ColumnData::Categorical(v) => Cell::Categorical(v[row]),
        })
    }

    pub fn quantitative_values(&self) -> Option<&[f64]> {
        match &self.data {
            ColumnData::Quantitative(v) => Some(v),
            ColumnData::Categorical(_) => None,
        }
    }

    pub fn categorical_codes(&self) -> Option<&[u32]> {
        match &self.data {
            ColumnData::Categorical(v) => Some(v),
            ColumnData::Quantitative(_) => None,
        }
    }

    /// Label of the observed cell at `row`, or the rendered number.
    pub fn label(&self, row: usize) -> Option<String> {
        self.get(row).map(|cell| match cell {
            Cell::Quantitative(v) => v.to_string(),
            Cell::Categorical(c) => self.spec.levels[c as usize].clone(),
        })
    }

    /// Copy of this column with `mask` applied on top of the existing one.
    pub fn with_extra_mask(&self, mask: &[bool]) -> Result<Self> {
        let missing = self
            .missing
            .iter()
            .zip(mask)
            .map(|(&a, &b)| a || b)
            .collect();
        Column::new(self.spec.clone(), self.data.clone(), missing)
    }
}

/// Column-major n×p boolean mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    n_rows: usize,
    n_cols: usize,
    bits: Vec<bool>,
}

impl Mask {
    pub fn new(n_rows: usize, n_cols: usize) -> Self {
        Mask {
            n_rows,
            n_cols,
            bits: vec![false; n_rows * n_cols],
        }
    }

    pub fn from_columns(n_rows: usize, columns: &[Vec<bool>]) -> Result<Self> {
        let mut mask = Mask::new(n_rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            if col.len() != n_rows {
                return Err(Error::mismatch(n_rows, col.len()));
            }
            mask.bits[j * n_rows..(j + 1) * n_rows].copy_from_slice(col);
        }
        Ok(mask)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.bits[col * self.n_rows + row]
    }

    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        self.bits[col * self.n_rows + row] = value;
    }

    pub fn column(&self, col: usize) -> &[bool] {
        &self.bits[col * self.n_rows..(col + 1) * self.n_rows]
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.count() == 0
    }

    pub fn select_columns(&self, indices: &[usize]) -> Mask {
        let mut out = Mask::new(self.n_rows, indices.len());
        for (k, &j) in indices.iter().enumerate() {
            out.bits[k * self.n_rows..(k + 1) * self.n_rows].copy_from_slice(self.column(j));
        }
        out
    }
}

/// Immutable n×p table of typed columns.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedTable {
    n_rows: usize,
    columns: Vec<Column>,
}

impl MixedTable {
    pub fn new(n_rows: usize, columns: Vec<Column>) -> Result<Self> {
        for col in &columns {
            if col.len() != n_rows {
                return Err(Error::mismatch(
                    format!("{n_rows} rows"),
                    format!("{} rows in column `{}`", col.len(), col.name()),
                ));
            }
        }
        Ok(MixedTable { n_rows, columns })
    }

    /// Table whose row count is taken from the first column.
    pub fn from_columns(columns: Vec<Column>) -> Result<Self> {
        let n = columns.first().map_or(0, Column::len);
        MixedTable::new(n, columns)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn column(&self, j: usize) -> &Column {
        &self.columns[j]
    }

    pub fn into_columns(self) -> Vec<Column> {
        self.columns
    }

    pub fn specs(&self) -> Vec<ColumnSpec> {
        self.columns.iter().map(|c| c.spec.clone()).collect()
    }

    pub fn get(&self, row: usize, col: usize) -> Option<Cell> {
        self.columns[col].get(row)
    }

    pub fn is_missing(&self, row: usize, col: usize) -> bool {
        self.columns[col].is_missing(row)
    }

    pub fn mask(&self) -> Mask {
        let cols: Vec<Vec<bool>> = self.columns.iter().map(|c| c.missing.clone()).collect();
        Mask::from_columns(self.n_rows, &cols).expect("columns share the row count")
    }

    pub fn has_missing(&self) -> bool {
        self.columns.iter().any(|c| c.missing.iter().any(|&m| m))
    }

    pub fn kinds(&self) -> Vec<ColumnKind> {
        self.columns.iter().map(Column::kind).collect()
    }

    pub fn select(&self, indices: &[usize]) -> MixedTable {
        MixedTable {
            n_rows: self.n_rows,
            columns: indices.iter().map(|&j| self.columns[j].clone()).collect(),
        }
    }

    /// Apply an extra missingness mask on top of the existing one.
    pub fn with_extra_mask(&self, mask: &Mask) -> Result<MixedTable> {
        if mask.n_rows() != self.n_rows || mask.n_cols() != self.n_cols() {
            return Err(Error::mismatch(
                format!("{}x{} mask", self.n_rows, self.n_cols()),
                format!("{}x{}", mask.n_rows(), mask.n_cols()),
            ));
        }
        let columns = self
            .columns
            .iter()
            .enumerate()
            .map(|(j, c)| c.with_extra_mask(mask.column(j)))
            .collect::<Result<_>>()?;
        MixedTable::new(self.n_rows, columns)
    }
}

/// Partition of a table into its quantitative and categorical columns.
#[derive(Debug, Clone, PartialEq)]
pub struct KindSplit {
    pub quant: MixedTable,
    pub qual: MixedTable,
    pub quant_indices: Vec<usize>,
    pub qual_indices: Vec<usize>,
}

impl KindSplit {
    /// Re-interleave both parts into the original column order.
    pub fn merge(&self) -> MixedTable {
        let p = self.quant_indices.len() + self.qual_indices.len();
        let mut slots: Vec<Option<Column>> = vec![None; p];
        for (col, &j) in self.quant.columns.iter().zip(&self.quant_indices) {
            slots[j] = Some(col.clone());
        }
        for (col, &j) in self.qual.columns.iter().zip(&self.qual_indices) {
            slots[j] = Some(col.clone());
        }
        MixedTable {
            n_rows: self.quant.n_rows,
            columns: slots
                .into_iter()
                .map(|c| c.expect("index lists cover every position"))
                .collect(),
        }
    }
}

pub fn split_by_kind(table: &MixedTable) -> KindSplit {
    let (quant_indices, qual_indices): (Vec<usize>, Vec<usize>) = (0..table.n_cols())
        .partition(|&j| table.columns[j].kind() == ColumnKind::Quantitative);
    KindSplit {
        quant: table.select(&quant_indices),
        qual: table.select(&qual_indices),
        quant_indices,
        qual_indices,
    }
}

pub fn missing_counts(table: &MixedTable) -> Vec<usize> {
    table.columns.iter().map(Column::missing_count).collect()
}

/// Column indices by increasing missing count, ties by original index.
pub fn column_order_by_missingness(table: &MixedTable) -> Vec<usize> {
    let counts = missing_counts(table);
    let mut order: Vec<usize> = (0..counts.len()).collect();
    order.sort_by_key(|&j| counts[j]);
    order
}
