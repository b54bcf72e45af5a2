//! CSV input/output, schema inference and MCAR amputation.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use rand::seq::SliceRandom;

use crate::data_model::{Column, ColumnData, ColumnKind, ColumnSpec, Mask, MixedTable};
use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, PartialEq)]
pub struct CsvOptions {
    pub delimiter: u8,
    /// Cell texts read as missing. The first one is written for masked cells.
    pub na_tokens: Vec<String>,
    pub has_header: bool,
    /// Strip surrounding whitespace from every cell before interpretation.
    pub trim: bool,
}

impl Default for CsvOptions {
    fn default() -> Self {
        CsvOptions {
            delimiter: b',',
            na_tokens: vec!["NA".to_string(), String::new()],
            has_header: true,
            trim: true,
        }
    }
}

impl CsvOptions {
    pub fn validate(&self) -> Result<()> {
        if self.na_tokens.is_empty() {
            return Err(Error::invalid("at least one NA token is required"));
        }
        if self.delimiter == b'"' {
            return Err(Error::invalid("the delimiter cannot be a quote character"));
        }
        Ok(())
    }

    fn is_na(&self, cell: &str) -> bool {
        self.na_tokens.iter().any(|t| t == cell)
    }
}

/// Parsed but uninterpreted CSV content.
#[derive(Debug, Clone, PartialEq)]
pub struct RawTable {
    pub header: Option<Vec<String>>,
    pub rows: Vec<Vec<String>>,
    /// Source line of each row, for diagnostics.
    pub lines: Vec<u64>,
}

impl RawTable {
    pub fn n_cols(&self) -> usize {
        self.header
            .as_ref()
            .map(Vec::len)
            .or_else(|| self.rows.first().map(Vec::len))
            .unwrap_or(0)
    }

    fn column_names(&self) -> Vec<String> {
        match &self.header {
            Some(h) => h.clone(),
            None => (1..=self.n_cols()).map(|j| format!("V{j}")).collect(),
        }
    }
}

pub fn parse_csv<R: Read>(reader: R, options: &CsvOptions) -> Result<RawTable> {
    options.validate()?;
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(options.delimiter)
        .has_headers(false)
        .flexible(true)
        .trim(if options.trim {
            csv::Trim::All
        } else {
            csv::Trim::None
        })
        .from_reader(reader);

    let mut header = None;
    let mut rows = Vec::new();
    let mut lines = Vec::new();
    let mut width = None;
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line());
        let cells: Vec<String> = record.iter().map(str::to_string).collect();
        match width {
            None => width = Some(cells.len()),
            Some(w) if w != cells.len() => {
                return Err(Error::Parse {
                    line,
                    message: format!("expected {w} fields, found {}", cells.len()),
                })
            }
            _ => {}
        }
        if options.has_header && header.is_none() {
            header = Some(cells);
        } else {
            rows.push(cells);
            lines.push(line);
        }
    }
    Ok(RawTable {
        header,
        rows,
        lines,
    })
}

fn csv_error(err: csv::Error) -> Error {
    let line = err.position().map_or(0, |p| p.line());
    Error::Parse {
        line,
        message: err.to_string(),
    }
}

/// A column is quantitative iff every non-NA cell parses as a number.
pub fn infer_schema(raw: &RawTable, options: &CsvOptions) -> Result<Vec<ColumnSpec>> {
    let names = raw.column_names();
    let mut specs = Vec::with_capacity(names.len());
    for (j, name) in names.into_iter().enumerate() {
        let mut numeric = true;
        let mut any = false;
        for row in &raw.rows {
            let cell = row[j].as_str();
            if options.is_na(cell) {
                continue;
            }
            any = true;
            if cell.parse::<f64>().is_err() {
                numeric = false;
                break;
            }
        }
        if !any {
            return Err(Error::FullyMissing(name));
        }
        if numeric {
            specs.push(ColumnSpec::quantitative(name));
        } else {
            let mut levels: Vec<String> = Vec::new();
            for row in &raw.rows {
                let cell = &row[j];
                if !options.is_na(cell) && !levels.contains(cell) {
                    levels.push(cell.clone());
                }
            }
            specs.push(ColumnSpec::categorical(name, levels));
        }
    }
    Ok(specs)
}

/// Interpret raw cells under `specs`.
pub fn build_table(
    raw: &RawTable,
    specs: &[ColumnSpec],
    options: &CsvOptions,
) -> Result<MixedTable> {
    if specs.len() != raw.n_cols() {
        return Err(Error::Schema(format!(
            "schema has {} columns, data has {}",
            specs.len(),
            raw.n_cols()
        )));
    }
    if let Some(header) = &raw.header {
        for (spec, name) in specs.iter().zip(header) {
            if &spec.name != name {
                return Err(Error::Schema(format!(
                    "schema column `{}` does not match header `{name}`",
                    spec.name
                )));
            }
        }
    }
    let n = raw.rows.len();
    let mut columns = Vec::with_capacity(specs.len());
    for (j, spec) in specs.iter().enumerate() {
        spec.validate()?;
        let mut missing = Vec::with_capacity(n);
        let data = match spec.kind {
            ColumnKind::Quantitative => {
                let mut values = Vec::with_capacity(n);
                for (row, &line) in raw.rows.iter().zip(&raw.lines) {
                    let cell = row[j].as_str();
                    if options.is_na(cell) {
                        values.push(0.0);
                        missing.push(true);
                        continue;
                    }
                    let v: f64 = cell.parse().map_err(|_| Error::Parse {
                        line,
                        message: format!("`{cell}` is not a number (column `{}`)", spec.name),
                    })?;
                    if !v.is_finite() {
                        return Err(Error::Parse {
                            line,
                            message: format!("non-finite value `{cell}` in column `{}`", spec.name),
                        });
                    }
                    values.push(v);
                    missing.push(false);
                }
                ColumnData::Quantitative(values)
            }
            ColumnKind::Categorical => {
                let mut codes = Vec::with_capacity(n);
                for (row, &line) in raw.rows.iter().zip(&raw.lines) {
                    let cell = row[j].as_str();
                    if options.is_na(cell) {
                        codes.push(0);
                        missing.push(true);
                        continue;
                    }
                    let code = spec.level_index(cell).ok_or_else(|| Error::Parse {
                        line,
                        message: format!("`{cell}` is not a level of column `{}`", spec.name),
                    })?;
                    codes.push(code);
                    missing.push(false);
                }
                ColumnData::Categorical(codes)
            }
        };
        if n > 0 && missing.iter().all(|&m| m) {
            return Err(Error::FullyMissing(spec.name.clone()));
        }
        columns.push(Column::new(spec.clone(), data, missing)?);
    }
    MixedTable::new(n, columns)
}

pub fn read_csv(
    path: impl AsRef<Path>,
    options: &CsvOptions,
    schema: Option<&[ColumnSpec]>,
) -> Result<MixedTable> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let raw = parse_csv(file, options)?;
    let inferred;
    let specs = match schema {
        Some(s) => s,
        None => {
            inferred = infer_schema(&raw, options)?;
            &inferred
        }
    };
    build_table(&raw, specs, options)
}

/// Shortest decimal text that parses back to the same `f64`.
pub fn format_f64(v: f64) -> String {
    let s = format!("{v:?}");
    s.strip_suffix(".0").map(str::to_string).unwrap_or(s)
}

pub fn write_table<W: Write>(table: &MixedTable, writer: W, options: &CsvOptions) -> Result<()> {
    options.validate()?;
    let na = options.na_tokens[0].as_str();
    let mut wtr = csv::WriterBuilder::new()
        .delimiter(options.delimiter)
        .from_writer(writer);
    let to_err = |e: csv::Error| Error::invalid(format!("csv write failed: {e}"));
    if options.has_header {
        wtr.write_record(table.columns().iter().map(Column::name))
            .map_err(to_err)?;
    }
    let mut record = Vec::with_capacity(table.n_cols());
    for i in 0..table.n_rows() {
        record.clear();
        for col in table.columns() {
            let text = match col.get(i) {
                None => na.to_string(),
                Some(crate::Cell::Quantitative(v)) => format_f64(v),
                Some(crate::Cell::Categorical(c)) => col.spec().levels[c as usize].clone(),
            };
            record.push(text);
        }
        wtr.write_record(&record).map_err(to_err)?;
    }
    wtr.flush().map_err(|e| Error::io("<csv output>", e))?;
    Ok(())
}

pub fn write_csv(table: &MixedTable, path: impl AsRef<Path>, options: &CsvOptions) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_table(table, std::io::BufWriter::new(file), options).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}

/// Parse a schema sidecar: one `name,kind[,level...]` line per column.
pub fn parse_schema<R: Read>(reader: R) -> Result<Vec<ColumnSpec>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut specs = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() < 2 {
            return Err(Error::Parse {
                line,
                message: "expected `name,kind[,levels...]`".into(),
            });
        }
        let name = record[0].to_string();
        let spec = match &record[1] {
            "quant" => {
                if record.len() > 2 {
                    return Err(Error::Parse {
                        line,
                        message: format!("quantitative column `{name}` lists levels"),
                    });
                }
                ColumnSpec::quantitative(name)
            }
            "cat" => ColumnSpec::categorical(name, record.iter().skip(2)),
            other => {
                return Err(Error::Parse {
                    line,
                    message: format!("unknown column kind `{other}`"),
                })
            }
        };
        spec.validate()?;
        specs.push(spec);
    }
    Ok(specs)
}

pub fn read_schema(path: impl AsRef<Path>) -> Result<Vec<ColumnSpec>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_schema(file)
}

pub fn write_schema(specs: &[ColumnSpec], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut wtr = csv::WriterBuilder::new()
        .flexible(true)
        .from_writer(std::io::BufWriter::new(file));
    for spec in specs {
        let kind = match spec.kind {
            ColumnKind::Quantitative => "quant",
            ColumnKind::Categorical => "cat",
        };
        let mut record = vec![spec.name.as_str(), kind];
        record.extend(spec.levels.iter().map(String::as_str));
        wtr.write_record(&record)
            .map_err(|e| Error::invalid(format!("schema write failed: {e}")))?;
    }
    wtr.flush().map_err(|e| Error::io(path, e))
}

/// Write a mask as 0/1 cells under a header of column names.
pub fn write_mask(mask: &Mask, names: &[String], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if names.len() != mask.n_cols() {
        return Err(Error::mismatch(mask.n_cols(), names.len()));
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut wtr = csv::Writer::from_writer(std::io::BufWriter::new(file));
    let to_err = |e: csv::Error| Error::invalid(format!("mask write failed: {e}"));
    wtr.write_record(names).map_err(to_err)?;
    for i in 0..mask.n_rows() {
        wtr.write_record((0..mask.n_cols()).map(|j| if mask.get(i, j) { "1" } else { "0" }))
            .map_err(to_err)?;
    }
    wtr.flush().map_err(|e| Error::io(path, e))
}

/// Read a mask written by [`write_mask`]; returns the column names too.
pub fn read_mask(path: impl AsRef<Path>) -> Result<(Mask, Vec<String>)> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let options = CsvOptions {
        na_tokens: vec!["NA".into()],
        ..CsvOptions::default()
    };
    let raw = parse_csv(file, &options)?;
    let names = raw.column_names();
    let mut mask = Mask::new(raw.rows.len(), names.len());
    for (i, (row, &line)) in raw.rows.iter().zip(&raw.lines).enumerate() {
        for (j, cell) in row.iter().enumerate() {
            match cell.as_str() {
                "0" => {}
                "1" => mask.set(i, j, true),
                other => {
                    return Err(Error::Parse {
                        line,
                        message: format!("mask cell `{other}` is not 0 or 1"),
                    })
                }
            }
        }
    }
    Ok((mask, names))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmputationConfig {
    pub rate: f64,
    pub seed: u64,
}

impl AmputationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.rate) {
            return Err(Error::invalid(format!(
                "amputation rate {} is outside [0, 1)",
                self.rate
            )));
        }
        Ok(())
    }
}

/// Mask exactly `round(rate * n * p)` observed cells chosen uniformly at
/// random, never emptying a column. Returns the amputed table and the mask of
/// newly introduced holes.
pub fn ampute_mcar(table: &MixedTable, config: &AmputationConfig) -> Result<(MixedTable, Mask)> {
    config.validate()?;
    let n = table.n_rows();
    let p = table.n_cols();
    let target = (config.rate * (n * p) as f64).round() as usize;
    let mut introduced = Mask::new(n, p);
    if target == 0 {
        return Ok((table.clone(), introduced));
    }

    let mut observed: Vec<usize> = table
        .columns()
        .iter()
        .map(|c| n - c.missing_count())
        .collect();
    let capacity: usize = observed.iter().map(|&o| o.saturating_sub(1)).sum();
    if capacity < target {
        return Err(Error::invalid(format!(
            "cannot mask {target} cells without emptying a column (at most {capacity} available)"
        )));
    }

    let mut candidates: Vec<(usize, usize)> = (0..p)
        .flat_map(|j| (0..n).map(move |i| (i, j)))
        .filter(|&(i, j)| !table.is_missing(i, j))
        .collect();
    let mut rng = rng::rng_from_seed(config.seed);
    candidates.shuffle(&mut rng);

    let mut placed = 0;
    for (i, j) in candidates {
        if placed == target {
            break;
        }
        // A draw that would empty its column is rejected and the next one taken.
        if observed[j] <= 1 {
            continue;
        }
        introduced.set(i, j, true);
        observed[j] -= 1;
        placed += 1;
    }
    debug_assert_eq!(placed, target);
    Ok((table.with_extra_mask(&introduced)?, introduced))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data_model::Cell;
    use proptest::prelude::*;

    fn raw(text: &str, options: &CsvOptions) -> RawTable {
        parse_csv(text.as_bytes(), options).unwrap()
    }

    fn read_str(text: &str, options: &CsvOptions) -> Result<MixedTable> {
        let raw = parse_csv(text.as_bytes(), options)?;
        let specs = infer_schema(&raw, options)?;
        build_table(&raw, &specs, options)
    }

    #[test]
    fn infer_kinds() {
        let opts = CsvOptions {
            has_header: false,
            ..Default::default()
        };
        let specs = infer_schema(&raw("1.5,1\nNA,x\n2,2\n", &opts), &opts).unwrap();
        assert_eq!(specs[0].kind, ColumnKind::Quantitative);
        assert_eq!(specs[1].kind, ColumnKind::Categorical);
        assert_eq!(specs[1].levels, vec!["1", "x", "2"]);

        let err = infer_schema(&raw("NA,1\nNA,2\n", &opts), &opts).unwrap_err();
        assert!(matches!(err, Error::FullyMissing(_)));
    }

    #[test]
    fn na_tokens_drive_masking() {
        let opts = CsvOptions {
            has_header: false,
            ..Default::default()
        };
        let t = read_str("a,1\nb,NA\n", &opts).unwrap();
        assert_eq!((t.n_rows(), t.n_cols()), (2, 2));
        assert!(t.is_missing(1, 1));
        assert_eq!(t.mask().count(), 1);

        let opts = CsvOptions {
            has_header: false,
            na_tokens: vec!["?".into()],
            ..Default::default()
        };
        let t = read_str("a,1\nb,NA\n", &opts).unwrap();
        assert_eq!(t.mask().count(), 0);
        assert_eq!(t.column(1).kind(), ColumnKind::Categorical);
        assert_eq!(t.column(1).spec().levels, vec!["1", "NA"]);
    }

    #[test]
    fn ragged_rows_name_the_line() {
        let opts = CsvOptions::default();
        let err = read_str("a,b\n1,2\n3\n", &opts).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn non_finite_literals_rejected() {
        let opts = CsvOptions::default();
        assert!(read_str("a\n1\ninf\n", &opts).is_err());
        assert!(read_str("a\nNaN\n2\n", &opts).is_err());
    }

    #[test]
    fn explicit_schema_rejects_unknown_levels() {
        let opts = CsvOptions::default();
        let r = raw("c\nx\ny\n", &opts);
        let schema = vec![ColumnSpec::categorical("c", ["x"])];
        assert!(build_table(&r, &schema, &opts).is_err());
        let schema = vec![ColumnSpec::categorical("c", ["y", "x"])];
        let t = build_table(&r, &schema, &opts).unwrap();
        assert_eq!(t.get(0, 0), Some(Cell::Categorical(1)));
    }

    #[test]
    fn write_renders_na_and_shortest_decimals() {
        let t = MixedTable::from_columns(vec![
            Column::quantitative("x", vec![Some(0.1), None, Some(2.0)]).unwrap(),
            Column::categorical_from_labels("c", &[Some("a"), Some("b"), None]).unwrap(),
        ])
        .unwrap();
        let mut buf = Vec::new();
        write_table(&t, &mut buf, &CsvOptions::default()).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "x,c\n0.1,a\nNA,b\n2,NA\n");
        let back = read_str(&text, &CsvOptions::default()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn schema_sidecar_roundtrip() {
        let specs = vec![
            ColumnSpec::quantitative("x"),
            ColumnSpec::categorical("c", ["a", "b,c"]),
        ];
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("schema.csv");
        write_schema(&specs, &path).unwrap();
        assert_eq!(read_schema(&path).unwrap(), specs);
        assert!(parse_schema("x,real\n".as_bytes()).is_err());
    }

    #[test]
    fn mask_file_roundtrip() {
        let mut m = Mask::new(3, 2);
        m.set(0, 1, true);
        m.set(2, 0, true);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("holes.csv");
        write_mask(&m, &["a".into(), "b".into()], &path).unwrap();
        let (back, names) = read_mask(&path).unwrap();
        assert_eq!(back, m);
        assert_eq!(names, vec!["a", "b"]);
    }

    fn full_table(n: usize, p: usize) -> MixedTable {
        let cols = (0..p)
            .map(|j| {
                Column::quantitative(format!("c{j}"), (0..n).map(|i| Some((i * p + j) as f64)).collect())
                    .unwrap()
            })
            .collect();
        MixedTable::new(n, cols).unwrap()
    }

    #[test]
    fn amputation_counts_and_determinism() {
        let t = full_table(100, 10);
        let (same, none) = ampute_mcar(&t, &AmputationConfig { rate: 0.0, seed: 1 }).unwrap();
        assert_eq!(same, t);
        assert!(none.is_empty());

        let cfg = AmputationConfig { rate: 0.1, seed: 42 };
        let (a, mask_a) = ampute_mcar(&t, &cfg).unwrap();
        let (_, mask_b) = ampute_mcar(&t, &cfg).unwrap();
        assert_eq!(mask_a.count(), 100);
        assert_eq!(a.mask(), mask_a);
        assert_eq!(mask_a, mask_b);
        let (_, mask_c) = ampute_mcar(&t, &AmputationConfig { rate: 0.1, seed: 43 }).unwrap();
        assert_ne!(mask_a, mask_c);
    }

    #[test]
    fn amputation_never_empties_a_column() {
        let t = full_table(2, 3);
        // round(0.5 * 6) = 3 holes, each column keeps one cell.
        let (a, mask) = ampute_mcar(&t, &AmputationConfig { rate: 0.5, seed: 3 }).unwrap();
        assert_eq!(mask.count(), 3);
        assert!(a.columns().iter().all(|c| c.missing_count() == 1));
        assert!(ampute_mcar(&t, &AmputationConfig { rate: 0.9, seed: 3 }).is_err());
        assert!(ampute_mcar(&t, &AmputationConfig { rate: 1.0, seed: 3 }).is_err());
    }

    fn arb_table() -> impl Strategy<Value = MixedTable> {
        (1usize..6, 1usize..5).prop_flat_map(|(n, p)| {
            proptest::collection::vec(
                (
                    any::<bool>(),
                    proptest::collection::vec(
                        (any::<bool>(), any::<f64>().prop_filter("finite", |v| v.is_finite()), 0u32..3),
                        n,
                    ),
                ),
                p,
            )
            .prop_map(move |cols| {
                let columns = cols
                    .into_iter()
                    .enumerate()
                    .map(|(j, (is_q, cells))| {
                        // keep the first cell observed so no column is fully missing
                        if is_q {
                            let v = cells
                                .iter()
                                .enumerate()
                                .map(|(i, &(m, x, _))| (i == 0 || !m).then_some(x))
                                .collect();
                            Column::quantitative(format!("q{j}"), v).unwrap()
                        } else {
                            let labels = ["lvl a", "b\"q", "c,d"];
                            let v: Vec<Option<&str>> = cells
                                .iter()
                                .enumerate()
                                .map(|(i, &(m, _, k))| (i == 0 || !m).then_some(labels[k as usize]))
                                .collect();
                            Column::categorical_from_labels(format!("c{j}"), &v).unwrap()
                        }
                    })
                    .collect();
                MixedTable::new(n, columns).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn write_read_roundtrip(t in arb_table()) {
            let mut buf = Vec::new();
            let opts = CsvOptions::default();
            write_table(&t, &mut buf, &opts).unwrap();
            let raw = parse_csv(buf.as_slice(), &opts).unwrap();
            let back = build_table(&raw, &t.specs(), &opts).unwrap();
            prop_assert_eq!(back, t);
        }

        #[test]
        fn inferred_kinds_ignore_row_order(t in arb_table(), seed in any::<u64>()) {
            let opts = CsvOptions::default();
            let mut buf = Vec::new();
            write_table(&t, &mut buf, &opts).unwrap();
            let mut raw = parse_csv(buf.as_slice(), &opts).unwrap();
            let kinds = |r: &RawTable| infer_schema(r, &opts).map(|s| s.iter().map(|c| c.kind).collect::<Vec<_>>());
            let before = kinds(&raw);
            raw.rows.shuffle(&mut rng::rng_from_seed(seed));
            prop_assert_eq!(before.ok(), kinds(&raw).ok());
        }

        #[test]
        fn amputation_invariants(rate in 0.0f64..0.6, seed in any::<u64>()) {
            let t = full_table(8, 4);
            let (a, intro) = ampute_mcar(&t, &AmputationConfig { rate, seed }).unwrap();
            prop_assert_eq!(intro.count(), (rate * 32.0).round() as usize);
            prop_assert!(a.columns().iter().all(|c| c.missing_count() < 8));
        }
    }
}
