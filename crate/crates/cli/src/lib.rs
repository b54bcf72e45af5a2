//! The `mixreduce` command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 I/O error. Every
//! subcommand writes `report.json` into its output directory.

pub mod kde;
pub mod model_file;
pub mod plot;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use mixreduce_core::data_model::Mask;
use mixreduce_core::impute::{self, evaluate_imputation};
use mixreduce_core::ingest::{self, AmputationConfig, CsvOptions};
use mixreduce_core::pca;
use mixreduce_core::{
    ColumnKind, ColumnSpec, Error, ForestParams, ImputeParams, Matrix, MixedTable, Result,
    WeightingScheme,
};

use plot::StripSeries;

/// Environment variable consulted when `--threads` is absent.
pub const THREADS_ENV: &str = "MIXREDUCE_THREADS";
/// Default number of variables in the strip plot.
pub const DEFAULT_PLOT_VARIABLES: usize = 8;

#[derive(Parser, Debug)]
#[command(name = "mixreduce", version, about = "Impute, encode and reduce mixed tabular data")]
struct Cli {
    /// Worker threads (default: MIXREDUCE_THREADS, else all cores).
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Remove a share of cells completely at random.
    Ampute(AmputeArgs),
    /// Fill missing cells with random-forest iterative imputation.
    Impute(ImputeArgs),
    /// Impute, encode, run PCA and keep components up to a variance threshold.
    Reduce(ReduceArgs),
    /// NRMSE and PFC of an imputed table against the truth.
    Evaluate(EvaluateArgs),
    /// Strip plot of observed and imputed values.
    PlotStrip(PlotStripArgs),
    /// Density plot of observed and imputed values of one variable.
    PlotDensity(PlotDensityArgs),
}

#[derive(Args, Debug)]
struct InputArgs {
    /// Input CSV with a header row.
    #[arg(long)]
    input: PathBuf,
    /// Column schema sidecar (`name,kind[,levels]`); inferred when absent.
    #[arg(long)]
    schema: Option<PathBuf>,
    /// Cell text read as missing; repeatable (default: NA and the empty cell).
    #[arg(long = "na-token")]
    na_tokens: Vec<String>,
}

#[derive(Args, Debug)]
struct OutputArgs {
    #[arg(long, default_value = ".")]
    output_dir: PathBuf,
}

#[derive(Args, Debug)]
struct ForestArgs {
    #[arg(long, default_value_t = 100, value_parser = positive)]
    trees: usize,
    /// Features tried per split (default: floor(sqrt(features))).
    #[arg(long, value_parser = positive)]
    mtry: Option<usize>,
    #[arg(long, default_value_t = 10, value_parser = positive)]
    max_iter: usize,
}

#[derive(Args, Debug)]
struct AmputeArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    output: OutputArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.1, value_parser = rate)]
    rate: f64,
}

#[derive(Args, Debug)]
struct ImputeArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    output: OutputArgs,
    #[command(flatten)]
    forest: ForestArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Ampute this share of cells before imputing.
    #[arg(long, value_parser = rate)]
    rate: Option<f64>,
    /// Strip-plot variable; repeatable (default: most imputed quantitative columns).
    #[arg(long = "plot-var")]
    plot_vars: Vec<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Weighting {
    Famd,
    None,
}

impl From<Weighting> for WeightingScheme {
    fn from(w: Weighting) -> Self {
        match w {
            Weighting::Famd => WeightingScheme::Famd,
            Weighting::None => WeightingScheme::None,
        }
    }
}

#[derive(Args, Debug)]
struct ReduceArgs {
    #[command(flatten)]
    impute: ImputeArgs,
    #[arg(long, default_value_t = 0.9, value_parser = threshold)]
    threshold: f64,
    #[arg(long, value_enum, default_value_t = Weighting::Famd)]
    weighting: Weighting,
    /// Skip rounding the encoded matrix to three decimals.
    #[arg(long)]
    no_round: bool,
}

#[derive(Args, Debug)]
struct EvaluateArgs {
    #[arg(long)]
    truth: PathBuf,
    #[arg(long)]
    imputed: PathBuf,
    /// Mask of evaluated cells (0/1 CSV).
    #[arg(long)]
    holes: PathBuf,
    #[arg(long)]
    schema: Option<PathBuf>,
    #[arg(long = "na-token")]
    na_tokens: Vec<String>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct PlotStripArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Mask of imputed cells (0/1 CSV).
    #[arg(long)]
    holes: PathBuf,
    #[arg(long = "var")]
    vars: Vec<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct PlotDensityArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    holes: PathBuf,
    /// Variable to plot (default: the quantitative column with most imputed cells).
    #[arg(long = "var")]
    var: Option<String>,
    #[command(flatten)]
    output: OutputArgs,
}

fn positive(s: &str) -> std::result::Result<usize, String> {
    match s.parse::<usize>() {
        Ok(v) if v >= 1 => Ok(v),
        Ok(_) => Err("must be at least 1".into()),
        Err(e) => Err(e.to_string()),
    }
}

fn rate(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if (0.0..1.0).contains(&v) => Ok(v),
        Ok(_) => Err("must lie in [0, 1)".into()),
        Err(e) => Err(e.to_string()),
    }
}

fn threshold(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v <= 1.0 => Ok(v),
        Ok(_) => Err("must lie in (0, 1]".into()),
        Err(e) => Err(e.to_string()),
    }
}

pub fn exit_code(err: &Error) -> i32 {
    if err.is_io() {
        3
    } else {
        2
    }
}

/// Parse `argv` (program name first), run the subcommand and return the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let threads = match resolve_threads(cli.threads) {
        Ok(t) => t,
        Err(msg) => {
            eprintln!("error: {msg}");
            return 1;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker threads: {e}");
            return 3;
        }
    };
    match pool.install(|| dispatch(cli.command)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn resolve_threads(flag: Option<u16>) -> std::result::Result<usize, String> {
    if let Some(t) = flag {
        return Ok(t as usize);
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(t) if t >= 1 => Ok(t),
            _ => Err(format!("{THREADS_ENV}=`{v}` is not a positive integer")),
        },
        Err(_) => Ok(0),
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Ampute(a) => cmd_ampute(&a),
        Command::Impute(a) => cmd_impute(&a),
        Command::Reduce(a) => cmd_reduce(&a),
        Command::Evaluate(a) => cmd_evaluate(&a),
        Command::PlotStrip(a) => cmd_plot_strip(&a),
        Command::PlotDensity(a) => cmd_plot_density(&a),
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_options(na_tokens: &[String]) -> CsvOptions {
    let mut options = CsvOptions::default();
    if !na_tokens.is_empty() {
        options.na_tokens = na_tokens.to_vec();
    }
    options
}

fn require_file(path: &Path) -> Result<()> {
    fs::metadata(path).map(|_| ()).map_err(io_err(path))
}

fn prepare_output(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(io_err(dir))
}

fn load(input: &InputArgs) -> Result<(MixedTable, CsvOptions)> {
    require_file(&input.input)?;
    let schema = match &input.schema {
        Some(p) => Some(ingest::read_schema(p)?),
        None => None,
    };
    let options = csv_options(&input.na_tokens);
    let table = ingest::read_csv(&input.input, &options, schema.as_deref())?;
    Ok((table, options))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(io_err(path))
}

fn write_report(dir: &Path, report: Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(&report)
        .map_err(|e| Error::InvalidArgument(format!("report serialization failed: {e}")))?;
    text.push('\n');
    write_text(&dir.join("report.json"), &text)
}

fn names(table: &MixedTable) -> Vec<String> {
    table.columns().iter().map(|c| c.name().to_string()).collect()
}

fn scores_csv(scores: &Matrix) -> String {
    let mut out = (1..=scores.ncols())
        .map(|j| format!("PC{j}"))
        .collect::<Vec<_>>()
        .join(",");
    out.push('\n');
    for i in 0..scores.nrows() {
        let row: Vec<String> = (0..scores.ncols())
            .map(|j| ingest::format_f64(scores[(i, j)]))
            .collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn impute_params(forest: &ForestArgs, seed: u64) -> ImputeParams {
    ImputeParams {
        forest: ForestParams {
            n_trees: forest.trees,
            mtry: forest.mtry,
            seed,
            ..ForestParams::default()
        },
        max_iterations: forest.max_iter,
        seed,
    }
}

/// Quantitative columns with the most masked cells, in decreasing order;
/// ties keep column order and columns without masked cells are skipped.
pub fn default_plot_columns(table: &MixedTable, mask: &Mask, limit: usize) -> Vec<usize> {
    let mut candidates: Vec<(usize, usize)> = (0..table.n_cols())
        .filter(|&j| table.column(j).kind() == ColumnKind::Quantitative)
        .map(|j| (j, mask.column(j).iter().filter(|&&m| m).count()))
        .filter(|&(_, c)| c > 0)
        .collect();
    candidates.sort_by_key(|&(j, c)| (std::cmp::Reverse(c), j));
    candidates.into_iter().take(limit).map(|(j, _)| j).collect()
}

fn resolve_columns(table: &MixedTable, requested: &[String]) -> Result<Vec<usize>> {
    requested
        .iter()
        .map(|name| {
            let j = table
                .columns()
                .iter()
                .position(|c| c.name() == name)
                .ok_or_else(|| Error::Schema(format!("no column named `{name}`")))?;
            if table.column(j).kind() != ColumnKind::Quantitative {
                return Err(Error::Schema(format!("column `{name}` is not quantitative")));
            }
            Ok(j)
        })
        .collect()
}

/// Observed and masked values of the given complete quantitative columns.
pub fn strip_series(table: &MixedTable, mask: &Mask, columns: &[usize]) -> Result<Vec<StripSeries>> {
    columns
        .iter()
        .map(|&j| {
            let col = table.column(j);
            let values = col
                .quantitative_values()
                .ok_or_else(|| Error::Schema(format!("column `{}` is not quantitative", col.name())))?;
            if col.missing_count() > 0 {
                return Err(Error::InvalidArgument(format!(
                    "column `{}` still has missing cells",
                    col.name()
                )));
            }
            let holes = mask.column(j);
            let pick = |want: bool| -> Vec<f64> {
                values
                    .iter()
                    .zip(holes)
                    .filter(|(_, &h)| h == want)
                    .map(|(&v, _)| v)
                    .collect()
            };
            Ok(StripSeries {
                name: col.name().to_string(),
                observed: pick(false),
                imputed: pick(true),
            })
        })
        .collect()
}

/// Plots written next to imputation output; returns the file names written
/// and any plot that had to be skipped.
fn write_plots(
    dir: &Path,
    imputed: &MixedTable,
    mask: &Mask,
    requested: &[String],
    seed: u64,
) -> Result<(Vec<String>, Vec<String>)> {
    let columns = if requested.is_empty() {
        default_plot_columns(imputed, mask, DEFAULT_PLOT_VARIABLES)
    } else {
        resolve_columns(imputed, requested)?
    };
    let mut written = Vec::new();
    let mut skipped = Vec::new();
    if columns.is_empty() {
        return Ok((written, skipped));
    }
    let series = strip_series(imputed, mask, &columns)?;
    plot::write_svg(&plot::render_stripplot(&series, seed)?, &dir.join("stripplot.svg"))?;
    written.push("stripplot.svg".to_string());
    let first = &series[0];
    match plot::render_density(&first.name, &first.observed, &first.imputed) {
        Ok(svg) => {
            plot::write_svg(&svg, &dir.join("density.svg"))?;
            written.push("density.svg".to_string());
        }
        Err(e) => {
            log::warn!("density plot skipped: {e}");
            skipped.push(format!("density.svg: {e}"));
        }
    }
    Ok((written, skipped))
}

fn maybe_ampute(table: MixedTable, rate: Option<f64>, seed: u64) -> Result<(MixedTable, Option<Mask>)> {
    match rate {
        Some(rate) => {
            let (amputed, holes) = ingest::ampute_mcar(
                &table,
                &AmputationConfig {
                    rate,
                    seed: mixreduce_core::rng::derive_seed(seed, &[0xA]),
                },
            )?;
            Ok((amputed, Some(holes)))
        }
        None => Ok((table, None)),
    }
}

fn object(value: Value) -> Map<String, Value> {
    match value {
        Value::Object(m) => m,
        other => {
            let mut m = Map::new();
            m.insert("value".into(), other);
            m
        }
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v)
        .map_err(|e| Error::InvalidArgument(format!("report serialization failed: {e}")))
}

fn cmd_ampute(a: &AmputeArgs) -> Result<()> {
    let start = Instant::now();
    let (table, options) = load(&a.input)?;
    prepare_output(&a.output.output_dir)?;
    let dir = &a.output.output_dir;
    let (amputed, holes) = ingest::ampute_mcar(&table, &AmputationConfig { rate: a.rate, seed: a.seed })?;
    ingest::write_csv(&amputed, dir.join("amputed.csv"), &options)?;
    ingest::write_mask(&holes, &names(&table), dir.join("holes.csv"))?;
    ingest::write_schema(&table.specs(), dir.join("schema.csv"))?;
    write_report(
        dir,
        json!({
            "command": "ampute",
            "seed": a.seed,
            "rate": a.rate,
            "rows": table.n_rows(),
            "columns": table.n_cols(),
            "holes": holes.count(),
            "outputs": ["amputed.csv", "holes.csv", "schema.csv"],
            "elapsed_seconds": start.elapsed().as_secs_f64(),
        }),
    )
}

/// Shared front half of `impute` and `reduce`: load, optionally ampute,
/// and record the mask of cells that imputation will fill.
fn prepare_imputation(a: &ImputeArgs) -> Result<(MixedTable, CsvOptions, Option<Mask>, Mask)> {
    let (table, options) = load(&a.input)?;
    prepare_output(&a.output.output_dir)?;
    let (table, amputation) = maybe_ampute(table, a.rate, a.seed)?;
    let filled = table.mask();
    Ok((table, options, amputation, filled))
}

fn write_imputation_outputs(
    a: &ImputeArgs,
    imputed: &MixedTable,
    options: &CsvOptions,
    filled: &Mask,
    outputs: &mut Vec<String>,
) -> Result<Vec<String>> {
    let dir = &a.output.output_dir;
    ingest::write_csv(imputed, dir.join("imputed.csv"), options)?;
    ingest::write_schema(&imputed.specs(), dir.join("schema.csv"))?;
    outputs.extend(["imputed.csv".to_string(), "schema.csv".to_string()]);
    if !filled.is_empty() {
        ingest::write_mask(filled, &names(imputed), dir.join("holes.csv"))?;
        outputs.push("holes.csv".into());
    }
    let (plots, skipped) = write_plots(dir, imputed, filled, &a.plot_vars, a.seed)?;
    outputs.extend(plots);
    Ok(skipped)
}

fn cmd_impute(a: &ImputeArgs) -> Result<()> {
    let start = Instant::now();
    let (table, options, _, filled) = prepare_imputation(a)?;
    let result = impute::missforest_impute(&table, &impute_params(&a.forest, a.seed))?;
    let mut outputs = Vec::new();
    let skipped = write_imputation_outputs(a, &result.imputed, &options, &filled, &mut outputs)?;
    write_report(
        &a.output.output_dir,
        json!({
            "command": "impute",
            "seed": a.seed,
            "rate": a.rate,
            "rows": table.n_rows(),
            "columns": table.n_cols(),
            "imputed_cells": filled.count(),
            "imputation": to_value(&result.summary())?,
            "outputs": outputs,
            "skipped_plots": skipped,
            "elapsed_seconds": start.elapsed().as_secs_f64(),
        }),
    )
}

fn cmd_reduce(a: &ReduceArgs) -> Result<()> {
    let ia = &a.impute;
    let (table, options, _, filled) = prepare_imputation(ia)?;
    let reduction = pca::reduce(
        &table,
        &impute_params(&ia.forest, ia.seed),
        a.weighting.into(),
        a.threshold,
        !a.no_round,
    )?;
    let dir = &ia.output.output_dir;
    write_text(&dir.join("scores.csv"), &scores_csv(&reduction.scores))?;
    let feature_names: Vec<String> = reduction
        .provenance
        .iter()
        .map(|p| match &p.category {
            Some(c) => format!("{}={}", p.source, c),
            None => p.source.clone(),
        })
        .collect();
    model_file::write_model(&reduction.model, &feature_names, &dir.join("model.txt"))?;
    let mut outputs = vec!["scores.csv".to_string(), "model.txt".to_string()];
    let skipped =
        write_imputation_outputs(ia, &reduction.imputation.imputed, &options, &filled, &mut outputs)?;
    outputs.push("report.json".into());

    let mut report = object(to_value(&reduction.report)?);
    report.insert("command".into(), json!("reduce"));
    report.insert("seed".into(), json!(ia.seed));
    report.insert("rate".into(), json!(ia.rate));
    report.insert("imputed_cells".into(), json!(filled.count()));
    report.insert("outputs".into(), json!(outputs));
    report.insert("skipped_plots".into(), json!(skipped));
    write_report(dir, Value::Object(report))
}

fn read_holes(path: &Path, table: &MixedTable) -> Result<Mask> {
    require_file(path)?;
    let (mask, mask_names) = ingest::read_mask(path)?;
    if mask_names != names(table) || mask.n_rows() != table.n_rows() {
        return Err(Error::Schema(format!(
            "mask `{}` does not match the table's columns and rows",
            path.display()
        )));
    }
    Ok(mask)
}

fn cmd_evaluate(a: &EvaluateArgs) -> Result<()> {
    require_file(&a.truth)?;
    require_file(&a.imputed)?;
    require_file(&a.holes)?;
    prepare_output(&a.output.output_dir)?;
    let options = csv_options(&a.na_tokens);
    let schema: Vec<ColumnSpec> = match &a.schema {
        Some(p) => ingest::read_schema(p)?,
        None => {
            let raw = ingest::parse_csv(fs::File::open(&a.truth).map_err(io_err(&a.truth))?, &options)?;
            ingest::infer_schema(&raw, &options)?
        }
    };
    let truth = ingest::read_csv(&a.truth, &options, Some(&schema))?;
    let imputed = ingest::read_csv(&a.imputed, &options, Some(&schema))?;
    let holes = read_holes(&a.holes, &truth)?;
    let errors = evaluate_imputation(&truth, &imputed, &holes)?;
    let metric = |v: Option<f64>| v.map_or(json!("not applicable"), |x| json!(x));
    write_report(
        &a.output.output_dir,
        json!({
            "command": "evaluate",
            "nrmse": metric(errors.nrmse),
            "pfc": metric(errors.pfc),
            "quantitative_holes": errors.quantitative_holes,
            "categorical_holes": errors.categorical_holes,
        }),
    )
}

fn cmd_plot_strip(a: &PlotStripArgs) -> Result<()> {
    let (table, _) = load(&a.input)?;
    let holes = read_holes(&a.holes, &table)?;
    prepare_output(&a.output.output_dir)?;
    let columns = if a.vars.is_empty() {
        default_plot_columns(&table, &holes, DEFAULT_PLOT_VARIABLES)
    } else {
        resolve_columns(&table, &a.vars)?
    };
    if columns.is_empty() {
        return Err(Error::InvalidArgument(
            "no quantitative column has masked cells; name variables with --var".into(),
        ));
    }
    let series = strip_series(&table, &holes, &columns)?;
    plot::write_svg(
        &plot::render_stripplot(&series, a.seed)?,
        &a.output.output_dir.join("stripplot.svg"),
    )?;
    write_report(
        &a.output.output_dir,
        json!({
            "command": "plot-strip",
            "seed": a.seed,
            "variables": series.iter().map(|s| s.name.clone()).collect::<Vec<_>>(),
            "observed_points": series.iter().map(|s| s.observed.len()).sum::<usize>(),
            "imputed_points": series.iter().map(|s| s.imputed.len()).sum::<usize>(),
            "outputs": ["stripplot.svg"],
        }),
    )
}

fn cmd_plot_density(a: &PlotDensityArgs) -> Result<()> {
    let (table, _) = load(&a.input)?;
    let holes = read_holes(&a.holes, &table)?;
    prepare_output(&a.output.output_dir)?;
    let column = match &a.var {
        Some(name) => resolve_columns(&table, std::slice::from_ref(name))?[0],
        None => *default_plot_columns(&table, &holes, 1)
            .first()
            .ok_or_else(|| Error::InvalidArgument("no quantitative column has masked cells".into()))?,
    };
    let series = strip_series(&table, &holes, &[column])?.remove(0);
    let (observed, imputed) = plot::density_curves(&series.observed, &series.imputed)?;
    plot::write_svg(
        &plot::render_density(&series.name, &series.observed, &series.imputed)?,
        &a.output.output_dir.join("density.svg"),
    )?;
    write_report(
        &a.output.output_dir,
        json!({
            "command": "plot-density",
            "variable": series.name,
            "observed_bandwidth": observed.bandwidth,
            "imputed_bandwidth": imputed.bandwidth,
            "outputs": ["density.svg"],
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use mixreduce_core::data_model::Column;

    #[test]
    fn range_parsers() {
        assert!(rate("0.1").is_ok());
        assert!(rate("1").is_err());
        assert!(threshold("1").is_ok());
        assert!(threshold("0").is_err());
        assert!(positive("0").is_err());
    }

    #[test]
    fn plot_columns_by_imputed_count() {
        let table = MixedTable::from_columns(vec![
            Column::quantitative("a", vec![Some(1.0), Some(2.0), Some(3.0)]).unwrap(),
            Column::categorical_from_labels("c", &[Some("x"), Some("y"), Some("x")]).unwrap(),
            Column::quantitative("b", vec![Some(1.0), Some(2.0), Some(3.0)]).unwrap(),
            Column::quantitative("d", vec![Some(1.0), Some(2.0), Some(3.0)]).unwrap(),
        ])
        .unwrap();
        let mut mask = Mask::new(3, 4);
        mask.set(0, 0, true);
        mask.set(0, 1, true);
        mask.set(1, 1, true);
        mask.set(0, 2, true);
        mask.set(1, 2, true);
        assert_eq!(default_plot_columns(&table, &mask, 8), vec![2, 0]);
        assert_eq!(default_plot_columns(&table, &mask, 1), vec![2]);
        let s = strip_series(&table, &mask, &[2]).unwrap();
        assert_eq!(s[0].observed, vec![3.0]);
        assert_eq!(s[0].imputed, vec![1.0, 2.0]);
    }

    #[test]
    fn scores_header_and_rows() {
        let m = Matrix::from_row_slice(2, 2, &[1.0, -0.5, 2.0, 0.25]);
        assert_eq!(scores_csv(&m), "PC1,PC2\n1,-0.5\n2,0.25\n");
    }
}
