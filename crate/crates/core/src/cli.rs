//! Command-line front end.
//!
//! Puzzle inputs are either a literal puzzle string, a path to a file with
//! one puzzle per line (blank lines and `#` comments skipped), or `-` for
//! standard input. Machine output goes to stdout in input order; progress
//! and diagnostics go to stderr.
//!
//! Exit codes: 0 success, 1 domain failure, 2 usage or parse error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::baselines::{AnnealParams, DEFAULT_ANNEAL_RUNS};
use crate::board::{parse_grid, Grid, Order, SudokuGraph};
use crate::evaluation::dataset::{
    aggregate_times, apply_time_target, load_dataset, load_solutions, TimeTarget,
};
use crate::evaluation::{
    drift_correlation, evaluate_metrics, filter_simple, order_correlation, rate_puzzle, LinearFit,
    MetricConfig, MetricId,
};
use crate::human_model::{mean_fill_order, DEFAULT_K_DEP, DEFAULT_RUNS};
use crate::relaxation::{
    fit_exponential, order_from_fixedness, relaxation_curve, relaxation_summary, write_curve_csv,
    DEFAULT_K_RELAX, DEFAULT_SAMPLES,
};
use crate::rng::derive_seed;
use crate::solver::{count_solutions, generate_puzzle, solve, DEFAULT_CAP};

#[derive(Parser, Debug)]
#[command(
    name = "sudoku-rating",
    version,
    about = "Sudoku solving and human-difficulty rating"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalOpts {
    /// Master seed; every random choice derives from it.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args, Debug, Clone)]
pub struct ModelOpts {
    /// SiSuS runs per puzzle.
    #[arg(long, default_value_t = DEFAULT_RUNS)]
    pub runs: usize,
    /// Steps averaged by the dependency metric.
    #[arg(long, default_value_t = DEFAULT_K_DEP)]
    pub k_dep: usize,
    /// Edges removed per relaxation sample.
    #[arg(long, default_value_t = DEFAULT_K_RELAX)]
    pub k_relax: usize,
    /// Relaxation samples per puzzle.
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    pub samples: usize,
    /// Solution enumeration cap per relaxed instance.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    pub cap: u64,
    /// Simulated annealing runs per puzzle.
    #[arg(long, default_value_t = DEFAULT_ANNEAL_RUNS)]
    pub anneal_runs: usize,
}

impl ModelOpts {
    fn config(&self, seed: u64) -> MetricConfig {
        MetricConfig {
            seed,
            runs: self.runs,
            k_dep: self.k_dep,
            k_relax: self.k_relax,
            samples: self.samples,
            cap: self.cap,
            anneal: AnnealParams::default(),
            anneal_runs: self.anneal_runs,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve puzzles and report search statistics.
    Solve {
        input: String,
        /// Fail unless each puzzle has exactly one solution.
        #[arg(long)]
        require_unique: bool,
    },
    /// Compute difficulty metrics for each puzzle.
    Rate {
        input: String,
        /// Comma-separated metric ids: givens, backtracking, annealing,
        /// solutions, fixedness, dependency, refutation-sum, rd.
        #[arg(long, value_delimiter = ',', value_parser = parse_rate_metric,
              default_value = "refutation-sum,dependency")]
        metrics: Vec<RateMetric>,
        /// JSON with `weights` and `intercept` for the rd metric, such as
        /// the `combined` object of an evaluate report.
        #[arg(long)]
        weights: Option<PathBuf>,
        #[command(flatten)]
        model: ModelOpts,
    },
    /// Relaxation curve (extra solutions and fixed cells against k).
    Relax {
        input: String,
        /// Comma-separated edge-removal counts.
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "0,6,12,18,24,30,36,42,48"
        )]
        k: Vec<usize>,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
        /// Also fit mean extra solutions to c·e^(rate·k) over rows with a
        /// positive mean.
        #[arg(long)]
        fit: bool,
    },
    /// Predicted per-cell fill order from the model and from fixedness.
    Order {
        input: String,
        #[arg(long, default_value_t = DEFAULT_RUNS)]
        runs: usize,
        #[arg(long, default_value_t = DEFAULT_K_RELAX)]
        k_relax: usize,
        #[arg(long, default_value_t = crate::relaxation::DEFAULT_FIXEDNESS_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: u64,
    },
    /// Generate well-posed puzzles.
    Generate {
        #[arg(long, default_value_t = 10)]
        count: usize,
        /// Box size: 2 for 4×4, 3 for 9×9.
        #[arg(long, default_value_t = 3)]
        order: u8,
        /// Stop removing givens at this count.
        #[arg(long, default_value_t = 0)]
        givens: usize,
    },
    /// Correlate metrics with human solving times from a dataset CSV.
    Evaluate {
        dataset: PathBuf,
        #[arg(long, value_delimiter = ',', value_parser = parse_metric_id,
              default_value = "givens,backtracking,refutation-sum,dependency")]
        metrics: Vec<MetricId>,
        #[arg(long, default_value_t = 0)]
        split_seed: u64,
        /// Also report the day-index vs time correlation.
        #[arg(long)]
        drift: bool,
        /// Keep only puzzles solvable with the two single techniques.
        #[arg(long)]
        simple_only: bool,
        /// Per-solution CSV (id,user,time_s) for median or normalized times.
        #[arg(long)]
        solutions: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = TimeTarget::Mean)]
        time: TimeTarget,
        #[command(flatten)]
        model: ModelOpts,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum RateMetric {
    Metric(MetricId),
    Rd,
}

impl RateMetric {
    fn name(self) -> &'static str {
        match self {
            RateMetric::Metric(m) => m.name(),
            RateMetric::Rd => "rd",
        }
    }
}

fn parse_metric_id(s: &str) -> Result<MetricId, String> {
    s.parse().map_err(|e: crate::Error| e.to_string())
}

fn parse_rate_metric(s: &str) -> Result<RateMetric, String> {
    if s.trim().eq_ignore_ascii_case("rd") {
        Ok(RateMetric::Rd)
    } else {
        parse_metric_id(s).map(RateMetric::Metric)
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Domain(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Domain(_) => 1,
        }
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn domain(e: impl std::fmt::Display) -> Failure {
    Failure::Domain(e.to_string())
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn io_fail(e: io::Error) -> Failure {
    Failure::Domain(format!("write failed: {e}"))
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render().ansi());
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.global.threads)
        .build()
    {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: cannot start worker pool: {e}");
            return 1;
        }
    };
    match pool.install(|| dispatch(&cli, out, err)) {
        Ok(()) => 0,
        Err(f) => {
            let (Failure::Usage(m) | Failure::Domain(m)) = &f;
            let _ = writeln!(err, "error: {m}");
            f.code()
        }
    }
}

fn dispatch(cli: &Cli, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> CliResult {
    let g = &cli.global;
    match &cli.command {
        Command::Solve {
            input,
            require_unique,
        } => cmd_solve(
            input,
            *require_unique,
            g.format.unwrap_or(Format::Text),
            out,
            err,
        ),
        Command::Rate {
            input,
            metrics,
            weights,
            model,
        } => cmd_rate(
            input,
            metrics,
            weights.as_deref(),
            &model.config(g.seed),
            g.format.unwrap_or(Format::Csv),
            out,
            err,
        ),
        Command::Relax {
            input,
            k,
            samples,
            cap,
            fit,
        } => cmd_relax(
            input,
            k,
            *samples,
            *cap,
            *fit,
            g.seed,
            g.format.unwrap_or(Format::Csv),
            out,
        ),
        Command::Order {
            input,
            runs,
            k_relax,
            samples,
            cap,
        } => cmd_order(
            input,
            *runs,
            *k_relax,
            *samples,
            *cap,
            g.seed,
            g.format.unwrap_or(Format::Csv),
            out,
        ),
        Command::Generate {
            count,
            order,
            givens,
        } => cmd_generate(
            *count,
            *order,
            *givens,
            g.seed,
            g.format.unwrap_or(Format::Text),
            out,
        ),
        Command::Evaluate {
            dataset,
            metrics,
            split_seed,
            drift,
            simple_only,
            solutions,
            time,
            model,
        } => cmd_evaluate(
            &EvaluateArgs {
                dataset,
                metrics,
                split_seed: *split_seed,
                drift: *drift,
                simple_only: *simple_only,
                solutions: solutions.as_deref(),
                time: *time,
                config: model.config(g.seed),
            },
            g.format.unwrap_or(Format::Json),
            out,
            err,
        ),
    }
}

/// A puzzle with its 1-based source line.
struct Input {
    line: usize,
    grid: Grid,
}

fn read_source(input: &str) -> CliResult<String> {
    if input == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(usage)?;
        return Ok(s);
    }
    let path = Path::new(input);
    if path.exists() {
        return std::fs::read_to_string(path).map_err(|e| usage(format!("{input}: {e}")));
    }
    let trimmed = input.trim();
    if matches!(trimmed.chars().count(), 16 | 81) {
        return Ok(trimmed.to_string());
    }
    Err(usage(format!(
        "{input}: no such file, and not a puzzle string"
    )))
}

fn read_puzzles(input: &str) -> CliResult<Vec<Input>> {
    let text = read_source(input)?;
    let mut puzzles = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let grid = parse_grid(line).map_err(|e| usage(format!("line {}: {e}", i + 1)))?;
        puzzles.push(Input { line: i + 1, grid });
    }
    if puzzles.is_empty() {
        return Err(usage(format!("{input}: no puzzles")));
    }
    Ok(puzzles)
}

fn read_one(input: &str) -> CliResult<Grid> {
    let mut puzzles = read_puzzles(input)?;
    if puzzles.len() != 1 {
        return Err(usage(format!(
            "expected one puzzle, found {}",
            puzzles.len()
        )));
    }
    Ok(puzzles.remove(0).grid)
}

fn write_json(out: &mut (dyn Write + Send), value: &impl Serialize) -> CliResult {
    serde_json::to_writer_pretty(&mut *out, value).map_err(domain)?;
    writeln!(out).map_err(io_fail)
}

fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

#[derive(Serialize)]
struct SolveRow {
    line: usize,
    puzzle: String,
    solution: Option<String>,
    nodes_expanded: u64,
    backtracks: u64,
    solutions_found: u64,
    error: Option<String>,
}

fn cmd_solve(
    input: &str,
    require_unique: bool,
    format: Format,
    out: &mut (dyn Write + Send),
    err: &mut (dyn Write + Send),
) -> CliResult {
    let puzzles = read_puzzles(input)?;
    let rows: Vec<SolveRow> = puzzles
        .par_iter()
        .map(|p| {
            let graph = SudokuGraph::full(p.grid.order());
            let mut row = SolveRow {
                line: p.line,
                puzzle: p.grid.to_line(),
                solution: None,
                nodes_expanded: 0,
                backtracks: 0,
                solutions_found: 0,
                error: None,
            };
            match solve(&p.grid, &graph) {
                Ok((solution, stats)) => {
                    row.solution = solution.map(|s| s.to_line());
                    row.nodes_expanded = stats.nodes_expanded;
                    row.backtracks = stats.backtracks;
                    row.solutions_found = stats.solutions_found;
                    if row.solution.is_none() {
                        row.error = Some("no solution".into());
                    }
                }
                Err(e) => row.error = Some(e.to_string()),
            }
            if require_unique && row.error.is_none() {
                match count_solutions(&p.grid, &graph, 2) {
                    Ok(1) => {}
                    Ok(_) => row.error = Some("more than one solution".into()),
                    Err(e) => row.error = Some(e.to_string()),
                }
            }
            row
        })
        .collect();

    match format {
        Format::Json => write_json(out, &rows)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record([
                "line",
                "puzzle",
                "solution",
                "nodes_expanded",
                "backtracks",
                "error",
            ])
            .map_err(domain)?;
            for r in &rows {
                w.write_record([
                    r.line.to_string(),
                    r.puzzle.clone(),
                    r.solution.clone().unwrap_or_default(),
                    r.nodes_expanded.to_string(),
                    r.backtracks.to_string(),
                    r.error.clone().unwrap_or_default(),
                ])
                .map_err(domain)?;
            }
            w.flush().map_err(io_fail)?;
        }
        Format::Text => {
            for r in &rows {
                if let Some(s) = &r.solution {
                    if r.error.is_none() {
                        writeln!(out, "{s}").map_err(io_fail)?;
                    }
                }
            }
        }
    }
    let failed: Vec<&SolveRow> = rows.iter().filter(|r| r.error.is_some()).collect();
    for r in &failed {
        let _ = writeln!(err, "line {}: {}", r.line, r.error.as_deref().unwrap_or(""));
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Domain(format!(
            "{} of {} puzzles failed",
            failed.len(),
            rows.len()
        )))
    }
}

fn load_weights(path: &Path) -> CliResult<LinearFit> {
    let text =
        std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let v: Value =
        serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let obj = v.get("combined").unwrap_or(&v);
    let weights: Option<Vec<f64>> = obj
        .get("weights")
        .and_then(Value::as_array)
        .and_then(|a| a.iter().map(Value::as_f64).collect());
    let intercept = obj.get("intercept").and_then(Value::as_f64);
    match (weights, intercept) {
        (Some(w), Some(i)) if w.len() == 2 => Ok(LinearFit {
            weights: w,
            intercept: i,
        }),
        _ => Err(usage(format!(
            "{}: expected two weights (refutation-sum, dependency) and an intercept",
            path.display()
        ))),
    }
}

fn cmd_rate(
    input: &str,
    metrics: &[RateMetric],
    weights: Option<&Path>,
    config: &MetricConfig,
    format: Format,
    out: &mut (dyn Write + Send),
    err: &mut (dyn Write + Send),
) -> CliResult {
    let rd = if metrics.contains(&RateMetric::Rd) {
        Some(load_weights(
            weights.ok_or_else(|| usage("the rd metric needs --weights"))?,
        )?)
    } else {
        None
    };
    let puzzles = read_puzzles(input)?;

    let mut ids: Vec<MetricId> = Vec::new();
    let mut need = |m: MetricId| {
        if !ids.contains(&m) {
            ids.push(m);
        }
    };
    for m in metrics {
        match m {
            RateMetric::Metric(id) => need(*id),
            RateMetric::Rd => {
                need(MetricId::RefutationSum);
                need(MetricId::Dependency);
            }
        }
    }

    let _ = writeln!(err, "rating {} puzzle(s)", puzzles.len());
    let computed: Vec<Vec<Result<f64, String>>> = puzzles
        .par_iter()
        .map(|p| {
            let vals = rate_puzzle(&p.grid, &ids, config);
            let lookup = |id: MetricId| -> Result<f64, String> {
                let j = ids.iter().position(|&x| x == id).expect("requested");
                vals[j].clone().map_err(|e| e.to_string())
            };
            metrics
                .iter()
                .map(|m| match m {
                    RateMetric::Metric(id) => lookup(*id),
                    RateMetric::Rd => {
                        let fit = rd.as_ref().expect("loaded above");
                        Ok(fit.predict(&[
                            lookup(MetricId::RefutationSum)?,
                            lookup(MetricId::Dependency)?,
                        ]))
                    }
                })
                .collect()
        })
        .collect();

    let error_of = |row: &[Result<f64, String>]| -> Option<String> {
        let msgs: Vec<String> = metrics
            .iter()
            .zip(row)
            .filter_map(|(m, r)| r.as_ref().err().map(|e| format!("{}: {e}", m.name())))
            .collect();
        (!msgs.is_empty()).then(|| msgs.join("; "))
    };

    match format {
        Format::Json => {
            let rows: Vec<Value> = puzzles
                .iter()
                .zip(&computed)
                .map(|(p, row)| {
                    let mut vals = serde_json::Map::new();
                    for (m, r) in metrics.iter().zip(row) {
                        vals.insert(
                            m.name().into(),
                            r.as_ref().ok().map_or(Value::Null, |v| json!(v)),
                        );
                    }
                    json!({
                        "line": p.line,
                        "puzzle": p.grid.to_line(),
                        "metrics": vals,
                        "error": error_of(row),
                    })
                })
                .collect();
            write_json(out, &rows)?;
        }
        Format::Csv | Format::Text => {
            let delim = if format == Format::Csv { b',' } else { b'\t' };
            let mut w = csv::WriterBuilder::new()
                .delimiter(delim)
                .from_writer(&mut *out);
            let mut header = vec!["line".to_string(), "puzzle".to_string()];
            header.extend(metrics.iter().map(|m| m.name().to_string()));
            header.push("error".into());
            w.write_record(&header).map_err(domain)?;
            for (p, row) in puzzles.iter().zip(&computed) {
                let mut rec = vec![p.line.to_string(), p.grid.to_line()];
                rec.extend(
                    row.iter()
                        .map(|r| r.as_ref().map(|v| fmt_f64(*v)).unwrap_or_default()),
                );
                rec.push(error_of(row).unwrap_or_default());
                w.write_record(&rec).map_err(domain)?;
            }
            w.flush().map_err(io_fail)?;
        }
    }
    if computed.iter().any(|row| error_of(row).is_none()) {
        Ok(())
    } else {
        Err(Failure::Domain("no puzzle could be rated".into()))
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_relax(
    input: &str,
    ks: &[usize],
    samples: usize,
    cap: u64,
    fit: bool,
    seed: u64,
    format: Format,
    out: &mut (dyn Write + Send),
) -> CliResult {
    let grid = read_one(input)?;
    let rows = relaxation_curve(&grid, ks, samples, seed, cap).map_err(domain)?;
    let fitted = if fit {
        let points: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.mean_solutions_other > 0.0)
            .map(|r| (r.k as f64, r.mean_solutions_other))
            .collect();
        Some(fit_exponential(&points).map_err(domain)?)
    } else {
        None
    };
    match format {
        Format::Json => write_json(out, &json!({ "rows": rows, "fit": fitted }))?,
        Format::Csv | Format::Text => {
            write_curve_csv(&mut *out, &rows).map_err(domain)?;
            if let Some(f) = fitted {
                // second table, separated by a blank line
                writeln!(out, "\nc,rate\n{},{}", fmt_f64(f.c), fmt_f64(f.rate)).map_err(io_fail)?;
            }
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_order(
    input: &str,
    runs: usize,
    k_relax: usize,
    samples: usize,
    cap: u64,
    seed: u64,
    format: Format,
    out: &mut (dyn Write + Send),
) -> CliResult {
    let grid = read_one(input)?;
    let model = mean_fill_order(&grid, runs, seed).map_err(domain)?;
    let fixedness = relaxation_summary(&grid, k_relax, samples, seed, cap)
        .map_err(domain)?
        .fixedness;
    let by_fixedness = order_from_fixedness(&grid, &fixedness);
    let r = order_correlation(&model, &by_fixedness).ok();
    let side = grid.order().side();
    let opt = |x: Option<f64>| x.map(fmt_f64).unwrap_or_default();
    match format {
        Format::Json => {
            let cells: Vec<Value> = grid
                .empty_cells()
                .map(|c| {
                    json!({
                        "cell": c, "row": c / side, "col": c % side,
                        "model_order": model[c],
                        "fixedness": fixedness[c],
                        "fixedness_order": by_fixedness[c],
                    })
                })
                .collect();
            write_json(out, &json!({ "cells": cells, "r": r }))?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record([
                "cell",
                "row",
                "col",
                "model_order",
                "fixedness",
                "fixedness_order",
            ])
            .map_err(domain)?;
            for c in grid.empty_cells() {
                w.write_record([
                    c.to_string(),
                    (c / side).to_string(),
                    (c % side).to_string(),
                    opt(model[c]),
                    fmt_f64(fixedness[c]),
                    opt(by_fixedness[c]),
                ])
                .map_err(domain)?;
            }
            w.flush().map_err(io_fail)?;
        }
        Format::Text => {
            let mut s = String::new();
            for (title, order) in [("model order", &model), ("fixedness order", &by_fixedness)] {
                let _ = writeln!(s, "{title}:");
                for row in 0..side {
                    let cells: Vec<String> = (0..side)
                        .map(|col| {
                            order[row * side + col]
                                .map_or("  .".into(), |v| format!("{:>3}", v.round()))
                        })
                        .collect();
                    let _ = writeln!(s, "{}", cells.join(""));
                }
            }
            let _ = writeln!(s, "r = {}", r.map_or("undefined".into(), fmt_f64));
            out.write_all(s.as_bytes()).map_err(io_fail)?;
        }
    }
    Ok(())
}

fn cmd_generate(
    count: usize,
    order: u8,
    givens: usize,
    seed: u64,
    format: Format,
    out: &mut (dyn Write + Send),
) -> CliResult {
    let order = Order::new(order).map_err(usage)?;
    let puzzles: Vec<String> = (0..count)
        .into_par_iter()
        .map(|i| generate_puzzle(order, derive_seed(seed, i as u64), givens).to_line())
        .collect();
    match format {
        Format::Json => write_json(out, &puzzles)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(["index", "puzzle"]).map_err(domain)?;
            for (i, p) in puzzles.iter().enumerate() {
                w.write_record([i.to_string(), p.clone()]).map_err(domain)?;
            }
            w.flush().map_err(io_fail)?;
        }
        Format::Text => {
            for p in &puzzles {
                writeln!(out, "{p}").map_err(io_fail)?;
            }
        }
    }
    Ok(())
}

struct EvaluateArgs<'a> {
    dataset: &'a Path,
    metrics: &'a [MetricId],
    split_seed: u64,
    drift: bool,
    simple_only: bool,
    solutions: Option<&'a Path>,
    time: TimeTarget,
    config: MetricConfig,
}

fn cmd_evaluate(
    args: &EvaluateArgs<'_>,
    format: Format,
    out: &mut (dyn Write + Send),
    err: &mut (dyn Write + Send),
) -> CliResult {
    let mut records = load_dataset(args.dataset).map_err(usage)?;
    if let Some(path) = args.solutions {
        let aggregates = aggregate_times(&load_solutions(path).map_err(usage)?);
        records = apply_time_target(records, &aggregates, args.time);
    } else if args.time != TimeTarget::Mean {
        return Err(usage("--time median|normalized needs --solutions"));
    }
    if args.simple_only {
        records = filter_simple(records).map_err(domain)?;
    }
    let drift_r = if args.drift {
        match drift_correlation(&records) {
            Ok(r) => Some(r),
            Err(crate::Error::MissingDayIndex) => {
                return Err(usage("--drift needs a day column on every row"))
            }
            Err(e) => return Err(domain(e)),
        }
    } else {
        None
    };
    let _ = writeln!(err, "evaluating {} puzzle(s)", records.len());
    let mut report =
        evaluate_metrics(&records, args.metrics, &args.config, args.split_seed).map_err(domain)?;
    report.drift_r = drift_r;
    match format {
        Format::Json => write_json(out, &report)?,
        Format::Csv | Format::Text => {
            let mut w = csv::Writer::from_writer(&mut *out);
            w.write_record(["metric", "r", "spearman", "error"])
                .map_err(domain)?;
            let opt = |x: Option<f64>| x.map(fmt_f64).unwrap_or_default();
            for m in &report.metrics {
                w.write_record([
                    m.id.name().to_string(),
                    opt(m.r),
                    opt(m.spearman),
                    m.error.clone().unwrap_or_default(),
                ])
                .map_err(domain)?;
            }
            if let Some(c) = &report.combined {
                w.write_record([
                    "rd".to_string(),
                    opt(c.test_r),
                    String::new(),
                    c.error.clone().unwrap_or_default(),
                ])
                .map_err(domain)?;
            }
            if let Some(d) = report.drift_r {
                w.write_record([
                    "drift".to_string(),
                    fmt_f64(d),
                    String::new(),
                    String::new(),
                ])
                .map_err(domain)?;
            }
            w.flush().map_err(io_fail)?;
        }
    }
    Ok(())
}
