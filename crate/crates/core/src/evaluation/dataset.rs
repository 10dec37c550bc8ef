//! CSV ingest for human solving-time datasets.
//!
//! Puzzle file: `id,puzzle,mean_time_s,solvers[,day]`. Optional
//! per-solution file: `id,user,time_s`, used to derive median and
//! user-normalized time aggregates.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::path::Path;

use serde::Serialize;

use crate::board::{parse_grid, Grid, SudokuGraph};
use crate::error::Error;
use crate::solver::count_solutions;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PuzzleRecord {
    pub id: String,
    #[serde(serialize_with = "grid_line")]
    pub puzzle: Grid,
    pub mean_time_s: f64,
    pub solvers: u64,
    pub day_index: Option<u64>,
}

fn grid_line<S: serde::Serializer>(g: &Grid, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&g.to_line())
}

#[derive(Clone, Debug, PartialEq)]
pub enum RowReason {
    Grid(Error),
    Field {
        column: &'static str,
        message: String,
    },
}

impl fmt::Display for RowReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowReason::Grid(e) => write!(f, "{e}"),
            RowReason::Field { column, message } => write!(f, "column {column}: {message}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RowError {
    /// 1-based line in the file; the header is line 1.
    pub line: u64,
    pub reason: RowReason,
}

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("cannot read {path}: {message}")]
    File { path: String, message: String },
    #[error("bad header: {0}")]
    Header(String),
    #[error("{} invalid row(s); first at line {}: {}", .0.len(), .0[0].line, .0[0].reason)]
    Rows(Vec<RowError>),
}

fn file_error(path: &Path, e: impl fmt::Display) -> DatasetError {
    DatasetError::File {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

struct Columns {
    index: HashMap<String, usize>,
}

impl Columns {
    fn new(header: &csv::StringRecord, required: &[&str]) -> Result<Self, DatasetError> {
        let index: HashMap<String, usize> = header
            .iter()
            .enumerate()
            .map(|(i, h)| (h.trim().to_string(), i))
            .collect();
        for r in required {
            if !index.contains_key(*r) {
                return Err(DatasetError::Header(format!("missing column {r:?}")));
            }
        }
        Ok(Columns { index })
    }

    fn get<'r>(&self, rec: &'r csv::StringRecord, name: &str) -> Option<&'r str> {
        self.index
            .get(name)
            .and_then(|&i| rec.get(i))
            .map(str::trim)
    }
}

fn field<T: std::str::FromStr>(raw: Option<&str>, column: &'static str) -> Result<T, RowReason>
where
    T::Err: fmt::Display,
{
    let raw = raw.ok_or(RowReason::Field {
        column,
        message: "missing".into(),
    })?;
    raw.parse().map_err(|e: T::Err| RowReason::Field {
        column,
        message: format!("{raw:?}: {e}"),
    })
}

fn reader(path: &Path) -> Result<csv::Reader<std::fs::File>, DatasetError> {
    csv::ReaderBuilder::new()
        .flexible(true)
        .from_path(path)
        .map_err(|e| file_error(path, e))
}

/// Reads and validates a puzzle dataset. Every bad row is reported, not
/// just the first.
pub fn load_dataset(path: impl AsRef<Path>) -> Result<Vec<PuzzleRecord>, DatasetError> {
    let path = path.as_ref();
    let mut rdr = reader(path)?;
    let header = rdr.headers().map_err(|e| file_error(path, e))?.clone();
    let cols = Columns::new(&header, &["id", "puzzle", "mean_time_s", "solvers"])?;
    let has_day = cols.index.contains_key("day");

    let mut raw = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| file_error(path, e))?;
        let line = rec.position().map_or(0, |p| p.line());
        raw.push((line, rec));
    }

    let parsed: Vec<(u64, Result<PuzzleRecord, RowReason>)> = {
        use rayon::prelude::*;
        raw.par_iter()
            .map(|(line, rec)| (*line, parse_row(&cols, rec, has_day)))
            .collect()
    };

    let mut records = Vec::new();
    let mut errors = Vec::new();
    let mut seen = HashSet::new();
    for (line, r) in parsed {
        match r {
            Ok(rec) if !seen.insert(rec.id.clone()) => errors.push(RowError {
                line,
                reason: RowReason::Field {
                    column: "id",
                    message: format!("duplicate id {:?}", rec.id),
                },
            }),
            Ok(rec) => records.push(rec),
            Err(reason) => errors.push(RowError { line, reason }),
        }
    }
    if errors.is_empty() {
        Ok(records)
    } else {
        Err(DatasetError::Rows(errors))
    }
}

fn parse_row(
    cols: &Columns,
    rec: &csv::StringRecord,
    has_day: bool,
) -> Result<PuzzleRecord, RowReason> {
    let id: String = field(cols.get(rec, "id"), "id")?;
    if id.is_empty() {
        return Err(RowReason::Field {
            column: "id",
            message: "empty".into(),
        });
    }
    let puzzle = parse_grid(cols.get(rec, "puzzle").unwrap_or("")).map_err(RowReason::Grid)?;
    let mean_time_s: f64 = field(cols.get(rec, "mean_time_s"), "mean_time_s")?;
    if !(mean_time_s > 0.0 && mean_time_s.is_finite()) {
        return Err(RowReason::Field {
            column: "mean_time_s",
            message: format!("must be positive, got {mean_time_s}"),
        });
    }
    let solvers: u64 = field(cols.get(rec, "solvers"), "solvers")?;
    let day_index = match cols.get(rec, "day") {
        Some(d) if has_day && !d.is_empty() => Some(field(Some(d), "day")?),
        _ => None,
    };
    let graph = SudokuGraph::full(puzzle.order());
    match count_solutions(&puzzle, &graph, 2) {
        Ok(1) => {}
        Ok(_) | Err(Error::CapExceeded { .. }) => return Err(RowReason::Grid(Error::NotWellPosed)),
        Err(Error::InconsistentGrid { .. }) => return Err(RowReason::Grid(Error::NotWellPosed)),
        Err(e) => return Err(RowReason::Grid(e)),
    }
    Ok(PuzzleRecord {
        id,
        puzzle,
        mean_time_s,
        solvers,
        day_index,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolutionRecord {
    pub id: String,
    pub user: String,
    pub time_s: f64,
}

pub fn load_solutions(path: impl AsRef<Path>) -> Result<Vec<SolutionRecord>, DatasetError> {
    let path = path.as_ref();
    let mut rdr = reader(path)?;
    let header = rdr.headers().map_err(|e| file_error(path, e))?.clone();
    let cols = Columns::new(&header, &["id", "user", "time_s"])?;
    let mut out = Vec::new();
    let mut errors = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| file_error(path, e))?;
        let line = rec.position().map_or(0, |p| p.line());
        let row = (|| {
            let id: String = field(cols.get(&rec, "id"), "id")?;
            let user: String = field(cols.get(&rec, "user"), "user")?;
            let time_s: f64 = field(cols.get(&rec, "time_s"), "time_s")?;
            if !(time_s > 0.0 && time_s.is_finite()) {
                return Err(RowReason::Field {
                    column: "time_s",
                    message: format!("must be positive, got {time_s}"),
                });
            }
            Ok(SolutionRecord { id, user, time_s })
        })();
        match row {
            Ok(r) => out.push(r),
            Err(reason) => errors.push(RowError { line, reason }),
        }
    }
    if errors.is_empty() {
        Ok(out)
    } else {
        Err(DatasetError::Rows(errors))
    }
}

/// Which per-puzzle time statistic serves as the difficulty target.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum TimeTarget {
    #[default]
    Mean,
    Median,
    /// Mean over solvers of time divided by that solver's own mean time.
    Normalized,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TimeAggregates {
    pub mean: f64,
    pub median: f64,
    pub normalized: f64,
    pub count: usize,
}

impl TimeAggregates {
    pub fn get(&self, target: TimeTarget) -> f64 {
        match target {
            TimeTarget::Mean => self.mean,
            TimeTarget::Median => self.median,
            TimeTarget::Normalized => self.normalized,
        }
    }
}

fn median(xs: &mut [f64]) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    }
}

/// Per-puzzle aggregates keyed by puzzle id.
pub fn aggregate_times(solutions: &[SolutionRecord]) -> BTreeMap<String, TimeAggregates> {
    let mut user_sum: HashMap<&str, (f64, usize)> = HashMap::new();
    for s in solutions {
        let e = user_sum.entry(&s.user).or_default();
        e.0 += s.time_s;
        e.1 += 1;
    }
    let mut by_id: BTreeMap<&str, Vec<&SolutionRecord>> = BTreeMap::new();
    for s in solutions {
        by_id.entry(&s.id).or_default().push(s);
    }
    by_id
        .into_iter()
        .map(|(id, rows)| {
            let n = rows.len() as f64;
            let mut times: Vec<f64> = rows.iter().map(|r| r.time_s).collect();
            let mean = times.iter().sum::<f64>() / n;
            let normalized = rows
                .iter()
                .map(|r| {
                    let (sum, count) = user_sum[r.user.as_str()];
                    r.time_s / (sum / count as f64)
                })
                .sum::<f64>()
                / n;
            let agg = TimeAggregates {
                mean,
                median: median(&mut times),
                normalized,
                count: rows.len(),
            };
            (id.to_string(), agg)
        })
        .collect()
}

/// Replaces each record's time with the chosen aggregate. Records without
/// any per-solution rows are dropped.
pub fn apply_time_target(
    records: Vec<PuzzleRecord>,
    aggregates: &BTreeMap<String, TimeAggregates>,
    target: TimeTarget,
) -> Vec<PuzzleRecord> {
    records
        .into_iter()
        .filter_map(|mut r| {
            let agg = aggregates.get(&r.id)?;
            r.mean_time_s = agg.get(target);
            r.solvers = agg.count as u64;
            Some(r)
        })
        .collect()
}
