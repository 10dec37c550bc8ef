//! Correlating difficulty metrics with human solving times.

pub mod dataset;
pub mod stats;

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::Serialize;

use crate::baselines::{annealing_metric, givens_metric, AnnealParams, DEFAULT_ANNEAL_RUNS};
use crate::board::Grid;
use crate::error::{Error, Result};
use crate::human_model::{model_metrics, DEFAULT_K_DEP, DEFAULT_RUNS};
use crate::relaxation::{relaxation_metrics, DEFAULT_K_RELAX, DEFAULT_SAMPLES};
use crate::rng::rng_from;
use crate::solver::{backtracking_metric, DEFAULT_CAP};
use crate::techniques::is_simple;

pub use dataset::{load_dataset, load_solutions, PuzzleRecord};
pub use stats::{fit_linear, fractional_ranks, pearson, spearman, LinearFit};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricId {
    Givens,
    Backtracking,
    Annealing,
    Solutions,
    Fixedness,
    Dependency,
    RefutationSum,
}

impl MetricId {
    pub const ALL: [MetricId; 7] = [
        MetricId::Givens,
        MetricId::Backtracking,
        MetricId::Annealing,
        MetricId::Solutions,
        MetricId::Fixedness,
        MetricId::Dependency,
        MetricId::RefutationSum,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MetricId::Givens => "givens",
            MetricId::Backtracking => "backtracking",
            MetricId::Annealing => "annealing",
            MetricId::Solutions => "solutions",
            MetricId::Fixedness => "fixedness",
            MetricId::Dependency => "dependency",
            MetricId::RefutationSum => "refutation-sum",
        }
    }
}

impl fmt::Display for MetricId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MetricId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('_', "-");
        MetricId::ALL
            .into_iter()
            .find(|m| m.name() == norm)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown metric {s:?}")))
    }
}

/// Parameters shared by all metric computations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MetricConfig {
    pub seed: u64,
    pub runs: usize,
    pub k_dep: usize,
    pub k_relax: usize,
    pub samples: usize,
    pub cap: u64,
    pub anneal: AnnealParams,
    pub anneal_runs: usize,
}

impl Default for MetricConfig {
    fn default() -> Self {
        MetricConfig {
            seed: 0,
            runs: DEFAULT_RUNS,
            k_dep: DEFAULT_K_DEP,
            k_relax: DEFAULT_K_RELAX,
            samples: DEFAULT_SAMPLES,
            cap: DEFAULT_CAP,
            anneal: AnnealParams::default(),
            anneal_runs: DEFAULT_ANNEAL_RUNS,
        }
    }
}

/// Computes the requested metrics for one puzzle, in the order given.
///
/// Every metric uses `config.seed` directly, so a puzzle's ratings do not
/// depend on its position in a corpus. Refutation sum and dependency share
/// one batch of model runs; solutions and fixedness share one batch of
/// relaxation samples.
pub fn rate_puzzle(grid: &Grid, ids: &[MetricId], config: &MetricConfig) -> Vec<Result<f64>> {
    let wants = |m| ids.contains(&m);
    let model = (wants(MetricId::RefutationSum) || wants(MetricId::Dependency))
        .then(|| model_metrics(grid, config.k_dep, config.runs, config.seed));
    let relax = (wants(MetricId::Solutions) || wants(MetricId::Fixedness)).then(|| {
        relaxation_metrics(
            grid,
            config.k_relax,
            config.samples,
            config.seed,
            config.cap,
        )
    });
    ids.iter()
        .map(|&id| match id {
            MetricId::Givens => Ok(givens_metric(grid) as f64),
            MetricId::Backtracking => backtracking_metric(grid).map(|b| b as f64),
            MetricId::Annealing => {
                annealing_metric(grid, &config.anneal, config.anneal_runs, config.seed)
            }
            MetricId::Solutions => relax.clone().unwrap().map(|m| m.mean_solutions_other),
            MetricId::Fixedness => relax.clone().unwrap().map(|m| m.mean_fixed_cells),
            MetricId::Dependency => model.clone().unwrap().map(|m| m.dependency),
            MetricId::RefutationSum => model.clone().unwrap().map(|m| m.refutation_sum),
        })
        .collect()
}

/// Metric values per puzzle (rows follow `grids`, columns follow `ids`).
pub fn compute_metric_table(
    grids: &[Grid],
    ids: &[MetricId],
    config: &MetricConfig,
) -> Result<Vec<Vec<f64>>> {
    grids
        .par_iter()
        .map(|g| rate_puzzle(g, ids, config).into_iter().collect())
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricReport {
    pub id: MetricId,
    pub r: Option<f64>,
    pub spearman: Option<f64>,
    pub error: Option<String>,
}

/// The "RD" combination: least squares of time on refutation sum and
/// dependency, fitted on the training half and scored on the test half.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CombinedReport {
    pub features: Vec<MetricId>,
    pub weights: Vec<f64>,
    pub intercept: Option<f64>,
    pub test_r: Option<f64>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvaluationReport {
    pub metrics: Vec<MetricReport>,
    pub combined: Option<CombinedReport>,
    pub split_seed: u64,
    pub train: Vec<String>,
    pub test: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub drift_r: Option<f64>,
}

pub const MIN_RECORDS: usize = 10;

/// Disjoint train/test index sets; train holds the first `⌈n/2⌉` indices
/// of a seeded shuffle. Both lists come back sorted.
pub fn split_indices(n: usize, split_seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng_from(split_seed));
    let mut train = idx[..n.div_ceil(2)].to_vec();
    let mut test = idx[n.div_ceil(2)..].to_vec();
    train.sort_unstable();
    test.sort_unstable();
    (train, test)
}

pub fn evaluate_metrics(
    records: &[PuzzleRecord],
    ids: &[MetricId],
    config: &MetricConfig,
    split_seed: u64,
) -> Result<EvaluationReport> {
    if records.len() < MIN_RECORDS {
        return Err(Error::DegenerateInput(format!(
            "need at least {MIN_RECORDS} records, got {}",
            records.len()
        )));
    }
    let grids: Vec<Grid> = records.iter().map(|r| r.puzzle.clone()).collect();
    let table = compute_metric_table(&grids, ids, config)?;
    evaluate_table(records, ids, &table, split_seed)
}

/// Statistics over a precomputed metric table; see [`compute_metric_table`].
pub fn evaluate_table(
    records: &[PuzzleRecord],
    ids: &[MetricId],
    table: &[Vec<f64>],
    split_seed: u64,
) -> Result<EvaluationReport> {
    if records.len() < MIN_RECORDS {
        return Err(Error::DegenerateInput(format!(
            "need at least {MIN_RECORDS} records, got {}",
            records.len()
        )));
    }
    if table.len() != records.len() || table.iter().any(|row| row.len() != ids.len()) {
        return Err(Error::DegenerateInput(
            "metric table does not match records".into(),
        ));
    }
    let times: Vec<f64> = records.iter().map(|r| r.mean_time_s).collect();
    let column = |j: usize| -> Vec<f64> { table.iter().map(|row| row[j]).collect() };

    let metrics = ids
        .iter()
        .enumerate()
        .map(|(j, &id)| {
            let xs = column(j);
            match (pearson(&xs, &times), spearman(&xs, &times)) {
                (Ok(r), Ok(rho)) => MetricReport {
                    id,
                    r: Some(r),
                    spearman: Some(rho),
                    error: None,
                },
                (Err(e), _) | (_, Err(e)) => MetricReport {
                    id,
                    r: None,
                    spearman: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();

    let (train, test) = split_indices(records.len(), split_seed);
    let features = [MetricId::RefutationSum, MetricId::Dependency];
    let cols: Option<Vec<usize>> = features
        .iter()
        .map(|f| ids.iter().position(|id| id == f))
        .collect();
    let combined = cols.map(|cols| {
        let rows = |set: &[usize]| -> Vec<Vec<f64>> {
            set.iter()
                .map(|&i| cols.iter().map(|&j| table[i][j]).collect())
                .collect()
        };
        let targets = |set: &[usize]| -> Vec<f64> { set.iter().map(|&i| times[i]).collect() };
        let fitted = fit_linear(&rows(&train), &targets(&train));
        let scored = fitted.as_ref().map_err(Clone::clone).and_then(|fit| {
            let predicted: Vec<f64> = rows(&test).iter().map(|x| fit.predict(x)).collect();
            pearson(&predicted, &targets(&test))
        });
        CombinedReport {
            features: features.to_vec(),
            weights: fitted
                .as_ref()
                .map(|f| f.weights.clone())
                .unwrap_or_default(),
            intercept: fitted.as_ref().ok().map(|f| f.intercept),
            test_r: scored.as_ref().ok().copied(),
            error: fitted.err().or(scored.err()).map(|e| e.to_string()),
        }
    });

    let ids_of = |set: &[usize]| set.iter().map(|&i| records[i].id.clone()).collect();
    Ok(EvaluationReport {
        metrics,
        combined,
        split_seed,
        train: ids_of(&train),
        test: ids_of(&test),
        drift_r: None,
    })
}

/// Correlation between publication day and solving time, a check for
/// solvers improving over the lifetime of a dataset.
pub fn drift_correlation(records: &[PuzzleRecord]) -> Result<f64> {
    let days: Vec<f64> = records
        .iter()
        .map(|r| r.day_index.map(|d| d as f64).ok_or(Error::MissingDayIndex))
        .collect::<Result<_>>()?;
    let times: Vec<f64> = records.iter().map(|r| r.mean_time_s).collect();
    pearson(&days, &times)
}

/// Pearson correlation over cells where both orders are defined.
pub fn order_correlation(a: &[Option<f64>], b: &[Option<f64>]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DegenerateInput(format!(
            "orders cover {} and {} cells",
            a.len(),
            b.len()
        )));
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = a
        .iter()
        .zip(b)
        .filter_map(|(x, y)| Some(((*x)?, (*y)?)))
        .unzip();
    pearson(&xs, &ys)
}

/// Keeps records whose puzzle falls to the two single techniques alone.
pub fn filter_simple(records: Vec<PuzzleRecord>) -> Result<Vec<PuzzleRecord>> {
    let keep: Vec<bool> = records
        .par_iter()
        .map(|r| is_simple(&r.puzzle))
        .collect::<Result<_>>()?;
    Ok(records
        .into_iter()
        .zip(keep)
        .filter_map(|(r, k)| k.then_some(r))
        .collect())
}
