//! Random constraint relaxation: delete `k` edges of the peer graph,
//! enumerate every solution of the relaxed puzzle, and record how many
//! extra solutions appear and which cells keep the same value in all of
//! them (fixed cells, the backbone of the relaxed instance).

use std::io::Write;

use rand::seq::index;
use rayon::prelude::*;
use serde::Serialize;

use crate::board::{Edge, Grid, SudokuGraph};
use crate::error::{Error, Result};
use crate::evaluation::stats::fractional_ranks;
use crate::rng::{derive_seed, rng_from, Rng};
use crate::solver::{enumerate_solutions, require_well_posed};

pub const DEFAULT_K_RELAX: usize = 45;
pub const DEFAULT_SAMPLES: usize = 1000;
pub const DEFAULT_FIXEDNESS_SAMPLES: usize = 200;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelaxationSample {
    pub removed: Vec<Edge>,
    /// Solutions other than the puzzle's own solution.
    pub solutions_other: u64,
    /// Cells holding the same value in every solution, ascending. Givens
    /// are always included.
    pub fixed_cells: Vec<usize>,
}

impl RelaxationSample {
    pub fn is_fixed(&self, cell: usize) -> bool {
        self.fixed_cells.binary_search(&cell).is_ok()
    }
}

struct Analysis {
    solutions: u64,
    capped: bool,
    fixed: u128,
}

fn analyze(grid: &Grid, graph: &SudokuGraph, cap: u64) -> Result<Analysis> {
    let cells = grid.len();
    let mut first: Option<Vec<u8>> = None;
    let mut varying = 0u128;
    let solutions = enumerate_solutions(grid, graph, cap, |values| match &first {
        None => first = Some(values.to_vec()),
        Some(base) => {
            for (cell, (&a, &b)) in base.iter().zip(values).enumerate() {
                if a != b {
                    varying |= 1u128 << cell;
                }
            }
        }
    })?;
    let all = if cells == 128 {
        u128::MAX
    } else {
        (1u128 << cells) - 1
    };
    let fixed = if solutions == 0 { 0 } else { all & !varying };
    Ok(Analysis {
        solutions,
        capped: solutions >= cap,
        fixed,
    })
}

fn mask_to_cells(mask: u128, cells: usize) -> Vec<usize> {
    (0..cells).filter(|&c| mask & (1u128 << c) != 0).collect()
}

/// `k` distinct edges of the full graph, uniformly without replacement, in
/// sampling order (so any prefix is itself a uniform sample).
pub fn sample_removal(graph: &SudokuGraph, k: usize, rng: &mut Rng) -> Result<Vec<Edge>> {
    let edges = graph.edges();
    if k > edges.len() {
        return Err(Error::TooManyEdges(k, edges.len()));
    }
    Ok(index::sample(rng, edges.len(), k)
        .iter()
        .map(|i| edges[i])
        .collect())
}

/// Analyses the puzzle with a given set of edges removed.
pub fn relax_with(grid: &Grid, removed: &[Edge], cap: u64) -> Result<RelaxationSample> {
    let full = SudokuGraph::full(grid.order());
    let graph = full.without_edges(removed);
    let a = analyze(grid, &graph, cap)?;
    if a.capped {
        return Err(Error::CapExceeded { cap });
    }
    Ok(RelaxationSample {
        removed: removed.to_vec(),
        solutions_other: a.solutions.saturating_sub(1),
        fixed_cells: mask_to_cells(a.fixed, grid.len()),
    })
}

/// One random relaxation experiment with `k_relax` edges removed.
pub fn sample_relaxation(
    grid: &Grid,
    k_relax: usize,
    seed: u64,
    cap: u64,
) -> Result<RelaxationSample> {
    require_well_posed(grid)?;
    let full = SudokuGraph::full(grid.order());
    let removed = sample_removal(&full, k_relax, &mut rng_from(seed))?;
    relax_with(grid, &removed, cap)
}

/// Aggregates over independent samples at one `k`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RelaxationMetrics {
    pub k: usize,
    /// Mean extra solutions. Capped samples enter at the cap.
    pub mean_solutions_other: f64,
    /// Mean fixed-cell count over uncapped samples.
    pub mean_fixed_cells: f64,
    pub samples: usize,
    pub samples_capped: usize,
}

/// Means plus per-cell fixedness from one batch of samples.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RelaxationSummary {
    pub metrics: RelaxationMetrics,
    /// Fraction of uncapped samples in which each cell is fixed.
    pub fixedness: Vec<f64>,
}

/// Runs `samples` experiments; sample `i` draws its edges with sub-seed
/// `derive_seed(seed, i)`.
pub fn relaxation_summary(
    grid: &Grid,
    k_relax: usize,
    samples: usize,
    seed: u64,
    cap: u64,
) -> Result<RelaxationSummary> {
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be at least 1".into()));
    }
    require_well_posed(grid)?;
    let full = SudokuGraph::full(grid.order());
    let edges = full.edges();
    if k_relax > edges.len() {
        return Err(Error::TooManyEdges(k_relax, edges.len()));
    }
    let results: Vec<Analysis> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_from(derive_seed(seed, i as u64));
            let removed: Vec<Edge> = index::sample(&mut rng, edges.len(), k_relax)
                .iter()
                .map(|j| edges[j])
                .collect();
            analyze(grid, &full.without_edges(&removed), cap)
        })
        .collect::<Result<_>>()?;

    let cells = grid.len();
    let mut solutions_sum = 0.0;
    let mut fixed_sum = 0.0;
    let mut fixed_counts = vec![0usize; cells];
    let mut usable = 0usize;
    for a in &results {
        solutions_sum += a.solutions.saturating_sub(1) as f64;
        if a.capped {
            continue;
        }
        usable += 1;
        fixed_sum += a.fixed.count_ones() as f64;
        for (cell, count) in fixed_counts.iter_mut().enumerate() {
            if a.fixed & (1u128 << cell) != 0 {
                *count += 1;
            }
        }
    }
    if usable == 0 {
        return Err(Error::AllSamplesCapped);
    }
    Ok(RelaxationSummary {
        metrics: RelaxationMetrics {
            k: k_relax,
            mean_solutions_other: solutions_sum / samples as f64,
            mean_fixed_cells: fixed_sum / usable as f64,
            samples,
            samples_capped: samples - usable,
        },
        fixedness: fixed_counts
            .iter()
            .map(|&c| c as f64 / usable as f64)
            .collect(),
    })
}

pub fn relaxation_metrics(
    grid: &Grid,
    k_relax: usize,
    samples: usize,
    seed: u64,
    cap: u64,
) -> Result<RelaxationMetrics> {
    Ok(relaxation_summary(grid, k_relax, samples, seed, cap)?.metrics)
}

/// Probability, per cell, of being fixed under a random `k_relax`-edge
/// relaxation.
pub fn fixedness_map(
    grid: &Grid,
    k_relax: usize,
    samples: usize,
    seed: u64,
    cap: u64,
) -> Result<Vec<f64>> {
    Ok(relaxation_summary(grid, k_relax, samples, seed, cap)?.fixedness)
}

/// Predicted fill order: empty cells ranked by descending fixedness
/// (rank 1 first), ties sharing the mean of their ranks. `None` for givens.
pub fn fixedness_order(
    grid: &Grid,
    k_relax: usize,
    samples: usize,
    seed: u64,
    cap: u64,
) -> Result<Vec<Option<f64>>> {
    let fixedness = fixedness_map(grid, k_relax, samples, seed, cap)?;
    Ok(order_from_fixedness(grid, &fixedness))
}

pub fn order_from_fixedness(grid: &Grid, fixedness: &[f64]) -> Vec<Option<f64>> {
    let empties: Vec<usize> = grid.empty_cells().collect();
    let negated: Vec<f64> = empties.iter().map(|&c| -fixedness[c]).collect();
    let ranks = fractional_ranks(&negated);
    let mut out = vec![None; grid.len()];
    for (&cell, rank) in empties.iter().zip(ranks) {
        out[cell] = Some(rank);
    }
    out
}

/// `mean ≈ c · e^(rate · k)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExponentialFit {
    pub c: f64,
    pub rate: f64,
}

impl ExponentialFit {
    pub fn eval(&self, k: f64) -> f64 {
        self.c * (self.rate * k).exp()
    }
}

/// Least-squares line through `(k, ln mean)`.
pub fn fit_exponential(points: &[(f64, f64)]) -> Result<ExponentialFit> {
    if points.len() < 3 {
        return Err(Error::DegenerateInput(format!(
            "need at least 3 points, got {}",
            points.len()
        )));
    }
    if points.iter().any(|&(_, m)| !(m.is_finite() && m > 0.0)) {
        return Err(Error::DegenerateInput("means must be positive".into()));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1.ln()).sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for &(k, m) in points {
        sxy += (k - mx) * (m.ln() - my);
        sxx += (k - mx) * (k - mx);
    }
    if sxx == 0.0 {
        return Err(Error::DegenerateInput("all k values are equal".into()));
    }
    let rate = sxy / sxx;
    Ok(ExponentialFit {
        c: (my - rate * mx).exp(),
        rate,
    })
}

/// Curve rows for several `k`; row for `k` uses sub-seed `derive_seed(seed, k)`.
pub fn relaxation_curve(
    grid: &Grid,
    ks: &[usize],
    samples: usize,
    seed: u64,
    cap: u64,
) -> Result<Vec<RelaxationMetrics>> {
    ks.iter()
        .map(|&k| relaxation_metrics(grid, k, samples, derive_seed(seed, k as u64), cap))
        .collect()
}

/// Writes `k,mean_solutions_other,mean_fixed_cells,samples_capped` rows.
pub fn write_curve_csv<W: Write>(out: W, rows: &[RelaxationMetrics]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "k",
        "mean_solutions_other",
        "mean_fixed_cells",
        "samples_capped",
    ])?;
    for r in rows {
        w.write_record([
            r.k.to_string(),
            format!("{:?}", r.mean_solutions_other),
            format!("{:?}", r.mean_fixed_cells),
            r.samples_capped.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
