//! Randomized model of a human solver.
//!
//! At every state the model collects the distinct assignments justified by
//! naked and hidden singles and applies one chosen uniformly at random. When
//! no single applies it scores each empty cell by refutation: every
//! candidate of the cell is tried, followed by random simple steps until a
//! contradiction appears, and the cell whose wrong candidates are cheapest
//! to refute in total is filled with its surviving value.
//!
//! A refutation costs one step for the tentative assignment plus one per
//! simple fill after it; spotting the contradiction itself is free.

use std::collections::BTreeMap;

use rand::{Rng as _, RngCore};
use rayon::prelude::*;
use serde::Serialize;

use crate::board::{CandidateState, Grid, Order, SudokuGraph};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, rng_from};
use crate::solver::require_well_posed;
use crate::techniques::{
    applicable_assignments, assignment_pairs, detect_contradiction, AssignmentChoice,
};

pub const DEFAULT_RUNS: usize = 30;
pub const DEFAULT_K_DEP: usize = 25;
pub const DEFAULT_TRIALS: usize = 5;

const TIE_STREAM: u64 = u64::MAX;

/// A refutation score. `Finite` sorts below `Infinite`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Score {
    Finite(u32),
    Infinite,
}

/// Outcome for one candidate value of a cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Refutation {
    /// Fewest steps observed to reach a contradiction.
    Refuted(u32),
    Unrefuted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RefutationReport {
    pub cell: usize,
    pub per_candidate: BTreeMap<u8, Refutation>,
    /// Sum of the refuted candidates' scores when exactly one candidate
    /// survives, `Infinite` otherwise.
    pub total: Score,
}

impl RefutationReport {
    /// The single unrefuted candidate.
    pub fn survivor(&self) -> Result<u8> {
        let mut survivors = self
            .per_candidate
            .iter()
            .filter(|(_, r)| **r == Refutation::Unrefuted)
            .map(|(&v, _)| v);
        match (survivors.next(), survivors.next()) {
            (Some(v), None) => Ok(v),
            (Some(_), Some(_)) => Err(Error::MultipleSurvivors { cell: self.cell }),
            (None, _) => Err(Error::NoSurvivor { cell: self.cell }),
        }
    }
}

/// Rollout budget for refutation scoring.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RefutationConfig {
    /// Independent rollouts per candidate; the minimum is kept.
    pub trials: usize,
    /// Rollouts still without contradiction after this many steps count as
    /// unrefuted.
    pub step_cap: u32,
}

impl RefutationConfig {
    pub fn for_order(order: Order) -> Self {
        RefutationConfig {
            trials: DEFAULT_TRIALS,
            step_cap: order.cells() as u32,
        }
    }
}

/// The cell chosen when simple techniques are exhausted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RefutationPick {
    pub cell: usize,
    pub value: u8,
    pub score: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum StepChoice {
    Simple(AssignmentChoice),
    Refutation(RefutationPick),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SolveStep {
    /// 1-based position in the trace.
    pub index: usize,
    pub choice: StepChoice,
    /// Number of distinct simple assignments available before the step;
    /// zero for refutation steps.
    pub branching: usize,
}

impl SolveStep {
    pub fn cell(&self) -> usize {
        match &self.choice {
            StepChoice::Simple(c) => c.cell,
            StepChoice::Refutation(p) => p.cell,
        }
    }

    pub fn value(&self) -> u8 {
        match &self.choice {
            StepChoice::Simple(c) => c.value,
            StepChoice::Refutation(p) => p.value,
        }
    }

    pub fn refutation_cost(&self) -> Option<u32> {
        match &self.choice {
            StepChoice::Simple(_) => None,
            StepChoice::Refutation(p) => Some(p.score),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SolveTrace {
    pub steps: Vec<SolveStep>,
}

impl SolveTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn refutation_sum(&self) -> u64 {
        self.steps
            .iter()
            .filter_map(|s| s.refutation_cost())
            .map(u64::from)
            .sum()
    }

    pub fn refutation_fills(&self) -> usize {
        self.steps
            .iter()
            .filter(|s| s.refutation_cost().is_some())
            .count()
    }

    /// Mean branching over the first `k` steps, refutation steps counting 1.
    pub fn mean_branching(&self, k: usize) -> Option<f64> {
        let window = &self.steps[..k.min(self.steps.len())];
        if window.is_empty() {
            return None;
        }
        let sum: usize = window.iter().map(|s| s.branching.max(1)).sum();
        Some(sum as f64 / window.len() as f64)
    }

    /// Applies every step to `grid`, checking that each fill targets an
    /// empty cell.
    pub fn replay(&self, grid: &Grid) -> Result<Grid> {
        let mut out = grid.clone();
        for step in &self.steps {
            out.set(step.cell(), step.value())?;
        }
        Ok(out)
    }
}

struct Scratch {
    marks: Vec<u16>,
    pairs: Vec<(usize, u8)>,
}

impl Scratch {
    fn new() -> Self {
        Scratch {
            marks: Vec::new(),
            pairs: Vec::new(),
        }
    }
}

/// One random rollout after tentatively setting `cell` to `value`. Returns
/// the step count at the first contradiction, or `None` if the rollout
/// stalls, completes, or reaches `step_cap`.
fn rollout(
    state: &CandidateState<'_>,
    cell: usize,
    value: u8,
    step_cap: u32,
    rng: &mut crate::rng::Rng,
    scratch: &mut Scratch,
) -> Option<u32> {
    let mut st = state.clone();
    st.assign_unchecked(cell, value);
    let mut steps = 1u32;
    loop {
        if detect_contradiction(&st) {
            return Some(steps);
        }
        if steps >= step_cap {
            return None;
        }
        assignment_pairs(&st, &mut scratch.marks, &mut scratch.pairs);
        if scratch.pairs.is_empty() {
            return None;
        }
        let (c, v) = scratch.pairs[rng.random_range(0..scratch.pairs.len())];
        st.assign_unchecked(c, v);
        steps += 1;
    }
}

fn refute_candidate(
    state: &CandidateState<'_>,
    cell: usize,
    value: u8,
    seed: u64,
    config: RefutationConfig,
    scratch: &mut Scratch,
) -> Refutation {
    let mut rng = rng_from(derive_seed(seed, value as u64));
    let mut best: Option<u32> = None;
    for _ in 0..config.trials {
        // a later rollout only matters if it beats the best so far
        let cap = best.map_or(config.step_cap, |b| b - 1);
        if cap == 0 {
            break;
        }
        if let Some(steps) = rollout(state, cell, value, cap, &mut rng, scratch) {
            best = Some(steps);
        }
    }
    best.map_or(Refutation::Unrefuted, Refutation::Refuted)
}

/// Scores a cell; gives up and returns `None` once the partial total
/// exceeds `bound` or a second candidate survives.
fn score_cell(
    state: &CandidateState<'_>,
    cell: usize,
    seed: u64,
    config: RefutationConfig,
    bound: Option<u32>,
    scratch: &mut Scratch,
) -> Option<RefutationReport> {
    let mut per_candidate = BTreeMap::new();
    let mut total = 0u32;
    let mut survivors = 0;
    for value in state.candidates(cell) {
        let outcome = refute_candidate(state, cell, value, seed, config, scratch);
        match outcome {
            Refutation::Refuted(s) => total += s,
            Refutation::Unrefuted => survivors += 1,
        }
        per_candidate.insert(value, outcome);
        if let Some(b) = bound {
            if total > b || survivors > 1 {
                return None;
            }
        }
    }
    let total = if survivors == 1 {
        Score::Finite(total)
    } else {
        Score::Infinite
    };
    Some(RefutationReport {
        cell,
        per_candidate,
        total,
    })
}

fn check_stuck(state: &CandidateState<'_>) -> Result<()> {
    if applicable_assignments(state).is_empty() {
        Ok(())
    } else {
        Err(Error::NotStuck)
    }
}

/// Refutation scores for every candidate of `cell` in a state where no
/// simple technique applies.
pub fn refutation_score_cell(
    state: &CandidateState<'_>,
    cell: usize,
    seed: u64,
    step_cap: u32,
    trials: usize,
) -> Result<RefutationReport> {
    if cell >= state.grid().len()
        || state.grid().value(cell).is_some()
        || state.candidates(cell).len() < 2
    {
        return Err(Error::InvalidCell(cell));
    }
    check_stuck(state)?;
    let config = RefutationConfig { trials, step_cap };
    let report = score_cell(state, cell, seed, config, None, &mut Scratch::new())
        .expect("unbounded scoring always reports");
    Ok(report)
}

/// Picks the empty cell with the lowest finite refutation total, breaking
/// ties uniformly at random.
pub fn select_refutation_cell(state: &CandidateState<'_>, seed: u64) -> Result<RefutationPick> {
    check_stuck(state)?;
    select_unchecked(state, seed, RefutationConfig::for_order(state.order()))
}

fn select_unchecked(
    state: &CandidateState<'_>,
    seed: u64,
    config: RefutationConfig,
) -> Result<RefutationPick> {
    let mut cells: Vec<usize> = state.grid().empty_cells().collect();
    // cheap cells first tighten the bound sooner; per-cell seeds keep the
    // outcome independent of this order
    cells.sort_by_key(|&c| (state.candidates(c).len(), c));
    let mut scratch = Scratch::new();
    let mut best: Option<u32> = None;
    let mut tied: Vec<(usize, u8)> = Vec::new();
    for cell in cells {
        let Some(report) = score_cell(
            state,
            cell,
            derive_seed(seed, cell as u64),
            config,
            best,
            &mut scratch,
        ) else {
            continue;
        };
        let Score::Finite(total) = report.total else {
            continue;
        };
        let value = report.survivor()?;
        match best {
            Some(b) if total > b => {}
            Some(b) if total == b => tied.push((cell, value)),
            _ => {
                best = Some(total);
                tied.clear();
                tied.push((cell, value));
            }
        }
    }
    let score = best.ok_or(Error::Stuck)?;
    tied.sort_unstable();
    let mut rng = rng_from(derive_seed(seed, TIE_STREAM));
    let (cell, value) = tied[rng.random_range(0..tied.len())];
    Ok(RefutationPick { cell, value, score })
}

/// Runs the model from `grid` to its solution.
pub fn run_sisus(grid: &Grid, seed: u64) -> Result<SolveTrace> {
    require_well_posed(grid)?;
    run_model(grid, seed, RefutationConfig::for_order(grid.order()))
}

/// [`run_sisus`] with an explicit refutation budget.
pub fn run_sisus_with(grid: &Grid, seed: u64, config: RefutationConfig) -> Result<SolveTrace> {
    require_well_posed(grid)?;
    run_model(grid, seed, config)
}

fn run_model(grid: &Grid, seed: u64, config: RefutationConfig) -> Result<SolveTrace> {
    let graph = SudokuGraph::full(grid.order());
    let mut state = CandidateState::new(grid.clone(), &graph)?;
    let mut rng = rng_from(seed);
    let mut steps = Vec::with_capacity(grid.empty_count());
    while !state.grid().is_complete() {
        let mut choices = applicable_assignments(&state);
        let index = steps.len() + 1;
        if choices.is_empty() {
            let pick = select_unchecked(&state, rng.next_u64(), config)?;
            state.assign(pick.cell, pick.value)?;
            steps.push(SolveStep {
                index,
                choice: StepChoice::Refutation(pick),
                branching: 0,
            });
        } else {
            let branching = choices.len();
            let choice = choices.swap_remove(rng.random_range(0..branching));
            state.assign(choice.cell, choice.value)?;
            steps.push(SolveStep {
                index,
                choice: StepChoice::Simple(choice),
                branching,
            });
        }
    }
    Ok(SolveTrace { steps })
}

/// `runs` independent traces; run `r` uses sub-seed `derive_seed(seed, r)`.
pub fn run_batch(grid: &Grid, runs: usize, seed: u64) -> Result<Vec<SolveTrace>> {
    if runs == 0 {
        return Err(Error::InvalidParameter("runs must be at least 1".into()));
    }
    require_well_posed(grid)?;
    let config = RefutationConfig::for_order(grid.order());
    (0..runs)
        .into_par_iter()
        .map(|r| run_model(grid, derive_seed(seed, r as u64), config))
        .collect()
}

/// Both model-based difficulty metrics, computed from one batch of traces.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModelMetrics {
    pub refutation_sum: f64,
    pub dependency: f64,
}

pub fn model_metrics(grid: &Grid, k_dep: usize, runs: usize, seed: u64) -> Result<ModelMetrics> {
    let traces = run_batch(grid, runs, seed)?;
    Ok(ModelMetrics {
        refutation_sum: refutation_sum_of(&traces),
        dependency: dependency_of(&traces, k_dep)?,
    })
}

fn refutation_sum_of(traces: &[SolveTrace]) -> f64 {
    let total: u64 = traces.iter().map(SolveTrace::refutation_sum).sum();
    total as f64 / traces.len() as f64
}

fn dependency_of(traces: &[SolveTrace], k_dep: usize) -> Result<f64> {
    if k_dep == 0 {
        return Err(Error::InvalidParameter("k_dep must be at least 1".into()));
    }
    let mut sum = 0.0;
    for t in traces {
        sum += t
            .mean_branching(k_dep)
            .ok_or_else(|| Error::DegenerateInput("puzzle has no empty cell".into()))?;
    }
    Ok(sum / traces.len() as f64)
}

/// Mean over runs of the total refutation cost of a trace.
pub fn refutation_sum_metric(grid: &Grid, runs: usize, seed: u64) -> Result<f64> {
    Ok(refutation_sum_of(&run_batch(grid, runs, seed)?))
}

/// Mean over runs of the mean branching in the first `k_dep` steps.
pub fn dependency_metric(grid: &Grid, k_dep: usize, runs: usize, seed: u64) -> Result<f64> {
    dependency_of(&run_batch(grid, runs, seed)?, k_dep)
}

/// Mean step index at which each initially empty cell is filled; `None`
/// for givens.
pub fn mean_fill_order(grid: &Grid, runs: usize, seed: u64) -> Result<Vec<Option<f64>>> {
    let traces = run_batch(grid, runs, seed)?;
    Ok(fill_order_of(grid, &traces))
}

pub fn fill_order_of(grid: &Grid, traces: &[SolveTrace]) -> Vec<Option<f64>> {
    let mut sums = vec![0usize; grid.len()];
    for t in traces {
        for s in &t.steps {
            sums[s.cell()] += s.index;
        }
    }
    sums.iter()
        .enumerate()
        .map(|(cell, &s)| {
            grid.value(cell)
                .is_none()
                .then(|| s as f64 / traces.len() as f64)
        })
        .collect()
}
