//! Baseline difficulty metrics that do not model a human solver: the
//! number of givens and the length of a simulated-annealing search.
//!
//! The annealer keeps every box a permutation of `1..=n²` consistent with
//! its givens, so only rows and columns can conflict. Its cost is the
//! number of repeated values summed over all rows and columns, and a move
//! swaps two non-given cells of one box.

use rand::seq::IndexedRandom;
use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::board::Grid;
use crate::error::{Error, Result};
use crate::rng::{derive_seed, rng_from, Rng};
use crate::solver::require_well_posed;

pub const DEFAULT_ANNEAL_RUNS: usize = 10;

pub fn givens_metric(grid: &Grid) -> usize {
    grid.given_count()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnealParams {
    pub initial_temperature: f64,
    /// Multiplier applied after every `steps_per_temperature` proposals.
    pub cooling_factor: f64,
    pub steps_per_temperature: usize,
    /// Proposals per attempt before restarting from a fresh random fill.
    pub max_iterations: u64,
    /// Restarts allowed after the first attempt.
    pub restarts: usize,
}

impl Default for AnnealParams {
    fn default() -> Self {
        AnnealParams {
            initial_temperature: 0.5,
            cooling_factor: 0.99,
            steps_per_temperature: 100,
            max_iterations: 200_000,
            restarts: 5,
        }
    }
}

impl AnnealParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.initial_temperature > 0.0
            && self.cooling_factor > 0.0
            && self.cooling_factor < 1.0
            && self.steps_per_temperature > 0
            && self.max_iterations > 0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "bad annealing parameters {self:?}"
            )))
        }
    }
}

/// Annealing state for one attempt.
pub(crate) struct Annealer<'a> {
    puzzle: &'a Grid,
    side: usize,
    values: Vec<u8>,
    row_counts: Vec<u8>,
    col_counts: Vec<u8>,
    cost: u32,
    /// Free (non-given) cells per box, for boxes with at least two of them.
    movable: Vec<Vec<usize>>,
}

impl<'a> Annealer<'a> {
    pub(crate) fn new(puzzle: &'a Grid, rng: &mut Rng) -> Self {
        let order = puzzle.order();
        let side = order.side();
        let mut values = puzzle.values().to_vec();
        let mut movable = Vec::new();
        for b in 0..side {
            let cells = order.unit_cells(2 * side + b);
            let mut missing: Vec<u8> = (1..=side as u8)
                .filter(|v| !cells.iter().any(|&c| puzzle.value(c) == Some(*v)))
                .collect();
            let free: Vec<usize> = cells
                .iter()
                .copied()
                .filter(|&c| !puzzle.is_given(c))
                .collect();
            rand::seq::SliceRandom::shuffle(missing.as_mut_slice(), rng);
            for (&c, v) in free.iter().zip(missing) {
                values[c] = v;
            }
            if free.len() >= 2 {
                movable.push(free);
            }
        }
        let mut a = Annealer {
            puzzle,
            side,
            values,
            row_counts: vec![0; side * (side + 1)],
            col_counts: vec![0; side * (side + 1)],
            cost: 0,
            movable,
        };
        a.recount();
        a
    }

    fn recount(&mut self) {
        self.row_counts.iter_mut().for_each(|c| *c = 0);
        self.col_counts.iter_mut().for_each(|c| *c = 0);
        let stride = self.side + 1;
        for (cell, &v) in self.values.iter().enumerate() {
            let (r, c) = (cell / self.side, cell % self.side);
            self.row_counts[r * stride + v as usize] += 1;
            self.col_counts[c * stride + v as usize] += 1;
        }
        self.cost = self.full_cost();
    }

    pub(crate) fn cost(&self) -> u32 {
        self.cost
    }

    /// Cost recomputed from scratch.
    pub(crate) fn full_cost(&self) -> u32 {
        let mut cost = 0;
        for i in 0..self.side {
            let mut row_seen = 0u16;
            let mut col_seen = 0u16;
            for j in 0..self.side {
                row_seen |= 1 << self.values[i * self.side + j];
                col_seen |= 1 << self.values[j * self.side + i];
            }
            cost += (self.side - row_seen.count_ones() as usize) as u32;
            cost += (self.side - col_seen.count_ones() as usize) as u32;
        }
        cost
    }

    fn shift(counts: &mut [u8], idx: usize, add: bool) -> i32 {
        // a line's cost is the sum over values of max(0, count - 1)
        if add {
            counts[idx] += 1;
            i32::from(counts[idx] >= 2)
        } else {
            counts[idx] -= 1;
            -i32::from(counts[idx] >= 1)
        }
    }

    fn swap_counts(&mut self, a: usize, b: usize) -> i32 {
        let stride = self.side + 1;
        let (va, vb) = (self.values[a] as usize, self.values[b] as usize);
        let (ra, ca) = (a / self.side, a % self.side);
        let (rb, cb) = (b / self.side, b % self.side);
        let mut delta = 0;
        delta += Self::shift(&mut self.row_counts, ra * stride + va, false);
        delta += Self::shift(&mut self.row_counts, rb * stride + vb, false);
        delta += Self::shift(&mut self.row_counts, ra * stride + vb, true);
        delta += Self::shift(&mut self.row_counts, rb * stride + va, true);
        delta += Self::shift(&mut self.col_counts, ca * stride + va, false);
        delta += Self::shift(&mut self.col_counts, cb * stride + vb, false);
        delta += Self::shift(&mut self.col_counts, ca * stride + vb, true);
        delta += Self::shift(&mut self.col_counts, cb * stride + va, true);
        self.values.swap(a, b);
        delta
    }

    /// Proposes one swap at `temperature`; returns whether it was accepted.
    pub(crate) fn step(&mut self, temperature: f64, rng: &mut Rng) -> bool {
        let Some(cells) = self.movable.choose(rng) else {
            return false;
        };
        let i = rng.random_range(0..cells.len());
        let mut j = rng.random_range(0..cells.len() - 1);
        if j >= i {
            j += 1;
        }
        let (a, b) = (cells[i], cells[j]);
        debug_assert!(!self.puzzle.is_given(a) && !self.puzzle.is_given(b));
        let delta = self.swap_counts(a, b);
        let accept = delta <= 0 || rng.random::<f64>() < (-(delta as f64) / temperature).exp();
        if accept {
            self.cost = (self.cost as i32 + delta) as u32;
        } else {
            self.swap_counts(a, b);
        }
        accept
    }

    #[cfg(test)]
    pub(crate) fn values(&self) -> &[u8] {
        &self.values
    }
}

/// Outcome of one annealing run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AnnealRun {
    /// Proposals made across all attempts.
    pub iterations: u64,
    pub solved: bool,
}

pub fn anneal(grid: &Grid, params: &AnnealParams, rng: &mut Rng) -> AnnealRun {
    let mut iterations = 0u64;
    for _ in 0..=params.restarts {
        let mut state = Annealer::new(grid, rng);
        let mut temperature = params.initial_temperature;
        let mut attempt = 0u64;
        while state.cost() > 0 {
            if attempt == params.max_iterations {
                break;
            }
            state.step(temperature, rng);
            attempt += 1;
            if attempt.is_multiple_of(params.steps_per_temperature as u64) {
                temperature *= params.cooling_factor;
            }
        }
        iterations += attempt;
        if state.cost() == 0 {
            return AnnealRun {
                iterations,
                solved: true,
            };
        }
    }
    AnnealRun {
        iterations,
        solved: false,
    }
}

/// Mean proposals until a zero-cost grid over `runs` independent runs.
/// Runs that exhaust every restart contribute their full iteration count;
/// the metric fails only when no run succeeds.
pub fn annealing_metric(grid: &Grid, params: &AnnealParams, runs: usize, seed: u64) -> Result<f64> {
    params.validate()?;
    if runs == 0 {
        return Err(Error::InvalidParameter("runs must be at least 1".into()));
    }
    require_well_posed(grid)?;
    let results: Vec<AnnealRun> = (0..runs)
        .into_par_iter()
        .map(|r| anneal(grid, params, &mut rng_from(derive_seed(seed, r as u64))))
        .collect();
    if results.iter().all(|r| !r.solved) {
        return Err(Error::Unsolved);
    }
    let total: u64 = results.iter().map(|r| r.iterations).sum();
    Ok(total as f64 / runs as f64)
}

/// Checks the box-permutation invariant for a candidate fill.
#[cfg(test)]
pub(crate) fn boxes_are_permutations(order: crate::board::Order, values: &[u8]) -> bool {
    let side = order.side();
    (0..side).all(|b| {
        let seen: u16 = order
            .unit_cells(2 * side + b)
            .iter()
            .map(|&c| 1u16 << values[c])
            .fold(0, |a, x| a | x);
        seen == order.all_values().bits()
    })
}
