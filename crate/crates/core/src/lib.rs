//! Sudoku constraint engine and difficulty-rating metrics.
//!
//! The crate models Sudoku as graph coloring over the peer graph of cells
//! and rates puzzles in several ways: a randomized human-solver model
//! (refutation sum and step dependency), random constraint relaxation
//! (extra solutions and cell fixedness), and search baselines (backtracking
//! steps, simulated annealing steps, number of givens). The `evaluation`
//! module correlates any of these with human solving times.

pub mod baselines;
pub mod board;
pub mod cli;
pub mod error;
pub mod evaluation;
pub mod human_model;
pub mod relaxation;
pub mod rng;
pub mod solver;
pub mod techniques;

pub use board::{
    build_graph, candidates, is_solved, parse_grid, CandidateState, Edge, Grid, Order, SudokuGraph,
    ValueSet,
};
pub use error::{Error, Result};
