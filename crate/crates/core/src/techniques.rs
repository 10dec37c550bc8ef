//! The two simple logic techniques (naked single, hidden single), the
//! deduplicated list of assignments they justify, and contradiction tests.
//!
//! Hidden singles are only looked for in units that are still complete
//! cliques of the state's graph: once an edge inside a unit is removed the
//! unit no longer has to contain every value.

use serde::Serialize;

use crate::board::{CandidateState, Grid, SudokuGraph, ValueSet};
use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Technique {
    NakedSingle,
    HiddenSingle,
}

/// One application of a technique. `unit` is set only for hidden singles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct TechniqueInstance {
    pub kind: Technique,
    pub cell: usize,
    pub value: u8,
    pub unit: Option<usize>,
}

/// A distinct `(cell, value)` assignment together with every technique
/// instance that derives it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AssignmentChoice {
    pub cell: usize,
    pub value: u8,
    pub witnesses: Vec<TechniqueInstance>,
}

struct UnitScan {
    placed: u16,
    once: u16,
    twice: u16,
}

fn scan_unit(state: &CandidateState<'_>, unit: usize) -> UnitScan {
    let grid = state.grid();
    let (mut placed, mut once, mut twice) = (0u16, 0u16, 0u16);
    for &cell in state.order().unit_cells(unit) {
        match grid.value(cell) {
            Some(v) => placed |= 1 << v,
            None => {
                let bits = state.candidates(cell).bits();
                twice |= once & bits;
                once |= bits;
            }
        }
    }
    UnitScan {
        placed,
        once,
        twice,
    }
}

impl UnitScan {
    fn hidden(&self) -> u16 {
        self.once & !self.twice & !self.placed
    }
}

pub fn find_naked_singles(state: &CandidateState<'_>) -> Vec<TechniqueInstance> {
    state
        .grid()
        .empty_cells()
        .filter_map(|cell| {
            state
                .candidates(cell)
                .only()
                .map(|value| TechniqueInstance {
                    kind: Technique::NakedSingle,
                    cell,
                    value,
                    unit: None,
                })
        })
        .collect()
}

/// One instance per `(unit, value)` where the value is missing from the
/// unit and fits exactly one of its empty cells. Ordered by unit, then value.
pub fn find_hidden_singles(state: &CandidateState<'_>) -> Vec<TechniqueInstance> {
    let mut out = Vec::new();
    for &unit in state.graph().intact_units() {
        let scan = scan_unit(state, unit);
        for value in ValueSet::from_bits(scan.hidden()) {
            let cell = state
                .order()
                .unit_cells(unit)
                .iter()
                .copied()
                .find(|&c| state.grid().value(c).is_none() && state.candidates(c).contains(value))
                .expect("hidden value has a host cell");
            out.push(TechniqueInstance {
                kind: Technique::HiddenSingle,
                cell,
                value,
                unit: Some(unit),
            });
        }
    }
    out
}

/// Union of both finders, one entry per `(cell, value)`, ordered by cell
/// then value.
pub fn applicable_assignments(state: &CandidateState<'_>) -> Vec<AssignmentChoice> {
    let mut instances = find_naked_singles(state);
    instances.extend(find_hidden_singles(state));
    instances.sort_by_key(|i| (i.cell, i.value, i.kind, i.unit));
    let mut out: Vec<AssignmentChoice> = Vec::new();
    for inst in instances {
        match out.last_mut() {
            Some(last) if last.cell == inst.cell && last.value == inst.value => {
                last.witnesses.push(inst)
            }
            _ => out.push(AssignmentChoice {
                cell: inst.cell,
                value: inst.value,
                witnesses: vec![inst],
            }),
        }
    }
    out
}

/// Same `(cell, value)` list as [`applicable_assignments`] without building
/// witnesses. Used on the hot path of the solver model.
pub(crate) fn assignment_pairs(
    state: &CandidateState<'_>,
    marks: &mut Vec<u16>,
    out: &mut Vec<(usize, u8)>,
) {
    let grid = state.grid();
    marks.clear();
    marks.resize(grid.len(), 0);
    for cell in grid.empty_cells() {
        let set = state.candidates(cell);
        if set.len() == 1 {
            marks[cell] |= set.bits();
        }
    }
    for &unit in state.graph().intact_units() {
        let hidden = scan_unit(state, unit).hidden();
        if hidden == 0 {
            continue;
        }
        for &cell in state.order().unit_cells(unit) {
            if grid.value(cell).is_none() {
                marks[cell] |= state.candidates(cell).bits() & hidden;
            }
        }
    }
    out.clear();
    for (cell, &bits) in marks.iter().enumerate() {
        for value in ValueSet::from_bits(bits) {
            out.push((cell, value));
        }
    }
}

/// True when some empty cell has no candidate left, or some intact unit is
/// missing a value that none of its empty cells can take.
pub fn detect_contradiction(state: &CandidateState<'_>) -> bool {
    let grid = state.grid();
    if grid
        .empty_cells()
        .any(|cell| state.candidates(cell).is_empty())
    {
        return true;
    }
    let all = state.order().all_values().bits();
    state.graph().intact_units().iter().any(|&unit| {
        let scan = scan_unit(state, unit);
        all & !scan.placed & !scan.once != 0
    })
}

/// Applies simple techniques until none applies. The result is complete iff
/// the puzzle is a simple Sudoku.
pub fn fill_with_singles(grid: &Grid) -> Result<Grid> {
    let graph = SudokuGraph::full(grid.order());
    let mut state = CandidateState::new(grid.clone(), &graph)?;
    let mut marks = Vec::new();
    let mut pairs = Vec::new();
    loop {
        assignment_pairs(&state, &mut marks, &mut pairs);
        if pairs.is_empty() {
            return Ok(state.into_grid());
        }
        for &(cell, value) in &pairs {
            // conflicting pairs can only come from a puzzle without solution
            if state.grid().value(cell).is_none() && state.candidates(cell).contains(value) {
                state.assign_unchecked(cell, value);
            }
        }
        if detect_contradiction(&state) {
            return Ok(state.into_grid());
        }
    }
}

/// A puzzle is simple when naked and hidden singles alone solve it.
pub fn is_simple(grid: &Grid) -> Result<bool> {
    let filled = fill_with_singles(grid)?;
    Ok(filled.is_complete() && filled.is_consistent(&SudokuGraph::full(grid.order())))
}
