//! Complete search over (possibly relaxed) constraint graphs: solving,
//! solution counting and enumeration, well-posedness, the backtracking
//! baseline metric, and puzzle generation.
//!
//! Two search strategies live here. The default one picks the cell with the
//! fewest candidates and propagates naked and hidden singles at every node;
//! it is used for counting and generation. The row-major strategy is plain
//! chronological backtracking (cells in row-major order, values ascending,
//! no propagation) and exists so that the backtracking metric is a fixed,
//! well-defined quantity.

use rand::seq::SliceRandom;
use serde::Serialize;

use crate::board::{Grid, Order, SudokuGraph};
use crate::error::{Error, Result};
use crate::rng::{rng_from, Rng};

/// Default enumeration cap for counting and relaxation experiments.
pub const DEFAULT_CAP: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    /// Branching assignments made by the search.
    pub nodes_expanded: u64,
    /// Branching assignments later retracted because their subtree failed.
    pub backtracks: u64,
    pub solutions_found: u64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SearchOrder {
    /// Fewest-candidates cell first, with single propagation.
    #[default]
    MostConstrained,
    /// Row-major cells, ascending values, no propagation.
    RowMajor,
}

const MAX_CELLS: usize = 81;

#[derive(Clone, Copy)]
struct Node {
    values: [u8; MAX_CELLS],
    cands: [u16; MAX_CELLS],
    empties: usize,
}

struct Engine<'g> {
    graph: &'g SudokuGraph,
    cells: usize,
    full: u16,
    units: Vec<&'static [usize]>,
}

enum Flow {
    Continue,
    Stop,
}

impl<'g> Engine<'g> {
    fn new(graph: &'g SudokuGraph) -> Self {
        let order = graph.order();
        Engine {
            graph,
            cells: order.cells(),
            full: order.all_values().bits(),
            units: graph
                .intact_units()
                .iter()
                .map(|&u| order.unit_cells(u))
                .collect(),
        }
    }

    fn root(&self, grid: &Grid) -> Node {
        let mut node = Node {
            values: [0; MAX_CELLS],
            cands: [0; MAX_CELLS],
            empties: 0,
        };
        for cell in 0..self.cells {
            node.cands[cell] = self.full;
        }
        node.empties = self.cells;
        for (cell, &v) in grid.values().iter().enumerate() {
            if v != 0 {
                self.assign(&mut node, cell, v);
            }
        }
        node
    }

    fn assign(&self, node: &mut Node, cell: usize, value: u8) {
        node.values[cell] = value;
        node.cands[cell] = 1 << value;
        node.empties -= 1;
        let bit = !(1u16 << value);
        for nb in self.graph.neighbors(cell) {
            if node.values[nb] == 0 {
                node.cands[nb] &= bit;
            }
        }
    }

    /// Applies naked and hidden singles to a fixpoint. Returns false on a
    /// contradiction.
    fn propagate(&self, node: &mut Node) -> bool {
        loop {
            let mut changed = false;
            for cell in 0..self.cells {
                if node.values[cell] != 0 {
                    continue;
                }
                let c = node.cands[cell];
                if c == 0 {
                    return false;
                }
                if c.count_ones() == 1 {
                    self.assign(node, cell, c.trailing_zeros() as u8);
                    changed = true;
                }
            }
            for unit in &self.units {
                let (mut placed, mut once, mut twice) = (0u16, 0u16, 0u16);
                for &cell in unit.iter() {
                    let v = node.values[cell];
                    if v != 0 {
                        placed |= 1 << v;
                    } else {
                        let bits = node.cands[cell];
                        twice |= once & bits;
                        once |= bits;
                    }
                }
                if self.full & !placed & !once != 0 {
                    return false;
                }
                let mut hidden = once & !twice & !placed;
                while hidden != 0 {
                    let v = hidden.trailing_zeros() as u8;
                    hidden &= hidden - 1;
                    let host = unit
                        .iter()
                        .copied()
                        .find(|&c| node.values[c] == 0 && node.cands[c] & (1 << v) != 0);
                    match host {
                        Some(cell) => {
                            self.assign(node, cell, v);
                            changed = true;
                        }
                        None => return false,
                    }
                }
            }
            if !changed {
                return true;
            }
        }
    }

    fn pick_cell(&self, node: &Node) -> usize {
        let mut best = usize::MAX;
        let mut best_len = u32::MAX;
        for cell in 0..self.cells {
            if node.values[cell] == 0 {
                let len = node.cands[cell].count_ones();
                if len < best_len {
                    best = cell;
                    best_len = len;
                    if len == 2 {
                        break;
                    }
                }
            }
        }
        best
    }

    /// Depth-first search visiting every solution until `visit` asks to
    /// stop. Returns whether the subtree produced a solution, and whether to
    /// stop.
    fn search<F>(
        &self,
        mut node: Node,
        stats: &mut SearchStats,
        rng: Option<&mut Rng>,
        visit: &mut F,
    ) -> (bool, Flow)
    where
        F: FnMut(&[u8]) -> Flow,
    {
        if !self.propagate(&mut node) {
            return (false, Flow::Continue);
        }
        if node.empties == 0 {
            stats.solutions_found += 1;
            return (true, visit(&node.values[..self.cells]));
        }
        let cell = self.pick_cell(&node);
        let mut values: Vec<u8> = (1..16u8)
            .filter(|&v| node.cands[cell] & (1 << v) != 0)
            .collect();
        let mut rng = rng;
        if let Some(r) = rng.as_deref_mut() {
            values.shuffle(r);
        }
        let mut found = false;
        for v in values {
            let mut child = node;
            self.assign(&mut child, cell, v);
            stats.nodes_expanded += 1;
            let (ok, flow) = self.search(child, stats, rng.as_deref_mut(), visit);
            if !ok {
                stats.backtracks += 1;
            }
            found |= ok;
            if let Flow::Stop = flow {
                return (found, Flow::Stop);
            }
        }
        (found, Flow::Continue)
    }
}

fn check(grid: &Grid, graph: &SudokuGraph) -> Result<()> {
    if grid.order() != graph.order() {
        return Err(Error::OrderMismatch);
    }
    if let Some((first, second)) = grid.conflict(graph) {
        return Err(Error::InconsistentGrid { first, second });
    }
    Ok(())
}

fn with_values(grid: &Grid, values: &[u8]) -> Grid {
    let mut out = grid.clone();
    for (cell, &v) in values.iter().enumerate() {
        if grid.value(cell).is_none() {
            out.put(cell, v);
        }
    }
    out
}

/// Finds a complete consistent extension with the default strategy.
pub fn solve(grid: &Grid, graph: &SudokuGraph) -> Result<(Option<Grid>, SearchStats)> {
    solve_with_order(grid, graph, SearchOrder::MostConstrained)
}

pub fn solve_with_order(
    grid: &Grid,
    graph: &SudokuGraph,
    order: SearchOrder,
) -> Result<(Option<Grid>, SearchStats)> {
    check(grid, graph)?;
    match order {
        SearchOrder::MostConstrained => {
            let engine = Engine::new(graph);
            let mut stats = SearchStats::default();
            let mut solution = None;
            engine.search(engine.root(grid), &mut stats, None, &mut |values| {
                solution = Some(with_values(grid, values));
                Flow::Stop
            });
            Ok((solution, stats))
        }
        SearchOrder::RowMajor => Ok(row_major(grid, graph)),
    }
}

fn row_major(grid: &Grid, graph: &SudokuGraph) -> (Option<Grid>, SearchStats) {
    let side = grid.order().side();
    let stride = side + 1;
    let empties: Vec<usize> = grid.empty_cells().collect();
    let neighbors: Vec<Vec<usize>> = (0..grid.len())
        .map(|c| graph.neighbors(c).collect())
        .collect();
    // blocked[cell * stride + v]: filled neighbours of `cell` holding `v`
    let mut blocked = vec![0u8; grid.len() * stride];
    for (cell, &v) in grid.values().iter().enumerate() {
        if v != 0 {
            for &nb in &neighbors[cell] {
                blocked[nb * stride + v as usize] += 1;
            }
        }
    }
    let mut current = vec![0u8; empties.len()];
    let mut stats = SearchStats::default();
    let mut pos = 0usize;
    while pos < empties.len() {
        let cell = empties[pos];
        let prev = current[pos];
        if prev != 0 {
            for &nb in &neighbors[cell] {
                blocked[nb * stride + prev as usize] -= 1;
            }
        }
        let next = (prev as usize + 1..=side).find(|&v| blocked[cell * stride + v] == 0);
        match next {
            Some(v) => {
                current[pos] = v as u8;
                for &nb in &neighbors[cell] {
                    blocked[nb * stride + v] += 1;
                }
                stats.nodes_expanded += 1;
                pos += 1;
            }
            None => {
                current[pos] = 0;
                if pos == 0 {
                    return (None, stats);
                }
                pos -= 1;
                stats.backtracks += 1;
            }
        }
    }
    let mut solution = grid.clone();
    for (&cell, &v) in empties.iter().zip(&current) {
        solution.put(cell, v);
    }
    stats.solutions_found = 1;
    (Some(solution), stats)
}

/// Number of complete consistent extensions, saturating at `cap`.
pub fn count_solutions(grid: &Grid, graph: &SudokuGraph, cap: u64) -> Result<u64> {
    enumerate_solutions(grid, graph, cap, |_| {})
}

/// Calls `visit` with the cell values of each solution, stopping after
/// `cap` solutions. Returns the number visited.
pub fn enumerate_solutions<F>(
    grid: &Grid,
    graph: &SudokuGraph,
    cap: u64,
    mut visit: F,
) -> Result<u64>
where
    F: FnMut(&[u8]),
{
    if cap == 0 {
        return Err(Error::InvalidParameter("cap must be at least 1".into()));
    }
    check(grid, graph)?;
    let engine = Engine::new(graph);
    let mut count = 0u64;
    let mut stats = SearchStats::default();
    engine.search(engine.root(grid), &mut stats, None, &mut |values| {
        visit(values);
        count += 1;
        if count >= cap {
            Flow::Stop
        } else {
            Flow::Continue
        }
    });
    Ok(count)
}

/// True iff the puzzle has exactly one solution under the full graph.
pub fn is_well_posed(grid: &Grid) -> Result<bool> {
    let graph = SudokuGraph::full(grid.order());
    Ok(count_solutions(grid, &graph, 2)? == 1)
}

pub(crate) fn require_well_posed(grid: &Grid) -> Result<()> {
    if is_well_posed(grid)? {
        Ok(())
    } else {
        Err(Error::NotWellPosed)
    }
}

/// Backtrack events of row-major chronological backtracking.
pub fn backtracking_metric(grid: &Grid) -> Result<u64> {
    require_well_posed(grid)?;
    let graph = SudokuGraph::full(grid.order());
    Ok(row_major(grid, &graph).1.backtracks)
}

/// A uniformly shuffled complete grid, built by randomized search.
pub fn random_solution(order: Order, rng: &mut Rng) -> Grid {
    let graph = SudokuGraph::full(order);
    let engine = Engine::new(&graph);
    let empty = Grid::empty(order);
    let mut stats = SearchStats::default();
    let mut solution = None;
    engine.search(engine.root(&empty), &mut stats, Some(rng), &mut |values| {
        solution = Some(values.to_vec());
        Flow::Stop
    });
    let values = solution.expect("the empty grid is solvable");
    Grid::from_values(order, &values).expect("search output is consistent")
}

/// Generates a well-posed puzzle: fill a random complete grid, then visit
/// cells in random order and blank each one whose removal keeps the
/// solution unique. Stops once `target_givens` is reached or every cell has
/// been tried, so the result can have more givens than asked for.
pub fn generate_puzzle(order: Order, seed: u64, target_givens: usize) -> Grid {
    let mut rng = rng_from(seed);
    let solution = random_solution(order, &mut rng);
    let graph = SudokuGraph::full(order);
    let mut values = solution.values().to_vec();
    let mut cells: Vec<usize> = (0..order.cells()).collect();
    cells.shuffle(&mut rng);
    let mut givens = order.cells();
    for cell in cells {
        if givens <= target_givens {
            break;
        }
        let kept = values[cell];
        values[cell] = 0;
        let candidate = Grid::from_values(order, &values).expect("subset of a solution");
        if count_solutions(&candidate, &graph, 2).expect("consistent") == 1 {
            givens -= 1;
        } else {
            values[cell] = kept;
        }
    }
    Grid::from_values(order, &values).expect("subset of a solution")
}
