//! Board representation: grids, units, the peer graph, and candidate sets.
//!
//! Cells are indexed row-major from `0` to `n⁴ - 1`. Units are numbered rows
//! first, then columns, then boxes, so for the classic board rows are
//! `0..9`, columns `9..18` and boxes `18..27`.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Box size of a board: `Two` is the 4×4 puzzle, `Three` the classic 9×9.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Order {
    Two,
    Three,
}

impl Order {
    pub fn new(n: u8) -> Result<Self> {
        match n {
            2 => Ok(Order::Two),
            3 => Ok(Order::Three),
            other => Err(Error::UnsupportedOrder(other)),
        }
    }

    pub fn from_cell_count(len: usize) -> Option<Self> {
        match len {
            16 => Some(Order::Two),
            81 => Some(Order::Three),
            _ => None,
        }
    }

    /// `n`, the box side length.
    pub fn box_size(self) -> usize {
        match self {
            Order::Two => 2,
            Order::Three => 3,
        }
    }

    /// `n²`, the number of values and the length of a row.
    pub fn side(self) -> usize {
        self.box_size() * self.box_size()
    }

    /// `n⁴`, the number of cells.
    pub fn cells(self) -> usize {
        self.side() * self.side()
    }

    pub fn units(self) -> usize {
        3 * self.side()
    }

    pub fn all_values(self) -> ValueSet {
        ValueSet::full(self.side() as u8)
    }

    pub(crate) fn layout(self) -> &'static Layout {
        static TWO: OnceLock<Layout> = OnceLock::new();
        static THREE: OnceLock<Layout> = OnceLock::new();
        match self {
            Order::Two => TWO.get_or_init(|| Layout::new(self)),
            Order::Three => THREE.get_or_init(|| Layout::new(self)),
        }
    }

    /// Cells of unit `unit`, in ascending order.
    pub fn unit_cells(self, unit: usize) -> &'static [usize] {
        &self.layout().units[unit]
    }

    /// The row, column and box units containing `cell`.
    pub fn units_of(self, cell: usize) -> [usize; 3] {
        self.layout().cell_units[cell]
    }

    pub fn row_col(self, cell: usize) -> (usize, usize) {
        (cell / self.side(), cell % self.side())
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.box_size())
    }
}

pub(crate) struct Layout {
    pub(crate) units: Vec<Vec<usize>>,
    pub(crate) cell_units: Vec<[usize; 3]>,
    pub(crate) peers: Vec<u128>,
}

impl Layout {
    fn new(order: Order) -> Self {
        let n = order.box_size();
        let side = order.side();
        let mut units = vec![Vec::with_capacity(side); 3 * side];
        let mut cell_units = Vec::with_capacity(order.cells());
        for cell in 0..order.cells() {
            let (r, c) = (cell / side, cell % side);
            let b = (r / n) * n + c / n;
            let ids = [r, side + c, 2 * side + b];
            for &u in &ids {
                units[u].push(cell);
            }
            cell_units.push(ids);
        }
        let mut peers = vec![0u128; order.cells()];
        for unit in &units {
            for &a in unit {
                for &b in unit {
                    if a != b {
                        peers[a] |= 1u128 << b;
                    }
                }
            }
        }
        Layout {
            units,
            cell_units,
            peers,
        }
    }
}

/// A set of cell values `1..=n²`, stored as a bit mask.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct ValueSet(u16);

impl ValueSet {
    pub const EMPTY: ValueSet = ValueSet(0);

    pub fn full(side: u8) -> Self {
        ValueSet(((1u16 << side) - 1) << 1)
    }

    pub fn single(value: u8) -> Self {
        ValueSet(1 << value)
    }

    pub fn from_bits(bits: u16) -> Self {
        ValueSet(bits & !1)
    }

    pub fn bits(self) -> u16 {
        self.0
    }

    pub fn contains(self, value: u8) -> bool {
        value < 16 && self.0 & (1 << value) != 0
    }

    pub fn insert(&mut self, value: u8) {
        self.0 |= 1 << value;
    }

    pub fn remove(&mut self, value: u8) {
        self.0 &= !(1 << value);
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// The only member, if the set is a singleton.
    pub fn only(self) -> Option<u8> {
        (self.0.count_ones() == 1).then(|| self.0.trailing_zeros() as u8)
    }

    pub fn is_subset(self, other: ValueSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(self) -> ValueIter {
        ValueIter(self.0)
    }
}

impl fmt::Debug for ValueSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl FromIterator<u8> for ValueSet {
    fn from_iter<I: IntoIterator<Item = u8>>(iter: I) -> Self {
        let mut set = ValueSet::EMPTY;
        for v in iter {
            set.insert(v);
        }
        set
    }
}

impl IntoIterator for ValueSet {
    type Item = u8;
    type IntoIter = ValueIter;

    fn into_iter(self) -> ValueIter {
        self.iter()
    }
}

pub struct ValueIter(u16);

impl Iterator for ValueIter {
    type Item = u8;

    fn next(&mut self) -> Option<u8> {
        if self.0 == 0 {
            return None;
        }
        let v = self.0.trailing_zeros() as u8;
        self.0 &= self.0 - 1;
        Some(v)
    }
}

/// Iterates the set bits of a 128-bit cell mask.
pub(crate) fn mask_cells(mut mask: u128) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            return None;
        }
        let c = mask.trailing_zeros() as usize;
        mask &= mask - 1;
        Some(c)
    })
}

/// A board of values (0 = empty) with the mask of given cells.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Grid {
    order: Order,
    cells: Vec<u8>,
    givens: Vec<bool>,
}

impl Grid {
    pub fn empty(order: Order) -> Self {
        Grid {
            order,
            cells: vec![0; order.cells()],
            givens: vec![false; order.cells()],
        }
    }

    /// Builds a puzzle from raw values; every nonzero cell becomes a given.
    pub fn from_values(order: Order, values: &[u8]) -> Result<Self> {
        if values.len() != order.cells() {
            return Err(Error::BadLength { len: values.len() });
        }
        let side = order.side() as u8;
        if let Some(pos) = values.iter().position(|&v| v > side) {
            return Err(Error::BadCharacter {
                pos,
                ch: char::from_digit(values[pos] as u32, 36).unwrap_or('?'),
            });
        }
        let grid = Grid {
            order,
            cells: values.to_vec(),
            givens: values.iter().map(|&v| v != 0).collect(),
        };
        if let Some((first, second)) = grid.conflict(&SudokuGraph::full(order)) {
            return Err(Error::InconsistentGivens {
                first,
                second,
                value: grid.cells[first],
            });
        }
        Ok(grid)
    }

    pub fn order(&self) -> Order {
        self.order
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn value(&self, cell: usize) -> Option<u8> {
        match self.cells[cell] {
            0 => None,
            v => Some(v),
        }
    }

    pub fn values(&self) -> &[u8] {
        &self.cells
    }

    pub fn is_given(&self, cell: usize) -> bool {
        self.givens[cell]
    }

    pub fn givens(&self) -> &[bool] {
        &self.givens
    }

    pub fn given_count(&self) -> usize {
        self.givens.iter().filter(|&&g| g).count()
    }

    pub fn empty_cells(&self) -> impl Iterator<Item = usize> + '_ {
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, &v)| v == 0)
            .map(|(i, _)| i)
    }

    pub fn empty_count(&self) -> usize {
        self.cells.iter().filter(|&&v| v == 0).count()
    }

    pub fn is_complete(&self) -> bool {
        self.cells.iter().all(|&v| v != 0)
    }

    /// Fills an empty cell. Givens and occupied cells are rejected.
    pub fn set(&mut self, cell: usize, value: u8) -> Result<()> {
        if cell >= self.cells.len()
            || self.cells[cell] != 0
            || value == 0
            || value as usize > self.order.side()
        {
            return Err(Error::InvalidAssignment { cell, value });
        }
        self.cells[cell] = value;
        Ok(())
    }

    pub(crate) fn put(&mut self, cell: usize, value: u8) {
        self.cells[cell] = value;
    }

    /// The puzzle formed by this grid's givens only.
    pub fn givens_only(&self) -> Grid {
        let cells = self
            .cells
            .iter()
            .zip(&self.givens)
            .map(|(&v, &g)| if g { v } else { 0 })
            .collect();
        Grid {
            order: self.order,
            cells,
            givens: self.givens.clone(),
        }
    }

    /// Re-marks every filled cell as a given.
    pub fn as_puzzle(&self) -> Grid {
        Grid {
            order: self.order,
            cells: self.cells.clone(),
            givens: self.cells.iter().map(|&v| v != 0).collect(),
        }
    }

    /// First pair of adjacent cells sharing a value, if any.
    pub fn conflict(&self, graph: &SudokuGraph) -> Option<(usize, usize)> {
        for (a, &va) in self.cells.iter().enumerate() {
            if va == 0 {
                continue;
            }
            for b in mask_cells(graph.neighbor_mask(a) >> (a + 1)) {
                let b = a + 1 + b;
                if self.cells[b] == va {
                    return Some((a, b));
                }
            }
        }
        None
    }

    pub fn is_consistent(&self, graph: &SudokuGraph) -> bool {
        self.conflict(graph).is_none()
    }

    /// The line form: one character per cell, `.` for empty.
    pub fn to_line(&self) -> String {
        self.cells
            .iter()
            .map(|&v| {
                if v == 0 {
                    '.'
                } else {
                    char::from_digit(v as u32, 10).unwrap()
                }
            })
            .collect()
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_line())
    }
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Grid({})", self.to_line())
    }
}

impl FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_grid(s)
    }
}

/// Parses the line format: `n⁴` characters, digits for values, `.` or `0`
/// for empty cells. Surrounding whitespace is ignored.
pub fn parse_grid(text: &str) -> Result<Grid> {
    let text = text.trim();
    let len = text.chars().count();
    let order = Order::from_cell_count(len).ok_or(Error::BadLength { len })?;
    let side = order.side() as u32;
    let mut values = Vec::with_capacity(len);
    for (pos, ch) in text.chars().enumerate() {
        let v = match ch {
            '.' | '0' => 0,
            _ => match ch.to_digit(10) {
                Some(d) if d >= 1 && d <= side => d as u8,
                _ => return Err(Error::BadCharacter { pos, ch }),
            },
        };
        values.push(v);
    }
    Grid::from_values(order, &values)
}

/// An unordered pair of distinct cells, stored with `a < b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    a: usize,
    b: usize,
}

impl Edge {
    pub fn new(x: usize, y: usize) -> Self {
        assert_ne!(x, y, "self-loop");
        Edge {
            a: x.min(y),
            b: x.max(y),
        }
    }

    pub fn cells(self) -> (usize, usize) {
        (self.a, self.b)
    }
}

/// The peer graph over cells. The full graph joins every pair of cells that
/// share a row, column, or box; relaxation experiments delete edges from it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SudokuGraph {
    order: Order,
    adjacency: Vec<u128>,
    /// Units whose cells are still pairwise adjacent.
    intact_units: Vec<usize>,
}

pub fn build_graph(n: u8) -> Result<SudokuGraph> {
    Ok(SudokuGraph::full(Order::new(n)?))
}

impl SudokuGraph {
    pub fn full(order: Order) -> Self {
        SudokuGraph {
            order,
            adjacency: order.layout().peers.clone(),
            intact_units: (0..order.units()).collect(),
        }
    }

    /// A graph on the cells of `order` with no edges at all.
    pub fn edgeless(order: Order) -> Self {
        SudokuGraph {
            order,
            adjacency: vec![0; order.cells()],
            intact_units: Vec::new(),
        }
    }

    pub fn order(&self) -> Order {
        self.order
    }

    pub fn neighbor_mask(&self, cell: usize) -> u128 {
        self.adjacency[cell]
    }

    pub fn neighbors(&self, cell: usize) -> impl Iterator<Item = usize> {
        mask_cells(self.adjacency[cell])
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a != b && self.adjacency[a] & (1u128 << b) != 0
    }

    pub fn degree(&self, cell: usize) -> usize {
        self.adjacency[cell].count_ones() as usize
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency
            .iter()
            .map(|m| m.count_ones() as usize)
            .sum::<usize>()
            / 2
    }

    /// All edges in lexicographic order.
    pub fn edges(&self) -> Vec<Edge> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (a, &mask) in self.adjacency.iter().enumerate() {
            for b in mask_cells(mask) {
                if b > a {
                    out.push(Edge { a, b });
                }
            }
        }
        out
    }

    /// Units that are still complete cliques, ascending.
    pub fn intact_units(&self) -> &[usize] {
        &self.intact_units
    }

    pub fn is_unit_intact(&self, unit: usize) -> bool {
        self.intact_units.binary_search(&unit).is_ok()
    }

    pub fn remove_edge(&mut self, edge: Edge) {
        let (a, b) = edge.cells();
        self.adjacency[a] &= !(1u128 << b);
        self.adjacency[b] &= !(1u128 << a);
        let order = self.order;
        self.intact_units.retain(|&u| {
            let cells = order.unit_cells(u);
            !(cells.contains(&a) && cells.contains(&b))
        });
    }

    pub fn without_edges<'a>(&self, edges: impl IntoIterator<Item = &'a Edge>) -> SudokuGraph {
        let mut g = self.clone();
        for &e in edges {
            g.remove_edge(e);
        }
        g
    }
}

/// A grid together with the candidate set of every cell under a graph.
#[derive(Clone, Debug)]
pub struct CandidateState<'g> {
    graph: &'g SudokuGraph,
    grid: Grid,
    candidates: Vec<ValueSet>,
}

/// Computes candidate sets: a filled cell's set is its value; an empty
/// cell's set is every value not held by an adjacent filled cell.
pub fn candidates<'g>(grid: Grid, graph: &'g SudokuGraph) -> Result<CandidateState<'g>> {
    CandidateState::new(grid, graph)
}

impl<'g> CandidateState<'g> {
    pub fn new(grid: Grid, graph: &'g SudokuGraph) -> Result<Self> {
        if grid.order() != graph.order() {
            return Err(Error::OrderMismatch);
        }
        if let Some((first, second)) = grid.conflict(graph) {
            return Err(Error::InconsistentGrid { first, second });
        }
        let all = grid.order().all_values();
        let candidates = (0..grid.len())
            .map(|cell| match grid.value(cell) {
                Some(v) => ValueSet::single(v),
                None => {
                    let mut set = all;
                    for nb in graph.neighbors(cell) {
                        set.remove(grid.cells[nb]);
                    }
                    set
                }
            })
            .collect();
        Ok(CandidateState {
            graph,
            grid,
            candidates,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn graph(&self) -> &'g SudokuGraph {
        self.graph
    }

    pub fn order(&self) -> Order {
        self.grid.order()
    }

    pub fn candidates(&self, cell: usize) -> ValueSet {
        self.candidates[cell]
    }

    pub fn candidate_sets(&self) -> &[ValueSet] {
        &self.candidates
    }

    pub fn into_grid(self) -> Grid {
        self.grid
    }

    /// Fills an empty cell with one of its candidates and removes the value
    /// from the candidate sets of its empty neighbours.
    pub fn assign(&mut self, cell: usize, value: u8) -> Result<()> {
        if cell >= self.grid.len()
            || self.grid.cells[cell] != 0
            || !self.candidates[cell].contains(value)
        {
            return Err(Error::InvalidAssignment { cell, value });
        }
        self.assign_unchecked(cell, value);
        Ok(())
    }

    pub(crate) fn assign_unchecked(&mut self, cell: usize, value: u8) {
        self.grid.cells[cell] = value;
        self.candidates[cell] = ValueSet::single(value);
        for nb in self.graph.neighbors(cell) {
            if self.grid.cells[nb] == 0 {
                self.candidates[nb].remove(value);
            }
        }
    }
}

/// True iff the grid has no empty cell and no two adjacent cells share a value.
pub fn is_solved(grid: &Grid, graph: &SudokuGraph) -> bool {
    grid.order() == graph.order() && grid.is_complete() && grid.is_consistent(graph)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SOLVED4: &str = "1234341221434321";

    #[test]
    fn parses_complete_4x4() {
        let g = parse_grid(SOLVED4).unwrap();
        assert_eq!(g.order(), Order::Two);
        assert_eq!(g.given_count(), 16);
        assert!(is_solved(&g, &SudokuGraph::full(Order::Two)));
    }

    #[test]
    fn parses_partial_4x4() {
        let g = parse_grid("12..341221434321").unwrap();
        assert_eq!(g.empty_count(), 2);
        assert_eq!(g.given_count(), 14);
        assert!(!g.is_given(2));
        assert_eq!(g.to_line(), "12..341221434321");
    }

    #[test]
    fn rejects_bad_input() {
        let dup = format!("11..{}", ".".repeat(12));
        assert!(matches!(
            parse_grid(&dup),
            Err(Error::InconsistentGivens { value: 1, .. })
        ));
        assert_eq!(parse_grid("123"), Err(Error::BadLength { len: 3 }));
        assert!(matches!(
            parse_grid("5234341221434321"),
            Err(Error::BadCharacter { pos: 0, ch: '5' })
        ));
        assert!(matches!(
            parse_grid(&format!("x{}", ".".repeat(80))),
            Err(Error::BadCharacter { pos: 0, ch: 'x' })
        ));
    }

    #[test]
    fn zero_and_dot_are_blank() {
        let a = parse_grid(&"0".repeat(81)).unwrap();
        let b = parse_grid(&".".repeat(81)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn graph_sizes() {
        let g3 = build_graph(3).unwrap();
        assert_eq!(g3.edge_count(), 810);
        assert!((0..81).all(|c| g3.degree(c) == 20));
        assert!(g3.has_edge(0, 8));
        assert!(!g3.has_edge(0, 0));
        let g2 = build_graph(2).unwrap();
        assert_eq!(g2.edge_count(), 56);
        assert!((0..16).all(|c| g2.degree(c) == 7));
        assert_eq!(build_graph(4), Err(Error::UnsupportedOrder(4)));
    }

    #[test]
    fn edge_decomposition_by_unit_kind() {
        // 324 row edges + 324 column edges + 162 box-only edges
        let g = SudokuGraph::full(Order::Three);
        let (mut row, mut col, mut box_only) = (0, 0, 0);
        for e in g.edges() {
            let (a, b) = e.cells();
            let (ra, ca) = (a / 9, a % 9);
            let (rb, cb) = (b / 9, b % 9);
            if ra == rb {
                row += 1;
            } else if ca == cb {
                col += 1;
            } else {
                box_only += 1;
            }
        }
        assert_eq!((row, col, box_only), (324, 324, 162));
    }

    #[test]
    fn removing_edges_breaks_units() {
        let mut g = SudokuGraph::full(Order::Two);
        assert_eq!(g.intact_units().len(), 12);
        // cells 0 and 1 share row 0 and box 0
        g.remove_edge(Edge::new(1, 0));
        assert!(!g.has_edge(0, 1));
        assert!(!g.is_unit_intact(0));
        assert!(!g.is_unit_intact(8));
        assert!(g.is_unit_intact(4));
        assert_eq!(g.edge_count(), 55);
    }

    #[test]
    fn candidate_examples() {
        let g = SudokuGraph::full(Order::Three);
        let st = candidates(Grid::empty(Order::Three), &g).unwrap();
        assert!(st.candidate_sets().iter().all(|s| s.len() == 9));

        let solved = parse_grid(SOLVED4).unwrap();
        let g2 = SudokuGraph::full(Order::Two);
        let st = candidates(solved.clone(), &g2).unwrap();
        for c in 0..16 {
            assert_eq!(st.candidates(c).only(), solved.value(c));
        }

        let puzzle = parse_grid("12..341221434321").unwrap();
        let bare = SudokuGraph::edgeless(Order::Two);
        let st = candidates(puzzle, &bare).unwrap();
        assert_eq!(st.candidates(2), Order::Two.all_values());
        assert_eq!(st.candidates(3), Order::Two.all_values());
    }

    #[test]
    fn candidates_reject_conflicts() {
        let mut grid = Grid::empty(Order::Two);
        grid.set(0, 1).unwrap();
        grid.set(1, 1).unwrap();
        let g = SudokuGraph::full(Order::Two);
        assert!(matches!(
            candidates(grid.clone(), &g),
            Err(Error::InconsistentGrid {
                first: 0,
                second: 1
            })
        ));
        let relaxed = g.without_edges(&[Edge::new(0, 1)]);
        assert!(candidates(grid, &relaxed).is_ok());
    }

    #[test]
    fn is_solved_cases() {
        let g = SudokuGraph::full(Order::Two);
        assert!(is_solved(&parse_grid(SOLVED4).unwrap(), &g));
        assert!(!is_solved(&parse_grid(".234341221434321").unwrap(), &g));
        // rows are fine but the two boxes in the top band repeat values
        let bad = Grid::from_values(
            Order::Two,
            &[1, 2, 3, 4, 2, 3, 4, 1, 3, 4, 1, 2, 4, 1, 2, 3],
        );
        assert!(bad.is_err());
        let mut bare = Grid::empty(Order::Two);
        for (c, v) in [1, 2, 3, 4, 2, 3, 4, 1, 3, 4, 1, 2, 4, 1, 2, 3]
            .into_iter()
            .enumerate()
        {
            bare.set(c, v).unwrap();
        }
        assert!(!is_solved(&bare, &g));
        let relaxed = g.without_edges(&[Edge::new(1, 4), Edge::new(2, 7)]);
        assert!(!is_solved(&bare, &relaxed));
        assert!(is_solved(&bare, &SudokuGraph::edgeless(Order::Two)));
    }

    #[test]
    fn assign_updates_incrementally() {
        let g = SudokuGraph::full(Order::Three);
        let mut st = candidates(Grid::empty(Order::Three), &g).unwrap();
        st.assign(0, 5).unwrap();
        st.assign(4, 5).unwrap_err();
        st.assign(10, 3).unwrap();
        let fresh = candidates(st.grid().clone(), &g).unwrap();
        assert_eq!(st.candidate_sets(), fresh.candidate_sets());
        assert!(st.assign(0, 4).is_err());
        assert!(!st.candidates(8).contains(5));
    }
}
