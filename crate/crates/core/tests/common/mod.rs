//! Reference implementations used as oracles by the integration tests.
//! They work on raw value arrays and share no code with the library.

#![allow(dead_code)]

use sudoku_rating::rng::derive_seed;
use sudoku_rating::solver::generate_puzzle;
use sudoku_rating::{Grid, Order};

/// Peers of `cell` in an `n²×n²` grid, computed from row/column/box rules.
pub fn peers(n: usize, cell: usize) -> Vec<usize> {
    let side = n * n;
    let (r, c) = (cell / side, cell % side);
    (0..side * side)
        .filter(|&o| {
            let (r2, c2) = (o / side, o % side);
            o != cell && (r == r2 || c == c2 || (r / n == r2 / n && c / n == c2 / n))
        })
        .collect()
}

/// Every unit as a list of cells: rows, then columns, then boxes.
pub fn units(n: usize) -> Vec<Vec<usize>> {
    let side = n * n;
    let mut out = Vec::new();
    for r in 0..side {
        out.push((0..side).map(|c| r * side + c).collect());
    }
    for c in 0..side {
        out.push((0..side).map(|r| r * side + c).collect());
    }
    for b in 0..side {
        let (br, bc) = (b / n * n, b % n * n);
        out.push(
            (0..side)
                .map(|i| (br + i / n) * side + bc + i % n)
                .collect(),
        );
    }
    out
}

/// Number of completions of a 4×4 grid by plain depth-first search over
/// cells in index order, checking each placement against all peers.
pub fn brute_force_count_4x4(values: &[u8]) -> u64 {
    assert_eq!(values.len(), 16);
    let peer_lists: Vec<Vec<usize>> = (0..16).map(|c| peers(2, c)).collect();
    for c in 0..16 {
        if values[c] != 0 && peer_lists[c].iter().any(|&p| values[p] == values[c]) {
            return 0;
        }
    }
    fn go(cells: &mut [u8; 16], i: usize, peers: &[Vec<usize>]) -> u64 {
        if i == 16 {
            return 1;
        }
        if cells[i] != 0 {
            return go(cells, i + 1, peers);
        }
        let mut total = 0;
        for v in 1..=4 {
            if peers[i].iter().all(|&p| cells[p] != v) {
                cells[i] = v;
                total += go(cells, i + 1, peers);
                cells[i] = 0;
            }
        }
        total
    }
    let mut cells = [0u8; 16];
    cells.copy_from_slice(values);
    go(&mut cells, 0, &peer_lists)
}

/// Fixpoint of naked and hidden singles from scratch; returns the filled
/// array.
pub fn singles_fixpoint(n: usize, values: &[u8]) -> Vec<u8> {
    let side = n * n;
    let cells = side * side;
    let peer_lists: Vec<Vec<usize>> = (0..cells).map(|c| peers(n, c)).collect();
    let unit_lists = units(n);
    let mut v = values.to_vec();
    let allowed = |v: &[u8], c: usize, x: u8| v[c] == 0 && peer_lists[c].iter().all(|&p| v[p] != x);
    loop {
        let mut progress = false;
        for c in 0..cells {
            if v[c] != 0 {
                continue;
            }
            let opts: Vec<u8> = (1..=side as u8).filter(|&x| allowed(&v, c, x)).collect();
            if opts.len() == 1 {
                v[c] = opts[0];
                progress = true;
            }
        }
        for unit in &unit_lists {
            for x in 1..=side as u8 {
                if unit.iter().any(|&c| v[c] == x) {
                    continue;
                }
                let hosts: Vec<usize> = unit
                    .iter()
                    .copied()
                    .filter(|&c| allowed(&v, c, x))
                    .collect();
                if hosts.len() == 1 {
                    v[hosts[0]] = x;
                    progress = true;
                }
            }
        }
        if !progress {
            return v;
        }
    }
}

pub fn oracle_is_simple(grid: &Grid) -> bool {
    let n = grid.order().box_size();
    singles_fixpoint(n, grid.values()).iter().all(|&x| x != 0)
}

pub const CORPUS_SEED: u64 = 0x5eed_c0de;

/// Puzzle `i` of the shared test corpus. Target givens cycle through
/// 22..=31; the generator stops early at a minimal puzzle.
pub fn corpus_puzzle(i: usize) -> Grid {
    generate_puzzle(
        Order::Three,
        derive_seed(CORPUS_SEED, i as u64),
        22 + i % 10,
    )
}

pub fn corpus(n: usize) -> Vec<Grid> {
    use rayon::prelude::*;
    (0..n).into_par_iter().map(corpus_puzzle).collect()
}

/// `|a - b|` relative to the mean magnitude; 0 when both are 0.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    let scale = (a.abs() + b.abs()) / 2.0;
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}
