mod common;

use proptest::prelude::*;

use sudoku_rating::evaluation::{fit_linear, fractional_ranks, pearson, spearman};
use sudoku_rating::solver::{count_solutions, generate_puzzle, solve};
use sudoku_rating::techniques::applicable_assignments;
use sudoku_rating::{candidates, parse_grid, Edge, Grid, Order, SudokuGraph};

/// Random consistent partial grid: place values in random cells, dropping
/// any that clash with a peer.
fn partial_grid(n: usize) -> impl Strategy<Value = Vec<u8>> {
    let side = n * n;
    let cells = side * side;
    prop::collection::vec((0..cells, 1..=side as u8), 0..cells).prop_map(move |placements| {
        let mut v = vec![0u8; cells];
        for (cell, value) in placements {
            if common::peers(n, cell).iter().all(|&p| v[p] != value) {
                v[cell] = value;
            }
        }
        v
    })
}

fn spread(xs: &[f64]) -> bool {
    xs.iter().any(|&x| (x - xs[0]).abs() > 1e-6)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn parse_serialize_round_trip(v in partial_grid(3)) {
        let grid = Grid::from_values(Order::Three, &v).unwrap();
        let line = grid.to_line();
        let back = parse_grid(&line).unwrap();
        prop_assert_eq!(back.values(), grid.values());
        prop_assert_eq!(back.to_line(), line);
        let zeros: String = v.iter().map(|&x| char::from(b'0' + x)).collect();
        let from_zeros = parse_grid(&zeros).unwrap();
        prop_assert_eq!(from_zeros.values(), grid.values());
    }

    #[test]
    fn candidates_shrink_as_givens_are_added(v in partial_grid(3), extra in 0usize..81) {
        let g = SudokuGraph::full(Order::Three);
        let base = Grid::from_values(Order::Three, &v).unwrap();
        let before = candidates(base.clone(), &g).unwrap();
        prop_assume!(v[extra] == 0);
        let cands = before.candidates(extra);
        prop_assume!(!cands.is_empty());
        let value = cands.iter().next().unwrap();
        let mut w = v.clone();
        w[extra] = value;
        let after = candidates(Grid::from_values(Order::Three, &w).unwrap(), &g).unwrap();
        for (cell, &x) in w.iter().enumerate() {
            if x == 0 {
                prop_assert!(after.candidates(cell).is_subset(before.candidates(cell)));
            }
        }
    }

    #[test]
    fn counting_matches_brute_force(v in partial_grid(2)) {
        let grid = Grid::from_values(Order::Two, &v).unwrap();
        let ours = count_solutions(&grid, &SudokuGraph::full(Order::Two), u64::MAX).unwrap();
        prop_assert_eq!(ours, common::brute_force_count_4x4(&v));
    }

    #[test]
    fn removing_an_edge_never_loses_solutions(v in partial_grid(2), pick in 0usize..56) {
        let full = SudokuGraph::full(Order::Two);
        let grid = Grid::from_values(Order::Two, &v).unwrap();
        let edge: Edge = full.edges()[pick];
        let relaxed = full.without_edges([&edge]);
        let a = count_solutions(&grid, &full, u64::MAX).unwrap();
        let b = count_solutions(&grid, &relaxed, u64::MAX).unwrap();
        prop_assert!(b >= a);
        if let (Some(s), _) = solve(&grid, &relaxed).unwrap() {
            prop_assert!(s.is_consistent(&relaxed));
        }
    }

    #[test]
    fn simple_assignments_agree_with_solution(seed in 0u64..1_000) {
        let puzzle = generate_puzzle(Order::Two, seed, 4);
        let g = SudokuGraph::full(Order::Two);
        let solution = solve(&puzzle, &g).unwrap().0.unwrap();
        let state = candidates(puzzle, &g).unwrap();
        for a in applicable_assignments(&state) {
            prop_assert_eq!(solution.value(a.cell), Some(a.value));
        }
    }

    #[test]
    fn pearson_invariances(
        pts in prop::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 3..40),
        shift in -1e3f64..1e3,
        scale in 0.01f64..100.0,
    ) {
        let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
        prop_assume!(spread(&xs) && spread(&ys));
        let r = pearson(&xs, &ys).unwrap();
        prop_assert!((-1.0..=1.0).contains(&r));
        prop_assert!((pearson(&ys, &xs).unwrap() - r).abs() < 1e-9);
        let moved: Vec<f64> = xs.iter().map(|x| scale * x + shift).collect();
        prop_assert!((pearson(&moved, &ys).unwrap() - r).abs() < 1e-9);
        let flipped: Vec<f64> = xs.iter().map(|x| -scale * x).collect();
        prop_assert!((pearson(&flipped, &ys).unwrap() + r).abs() < 1e-9);
    }

    #[test]
    fn spearman_ignores_monotone_transforms(
        pts in prop::collection::vec((-50f64..50.0, -50f64..50.0), 3..40),
    ) {
        let xs: Vec<f64> = pts.iter().map(|p| p.0.round()).collect();
        let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
        prop_assume!(spread(&xs) && spread(&ys));
        let rho = spearman(&xs, &ys).unwrap();
        let warped: Vec<f64> = xs.iter().map(|x| x.powi(3) + (x / 10.0).exp()).collect();
        prop_assert!((spearman(&warped, &ys).unwrap() - rho).abs() < 1e-12);
    }

    #[test]
    fn ranks_sum_to_triangular_number(xs in prop::collection::vec(-10i32..10, 1..50)) {
        let xs: Vec<f64> = xs.into_iter().map(f64::from).collect();
        let n = xs.len() as f64;
        let total: f64 = fractional_ranks(&xs).iter().sum();
        prop_assert!((total - n * (n + 1.0) / 2.0).abs() < 1e-9);
    }

    #[test]
    fn least_squares_residuals_are_orthogonal(
        rows in prop::collection::vec(prop::collection::vec(-100f64..100.0, 3), 8..40),
        w in prop::collection::vec(-5f64..5.0, 3),
        noise in prop::collection::vec(-10f64..10.0, 40),
    ) {
        let targets: Vec<f64> = rows
            .iter()
            .zip(&noise)
            .map(|(r, e)| r.iter().zip(&w).map(|(x, b)| x * b).sum::<f64>() + e)
            .collect();
        let Ok(fit) = fit_linear(&rows, &targets) else {
            return Ok(());
        };
        let resid: Vec<f64> = rows.iter().zip(&targets).map(|(r, t)| t - fit.predict(r)).collect();
        for j in 0..3 {
            let dot: f64 = rows.iter().zip(&resid).map(|(r, e)| r[j] * e).sum();
            let scale: f64 = rows.iter().zip(&targets).map(|(r, t)| (r[j] * t).abs()).sum::<f64>().max(1.0);
            prop_assert!(dot.abs() <= 1e-8 * scale, "column {}: {}", j, dot);
        }
    }
}
