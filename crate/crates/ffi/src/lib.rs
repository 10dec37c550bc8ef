//! C ABI over `sudoku_rating`.
//!
//! Grids live behind the opaque `SrGrid` handle. Every fallible call returns
//! an `SrStatus` and writes its result through an out-pointer; on failure
//! `sr_last_error_message` describes the most recent error on the calling
//! thread. Panics are caught at the boundary and reported as
//! `SR_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use sudoku_rating::baselines::{annealing_metric, givens_metric, AnnealParams};
use sudoku_rating::evaluation::pearson;
use sudoku_rating::human_model::{dependency_metric, refutation_sum_metric};
use sudoku_rating::relaxation::relaxation_metrics;
use sudoku_rating::solver::{
    backtracking_metric, count_solutions, generate_puzzle, is_well_posed, solve,
};
use sudoku_rating::{parse_grid, Error, Grid, Order, SudokuGraph};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Malformed puzzle text or inconsistent givens.
    Parse = 3,
    /// The puzzle does not have exactly one solution.
    NotWellPosed = 4,
    /// No solution exists.
    Unsolvable = 5,
    InvalidArgument = 6,
    /// Every relaxation sample hit the enumeration cap.
    CapExceeded = 7,
    /// Buffer too small; the required size is reported where possible.
    BufferTooSmall = 8,
    /// Any other model failure, see the error message.
    Failed = 9,
    Panic = 10,
}

/// Opaque puzzle handle. Create with `sr_grid_parse` or `sr_generate`,
/// release with `sr_grid_free`.
pub struct SrGrid {
    grid: Grid,
}

/// Relaxation aggregates at one edge-removal count.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SrRelaxationMetrics {
    pub k: usize,
    pub mean_solutions_other: f64,
    pub mean_fixed_cells: f64,
    pub samples: usize,
    pub samples_capped: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> SrStatus {
    match e {
        Error::BadLength { .. }
        | Error::BadCharacter { .. }
        | Error::InconsistentGivens { .. }
        | Error::InconsistentGrid { .. } => SrStatus::Parse,
        Error::NotWellPosed => SrStatus::NotWellPosed,
        Error::CapExceeded { .. } | Error::AllSamplesCapped => SrStatus::CapExceeded,
        Error::UnsupportedOrder(_) | Error::InvalidParameter(_) | Error::TooManyEdges(..) => {
            SrStatus::InvalidArgument
        }
        _ => SrStatus::Failed,
    }
}

fn fail(e: Error) -> SrStatus {
    let status = status_of(&e);
    set_error(e.to_string());
    status
}

fn guard(f: impl FnOnce() -> SrStatus) -> SrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => {
            if s == SrStatus::Ok {
                LAST_ERROR.with(|e| *e.borrow_mut() = None);
            }
            s
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            SrStatus::Panic
        }
    }
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            set_error(concat!("null pointer: ", stringify!($p)));
            return SrStatus::NullPointer;
        })+
    };
}

fn boxed(grid: Grid) -> *mut SrGrid {
    Box::into_raw(Box::new(SrGrid { grid }))
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn sr_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sr_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses 16 or 81 characters (`1`-`9`, with `.` or `0` for empty cells).
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sr_grid_parse(text: *const c_char, out: *mut *mut SrGrid) -> SrStatus {
    guard(|| {
        non_null!(text, out);
        let Ok(s) = CStr::from_ptr(text).to_str() else {
            set_error("puzzle text is not UTF-8");
            return SrStatus::InvalidUtf8;
        };
        match parse_grid(s) {
            Ok(g) => {
                *out = boxed(g);
                SrStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `grid` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn sr_grid_free(grid: *mut SrGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// Number of cells (16 or 81), or 0 for null.
///
/// # Safety
/// `grid` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sr_grid_cell_count(grid: *const SrGrid) -> usize {
    grid.as_ref().map_or(0, |g| g.grid.len())
}

/// Writes the puzzle line plus a terminating NUL into `buf`. `len` must be
/// at least cell count + 1.
///
/// # Safety
/// `grid` must be a live handle; `buf` must have `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn sr_grid_to_string(
    grid: *const SrGrid,
    buf: *mut c_char,
    len: usize,
) -> SrStatus {
    guard(|| {
        non_null!(grid, buf);
        let line = (*grid).grid.to_line();
        if len < line.len() + 1 {
            set_error(format!("buffer needs {} bytes", line.len() + 1));
            return SrStatus::BufferTooSmall;
        }
        ptr::copy_nonoverlapping(line.as_ptr().cast::<c_char>(), buf, line.len());
        *buf.add(line.len()) = 0;
        SrStatus::Ok
    })
}

/// Solves the puzzle; the solution is a new handle owned by the caller.
///
/// # Safety
/// `grid` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sr_solve(grid: *const SrGrid, out: *mut *mut SrGrid) -> SrStatus {
    guard(|| {
        non_null!(grid, out);
        let g = &(*grid).grid;
        match solve(g, &SudokuGraph::full(g.order())) {
            Ok((Some(s), _)) => {
                *out = boxed(s);
                SrStatus::Ok
            }
            Ok((None, _)) => {
                set_error("puzzle has no solution");
                SrStatus::Unsolvable
            }
            Err(e) => fail(e),
        }
    })
}

/// Counts solutions, saturating at `cap`.
///
/// # Safety
/// `grid` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sr_count_solutions(
    grid: *const SrGrid,
    cap: u64,
    out: *mut u64,
) -> SrStatus {
    guard(|| {
        non_null!(grid, out);
        let g = &(*grid).grid;
        match count_solutions(g, &SudokuGraph::full(g.order()), cap) {
            Ok(n) => {
                *out = n;
                SrStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `grid` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sr_is_well_posed(grid: *const SrGrid, out: *mut bool) -> SrStatus {
    guard(|| {
        non_null!(grid, out);
        match is_well_posed(&(*grid).grid) {
            Ok(b) => {
                *out = b;
                SrStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Generates a well-posed puzzle of box size `order` (2 or 3).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sr_generate(
    order: u8,
    seed: u64,
    target_givens: usize,
    out: *mut *mut SrGrid,
) -> SrStatus {
    guard(|| {
        non_null!(out);
        match Order::new(order) {
            Ok(o) => {
                *out = boxed(generate_puzzle(o, seed, target_givens));
                SrStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

unsafe fn metric(
    grid: *const SrGrid,
    out: *mut f64,
    f: impl FnOnce(&Grid) -> Result<f64, Error>,
) -> SrStatus {
    guard(|| {
        non_null!(grid, out);
        match f(&(*grid).grid) {
            Ok(v) => {
                *out = v;
                SrStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Mean refutation cost over `runs` model runs.
///
/// # Safety
/// `grid` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sr_refutation_sum(
    grid: *const SrGrid,
    runs: usize,
    seed: u64,
    out: *mut f64,
) -> SrStatus {
    metric(grid, out, |g| refutation_sum_metric(g, runs, seed))
}

/// Mean branching over the first `k_dep` model steps.
///
/// # Safety
/// `grid` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sr_dependency(
    grid: *const SrGrid,
    k_dep: usize,
    runs: usize,
    seed: u64,
    out: *mut f64,
) -> SrStatus {
    metric(grid, out, |g| dependency_metric(g, k_dep, runs, seed))
}

/// Backtrack count of row-major chronological search.
///
/// # Safety
/// `grid` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sr_backtracking(grid: *const SrGrid, out: *mut u64) -> SrStatus {
    guard(|| {
        non_null!(grid, out);
        match backtracking_metric(&(*grid).grid) {
            Ok(v) => {
                *out = v;
                SrStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `grid` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sr_givens(grid: *const SrGrid, out: *mut usize) -> SrStatus {
    guard(|| {
        non_null!(grid, out);
        *out = givens_metric(&(*grid).grid);
        SrStatus::Ok
    })
}

/// Mean simulated-annealing iterations with default parameters.
///
/// # Safety
/// `grid` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sr_annealing(
    grid: *const SrGrid,
    runs: usize,
    seed: u64,
    out: *mut f64,
) -> SrStatus {
    metric(grid, out, |g| {
        annealing_metric(g, &AnnealParams::default(), runs, seed)
    })
}

/// # Safety
/// `grid` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sr_relaxation_metrics(
    grid: *const SrGrid,
    k_relax: usize,
    samples: usize,
    seed: u64,
    cap: u64,
    out: *mut SrRelaxationMetrics,
) -> SrStatus {
    guard(|| {
        non_null!(grid, out);
        match relaxation_metrics(&(*grid).grid, k_relax, samples, seed, cap) {
            Ok(m) => {
                *out = SrRelaxationMetrics {
                    k: m.k,
                    mean_solutions_other: m.mean_solutions_other,
                    mean_fixed_cells: m.mean_fixed_cells,
                    samples: m.samples,
                    samples_capped: m.samples_capped,
                };
                SrStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Pearson correlation of two arrays of length `n`.
///
/// # Safety
/// `xs` and `ys` must each point to `n` readable doubles; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn sr_pearson(
    xs: *const f64,
    ys: *const f64,
    n: usize,
    out: *mut f64,
) -> SrStatus {
    guard(|| {
        non_null!(xs, ys, out);
        let (a, b) = (
            std::slice::from_raw_parts(xs, n),
            std::slice::from_raw_parts(ys, n),
        );
        match pearson(a, b) {
            Ok(r) => {
                *out = r;
                SrStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}
