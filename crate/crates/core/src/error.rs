use thiserror::Error;

/// Errors raised by the board, search, and rating routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("puzzle text has {len} cells, expected 16 or 81")]
    BadLength { len: usize },

    #[error("unexpected character {ch:?} at position {pos}")]
    BadCharacter { pos: usize, ch: char },

    #[error("value {value} appears at cells {first} and {second} of the same unit")]
    InconsistentGivens {
        first: usize,
        second: usize,
        value: u8,
    },

    #[error("unsupported order {0}, expected 2 or 3")]
    UnsupportedOrder(u8),

    #[error("grid is inconsistent under the constraint graph (cells {first} and {second})")]
    InconsistentGrid { first: usize, second: usize },

    #[error("grid order does not match graph order")]
    OrderMismatch,

    #[error("cannot assign {value} to cell {cell}")]
    InvalidAssignment { cell: usize, value: u8 },

    #[error("cell {0} is not an empty cell with at least two candidates")]
    InvalidCell(usize),

    #[error("puzzle does not have exactly one solution")]
    NotWellPosed,

    #[error("no empty cell has a finite refutation score")]
    Stuck,

    #[error("more than one candidate of cell {cell} survived refutation")]
    MultipleSurvivors { cell: usize },

    #[error("every candidate of cell {cell} was refuted")]
    NoSurvivor { cell: usize },

    #[error("simple techniques still apply; refutation is only defined for stuck states")]
    NotStuck,

    #[error("solution enumeration hit the cap of {cap}")]
    CapExceeded { cap: u64 },

    #[error("every relaxation sample hit the enumeration cap")]
    AllSamplesCapped,

    #[error("{0} edges requested but the graph only has {1}")]
    TooManyEdges(usize, usize),

    #[error("annealing never reached a zero-cost grid")]
    Unsolved,

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("design matrix is rank deficient")]
    RankDeficient,

    #[error("records lack a day index")]
    MissingDayIndex,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
