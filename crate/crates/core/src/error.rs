use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{pair} edge ({i}, {j}) out of range for parts of sizes {rows}x{cols}")]
    EdgeOutOfRange {
        pair: &'static str,
        i: usize,
        j: usize,
        rows: usize,
        cols: usize,
    },

    #[error("unknown part pair `{0}` (expected AB, AC or BC)")]
    UnknownPartPair(String),

    #[error("vertex {0} is not part of the sub-instance")]
    NotInView(usize),

    #[error("index list is not a sorted subset of the parent view ({0} part)")]
    NotSubset(&'static str),

    #[error("lookup table needs {required} bits but the budget is {budget}; reduce delta")]
    TableBudgetExceeded { required: u128, budget: u128 },

    #[error("subset encoding needs {bits} bits, which does not fit in a 64-bit word; reduce delta or the subset cap")]
    EncodingOverflow { bits: u32 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("pair table has no entry for a legal subset pair")]
    MissingTableEntry,

    #[error("easy-part finder violated its contract: {0}")]
    FinderContract(String),

    #[error("easy-part finder reported a wrong verdict: {0}")]
    FinderUntruthful(String),

    #[error("detector returned an invalid witness ({a}, {b}, {c})")]
    BadWitness { a: usize, b: usize, c: usize },
}
