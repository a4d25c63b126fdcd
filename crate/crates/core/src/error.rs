use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// An item label outside `1..=n`. Labels are reported 1-based.
    #[error("item {item} is out of range 1..={n}")]
    Index { item: usize, n: usize },

    /// The closure of the input contains a cycle through distinct items.
    /// The cycle is reported in 1-based labels, first item repeated at the end.
    #[error("relation contains a cycle: {}", fmt_cycle(.cycle))]
    Cycle { cycle: Vec<usize> },

    #[error("poset has {n} items; this operation is capped at {cap}")]
    CapExceeded { n: usize, cap: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A schedule whose levels are too short to ever coalesce.
    #[error("{t} sweeps per level can never coalesce; need at least {min}")]
    ScheduleTooShort { t: u64, min: u64 },

    #[error("poset must have at least one item")]
    Empty,
}

fn fmt_cycle(cycle: &[usize]) -> String {
    cycle
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(" -> ")
}

pub type Result<T> = std::result::Result<T, Error>;
