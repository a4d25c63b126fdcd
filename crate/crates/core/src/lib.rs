//! Exact uniform sampling of linear extensions of a finite partial order.
//!
//! The sampler runs coupling from the past on the deterministic-scan
//! adjacent-transposition chain, using a bounding chain whose state is a
//! vector of items and placeholders. Each substep consumes one fair bit.
//!
//! ```
//! use lexsamp::{cftp, Poset, Schedule};
//!
//! let poset = Poset::parse("n 3\n1 3\n2 3\n").unwrap();
//! let sample = cftp::sample(&poset, Schedule::default_for(3), 42).unwrap();
//! let labels = sample.original(&poset).to_one_based();
//! assert_eq!(labels[2], 3);
//! ```

pub mod cftp;
pub mod chains;
pub mod coins;
mod error;
pub mod oracle;
pub mod poset;
pub mod stats;

pub use cftp::{recommended_t, RunStats, Sample, SampleReport, Schedule};
pub use chains::{BoundingState, Coin};
pub use coins::{CoinStream, CoinTape};
pub use error::{Error, Result};
pub use oracle::ExtensionSet;
pub use poset::{Permutation, Poset, Relation, Slot};
