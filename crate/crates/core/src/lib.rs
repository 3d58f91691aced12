//! Parallel stable integer sorting.
//!
//! [`dt_sort`] is an MSD radix sort that samples each subproblem to find
//! heavily duplicated keys, gives each its own bucket so it skips all deeper
//! levels, and afterwards interleaves those buckets with the recursively
//! sorted light records of the same zone. [`plain_msd_sort`] is the same
//! framework without the sampling. Both are stable, and for a fixed seed
//! their output and counters do not depend on the number of worker threads.

pub mod config;
pub mod counting;
pub mod dtmerge;
pub mod dtsort;
pub mod gen;
pub mod instrument;
pub mod par;
pub mod record;
pub mod rng;
pub mod sampler;

pub use config::{BaseCase, BlockPolicy, ConfigError, GammaPolicy, SortConfig};
pub use dtsort::{dt_sort, plain_msd_sort};
pub use instrument::InstrumentReport;
pub use record::{with_index, Payload, Record, SortKey};
