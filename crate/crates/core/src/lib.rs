//! Enumeration of factorization sets in numerical semigroups.
//!
//! Given an element `n` and generators `(g1, ..., gd)`, the factorization set
//! is every vector `(a1, ..., ad)` of nonnegative integers with
//! `a1*g1 + ... + ad*gd = n`. This crate enumerates that set by walking a
//! stream of candidate vectors in strictly decreasing lexicographic order,
//! where each step either lands on a factorization or overshoots it by less
//! than one generator. Because the stream order is total, the remaining work
//! of one stream can be split at any moment into two disjoint bounded
//! streams, which is how [`run_pool`] keeps a fixed set of worker slots busy.
//!
//! ```
//! use lexfact::{run_sequential, Collector, Instance, StreamConfig};
//!
//! let instance = Instance::new(10, vec![2, 3]).unwrap();
//! let config = StreamConfig::default();
//! let all = run_sequential(&instance, &config, Collector::new(true)).unwrap();
//! assert_eq!(all, vec![vec![5, 0], vec![2, 2]]);
//! ```
//!
//! The same result set comes out of the worker pool for every worker count:
//!
//! ```
//! use lexfact::{run_pool, Counter, Instance, PoolConfig};
//!
//! let instance = Instance::new(1000, vec![13, 37, 38]).unwrap();
//! let config = PoolConfig { workers: 4, ..PoolConfig::default() };
//! assert_eq!(run_pool(&instance, config, Counter::new()).unwrap(), 30);
//! ```

mod consumers;
mod lexstream;
mod oracle;
mod partition;
pub mod selftest;

pub use consumers::{Collector, Consumer, Counter, Exists, OutputFormat, Writer};
pub use lexstream::{
    decrement_and_solve, lex_compare, modulo_skip_step, Instance, InstanceError, ModuloMode,
    StreamConfig, WorkerState, PRECISION_BITS,
};
pub use oracle::{brute_force, OracleResult, OracleTooLarge, DEFAULT_NODE_LIMIT};
pub use partition::{
    apply_split, run_pool, run_sequential, split_work, BarrierStage, NoMonitor, PoolConfig,
    PoolMonitor, SlotView, WorkPool, DEFAULT_BUFFER_CAPACITY, DEFAULT_STEPS_BETWEEN_SPLITS,
};
