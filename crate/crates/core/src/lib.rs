//! Simulation laboratory for the query-wise (file-bundle) caching problem.
//!
//! A query requests a bundle of `l` pages and counts as a hit only when every
//! page of the bundle is simultaneously resident in one cache. This crate
//! provides:
//!
//! - the domain model (pages, queries, traces, cache states, miss logs) in
//!   [`model`],
//! - phase partitioning of traces in [`phases`],
//! - online policies (query-wise LRU, query-wise marking, random eviction)
//!   and offline baselines (farthest-in-future, exact brute-force optimum)
//!   in [`policies`],
//! - synthetic and adversarial workload generators in [`workloads`],
//! - the virtual-cache reduction for distributed caching and dense-family
//!   constructions in [`distributed`],
//! - closed-form competitive-ratio bound calculators in [`bounds`],
//! - an experiment harness (configs, sweeps, CSV/SVG emission, empirical
//!   bound verification) in [`experiment`].
//!
//! Monte Carlo ensembles, parameter sweeps, and the verification corpus run
//! data-parallel over independent policy runs when the default `parallel`
//! feature is enabled; disabling it yields a dependency-free sequential
//! build with identical results.

pub mod bounds;
pub mod distributed;
pub mod exec;
pub mod experiment;
pub mod model;
pub mod phases;
pub mod policies;
pub mod workloads;

mod rng;

use std::fmt;

pub use model::{
    apply_update, is_miss, is_miss_distributed, CacheState, MissLog, PageId, Query, QueryRecord,
    Trace,
};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors surfaced by simulation, generation, and parsing operations.
#[derive(Debug)]
pub enum Error {
    /// A cache update would exceed the fixed capacity.
    CapacityExceeded { required: usize, capacity: usize },
    /// Eviction of a page that is absent or part of the current query.
    IllegalEviction { page: u32, reason: &'static str },
    /// A distributed miss check received no caches.
    EmptyCacheSet,
    /// A query was empty after deduplication.
    EmptyQuery,
    /// Phase threshold does not exceed the query length.
    InvalidThreshold { threshold: usize, query_len: usize },
    /// Partition does not describe the given trace.
    MismatchedPartition(String),
    /// Cache too small to hold a single query.
    InfeasibleCapacity { cache_size: usize, query_len: usize },
    /// Workload parameters cannot produce valid queries.
    InfeasibleWorkload(String),
    /// Brute-force or combinatorial instance exceeds the desk-scale guard.
    InstanceTooLarge { bound: u128, limit: u128 },
    /// Parameter outside an operation's domain.
    InvalidParameter(String),
    /// A bound's hypothesis does not hold for the given parameters.
    NotApplicable(String),
    /// Internal invariant broken; indicates a bug, aborts the run.
    InvariantViolation(String),
    /// Trace file could not be parsed.
    TraceParse { line: usize, message: String },
    /// Experiment config file could not be parsed.
    ConfigParse { line: usize, message: String },
    /// Underlying I/O failure, annotated with the path.
    Io { path: String, source: std::io::Error },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::CapacityExceeded { required, capacity } => {
                write!(f, "cache update needs {required} slots but capacity is {capacity}")
            }
            Error::IllegalEviction { page, reason } => {
                write!(f, "illegal eviction of page {page}: {reason}")
            }
            Error::EmptyCacheSet => write!(f, "distributed miss check requires at least one cache"),
            Error::EmptyQuery => write!(f, "query contains no pages"),
            Error::InvalidThreshold { threshold, query_len } => write!(
                f,
                "phase threshold {threshold} must exceed query length {query_len}"
            ),
            Error::MismatchedPartition(msg) => write!(f, "partition mismatch: {msg}"),
            Error::InfeasibleCapacity { cache_size, query_len } => write!(
                f,
                "cache size {cache_size} cannot hold queries of length {query_len}"
            ),
            Error::InfeasibleWorkload(msg) => write!(f, "infeasible workload: {msg}"),
            Error::InstanceTooLarge { bound, limit } => write!(
                f,
                "instance too large: state bound {bound} exceeds guard {limit}"
            ),
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::NotApplicable(msg) => write!(f, "bound not applicable: {msg}"),
            Error::InvariantViolation(msg) => write!(f, "internal invariant violated: {msg}"),
            Error::TraceParse { line, message } => {
                write!(f, "trace parse error at line {line}: {message}")
            }
            Error::ConfigParse { line, message } => {
                write!(f, "config parse error at line {line}: {message}")
            }
            Error::Io { path, source } => write!(f, "i/o error on {path}: {source}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io { source, .. } => Some(source),
            _ => None,
        }
    }
}
