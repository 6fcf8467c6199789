//! Cache eviction policies: online (query-wise LRU, query-wise marking,
//! random eviction) and offline (farthest-in-future, exact brute-force
//! optimum), plus the uniform runner producing [`MissLog`]s.

mod farthest;
mod lru;
mod marking;
mod opt;
mod random_evict;

pub use farthest::ff_offline;
pub use lru::{lru_step, LruPolicy};
pub use marking::{marking_step, MarkingPolicy, MarkingState};
pub use opt::opt_offline_bruteforce;
pub use random_evict::{random_eviction_step, RandomEvictPolicy};

use crate::model::{CacheState, MissLog, PageId, Query, Trace};
use crate::{Error, Result};

/// The policy families the lab simulates.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum PolicyKind {
    Lru,
    Marking,
    RandomEvict,
    FarthestInFuture,
    BruteForceOpt,
}

impl PolicyKind {
    /// Online policies consume queries strictly in order and never see the
    /// future; offline ones require the full trace up front.
    pub fn is_online(self) -> bool {
        matches!(self, PolicyKind::Lru | PolicyKind::Marking | PolicyKind::RandomEvict)
    }

    pub fn is_randomized(self) -> bool {
        matches!(self, PolicyKind::Marking | PolicyKind::RandomEvict)
    }

    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::Lru => "lru",
            PolicyKind::Marking => "marking",
            PolicyKind::RandomEvict => "random",
            PolicyKind::FarthestInFuture => "ff",
            PolicyKind::BruteForceOpt => "opt",
        }
    }

    pub fn parse(name: &str) -> Result<PolicyKind> {
        match name {
            "lru" => Ok(PolicyKind::Lru),
            "marking" => Ok(PolicyKind::Marking),
            "random" | "random-evict" => Ok(PolicyKind::RandomEvict),
            "ff" | "farthest-in-future" => Ok(PolicyKind::FarthestInFuture),
            "opt" | "brute-force" => Ok(PolicyKind::BruteForceOpt),
            other => Err(Error::InvalidParameter(format!("unknown policy `{other}`"))),
        }
    }
}

/// Hit/miss verdict of one step plus the pages evicted to serve it.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StepOutcome {
    pub miss: bool,
    pub evicted: Vec<PageId>,
}

impl StepOutcome {
    pub fn hit() -> StepOutcome {
        StepOutcome { miss: false, evicted: Vec::new() }
    }
}

/// An online stepper: sees one query at a time, owns its cache exclusively.
pub trait OnlinePolicy {
    fn step(&mut self, query: &Query) -> Result<StepOutcome>;
    fn cache(&self) -> &CacheState;
}

/// Creates a fresh online stepper for the kind; errors on offline kinds.
pub fn online_policy(kind: PolicyKind, k: usize, seed: u64) -> Result<Box<dyn OnlinePolicy>> {
    match kind {
        PolicyKind::Lru => Ok(Box::new(LruPolicy::new(k))),
        PolicyKind::Marking => Ok(Box::new(MarkingPolicy::new(k, seed))),
        PolicyKind::RandomEvict => Ok(Box::new(RandomEvictPolicy::new(k, seed))),
        other => Err(Error::InvalidParameter(format!(
            "{} is offline and has no stepper",
            other.name()
        ))),
    }
}

/// Runs a policy over a full trace with cache size `k`. Deterministic given
/// `(kind, trace, k, seed)`; the seed only matters for randomized kinds.
pub fn run_policy(kind: PolicyKind, trace: &Trace, k: usize, seed: u64) -> Result<MissLog> {
    if k < trace.query_len() {
        return Err(Error::InfeasibleCapacity { cache_size: k, query_len: trace.query_len() });
    }
    match kind {
        PolicyKind::FarthestInFuture => ff_offline(trace, k),
        PolicyKind::BruteForceOpt => opt_offline_bruteforce(trace, k),
        online => {
            let mut policy = online_policy(online, k, seed)?;
            let mut log = MissLog::new();
            for query in trace.queries() {
                let outcome = policy.step(query)?;
                log.record(outcome.miss, outcome.evicted);
            }
            Ok(log)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Query;
    use crate::phases::partition_phases;

    fn trace(n: u32, l: usize, queries: &[&[u32]]) -> Trace {
        Trace::new(n, l, queries.iter().map(|ids| Query::from_ids(ids)).collect()).unwrap()
    }

    fn example_trace() -> Trace {
        trace(5, 2, &[&[4, 1], &[2, 1], &[2, 1], &[5, 3], &[4, 3], &[3, 1], &[2, 3]])
    }

    #[test]
    fn capacity_precondition() {
        let t = trace(5, 2, &[&[1, 2]]);
        for kind in [
            PolicyKind::Lru,
            PolicyKind::Marking,
            PolicyKind::RandomEvict,
            PolicyKind::FarthestInFuture,
            PolicyKind::BruteForceOpt,
        ] {
            assert!(matches!(
                run_policy(kind, &t, 1, 0),
                Err(Error::InfeasibleCapacity { cache_size: 1, query_len: 2 })
            ));
        }
    }

    #[test]
    fn empty_trace_zero_misses() {
        let t = Trace::new(4, 2, vec![]).unwrap();
        for kind in [
            PolicyKind::Lru,
            PolicyKind::Marking,
            PolicyKind::RandomEvict,
            PolicyKind::FarthestInFuture,
            PolicyKind::BruteForceOpt,
        ] {
            let log = run_policy(kind, &t, 3, 7).unwrap();
            assert_eq!(log.total_misses(), 0);
            assert_eq!(log.total_queries(), 0);
        }
    }

    #[test]
    fn lru_within_per_phase_bound_on_example() {
        // at most k misses in each phase
        let t = example_trace();
        let k = 3;
        let log = run_policy(PolicyKind::Lru, &t, k, 0).unwrap();
        let partition = partition_phases(&t, k + 1).unwrap();
        let mut per_phase = vec![0usize; partition.num_phases()];
        for rec in log.records() {
            if rec.miss {
                per_phase[partition.phase_of(rec.query_index)] += 1;
            }
        }
        assert_eq!(per_phase.len(), 3);
        for misses in per_phase {
            assert!(misses <= k);
        }
    }

    #[test]
    fn identical_runs_are_deterministic() {
        let t = example_trace();
        for kind in [PolicyKind::Marking, PolicyKind::RandomEvict] {
            let a = run_policy(kind, &t, 3, 42).unwrap();
            let b = run_policy(kind, &t, 3, 42).unwrap();
            assert_eq!(a, b);
            let c = run_policy(kind, &t, 3, 43).unwrap();
            assert_eq!(c.total_queries(), a.total_queries());
        }
    }

    #[test]
    fn online_policies_consume_queries_in_order() {
        // instrumented feed: each query is handed over exactly once, in
        // trace order, so a stepper can never observe the future
        let t = example_trace();
        for kind in [PolicyKind::Lru, PolicyKind::Marking, PolicyKind::RandomEvict] {
            let mut policy = online_policy(kind, 3, 1).unwrap();
            let mut served = Vec::new();
            for (idx, query) in t.queries().iter().enumerate() {
                served.push(idx);
                policy.step(query).unwrap();
            }
            assert_eq!(served, (0..t.len()).collect::<Vec<_>>());
        }
    }

    #[test]
    fn cache_growth_is_monotone_until_full() {
        let t = trace(6, 2, &[&[1, 2], &[3, 4], &[5, 6], &[1, 6], &[2, 3]]);
        for kind in [PolicyKind::Lru, PolicyKind::Marking, PolicyKind::RandomEvict] {
            let mut policy = online_policy(kind, 4, 9).unwrap();
            let mut last = 0usize;
            for query in t.queries() {
                policy.step(query).unwrap();
                let len = policy.cache().len();
                assert!(len <= 4);
                if last < 4 {
                    assert!(len >= last);
                }
                last = len;
            }
        }
    }

    #[test]
    fn hit_leaves_cache_content_unchanged() {
        let t = trace(4, 2, &[&[1, 2], &[3, 4], &[1, 2], &[3, 4]]);
        for kind in [PolicyKind::Lru, PolicyKind::Marking, PolicyKind::RandomEvict] {
            let mut policy = online_policy(kind, 4, 5).unwrap();
            for query in t.queries() {
                let before = policy.cache().pages().clone();
                let outcome = policy.step(query).unwrap();
                if !outcome.miss {
                    assert_eq!(policy.cache().pages(), &before);
                    assert!(outcome.evicted.is_empty());
                } else {
                    for p in query.pages() {
                        assert!(policy.cache().contains(*p));
                    }
                }
            }
        }
    }
}
