//! Query-wise marking: pages touched in the current phase are marked and
//! immune from eviction; misses evict uniformly random unmarked pages.
//!
//! Phase detection is folded into the policy (a counter of distinct pages
//! requested since the phase started) so the stepper stays online. When a
//! query would push the count past the cache size, all pages are unmarked
//! first and the counter restarts with that query.

use std::collections::BTreeSet;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::model::{CacheState, PageId, Query};
use crate::{Error, Result};

use super::{OnlinePolicy, StepOutcome};

/// Cache with mark bits plus the online phase counter.
#[derive(Clone, Debug)]
pub struct MarkingState {
    cache: CacheState,
    distinct_in_phase: BTreeSet<PageId>,
}

impl MarkingState {
    pub fn new(capacity: usize) -> MarkingState {
        MarkingState { cache: CacheState::new(capacity), distinct_in_phase: BTreeSet::new() }
    }

    pub fn cache(&self) -> &CacheState {
        &self.cache
    }

    /// Distinct pages requested since the current phase began.
    pub fn distinct_in_phase(&self) -> usize {
        self.distinct_in_phase.len()
    }
}

/// One marking step. Order of events: (a) if the query pushes the distinct
/// count past the cache size, unmark everything and restart the phase;
/// (b) on a hit mark the query's pages; (c) on a miss insert the absent
/// pages, evicting a uniformly random set of unmarked non-query pages of
/// exactly the overflow size, and mark all query pages.
pub fn marking_step(
    state: &mut MarkingState,
    query: &Query,
    rng: &mut impl Rng,
) -> Result<StepOutcome> {
    let capacity = state.cache.capacity();
    if query.len() > capacity {
        return Err(Error::InfeasibleCapacity { cache_size: capacity, query_len: query.len() });
    }

    let would_be = state.distinct_in_phase.len()
        + query.pages().iter().filter(|p| !state.distinct_in_phase.contains(p)).count();
    if would_be > capacity {
        state.cache.unmark_all();
        state.distinct_in_phase.clear();
    }
    state.distinct_in_phase.extend(query.pages().iter().copied());

    let missing: Vec<PageId> =
        query.pages().iter().copied().filter(|p| !state.cache.contains(*p)).collect();
    if missing.is_empty() {
        for p in query.pages() {
            state.cache.mark(*p);
        }
        return Ok(StepOutcome::hit());
    }

    let overflow = (state.cache.len() + missing.len()).saturating_sub(capacity);
    let mut evicted = Vec::with_capacity(overflow);
    if overflow > 0 {
        let candidates: Vec<PageId> = state
            .cache
            .pages()
            .iter()
            .copied()
            .filter(|p| !state.cache.is_marked(*p) && !query.contains(*p))
            .collect();
        if candidates.len() < overflow {
            // impossible by phase arithmetic; a shortfall means the phase
            // counter diverged from the cache contents
            return Err(Error::InvariantViolation(format!(
                "marking needs {overflow} evictions but only {} pages are unmarked",
                candidates.len()
            )));
        }
        for idx in rand::seq::index::sample(rng, candidates.len(), overflow) {
            let page = candidates[idx];
            state.cache.remove(page);
            evicted.push(page);
        }
        evicted.sort_unstable();
    }
    for p in missing {
        state.cache.insert(p)?;
    }
    for p in query.pages() {
        state.cache.mark(*p);
    }
    Ok(StepOutcome { miss: true, evicted })
}

/// Stateful marking stepper with its own seeded generator.
pub struct MarkingPolicy {
    state: MarkingState,
    rng: ChaCha12Rng,
}

impl MarkingPolicy {
    pub fn new(capacity: usize, seed: u64) -> MarkingPolicy {
        MarkingPolicy { state: MarkingState::new(capacity), rng: ChaCha12Rng::seed_from_u64(seed) }
    }

    pub fn state(&self) -> &MarkingState {
        &self.state
    }
}

impl OnlinePolicy for MarkingPolicy {
    fn step(&mut self, query: &Query) -> Result<StepOutcome> {
        marking_step(&mut self.state, query, &mut self.rng)
    }

    fn cache(&self) -> &CacheState {
        &self.state.cache
    }
}
