//! Query-wise LRU: all pages of a query receive the same recency stamp, and
//! a miss evicts the least recently used non-query pages.

use crate::model::{CacheState, PageId, Query};
use crate::{Error, Result};

use super::{OnlinePolicy, StepOutcome};

/// One LRU step at logical time `now`.
///
/// On a hit only the stamps of the query's pages move to `now`. On a miss
/// every absent page is inserted and exactly the overflow count of
/// least-recently-used non-query pages is evicted; recency ties and
/// never-stamped pages order by smaller page id first.
pub fn lru_step(cache: &mut CacheState, query: &Query, now: u64) -> Result<StepOutcome> {
    if query.len() > cache.capacity() {
        return Err(Error::InfeasibleCapacity {
            cache_size: cache.capacity(),
            query_len: query.len(),
        });
    }
    let missing: Vec<PageId> =
        query.pages().iter().copied().filter(|p| !cache.contains(*p)).collect();
    if missing.is_empty() {
        for p in query.pages() {
            cache.touch(*p, now);
        }
        return Ok(StepOutcome::hit());
    }

    let overflow = (cache.len() + missing.len()).saturating_sub(cache.capacity());
    let mut evicted = Vec::with_capacity(overflow);
    if overflow > 0 {
        let mut candidates: Vec<(u64, PageId)> = cache
            .pages()
            .iter()
            .copied()
            .filter(|p| !query.contains(*p))
            .map(|p| (cache.recency(p).unwrap_or(0), p))
            .collect();
        candidates.sort_unstable();
        for &(_, page) in candidates.iter().take(overflow) {
            cache.remove(page);
            evicted.push(page);
        }
    }
    for p in missing {
        cache.insert(p)?;
    }
    for p in query.pages() {
        cache.touch(*p, now);
    }
    Ok(StepOutcome { miss: true, evicted })
}

/// Stateful LRU stepper; the clock advances by one per query.
pub struct LruPolicy {
    cache: CacheState,
    clock: u64,
}

impl LruPolicy {
    pub fn new(capacity: usize) -> LruPolicy {
        LruPolicy { cache: CacheState::new(capacity), clock: 0 }
    }
}

impl OnlinePolicy for LruPolicy {
    fn step(&mut self, query: &Query) -> Result<StepOutcome> {
        self.clock += 1;
        lru_step(&mut self.cache, query, self.clock)
    }

    fn cache(&self) -> &CacheState {
        &self.cache
    }
}
