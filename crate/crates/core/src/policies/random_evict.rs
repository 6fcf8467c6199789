//! Random eviction: on a miss, evict uniformly random non-query resident
//! pages, exactly as many as needed.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::model::{CacheState, PageId, Query};
use crate::{Error, Result};

use super::{OnlinePolicy, StepOutcome};

/// One random-eviction step. Hits leave the cache untouched.
pub fn random_eviction_step(
    cache: &mut CacheState,
    query: &Query,
    rng: &mut impl Rng,
) -> Result<StepOutcome> {
    if query.len() > cache.capacity() {
        return Err(Error::InfeasibleCapacity {
            cache_size: cache.capacity(),
            query_len: query.len(),
        });
    }
    let missing: Vec<PageId> =
        query.pages().iter().copied().filter(|p| !cache.contains(*p)).collect();
    if missing.is_empty() {
        return Ok(StepOutcome::hit());
    }
    let overflow = (cache.len() + missing.len()).saturating_sub(cache.capacity());
    let mut evicted = Vec::with_capacity(overflow);
    if overflow > 0 {
        let candidates: Vec<PageId> =
            cache.pages().iter().copied().filter(|p| !query.contains(*p)).collect();
        for idx in rand::seq::index::sample(rng, candidates.len(), overflow) {
            let page = candidates[idx];
            cache.remove(page);
            evicted.push(page);
        }
        evicted.sort_unstable();
    }
    for p in missing {
        cache.insert(p)?;
    }
    Ok(StepOutcome { miss: true, evicted })
}

/// Stateful random-eviction stepper with its own seeded generator.
pub struct RandomEvictPolicy {
    cache: CacheState,
    rng: ChaCha12Rng,
}

impl RandomEvictPolicy {
    pub fn new(capacity: usize, seed: u64) -> RandomEvictPolicy {
        RandomEvictPolicy { cache: CacheState::new(capacity), rng: ChaCha12Rng::seed_from_u64(seed) }
    }
}

impl OnlinePolicy for RandomEvictPolicy {
    fn step(&mut self, query: &Query) -> Result<StepOutcome> {
        random_eviction_step(&mut self.cache, query, &mut self.rng)
    }

    fn cache(&self) -> &CacheState {
        &self.cache
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn page(id: u32) -> PageId {
        PageId::new(id)
    }

    #[test]
    fn evicts_uniformly_over_two_candidates() {
        // chi-square with one degree of freedom over 10,000 seeds;
        // 10.83 is the p=0.001 critical value
        let trials = 10_000u64;
        let mut count_1 = 0f64;
        for seed in 0..trials {
            let mut cache = CacheState::with_pages(2, [page(1), page(2)]);
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let outcome =
                random_eviction_step(&mut cache, &Query::from_ids(&[3]), &mut rng).unwrap();
            assert_eq!(outcome.evicted.len(), 1);
            if outcome.evicted[0] == page(1) {
                count_1 += 1.0;
            }
        }
        let expected = trials as f64 / 2.0;
        let chi2 = 2.0 * (count_1 - expected).powi(2) / expected;
        assert!(chi2 < 10.83, "chi-square {chi2} too large (count {count_1})");
    }

    #[test]
    fn hit_leaves_cache_unchanged() {
        let mut cache = CacheState::with_pages(2, [page(1), page(2)]);
        let before = cache.clone();
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let outcome = random_eviction_step(&mut cache, &Query::from_ids(&[1]), &mut rng).unwrap();
        assert!(!outcome.miss);
        assert_eq!(cache, before);
    }

    #[test]
    fn all_distinct_trace_misses_every_query() {
        for seed in [0u64, 1, 17] {
            let mut policy = RandomEvictPolicy::new(1, seed);
            let mut misses = 0;
            for id in 1..=20u32 {
                if policy.step(&Query::from_ids(&[id])).unwrap().miss {
                    misses += 1;
                }
            }
            assert_eq!(misses, 20);
        }
    }
}
