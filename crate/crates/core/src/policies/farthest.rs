//! Farthest-in-future: an offline baseline that evicts the resident pages
//! whose next request is latest. Optimal for single-page queries; for
//! bundles it serves as a fast proxy for the optimum.

use std::cmp::Ordering;
use std::collections::HashMap;

use crate::model::{CacheState, MissLog, PageId, Trace};
use crate::{Error, Result};

/// Runs farthest-in-future over the whole trace with cache size `k`.
///
/// Eviction order on a miss: pages never requested again first (smaller id
/// breaks ties among them), then by farthest next-use index, ties again by
/// smaller id. Tie-breaking is pinned for reproducibility.
pub fn ff_offline(trace: &Trace, k: usize) -> Result<MissLog> {
    if k < trace.query_len() {
        return Err(Error::InfeasibleCapacity { cache_size: k, query_len: trace.query_len() });
    }

    // occurrence positions per page, consumed by a monotone cursor
    let mut occurrences: HashMap<PageId, Vec<usize>> = HashMap::new();
    for (t, query) in trace.queries().iter().enumerate() {
        for p in query.pages() {
            occurrences.entry(*p).or_default().push(t);
        }
    }
    let mut cursor: HashMap<PageId, usize> = HashMap::new();
    let mut next_use = |page: PageId, now: usize| -> Option<usize> {
        let occ = occurrences.get(&page)?;
        let cur = cursor.entry(page).or_insert(0);
        while *cur < occ.len() && occ[*cur] <= now {
            *cur += 1;
        }
        occ.get(*cur).copied()
    };

    let mut cache = CacheState::new(k);
    let mut log = MissLog::new();
    for (t, query) in trace.queries().iter().enumerate() {
        let missing: Vec<PageId> =
            query.pages().iter().copied().filter(|p| !cache.contains(*p)).collect();
        if missing.is_empty() {
            log.record(false, Vec::new());
            continue;
        }
        let overflow = (cache.len() + missing.len()).saturating_sub(k);
        let mut evicted = Vec::with_capacity(overflow);
        if overflow > 0 {
            let mut candidates: Vec<(Option<usize>, PageId)> = cache
                .pages()
                .iter()
                .copied()
                .filter(|p| !query.contains(*p))
                .map(|p| (next_use(p, t), p))
                .collect();
            candidates.sort_unstable_by(|a, b| match (a.0, b.0) {
                (None, None) => a.1.cmp(&b.1),
                (None, Some(_)) => Ordering::Less,
                (Some(_), None) => Ordering::Greater,
                (Some(x), Some(y)) => y.cmp(&x).then(a.1.cmp(&b.1)),
            });
            for &(_, page) in candidates.iter().take(overflow) {
                cache.remove(page);
                evicted.push(page);
            }
            evicted.sort_unstable();
        }
        for p in missing {
            cache.insert(p)?;
        }
        log.record(true, evicted);
    }
    Ok(log)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Query;

    fn trace(n: u32, l: usize, queries: &[&[u32]]) -> Trace {
        Trace::new(n, l, queries.iter().map(|ids| Query::from_ids(ids)).collect()).unwrap()
    }

    #[test]
    fn single_page_hand_simulation() {
        // trace 1,2,3,1,2 with k=2: at t3 evict page 2 (next use t5 is
        // after page 1's t4), so t4 hits and t5 misses: 4 misses total
        let t = trace(3, 1, &[&[1], &[2], &[3], &[1], &[2]]);
        let log = ff_offline(&t, 2).unwrap();
        assert_eq!(log.total_misses(), 4);
        let misses: Vec<bool> = log.records().iter().map(|r| r.miss).collect();
        assert_eq!(misses, vec![true, true, true, false, true]);
        assert_eq!(log.records()[2].evicted, vec![PageId::new(2)]);
    }

    #[test]
    fn fits_in_cache_misses_only_first_presences() {
        let t = trace(4, 2, &[&[1, 2], &[3, 4], &[1, 3], &[2, 4], &[1, 4]]);
        let log = ff_offline(&t, 4).unwrap();
        // queries 1 and 2 introduce first-seen pages, everything else hits
        assert_eq!(log.total_misses(), 2);
    }

    #[test]
    fn never_used_again_evicted_first() {
        // k=2: at t3 both resident pages are dead; smaller id leaves first
        let t = trace(4, 1, &[&[1], &[2], &[3], &[4]]);
        let log = ff_offline(&t, 2).unwrap();
        assert_eq!(log.records()[2].evicted, vec![PageId::new(1)]);
        assert_eq!(log.records()[3].evicted, vec![PageId::new(2)]);
    }
}
