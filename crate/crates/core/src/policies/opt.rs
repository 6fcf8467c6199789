//! Exact offline optimum by forward dynamic programming over reachable
//! cache states, keeping the minimal cost per state.
//!
//! On a hit the state is frozen for that step; on a miss the successor must
//! contain the query, stay within capacity, and be a subset of the current
//! contents plus the query. The DP enumerates every legal successor, so the
//! result is the true minimum, not a heuristic.

use std::collections::HashMap;

use crate::model::{MissLog, PageId, Query, Trace};
use crate::{Error, Result};

/// Hard guards: instances beyond these are refused, not approximated.
const STATE_GUARD: u128 = 100_000;
const LENGTH_GUARD: usize = 50;
/// Runaway guard on the live state count, for shapes where the binomial
/// admission bound is loose (k close to N).
const LAYER_GUARD: usize = 2_000_000;

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n - k.min(n));
    let mut result: u128 = 1;
    for i in 0..k {
        result = match result.checked_mul(n - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    result
}

type State = Vec<PageId>;

#[derive(Clone)]
struct Entry {
    state: State,
    cost: u32,
    parent: usize,
    miss: bool,
}

/// Computes the minimal number of misses over all legal cache trajectories
/// and reconstructs one optimal trajectory into a [`MissLog`].
pub fn opt_offline_bruteforce(trace: &Trace, k: usize) -> Result<MissLog> {
    if k < trace.query_len() {
        return Err(Error::InfeasibleCapacity { cache_size: k, query_len: trace.query_len() });
    }
    let state_bound = binomial(trace.universe_size() as u128, k.min(trace.universe_size() as usize) as u128);
    if state_bound > STATE_GUARD {
        return Err(Error::InstanceTooLarge { bound: state_bound, limit: STATE_GUARD });
    }
    if trace.len() > LENGTH_GUARD {
        return Err(Error::InstanceTooLarge {
            bound: trace.len() as u128,
            limit: LENGTH_GUARD as u128,
        });
    }

    let mut layers: Vec<Vec<Entry>> = Vec::with_capacity(trace.len() + 1);
    layers.push(vec![Entry { state: Vec::new(), cost: 0, parent: usize::MAX, miss: false }]);

    for query in trace.queries() {
        let prev = layers.last().unwrap();
        let mut next: Vec<Entry> = Vec::new();
        let mut index: HashMap<State, usize> = HashMap::new();
        let mut push = |next: &mut Vec<Entry>,
                        index: &mut HashMap<State, usize>,
                        state: State,
                        cost: u32,
                        parent: usize,
                        miss: bool| {
            match index.get(&state) {
                Some(&i) if next[i].cost <= cost => {}
                Some(&i) => {
                    next[i] = Entry { state, cost, parent, miss };
                }
                None => {
                    index.insert(state.clone(), next.len());
                    next.push(Entry { state, cost, parent, miss });
                }
            }
        };

        for (parent_idx, entry) in prev.iter().enumerate() {
            let resident =
                query.pages().iter().all(|p| entry.state.binary_search(p).is_ok());
            if resident {
                push(&mut next, &mut index, entry.state.clone(), entry.cost, parent_idx, false);
                continue;
            }
            // extra = pages kept beyond the query itself
            let extra: Vec<PageId> = entry
                .state
                .iter()
                .copied()
                .filter(|p| !query.contains(*p))
                .collect();
            let room = k - query.len();
            let mut chosen: Vec<PageId> = Vec::with_capacity(room.min(extra.len()));
            enumerate_subsets(&extra, room, &mut chosen, &mut |subset| {
                let mut state: State =
                    query.pages().iter().copied().chain(subset.iter().copied()).collect();
                state.sort_unstable();
                push(&mut next, &mut index, state, entry.cost + 1, parent_idx, true);
            });
        }
        if next.len() > LAYER_GUARD {
            return Err(Error::InstanceTooLarge {
                bound: next.len() as u128,
                limit: LAYER_GUARD as u128,
            });
        }
        layers.push(next);
    }

    // best final state, then walk parents back to reconstruct the run
    let last = layers.last().unwrap();
    let mut log = MissLog::new();
    if last.is_empty() {
        return Ok(log); // empty trace
    }
    let mut best = 0;
    for (i, entry) in last.iter().enumerate() {
        if entry.cost < last[best].cost {
            best = i;
        }
    }
    let mut steps: Vec<(bool, Vec<PageId>)> = Vec::with_capacity(trace.len());
    let mut idx = best;
    for t in (1..layers.len()).rev() {
        let entry = &layers[t][idx];
        let parent = &layers[t - 1][entry.parent];
        let evicted: Vec<PageId> = parent
            .state
            .iter()
            .copied()
            .filter(|p| entry.state.binary_search(p).is_err())
            .collect();
        steps.push((entry.miss, evicted));
        idx = entry.parent;
    }
    steps.reverse();
    for (miss, evicted) in steps {
        log.record(miss, evicted);
    }
    Ok(log)
}

/// Calls `emit` for every subset of `pool` with at most `room` elements
/// (including the empty subset), in a fixed order.
fn enumerate_subsets(
    pool: &[PageId],
    room: usize,
    chosen: &mut Vec<PageId>,
    emit: &mut impl FnMut(&[PageId]),
) {
    emit(chosen);
    if chosen.len() == room {
        return;
    }
    let start = chosen
        .last()
        .map(|last| pool.partition_point(|p| p <= last))
        .unwrap_or(0);
    for i in start..pool.len() {
        chosen.push(pool[i]);
        enumerate_subsets(pool, room, chosen, emit);
        chosen.pop();
    }
}
