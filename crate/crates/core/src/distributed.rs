//! Multiple-to-single cache reduction: a virtual cache of size `k + g·l`
//! drives `l+1` derived caches of size `k` whose distributed cost equals
//! the virtual cost at every step. A greedy dense-family construction
//! generalizes the reduction to other cache counts.

use std::collections::BTreeMap;

use crate::model::{is_miss, is_miss_distributed, CacheState, MissLog, PageId, Query, Trace};
use crate::policies::{LruPolicy, MarkingPolicy, OnlinePolicy, PolicyKind, StepOutcome};
use crate::{Error, Result};

/// Desk-scale guard on the number of `r`-subsets a dense-family
/// construction may enumerate.
const DENSE_GUARD: u128 = 1_000_000;

/// Geometry of the `l+1`-cache reduction: `g = floor(k / l^2)`, a virtual
/// cache of `k + g·l` positions split into `l+1` blocks of `g·l` positions,
/// and derived caches that each drop one block.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct VirtualCacheLayout {
    cache_size: usize,
    query_len: usize,
    redundancy: usize,
}

impl VirtualCacheLayout {
    pub fn new(cache_size: usize, query_len: usize) -> Result<VirtualCacheLayout> {
        if query_len == 0 {
            return Err(Error::InvalidParameter("query length must be >= 1".into()));
        }
        if cache_size < query_len {
            return Err(Error::InfeasibleCapacity { cache_size, query_len });
        }
        let redundancy = cache_size / (query_len * query_len);
        Ok(VirtualCacheLayout { cache_size, query_len, redundancy })
    }

    /// Per-cache capacity `k`.
    pub fn cache_size(&self) -> usize {
        self.cache_size
    }

    pub fn query_len(&self) -> usize {
        self.query_len
    }

    /// `g = floor(k / l^2)`; zero means the reduction is degenerate but
    /// still well-defined (every derived cache equals the virtual cache).
    pub fn redundancy(&self) -> usize {
        self.redundancy
    }

    pub fn virtual_capacity(&self) -> usize {
        self.cache_size + self.redundancy * self.query_len
    }

    pub fn block_size(&self) -> usize {
        self.redundancy * self.query_len
    }

    pub fn num_caches(&self) -> usize {
        self.query_len + 1
    }

    /// 0-based virtual positions dropped by derived cache `i`.
    pub fn block(&self, i: usize) -> std::ops::Range<usize> {
        debug_assert!(i < self.num_caches());
        i * self.block_size()..(i + 1) * self.block_size()
    }

    /// Position sets of the derived caches: member `i` keeps every virtual
    /// position outside block `i`, hence exactly `k` positions.
    pub fn position_family(&self) -> Vec<Vec<usize>> {
        (0..self.num_caches())
            .map(|i| {
                let block = self.block(i);
                (0..self.virtual_capacity()).filter(|p| !block.contains(p)).collect()
            })
            .collect()
    }
}

/// True iff the distributed cost indicator matches the single-cache cost of
/// the virtual cache for this query. Used as a runtime assertion.
pub fn check_equivalence(derived: &[CacheState], virtual_cache: &CacheState, query: &Query) -> bool {
    match is_miss_distributed(derived, query) {
        Ok(distributed_miss) => distributed_miss == is_miss(virtual_cache, query),
        Err(_) => false,
    }
}

enum VirtualPolicy {
    Lru(LruPolicy),
    Marking(MarkingPolicy),
}

impl VirtualPolicy {
    fn new(kind: PolicyKind, capacity: usize, seed: u64) -> Result<VirtualPolicy> {
        match kind {
            PolicyKind::Lru => Ok(VirtualPolicy::Lru(LruPolicy::new(capacity))),
            PolicyKind::Marking => Ok(VirtualPolicy::Marking(MarkingPolicy::new(capacity, seed))),
            other => Err(Error::InvalidParameter(format!(
                "virtual cache runs lru or marking, got {}",
                other.name()
            ))),
        }
    }

    fn step(&mut self, query: &Query) -> Result<StepOutcome> {
        match self {
            VirtualPolicy::Lru(p) => p.step(query),
            VirtualPolicy::Marking(p) => p.step(query),
        }
    }

    fn cache(&self) -> &CacheState {
        match self {
            VirtualPolicy::Lru(p) => p.cache(),
            VirtualPolicy::Marking(p) => p.cache(),
        }
    }
}

/// Distributed simulation: the virtual cache is the single source of truth
/// and the derived caches are projections of its canonical position
/// ordering onto a position family.
///
/// Positions persist by insertion slot reuse: a page inserted on a miss
/// takes the slot freed by a page it replaced (pairing both in ascending
/// order), and remaining insertions fill the lowest empty slots. Any fixed
/// assignment preserves cost equivalence; this one is the simplest.
pub struct DistributedSim {
    policy: VirtualPolicy,
    slots: Vec<Option<PageId>>,
    slot_of: BTreeMap<PageId, usize>,
    free: std::collections::BTreeSet<usize>,
    members: Vec<Vec<usize>>,
    cache_size: usize,
}

impl DistributedSim {
    /// Simulator for the `m = l+1` block layout.
    pub fn new(layout: &VirtualCacheLayout, kind: PolicyKind, seed: u64) -> Result<DistributedSim> {
        DistributedSim::with_position_family(
            layout.virtual_capacity(),
            layout.position_family(),
            layout.cache_size(),
            kind,
            seed,
        )
    }

    /// Simulator for an arbitrary position family (for dense-family
    /// reductions). Every member must fit in a size-`k` cache.
    pub fn with_position_family(
        virtual_capacity: usize,
        members: Vec<Vec<usize>>,
        cache_size: usize,
        kind: PolicyKind,
        seed: u64,
    ) -> Result<DistributedSim> {
        if members.is_empty() {
            return Err(Error::EmptyCacheSet);
        }
        for member in &members {
            if member.len() > cache_size {
                return Err(Error::InvalidParameter(format!(
                    "position member of size {} exceeds cache size {cache_size}",
                    member.len()
                )));
            }
            if member.iter().any(|&p| p >= virtual_capacity) {
                return Err(Error::InvalidParameter(
                    "position outside the virtual cache".into(),
                ));
            }
        }
        Ok(DistributedSim {
            policy: VirtualPolicy::new(kind, virtual_capacity, seed)?,
            slots: vec![None; virtual_capacity],
            slot_of: BTreeMap::new(),
            free: (0..virtual_capacity).collect(),
            members,
            cache_size,
        })
    }

    pub fn virtual_capacity(&self) -> usize {
        self.slots.len()
    }

    pub fn num_caches(&self) -> usize {
        self.members.len()
    }

    pub fn cache_size(&self) -> usize {
        self.cache_size
    }

    pub fn virtual_cache(&self) -> &CacheState {
        self.policy.cache()
    }

    /// Advances the virtual policy one query and keeps the slot assignment
    /// in sync. The miss verdict is the virtual cache's; by construction it
    /// equals the distributed verdict.
    pub fn step(&mut self, query: &Query) -> Result<StepOutcome> {
        let inserted: Vec<PageId> = query
            .pages()
            .iter()
            .copied()
            .filter(|p| !self.policy.cache().contains(*p))
            .collect();
        let outcome = self.policy.step(query)?;
        if outcome.miss {
            let mut freed: Vec<usize> = Vec::with_capacity(outcome.evicted.len());
            for page in &outcome.evicted {
                let slot = self.slot_of.remove(page).ok_or_else(|| {
                    Error::InvariantViolation(format!("evicted page {page} had no slot"))
                })?;
                self.slots[slot] = None;
                freed.push(slot);
            }
            freed.sort_unstable();
            for (i, page) in inserted.iter().enumerate() {
                let slot = if i < freed.len() {
                    freed[i]
                } else {
                    self.free.pop_first().ok_or_else(|| {
                        Error::InvariantViolation("virtual cache out of slots".into())
                    })?
                };
                self.slots[slot] = Some(*page);
                self.slot_of.insert(*page, slot);
            }
        }
        Ok(outcome)
    }

    /// Materializes the derived caches from the current slot assignment.
    pub fn derived_caches(&self) -> Vec<CacheState> {
        self.members
            .iter()
            .map(|member| {
                CacheState::with_pages(
                    self.cache_size,
                    member.iter().filter_map(|&pos| self.slots[pos]),
                )
            })
            .collect()
    }

    /// Runs a whole trace, producing the shared miss log.
    pub fn run(&mut self, trace: &Trace) -> Result<MissLog> {
        let mut log = MissLog::new();
        for query in trace.queries() {
            let outcome = self.step(query)?;
            log.record(outcome.miss, outcome.evicted);
        }
        Ok(log)
    }
}

/// A family of `k`-subsets of `1..=N` such that every `r`-subset is
/// contained in at least one member.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DenseFamily {
    universe: u32,
    member_size: usize,
    cover_size: usize,
    members: Vec<Vec<u32>>,
}

impl DenseFamily {
    pub fn universe(&self) -> u32 {
        self.universe
    }

    pub fn member_size(&self) -> usize {
        self.member_size
    }

    /// The `r` of r-density.
    pub fn cover_size(&self) -> usize {
        self.cover_size
    }

    /// Members as sorted 1-based id lists.
    pub fn members(&self) -> &[Vec<u32>] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Exhaustively checks r-density over all r-subsets of the universe.
    pub fn verify_dense(&self) -> Result<bool> {
        let subsets = enumerate_subsets(self.universe, self.cover_size)?;
        let masks: Vec<Vec<bool>> = self
            .members
            .iter()
            .map(|member| {
                let mut mask = vec![false; self.universe as usize + 1];
                for &id in member {
                    mask[id as usize] = true;
                }
                mask
            })
            .collect();
        Ok(subsets.iter().all(|subset| {
            masks.iter().any(|mask| subset.iter().all(|&id| mask[id as usize]))
        }))
    }
}

fn binomial_guarded(n: u128, r: u128) -> u128 {
    let r = r.min(n.saturating_sub(r));
    let mut result: u128 = 1;
    for i in 0..r {
        result = match result.checked_mul(n - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
        if result > DENSE_GUARD {
            return result;
        }
    }
    result
}

fn enumerate_subsets(n: u32, r: usize) -> Result<Vec<Vec<u32>>> {
    let bound = binomial_guarded(n as u128, r as u128);
    if bound > DENSE_GUARD {
        return Err(Error::InstanceTooLarge { bound, limit: DENSE_GUARD });
    }
    let mut out = Vec::with_capacity(bound as usize);
    let mut current = Vec::with_capacity(r);
    fn recurse(n: u32, r: usize, start: u32, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if current.len() == r {
            out.push(current.clone());
            return;
        }
        let remaining = r - current.len();
        for id in start..=n.saturating_sub(remaining as u32 - 1) {
            current.push(id);
            recurse(n, r, id + 1, current, out);
            current.pop();
        }
    }
    recurse(n, r, 1, &mut current, &mut out);
    Ok(out)
}

/// Greedy set cover over the universe of `r`-subsets: each round builds one
/// `k`-subset page by page, preferring pages that complete the most
/// uncovered subsets (ties: higher uncovered degree, then smaller id), and
/// adds it to the family. Guarded to desk scale; the family is always
/// exhaustively r-dense on return.
pub fn greedy_dense_family(n: u32, k: usize, r: usize) -> Result<DenseFamily> {
    if !(r >= 1 && r < k && (k as u64) < n as u64) {
        return Err(Error::InvalidParameter(format!(
            "dense family needs 1 <= r < k < N, got r={r} k={k} N={n}"
        )));
    }
    let subsets = enumerate_subsets(n, r)?;
    let mut page_index: Vec<Vec<usize>> = vec![Vec::new(); n as usize + 1];
    for (idx, subset) in subsets.iter().enumerate() {
        for &id in subset {
            page_index[id as usize].push(idx);
        }
    }
    let mut covered = vec![false; subsets.len()];
    let mut uncovered_count = subsets.len();
    let mut members: Vec<Vec<u32>> = Vec::new();

    while uncovered_count > 0 {
        let mut degree = vec![0usize; n as usize + 1];
        for (idx, subset) in subsets.iter().enumerate() {
            if !covered[idx] {
                for &id in subset {
                    degree[id as usize] += 1;
                }
            }
        }

        let mut in_member = vec![false; n as usize + 1];
        let mut missing: Vec<usize> = subsets.iter().map(|s| s.len()).collect();
        let mut member: Vec<u32> = Vec::with_capacity(k);
        for _ in 0..k {
            let mut marginal = vec![0usize; n as usize + 1];
            for (idx, subset) in subsets.iter().enumerate() {
                if !covered[idx] && missing[idx] == 1 {
                    if let Some(&id) = subset.iter().find(|&&id| !in_member[id as usize]) {
                        marginal[id as usize] += 1;
                    }
                }
            }
            let best = (1..=n)
                .filter(|&id| !in_member[id as usize])
                .max_by_key(|&id| {
                    (marginal[id as usize], degree[id as usize], std::cmp::Reverse(id))
                })
                .expect("k < N leaves pages to pick");
            in_member[best as usize] = true;
            member.push(best);
            for &idx in &page_index[best as usize] {
                missing[idx] -= 1;
            }
        }

        let mut newly: Vec<usize> = (0..subsets.len())
            .filter(|&idx| !covered[idx] && missing[idx] == 0)
            .collect();
        if newly.is_empty() {
            // force progress: seed the member with the first uncovered
            // subset and refill by degree
            let first = (0..subsets.len()).find(|&idx| !covered[idx]).unwrap();
            let mut forced: Vec<u32> = subsets[first].clone();
            let mut chosen = vec![false; n as usize + 1];
            for &id in &forced {
                chosen[id as usize] = true;
            }
            let mut rest: Vec<u32> = (1..=n).filter(|&id| !chosen[id as usize]).collect();
            rest.sort_by_key(|&id| (std::cmp::Reverse(degree[id as usize]), id));
            forced.extend(rest.into_iter().take(k - forced.len()));
            member = forced;
            let mask: Vec<bool> = {
                let mut mask = vec![false; n as usize + 1];
                for &id in &member {
                    mask[id as usize] = true;
                }
                mask
            };
            newly = (0..subsets.len())
                .filter(|&idx| {
                    !covered[idx] && subsets[idx].iter().all(|&id| mask[id as usize])
                })
                .collect();
            debug_assert!(!newly.is_empty());
        }
        for idx in newly {
            covered[idx] = true;
            uncovered_count -= 1;
        }
        member.sort_unstable();
        members.push(member);
    }

    Ok(DenseFamily { universe: n, member_size: k, cover_size: r, members })
}

/// Dense-family reduction for an arbitrary virtual capacity `k*`: the
/// returned family's members are position sets (1-based) of the virtual
/// cache, and the cache count is the family size.
pub fn general_reduction(kstar: usize, k: usize, l: usize) -> Result<(DenseFamily, usize)> {
    if !(l < k && k < kstar) {
        return Err(Error::InvalidParameter(format!(
            "general reduction needs l < k < k*, got l={l} k={k} k*={kstar}"
        )));
    }
    let family = greedy_dense_family(kstar as u32, k, l)?;
    let caches = family.len();
    Ok((family, caches))
}

/// Builds a [`DistributedSim`] whose derived caches mirror the members of a
/// dense family over virtual positions.
pub fn dense_family_sim(
    family: &DenseFamily,
    cache_size: usize,
    kind: PolicyKind,
    seed: u64,
) -> Result<DistributedSim> {
    let members: Vec<Vec<usize>> = family
        .members()
        .iter()
        .map(|member| member.iter().map(|&id| id as usize - 1).collect())
        .collect();
    DistributedSim::with_position_family(
        family.universe() as usize,
        members,
        cache_size,
        kind,
        seed,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Query;
    use crate::workloads::WorkloadSpec;

    #[test]
    fn layout_arithmetic() {
        let layout = VirtualCacheLayout::new(9, 2).unwrap();
        assert_eq!(layout.redundancy(), 2);
        assert_eq!(layout.virtual_capacity(), 13);
        assert_eq!(layout.num_caches(), 3);
        assert_eq!(layout.block_size(), 4);
        let family = layout.position_family();
        assert_eq!(family.len(), 3);
        for member in &family {
            assert_eq!(member.len(), 9);
        }
    }

    #[test]
    fn degenerate_layout_has_identical_caches() {
        // k=8, l=3: g = 0, every derived cache equals the virtual cache
        let layout = VirtualCacheLayout::new(8, 3).unwrap();
        assert_eq!(layout.redundancy(), 0);
        assert_eq!(layout.virtual_capacity(), 8);
        let mut sim = DistributedSim::new(&layout, PolicyKind::Lru, 0).unwrap();
        sim.step(&Query::from_ids(&[1, 2, 3])).unwrap();
        let derived = sim.derived_caches();
        assert_eq!(derived.len(), 4);
        for cache in derived {
            assert_eq!(cache.pages(), sim.virtual_cache().pages());
        }
    }

    #[test]
    fn stepwise_equivalence_under_both_policies() {
        for kind in [PolicyKind::Lru, PolicyKind::Marking] {
            let layout = VirtualCacheLayout::new(9, 2).unwrap();
            let mut sim = DistributedSim::new(&layout, kind, 7).unwrap();
            let trace = WorkloadSpec::uniform(30, 2, 2000, 13).generate().unwrap();
            for query in trace.queries() {
                let outcome = sim.step(query).unwrap();
                let derived = sim.derived_caches();
                for cache in &derived {
                    assert!(cache.len() <= 9);
                }
                assert!(check_equivalence(&derived, sim.virtual_cache(), query));
                // verdict source: virtual cache
                let virt_miss = outcome.miss;
                let dist_miss = is_miss_distributed(&derived, query).unwrap();
                // post-update both sides must agree on the NEXT arrival of
                // the same query: a served query is resident somewhere
                if virt_miss {
                    assert!(!dist_miss || !is_miss(sim.virtual_cache(), query));
                }
            }
        }
    }

    #[test]
    fn resident_bundles_always_have_a_full_holder() {
        // exhaustive over all 2-subsets of a full 13-slot virtual cache
        let layout = VirtualCacheLayout::new(9, 2).unwrap();
        let mut sim = DistributedSim::new(&layout, PolicyKind::Lru, 0).unwrap();
        for chunk in (1..=12u32).collect::<Vec<_>>().chunks(2) {
            sim.step(&Query::from_ids(chunk)).unwrap();
        }
        sim.step(&Query::from_ids(&[13, 1])).unwrap();
        assert_eq!(sim.virtual_cache().len(), 13);
        let derived = sim.derived_caches();
        let pages: Vec<u32> = sim.virtual_cache().pages().iter().map(|p| p.get()).collect();
        for (i, &a) in pages.iter().enumerate() {
            for &b in &pages[i + 1..] {
                let q = Query::from_ids(&[a, b]);
                assert!(!is_miss_distributed(&derived, &q).unwrap());
            }
        }
    }

    #[test]
    fn corrupted_overlapping_blocks_break_equivalence() {
        // blocks of size g*l + 1 cannot tile the virtual cache, so they
        // overlap; a query hitting a shared position plus the third block
        // misses every derived cache while the virtual cache holds it
        let virtual_capacity = 13;
        let members: Vec<Vec<usize>> = vec![
            (0..virtual_capacity).filter(|p| !(0..5).contains(p)).collect(),
            (0..virtual_capacity).filter(|p| !(4..9).contains(p)).collect(),
            (0..virtual_capacity).filter(|p| !(8..13).contains(p)).collect(),
        ];
        let mut sim =
            DistributedSim::with_position_family(virtual_capacity, members, 9, PolicyKind::Lru, 0)
                .unwrap();
        for chunk in (1..=12u32).collect::<Vec<_>>().chunks(2) {
            sim.step(&Query::from_ids(chunk)).unwrap();
        }
        sim.step(&Query::from_ids(&[13, 1])).unwrap();
        assert_eq!(sim.virtual_cache().len(), 13);
        let derived = sim.derived_caches();
        let pages: Vec<u32> = sim.virtual_cache().pages().iter().map(|p| p.get()).collect();
        let mut found_counterexample = false;
        for (i, &a) in pages.iter().enumerate() {
            for &b in &pages[i + 1..] {
                let q = Query::from_ids(&[a, b]);
                if !check_equivalence(&derived, sim.virtual_cache(), &q) {
                    found_counterexample = true;
                }
            }
        }
        assert!(found_counterexample, "oversized blocks should break equivalence");
    }

    #[test]
    fn greedy_family_examples() {
        // two members cover all singletons of a (k+1)-universe
        let family = greedy_dense_family(5, 4, 1).unwrap();
        assert!(family.verify_dense().unwrap());
        assert_eq!(family.len(), 2);

        // r = k-1, N = k+1
        let family = greedy_dense_family(5, 4, 3).unwrap();
        assert!(family.verify_dense().unwrap());
        let bound = crate::bounds::dense_family_size_bound(5, 4, 3).unwrap();
        assert!((family.len() as f64) <= bound);
    }

    #[test]
    fn greedy_family_guards() {
        assert!(matches!(
            greedy_dense_family(10, 10, 2),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            greedy_dense_family(5000, 100, 3),
            Err(Error::InstanceTooLarge { .. })
        ));
    }

    #[test]
    fn general_reduction_small_cases() {
        let (family, m) = general_reduction(5, 4, 1).unwrap();
        assert_eq!(m, 2);
        assert!(family.verify_dense().unwrap());

        let (family, m) = general_reduction(13, 9, 2).unwrap();
        assert!(m <= 9, "family size {m} exceeds the promised bound");
        assert!(family.verify_dense().unwrap());

        // step-wise equivalence under the dense-family projection
        let mut sim = dense_family_sim(&family, 9, PolicyKind::Marking, 3).unwrap();
        let trace = WorkloadSpec::uniform(40, 2, 2000, 17).generate().unwrap();
        for query in trace.queries() {
            sim.step(query).unwrap();
            assert!(check_equivalence(&sim.derived_caches(), sim.virtual_cache(), query));
        }
    }
}
