//! Query-sequence generators: two-level Zipf, uniform, the cyclic
//! adversarial trace, the deterministic lower-bound adversary, and the
//! three-stage randomized-adversary segment.

use std::collections::BTreeSet;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::exec;
use crate::model::{MissLog, PageId, Query, Trace};
use crate::policies::{online_policy, MarkingPolicy, OnlinePolicy, PolicyKind, RandomEvictPolicy};
use crate::rng::mix_seed;
use crate::{Error, Result};

/// Workload families the lab generates.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum WorkloadKind {
    Zipf,
    Uniform,
    CyclicAdversarial,
    DeterministicAdversary,
    RandomizedAdversarySegment,
}

impl WorkloadKind {
    pub fn name(self) -> &'static str {
        match self {
            WorkloadKind::Zipf => "zipf",
            WorkloadKind::Uniform => "uniform",
            WorkloadKind::CyclicAdversarial => "cyclic",
            WorkloadKind::DeterministicAdversary => "det-adversary",
            WorkloadKind::RandomizedAdversarySegment => "rand-adversary-segment",
        }
    }

    pub fn parse(name: &str) -> Result<WorkloadKind> {
        match name {
            "zipf" => Ok(WorkloadKind::Zipf),
            "uniform" => Ok(WorkloadKind::Uniform),
            "cyclic" => Ok(WorkloadKind::CyclicAdversarial),
            "det-adversary" => Ok(WorkloadKind::DeterministicAdversary),
            "rand-adversary-segment" => Ok(WorkloadKind::RandomizedAdversarySegment),
            other => Err(Error::InvalidParameter(format!("unknown workload kind `{other}`"))),
        }
    }
}

/// Declarative description of one generated workload. Fields not used by a
/// kind are ignored by it.
#[derive(Clone, Debug)]
pub struct WorkloadSpec {
    pub kind: WorkloadKind,
    /// Universe size `N` (zipf/uniform).
    pub universe_size: u32,
    /// Query length `l`.
    pub query_len: usize,
    /// Number of queries `T` (zipf/uniform/cyclic).
    pub num_queries: usize,
    /// Zipf exponent `s` for both levels.
    pub zipf_exponent: f64,
    /// Candidate query pool size (zipf).
    pub candidate_count: usize,
    /// Online cache size `k` (cyclic and adversary kinds).
    pub cache_size: usize,
    /// Offline cache size `h` (randomized adversary).
    pub offline_cache_size: usize,
    /// New pages per segment `m` (randomized adversary).
    pub segment_new_pages: usize,
    /// Ensemble size `E` (randomized adversary).
    pub ensemble_size: usize,
    pub seed: u64,
}

impl WorkloadSpec {
    /// A Zipf spec with the lab defaults (`s = 1`, 2000 candidates).
    pub fn zipf(universe_size: u32, query_len: usize, num_queries: usize, seed: u64) -> Self {
        WorkloadSpec {
            kind: WorkloadKind::Zipf,
            universe_size,
            query_len,
            num_queries,
            zipf_exponent: 1.0,
            candidate_count: 2000,
            cache_size: 0,
            offline_cache_size: 0,
            segment_new_pages: 0,
            ensemble_size: 0,
            seed,
        }
    }

    pub fn uniform(universe_size: u32, query_len: usize, num_queries: usize, seed: u64) -> Self {
        WorkloadSpec { kind: WorkloadKind::Uniform, ..WorkloadSpec::zipf(universe_size, query_len, num_queries, seed) }
    }

    /// Generates the trace this spec describes.
    pub fn generate(&self) -> Result<Trace> {
        match self.kind {
            WorkloadKind::Zipf => gen_zipf_trace(self),
            WorkloadKind::Uniform => gen_uniform_trace(self),
            WorkloadKind::CyclicAdversarial => {
                gen_cyclic_adversarial(self.cache_size, self.query_len, self.num_queries)
            }
            WorkloadKind::DeterministicAdversary => {
                let (trace, _) = deterministic_adversary(
                    PolicyKind::Lru,
                    self.cache_size,
                    self.query_len,
                    self.num_queries,
                )?;
                Ok(trace)
            }
            WorkloadKind::RandomizedAdversarySegment => {
                let segment = randomized_adversary_segment(&AdversarySegmentParams {
                    cache_size: self.cache_size,
                    offline_cache_size: self.offline_cache_size,
                    query_len: self.query_len,
                    new_pages: self.segment_new_pages,
                    ensemble_size: self.ensemble_size,
                    ensemble_kind: PolicyKind::Marking,
                    seed: self.seed,
                })?;
                Ok(segment.trace)
            }
        }
    }
}

fn draw_distinct_pages(
    rng: &mut impl Rng,
    dist: &WeightedIndex<f64>,
    count: usize,
) -> Vec<PageId> {
    // rejection over the full distribution equals sequential weighted draws
    // with removal: the next new page is distributed over the remaining
    // weights
    let mut pages = BTreeSet::new();
    while pages.len() < count {
        pages.insert(PageId::new(dist.sample(rng) as u32 + 1));
    }
    pages.into_iter().collect()
}

/// Two-level Zipf workload: a pool of candidate queries is built by drawing
/// `l` distinct pages per candidate with probability proportional to
/// `1/i^s`, then `T` queries are emitted by sampling candidate ranks from a
/// second Zipf distribution.
pub fn gen_zipf_trace(spec: &WorkloadSpec) -> Result<Trace> {
    let n = spec.universe_size;
    let l = spec.query_len;
    if l == 0 || l as u64 > n as u64 {
        return Err(Error::InfeasibleWorkload(format!("query length {l} vs universe {n}")));
    }
    if spec.candidate_count == 0 {
        return Err(Error::InfeasibleWorkload("candidate count must be >= 1".into()));
    }
    if spec.zipf_exponent <= 0.0 {
        return Err(Error::InfeasibleWorkload("zipf exponent must be positive".into()));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(spec.seed);
    let page_weights: Vec<f64> =
        (1..=n as usize).map(|i| 1.0 / (i as f64).powf(spec.zipf_exponent)).collect();
    let page_dist = WeightedIndex::new(&page_weights)
        .map_err(|e| Error::InfeasibleWorkload(format!("page weights: {e}")))?;
    let candidates: Vec<Query> = (0..spec.candidate_count)
        .map(|_| Query::new(draw_distinct_pages(&mut rng, &page_dist, l)))
        .collect::<Result<_>>()?;

    let rank_weights: Vec<f64> = (1..=spec.candidate_count)
        .map(|r| 1.0 / (r as f64).powf(spec.zipf_exponent))
        .collect();
    let rank_dist = WeightedIndex::new(&rank_weights)
        .map_err(|e| Error::InfeasibleWorkload(format!("rank weights: {e}")))?;
    let queries: Vec<Query> =
        (0..spec.num_queries).map(|_| candidates[rank_dist.sample(&mut rng)].clone()).collect();
    Trace::new(n, l, queries)
}

/// Uniform workload: every query independently samples `l` distinct pages
/// uniformly without replacement.
pub fn gen_uniform_trace(spec: &WorkloadSpec) -> Result<Trace> {
    let n = spec.universe_size;
    let l = spec.query_len;
    if l == 0 || l as u64 > n as u64 {
        return Err(Error::InfeasibleWorkload(format!("query length {l} vs universe {n}")));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(spec.seed);
    let queries: Vec<Query> = (0..spec.num_queries)
        .map(|_| {
            let idx = rand::seq::index::sample(&mut rng, n as usize, l);
            Query::new(idx.into_iter().map(|i| PageId::new(i as u32 + 1)))
        })
        .collect::<Result<_>>()?;
    Trace::new(n, l, queries)
}

/// Cyclic adversarial trace: every query requests `l-1` fixed pages plus
/// one page from a cycle of length `k - (l-1) + 1`, so the working set is
/// exactly `k+1` pages and query `i` repeats query `i - cycle`.
///
/// Deterministic and seed-free. Cycling pages are `1..=cycle`, fixed pages
/// sit above them, and the universe is exactly `k+1`.
pub fn gen_cyclic_adversarial(k: usize, l: usize, t: usize) -> Result<Trace> {
    if l == 0 {
        return Err(Error::InfeasibleWorkload("query length must be >= 1".into()));
    }
    if k < l {
        return Err(Error::InfeasibleCapacity { cache_size: k, query_len: l });
    }
    let cycle = k - (l - 1) + 1;
    let fixed: Vec<PageId> = (cycle + 1..=k + 1).map(|id| PageId::new(id as u32)).collect();
    debug_assert_eq!(fixed.len(), l - 1);
    let queries: Vec<Query> = (0..t)
        .map(|i| {
            let cycling = PageId::new((i % cycle) as u32 + 1);
            Query::new(fixed.iter().copied().chain(std::iter::once(cycling)))
        })
        .collect::<Result<_>>()?;
    Trace::new(k as u32 + 1, l, queries)
}

/// Cycle length of the adversarial trace for the given `k` and `l`.
pub fn cyclic_adversarial_cycle_len(k: usize, l: usize) -> usize {
    k - (l - 1) + 1
}

/// Builds the deterministic lower-bound trace against a live policy: every
/// query pairs the fixed pages `1..l-1` with one pool page currently absent
/// from the policy's cache, which exists by pigeonhole, so the policy
/// misses every query. Returns the emitted trace and the policy's log.
pub fn deterministic_adversary_against<P: OnlinePolicy>(
    policy: &mut P,
    k: usize,
    l: usize,
    t: usize,
) -> Result<(Trace, MissLog)> {
    if l == 0 || k < l {
        return Err(Error::InfeasibleCapacity { cache_size: k, query_len: l });
    }
    let fixed: Vec<PageId> = (1..l as u32).map(PageId::new).collect();
    let pool: Vec<PageId> = (l as u32..=k as u32 + 1).map(PageId::new).collect();
    debug_assert_eq!(pool.len(), k - l + 2);

    let mut queries = Vec::with_capacity(t);
    let mut log = MissLog::new();
    for _ in 0..t {
        let absent = pool
            .iter()
            .copied()
            .find(|p| !policy.cache().contains(*p))
            .ok_or_else(|| {
                Error::InvariantViolation("no absent pool page; pigeonhole broken".into())
            })?;
        let query = Query::new(fixed.iter().copied().chain(std::iter::once(absent)))?;
        let outcome = policy.step(&query)?;
        if !outcome.miss {
            return Err(Error::InvariantViolation(
                "adversary produced a hit against a deterministic policy".into(),
            ));
        }
        log.record(outcome.miss, outcome.evicted);
        queries.push(query);
    }
    Ok((Trace::new(k as u32 + 1, l, queries)?, log))
}

/// Kind-based wrapper around [`deterministic_adversary_against`]; rejects
/// randomized and offline kinds.
pub fn deterministic_adversary(
    kind: PolicyKind,
    k: usize,
    l: usize,
    t: usize,
) -> Result<(Trace, MissLog)> {
    if !kind.is_online() || kind.is_randomized() {
        return Err(Error::InvalidParameter(format!(
            "deterministic adversary requires a deterministic online policy, got {}",
            kind.name()
        )));
    }
    let mut policy = online_policy(kind, k, 0)?;
    deterministic_adversary_against(policy.as_mut(), k, l, t)
}

/// Parameters of one three-stage randomized-adversary segment.
#[derive(Clone, Copy, Debug)]
pub struct AdversarySegmentParams {
    /// Online cache size `k`.
    pub cache_size: usize,
    /// Offline cache size `h < k`.
    pub offline_cache_size: usize,
    /// Query length `l`.
    pub query_len: usize,
    /// New pages `m`; `(k - h + m)` must be divisible by `l`.
    pub new_pages: usize,
    /// Number of independent policy copies used to estimate residency.
    pub ensemble_size: usize,
    /// Randomized online policy under attack.
    pub ensemble_kind: PolicyKind,
    pub seed: u64,
}

/// One generated segment plus the measurements taken while driving the
/// ensemble through it.
#[derive(Clone, Debug)]
pub struct AdversarySegment {
    /// Warm-up queries followed by the three stages, as one trace.
    pub trace: Trace,
    /// Queries that pre-load the offline cache's pages before the segment.
    pub warmup_len: usize,
    /// Lengths of stages 1..3: `(k-h+m)/l`, `1`, `h-l`.
    pub stage_lens: [usize; 3],
    /// The `l-1` fixed pages of stage 3 probes.
    pub fixed_pages: Vec<PageId>,
    /// The `k+m` candidate pages.
    pub candidates: Vec<PageId>,
    /// Candidate chosen by each stage-3 probe, in order.
    pub probed: Vec<PageId>,
    /// Ensemble-mean misses per stage.
    pub expected_misses: [f64; 3],
    /// Per-copy stage-3 miss counts, for standard-error computation.
    pub stage3_miss_counts: Vec<u32>,
}

/// Builds one adversary segment and measures the ensemble on it.
///
/// Stage 1 requests `k-h+m` all-new pages; stage 2 one query of `l` new
/// pages of which `l-1` become the fixed pages; stage 3 issues `h-l`
/// probes, each pairing the fixed pages with the candidate whose estimated
/// residency across the ensemble is minimal (ties by smaller id). All
/// copies are fed the identical prefix; they advance concurrently and join
/// before each probe is chosen.
pub fn randomized_adversary_segment(
    params: &AdversarySegmentParams,
) -> Result<AdversarySegment> {
    let AdversarySegmentParams {
        cache_size: k,
        offline_cache_size: h,
        query_len: l,
        new_pages: m,
        ensemble_size,
        ensemble_kind,
        seed,
    } = *params;
    if l == 0 || l > h || h >= k {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= l <= h < k, got l={l} h={h} k={k}"
        )));
    }
    if (k - h + m) % l != 0 {
        return Err(Error::InvalidParameter(format!(
            "(k - h + m) = {} must be divisible by l = {l}",
            k - h + m
        )));
    }
    if ensemble_size < 100 {
        return Err(Error::InvalidParameter(format!(
            "ensemble size {ensemble_size} below minimum 100"
        )));
    }
    if !ensemble_kind.is_online() || !ensemble_kind.is_randomized() {
        return Err(Error::InvalidParameter(format!(
            "segment adversary targets randomized online policies, got {}",
            ensemble_kind.name()
        )));
    }

    let universe = (k + m + l) as u32;
    let mut queries: Vec<Query> = Vec::new();

    // warm-up: load pages 1..=h, the pages the offline benchmark holds
    // when the segment proper begins
    let warmup_pages: Vec<PageId> = (1..=h as u32).map(PageId::new).collect();
    for chunk in warmup_pages.chunks(l) {
        queries.push(Query::new(chunk.iter().copied())?);
    }
    let warmup_len = queries.len();

    // stage 1: (k-h+m)/l queries of all-new pages
    let stage1_pages: Vec<PageId> = (h as u32 + 1..=(k + m) as u32).map(PageId::new).collect();
    let stage1_len = stage1_pages.len() / l;
    for chunk in stage1_pages.chunks(l) {
        queries.push(Query::new(chunk.iter().copied())?);
    }

    // stage 2: one query of l new pages; the first l-1 become fixed
    let stage2_pages: Vec<PageId> =
        ((k + m) as u32 + 1..=(k + m + l) as u32).map(PageId::new).collect();
    queries.push(Query::new(stage2_pages.iter().copied())?);
    let fixed_pages: Vec<PageId> = stage2_pages[..l - 1].to_vec();

    // candidates: stage-1 new pages plus the offline cache's h pages
    let candidates: Vec<PageId> = (1..=(k + m) as u32).map(PageId::new).collect();

    // spin up the ensemble and feed the shared prefix
    let mut copies: Vec<Box<dyn OnlinePolicy + Send>> = (0..ensemble_size)
        .map(|i| -> Box<dyn OnlinePolicy + Send> {
            let copy_seed = mix_seed(seed, i as u64);
            match ensemble_kind {
                PolicyKind::Marking => Box::new(MarkingPolicy::new(k, copy_seed)),
                _ => Box::new(RandomEvictPolicy::new(k, copy_seed)),
            }
        })
        .collect();
    let prefix: Vec<Query> = queries.clone();
    let mut miss_counts: Vec<[u32; 3]> = vec![[0; 3]; ensemble_size];
    {
        let counts = &mut miss_counts;
        let copies = &mut copies;
        let pairs: Vec<(&mut Box<dyn OnlinePolicy + Send>, &mut [u32; 3])> =
            copies.iter_mut().zip(counts.iter_mut()).collect();
        let mut pairs = pairs;
        exec::for_each_mut(&mut pairs, |(copy, counts)| {
            for (idx, query) in prefix.iter().enumerate() {
                let outcome = copy.step(query).expect("prefix step");
                if outcome.miss {
                    if idx >= warmup_len {
                        let stage = if idx < warmup_len + stage1_len { 0 } else { 1 };
                        counts[stage] += 1;
                    }
                }
            }
        });
    }

    // stage 3: h-l probes, each choosing the candidate with minimal
    // estimated residency across the ensemble
    let mut probed = Vec::with_capacity(h - l);
    for _ in 0..h - l {
        let residency: Vec<usize> = candidates
            .iter()
            .map(|&c| copies.iter().filter(|copy| copy.cache().contains(c)).count())
            .collect();
        let (best_idx, _) = residency
            .iter()
            .enumerate()
            .min_by_key(|&(i, r)| (*r, candidates[i]))
            .expect("non-empty candidates");
        let chosen = candidates[best_idx];
        probed.push(chosen);
        let query = Query::new(fixed_pages.iter().copied().chain(std::iter::once(chosen)))?;
        queries.push(query.clone());

        let pairs: Vec<(&mut Box<dyn OnlinePolicy + Send>, &mut [u32; 3])> =
            copies.iter_mut().zip(miss_counts.iter_mut()).collect();
        let mut pairs = pairs;
        exec::for_each_mut(&mut pairs, |(copy, counts)| {
            let outcome = copy.step(&query).expect("probe step");
            if outcome.miss {
                counts[2] += 1;
            }
        });
    }

    let e = ensemble_size as f64;
    let expected_misses = [
        miss_counts.iter().map(|c| c[0] as f64).sum::<f64>() / e,
        miss_counts.iter().map(|c| c[1] as f64).sum::<f64>() / e,
        miss_counts.iter().map(|c| c[2] as f64).sum::<f64>() / e,
    ];
    let stage3_miss_counts: Vec<u32> = miss_counts.iter().map(|c| c[2]).collect();

    Ok(AdversarySegment {
        trace: Trace::new(universe, l, queries)?,
        warmup_len,
        stage_lens: [stage1_len, 1, h - l],
        fixed_pages,
        candidates,
        probed,
        expected_misses,
        stage3_miss_counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policies::run_policy;

    #[test]
    fn zipf_shape_contract() {
        let spec = WorkloadSpec::zipf(100, 3, 500, 7);
        let trace = spec.generate().unwrap();
        assert_eq!(trace.len(), 500);
        assert_eq!(trace.query_len(), 3);
        for q in trace.queries() {
            assert_eq!(q.len(), 3);
            assert!(q.pages().iter().all(|p| p.get() >= 1 && p.get() <= 100));
        }
        // reproducible
        assert_eq!(spec.generate().unwrap(), trace);
    }

    #[test]
    fn zipf_single_candidate_repeats() {
        let mut spec = WorkloadSpec::zipf(50, 2, 40, 3);
        spec.candidate_count = 1;
        let trace = spec.generate().unwrap();
        let first = trace.queries()[0].clone();
        assert!(trace.queries().iter().all(|q| *q == first));
    }

    #[test]
    fn zipf_rank_frequencies_follow_the_law() {
        // rank 1 should appear about twice as often as rank 2 under s=1
        let mut spec = WorkloadSpec::zipf(10_000, 10, 40_000, 11);
        spec.candidate_count = 2000;
        let trace = spec.generate().unwrap();
        // recover candidate identity by query equality against a regenerated
        // candidate pool: counting distinct queries is enough here because
        // the two most frequent candidates dominate
        let mut counts: std::collections::HashMap<&Query, usize> = Default::default();
        for q in trace.queries() {
            *counts.entry(q).or_default() += 1;
        }
        let mut freqs: Vec<usize> = counts.values().copied().collect();
        freqs.sort_unstable_by(|a, b| b.cmp(a));
        let ratio = freqs[0] as f64 / freqs[1] as f64;
        assert!((ratio - 2.0).abs() < 0.2, "rank1/rank2 ratio {ratio} not near 2");
    }

    #[test]
    fn uniform_marginals_and_forced_case() {
        let spec = WorkloadSpec::uniform(40, 4, 40_000, 5);
        let trace = spec.generate().unwrap();
        let mut counts = vec![0usize; 41];
        for q in trace.queries() {
            for p in q.pages() {
                counts[p.get() as usize] += 1;
            }
        }
        let t = trace.len() as f64;
        let expect = 4.0 / 40.0;
        let sigma = (expect * (1.0 - expect) / t).sqrt();
        for &page in &[1usize, 10, 20, 30, 40] {
            let freq = counts[page] as f64 / t;
            assert!(
                (freq - expect).abs() <= 3.0 * sigma,
                "page {page} marginal {freq} vs {expect}"
            );
        }
        // total draws are exactly T*l, so the mean marginal is exact
        assert_eq!(counts.iter().sum::<usize>(), trace.len() * 4);

        let spec = WorkloadSpec::uniform(4, 4, 10, 2);
        let trace = spec.generate().unwrap();
        for q in trace.queries() {
            assert_eq!(q.len(), 4);
        }
    }

    #[test]
    fn infeasible_query_len_rejected() {
        let spec = WorkloadSpec::zipf(3, 4, 10, 1);
        assert!(matches!(spec.generate(), Err(Error::InfeasibleWorkload(_))));
        let spec = WorkloadSpec::uniform(3, 4, 10, 1);
        assert!(matches!(spec.generate(), Err(Error::InfeasibleWorkload(_))));
    }

    #[test]
    fn cyclic_structure() {
        let k = 12;
        let l = 3;
        let t = 40;
        let trace = gen_cyclic_adversarial(k, l, t).unwrap();
        let cycle = cyclic_adversarial_cycle_len(k, l);
        assert_eq!(cycle, 11);
        assert_eq!(trace.universe_size(), k as u32 + 1);
        for i in cycle..t {
            assert_eq!(trace.queries()[i], trace.queries()[i - cycle]);
        }
        // deterministic and seed-free
        assert_eq!(gen_cyclic_adversarial(k, l, t).unwrap(), trace);
    }

    #[test]
    fn cyclic_degenerate_k_equals_l() {
        let trace = gen_cyclic_adversarial(3, 3, 10).unwrap();
        assert_eq!(cyclic_adversarial_cycle_len(3, 3), 2);
        assert_eq!(trace.queries()[0], trace.queries()[2]);
        assert_ne!(trace.queries()[0], trace.queries()[1]);
        let log = run_policy(PolicyKind::Lru, &trace, 3, 0).unwrap();
        assert_eq!(log.total_misses(), 10);
    }

    #[test]
    fn deterministic_adversary_forces_every_miss() {
        let (trace, log) = deterministic_adversary(PolicyKind::Lru, 3, 2, 1000).unwrap();
        assert_eq!(log.total_misses(), 1000);
        assert!((log.miss_ratio() - 1.0).abs() < 1e-12);
        // exactly k-l+2 pool pages are ever used
        let mut pool_pages = BTreeSet::new();
        for q in trace.queries() {
            for p in q.pages() {
                if p.get() >= 2 {
                    pool_pages.insert(*p);
                }
            }
        }
        assert_eq!(pool_pages.len(), 3 - 2 + 2);
    }

    #[test]
    fn deterministic_adversary_rejects_randomized() {
        for kind in [PolicyKind::Marking, PolicyKind::RandomEvict, PolicyKind::FarthestInFuture] {
            assert!(deterministic_adversary(kind, 4, 2, 10).is_err());
        }
    }

    #[test]
    fn segment_stage_arithmetic() {
        let params = AdversarySegmentParams {
            cache_size: 10,
            offline_cache_size: 6,
            query_len: 2,
            new_pages: 2,
            ensemble_size: 100,
            ensemble_kind: PolicyKind::Marking,
            seed: 5,
        };
        let segment = randomized_adversary_segment(&params).unwrap();
        assert_eq!(segment.stage_lens, [3, 1, 4]);
        assert_eq!(segment.candidates.len(), 12);
        assert_eq!(segment.fixed_pages.len(), 1);
        assert_eq!(segment.probed.len(), 4);
        assert_eq!(
            segment.trace.len(),
            segment.warmup_len + 3 + 1 + 4
        );
        // stage 1 and 2 queries are all-new: every copy misses them
        assert!((segment.expected_misses[0] - 3.0).abs() < 1e-9);
        assert!((segment.expected_misses[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn segment_parameter_errors() {
        let base = AdversarySegmentParams {
            cache_size: 10,
            offline_cache_size: 6,
            query_len: 2,
            new_pages: 1, // (10-6+1) not divisible by 2
            ensemble_size: 100,
            ensemble_kind: PolicyKind::Marking,
            seed: 0,
        };
        assert!(matches!(
            randomized_adversary_segment(&base),
            Err(Error::InvalidParameter(_))
        ));
        let small = AdversarySegmentParams { new_pages: 2, ensemble_size: 10, ..base };
        assert!(randomized_adversary_segment(&small).is_err());
        let offline = AdversarySegmentParams {
            new_pages: 2,
            ensemble_kind: PolicyKind::FarthestInFuture,
            ..base
        };
        assert!(randomized_adversary_segment(&offline).is_err());
    }
}
