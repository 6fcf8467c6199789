//! Phase partitioning of traces by the distinct-page counting rule, and
//! per-phase new-page statistics.
//!
//! A new phase begins at the first query that brings the count of distinct
//! pages requested since the current phase began to the threshold (`k+1`
//! for a single cache of size `k`). The boundary query belongs wholly to
//! the new phase, and counting restarts with its pages.

use std::collections::BTreeSet;

use crate::model::{PageId, Trace};
use crate::{Error, Result};

/// Boundary indices and per-phase new-page counts for one trace.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PhasePartition {
    threshold: usize,
    starts: Vec<usize>,
    new_pages: Vec<usize>,
}

impl PhasePartition {
    /// Distinct-page threshold that opens a new phase.
    pub fn threshold(&self) -> usize {
        self.threshold
    }

    /// 1-based indices of the first query of each phase; `starts[0] == 1`
    /// for a non-empty trace.
    pub fn starts(&self) -> &[usize] {
        &self.starts
    }

    /// `m_i` per phase: pages requested in phase `i` but not in phase `i-1`
    /// (all distinct pages for the first phase).
    pub fn new_pages(&self) -> &[usize] {
        &self.new_pages
    }

    pub fn num_phases(&self) -> usize {
        self.starts.len()
    }

    /// 1-based inclusive `(start, end)` ranges given the trace length.
    pub fn phase_ranges(&self, total_queries: usize) -> Vec<(usize, usize)> {
        let mut ranges = Vec::with_capacity(self.starts.len());
        for (i, &start) in self.starts.iter().enumerate() {
            let end = self.starts.get(i + 1).map(|s| s - 1).unwrap_or(total_queries);
            ranges.push((start, end));
        }
        ranges
    }

    /// 0-based phase index containing the 1-based query index.
    pub fn phase_of(&self, query_index: usize) -> usize {
        match self.starts.binary_search(&query_index) {
            Ok(i) => i,
            Err(i) => i - 1,
        }
    }
}

/// Splits a trace into phases. The start query itself counts toward the new
/// phase. Errors when the threshold does not exceed the query length (a
/// single query must never span two phases).
pub fn partition_phases(trace: &Trace, threshold: usize) -> Result<PhasePartition> {
    if threshold <= trace.query_len() {
        return Err(Error::InvalidThreshold { threshold, query_len: trace.query_len() });
    }
    let mut starts = Vec::new();
    let mut distinct: BTreeSet<PageId> = BTreeSet::new();
    for (idx, query) in trace.queries().iter().enumerate() {
        if idx == 0 {
            starts.push(1);
            distinct.extend(query.pages().iter().copied());
            continue;
        }
        let would_be = distinct.len()
            + query.pages().iter().filter(|p| !distinct.contains(p)).count();
        if would_be >= threshold {
            starts.push(idx + 1);
            distinct.clear();
        }
        distinct.extend(query.pages().iter().copied());
    }
    let mut partition = PhasePartition { threshold, starts, new_pages: Vec::new() };
    partition.new_pages = count_new_pages(trace, &partition);
    Ok(partition)
}

/// Recomputes the per-phase new-page counts for a partition of this trace.
/// Errors when the partition was not produced from the same trace.
pub fn new_pages_per_phase(trace: &Trace, partition: &PhasePartition) -> Result<Vec<usize>> {
    let recomputed = partition_phases(trace, partition.threshold())?;
    if recomputed.starts != partition.starts {
        return Err(Error::MismatchedPartition(format!(
            "expected phase starts {:?}, partition has {:?}",
            recomputed.starts, partition.starts
        )));
    }
    Ok(count_new_pages(trace, partition))
}

/// Distinct pages requested in each phase, in phase order.
pub fn pages_per_phase(trace: &Trace, partition: &PhasePartition) -> Vec<BTreeSet<PageId>> {
    partition
        .phase_ranges(trace.len())
        .iter()
        .map(|&(start, end)| {
            let mut pages = BTreeSet::new();
            for query in &trace.queries()[start - 1..end] {
                pages.extend(query.pages().iter().copied());
            }
            pages
        })
        .collect()
}

fn count_new_pages(trace: &Trace, partition: &PhasePartition) -> Vec<usize> {
    let phase_pages = pages_per_phase(trace, partition);
    phase_pages
        .iter()
        .enumerate()
        .map(|(i, pages)| {
            if i == 0 {
                pages.len()
            } else {
                pages.difference(&phase_pages[i - 1]).count()
            }
        })
        .collect()
}
