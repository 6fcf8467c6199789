//! Domain vocabulary shared by every module: pages, queries, traces, cache
//! states, and the single-cache / distributed cost functions.
//!
//! Caches start empty and fill until capacity is reached; inserting without
//! eviction is legal while there is room. The brute-force optimum uses the
//! same convention, so policy/optimum comparisons are paired.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use crate::{Error, Result};

/// Identifier of a single unit-size page (file), 1-based within the universe
/// `1..=N` declared by the enclosing trace.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct PageId(u32);

impl PageId {
    /// Panics on 0; page ids are 1-based by construction.
    pub fn new(id: u32) -> PageId {
        assert!(id >= 1, "page ids are 1-based");
        PageId(id)
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

impl fmt::Display for PageId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One file-bundle request: a deduplicated, sorted set of page ids.
///
/// A full query carries exactly `l` pages; traces may also carry shorter
/// queries (the dummy-page padding of variable-length workloads is a
/// modeling device, not required by the cost function).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Query {
    pages: Vec<PageId>,
}

impl Query {
    /// Builds a query, deduplicating pages. Errors on an empty page set.
    pub fn new(pages: impl IntoIterator<Item = PageId>) -> Result<Query> {
        let mut pages: Vec<PageId> = pages.into_iter().collect();
        pages.sort_unstable();
        pages.dedup();
        if pages.is_empty() {
            return Err(Error::EmptyQuery);
        }
        Ok(Query { pages })
    }

    /// Convenience constructor from raw ids; panics on 0 or empty input.
    pub fn from_ids(ids: &[u32]) -> Query {
        Query::new(ids.iter().copied().map(PageId::new)).expect("non-empty id list")
    }

    /// Pages in ascending id order.
    pub fn pages(&self) -> &[PageId] {
        &self.pages
    }

    pub fn len(&self) -> usize {
        self.pages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pages.is_empty()
    }

    pub fn contains(&self, page: PageId) -> bool {
        self.pages.binary_search(&page).is_ok()
    }
}

/// An ordered, finite sequence of queries over a declared universe.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Trace {
    universe_size: u32,
    query_len: usize,
    queries: Vec<Query>,
}

impl Trace {
    /// Validates that every page lies in `1..=universe_size` and that no
    /// query exceeds the declared length.
    pub fn new(universe_size: u32, query_len: usize, queries: Vec<Query>) -> Result<Trace> {
        if universe_size == 0 {
            return Err(Error::InvalidParameter("universe size must be >= 1".into()));
        }
        if query_len == 0 {
            return Err(Error::InvalidParameter("query length must be >= 1".into()));
        }
        for (i, q) in queries.iter().enumerate() {
            if q.len() > query_len {
                return Err(Error::InvalidParameter(format!(
                    "query {} has {} pages but declared length is {}",
                    i + 1,
                    q.len(),
                    query_len
                )));
            }
            if let Some(p) = q.pages().iter().find(|p| p.get() > universe_size) {
                return Err(Error::InvalidParameter(format!(
                    "query {} requests page {} outside universe 1..={}",
                    i + 1,
                    p,
                    universe_size
                )));
            }
        }
        Ok(Trace { universe_size, query_len, queries })
    }

    /// Universe size `N`.
    pub fn universe_size(&self) -> u32 {
        self.universe_size
    }

    /// Declared query length `l`.
    pub fn query_len(&self) -> usize {
        self.query_len
    }

    /// Number of queries `T`.
    pub fn len(&self) -> usize {
        self.queries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queries.is_empty()
    }

    pub fn queries(&self) -> &[Query] {
        &self.queries
    }

    /// Parses the line-oriented trace format: a header `N=<int> l=<int>
    /// T=<int>` followed by one query per line as space-separated page ids.
    /// Duplicate ids within a line are deduplicated.
    pub fn parse(text: &str) -> Result<Trace> {
        let mut lines = text.lines();
        let header = lines.next().ok_or(Error::TraceParse {
            line: 1,
            message: "missing header".into(),
        })?;
        let mut n = None;
        let mut l = None;
        let mut t = None;
        for field in header.split_whitespace() {
            let (key, value) = field.split_once('=').ok_or_else(|| Error::TraceParse {
                line: 1,
                message: format!("malformed header field `{field}`"),
            })?;
            let parsed: u64 = value.parse().map_err(|_| Error::TraceParse {
                line: 1,
                message: format!("non-numeric header value `{value}`"),
            })?;
            match key {
                "N" => n = Some(parsed),
                "l" => l = Some(parsed),
                "T" => t = Some(parsed),
                _ => {
                    return Err(Error::TraceParse {
                        line: 1,
                        message: format!("unknown header key `{key}`"),
                    })
                }
            }
        }
        let (n, l, t) = match (n, l, t) {
            (Some(n), Some(l), Some(t)) => (n, l, t),
            _ => {
                return Err(Error::TraceParse {
                    line: 1,
                    message: "header must declare N, l and T".into(),
                })
            }
        };
        if n == 0 || n > u32::MAX as u64 {
            return Err(Error::TraceParse { line: 1, message: format!("bad universe size {n}") });
        }

        let mut queries = Vec::with_capacity(t as usize);
        for (idx, line) in lines.enumerate() {
            let line_no = idx + 2;
            if line.trim().is_empty() {
                return Err(Error::TraceParse { line: line_no, message: "empty query line".into() });
            }
            let mut ids = Vec::new();
            for tok in line.split_whitespace() {
                let id: u32 = tok.parse().map_err(|_| Error::TraceParse {
                    line: line_no,
                    message: format!("bad page id `{tok}`"),
                })?;
                if id == 0 || id as u64 > n {
                    return Err(Error::TraceParse {
                        line: line_no,
                        message: format!("page id {id} outside universe 1..={n}"),
                    });
                }
                ids.push(PageId::new(id));
            }
            let query = Query::new(ids).map_err(|_| Error::TraceParse {
                line: line_no,
                message: "empty query".into(),
            })?;
            queries.push(query);
        }
        if queries.len() as u64 != t {
            return Err(Error::TraceParse {
                line: queries.len() + 2,
                message: format!("header declares T={} but found {} queries", t, queries.len()),
            });
        }
        Trace::new(n as u32, l as usize, queries)
    }

    /// Serializes to the canonical text form: pages ascending within each
    /// line, `\n` line endings throughout. `parse` followed by `to_text`
    /// is byte-identical for canonical files.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "N={} l={} T={}\n",
            self.universe_size,
            self.query_len,
            self.queries.len()
        ));
        for q in &self.queries {
            let mut first = true;
            for p in q.pages() {
                if !first {
                    out.push(' ');
                }
                out.push_str(&p.get().to_string());
                first = false;
            }
            out.push('\n');
        }
        out
    }

    pub fn read_from(path: impl AsRef<Path>) -> Result<Trace> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Trace::parse(&text)
    }

    pub fn write_to(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_text()).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })
    }
}

/// A fixed-capacity set of resident pages with optional per-page mark bits
/// and recency stamps. Policies maintain the metadata they need; marks and
/// recency are not part of the cache "content" for hit/miss purposes.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CacheState {
    capacity: usize,
    pages: BTreeSet<PageId>,
    marks: BTreeSet<PageId>,
    recency: BTreeMap<PageId, u64>,
}

impl CacheState {
    pub fn new(capacity: usize) -> CacheState {
        CacheState {
            capacity,
            pages: BTreeSet::new(),
            marks: BTreeSet::new(),
            recency: BTreeMap::new(),
        }
    }

    /// Builds a cache holding the given pages (no marks, no stamps).
    /// Panics if the pages exceed the capacity.
    pub fn with_pages(capacity: usize, pages: impl IntoIterator<Item = PageId>) -> CacheState {
        let pages: BTreeSet<PageId> = pages.into_iter().collect();
        assert!(pages.len() <= capacity, "initial pages exceed capacity");
        CacheState { capacity, pages, marks: BTreeSet::new(), recency: BTreeMap::new() }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.pages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pages.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.pages.len() >= self.capacity
    }

    pub fn contains(&self, page: PageId) -> bool {
        self.pages.contains(&page)
    }

    pub fn pages(&self) -> &BTreeSet<PageId> {
        &self.pages
    }

    /// Inserts a resident page; errors when the cache is already full.
    pub fn insert(&mut self, page: PageId) -> Result<()> {
        if !self.pages.contains(&page) && self.pages.len() >= self.capacity {
            return Err(Error::CapacityExceeded {
                required: self.pages.len() + 1,
                capacity: self.capacity,
            });
        }
        self.pages.insert(page);
        Ok(())
    }

    /// Removes a page together with its mark and stamp. Returns whether the
    /// page was resident.
    pub fn remove(&mut self, page: PageId) -> bool {
        self.marks.remove(&page);
        self.recency.remove(&page);
        self.pages.remove(&page)
    }

    pub fn is_marked(&self, page: PageId) -> bool {
        self.marks.contains(&page)
    }

    /// Marks a resident page.
    pub fn mark(&mut self, page: PageId) {
        debug_assert!(self.pages.contains(&page), "marking a non-resident page");
        self.marks.insert(page);
    }

    pub fn unmark_all(&mut self) {
        self.marks.clear();
    }

    pub fn marked_count(&self) -> usize {
        self.marks.len()
    }

    /// Updates the recency stamp of a resident page.
    pub fn touch(&mut self, page: PageId, now: u64) {
        debug_assert!(self.pages.contains(&page), "stamping a non-resident page");
        self.recency.insert(page, now);
    }

    /// Last-use stamp, if the page has ever been stamped.
    pub fn recency(&self, page: PageId) -> Option<u64> {
        self.recency.get(&page).copied()
    }
}

/// True iff at least one page of the query is absent from the cache.
pub fn is_miss(cache: &CacheState, query: &Query) -> bool {
    query.pages().iter().any(|p| !cache.contains(*p))
}

/// Distributed cost indicator: a miss iff no single cache contains the
/// entire query. Errors on an empty cache list.
pub fn is_miss_distributed(caches: &[CacheState], query: &Query) -> Result<bool> {
    if caches.is_empty() {
        return Err(Error::EmptyCacheSet);
    }
    Ok(caches.iter().all(|c| is_miss(c, query)))
}

/// Applies a miss update: the new cache is `(old \ evictions) ∪ query`.
///
/// Errors when an eviction targets a non-resident or just-requested page,
/// or when the surviving pages would exceed capacity.
pub fn apply_update(
    cache: &CacheState,
    query: &Query,
    evictions: &BTreeSet<PageId>,
) -> Result<CacheState> {
    for page in evictions {
        if query.contains(*page) {
            return Err(Error::IllegalEviction {
                page: page.get(),
                reason: "page is part of the current query",
            });
        }
        if !cache.contains(*page) {
            return Err(Error::IllegalEviction { page: page.get(), reason: "page not resident" });
        }
    }
    let mut next = cache.clone();
    for page in evictions {
        next.remove(*page);
    }
    let needed = next.len() + query.pages().iter().filter(|p| !next.contains(**p)).count();
    if needed > next.capacity() {
        return Err(Error::CapacityExceeded { required: needed, capacity: next.capacity() });
    }
    for page in query.pages() {
        next.insert(*page)?;
    }
    Ok(next)
}

/// Per-query outcome of a policy run.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QueryRecord {
    /// 1-based index of the query within the trace.
    pub query_index: usize,
    pub miss: bool,
    /// Pages evicted while serving this query, ascending.
    pub evicted: Vec<PageId>,
}

/// Complete hit/miss record of a single policy run.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct MissLog {
    per_query: Vec<QueryRecord>,
    total_misses: usize,
}

impl MissLog {
    pub fn new() -> MissLog {
        MissLog::default()
    }

    /// Appends the outcome of the next query.
    pub fn record(&mut self, miss: bool, mut evicted: Vec<PageId>) {
        evicted.sort_unstable();
        if miss {
            self.total_misses += 1;
        }
        self.per_query.push(QueryRecord { query_index: self.per_query.len() + 1, miss, evicted });
    }

    pub fn records(&self) -> &[QueryRecord] {
        &self.per_query
    }

    pub fn total_misses(&self) -> usize {
        self.total_misses
    }

    pub fn total_queries(&self) -> usize {
        self.per_query.len()
    }

    /// `total_misses / total_queries`; 0 for an empty log.
    pub fn miss_ratio(&self) -> f64 {
        if self.per_query.is_empty() {
            0.0
        } else {
            self.total_misses as f64 / self.per_query.len() as f64
        }
    }

    /// CSV serialization: `query_index,miss,evicted_pages` rows with misses
    /// as 0/1 and evicted pages semicolon-separated, then a trailer comment
    /// `# total_misses=<n>`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("query_index,miss,evicted_pages\n");
        for rec in &self.per_query {
            let evicted: Vec<String> = rec.evicted.iter().map(|p| p.get().to_string()).collect();
            out.push_str(&format!(
                "{},{},{}\n",
                rec.query_index,
                if rec.miss { 1 } else { 0 },
                evicted.join(";")
            ));
        }
        out.push_str(&format!("# total_misses={}\n", self.total_misses));
        out
    }
}
