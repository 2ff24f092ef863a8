//! Counting engines: an exhaustive index sweep (orders 1..=3) and a
//! pruned backtracking search (orders 1..=4), with deterministic prefix
//! sharding and isomorphism-class aggregation.
//!
//! Counts are merged by summation and canonical-index sets by union, so
//! every result is independent of worker count and scheduling.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::eval::{eval_ground_partial, next_assignment, CompiledIdentity, OpCode, UNFILLED};
use crate::groupoid::Groupoid;
use crate::term::Identity;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Largest order the exhaustive engine accepts (3⁹ = 19683 tables).
pub const EXHAUSTIVE_MAX_ORDER: usize = 3;
/// Largest order the backtracking engine accepts (4¹⁶ ≈ 4.3·10⁹ tables).
pub const BACKTRACKING_MAX_ORDER: usize = 4;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Engine {
    Exhaustive,
    Backtracking,
}

/// Restricts a census to one residue class of table prefixes: a table
/// participates iff its first `prefix_cells` cells, read as a big-endian
/// base-n number, are congruent to `shard_index` mod `shard_count`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Partition {
    pub prefix_cells: usize,
    pub shard_index: u64,
    pub shard_count: u64,
}

#[derive(Clone, Debug)]
pub struct CensusQuery {
    pub order: usize,
    pub identities: Vec<Identity>,
    pub engine: Engine,
    pub want_iso_classes: bool,
    pub want_representatives: bool,
    pub partition: Option<Partition>,
}

impl CensusQuery {
    pub fn exhaustive(order: usize, identities: Vec<Identity>) -> Self {
        CensusQuery {
            order,
            identities,
            engine: Engine::Exhaustive,
            want_iso_classes: false,
            want_representatives: false,
            partition: None,
        }
    }

    pub fn backtracking(order: usize, identities: Vec<Identity>) -> Self {
        CensusQuery {
            engine: Engine::Backtracking,
            ..CensusQuery::exhaustive(order, identities)
        }
    }

    pub fn with_iso_classes(mut self) -> Self {
        self.want_iso_classes = true;
        self
    }

    pub fn with_representatives(mut self) -> Self {
        self.want_iso_classes = true;
        self.want_representatives = true;
        self
    }

    pub fn with_partition(mut self, partition: Partition) -> Self {
        self.partition = Some(partition);
        self
    }

    fn validate(&self) -> Result<(), CensusError> {
        if self.order == 0 {
            return Err(CensusError::ZeroOrder);
        }
        if self.identities.is_empty() {
            return Err(CensusError::EmptyQuery);
        }
        let max = match self.engine {
            Engine::Exhaustive => EXHAUSTIVE_MAX_ORDER,
            Engine::Backtracking => BACKTRACKING_MAX_ORDER,
        };
        if self.order > max {
            return Err(CensusError::OrderBudget {
                order: self.order,
                engine: self.engine,
                max,
            });
        }
        if let Some(p) = self.partition {
            if p.shard_count == 0 {
                return Err(CensusError::ZeroShards);
            }
            if p.shard_index >= p.shard_count {
                return Err(CensusError::ShardIndex {
                    index: p.shard_index,
                    count: p.shard_count,
                });
            }
            if p.prefix_cells > self.order * self.order {
                return Err(CensusError::PrefixCells {
                    cells: p.prefix_cells,
                    size: self.order * self.order,
                });
            }
        }
        Ok(())
    }
}

/// Counts for one identity of a query.
#[derive(Clone, Debug)]
pub struct IdentityCount {
    pub identity: Identity,
    pub total: u64,
    pub iso_classes: Option<u64>,
    pub representatives: Option<Vec<Groupoid>>,
}

#[derive(Clone, Debug)]
pub struct CensusResult {
    pub order: usize,
    pub engine: Engine,
    pub counts: Vec<IdentityCount>,
    /// Tables enumerated (exhaustive) or cell assignments tried
    /// (backtracking); independent of worker count.
    pub tables_scanned: u64,
    pub elapsed: Duration,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CensusError {
    #[error("query contains no identities")]
    EmptyQuery,
    #[error("order must be at least 1")]
    ZeroOrder,
    #[error("order {order} exceeds the {engine:?} engine budget (max {max})")]
    OrderBudget {
        order: usize,
        engine: Engine,
        max: usize,
    },
    #[error("shard count must be at least 1")]
    ZeroShards,
    #[error("shard index {index} must be below shard count {count}")]
    ShardIndex { index: u64, count: u64 },
    #[error("prefix cells {cells} exceed the table size {size}")]
    PrefixCells { cells: usize, size: usize },
}

/// Runs a census with the default worker count.
pub fn run(query: &CensusQuery) -> Result<CensusResult, CensusError> {
    run_with_jobs(query, 0)
}

/// Runs a census on `jobs` workers (0 = all available). Results are
/// identical for every worker count.
pub fn run_with_jobs(query: &CensusQuery, jobs: usize) -> Result<CensusResult, CensusError> {
    query.validate()?;
    let started = Instant::now();
    let jobs = effective_jobs(jobs);
    let want_canon = query.want_iso_classes || query.want_representatives;
    let (totals, canon, scanned) = match query.engine {
        Engine::Exhaustive => exhaustive(query, jobs, want_canon),
        Engine::Backtracking => backtracking(query, jobs, want_canon),
    };
    let counts = query
        .identities
        .iter()
        .zip(totals)
        .zip(canon)
        .map(|((identity, total), canon)| IdentityCount {
            identity: identity.clone(),
            total,
            iso_classes: if query.want_iso_classes {
                Some(canon.len() as u64)
            } else {
                None
            },
            representatives: if query.want_representatives {
                Some(
                    canon
                        .iter()
                        .map(|&k| {
                            Groupoid::from_index(query.order, k)
                                .expect("canonical index is in range")
                        })
                        .collect(),
                )
            } else {
                None
            },
        })
        .collect();
    Ok(CensusResult {
        order: query.order,
        engine: query.engine,
        counts,
        tables_scanned: scanned,
        elapsed: started.elapsed(),
    })
}

/// Exhaustive sweep over every order-n table, counting each identity
/// independently.
pub fn count_all(order: usize, identities: &[Identity]) -> Result<CensusResult, CensusError> {
    run(&CensusQuery::exhaustive(order, identities.to_vec()))
}

/// Exhaustive sweep that also reports isomorphism classes and their
/// canonical representatives.
pub fn count_iso_classes(order: usize, identity: &Identity) -> Result<CensusResult, CensusError> {
    run(&CensusQuery::exhaustive(order, vec![identity.clone()]).with_representatives())
}

/// Counts with the pruned depth-first engine; agrees with
/// [`count_all`] wherever both apply.
pub fn backtracking_count(order: usize, identity: &Identity) -> Result<CensusResult, CensusError> {
    run(&CensusQuery::backtracking(order, vec![identity.clone()]))
}

/// Runs a query that carries a [`Partition`]; shard totals over a full
/// set of shards sum to the unpartitioned totals.
pub fn partitioned_count(query: &CensusQuery) -> Result<CensusResult, CensusError> {
    assert!(query.partition.is_some(), "query carries no partition");
    run(query)
}

/// True iff `identity` and its mirror are satisfied by equally many
/// order-n tables.
pub fn duality_check(order: usize, identity: &Identity) -> Result<bool, CensusError> {
    let result = count_all(order, &[identity.clone(), identity.mirror()])?;
    Ok(result.counts[0].total == result.counts[1].total)
}

/// Number of order-n tables satisfying every identity in `identities`
/// simultaneously.
pub fn count_conjunction(
    order: usize,
    identities: &[Identity],
    engine: Engine,
) -> Result<u64, CensusError> {
    let query = CensusQuery {
        engine,
        ..CensusQuery::exhaustive(order, identities.to_vec())
    };
    query.validate()?;
    let jobs = effective_jobs(0);
    match engine {
        Engine::Exhaustive => {
            let compiled: Vec<CompiledIdentity> =
                identities.iter().map(CompiledIdentity::new).collect();
            let fold = |(start, end)| {
                let mut acc = 0u64;
                let mut table = table_digits(query.order, start);
                let mut scratch = [0u8; 32];
                for _ in start..end {
                    if compiled
                        .iter()
                        .all(|ci| ci.holds_on(&table, query.order, &mut scratch))
                    {
                        acc += 1;
                    }
                    next_table(&mut table, query.order);
                }
                acc
            };
            let chunks = chunk_ranges(shard_ranges(query.order, None), jobs);
            Ok(map_reduce(chunks, jobs, fold, 0u64, |a, b| a + b))
        }
        Engine::Backtracking => {
            let instances = ground_instances(query.order, identities);
            let (total, _, _) = backtrack_search(query.order, &instances, None, jobs, false);
            Ok(total)
        }
    }
}

fn effective_jobs(jobs: usize) -> usize {
    #[cfg(feature = "parallel")]
    {
        if jobs == 0 {
            rayon::current_num_threads()
        } else {
            jobs
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = jobs;
        1
    }
}

// ---------------------------------------------------------------------
// shared plumbing
// ---------------------------------------------------------------------

fn pow_u64(base: usize, exp: usize) -> u64 {
    (0..exp).fold(1u64, |acc, _| acc * base as u64)
}

fn table_digits(order: usize, index: u64) -> Vec<u8> {
    let cells = order * order;
    let mut digits = vec![0u8; cells];
    let mut k = index;
    for d in (0..cells).rev() {
        digits[d] = (k % order as u64) as u8;
        k /= order as u64;
    }
    digits
}

/// Increments a row-major table as a big-endian base-n counter.
fn next_table(table: &mut [u8], order: usize) -> bool {
    for digit in table.iter_mut().rev() {
        if (*digit as usize) + 1 < order {
            *digit += 1;
            return true;
        }
        *digit = 0;
    }
    false
}

/// Index ranges covered by the query's shard: contiguous blocks of
/// tables sharing a qualifying prefix.
fn shard_ranges(order: usize, partition: Option<Partition>) -> Vec<(u64, u64)> {
    let cells = order * order;
    let total = pow_u64(order, cells);
    match partition {
        None => vec![(0, total)],
        Some(p) => {
            let block = pow_u64(order, cells - p.prefix_cells);
            (0..pow_u64(order, p.prefix_cells))
                .filter(|prefix| prefix % p.shard_count == p.shard_index)
                .map(|prefix| (prefix * block, (prefix + 1) * block))
                .collect()
        }
    }
}

/// Splits ranges into roughly `jobs * 8` chunks for load balancing.
fn chunk_ranges(ranges: Vec<(u64, u64)>, jobs: usize) -> Vec<(u64, u64)> {
    if jobs <= 1 {
        return ranges;
    }
    let work: u64 = ranges.iter().map(|(s, e)| e - s).sum();
    let chunk = (work / (jobs as u64 * 8)).max(512);
    let mut out = Vec::new();
    for (start, end) in ranges {
        let mut lo = start;
        while lo < end {
            let hi = (lo + chunk).min(end);
            out.push((lo, hi));
            lo = hi;
        }
    }
    out
}

/// Maps items to partial results and merges them. The merge must be
/// commutative and associative; every caller merges sums and set unions,
/// which keeps results identical across worker counts.
fn map_reduce<T, I, F, M>(items: Vec<I>, jobs: usize, map: F, identity: T, merge: M) -> T
where
    T: Send,
    I: Send,
    F: Fn(I) -> T + Sync + Send,
    M: Fn(T, T) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if jobs > 1 {
        return pool_install(jobs, || {
            items
                .into_par_iter()
                .map(&map)
                .reduce_with(|a, b| merge(a, b))
                .unwrap_or(identity)
        });
    }
    let _ = jobs;
    let mut acc = identity;
    for item in items {
        acc = merge(acc, map(item));
    }
    acc
}

#[cfg(feature = "parallel")]
fn pool_install<R: Send>(jobs: usize, f: impl FnOnce() -> R + Send) -> R {
    if jobs == rayon::current_num_threads() {
        f()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .expect("failed to build worker pool")
            .install(f)
    }
}

// ---------------------------------------------------------------------
// exhaustive engine
// ---------------------------------------------------------------------

struct SweepAcc {
    totals: Vec<u64>,
    canon: Vec<BTreeSet<u64>>,
    scanned: u64,
}

impl SweepAcc {
    fn new(identities: usize, want_canon: bool) -> Self {
        SweepAcc {
            totals: vec![0; identities],
            canon: if want_canon {
                vec![BTreeSet::new(); identities]
            } else {
                Vec::new()
            },
            scanned: 0,
        }
    }

    fn merge(mut self, other: SweepAcc) -> SweepAcc {
        for (a, b) in self.totals.iter_mut().zip(other.totals) {
            *a += b;
        }
        for (a, b) in self.canon.iter_mut().zip(other.canon) {
            a.extend(b);
        }
        self.scanned += other.scanned;
        self
    }
}

fn exhaustive(
    query: &CensusQuery,
    jobs: usize,
    want_canon: bool,
) -> (Vec<u64>, Vec<BTreeSet<u64>>, u64) {
    let order = query.order;
    let compiled: Vec<CompiledIdentity> = query
        .identities
        .iter()
        .map(CompiledIdentity::new)
        .collect();
    let chunks = chunk_ranges(shard_ranges(order, query.partition), jobs);
    let sweep = |(start, end): (u64, u64)| {
        let mut acc = SweepAcc::new(compiled.len(), want_canon);
        let mut table = table_digits(order, start);
        let mut scratch = [0u8; 32];
        for _ in start..end {
            acc.scanned += 1;
            for (i, ci) in compiled.iter().enumerate() {
                if ci.holds_on(&table, order, &mut scratch) {
                    acc.totals[i] += 1;
                    if want_canon {
                        let g = Groupoid::new(order, table.clone())
                            .expect("sweep tables are valid");
                        acc.canon[i].insert(g.canonical_index());
                    }
                }
            }
            next_table(&mut table, order);
        }
        acc
    };
    let acc = map_reduce(
        chunks,
        jobs,
        sweep,
        SweepAcc::new(compiled.len(), want_canon),
        SweepAcc::merge,
    );
    let canon = if want_canon {
        acc.canon
    } else {
        vec![BTreeSet::new(); compiled.len()]
    };
    (acc.totals, canon, acc.scanned)
}

// ---------------------------------------------------------------------
// backtracking engine
// ---------------------------------------------------------------------

/// One ground instance of an identity: both sides compiled to postfix
/// code over concrete elements.
struct Instance {
    lhs: Vec<OpCode>,
    rhs: Vec<OpCode>,
}

/// Grounds every assignment instance of every identity.
fn ground_instances(order: usize, identities: &[Identity]) -> Vec<Instance> {
    let mut out = Vec::new();
    for identity in identities {
        let compiled = CompiledIdentity::new(identity);
        let mut assignment = vec![0u8; compiled.arity.max(1)];
        loop {
            out.push(Instance {
                lhs: compiled.lhs.ground(&assignment),
                rhs: compiled.rhs.ground(&assignment),
            });
            if !next_assignment(&mut assignment[..compiled.arity], order) {
                break;
            }
        }
    }
    out
}

struct Searcher<'a> {
    order: usize,
    cells_len: usize,
    partition: Option<Partition>,
    instances: &'a [Instance],
    want_canon: bool,
    cells: [u8; 16],
    resolved: Vec<bool>,
    trail: Vec<u32>,
    total: u64,
    scanned: u64,
    canon: BTreeSet<u64>,
}

impl<'a> Searcher<'a> {
    fn new(order: usize, instances: &'a [Instance], partition: Option<Partition>, want_canon: bool) -> Self {
        Searcher {
            order,
            cells_len: order * order,
            partition,
            instances,
            want_canon,
            cells: [UNFILLED; 16],
            resolved: vec![false; instances.len()],
            trail: Vec::with_capacity(instances.len()),
            total: 0,
            scanned: 0,
            canon: BTreeSet::new(),
        }
    }

    /// Checks every unresolved instance after a cell fill. Returns false
    /// when some instance is determined and violated; resolved instances
    /// are pushed on the trail for unwinding.
    #[inline]
    fn check_instances(&mut self, record_trail: bool) -> bool {
        let cells = &self.cells[..self.cells_len];
        for i in 0..self.instances.len() {
            if self.resolved[i] {
                continue;
            }
            let inst = &self.instances[i];
            let l = eval_ground_partial(&inst.lhs, cells, self.order);
            let r = eval_ground_partial(&inst.rhs, cells, self.order);
            if l != UNFILLED && r != UNFILLED {
                if l == r {
                    self.resolved[i] = true;
                    if record_trail {
                        self.trail.push(i as u32);
                    }
                } else {
                    return false;
                }
            }
        }
        true
    }

    fn leaf(&mut self) {
        self.total += 1;
        if self.want_canon {
            let g = Groupoid::new(self.order, self.cells[..self.cells_len].to_vec())
                .expect("completed tables are valid");
            self.canon.insert(g.canonical_index());
        }
    }

    /// True when the shard filter cuts this node off.
    #[inline]
    fn sharded_out(&self, depth: usize, prefix: u64) -> bool {
        match self.partition {
            Some(p) => depth == p.prefix_cells && prefix % p.shard_count != p.shard_index,
            None => false,
        }
    }

    #[inline]
    fn child_prefix(&self, depth: usize, prefix: u64, value: u8) -> u64 {
        match self.partition {
            Some(p) if depth < p.prefix_cells => prefix * self.order as u64 + value as u64,
            _ => prefix,
        }
    }

    fn dfs(&mut self, depth: usize, prefix: u64) {
        if self.sharded_out(depth, prefix) {
            return;
        }
        if depth == self.cells_len {
            self.leaf();
            return;
        }
        for value in 0..self.order as u8 {
            self.cells[depth] = value;
            self.scanned += 1;
            let mark = self.trail.len();
            if self.check_instances(true) {
                let prefix = self.child_prefix(depth, prefix, value);
                self.dfs(depth + 1, prefix);
            }
            while self.trail.len() > mark {
                let i = self.trail.pop().expect("trail mark is consistent");
                self.resolved[i as usize] = false;
            }
        }
        self.cells[depth] = UNFILLED;
    }

    /// Collects the viable partial fills of the first `split` cells.
    fn collect(&mut self, depth: usize, prefix: u64, split: usize, out: &mut Vec<(Vec<u8>, u64)>) {
        if self.sharded_out(depth, prefix) {
            return;
        }
        if depth == split {
            out.push((self.cells[..depth].to_vec(), prefix));
            return;
        }
        for value in 0..self.order as u8 {
            self.cells[depth] = value;
            self.scanned += 1;
            let mark = self.trail.len();
            if self.check_instances(true) {
                let prefix = self.child_prefix(depth, prefix, value);
                self.collect(depth + 1, prefix, split, out);
            }
            while self.trail.len() > mark {
                let i = self.trail.pop().expect("trail mark is consistent");
                self.resolved[i as usize] = false;
            }
        }
        self.cells[depth] = UNFILLED;
    }

    /// Re-applies a collected prefix; the checks are known to pass.
    fn replay(&mut self, values: &[u8]) {
        for (depth, &value) in values.iter().enumerate() {
            self.cells[depth] = value;
            let ok = self.check_instances(false);
            debug_assert!(ok, "collected prefix must replay cleanly");
        }
    }
}

fn split_depth(order: usize, cells: usize, jobs: usize) -> usize {
    if jobs <= 1 {
        return 0;
    }
    let target = jobs as u64 * 16;
    let mut depth = 0;
    let mut count = 1u64;
    while depth < cells && count < target {
        count *= order as u64;
        depth += 1;
    }
    depth
}

/// Runs one backtracking search over the full cell grid.
fn backtrack_search(
    order: usize,
    instances: &[Instance],
    partition: Option<Partition>,
    jobs: usize,
    want_canon: bool,
) -> (u64, u64, BTreeSet<u64>) {
    let cells = order * order;
    let split = split_depth(order, cells, jobs);
    if split == 0 {
        let mut searcher = Searcher::new(order, instances, partition, want_canon);
        searcher.dfs(0, 0);
        return (searcher.total, searcher.scanned, searcher.canon);
    }

    let mut collector = Searcher::new(order, instances, partition, want_canon);
    let mut prefixes = Vec::new();
    collector.collect(0, 0, split, &mut prefixes);
    let prefix_scanned = collector.scanned;

    let task = |(values, prefix): (Vec<u8>, u64)| {
        let mut searcher = Searcher::new(order, instances, partition, want_canon);
        searcher.replay(&values);
        searcher.dfs(split, prefix);
        (searcher.total, searcher.scanned, searcher.canon)
    };
    let merge = |mut a: (u64, u64, BTreeSet<u64>), b: (u64, u64, BTreeSet<u64>)| {
        a.0 += b.0;
        a.1 += b.1;
        a.2.extend(b.2);
        a
    };
    let (total, scanned, canon) = map_reduce(
        prefixes,
        jobs,
        task,
        (0, 0, BTreeSet::new()),
        merge,
    );
    (total, prefix_scanned + scanned, canon)
}

fn backtracking(
    query: &CensusQuery,
    jobs: usize,
    want_canon: bool,
) -> (Vec<u64>, Vec<BTreeSet<u64>>, u64) {
    let mut totals = Vec::with_capacity(query.identities.len());
    let mut canon = Vec::with_capacity(query.identities.len());
    let mut scanned = 0;
    for identity in &query.identities {
        let instances = ground_instances(query.order, std::slice::from_ref(identity));
        let (total, nodes, classes) =
            backtrack_search(query.order, &instances, query.partition, jobs, want_canon);
        totals.push(total);
        canon.push(classes);
        scanned += nodes;
    }
    (totals, canon, scanned)
}
