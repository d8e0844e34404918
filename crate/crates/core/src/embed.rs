//! Order-preserving containment and the perfect-tiling oracle.
//!
//! An embedding of a pattern `H` on `[h]` into a host `G` on `[n]` is a
//! strictly increasing image `phi(1) < ... < phi(h)` such that every edge of
//! `H` lands on an edge of `G`. Candidates for `phi(i)` are produced by
//! intersecting the neighbourhoods of the already placed back-neighbours of
//! `i` with the vertices above `phi(i - 1)`.
//!
//! The tiling oracle is a complete backtracking search: the smallest uncovered
//! vertex must be the first vertex of the block that covers it, so each level
//! only enumerates embeddings rooted there. `NoTiling` is therefore a proof;
//! running out of node budget is reported as `Timeout`.
//!
//! Between blocks the rest of the search depends only on the set of uncovered
//! vertices, so sets already shown to have no tiling are remembered and
//! skipped.

use std::collections::HashSet;
use std::ops::ControlFlow;
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::graph::OrderedGraph;

pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// Strictly increasing host labels; `image[i - 1]` is the image of pattern vertex `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Embedding {
    pub image: Vec<usize>,
}

impl Embedding {
    pub fn new(image: Vec<usize>) -> Self {
        Self { image }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Tiling {
    pub blocks: Vec<Embedding>,
}

impl Tiling {
    pub fn covered(&self) -> usize {
        self.blocks.iter().map(|b| b.image.len()).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TilingOutcome {
    Tiling(Tiling),
    /// Exhaustive search found no perfect tiling.
    NoTiling,
    /// `h` does not divide `n`.
    NotDivisible,
    /// The node budget ran out before the search finished.
    Timeout,
}

impl TilingOutcome {
    pub fn label(&self) -> &'static str {
        match self {
            TilingOutcome::Tiling(_) => "tiling",
            TilingOutcome::NoTiling => "no-tiling",
            TilingOutcome::NotDivisible => "not-divisible",
            TilingOutcome::Timeout => "timeout",
        }
    }

    /// Process exit code used by the `tile` command.
    pub fn exit_code(&self) -> i32 {
        match self {
            TilingOutcome::Tiling(_) => 0,
            TilingOutcome::NoTiling => 1,
            TilingOutcome::NotDivisible => 2,
            TilingOutcome::Timeout => 3,
        }
    }

    pub fn tiling(&self) -> Option<&Tiling> {
        match self {
            TilingOutcome::Tiling(t) => Some(t),
            _ => None,
        }
    }

    pub fn is_tiling(&self) -> bool {
        matches!(self, TilingOutcome::Tiling(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TilingOptions {
    /// Maximum number of search nodes (vertex placements) before `Timeout`.
    pub budget: u64,
    /// Worker threads; `1` runs the plain sequential search.
    pub jobs: usize,
}

impl Default for TilingOptions {
    fn default() -> Self {
        Self {
            budget: DEFAULT_BUDGET,
            jobs: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TilingReport {
    pub outcome: TilingOutcome,
    pub nodes: u64,
}

/// Per-pattern data the searches need: for each position, the earlier
/// positions it is adjacent to (0-based).
struct Plan {
    h: usize,
    back: Vec<Vec<usize>>,
}

impl Plan {
    fn new(pattern: &OrderedGraph) -> Self {
        let h = pattern.n();
        let back = (1..=h)
            .map(|i| pattern.neighbors(i).ones().filter(|&j| j < i).map(|j| j - 1).collect())
            .collect();
        Self { h, back }
    }
}

/// `above[v]` holds `{v + 1, ..., n}`.
fn above_masks(n: usize) -> Vec<FixedBitSet> {
    (0..=n)
        .map(|v| {
            let mut m = FixedBitSet::with_capacity(n + 1);
            m.insert_range(v + 1..n + 1);
            m
        })
        .collect()
}

/// Fills `out` with the admissible images of position `i`, given the images of
/// positions `0..i`, restricted to `pool`. Candidates that leave fewer than
/// `h - 1 - i` pool vertices above them are dropped.
#[allow(clippy::too_many_arguments)]
fn candidates(
    host: &OrderedGraph,
    plan: &Plan,
    above: &[FixedBitSet],
    pool: &FixedBitSet,
    image: &[usize],
    i: usize,
    scratch: &mut FixedBitSet,
    out: &mut Vec<usize>,
) {
    out.clear();
    scratch.clone_from(pool);
    if i > 0 {
        scratch.intersect_with(&above[image[i - 1]]);
    }
    for &j in &plan.back[i] {
        scratch.intersect_with(host.neighbors(image[j]));
    }
    let need = plan.h - 1 - i;
    for c in scratch.ones() {
        if need > 0 && pool.count_ones(c + 1..) < need {
            break;
        }
        out.push(c);
    }
}

struct Enumerator<'a> {
    host: &'a OrderedGraph,
    plan: Plan,
    above: Vec<FixedBitSet>,
    pool: FixedBitSet,
    scratch: FixedBitSet,
    cands: Vec<Vec<usize>>,
    image: Vec<usize>,
}

impl<'a> Enumerator<'a> {
    fn new(host: &'a OrderedGraph, pattern: &OrderedGraph) -> Self {
        let n = host.n();
        let plan = Plan::new(pattern);
        let h = plan.h;
        let mut pool = FixedBitSet::with_capacity(n + 1);
        pool.insert_range(1..n + 1);
        Self {
            host,
            above: above_masks(n),
            pool,
            scratch: FixedBitSet::with_capacity(n + 1),
            cands: vec![Vec::new(); h],
            image: vec![0; h],
            plan,
        }
    }

    fn run<F>(&mut self, visit: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&[usize]) -> ControlFlow<()>,
    {
        if self.plan.h > self.host.n() {
            return ControlFlow::Continue(());
        }
        self.rec(0, visit)
    }

    fn rec<F>(&mut self, i: usize, visit: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&[usize]) -> ControlFlow<()>,
    {
        if i == self.plan.h {
            return visit(&self.image);
        }
        let mut cands = std::mem::take(&mut self.cands[i]);
        candidates(
            self.host,
            &self.plan,
            &self.above,
            &self.pool,
            &self.image,
            i,
            &mut self.scratch,
            &mut cands,
        );
        let mut flow = ControlFlow::Continue(());
        for &c in &cands {
            self.image[i] = c;
            flow = self.rec(i + 1, visit);
            if flow.is_break() {
                break;
            }
        }
        self.cands[i] = cands;
        flow
    }
}

/// Calls `visit` on every embedding image in lexicographic order until it
/// returns `Break`.
pub fn for_each_embedding<F>(host: &OrderedGraph, pattern: &OrderedGraph, mut visit: F)
where
    F: FnMut(&[usize]) -> ControlFlow<()>,
{
    let _ = Enumerator::new(host, pattern).run(&mut visit);
}

/// The lexicographically smallest embedding image, if any.
pub fn find_embedding(host: &OrderedGraph, pattern: &OrderedGraph) -> Option<Embedding> {
    let mut found = None;
    for_each_embedding(host, pattern, |img| {
        found = Some(Embedding::new(img.to_vec()));
        ControlFlow::Break(())
    });
    found
}

/// Number of embeddings, truncated at `cap`.
pub fn count_embeddings(host: &OrderedGraph, pattern: &OrderedGraph, cap: usize) -> usize {
    let mut count = 0;
    if cap == 0 {
        return 0;
    }
    for_each_embedding(host, pattern, |_| {
        count += 1;
        if count >= cap {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    count
}

/// Whether `image` is an order-preserving copy of `pattern` in `host`.
pub fn is_embedding(host: &OrderedGraph, pattern: &OrderedGraph, image: &[usize]) -> bool {
    image.len() == pattern.n()
        && image.iter().all(|&v| v >= 1 && v <= host.n())
        && image.windows(2).all(|w| w[0] < w[1])
        && pattern.edges().all(|(i, j)| host.has_edge(image[i - 1], image[j - 1]))
}

/// Certificate check: blocks are valid embeddings, pairwise disjoint, and
/// together cover `[n]`.
pub fn verify_tiling(host: &OrderedGraph, pattern: &OrderedGraph, tiling: &Tiling) -> bool {
    let n = host.n();
    let mut seen = vec![false; n + 1];
    let mut covered = 0;
    for block in &tiling.blocks {
        if !is_embedding(host, pattern, &block.image) {
            return false;
        }
        for &v in &block.image {
            if seen[v] {
                return false;
            }
            seen[v] = true;
            covered += 1;
        }
    }
    covered == n
}

enum Flow {
    Found,
    Exhausted,
    Timeout,
    Cancelled,
}

/// Cross-thread state for the parallel search.
struct Shared {
    nodes: AtomicU64,
    /// Lowest branch index that has produced a tiling so far.
    best: AtomicUsize,
}

const FLUSH_EVERY: u64 = 1024;
/// Upper bound on remembered dead uncovered sets per search.
const DEAD_SET_CAP: usize = 1 << 20;

struct TilingSearch<'a> {
    host: &'a OrderedGraph,
    plan: &'a Plan,
    above: &'a [FixedBitSet],
    avail: FixedBitSet,
    scratch: FixedBitSet,
    cands: Vec<Vec<usize>>,
    image: Vec<usize>,
    blocks: Vec<Vec<usize>>,
    dead: HashSet<FixedBitSet>,
    nodes: u64,
    unflushed: u64,
    budget: u64,
    shared: Option<(&'a Shared, usize)>,
}

impl<'a> TilingSearch<'a> {
    fn new(host: &'a OrderedGraph, plan: &'a Plan, above: &'a [FixedBitSet], budget: u64) -> Self {
        let n = host.n();
        let mut avail = FixedBitSet::with_capacity(n + 1);
        avail.insert_range(1..n + 1);
        Self {
            host,
            plan,
            above,
            avail,
            scratch: FixedBitSet::with_capacity(n + 1),
            cands: vec![Vec::new(); plan.h],
            image: vec![0; plan.h],
            blocks: Vec::new(),
            dead: HashSet::new(),
            nodes: 0,
            unflushed: 0,
            budget,
            shared: None,
        }
    }

    fn tick(&mut self) -> Option<Flow> {
        self.nodes += 1;
        match self.shared {
            None => (self.nodes > self.budget).then_some(Flow::Timeout),
            Some((shared, branch)) => {
                self.unflushed += 1;
                if self.unflushed < FLUSH_EVERY {
                    return None;
                }
                let total = shared.nodes.fetch_add(self.unflushed, Ordering::Relaxed) + self.unflushed;
                self.unflushed = 0;
                if shared.best.load(Ordering::Relaxed) < branch {
                    Some(Flow::Cancelled)
                } else if total > self.budget {
                    Some(Flow::Timeout)
                } else {
                    None
                }
            }
        }
    }

    fn flush(&mut self) {
        if let Some((shared, _)) = self.shared {
            shared.nodes.fetch_add(self.unflushed, Ordering::Relaxed);
            self.unflushed = 0;
        }
    }

    /// Places pattern position `i` of the current block.
    fn place(&mut self, i: usize) -> Flow {
        if let Some(stop) = self.tick() {
            return stop;
        }
        if i == self.plan.h {
            return self.close_block();
        }
        let mut cands = std::mem::take(&mut self.cands[i]);
        candidates(
            self.host,
            self.plan,
            self.above,
            &self.avail,
            &self.image,
            i,
            &mut self.scratch,
            &mut cands,
        );
        let mut flow = Flow::Exhausted;
        for &c in &cands {
            self.image[i] = c;
            flow = self.place(i + 1);
            if !matches!(flow, Flow::Exhausted) {
                break;
            }
        }
        self.cands[i] = cands;
        flow
    }

    fn close_block(&mut self) -> Flow {
        let block = self.image.clone();
        for &v in &block {
            self.avail.set(v, false);
        }
        self.blocks.push(block);
        let flow = match self.avail.ones().next() {
            None => return Flow::Found,
            Some(_) if self.dead.contains(&self.avail) => Flow::Exhausted,
            Some(v) => {
                self.image[0] = v;
                let flow = self.place(1);
                if matches!(flow, Flow::Exhausted) && self.dead.len() < DEAD_SET_CAP {
                    self.dead.insert(self.avail.clone());
                }
                flow
            }
        };
        if matches!(flow, Flow::Found) {
            return flow;
        }
        let block = self.blocks.pop().expect("block pushed above");
        for &v in &block {
            self.avail.insert(v);
        }
        self.image.copy_from_slice(&block);
        flow
    }

    fn tiling(&self) -> Tiling {
        Tiling {
            blocks: self.blocks.iter().cloned().map(Embedding::new).collect(),
        }
    }
}

/// Decides whether `host` has a perfect `pattern`-tiling with the default
/// budget, sequentially.
pub fn perfect_tiling(host: &OrderedGraph, pattern: &OrderedGraph) -> TilingOutcome {
    perfect_tiling_with(host, pattern, &TilingOptions::default()).outcome
}

/// Full oracle entry point. With `jobs > 1` the branches for the second vertex
/// of the first block are searched in parallel; the reported certificate is
/// the one the sequential search would return.
pub fn perfect_tiling_with(host: &OrderedGraph, pattern: &OrderedGraph, opts: &TilingOptions) -> TilingReport {
    let (n, h) = (host.n(), pattern.n());
    if n % h != 0 {
        return TilingReport {
            outcome: TilingOutcome::NotDivisible,
            nodes: 0,
        };
    }
    let plan = Plan::new(pattern);
    let above = above_masks(n);
    if opts.jobs > 1 && h >= 2 {
        return parallel_search(host, &plan, &above, opts);
    }
    let mut search = TilingSearch::new(host, &plan, &above, opts.budget);
    search.image[0] = 1;
    let outcome = match search.place(1) {
        Flow::Found => TilingOutcome::Tiling(search.tiling()),
        Flow::Exhausted => TilingOutcome::NoTiling,
        Flow::Timeout | Flow::Cancelled => TilingOutcome::Timeout,
    };
    TilingReport {
        outcome,
        nodes: search.nodes,
    }
}

fn parallel_search(host: &OrderedGraph, plan: &Plan, above: &[FixedBitSet], opts: &TilingOptions) -> TilingReport {
    let n = host.n();
    let mut pool = FixedBitSet::with_capacity(n + 1);
    pool.insert_range(1..n + 1);
    let mut image = vec![0; plan.h];
    image[0] = 1;
    let mut branches = Vec::new();
    candidates(
        host,
        plan,
        above,
        &pool,
        &image,
        1,
        &mut FixedBitSet::with_capacity(n + 1),
        &mut branches,
    );

    let shared = Shared {
        nodes: AtomicU64::new(1),
        best: AtomicUsize::new(usize::MAX),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .build()
        .expect("thread pool");
    let results: Vec<(Flow, Option<Tiling>)> = pool.install(|| {
        branches
            .par_iter()
            .enumerate()
            .map(|(idx, &second)| {
                let mut search = TilingSearch::new(host, plan, above, opts.budget);
                search.shared = Some((&shared, idx));
                search.image[0] = 1;
                search.image[1] = second;
                let flow = search.place(2);
                search.flush();
                match flow {
                    Flow::Found => {
                        shared.best.fetch_min(idx, Ordering::Relaxed);
                        (Flow::Found, Some(search.tiling()))
                    }
                    other => (other, None),
                }
            })
            .collect()
    });

    let nodes = shared.nodes.load(Ordering::Relaxed);
    for (flow, tiling) in results {
        let outcome = match flow {
            Flow::Found => TilingOutcome::Tiling(tiling.expect("found branches carry a tiling")),
            Flow::Exhausted => continue,
            Flow::Timeout => TilingOutcome::Timeout,
            // Only branches after a successful one are cancelled.
            Flow::Cancelled => unreachable!("cancelled branch precedes every success"),
        };
        return TilingReport { outcome, nodes };
    }
    TilingReport {
        outcome: TilingOutcome::NoTiling,
        nodes,
    }
}

/// Brute-force reference oracle, independent of the search above: enumerates
/// every partition of `[n]` into `h`-sets and checks each block directly
/// (a block of exactly `h` vertices can only host the identity order).
pub mod reference {
    use itertools::Itertools;

    use crate::graph::OrderedGraph;

    pub fn block_spans_pattern(host: &OrderedGraph, pattern: &OrderedGraph, block: &[usize]) -> bool {
        pattern.edges().all(|(i, j)| host.has_edge(block[i - 1], block[j - 1]))
    }

    /// Some perfect tiling as sorted blocks, or `None`. Panics if `h` does not divide `n`.
    pub fn naive_perfect_tiling(host: &OrderedGraph, pattern: &OrderedGraph) -> Option<Vec<Vec<usize>>> {
        let (n, h) = (host.n(), pattern.n());
        assert_eq!(n % h, 0, "h must divide n");
        let remaining: Vec<usize> = (1..=n).collect();
        let mut blocks = Vec::new();
        rec(host, pattern, &remaining, &mut blocks).then_some(blocks)
    }

    fn rec(host: &OrderedGraph, pattern: &OrderedGraph, remaining: &[usize], blocks: &mut Vec<Vec<usize>>) -> bool {
        let Some((&first, rest)) = remaining.split_first() else {
            return true;
        };
        let h = pattern.n();
        for others in rest.iter().copied().combinations(h - 1) {
            let mut block = Vec::with_capacity(h);
            block.push(first);
            block.extend(&others);
            if !block_spans_pattern(host, pattern, &block) {
                continue;
            }
            let left: Vec<usize> = rest.iter().copied().filter(|v| !others.contains(v)).collect();
            blocks.push(block);
            if rec(host, pattern, &left, blocks) {
                return true;
            }
            blocks.pop();
        }
        false
    }
}
