//! Decides whether a complete multipartite graph has an orientation of
//! diameter at most 2.
//!
//! The search assigns one edge at a time and keeps, for every ordered pair
//! `(u, v)`, the set of ways it can still be joined: the direct arc `u -> v`
//! or a 2-path `u -> w -> v`. A pair with no remaining way is a conflict; a
//! pair with exactly one remaining way forces it.
//!
//! Symmetry breaking uses a fixed variable order (edges `(lo, hi)` in
//! lexicographic order, value `true` meaning `lo -> hi`). The
//! lexicographically least member of each orbit under part-internal
//! relabelings and global reversal satisfies:
//!
//! * `row(a) <= row(a + 1)` for consecutive vertices of one part, where
//!   `row(v)[w]` is the value of edge `{v, w}`, `w` ascending over the
//!   vertices outside the part;
//! * the first edge `(0, p1)` is oriented `p1 -> 0`.
//!
//! With the case split on, the space is additionally partitioned by the
//! canonical out-degree signature of part 0 into part 1, and each class is
//! searched as a separate top-level task.

mod cnf;
mod oracle;

pub use cnf::{decode_model, encode_cnf, export_cnf, Cnf, CnfStats};
pub use oracle::{brute_force_min_diameter, enumerate_diameter2, for_each_orientation};

use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::analysis::{canonical_classes, raw_members};
use crate::graph::{bits, GraphError, GraphTopology, Orientation, VertexSet};
use crate::par;

/// Largest edge count `decide_diameter2` accepts.
pub const MAX_SEARCH_EDGES: usize = 256;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("{edges} edges exceed the search cap of {cap}")]
    TooLarge { edges: usize, cap: usize },
    #[error("{edges} edges exceed the enumeration cap of {cap}")]
    TooManyEdges { edges: usize, cap: usize },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = SearchError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Serialize)]
pub struct SearchConfig {
    pub node_budget: u64,
    #[serde(serialize_with = "ser_secs")]
    pub time_budget: Duration,
    pub symmetry_breaking: bool,
    pub use_case_split: bool,
    pub thread_count: usize,
}

fn ser_secs<S: serde::Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            node_budget: 1_000_000_000,
            time_budget: Duration::from_secs(600),
            symmetry_breaking: true,
            use_case_split: true,
            thread_count: par::default_threads(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Exists,
    None,
    Unknown,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub max_depth: usize,
    pub wall_time_secs: f64,
    /// Canonical classes whose subtree was searched to completion.
    pub cases_enumerated: Vec<[usize; 3]>,
    pub cases_total: usize,
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub verdict: Verdict,
    pub witness: Option<Orientation>,
    pub stats: SearchStats,
}

/// Read-only facts about the topology shared by every worker.
struct Context {
    n: usize,
    adj: Vec<VertexSet>,
    /// `mids[u * n + v]`: vertices adjacent to both `u` and `v`.
    mids: Vec<VertexSet>,
    branch_order: Vec<(usize, usize)>,
    lex_rows: Vec<(usize, usize, Vec<usize>)>,
    first_edge: Option<(usize, usize)>,
    /// Part-1 mask, used by the case filter.
    second_part: VertexSet,
}

impl Context {
    fn new(t: &GraphTopology, symmetry_breaking: bool) -> Self {
        let n = t.n_vertices();
        let adj: Vec<VertexSet> = (0..n).map(|v| t.neighbors(v)).collect();
        let mut mids = vec![0; n * n];
        for u in 0..n {
            for v in 0..n {
                if u != v {
                    mids[u * n + v] = adj[u] & adj[v];
                }
            }
        }
        // part-pair groups (0,1), (0,2), (1,2), ... then index order
        let mut branch_order = t.edges();
        branch_order.sort_by_key(|&(u, v)| (t.part_of(u), t.part_of(v), u, v));
        let mut lex_rows = Vec::new();
        let mut first_edge = None;
        if symmetry_breaking {
            for (a, &row) in adj.iter().enumerate().take(n.saturating_sub(1)) {
                if t.part_of(a) == t.part_of(a + 1) {
                    lex_rows.push((a, a + 1, bits(row).collect()));
                }
            }
            if t.n_parts() >= 2 {
                first_edge = Some((0, t.parts()[0]));
            }
        }
        let second_part = if t.n_parts() >= 2 { t.part_mask(1) } else { 0 };
        Self {
            n,
            adj,
            mids,
            branch_order,
            lex_rows,
            first_edge,
            second_part,
        }
    }
}

/// State shared across workers of one `decide_diameter2` call.
struct Shared {
    start: Instant,
    cfg: SearchConfig,
    nodes: AtomicU64,
    out_of_budget: AtomicBool,
    /// Lowest task index that has found a witness.
    best_task: AtomicUsize,
}

#[derive(Debug)]
enum TaskResult {
    Found(Vec<VertexSet>),
    Exhausted,
    Aborted,
}

struct Abort;

struct Solver<'a> {
    ctx: &'a Context,
    shared: &'a Shared,
    task: usize,
    out: Vec<VertexSet>,
    inn: Vec<VertexSet>,
    trail: Vec<(usize, usize)>,
    queue: Vec<(usize, usize)>,
    case_filter: Option<Vec<[usize; 3]>>,
    nodes: u64,
    unflushed: u64,
    max_depth: usize,
}

impl<'a> Solver<'a> {
    fn new(ctx: &'a Context, shared: &'a Shared, task: usize) -> Self {
        Self {
            ctx,
            shared,
            task,
            out: vec![0; ctx.n],
            inn: vec![0; ctx.n],
            trail: Vec::new(),
            queue: Vec::new(),
            case_filter: None,
            nodes: 0,
            unflushed: 0,
            max_depth: 0,
        }
    }

    fn decided(&self, u: usize, v: usize) -> bool {
        (self.out[u] | self.inn[u]) >> v & 1 == 1
    }

    /// Records `u -> v`; false if `v -> u` is already there.
    fn set_arc(&mut self, u: usize, v: usize) -> bool {
        if self.out[u] >> v & 1 == 1 {
            return true;
        }
        if self.inn[u] >> v & 1 == 1 {
            return false;
        }
        self.out[u] |= 1 << v;
        self.inn[v] |= 1 << u;
        self.trail.push((u, v));
        self.queue.push((u, v));
        true
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (u, v) = self.trail.pop().unwrap();
            self.out[u] &= !(1 << v);
            self.inn[v] &= !(1 << u);
        }
        self.queue.clear();
    }

    fn check_pair(&mut self, u: usize, v: usize) -> bool {
        if u == v {
            return true;
        }
        let out_u = self.out[u];
        if out_u >> v & 1 == 1 || out_u & self.inn[v] != 0 {
            return true;
        }
        let n = self.ctx.n;
        let direct = self.ctx.adj[u] >> v & 1 == 1 && self.inn[u] >> v & 1 == 0;
        let via = self.ctx.mids[u * n + v] & !self.inn[u] & !self.out[v];
        match direct as u32 + via.count_ones() {
            0 => false,
            1 if direct => self.set_arc(u, v),
            1 => {
                let w = via.trailing_zeros() as usize;
                self.set_arc(u, w) && self.set_arc(w, v)
            }
            _ => true,
        }
    }

    fn check_all_pairs(&mut self) -> bool {
        let n = self.ctx.n;
        (0..n).all(|u| (0..n).all(|v| self.check_pair(u, v)))
    }

    /// Drains the queue of newly set arcs. Setting `a -> b` removes the
    /// option `b -> a`, which only pairs `(b, *)` and `(*, a)` can use.
    fn drain(&mut self) -> bool {
        while let Some((a, b)) = self.queue.pop() {
            for x in 0..self.ctx.n {
                if !self.check_pair(b, x) || !self.check_pair(x, a) {
                    return false;
                }
            }
        }
        true
    }

    /// Value of edge `{v, w}` read as `lo -> hi`.
    fn edge_value(&self, v: usize, w: usize) -> Option<bool> {
        let (lo, hi) = (v.min(w), v.max(w));
        if self.out[lo] >> hi & 1 == 1 {
            Some(true)
        } else if self.inn[lo] >> hi & 1 == 1 {
            Some(false)
        } else {
            None
        }
    }

    fn set_edge_value(&mut self, v: usize, w: usize, value: bool) -> bool {
        let (lo, hi) = (v.min(w), v.max(w));
        if value {
            self.set_arc(lo, hi)
        } else {
            self.set_arc(hi, lo)
        }
    }

    /// Enforces `row(a) <= row(b)` on every lex row pair.
    fn lex_propagate(&mut self) -> bool {
        let ctx = self.ctx;
        for (a, b, positions) in &ctx.lex_rows {
            for &w in positions {
                match (self.edge_value(*a, w), self.edge_value(*b, w)) {
                    (Some(x), Some(y)) if x == y => continue,
                    (Some(x), Some(y)) => {
                        if x & !y {
                            return false;
                        }
                        break;
                    }
                    (Some(true), None) => {
                        if !self.set_edge_value(*b, w, true) {
                            return false;
                        }
                    }
                    (None, Some(false)) => {
                        if !self.set_edge_value(*a, w, false) {
                            return false;
                        }
                    }
                    _ => break,
                }
            }
        }
        true
    }

    fn case_feasible(&self) -> bool {
        let Some(members) = &self.case_filter else {
            return true;
        };
        let second = self.ctx.second_part;
        let bounds = [0, 1, 2].map(|x| {
            let lo = (self.out[x] & second).count_ones() as usize;
            let open = (second & !(self.out[x] | self.inn[x])).count_ones() as usize;
            (lo, lo + open)
        });
        members
            .iter()
            .any(|raw| (0..3).all(|k| bounds[k].0 <= raw[k] && raw[k] <= bounds[k].1))
    }

    fn propagate(&mut self) -> bool {
        loop {
            if !self.drain() {
                return false;
            }
            let before = self.trail.len();
            if !self.lex_propagate() {
                self.queue.clear();
                return false;
            }
            if self.trail.len() == before {
                return self.case_feasible();
            }
        }
    }

    fn root(&mut self) -> bool {
        if let Some((x, y)) = self.ctx.first_edge {
            if !self.set_arc(y, x) {
                return false;
            }
        }
        self.check_all_pairs() && self.propagate()
    }

    fn tick(&mut self) -> Result<(), Abort> {
        self.nodes += 1;
        self.unflushed += 1;
        if self.unflushed >= self.shared.cfg.node_budget.clamp(1, 1024) {
            let total = self
                .shared
                .nodes
                .fetch_add(self.unflushed, Ordering::Relaxed)
                + self.unflushed;
            self.unflushed = 0;
            let cfg = &self.shared.cfg;
            if total > cfg.node_budget || self.shared.start.elapsed() > cfg.time_budget {
                self.shared.out_of_budget.store(true, Ordering::Relaxed);
            }
            if self.shared.out_of_budget.load(Ordering::Relaxed)
                || self.shared.best_task.load(Ordering::Relaxed) < self.task
            {
                return Err(Abort);
            }
        }
        Ok(())
    }

    fn dfs(&mut self, cursor: usize, depth: usize) -> Result<bool, Abort> {
        self.tick()?;
        self.max_depth = self.max_depth.max(depth);
        let order = &self.ctx.branch_order;
        let Some(offset) = order[cursor..]
            .iter()
            .position(|&(u, v)| !self.decided(u, v))
        else {
            return Ok(true);
        };
        let idx = cursor + offset;
        let (lo, hi) = order[idx];
        for (u, v) in [(hi, lo), (lo, hi)] {
            let mark = self.trail.len();
            if self.set_arc(u, v) && self.propagate() && self.dfs(idx + 1, depth + 1)? {
                return Ok(true);
            }
            self.undo(mark);
        }
        Ok(false)
    }

    /// Visits every completion; `visit` returns false to stop early.
    fn dfs_all(&mut self, cursor: usize, visit: &mut dyn FnMut(&[VertexSet]) -> bool) -> bool {
        self.nodes += 1;
        let order = &self.ctx.branch_order;
        let Some(offset) = order[cursor..]
            .iter()
            .position(|&(u, v)| !self.decided(u, v))
        else {
            return visit(&self.out);
        };
        let idx = cursor + offset;
        let (lo, hi) = order[idx];
        for (u, v) in [(hi, lo), (lo, hi)] {
            let mark = self.trail.len();
            let keep_going =
                !(self.set_arc(u, v) && self.propagate()) || self.dfs_all(idx + 1, visit);
            self.undo(mark);
            if !keep_going {
                return false;
            }
        }
        true
    }

    fn run(&mut self, prefix: &[(usize, usize)]) -> TaskResult {
        if !self.root() {
            return TaskResult::Exhausted;
        }
        for &(u, v) in prefix {
            if !(self.set_arc(u, v) && self.propagate()) {
                return TaskResult::Exhausted;
            }
        }
        match self.dfs(0, 0) {
            Ok(true) => TaskResult::Found(self.out.clone()),
            Ok(false) => TaskResult::Exhausted,
            Err(Abort) => TaskResult::Aborted,
        }
    }
}

struct Task {
    class: Option<usize>,
    prefix: Vec<(usize, usize)>,
}

/// Prefix assignments of the first `k` branch edges, in the order the
/// sequential search would visit them.
fn prefixes(order: &[(usize, usize)], k: usize) -> Vec<Vec<(usize, usize)>> {
    let k = k.min(order.len());
    (0..1u64 << k)
        .map(|m| {
            (0..k)
                .map(|i| {
                    let (lo, hi) = order[i];
                    if m >> (k - 1 - i) & 1 == 0 {
                        (hi, lo)
                    } else {
                        (lo, hi)
                    }
                })
                .collect()
        })
        .collect()
}

/// Whether the case split applies: part 0 has three vertices and there is
/// a part 1 to count out-degrees into.
fn case_split_applies(t: &GraphTopology) -> bool {
    t.n_parts() >= 2 && t.parts()[0] == 3
}

/// Decides whether `K(parts)` has an orientation of diameter at most 2.
///
/// `Exists` comes with a verified witness; `None` means the space was
/// exhausted (modulo the symmetries listed in the module docs); `Unknown`
/// means a budget ran out first.
pub fn decide_diameter2(parts: &[usize], cfg: &SearchConfig) -> Result<SearchOutcome> {
    let topology = GraphTopology::new(parts)?;
    let edges = topology.edge_count();
    if edges > MAX_SEARCH_EDGES {
        return Err(SearchError::TooLarge {
            edges,
            cap: MAX_SEARCH_EDGES,
        });
    }
    let ctx = Context::new(&topology, cfg.symmetry_breaking);
    let shared = Shared {
        start: Instant::now(),
        cfg: cfg.clone(),
        nodes: AtomicU64::new(0),
        out_of_budget: AtomicBool::new(false),
        best_task: AtomicUsize::new(usize::MAX),
    };

    let threads = cfg.thread_count.max(1);
    let split = cfg.use_case_split && case_split_applies(&topology);
    let classes = if split {
        canonical_classes(topology.parts()[1])
    } else {
        Vec::new()
    };
    let prefix_bits = if threads > 1 {
        let per_class = if split { 1 } else { threads * 8 };
        (usize::BITS - per_class.leading_zeros()) as usize
    } else {
        0
    };
    let prefix_list = prefixes(&ctx.branch_order, prefix_bits);
    let mut tasks = Vec::new();
    let class_ids: Vec<Option<usize>> = if split {
        (0..classes.len()).map(Some).collect()
    } else {
        vec![None]
    };
    for class in class_ids {
        for prefix in &prefix_list {
            tasks.push(Task {
                class,
                prefix: prefix.clone(),
            });
        }
    }

    let results = par::map_indexed(tasks.len(), threads, |i| {
        let task = &tasks[i];
        if shared.best_task.load(Ordering::Relaxed) < i {
            return (TaskResult::Aborted, 0, 0);
        }
        let mut solver = Solver::new(&ctx, &shared, i);
        if let Some(c) = task.class {
            solver.case_filter = Some(raw_members(classes[c], topology.parts()[1]));
        }
        let result = solver.run(&task.prefix);
        if matches!(result, TaskResult::Found(_)) {
            shared.best_task.fetch_min(i, Ordering::Relaxed);
        }
        (result, solver.nodes, solver.max_depth)
    });

    let mut stats = SearchStats {
        cases_total: classes.len(),
        ..SearchStats::default()
    };
    let mut verdict = Verdict::None;
    let mut witness = None;
    let mut class_complete = vec![true; classes.len()];
    for (i, (result, nodes, depth)) in results.into_iter().enumerate() {
        stats.nodes += nodes;
        stats.max_depth = stats.max_depth.max(depth);
        match result {
            TaskResult::Found(rows) if witness.is_none() => {
                let d = Orientation::from_out_rows(topology.clone(), rows);
                assert!(
                    d.has_diameter_at_most_2(),
                    "search produced a witness of diameter {}",
                    d.diameter()
                );
                witness = Some(d);
                verdict = Verdict::Exists;
            }
            TaskResult::Found(_) | TaskResult::Exhausted => {}
            TaskResult::Aborted => {
                if let Some(c) = tasks[i].class {
                    class_complete[c] = false;
                }
                if witness.is_none() {
                    verdict = Verdict::Unknown;
                }
            }
        }
    }
    if witness.is_some() {
        verdict = Verdict::Exists;
    }
    stats.cases_enumerated = classes
        .iter()
        .zip(&class_complete)
        .filter(|(_, &done)| done)
        .map(|(c, _)| *c)
        .collect();
    stats.wall_time_secs = shared.start.elapsed().as_secs_f64();
    Ok(SearchOutcome {
        verdict,
        witness,
        stats,
    })
}

/// Calls `visit` on every orientation of `K(parts)` with diameter at most
/// 2, using the pruned search without symmetry breaking. Stops early when
/// `visit` returns false. Returns the number of search nodes.
pub fn for_each_diameter2(
    parts: &[usize],
    mut visit: impl FnMut(&Orientation) -> bool,
) -> Result<u64> {
    let topology = GraphTopology::new(parts)?;
    let edges = topology.edge_count();
    if edges > MAX_SEARCH_EDGES {
        return Err(SearchError::TooLarge {
            edges,
            cap: MAX_SEARCH_EDGES,
        });
    }
    let ctx = Context::new(&topology, false);
    let shared = Shared {
        start: Instant::now(),
        cfg: SearchConfig::default(),
        nodes: AtomicU64::new(0),
        out_of_budget: AtomicBool::new(false),
        best_task: AtomicUsize::new(usize::MAX),
    };
    let mut solver = Solver::new(&ctx, &shared, 0);
    if solver.root() {
        solver.dfs_all(0, &mut |rows| {
            let d = Orientation::from_out_rows(topology.clone(), rows.to_vec());
            visit(&d)
        });
    }
    Ok(solver.nodes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(threads: usize) -> SearchConfig {
        SearchConfig {
            thread_count: threads,
            ..SearchConfig::default()
        }
    }

    #[test]
    fn small_verdicts() {
        let k3 = decide_diameter2(&[1, 1, 1], &cfg(1)).unwrap();
        assert_eq!(k3.verdict, Verdict::Exists);
        assert_eq!(k3.witness.unwrap().diameter().finite(), Some(2));
        assert_eq!(
            decide_diameter2(&[1, 1, 1, 1], &cfg(1)).unwrap().verdict,
            Verdict::None
        );
        assert_eq!(
            decide_diameter2(&[2, 3], &cfg(1)).unwrap().verdict,
            Verdict::None
        );
        assert_eq!(
            decide_diameter2(&[2, 2, 2], &cfg(1)).unwrap().verdict,
            Verdict::Exists
        );
        assert_eq!(
            decide_diameter2(&[2], &cfg(1)).unwrap().verdict,
            Verdict::None
        );
    }

    #[test]
    fn single_vertex_is_trivially_within_two() {
        let out = decide_diameter2(&[1], &cfg(1)).unwrap();
        assert_eq!(out.verdict, Verdict::Exists);
        assert_eq!(out.witness.unwrap().diameter().finite(), Some(0));
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            decide_diameter2(&[32, 32], &cfg(1)),
            Err(SearchError::TooLarge { edges: 1024, .. })
        ));
    }

    #[test]
    fn budget_gives_unknown() {
        let c = SearchConfig {
            node_budget: 10,
            thread_count: 1,
            ..SearchConfig::default()
        };
        let out = decide_diameter2(&[3, 3, 7], &c).unwrap();
        assert_eq!(out.verdict, Verdict::Unknown);
        assert!(out.witness.is_none());
    }

    #[test]
    fn prefixes_follow_dfs_order() {
        let order = [(0, 1), (0, 2)];
        let p = prefixes(&order, 2);
        assert_eq!(p[0], vec![(1, 0), (2, 0)]);
        assert_eq!(p[3], vec![(0, 1), (0, 2)]);
    }
}
