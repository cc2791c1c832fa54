//! Spanner graphs over integer points and exact stretch/hop verification.
//!
//! Edge weights are never stored: the weight of `(a, b)` is always `|a - b|`.
//! Paths are searched layer by layer, where layer `h` holds the lightest walk
//! from the source using at most `h` counted edges. Under [`HopMode::GlobalHops`]
//! only edges between different grid cells are counted; the others are closed
//! over inside each layer with Dijkstra.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eps::Eps;
use crate::linemetric::SparseLineMetric;

const INF: u64 = u64::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpannerError {
    #[error("vertex {0} is neither a terminal nor a declared Steiner point")]
    UnknownVertex(i64),
    #[error("{0} is not a terminal")]
    NotATerminal(i64),
    #[error("self-loop at {0}")]
    SelfLoop(i64),
    #[error("vertex {0} is declared twice")]
    DuplicateVertex(i64),
    #[error("pair ({a}, {b}) has no path within the stretch bound at any hop count")]
    Unspannable { a: i64, b: i64 },
    #[error("hop diameter needs at least two terminals")]
    TooFewTerminals,
}

/// How hops are counted along a path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HopMode {
    AllHops,
    /// Only edges with both endpoints in `[grid.l, grid.r]` and in different
    /// cells are counted; every other edge is free but still pays its weight.
    GlobalHops(SparseLineMetric),
}

impl HopMode {
    pub fn counts(&self, a: i64, b: i64) -> bool {
        match self {
            HopMode::AllHops => true,
            HopMode::GlobalHops(grid) => grid.classifies_global(a, b),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub a: i64,
    pub b: i64,
    /// Lightest walk within the hop budget, if any exists.
    pub best_weight: Option<u64>,
    /// Fewest counted hops of any path meeting the stretch bound, if any exists.
    pub best_hops: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub ok: bool,
    pub witness: Option<Violation>,
}

impl VerifyReport {
    fn pass() -> Self {
        VerifyReport { ok: true, witness: None }
    }
}

/// A minimum-weight walk returned by [`Spanner::best_path`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Path {
    pub weight: u64,
    pub counted_hops: u64,
    pub vertices: Vec<i64>,
}

/// A geometric graph on terminals plus optional Steiner points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spanner {
    terminals: Vec<i64>,
    steiner: Vec<i64>,
    edges: BTreeSet<(i64, i64)>,
}

fn sorted_unique(mut v: Vec<i64>) -> Result<Vec<i64>, SpannerError> {
    v.sort_unstable();
    if let Some(w) = v.windows(2).find(|w| w[0] == w[1]) {
        return Err(SpannerError::DuplicateVertex(w[0]));
    }
    Ok(v)
}

impl Spanner {
    pub fn new(
        terminals: Vec<i64>,
        steiner: Vec<i64>,
        edges: impl IntoIterator<Item = (i64, i64)>,
    ) -> Result<Self, SpannerError> {
        let terminals = sorted_unique(terminals)?;
        let steiner = sorted_unique(steiner)?;
        if let Some(&p) = steiner.iter().find(|p| terminals.binary_search(p).is_ok()) {
            return Err(SpannerError::DuplicateVertex(p));
        }
        let mut s = Spanner { terminals, steiner, edges: BTreeSet::new() };
        for (a, b) in edges {
            s.insert_edge(a, b)?;
        }
        Ok(s)
    }

    /// No edges.
    pub fn empty(terminals: Vec<i64>) -> Result<Self, SpannerError> {
        Spanner::new(terminals, Vec::new(), [])
    }

    pub fn complete(terminals: Vec<i64>) -> Result<Self, SpannerError> {
        let mut s = Spanner::empty(terminals)?;
        let t = s.terminals.clone();
        for (i, &a) in t.iter().enumerate() {
            for &b in &t[i + 1..] {
                s.edges.insert((a, b));
            }
        }
        Ok(s)
    }

    /// Consecutive terminals joined.
    pub fn path(terminals: Vec<i64>) -> Result<Self, SpannerError> {
        let mut s = Spanner::empty(terminals)?;
        let pairs: Vec<_> = s.terminals.windows(2).map(|w| (w[0], w[1])).collect();
        s.edges.extend(pairs);
        Ok(s)
    }

    pub fn is_vertex(&self, p: i64) -> bool {
        self.terminals.binary_search(&p).is_ok() || self.steiner.binary_search(&p).is_ok()
    }

    pub fn insert_edge(&mut self, a: i64, b: i64) -> Result<bool, SpannerError> {
        if a == b {
            return Err(SpannerError::SelfLoop(a));
        }
        for p in [a, b] {
            if !self.is_vertex(p) {
                return Err(SpannerError::UnknownVertex(p));
            }
        }
        Ok(self.edges.insert((a.min(b), a.max(b))))
    }

    pub fn terminals(&self) -> &[i64] {
        &self.terminals
    }

    pub fn steiner(&self) -> &[i64] {
        &self.steiner
    }

    pub fn edges(&self) -> &BTreeSet<(i64, i64)> {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, a: i64, b: i64) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    /// Total weight of a vertex sequence, `None` if some step is not an edge.
    pub fn walk_weight(&self, walk: &[i64]) -> Option<u64> {
        walk.windows(2)
            .map(|w| self.has_edge(w[0], w[1]).then(|| w[0].abs_diff(w[1])))
            .sum()
    }

    /// Edges with both endpoints in `[grid.l, grid.r]` lying in different cells.
    pub fn count_global_edges(&self, grid: &SparseLineMetric) -> usize {
        self.edges.iter().filter(|&&(a, b)| grid.classifies_global(a, b)).count()
    }

    fn check_terminal(&self, p: i64) -> Result<(), SpannerError> {
        if self.terminals.binary_search(&p).is_ok() {
            Ok(())
        } else if self.is_vertex(p) {
            Err(SpannerError::NotATerminal(p))
        } else {
            Err(SpannerError::UnknownVertex(p))
        }
    }

    /// Whether some walk `a -> b` weighs at most `(1 + eps)|a - b|` with at most `k` counted hops.
    pub fn stretch_path_exists(
        &self,
        a: i64,
        b: i64,
        eps: Eps,
        k: u64,
        mode: &HopMode,
    ) -> Result<bool, SpannerError> {
        self.check_terminal(a)?;
        self.check_terminal(b)?;
        if a == b {
            return Ok(true);
        }
        let graph = Graph::new(self, mode);
        let mut search = Search::new(&graph);
        Ok(search.pair_hops(a, b, eps, k).is_some())
    }

    /// Least `k` for which every terminal pair has a `(1 + eps)`-path with at most `k` counted hops.
    pub fn hop_diameter(&self, eps: Eps, mode: &HopMode) -> Result<u64, SpannerError> {
        if self.terminals.len() < 2 {
            return Err(SpannerError::TooFewTerminals);
        }
        let graph = Graph::new(self, mode);
        let per_source: Vec<Result<u64, SpannerError>> = graph
            .terminal_ids
            .par_iter()
            .map_init(|| Search::new(&graph), |search, &src| search.source_hop_demand(src, eps))
            .collect();
        per_source.into_iter().try_fold(0, |acc, r| Ok(acc.max(r?)))
    }

    /// Checks every terminal pair; on failure reports the lexicographically smallest violating pair.
    pub fn verify(&self, eps: Eps, k: u64, mode: &HopMode) -> VerifyReport {
        let graph = Graph::new(self, mode);
        let first_bad = graph
            .terminal_ids
            .par_iter()
            .map_init(|| Search::new(&graph), |search, &src| search.source_first_violation(src, eps, k))
            .collect::<Vec<_>>()
            .into_iter()
            .flatten()
            .min();
        match first_bad {
            None => VerifyReport::pass(),
            Some((a, b)) => {
                let mut search = Search::new(&graph);
                let best_weight = search.pair_lightest(a, b, k);
                let best_hops = search.pair_hops(a, b, eps, graph.coords.len() as u64);
                VerifyReport {
                    ok: false,
                    witness: Some(Violation { a, b, best_weight, best_hops }),
                }
            }
        }
    }

    /// Like [`verify`](Self::verify) but only on the given terminal pairs.
    pub fn verify_pairs(
        &self,
        pairs: &[(i64, i64)],
        eps: Eps,
        k: u64,
        mode: &HopMode,
    ) -> Result<VerifyReport, SpannerError> {
        for &(a, b) in pairs {
            self.check_terminal(a)?;
            self.check_terminal(b)?;
        }
        let graph = Graph::new(self, mode);
        let bad = pairs
            .par_iter()
            .map(|&(a, b)| (a.min(b), a.max(b)))
            .filter(|&(a, b)| a != b)
            .map_init(
                || Search::new(&graph),
                |search, (a, b)| {
                    (search.pair_hops(a, b, eps, k).is_none()).then_some((a, b))
                },
            )
            .flatten()
            .min();
        Ok(match bad {
            None => VerifyReport::pass(),
            Some((a, b)) => {
                let mut search = Search::new(&graph);
                let best_weight = search.pair_lightest(a, b, k);
                let best_hops = search.pair_hops(a, b, eps, graph.coords.len() as u64);
                VerifyReport { ok: false, witness: Some(Violation { a, b, best_weight, best_hops }) }
            }
        })
    }

    /// Minimum-weight walk `a -> b` with at most `k` counted hops, via Dijkstra on
    /// `(vertex, hops used)` states. Ties go to fewer counted hops.
    pub fn best_path(
        &self,
        a: i64,
        b: i64,
        k: u64,
        mode: &HopMode,
    ) -> Result<Option<Path>, SpannerError> {
        for p in [a, b] {
            if !self.is_vertex(p) {
                return Err(SpannerError::UnknownVertex(p));
            }
        }
        let graph = Graph::new(self, mode);
        let (src, dst) = (graph.id(a), graph.id(b));
        let layers = k as usize + 1;
        let idx = |v: usize, h: usize| v * layers + h;
        let mut dist = vec![INF; graph.coords.len() * layers];
        let mut parent = vec![usize::MAX; dist.len()];
        let mut heap = BinaryHeap::new();
        dist[idx(src, 0)] = 0;
        heap.push(Reverse((0u64, 0usize, src)));
        while let Some(Reverse((d, h, v))) = heap.pop() {
            if d > dist[idx(v, h)] {
                continue;
            }
            for arc in graph.arcs(v) {
                let nh = h + arc.counted as usize;
                if nh >= layers {
                    continue;
                }
                let to = arc.to as usize;
                let nd = d + arc.w;
                if nd < dist[idx(to, nh)] {
                    dist[idx(to, nh)] = nd;
                    parent[idx(to, nh)] = idx(v, h);
                    heap.push(Reverse((nd, nh, to)));
                }
            }
        }
        let Some((h, weight)) = (0..layers)
            .map(|h| (h, dist[idx(dst, h)]))
            .filter(|&(_, d)| d < INF)
            .min_by_key(|&(h, d)| (d, h))
        else {
            return Ok(None);
        };
        let mut vertices = vec![b];
        let mut state = idx(dst, h);
        while parent[state] != usize::MAX {
            state = parent[state];
            vertices.push(graph.coords[state / layers]);
        }
        vertices.reverse();
        Ok(Some(Path { weight, counted_hops: h as u64, vertices }))
    }
}

#[derive(Serialize, Deserialize)]
struct RawSpanner {
    terminals: Vec<i64>,
    steiner: Vec<i64>,
    edges: Vec<[i64; 2]>,
}

impl Serialize for Spanner {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        RawSpanner {
            terminals: self.terminals.clone(),
            steiner: self.steiner.clone(),
            edges: self.edges.iter().map(|&(a, b)| [a, b]).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Spanner {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = RawSpanner::deserialize(deserializer)?;
        Spanner::new(raw.terminals, raw.steiner, raw.edges.into_iter().map(|[a, b]| (a, b)))
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy)]
struct Arc {
    to: u32,
    w: u64,
    counted: bool,
}

/// Adjacency arrays over the sorted union of terminals and Steiner points.
struct Graph {
    coords: Vec<i64>,
    is_terminal: Vec<bool>,
    terminal_ids: Vec<usize>,
    start: Vec<usize>,
    arcs: Vec<Arc>,
    has_free: bool,
}

impl Graph {
    fn new(s: &Spanner, mode: &HopMode) -> Self {
        let mut coords: Vec<i64> = s.terminals.iter().chain(&s.steiner).copied().collect();
        coords.sort_unstable();
        let is_terminal: Vec<bool> =
            coords.iter().map(|p| s.terminals.binary_search(p).is_ok()).collect();
        let terminal_ids = (0..coords.len()).filter(|&i| is_terminal[i]).collect();
        let id = |p: i64| coords.binary_search(&p).expect("edge endpoint is a vertex");
        let mut degree = vec![0usize; coords.len() + 1];
        for &(a, b) in &s.edges {
            degree[id(a) + 1] += 1;
            degree[id(b) + 1] += 1;
        }
        for i in 1..degree.len() {
            degree[i] += degree[i - 1];
        }
        let start = degree;
        let mut fill = start.clone();
        let mut arcs = vec![Arc { to: 0, w: 0, counted: true }; 2 * s.edges.len()];
        let mut has_free = false;
        for &(a, b) in &s.edges {
            let (ia, ib) = (id(a), id(b));
            let w = a.abs_diff(b);
            let counted = mode.counts(a, b);
            has_free |= !counted;
            arcs[fill[ia]] = Arc { to: ib as u32, w, counted };
            fill[ia] += 1;
            arcs[fill[ib]] = Arc { to: ia as u32, w, counted };
            fill[ib] += 1;
        }
        Graph { coords, is_terminal, terminal_ids, start, arcs, has_free }
    }

    fn id(&self, p: i64) -> usize {
        self.coords.binary_search(&p).expect("known vertex")
    }

    fn arcs(&self, v: usize) -> &[Arc] {
        &self.arcs[self.start[v]..self.start[v + 1]]
    }
}

#[derive(Clone, Copy)]
enum Prune {
    /// Drop labels heavier than this.
    Cap(u64),
    /// Drop labels that cannot reach `coord` within `budget` total weight.
    Target { coord: i64, budget: u64 },
}

impl Prune {
    fn rejects(self, d: u64, at: i64) -> bool {
        match self {
            Prune::Cap(c) => d > c,
            Prune::Target { coord, budget } => d.saturating_add(at.abs_diff(coord)) > budget,
        }
    }
}

/// Reusable layered search workspace.
struct Search<'g> {
    g: &'g Graph,
    dist: Vec<u64>,
    stamp: Vec<u64>,
    epoch: u64,
    touched: Vec<u32>,
    heap: BinaryHeap<Reverse<(u64, u32)>>,
}

impl<'g> Search<'g> {
    fn new(g: &'g Graph) -> Self {
        let n = g.coords.len();
        Search {
            g,
            dist: vec![INF; n],
            stamp: vec![0; n],
            epoch: 0,
            touched: Vec::new(),
            heap: BinaryHeap::new(),
        }
    }

    fn reset(&mut self) {
        for &v in &self.touched {
            self.dist[v as usize] = INF;
        }
        self.touched.clear();
    }

    fn lower(&mut self, v: usize, d: u64, improved: &mut Vec<u32>) -> bool {
        if d >= self.dist[v] {
            return false;
        }
        if self.dist[v] == INF {
            self.touched.push(v as u32);
        }
        self.dist[v] = d;
        if self.stamp[v] != self.epoch {
            self.stamp[v] = self.epoch;
            improved.push(v as u32);
        }
        true
    }

    /// Relaxes free edges from the vertices in `improved` to a fixed point.
    fn close(&mut self, improved: &mut Vec<u32>, prune: Prune) {
        if !self.g.has_free {
            return;
        }
        self.heap.clear();
        for &v in improved.iter() {
            self.heap.push(Reverse((self.dist[v as usize], v)));
        }
        while let Some(Reverse((d, v))) = self.heap.pop() {
            if d > self.dist[v as usize] {
                continue;
            }
            for arc in self.g.arcs(v as usize) {
                if arc.counted {
                    continue;
                }
                let to = arc.to as usize;
                let nd = d + arc.w;
                if prune.rejects(nd, self.g.coords[to]) {
                    continue;
                }
                if self.lower(to, nd, improved) {
                    self.heap.push(Reverse((nd, to as u32)));
                }
            }
        }
    }

    /// Runs layers `0..=max_hops` from `src`. After each layer `visit(h, improved)`
    /// sees the vertices whose label dropped in that layer; returning `false` stops.
    fn run(
        &mut self,
        src: usize,
        max_hops: u64,
        prune: Prune,
        mut visit: impl FnMut(u64, &[u32], &[u64]) -> bool,
    ) {
        self.reset();
        self.epoch += 1;
        let mut improved = Vec::new();
        self.lower(src, 0, &mut improved);
        self.close(&mut improved, prune);
        if !visit(0, &improved, &self.dist) {
            return;
        }
        let mut frontier: Vec<(u32, u64)> = Vec::new();
        for h in 1..=max_hops {
            if improved.is_empty() {
                break;
            }
            frontier.clear();
            frontier.extend(improved.iter().map(|&v| (v, self.dist[v as usize])));
            improved.clear();
            self.epoch += 1;
            for &(u, du) in &frontier {
                let g = self.g;
                for arc in g.arcs(u as usize) {
                    if !arc.counted {
                        continue;
                    }
                    let to = arc.to as usize;
                    let nd = du + arc.w;
                    if !prune.rejects(nd, g.coords[to]) {
                        self.lower(to, nd, &mut improved);
                    }
                }
            }
            self.close(&mut improved, prune);
            if !visit(h, &improved, &self.dist) {
                return;
            }
        }
    }

    /// Fewest counted hops (at most `max_hops`) of a `(1 + eps)`-path `a -> b`.
    fn pair_hops(&mut self, a: i64, b: i64, eps: Eps, max_hops: u64) -> Option<u64> {
        let (src, dst) = (self.g.id(a), self.g.id(b));
        let budget = eps.budget(a.abs_diff(b));
        let mut found = None;
        self.run(src, max_hops, Prune::Target { coord: b, budget }, |h, _, dist| {
            if dist[dst] <= budget {
                found = Some(h);
                false
            } else {
                true
            }
        });
        found
    }

    /// Lightest walk `a -> b` with at most `k` counted hops.
    fn pair_lightest(&mut self, a: i64, b: i64, k: u64) -> Option<u64> {
        let (src, dst) = (self.g.id(a), self.g.id(b));
        self.run(src, k, Prune::Cap(INF - 1), |_, _, _| true);
        Some(self.dist[dst]).filter(|&d| d < INF)
    }

    /// Smallest terminal `b > a` failing the `(1 + eps, k)` contract from `a`.
    fn source_first_violation(&mut self, src: usize, eps: Eps, k: u64) -> Option<(i64, i64)> {
        let a = self.g.coords[src];
        let far = *self.g.coords.last().expect("non-empty");
        if far == a {
            return None;
        }
        let cap = eps.budget(a.abs_diff(far));
        self.run(src, k, Prune::Cap(cap), |_, _, _| true);
        let g = self.g;
        (src + 1..g.coords.len())
            .filter(|&v| g.is_terminal[v])
            .find(|&v| self.dist[v] > eps.budget(a.abs_diff(g.coords[v])))
            .map(|v| (a, g.coords[v]))
    }

    /// Max over terminals `b > a` of the fewest counted hops needed to reach `b`.
    fn source_hop_demand(&mut self, src: usize, eps: Eps) -> Result<u64, SpannerError> {
        let g = self.g;
        let a = g.coords[src];
        let targets: Vec<usize> = (src + 1..g.coords.len()).filter(|&v| g.is_terminal[v]).collect();
        let Some(&last) = targets.last() else {
            return Ok(0);
        };
        let cap = eps.budget(a.abs_diff(g.coords[last]));
        let mut need: Vec<Option<u64>> = vec![None; g.coords.len()];
        let mut remaining = targets.len();
        let mut worst = 0;
        self.run(src, g.coords.len() as u64, Prune::Cap(cap), |h, improved, dist| {
            for &v in improved {
                let v = v as usize;
                if v > src && g.is_terminal[v] && need[v].is_none() {
                    let b = g.coords[v];
                    if dist[v] <= eps.budget(a.abs_diff(b)) {
                        need[v] = Some(h);
                        worst = worst.max(h);
                        remaining -= 1;
                    }
                }
            }
            remaining > 0
        });
        match targets.iter().find(|&&v| need[v].is_none()) {
            Some(&v) => Err(SpannerError::Unspannable { a, b: g.coords[v] }),
            None => Ok(worst),
        }
    }
}
