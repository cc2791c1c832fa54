//! Exact minimum edge count of a `(1 + eps)`-spanner with hop bound `k` on a
//! handful of points.
//!
//! Two independent searches share only the instance encoding: a plain
//! enumeration of edge subsets by increasing size, and a branch-and-bound over
//! include/exclude decisions. Both walk candidate edges in lexicographic order,
//! so both return the lexicographically smallest optimal edge set.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::eps::Eps;
use crate::spanner::{HopMode, Spanner, SpannerError};

/// Vertex limit of the bitmask encoding (`16 * 15 / 2 = 120` candidate edges).
pub const MAX_VERTICES: usize = 16;
/// Exhaustive enumeration limits.
pub const EXHAUSTIVE_MAX_TERMINALS: usize = 7;
pub const EXHAUSTIVE_MAX_TERMINALS_STEINER: usize = 6;
pub const EXHAUSTIVE_MAX_VERTICES_STEINER: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("instance too large: {what} = {got} exceeds the limit {limit}")]
    TooLarge { what: &'static str, got: usize, limit: usize },
    #[error("Steiner range [{lo}, {hi}] must contain every terminal")]
    BadSteinerRange { lo: i64, hi: i64 },
    #[error("no spanner over the candidate edges meets the contract")]
    Infeasible,
    #[error(transparent)]
    Points(#[from] SpannerError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchConfig {
    pub eps: Eps,
    pub k: u64,
    pub mode: HopMode,
    /// Inclusive range whose non-terminal integers are offered as Steiner points.
    pub steiner_range: Option<(i64, i64)>,
    pub max_points: usize,
}

impl SearchConfig {
    pub fn new(eps: Eps, k: u64) -> Self {
        SearchConfig { eps, k, mode: HopMode::AllHops, steiner_range: None, max_points: 10 }
    }

    pub fn with_mode(mut self, mode: HopMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_steiner(mut self, lo: i64, hi: i64) -> Self {
        self.steiner_range = Some((lo, hi));
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchResult {
    pub minimum: usize,
    pub witness: Spanner,
    pub nodes_explored: u64,
}

#[derive(Debug, Clone, Copy)]
struct Edge {
    u: u8,
    v: u8,
    w: u64,
    counted: bool,
}

#[derive(Debug, Clone, Copy)]
struct PairCheck {
    a: u8,
    b: u8,
    budget: u64,
    /// Candidate edges whose endpoints both fit inside the pair's weight budget.
    usable: u128,
}

/// The candidate universe of one search, with edge `i` at bit `i` in
/// lexicographic order of endpoint coordinates.
struct Instance {
    coords: Vec<i64>,
    terminals: Vec<i64>,
    terminal_mask: u16,
    edges: Vec<Edge>,
    pairs: Vec<PairCheck>,
    /// Edges every valid spanner must contain.
    forced: u128,
    k: u64,
}

impl Instance {
    fn new(points: &[i64], cfg: &SearchConfig) -> Result<Self, OracleError> {
        let terminals = Spanner::empty(points.to_vec())?.terminals().to_vec();
        let mut coords = terminals.clone();
        if let Some((lo, hi)) = cfg.steiner_range {
            let (first, last) = (terminals.first().copied(), terminals.last().copied());
            if lo > hi || first.is_some_and(|f| f < lo) || last.is_some_and(|l| l > hi) {
                return Err(OracleError::BadSteinerRange { lo, hi });
            }
            if (hi - lo + 1) as u128 > MAX_VERTICES as u128 {
                return Err(OracleError::TooLarge {
                    what: "vertices",
                    got: (hi - lo + 1).try_into().unwrap_or(usize::MAX),
                    limit: MAX_VERTICES,
                });
            }
            coords = (lo..=hi).collect();
        }
        if coords.len() > MAX_VERTICES {
            return Err(OracleError::TooLarge { what: "vertices", got: coords.len(), limit: MAX_VERTICES });
        }
        let terminal_mask = coords
            .iter()
            .enumerate()
            .filter(|(_, p)| terminals.binary_search(p).is_ok())
            .fold(0u16, |m, (i, _)| m | 1 << i);
        let mut edges = Vec::new();
        for i in 0..coords.len() {
            for j in i + 1..coords.len() {
                let (a, b) = (coords[i], coords[j]);
                edges.push(Edge { u: i as u8, v: j as u8, w: a.abs_diff(b), counted: cfg.mode.counts(a, b) });
            }
        }
        let mut pairs = Vec::new();
        let mut forced = 0u128;
        let tids: Vec<usize> = (0..coords.len()).filter(|&i| terminal_mask >> i & 1 == 1).collect();
        for (x, &i) in tids.iter().enumerate() {
            for &j in &tids[x + 1..] {
                let (a, b) = (coords[i], coords[j]);
                let budget = cfg.eps.budget(a.abs_diff(b));
                let fits = |p: i64| p.abs_diff(a) + p.abs_diff(b) <= budget;
                let usable = edges
                    .iter()
                    .enumerate()
                    .filter(|(_, e)| fits(coords[e.u as usize]) && fits(coords[e.v as usize]))
                    .fold(0u128, |m, (bit, _)| m | 1 << bit);
                let direct = edges.iter().position(|e| e.u as usize == i && e.v as usize == j).unwrap();
                let has_middle = (0..coords.len()).any(|m| m != i && m != j && fits(coords[m]));
                let one_hop_only = cfg.k <= 1 && matches!(cfg.mode, HopMode::AllHops);
                if !has_middle || one_hop_only {
                    forced |= 1 << direct;
                }
                pairs.push(PairCheck { a: i as u8, b: j as u8, budget, usable });
            }
        }
        // Short pairs fail most often; test them first.
        pairs.sort_by_key(|p| (coords[p.b as usize] - coords[p.a as usize], p.a));
        Ok(Instance { coords, terminals, terminal_mask, edges, pairs, forced, k: cfg.k })
    }

    fn universe(&self) -> u128 {
        if self.edges.len() == 128 {
            u128::MAX
        } else {
            (1u128 << self.edges.len()) - 1
        }
    }

    fn pair_ok(&self, p: &PairCheck, set: u128) -> bool {
        let set = set & p.usable;
        let (a, b) = (p.a as usize, p.b as usize);
        let mut dist = [u64::MAX; MAX_VERTICES];
        dist[a] = 0;
        self.close_free(&mut dist, set);
        if dist[b] <= p.budget {
            return true;
        }
        for _ in 0..self.k {
            let prev = dist;
            let mut changed = false;
            let mut m = set;
            while m != 0 {
                let e = &self.edges[m.trailing_zeros() as usize];
                m &= m - 1;
                if !e.counted {
                    continue;
                }
                let (u, v) = (e.u as usize, e.v as usize);
                if prev[u] != u64::MAX && prev[u] + e.w < dist[v] {
                    dist[v] = prev[u] + e.w;
                    changed = true;
                }
                if prev[v] != u64::MAX && prev[v] + e.w < dist[u] {
                    dist[u] = prev[v] + e.w;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
            self.close_free(&mut dist, set);
            if dist[b] <= p.budget {
                return true;
            }
        }
        false
    }

    fn close_free(&self, dist: &mut [u64; MAX_VERTICES], set: u128) {
        loop {
            let mut changed = false;
            let mut m = set;
            while m != 0 {
                let e = &self.edges[m.trailing_zeros() as usize];
                m &= m - 1;
                if e.counted {
                    continue;
                }
                let (u, v) = (e.u as usize, e.v as usize);
                if dist[u] != u64::MAX && dist[u] + e.w < dist[v] {
                    dist[v] = dist[u] + e.w;
                    changed = true;
                }
                if dist[v] != u64::MAX && dist[v] + e.w < dist[u] {
                    dist[u] = dist[v] + e.w;
                    changed = true;
                }
            }
            if !changed {
                return;
            }
        }
    }

    fn satisfies(&self, set: u128, order: &mut [usize]) -> bool {
        for i in 0..order.len() {
            if !self.pair_ok(&self.pairs[order[i]], set) {
                // Move the failing pair to the front for the next call.
                order[..=i].rotate_right(1);
                return false;
            }
        }
        true
    }

    /// Edges still needed to join every terminal-bearing component of `set`.
    fn components_gap(&self, set: u128) -> usize {
        let mut parent: [u8; MAX_VERTICES] = std::array::from_fn(|i| i as u8);
        fn find(parent: &mut [u8; MAX_VERTICES], mut x: usize) -> usize {
            while parent[x] as usize != x {
                parent[x] = parent[parent[x] as usize];
                x = parent[x] as usize;
            }
            x
        }
        let mut m = set;
        while m != 0 {
            let e = &self.edges[m.trailing_zeros() as usize];
            m &= m - 1;
            let (ru, rv) = (find(&mut parent, e.u as usize), find(&mut parent, e.v as usize));
            if ru != rv {
                parent[ru] = rv as u8;
            }
        }
        let mut roots = 0u16;
        for i in 0..self.coords.len() {
            if self.terminal_mask >> i & 1 == 1 {
                roots |= 1 << find(&mut parent, i);
            }
        }
        (roots.count_ones() as usize).saturating_sub(1)
    }

    fn lower_bound(&self, included: u128) -> usize {
        let fixed = included | self.forced;
        fixed.count_ones() as usize + self.components_gap(fixed)
    }

    /// Adds to the fixed edges one edge per unmet pair, over a family of unmet
    /// pairs whose candidate edges (undecided, unforced, usable) are disjoint.
    fn packing_bound(&self, included: u128, undecided: u128) -> usize {
        let fixed = included | self.forced;
        let mut taken = 0u128;
        let mut extra = 0;
        for p in &self.pairs {
            let cand = p.usable & undecided & !self.forced;
            if cand & taken != 0 || self.pair_ok(p, fixed) {
                continue;
            }
            taken |= cand;
            extra += 1;
        }
        fixed.count_ones() as usize + extra
    }

    /// Size of a minimal valid set found by dropping edges greedily from the
    /// universe, last edge first.
    fn greedy_upper_bound(&self, order: &mut [usize]) -> Option<usize> {
        let mut set = self.universe();
        if !self.satisfies(set, order) {
            return None;
        }
        for bit in (0..self.edges.len()).rev() {
            let without = set & !(1u128 << bit);
            if self.forced >> bit & 1 == 0 && self.satisfies(without, order) {
                set = without;
            }
        }
        Some(set.count_ones() as usize)
    }

    fn witness(&self, set: u128) -> Result<Spanner, OracleError> {
        let mut edges = Vec::new();
        let mut steiner = Vec::new();
        let mut m = set;
        while m != 0 {
            let e = &self.edges[m.trailing_zeros() as usize];
            m &= m - 1;
            let (a, b) = (self.coords[e.u as usize], self.coords[e.v as usize]);
            for p in [a, b] {
                if self.terminals.binary_search(&p).is_err() && !steiner.contains(&p) {
                    steiner.push(p);
                }
            }
            edges.push((a, b));
        }
        Ok(Spanner::new(self.terminals.clone(), steiner, edges)?)
    }
}

fn check_guard(points: &[i64], limit: usize) -> Result<(), OracleError> {
    if points.len() > limit {
        return Err(OracleError::TooLarge { what: "points", got: points.len(), limit });
    }
    Ok(())
}

/// Reference oracle: all edge subsets of size `n - 1, n, ...` in lexicographic order.
pub fn min_edges_exhaustive(points: &[i64], cfg: &SearchConfig) -> Result<SearchResult, OracleError> {
    let with_steiner = cfg.steiner_range.is_some();
    let limit = if with_steiner { EXHAUSTIVE_MAX_TERMINALS_STEINER } else { EXHAUSTIVE_MAX_TERMINALS };
    check_guard(points, limit.min(cfg.max_points))?;
    let inst = Instance::new(points, cfg)?;
    if with_steiner && inst.coords.len() > EXHAUSTIVE_MAX_VERTICES_STEINER {
        return Err(OracleError::TooLarge {
            what: "vertices",
            got: inst.coords.len(),
            limit: EXHAUSTIVE_MAX_VERTICES_STEINER,
        });
    }
    let mut order: Vec<usize> = (0..inst.pairs.len()).collect();
    let total = inst.edges.len();
    let mut nodes = 0u64;
    for size in inst.terminals.len().saturating_sub(1)..=total {
        let mut combo: Vec<usize> = (0..size).collect();
        loop {
            nodes += 1;
            let set = combo.iter().fold(0u128, |m, &i| m | 1 << i);
            if inst.satisfies(set, &mut order) {
                return Ok(SearchResult { minimum: size, witness: inst.witness(set)?, nodes_explored: nodes });
            }
            // Next combination in lexicographic order.
            let Some(i) = (0..size).rev().find(|&i| combo[i] != i + total - size) else {
                break;
            };
            combo[i] += 1;
            for j in i + 1..size {
                combo[j] = combo[j - 1] + 1;
            }
        }
    }
    Err(OracleError::Infeasible)
}

struct BranchAndBound<'a> {
    inst: &'a Instance,
    order: Vec<usize>,
    best: Option<u128>,
    best_size: usize,
    nodes: u64,
}

impl BranchAndBound<'_> {
    fn dfs(&mut self, next: usize, included: u128, excluded: u128) {
        self.nodes += 1;
        if self.inst.lower_bound(included) >= self.best_size {
            return;
        }
        let undecided = self.inst.universe() & !excluded & !((1u128 << next) - 1);
        if self.inst.packing_bound(included, undecided) >= self.best_size {
            return;
        }
        if self.inst.satisfies(included, &mut self.order) {
            self.best = Some(included);
            self.best_size = included.count_ones() as usize;
            return;
        }
        if next == self.inst.edges.len() {
            return;
        }
        let available = self.inst.universe() & !excluded;
        if !self.inst.satisfies(available, &mut self.order) {
            return;
        }
        let bit = 1u128 << next;
        self.dfs(next + 1, included | bit, excluded);
        if self.inst.forced & bit == 0 {
            self.dfs(next + 1, included, excluded | bit);
        }
    }
}

/// Branch-and-bound over include/exclude decisions, edges in lexicographic order.
///
/// A subtree is cut when forced edges plus the components still to be joined
/// already reach the incumbent, or when even every undecided edge cannot
/// satisfy some pair.
pub fn min_edges_bnb(points: &[i64], cfg: &SearchConfig) -> Result<SearchResult, OracleError> {
    check_guard(points, cfg.max_points)?;
    let inst = Instance::new(points, cfg)?;
    let mut order: Vec<usize> = (0..inst.pairs.len()).collect();
    let bound = inst.greedy_upper_bound(&mut order).ok_or(OracleError::Infeasible)?;
    // One above the greedy size, so the lexicographically first optimum is still found.
    let mut search = BranchAndBound { inst: &inst, order, best: None, best_size: bound + 1, nodes: 0 };
    search.dfs(0, 0, 0);
    let set = search.best.ok_or(OracleError::Infeasible)?;
    Ok(SearchResult {
        minimum: search.best_size,
        witness: inst.witness(set)?,
        nodes_explored: search.nodes,
    })
}

/// Edges `(a, b)` with `a <= split < b`.
pub fn cross_edges(s: &Spanner, split: i64) -> usize {
    s.edges().iter().filter(|&&(a, b)| a <= split && split < b).count()
}

/// Recount of a spanner on `1..=n` cut into consecutive blocks of `block` points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BlockCensus {
    /// Edges inside `[1, n]` joining two different blocks.
    pub cross_edges: usize,
    /// Points in `[n/4, 3n/4]` incident to a cross edge.
    pub global_points: usize,
    /// Points in `[n/4, 3n/4]` with no cross edge.
    pub nonglobal_points: usize,
    /// Blocks holding at least one such non-global point.
    pub nonglobal_blocks: usize,
}

pub fn block_census(s: &Spanner, n: i64, block: i64) -> BlockCensus {
    let block_of = |p: i64| (p - 1).div_euclid(block);
    let inside = |p: i64| (1..=n).contains(&p);
    let crossing: Vec<(i64, i64)> = s
        .edges()
        .iter()
        .copied()
        .filter(|&(a, b)| inside(a) && inside(b) && block_of(a) != block_of(b))
        .collect();
    // Points p with n/4 <= p <= 3n/4.
    let middle: Vec<i64> = (1..=n).filter(|&p| 4 * p >= n && 4 * p <= 3 * n).collect();
    let is_global = |p: i64| crossing.iter().any(|&(a, b)| a == p || b == p);
    let global_points = middle.iter().filter(|&&p| is_global(p)).count();
    let mut blocks: Vec<i64> = middle.iter().filter(|&&p| !is_global(p)).map(|&p| block_of(p)).collect();
    blocks.dedup();
    BlockCensus {
        cross_edges: crossing.len(),
        global_points,
        nonglobal_points: middle.len() - global_points,
        nonglobal_blocks: blocks.len(),
    }
}

impl fmt::Display for SearchResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "minimum: {}", self.minimum)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linemetric::SparseLineMetric;

    fn cfg(p: i64, q: i64, k: u64) -> SearchConfig {
        SearchConfig::new(Eps::new(p, q).unwrap(), k)
    }

    fn line(n: i64) -> Vec<i64> {
        (1..=n).collect()
    }

    #[test]
    fn two_points_need_one_edge() {
        for k in 1..4 {
            for search in [min_edges_exhaustive, min_edges_bnb] {
                let r = search(&[3, 8], &cfg(0, 1, k)).unwrap();
                assert_eq!(r.minimum, 1);
                assert_eq!(r.witness.edges().iter().copied().collect::<Vec<_>>(), [(3, 8)]);
            }
        }
    }

    #[test]
    fn one_hop_forces_a_clique() {
        for search in [min_edges_exhaustive, min_edges_bnb] {
            assert_eq!(search(&line(4), &cfg(0, 1, 1)).unwrap().minimum, 6);
            assert_eq!(search(&line(4), &cfg(7, 2, 1)).unwrap().minimum, 6);
        }
    }

    #[test]
    fn five_points_two_hops() {
        for search in [min_edges_exhaustive, min_edges_bnb] {
            let r = search(&line(5), &cfg(0, 1, 2)).unwrap();
            assert_eq!(r.minimum, 6);
            for i in 1..5 {
                assert!(r.witness.has_edge(i, i + 1));
            }
            assert!(r.witness.verify(Eps::ZERO, 2, &HopMode::AllHops).ok);
        }
    }

    #[test]
    fn path_suffices_with_enough_hops() {
        for n in 2..=6 {
            let r = min_edges_bnb(&line(n), &cfg(0, 1, n as u64 - 1)).unwrap();
            assert_eq!(r.minimum, n as usize - 1);
            assert_eq!(r.witness, Spanner::path(line(n)).unwrap());
        }
    }

    #[test]
    fn guards_and_errors() {
        let c = cfg(0, 1, 2);
        assert!(matches!(min_edges_exhaustive(&line(8), &c), Err(OracleError::TooLarge { .. })));
        assert!(matches!(min_edges_bnb(&line(11), &c), Err(OracleError::TooLarge { .. })));
        let st = cfg(0, 1, 2).with_steiner(2, 6);
        assert!(matches!(min_edges_bnb(&line(4), &st), Err(OracleError::BadSteinerRange { .. })));
        assert_eq!(min_edges_bnb(&line(3), &cfg(0, 1, 0)), Err(OracleError::Infeasible));
        assert!(matches!(min_edges_bnb(&[1, 1], &c), Err(OracleError::Points(_))));
    }

    #[test]
    fn steiner_candidates() {
        // Far-apart terminals with a free middle point: the middle point is never cheaper at eps = 0.
        let c = cfg(0, 1, 2).with_steiner(1, 5);
        for search in [min_edges_exhaustive, min_edges_bnb] {
            let r = search(&[1, 3, 5], &c).unwrap();
            assert_eq!(r.minimum, 2);
            assert!(r.witness.verify(Eps::ZERO, 2, &HopMode::AllHops).ok);
        }
        // A Steiner hub at 3 serves four terminals in two hops with stretch 1 when k = 2.
        let c = cfg(0, 1, 2).with_steiner(1, 5);
        let e = min_edges_exhaustive(&[1, 2, 4, 5], &c).unwrap();
        let b = min_edges_bnb(&[1, 2, 4, 5], &c).unwrap();
        assert_eq!(e.minimum, b.minimum);
        assert_eq!(e.witness, b.witness);
        let plain = min_edges_bnb(&[1, 2, 4, 5], &cfg(0, 1, 2)).unwrap();
        assert!(b.minimum <= plain.minimum);
    }

    #[test]
    fn global_mode_counts_only_cross_cell_edges() {
        let grid = SparseLineMetric::sparse(1, 2, vec![1, 3, 5]).unwrap();
        let c = cfg(0, 1, 1).with_mode(HopMode::GlobalHops(grid.clone())).with_steiner(1, 6);
        let e = min_edges_exhaustive(&[1, 3, 5], &c).unwrap();
        let b = min_edges_bnb(&[1, 3, 5], &c).unwrap();
        assert_eq!(e.minimum, b.minimum);
        assert_eq!(e.witness, b.witness);
        assert!(b.witness.verify(Eps::ZERO, 1, &HopMode::GlobalHops(grid)).ok);
    }

    #[test]
    fn census_counts() {
        let s = Spanner::new(line(8), vec![], [(1, 2), (2, 3), (4, 5), (3, 7), (7, 8)]).unwrap();
        assert_eq!(cross_edges(&s, 4), 2);
        assert_eq!(cross_edges(&s, 5), 1);
        let c = block_census(&s, 8, 3);
        // blocks {1,2,3}, {4,5,6}, {7,8}: only (3,7) crosses
        assert_eq!(c.cross_edges, 1);
        // middle points 2..=6; only 3 is global
        assert_eq!((c.global_points, c.nonglobal_points, c.nonglobal_blocks), (1, 4, 2));
    }
}
