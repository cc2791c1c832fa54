use std::collections::BTreeSet;

use hopspanner::ackermann::{alpha_k, alpha_one, alpha_two_param, threshold_reached, Family};
use hopspanner::linemetric::{separation_window, SparseLineMetric};
use hopspanner::oracle::{block_census, cross_edges, min_edges_bnb, min_edges_exhaustive, SearchConfig};
use hopspanner::{Eps, HopMode, Spanner};
use proptest::prelude::*;

fn eps_strategy() -> impl Strategy<Value = Eps> {
    prop_oneof![Just((0, 1)), Just((1, 4)), Just((1, 2)), Just((1, 1)), Just((3, 1))]
        .prop_map(|(p, q)| Eps::new(p, q).unwrap())
}

/// Terminals `1..=n`, a few Steiner points on either side, and a random edge subset.
fn small_spanner() -> impl Strategy<Value = Spanner> {
    (2usize..=7, prop::collection::vec(-3i64..=11, 0..4)).prop_flat_map(|(n, extra)| {
        let terminals: Vec<i64> = (1..=n as i64).collect();
        let steiner: Vec<i64> = extra
            .into_iter()
            .filter(|p| !(1..=n as i64).contains(p))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let all: Vec<i64> = terminals.iter().chain(&steiner).copied().collect();
        let mut pairs = Vec::new();
        for (i, &a) in all.iter().enumerate() {
            for &b in &all[i + 1..] {
                pairs.push((a, b));
            }
        }
        let m = pairs.len();
        prop::collection::vec(any::<bool>(), m).prop_map(move |keep| {
            let edges = pairs.iter().zip(keep).filter(|(_, k)| *k).map(|(e, _)| *e);
            Spanner::new(terminals.clone(), steiner.clone(), edges).unwrap()
        })
    })
}

/// A grid with cells of width `t` over `[1, n t]` and one representative per cell.
fn grid_strategy() -> impl Strategy<Value = SparseLineMetric> {
    (1usize..=5, 1u64..=3).prop_flat_map(|(n, t)| {
        prop::collection::vec(0..t, n).prop_map(move |offs| {
            let reps = offs.iter().enumerate().map(|(i, &o)| 1 + (i as u64 * t + o) as i64).collect();
            SparseLineMetric::sparse(1, t, reps).unwrap()
        })
    })
}

fn grid_spanner() -> impl Strategy<Value = (SparseLineMetric, Spanner)> {
    grid_strategy().prop_flat_map(|grid| {
        let terminals = grid.points().to_vec();
        let steiner: Vec<i64> =
            (grid.l() - 2..=grid.r() + 2).filter(|p| terminals.binary_search(p).is_err()).collect();
        let all: Vec<i64> = terminals.iter().chain(&steiner).copied().collect();
        let mut pairs = Vec::new();
        for (i, &a) in all.iter().enumerate() {
            for &b in &all[i + 1..] {
                pairs.push((a, b));
            }
        }
        let m = pairs.len();
        prop::collection::vec(prop::bool::weighted(0.3), m).prop_map(move |keep| {
            let edges = pairs.iter().zip(keep).filter(|(_, k)| *k).map(|(e, _)| *e);
            (grid.clone(), Spanner::new(terminals.clone(), steiner.clone(), edges).unwrap())
        })
    })
}

fn terminal_pairs(s: &Spanner) -> Vec<(i64, i64)> {
    let t = s.terminals();
    let mut out = Vec::new();
    for (i, &a) in t.iter().enumerate() {
        for &b in &t[i + 1..] {
            out.push((a, b));
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn more_hops_or_slack_never_hurt(s in small_spanner(), e1 in eps_strategy(), e2 in eps_strategy(), k in 1u64..5) {
        let (lo, hi) = if e1.ratio() <= e2.ratio() { (e1, e2) } else { (e2, e1) };
        for (a, b) in terminal_pairs(&s) {
            let base = s.stretch_path_exists(a, b, lo, k, &HopMode::AllHops).unwrap();
            if base {
                prop_assert!(s.stretch_path_exists(a, b, lo, k + 1, &HopMode::AllHops).unwrap());
                prop_assert!(s.stretch_path_exists(a, b, hi, k, &HopMode::AllHops).unwrap());
            }
        }
    }

    #[test]
    fn layered_search_agrees_with_state_dijkstra(s in small_spanner(), eps in eps_strategy(), k in 1u64..5) {
        for (a, b) in terminal_pairs(&s) {
            let found = s.stretch_path_exists(a, b, eps, k, &HopMode::AllHops).unwrap();
            let best = s.best_path(a, b, k, &HopMode::AllHops).unwrap();
            prop_assert_eq!(found, best.as_ref().is_some_and(|p| eps.admits(p.weight, a.abs_diff(b))));
            if let Some(p) = best {
                prop_assert_eq!(s.walk_weight(&p.vertices), Some(p.weight));
                prop_assert!(p.counted_hops <= k);
                prop_assert_eq!(p.vertices.len() as u64 - 1, p.counted_hops);
                prop_assert_eq!((p.vertices[0], *p.vertices.last().unwrap()), (a, b));
            }
        }
    }

    #[test]
    fn all_hops_success_implies_global_hops_success((grid, s) in grid_spanner(), eps in eps_strategy(), k in 1u64..4) {
        let global = HopMode::GlobalHops(grid.clone());
        for (a, b) in terminal_pairs(&s) {
            if s.stretch_path_exists(a, b, eps, k, &HopMode::AllHops).unwrap() {
                prop_assert!(s.stretch_path_exists(a, b, eps, k, &global).unwrap());
            }
            let found = s.stretch_path_exists(a, b, eps, k, &global).unwrap();
            let best = s.best_path(a, b, k, &global).unwrap();
            prop_assert_eq!(found, best.as_ref().is_some_and(|p| eps.admits(p.weight, a.abs_diff(b))));
            if let Some(p) = best {
                let counted = p.vertices.windows(2).filter(|w| grid.classifies_global(w[0], w[1])).count();
                prop_assert_eq!(counted as u64, p.counted_hops);
            }
        }
    }

    #[test]
    fn verify_matches_pairwise_checks(s in small_spanner(), eps in eps_strategy(), k in 1u64..4) {
        let report = s.verify(eps, k, &HopMode::AllHops);
        let first_bad = terminal_pairs(&s)
            .into_iter()
            .find(|&(a, b)| !s.stretch_path_exists(a, b, eps, k, &HopMode::AllHops).unwrap());
        prop_assert_eq!(report.ok, first_bad.is_none());
        prop_assert_eq!(report.witness.map(|w| (w.a, w.b)), first_bad);
    }

    #[test]
    fn json_round_trip_is_exact(s in small_spanner()) {
        let text = serde_json::to_string(&s).unwrap();
        let back: Spanner = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(serde_json::to_string(&back).unwrap(), text);
        prop_assert_eq!(back, s);
    }

    /// Window pairs never profit from vertices outside the range.
    #[test]
    fn stretch_paths_between_window_points_stay_inside(
        n in 2i64..=40,
        eps in prop_oneof![Just(Eps::ZERO), Just(Eps::new(1, 4).unwrap()), Just(Eps::new(1, 2).unwrap())],
        k in 1u64..=4,
        seed in prop::collection::vec((0i64..50, 0i64..50), 0..60),
    ) {
        let terminals: Vec<i64> = (1..=n).collect();
        let steiner: Vec<i64> = (-4..=0).chain(n + 1..=n + 5).collect();
        let all: Vec<i64> = (-4..=n + 5).collect();
        let edges = seed.into_iter().filter_map(|(x, y)| {
            let (a, b) = (all[x as usize % all.len()], all[y as usize % all.len()]);
            (a != b).then_some((a, b))
        });
        let s = Spanner::new(terminals, steiner, edges).unwrap();
        let w = separation_window(1, n, eps).unwrap();
        for a in w.i..=w.j {
            for b in a + 1..=w.j {
                if let Some(p) = s.best_path(a, b, k, &HopMode::AllHops).unwrap() {
                    if eps.admits(p.weight, a.abs_diff(b)) {
                        prop_assert!(p.vertices.iter().all(|&v| (1..=n).contains(&v)), "{:?}", p.vertices);
                    }
                }
            }
        }
    }

    #[test]
    fn oracle_searches_agree_on_irregular_points(
        pts in prop::collection::btree_set(-20i64..20, 2..=6),
        eps in prop_oneof![Just(Eps::ZERO), Just(Eps::new(1, 2).unwrap()), Just(Eps::new(2, 1).unwrap())],
        k in 1u64..=3,
    ) {
        let pts: Vec<i64> = pts.into_iter().collect();
        let cfg = SearchConfig::new(eps, k);
        let ex = min_edges_exhaustive(&pts, &cfg).unwrap();
        let bb = min_edges_bnb(&pts, &cfg).unwrap();
        prop_assert_eq!(ex.minimum, bb.minimum);
        prop_assert_eq!(&ex.witness, &bb.witness);
        prop_assert!(ex.minimum >= pts.len() - 1);
        prop_assert!(bb.witness.verify(eps, k, &HopMode::AllHops).ok);
    }

    #[test]
    fn alpha_is_monotone_in_n(k in 0u32..10, n in 0u64..1 << 40, d in 0u64..1 << 20) {
        prop_assert!(alpha_k(k, n) <= alpha_k(k, n + d));
    }

    #[test]
    fn alpha_is_non_increasing_along_each_parity(k in 0u32..12, n in 4u64..1 << 40) {
        prop_assert!(alpha_k(k + 2, n) <= alpha_k(k, n));
        if k % 2 == 0 {
            prop_assert!(alpha_k(k + 1, n) <= alpha_k(k, n));
        }
    }

    #[test]
    fn alpha_is_the_least_threshold(k in 0u32..8, n in 1u64..1 << 40) {
        let (fam, level) = Family::for_alpha(k);
        let s = alpha_k(k, n);
        prop_assert!(threshold_reached(fam, level, s, n));
        if s > 0 {
            prop_assert!(!threshold_reached(fam, level, s - 1, n));
        }
    }

    #[test]
    fn two_parameter_inverse_is_at_least_one_and_monotone(m in 1u64..1 << 40, n in 1u64..1 << 40, d in 0u64..1 << 30) {
        let a = alpha_two_param(m, n).unwrap();
        prop_assert!(a >= 1);
        prop_assert!(alpha_two_param(m + d, n).unwrap() <= a);
    }

    #[test]
    fn alpha_one_brackets(n in 0u64..u64::MAX) {
        let s = alpha_one(n);
        prop_assert!(threshold_reached(Family::A, s as u32, s, n));
        if s > 0 {
            let t = s - 1;
            prop_assert!(!threshold_reached(Family::A, t as u32, t, n));
        }
    }
}

fn line(n: i64) -> Vec<i64> {
    (1..=n).collect()
}

#[test]
fn oracle_is_monotone_in_hops_and_slack() {
    for n in 2..=7 {
        let mut prev_k: Option<usize> = None;
        for k in 1..=4u64 {
            let zero = min_edges_bnb(&line(n), &SearchConfig::new(Eps::ZERO, k)).unwrap().minimum;
            let half = min_edges_bnb(&line(n), &SearchConfig::new(Eps::new(1, 2).unwrap(), k)).unwrap().minimum;
            assert!(half <= zero, "n = {n}, k = {k}");
            assert!(zero >= n as usize - 1);
            if let Some(p) = prev_k {
                assert!(zero <= p, "n = {n}, k = {k}");
            }
            prev_k = Some(zero);
        }
    }
}

/// Points of `[n/4, floor(n/2)]` and `[floor(n/2) + 1, 3n/4]`.
fn halves(n: i64) -> (usize, usize) {
    let l = (1..=n).filter(|&p| 4 * p >= n && p <= n / 2).count();
    let r = (1..=n).filter(|&p| p > n / 2 && 4 * p <= 3 * n).count();
    (l, r)
}

#[test]
fn two_hop_witnesses_have_enough_cross_edges() {
    for n in 8..=10 {
        for eps in [Eps::ZERO, Eps::new(1, 2).unwrap()] {
            let res = min_edges_bnb(&line(n), &SearchConfig::new(eps, 2)).unwrap();
            let crossing = cross_edges(&res.witness, n / 2);
            let (l, r) = halves(n);
            assert!(crossing >= l.min(r), "n = {n}, eps = {eps}: {crossing} < min({l}, {r})");
            let floor_bound = n / 4 - 2;
            assert!(crossing as i64 >= floor_bound);
        }
    }
}

#[test]
fn block_census_never_contradicts_the_counting_claims() {
    for n in 6..=10i64 {
        let block = (n as f64).sqrt().floor() as i64;
        for eps in [Eps::ZERO, Eps::new(1, 2).unwrap()] {
            for k in [2u64, 3] {
                let res = min_edges_bnb(&line(n), &SearchConfig::new(eps, k)).unwrap();
                let c = block_census(&res.witness, n, block);
                assert!(2 * c.cross_edges >= c.global_points, "n = {n}: {c:?}");
                let pairs = c.nonglobal_blocks * c.nonglobal_blocks.saturating_sub(1) / 2;
                assert!(c.cross_edges >= pairs, "n = {n}, k = {k}: {c:?}");
            }
        }
    }
}

#[test]
fn grid_edges_are_counted_per_cell() {
    let g = SparseLineMetric::sparse(1, 2, vec![1, 3, 5, 7]).unwrap();
    let s = Spanner::new(vec![1, 3, 5, 7], vec![2, 4, 8], [(2, 3), (3, 4), (1, 8)]).unwrap();
    assert_eq!(s.count_global_edges(&g), 2);
    let u = SparseLineMetric::uniform(6).unwrap();
    let c = Spanner::complete(line(6)).unwrap();
    assert_eq!(c.count_global_edges(&u), c.edge_count());
}
