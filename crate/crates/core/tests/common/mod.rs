//! Independent oracles shared by the integration and acceptance tests. They
//! only use `distance`, `neighbors` and explicit enumeration, never the
//! level machinery under test.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use snlab::local_graph::LocalGraph;
use snlab::space::distance_levels;
use snlab::zoo::{random_regular_graph, BoxFamily, FiniteMetric, SpaceSpec, WeightRule, ZooSpace};
use snlab::{with_space, Dist, MetricSpace, PointSet};

/// `d(x, A)` by direct minimum.
pub fn dist_to_set<S: MetricSpace>(s: &S, x: &S::Point, a: &[S::Point]) -> Dist {
    a.iter().map(|y| s.distance(x, y)).min().expect("nonempty set")
}

/// `dN_k(A)` in a finite metric by enumerating complete chains explicitly:
/// every chain `0 = t_0 < ... < t_j` of values in `P = {d(x, A)}`, `j <= k`,
/// with no value of `P` strictly between consecutive entries.
pub fn chain_neighborhood(m: &FiniteMetric, a: &[usize], k: usize) -> BTreeSet<usize> {
    let d: Vec<Dist> = (0..m.len()).map(|x| dist_to_set(m, &x, a)).collect();
    let p: BTreeSet<Dist> = d.iter().cloned().collect();
    let complete_step = |s: &Dist, t: &Dist| s < t && !p.iter().any(|u| s < u && u < t);
    let mut reachable = BTreeSet::new();
    let mut stack = vec![vec![Dist::zero()]];
    while let Some(chain) = stack.pop() {
        let last = chain.last().unwrap().clone();
        reachable.insert(last.clone());
        if chain.len() > k {
            continue;
        }
        for t in &p {
            if complete_step(&last, t) {
                let mut next = chain.clone();
                next.push(t.clone());
                stack.push(next);
            }
        }
    }
    (0..m.len()).filter(|&x| reachable.contains(&d[x])).collect()
}

/// Multi-source BFS through `neighbors`, up to `k` hops: `{x : d_hop(x, A) <= k}`.
pub fn hop_ball<G: LocalGraph>(g: &G, a: &[G::Point], k: usize) -> BTreeSet<G::Point> {
    let mut seen: BTreeSet<G::Point> = a.iter().cloned().collect();
    let mut queue: VecDeque<(G::Point, usize)> = a.iter().map(|p| (p.clone(), 0)).collect();
    while let Some((v, h)) = queue.pop_front() {
        if h == k {
            continue;
        }
        for (w, _) in g.neighbors(&v) {
            if seen.insert(w.clone()) {
                queue.push_back((w, h + 1));
            }
        }
    }
    seen
}

/// The first `n` points around the base point, nearest first.
pub fn window<S: MetricSpace>(s: &S, n: usize) -> Vec<S::Point> {
    let base = PointSet::singleton(s.base_point());
    let mut m = 1;
    loop {
        let levels = distance_levels(s, &base, m).expect("levels");
        let pts: Vec<S::Point> = levels.members.iter().flat_map(|l| l.iter().cloned()).take(n).collect();
        if pts.len() == n || levels.exhausted || m > n {
            return pts;
        }
        m += 1;
    }
}

/// A center adjacent to three distinct arms with at most one edge among them.
pub fn is_tripod<G: LocalGraph>(g: &G, center: &G::Point, arms: &[G::Point; 3]) -> bool {
    let adj = |u: &G::Point, v: &G::Point| g.neighbors(u).iter().any(|(w, _)| w == v);
    let distinct = arms[0] != arms[1] && arms[1] != arms[2] && arms[0] != arms[2];
    let joined = [(0, 1), (0, 2), (1, 2)].iter().filter(|&&(i, j)| adj(&arms[i], &arms[j])).count();
    distinct && arms.iter().all(|a| adj(center, a)) && joined <= 1
}

fn spec_space(spec: SpaceSpec) -> ZooSpace {
    snlab::zoo::make_space(&spec).expect("zoo space")
}

/// One instance of every zoo kind, small enough for exhaustive work.
pub fn zoo() -> Vec<ZooSpace> {
    let one = || [Dist::one(), Dist::one(), Dist::one()];
    let mut out = vec![
        spec_space(SpaceSpec::Harmonic),
        spec_space(SpaceSpec::IntegerLattice { dim: 1 }),
        spec_space(SpaceSpec::IntegerLattice { dim: 2 }),
        spec_space(SpaceSpec::FreeGroup { rank: 2 }),
        spec_space(SpaceSpec::RegularTree { degree: 3 }),
        spec_space(SpaceSpec::TreePlusRay { degree: 3 }),
        spec_space(SpaceSpec::WeightedTree { arity: 2, rule: WeightRule::Geometric { base: Dist::from_int(10) } }),
        spec_space(SpaceSpec::WeightedTree { arity: 3, rule: WeightRule::Unit }),
        spec_space(SpaceSpec::BoxSpace { family: BoxFamily::Cycles, sizes: vec![3, 4, 5] }),
        spec_space(SpaceSpec::BoxSpace {
            family: BoxFamily::RandomRegular { degree: 3, seed: 1 },
            sizes: vec![4, 6, 8],
        }),
        spec_space(SpaceSpec::Tripod { weights: one() }),
        spec_space(SpaceSpec::SemiTripod { weights: one(), arm_edge: Dist::one() }),
    ];
    let g = random_regular_graph(12, 3, 5).expect("graph");
    out.push(ZooSpace::Graph(snlab::metric_graph::induced_metric(&g).expect("metric")));
    out
}

/// Every zoo space truncated to at most `n` points around its base point.
pub fn truncations(n: usize) -> Vec<(String, FiniteMetric)> {
    zoo()
        .iter()
        .map(|z| {
            with_space!(z, s => {
                let pts = window(s, n);
                (s.name(), FiniteMetric::restrict(s, &pts).expect("restriction"))
            })
        })
        .collect()
}

/// Subset of `points` selected by the bits of `mask`.
pub fn subset<P: Clone>(points: &[P], mask: u64) -> Vec<P> {
    points.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, p)| p.clone()).collect()
}

/// Histogram helper for mismatch reports.
pub fn count_by<K: Ord>(items: impl IntoIterator<Item = K>) -> BTreeMap<K, usize> {
    let mut m = BTreeMap::new();
    for k in items {
        *m.entry(k).or_insert(0) += 1;
    }
    m
}
