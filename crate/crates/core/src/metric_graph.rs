//! Weighted graphs whose edge labels induce a metric that is additive exactly
//! along hop-shortest paths, their induced metric, and the tripod finder.
//!
//! The two compatibility conditions are
//!
//! 1. all hop-shortest paths between two vertices have the same weight, and
//! 2. every path with more hops than a hop-shortest path is strictly heavier.
//!
//! [`validate_metric_graph`] decides both exactly in polynomial time. Given
//! condition 1, a path with more hops and no more weight exists iff some
//! minimum-weight path has more hops than the hop distance (removing cycles
//! from a violating walk only lowers its weight), so condition 2 reduces to a
//! longest-hop search on the tight-edge DAG of Dijkstra's algorithm.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::sync::Arc;

use serde::Serialize;

use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::local_graph::{adjacent, bounded_search, hop_neighborhood, hop_spheres, LocalGraph};
use crate::space::{discrete_neighborhood, MetricSpace, NeighborhoodResult, PointSet};

/// A finite simple connected graph with positive rational edge weights.
#[derive(Clone, Debug)]
pub struct WeightedGraph {
    names: Vec<String>,
    index: HashMap<String, usize>,
    adj: Vec<Vec<(usize, Dist)>>,
    edges: Vec<(usize, usize, Dist)>,
}

impl WeightedGraph {
    /// Builds and checks a graph: no loops, no multi-edges, positive weights,
    /// connected.
    pub fn new(vertices: Vec<String>, edges: Vec<(String, String, Dist)>) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if index.insert(v.clone(), i).is_some() {
                return Err(Error::Graph(format!("duplicate vertex `{v}`")));
            }
        }
        let mut indexed = Vec::with_capacity(edges.len());
        for (u, v, w) in edges {
            let iu = *index.get(&u).ok_or_else(|| Error::Graph(format!("unknown vertex `{u}`")))?;
            let iv = *index.get(&v).ok_or_else(|| Error::Graph(format!("unknown vertex `{v}`")))?;
            indexed.push((iu, iv, w));
        }
        Self::from_indexed(vertices, indexed)
    }

    pub fn from_indexed(names: Vec<String>, edges: Vec<(usize, usize, Dist)>) -> Result<Self> {
        let n = names.len();
        if n == 0 {
            return Err(Error::Graph("graph has no vertices".into()));
        }
        let index: HashMap<String, usize> = names.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        if index.len() != n {
            return Err(Error::Graph("duplicate vertex names".into()));
        }
        let mut adj: Vec<Vec<(usize, Dist)>> = vec![Vec::new(); n];
        let mut seen = BTreeSet::new();
        let mut canonical = Vec::with_capacity(edges.len());
        for (u, v, w) in edges {
            if u >= n || v >= n {
                return Err(Error::Graph(format!("edge ({u},{v}) references a missing vertex")));
            }
            if u == v {
                return Err(Error::Graph(format!("loop at `{}`", names[u])));
            }
            if !w.is_positive() {
                return Err(Error::Graph(format!("nonpositive weight {w} on edge {}-{}", names[u], names[v])));
            }
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                return Err(Error::Graph(format!("multiple edges between `{}` and `{}`", names[u], names[v])));
            }
            adj[u].push((v, w.clone()));
            adj[v].push((u, w.clone()));
            canonical.push((key.0, key.1, w));
        }
        for a in &mut adj {
            a.sort_by_key(|(v, _)| *v);
        }
        canonical.sort_by_key(|(u, v, _)| (*u, *v));
        let g = WeightedGraph { names, index, adj, edges: canonical };
        if g.hop_distances(0).iter().any(|h| h.is_none()) {
            return Err(Error::Graph("graph is disconnected".into()));
        }
        Ok(g)
    }

    /// Unit-weight graph on vertices `0..n` named by their index.
    pub fn unit(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let names = (0..n).map(|i| i.to_string()).collect();
        Self::from_indexed(names, edges.iter().map(|&(u, v)| (u, v, Dist::one())).collect())
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn vertex(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, Dist)] {
        &self.adj[v]
    }

    pub fn edges(&self) -> &[(usize, usize, Dist)] {
        &self.edges
    }

    pub fn weight(&self, u: usize, v: usize) -> Option<&Dist> {
        self.adj[u].iter().find(|(w, _)| *w == v).map(|(_, d)| d)
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn is_unit_weight(&self) -> bool {
        self.edges.iter().all(|(_, _, w)| *w == Dist::one())
    }

    pub fn is_tree(&self) -> bool {
        self.edges.len() + 1 == self.len()
    }

    /// Hop distances from `source`; `None` for unreachable vertices.
    pub fn hop_distances(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.len()];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].expect("queued vertices are reached");
            for (v, _) in &self.adj[u] {
                if dist[*v].is_none() {
                    dist[*v] = Some(du + 1);
                    queue.push_back(*v);
                }
            }
        }
        dist
    }

    pub fn hop_diameter(&self) -> usize {
        (0..self.len()).map(|s| self.hop_distances(s).into_iter().flatten().max().unwrap_or(0)).max().unwrap_or(0)
    }

    pub fn path_weight(&self, path: &[usize]) -> Option<Dist> {
        path.windows(2).map(|e| self.weight(e[0], e[1]).cloned()).sum()
    }
}

/// Outcome of one compatibility condition.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct ConditionOutcome {
    pub holds: bool,
    pub violation: Option<Violation>,
}

/// Two concrete paths between the same endpoints exhibiting a violation.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Violation {
    pub from: String,
    pub to: String,
    pub first_path: Vec<String>,
    pub first_weight: Dist,
    pub second_path: Vec<String>,
    pub second_weight: Dist,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct CompatibilityReport {
    /// Equal weights along all hop-shortest paths.
    pub condition1: ConditionOutcome,
    /// Paths with more hops are strictly heavier.
    pub condition2: ConditionOutcome,
    /// Longest simple path length covered by the check; the check is exact, so
    /// this is the number of vertices minus one.
    pub hop_budget: usize,
}

impl CompatibilityReport {
    pub fn is_valid(&self) -> bool {
        self.condition1.holds && self.condition2.holds
    }
}

struct SourceScan {
    hops: Vec<usize>,
    min_w: Vec<Dist>,
    max_w: Vec<Dist>,
    min_pred: Vec<Option<usize>>,
    max_pred: Vec<Option<usize>>,
    dijkstra: Vec<Dist>,
    max_tight_hops: Vec<usize>,
    tight_pred: Vec<Option<usize>>,
}

fn scan_source(g: &WeightedGraph, x: usize) -> SourceScan {
    let n = g.len();
    let hops: Vec<usize> = g.hop_distances(x).into_iter().map(|h| h.expect("connected")).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (hops[v], v));

    let mut min_w = vec![Dist::zero(); n];
    let mut max_w = vec![Dist::zero(); n];
    let mut min_pred = vec![None; n];
    let mut max_pred = vec![None; n];
    for &w in order.iter().skip(1) {
        let mut lo: Option<(Dist, usize)> = None;
        let mut hi: Option<(Dist, usize)> = None;
        for (u, wt) in g.neighbors(w) {
            if hops[*u] + 1 != hops[w] {
                continue;
            }
            let a = &min_w[*u] + wt;
            let b = &max_w[*u] + wt;
            if lo.as_ref().is_none_or(|(d, _)| a < *d) {
                lo = Some((a, *u));
            }
            if hi.as_ref().is_none_or(|(d, _)| b > *d) {
                hi = Some((b, *u));
            }
        }
        let (a, pa) = lo.expect("non-source vertex has a BFS predecessor");
        let (b, pb) = hi.expect("non-source vertex has a BFS predecessor");
        min_w[w] = a;
        max_w[w] = b;
        min_pred[w] = Some(pa);
        max_pred[w] = Some(pb);
    }

    // Dijkstra over the full weighted graph
    let mut dijkstra: Vec<Option<Dist>> = vec![None; n];
    let mut done = vec![false; n];
    dijkstra[x] = Some(Dist::zero());
    let mut heap = std::collections::BinaryHeap::new();
    heap.push(std::cmp::Reverse((Dist::zero(), x)));
    let mut settle_order = Vec::with_capacity(n);
    while let Some(std::cmp::Reverse((d, u))) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        settle_order.push(u);
        for (v, wt) in g.neighbors(u) {
            let nd = &d + wt;
            if dijkstra[*v].as_ref().is_none_or(|old| nd < *old) {
                dijkstra[*v] = Some(nd.clone());
                heap.push(std::cmp::Reverse((nd, *v)));
            }
        }
    }
    let dijkstra: Vec<Dist> = dijkstra.into_iter().map(|d| d.expect("connected")).collect();

    // longest hop count along tight edges, in settle order
    let mut max_tight_hops = vec![0usize; n];
    let mut tight_pred = vec![None; n];
    for &v in settle_order.iter().skip(1) {
        let mut best: Option<(usize, usize)> = None;
        for (u, wt) in g.neighbors(v) {
            if &dijkstra[*u] + wt == dijkstra[v] {
                let h = max_tight_hops[*u] + 1;
                if best.is_none_or(|(bh, bu)| h > bh || (h == bh && *u < bu)) {
                    best = Some((h, *u));
                }
            }
        }
        let (h, u) = best.expect("settled vertex has a tight predecessor");
        max_tight_hops[v] = h;
        tight_pred[v] = Some(u);
    }

    SourceScan { hops, min_w, max_w, min_pred, max_pred, dijkstra, max_tight_hops, tight_pred }
}

fn trace(pred: &[Option<usize>], mut v: usize) -> Vec<usize> {
    let mut path = vec![v];
    while let Some(u) = pred[v] {
        path.push(u);
        v = u;
    }
    path.reverse();
    path
}

fn violation(g: &WeightedGraph, first: Vec<usize>, second: Vec<usize>) -> Violation {
    let names = |p: &[usize]| p.iter().map(|&v| g.name(v).to_string()).collect::<Vec<_>>();
    Violation {
        from: g.name(first[0]).to_string(),
        to: g.name(*first.last().expect("nonempty path")).to_string(),
        first_weight: g.path_weight(&first).expect("path follows edges"),
        second_weight: g.path_weight(&second).expect("path follows edges"),
        first_path: names(&first),
        second_path: names(&second),
    }
}

fn pair_check(g: &WeightedGraph, scan: &SourceScan, y: usize) -> (Option<Violation>, Option<Violation>) {
    let c1 = (scan.min_w[y] != scan.max_w[y]).then(|| violation(g, trace(&scan.min_pred, y), trace(&scan.max_pred, y)));
    let c2 = (scan.dijkstra[y] < scan.min_w[y] || scan.max_tight_hops[y] > scan.hops[y])
        .then(|| violation(g, trace(&scan.min_pred, y), trace(&scan.tight_pred, y)));
    (c1, c2)
}

/// Violations of the two conditions for the ordered pair `(x, y)`.
pub fn pair_violations(g: &WeightedGraph, x: usize, y: usize) -> (Option<Violation>, Option<Violation>) {
    pair_check(g, &scan_source(g, x), y)
}

/// Exact check of both compatibility conditions. The first violating pair in
/// vertex order is reported for each condition.
pub fn validate_metric_graph(g: &WeightedGraph) -> CompatibilityReport {
    let hop_budget = g.len().saturating_sub(1);
    let ok = || ConditionOutcome { holds: true, violation: None };
    // unit weights: every path's weight is its hop count
    if g.is_unit_weight() {
        return CompatibilityReport { condition1: ok(), condition2: ok(), hop_budget };
    }
    let mut c1: Option<Violation> = None;
    let mut c2: Option<Violation> = None;
    for x in 0..g.len() {
        let scan = scan_source(g, x);
        for y in 0..g.len() {
            if c1.is_some() && c2.is_some() {
                break;
            }
            let (a, b) = pair_check(g, &scan, y);
            if c1.is_none() {
                c1 = a;
            }
            if c2.is_none() {
                c2 = b;
            }
        }
    }
    let outcome = |v: Option<Violation>| ConditionOutcome { holds: v.is_none(), violation: v };
    CompatibilityReport { condition1: outcome(c1), condition2: outcome(c2), hop_budget }
}

/// The metric induced by a validated weighted graph; points are vertex indices.
#[derive(Clone, Debug)]
pub struct GraphMetric {
    graph: Arc<WeightedGraph>,
    name: String,
    unit: bool,
    table: Option<Arc<Vec<Vec<Dist>>>>,
}

const TABLE_LIMIT: usize = 600;

/// Builds the induced metric, refusing graphs that fail either condition.
pub fn induced_metric(graph: &WeightedGraph) -> Result<GraphMetric> {
    let report = validate_metric_graph(graph);
    if !report.is_valid() {
        let which = if report.condition1.holds { "2" } else { "1" };
        return Err(Error::Graph(format!("compatibility condition {which} fails; refusing to build the metric")));
    }
    Ok(GraphMetric::trusted(graph.clone(), "graph"))
}

impl GraphMetric {
    /// Wraps a graph already known to satisfy both conditions.
    pub(crate) fn trusted(graph: WeightedGraph, name: &str) -> Self {
        let unit = graph.is_unit_weight();
        let n = graph.len();
        let mut metric = GraphMetric { graph: Arc::new(graph), name: name.to_string(), unit, table: None };
        if n <= TABLE_LIMIT {
            let rows = (0..n).map(|s| metric.single_source(s)).collect();
            metric.table = Some(Arc::new(rows));
        }
        metric
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    fn single_source(&self, s: usize) -> Vec<Dist> {
        bounded_search(self, &[s], &self.total_weight(), usize::MAX)
            .expect("uncapped search")
            .into_iter()
            .map(|(_, d)| d)
            .collect()
    }

    fn total_weight(&self) -> Dist {
        self.graph.edges().iter().map(|(_, _, w)| w.clone()).sum()
    }
}

impl MetricSpace for GraphMetric {
    type Point = usize;

    fn name(&self) -> String {
        self.name.clone()
    }

    fn distance(&self, x: &usize, y: &usize) -> Dist {
        if let Some(t) = &self.table {
            return t[*x][*y].clone();
        }
        bounded_search(self, &[*x], &self.total_weight(), usize::MAX)
            .expect("uncapped search")
            .into_iter()
            .find(|(v, _)| v == y)
            .map(|(_, d)| d)
            .expect("connected graph")
    }

    fn neighborhood(&self, seeds: &[usize], radius: &Dist, cap: usize) -> Result<Vec<(usize, Dist)>> {
        bounded_search(self, seeds, radius, cap)
    }

    fn base_point(&self) -> usize {
        0
    }

    fn label(&self, p: &usize) -> String {
        self.graph.name(*p).to_string()
    }

    fn parse_point(&self, s: &str) -> Option<usize> {
        self.graph.vertex(s)
    }

    fn cardinality(&self) -> Option<usize> {
        Some(self.graph.len())
    }

    fn level_radius_hint(&self, m: usize) -> Dist {
        if self.unit {
            Dist::from_u64(m.max(1) as u64)
        } else {
            Dist::one()
        }
    }
}

impl LocalGraph for GraphMetric {
    fn neighbors(&self, v: &usize) -> Vec<(usize, Dist)> {
        self.graph.neighbors(*v).to_vec()
    }

    fn unit_weights(&self) -> bool {
        self.unit
    }
}

#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum TripodKind {
    Tripod,
    SemiTripod,
}

/// A vertex with three neighbors carrying at most one edge among them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TripodWitness<P> {
    pub center: P,
    pub arms: [P; 3],
    pub kind: TripodKind,
    pub connections_among_arms: usize,
    /// Hop sphere of the root containing the center.
    pub sphere: usize,
}

#[derive(Clone, Debug)]
pub struct TripodSearch<P> {
    pub witness: Option<TripodWitness<P>>,
    pub spheres_inspected: usize,
    pub radius_budget: usize,
}

/// Checks the root's own neighbors first, then grows hop spheres `S_n` around
/// `root` and returns the first center `v` in some `S_n` (`n >= 1`) with two
/// neighbors in `S_{n+1}` and one in `S_{n-1}`.
/// Outer neighbors cannot touch the inner one, so at most the two outer arms
/// are joined. Smallest `n` first, then vertex order.
pub fn find_tripod<G: LocalGraph>(graph: &G, root: &G::Point, radius_budget: usize) -> Result<TripodSearch<G::Point>> {
    let spheres = hop_spheres(graph, root, radius_budget + 1)?;
    let mut inspected = 1;
    // the root itself: any three neighbors with at most one edge among them
    let mut first: Vec<G::Point> = graph.neighbors(root).into_iter().map(|(w, _)| w).collect();
    first.sort();
    first.dedup();
    for (i, a) in first.iter().enumerate() {
        for (j, b) in first.iter().enumerate().skip(i + 1) {
            for c in first.iter().skip(j + 1) {
                let joined = [(a, b), (a, c), (b, c)].iter().filter(|(x, y)| adjacent(graph, x, y)).count();
                if joined <= 1 {
                    let kind = if joined == 0 { TripodKind::Tripod } else { TripodKind::SemiTripod };
                    return Ok(TripodSearch {
                        witness: Some(TripodWitness {
                            center: root.clone(),
                            arms: [a.clone(), b.clone(), c.clone()],
                            kind,
                            connections_among_arms: joined,
                            sphere: 0,
                        }),
                        spheres_inspected: inspected,
                        radius_budget,
                    });
                }
            }
        }
    }
    for n in 1..=radius_budget {
        inspected += 1;
        let outer: BTreeSet<&G::Point> = spheres[n + 1].iter().collect();
        let inner: BTreeSet<&G::Point> = spheres[n - 1].iter().collect();
        for v in &spheres[n] {
            let mut out = Vec::new();
            let mut inn = Vec::new();
            for (w, _) in graph.neighbors(v) {
                if outer.contains(&w) {
                    out.push(w);
                } else if inner.contains(&w) {
                    inn.push(w);
                }
            }
            out.sort();
            out.dedup();
            inn.sort();
            if out.len() >= 2 && !inn.is_empty() {
                let arms = [out[0].clone(), out[1].clone(), inn[0].clone()];
                let joined = usize::from(adjacent(graph, &arms[0], &arms[1]));
                let kind = if joined == 0 { TripodKind::Tripod } else { TripodKind::SemiTripod };
                return Ok(TripodSearch {
                    witness: Some(TripodWitness {
                        center: v.clone(),
                        arms,
                        kind,
                        connections_among_arms: joined,
                        sphere: n,
                    }),
                    spheres_inspected: inspected,
                    radius_budget,
                });
            }
        }
    }
    Ok(TripodSearch { witness: None, spheres_inspected: inspected, radius_budget })
}

/// `cB_k(A)` in the unlabeled graph next to `dB_k(A)` in the weighted metric.
#[derive(Clone, Debug)]
pub struct GraphBoundary<P: Ord> {
    pub k: usize,
    pub hop_boundary: PointSet<P>,
    pub discrete: NeighborhoodResult<P>,
}

impl<P: Ord + Clone> GraphBoundary<P> {
    /// `dB_k(A) ⊆ cB_k(A)`.
    pub fn contained(&self) -> bool {
        self.discrete.db.is_subset(&self.hop_boundary)
    }
}

pub fn graph_boundary<G: LocalGraph>(graph: &G, a: &PointSet<G::Point>, k: usize) -> Result<GraphBoundary<G::Point>> {
    crate::space::require_nonempty(a)?;
    let hop_boundary = hop_neighborhood(graph, a, k)?.difference(a);
    let discrete = discrete_neighborhood(graph, a, k)?;
    Ok(GraphBoundary { k, hop_boundary, discrete })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, edges: &[(usize, usize, i64)]) -> WeightedGraph {
        WeightedGraph::from_indexed(
            (0..n).map(|i| format!("v{i}")).collect(),
            edges.iter().map(|&(u, v, w)| (u, v, Dist::from_int(w))).collect(),
        )
        .unwrap()
    }

    #[test]
    fn rejects_bad_graphs() {
        let names = || vec!["a".to_string(), "b".to_string(), "c".to_string()];
        let e = |u: usize, v: usize, w: i64| (u, v, Dist::from_int(w));
        assert!(WeightedGraph::from_indexed(names(), vec![e(0, 0, 1), e(1, 2, 1)]).is_err());
        assert!(WeightedGraph::from_indexed(names(), vec![e(0, 1, 1), e(1, 0, 2), e(1, 2, 1)]).is_err());
        assert!(WeightedGraph::from_indexed(names(), vec![e(0, 1, 0), e(1, 2, 1)]).is_err());
        assert!(WeightedGraph::from_indexed(names(), vec![e(0, 1, 1)]).is_err());
        assert!(WeightedGraph::from_indexed(names(), vec![e(0, 1, 1), e(1, 2, 1)]).is_ok());
    }

    #[test]
    fn four_cycle_breaks_condition_one() {
        let g = graph(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 10)]);
        let r = validate_metric_graph(&g);
        assert!(!r.condition1.holds);
        let v = r.condition1.violation.unwrap();
        assert_eq!((v.from.as_str(), v.to.as_str()), ("v0", "v2"));
        assert_eq!(v.first_weight, Dist::from_int(2));
        assert_eq!(v.second_weight, Dist::from_int(11));
        assert_eq!(v.first_path.len(), 3);
        assert_eq!(v.second_path.len(), 3);
    }

    #[test]
    fn triangle_breaks_condition_two() {
        let g = graph(3, &[(0, 1, 1), (1, 2, 1), (0, 2, 3)]);
        let r = validate_metric_graph(&g);
        assert!(r.condition1.holds);
        let v = r.condition2.violation.unwrap();
        assert_eq!(v.first_path, vec!["v0", "v2"]);
        assert_eq!(v.first_weight, Dist::from_int(3));
        assert_eq!(v.second_path, vec!["v0", "v1", "v2"]);
        assert_eq!(v.second_weight, Dist::from_int(2));
        assert!(induced_metric(&g).is_err());
    }

    #[test]
    fn weighted_tree_is_valid() {
        let g = graph(5, &[(0, 1, 3), (0, 2, 7), (2, 3, 1), (2, 4, 2)]);
        assert!(validate_metric_graph(&g).is_valid());
        let m = induced_metric(&g).unwrap();
        assert_eq!(m.distance(&1, &4), Dist::from_int(12));
    }

    #[test]
    fn equal_hop_ties_are_rejected_by_condition_two() {
        // square with a unit diagonal: 0-2 directly (1) vs 0-1-2 (2 hops, weight 1/2+1/2)
        let g = WeightedGraph::from_indexed(
            (0..3).map(|i| i.to_string()).collect(),
            vec![(0, 1, Dist::ratio(1, 2)), (1, 2, Dist::ratio(1, 2)), (0, 2, Dist::one())],
        )
        .unwrap();
        let r = validate_metric_graph(&g);
        assert!(r.condition1.holds);
        assert!(!r.condition2.holds);
    }

    #[test]
    fn semi_tripod_distance_is_additive_through_center() {
        // center 0, arms 1,2,3, edge 1-2
        let g = WeightedGraph::from_indexed(
            ["v", "v1", "v2", "v3"].map(String::from).to_vec(),
            vec![
                (0, 1, Dist::from_int(2)),
                (0, 2, Dist::from_int(3)),
                (0, 3, Dist::from_int(5)),
                (1, 2, Dist::from_int(4)),
            ],
        )
        .unwrap();
        let m = induced_metric(&g).unwrap();
        assert_eq!(m.distance(&2, &3), Dist::from_int(8));
        assert_eq!(m.distance(&1, &3), Dist::from_int(7));
        assert_eq!(m.distance(&1, &2), Dist::from_int(4));
    }

    #[test]
    fn tripod_finder_on_star_of_paths() {
        // root 0 - 1 - 2, and 2 branches to 3 and 4
        let g = GraphMetric::trusted(graph(5, &[(0, 1, 1), (1, 2, 1), (2, 3, 1), (2, 4, 1)]), "t");
        let s = find_tripod(&g, &0, 4).unwrap();
        let w = s.witness.unwrap();
        assert_eq!(w.center, 2);
        assert_eq!(w.arms, [3, 4, 1]);
        assert_eq!(w.kind, TripodKind::Tripod);
        let s = find_tripod(&g, &0, 1).unwrap();
        assert!(s.witness.is_none());
    }

    #[test]
    fn tripod_finder_at_root() {
        let g = GraphMetric::trusted(graph(4, &[(0, 1, 1), (0, 2, 2), (0, 3, 3), (1, 2, 3)]), "semi");
        let w = find_tripod(&g, &0, 2).unwrap().witness.unwrap();
        assert_eq!((w.center, w.arms, w.sphere), (0, [1, 2, 3], 0));
        assert_eq!(w.kind, TripodKind::SemiTripod);
    }
}
