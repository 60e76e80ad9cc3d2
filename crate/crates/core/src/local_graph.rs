//! Spaces that come from (possibly infinite) locally finite graphs.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap, VecDeque};

use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::space::{MetricSpace, PointSet};

/// A metric space whose metric is the weighted path metric of a locally finite
/// graph on its points.
pub trait LocalGraph: MetricSpace {
    /// Neighbors of `v` with the weights of the connecting edges.
    fn neighbors(&self, v: &Self::Point) -> Vec<(Self::Point, Dist)>;

    /// All edges have weight 1, so the metric is the hop metric.
    fn unit_weights(&self) -> bool {
        false
    }
}

impl<G: LocalGraph> LocalGraph for crate::space::Capped<G> {
    fn neighbors(&self, v: &G::Point) -> Vec<(G::Point, Dist)> {
        self.inner.neighbors(v)
    }

    fn unit_weights(&self) -> bool {
        self.inner.unit_weights()
    }
}

/// Multi-source bounded shortest-path search: every vertex within `radius` of
/// the seeds, with its distance, sorted by vertex.
pub fn bounded_search<G: LocalGraph + ?Sized>(
    graph: &G,
    seeds: &[G::Point],
    radius: &Dist,
    cap: usize,
) -> Result<Vec<(G::Point, Dist)>> {
    if graph.unit_weights() {
        let limit = if radius.is_negative() {
            return Ok(Vec::new());
        } else {
            // floor(radius)
            let r = radius.as_rational().floor().to_integer();
            usize::try_from(r).unwrap_or(usize::MAX)
        };
        let hops = hop_search(graph, seeds, limit, cap)?;
        let mut out: Vec<_> = hops.into_iter().map(|(v, h)| (v, Dist::from_u64(h as u64))).collect();
        out.sort_by(|a, b| a.0.cmp(&b.0));
        return Ok(out);
    }

    let mut settled: BTreeMap<G::Point, Dist> = BTreeMap::new();
    let mut best: HashMap<G::Point, Dist> = HashMap::new();
    let mut heap = BinaryHeap::new();
    for s in seeds {
        if best.insert(s.clone(), Dist::zero()).is_none() {
            heap.push(Reverse((Dist::zero(), s.clone())));
        }
    }
    while let Some(Reverse((d, v))) = heap.pop() {
        if settled.contains_key(&v) || best.get(&v).is_some_and(|b| *b < d) {
            continue;
        }
        settled.insert(v.clone(), d.clone());
        if settled.len() > cap {
            return Err(Error::HorizonExceeded { cap });
        }
        for (w, weight) in graph.neighbors(&v) {
            if settled.contains_key(&w) {
                continue;
            }
            let nd = &d + &weight;
            if &nd > radius {
                continue;
            }
            let better = best.get(&w).is_none_or(|b| nd < *b);
            if better {
                best.insert(w.clone(), nd.clone());
                heap.push(Reverse((nd, w)));
            }
        }
    }
    Ok(settled.into_iter().collect())
}

/// Breadth-first search ignoring weights: vertices within `limit` hops of the
/// seeds with their hop distance.
pub fn hop_search<G: LocalGraph + ?Sized>(
    graph: &G,
    seeds: &[G::Point],
    limit: usize,
    cap: usize,
) -> Result<HashMap<G::Point, usize>> {
    let mut seen: HashMap<G::Point, usize> = HashMap::new();
    let mut queue = VecDeque::new();
    for s in seeds {
        if seen.insert(s.clone(), 0).is_none() {
            queue.push_back(s.clone());
        }
    }
    while let Some(v) = queue.pop_front() {
        let h = seen[&v];
        if h == limit {
            continue;
        }
        for (w, _) in graph.neighbors(&v) {
            if !seen.contains_key(&w) {
                seen.insert(w.clone(), h + 1);
                if seen.len() > cap {
                    return Err(Error::HorizonExceeded { cap });
                }
                queue.push_back(w);
            }
        }
    }
    Ok(seen)
}

/// Closed hop neighborhood `cN_k(A)` in the unlabeled graph.
pub fn hop_neighborhood<G: LocalGraph + ?Sized>(
    graph: &G,
    a: &PointSet<G::Point>,
    k: usize,
) -> Result<PointSet<G::Point>> {
    let seeds = a.to_vec();
    Ok(hop_search(graph, &seeds, k, graph.point_cap())?.into_keys().collect())
}

/// Hop spheres `S_0, ..., S_n` around `root`, each sorted.
pub fn hop_spheres<G: LocalGraph + ?Sized>(graph: &G, root: &G::Point, n: usize) -> Result<Vec<Vec<G::Point>>> {
    let seen = hop_search(graph, std::slice::from_ref(root), n, graph.point_cap())?;
    let mut spheres = vec![Vec::new(); n + 1];
    for (v, h) in seen {
        spheres[h].push(v);
    }
    for s in &mut spheres {
        s.sort();
    }
    Ok(spheres)
}

/// Whether `u` and `v` are joined by an edge.
pub fn adjacent<G: LocalGraph + ?Sized>(graph: &G, u: &G::Point, v: &G::Point) -> bool {
    graph.neighbors(u).iter().any(|(w, _)| w == v)
}
