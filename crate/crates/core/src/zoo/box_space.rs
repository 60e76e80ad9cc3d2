use std::collections::HashMap;

use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::local_graph::bounded_search;
use crate::metric_graph::{GraphMetric, WeightedGraph};
use crate::space::{ball, MetricSpace, PointSet};

/// A disjoint union of finite unit-weight graphs `G_1, G_2, ...`: inside a
/// component the graph metric, across components `d(p, q) = R_n + R_m` with
/// `R_n = max(diam(G_n), n, R_{n-1} + 1)`.
///
/// Points are `(component, vertex)` with 0-based component index.
#[derive(Clone, Debug)]
pub struct BoxSpace {
    components: Vec<GraphMetric>,
    offsets: Vec<u64>,
    total: usize,
}

/// One member `F_k^n` of the witness family together with its quotient data.
#[derive(Clone, Debug)]
pub struct BoxWitness {
    pub n: usize,
    pub k: usize,
    pub set: PointSet<(usize, usize)>,
    /// `B(x, k)` inside `G_{n+1}`, the part of that component left out.
    pub removed: usize,
}

impl BoxSpace {
    pub fn new(components: Vec<WeightedGraph>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::precondition("a box space needs at least one component"));
        }
        let mut offsets: Vec<u64> = Vec::with_capacity(components.len());
        let mut metrics = Vec::with_capacity(components.len());
        for (i, g) in components.into_iter().enumerate() {
            if !g.is_unit_weight() {
                return Err(Error::precondition("box space components must have unit weights"));
            }
            let n = i as u64 + 1;
            let diam = g.hop_diameter() as u64;
            let prev = offsets.last().map_or(0, |r| r + 1);
            offsets.push(diam.max(n).max(prev));
            metrics.push(GraphMetric::trusted(g, &format!("G{n}")));
        }
        let total = metrics.iter().map(|m| m.graph().len()).sum();
        Ok(BoxSpace { components: metrics, offsets, total })
    }

    /// `R_n` for the 0-based component `i` (that is, `n = i + 1`).
    pub fn offset(&self, i: usize) -> u64 {
        self.offsets[i]
    }

    pub fn offsets(&self) -> &[u64] {
        &self.offsets
    }

    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, i: usize) -> &GraphMetric {
        &self.components[i]
    }

    pub fn component_points(&self, i: usize) -> impl Iterator<Item = (usize, usize)> {
        (0..self.components[i].graph().len()).map(move |v| (i, v))
    }

    /// The witness set `F_k^n = G_1 u ... u G_n u (G_{n+1} \ B(x, k))` where
    /// `x` is vertex 0 of `G_{n+1}`; `n` is 1-based and needs `n + 1`
    /// components.
    pub fn witness(&self, n: usize, k: usize) -> Result<BoxWitness> {
        if n == 0 || n >= self.components.len() {
            return Err(Error::precondition(format!(
                "witness F_k^{n} needs components 1..={}, have {}",
                n + 1,
                self.components.len()
            )));
        }
        let mut set: PointSet<(usize, usize)> = (0..n).flat_map(|i| self.component_points(i)).collect();
        let next = &self.components[n];
        let near = ball(next, &0, &Dist::from_u64(k as u64))?;
        for v in 0..next.graph().len() {
            if !near.contains(&v) {
                set.insert((n, v));
            }
        }
        Ok(BoxWitness { n, k, set, removed: near.len() })
    }

    /// Every witness `F_k^n` the component list supports.
    pub fn witness_family(&self, k: usize) -> Result<Vec<BoxWitness>> {
        (1..self.components.len()).map(|n| self.witness(n, k)).collect()
    }
}

impl MetricSpace for BoxSpace {
    type Point = (usize, usize);

    fn name(&self) -> String {
        format!("box-space({} components)", self.components.len())
    }

    fn distance(&self, x: &(usize, usize), y: &(usize, usize)) -> Dist {
        if x.0 == y.0 {
            self.components[x.0].distance(&x.1, &y.1)
        } else {
            Dist::from_u64(self.offsets[x.0] + self.offsets[y.0])
        }
    }

    fn neighborhood(&self, seeds: &[(usize, usize)], radius: &Dist, cap: usize) -> Result<Vec<((usize, usize), Dist)>> {
        if seeds.is_empty() || radius.is_negative() {
            return Ok(Vec::new());
        }
        let mut local: HashMap<usize, Vec<usize>> = HashMap::new();
        for (c, v) in seeds {
            local.entry(*c).or_default().push(*v);
        }
        // smallest and second smallest offsets among seeded components
        let mut seeded: Vec<(u64, usize)> = local.keys().map(|&c| (self.offsets[c], c)).collect();
        seeded.sort_unstable();
        let mut out = Vec::new();
        for (i, comp) in self.components.iter().enumerate() {
            let other = seeded.iter().find(|(_, c)| *c != i).map(|(r, _)| r + self.offsets[i]);
            let cross = other.map(Dist::from_u64).filter(|d| d <= radius);
            let reach = match &cross {
                Some(c) => c.clone(),
                None => radius.clone(),
            };
            let mut found: Vec<(usize, Dist)> = match local.get(&i) {
                Some(vs) => bounded_search(comp, vs, &reach, cap)?,
                None => Vec::new(),
            };
            if let Some(c) = cross {
                let mut seen = vec![false; comp.graph().len()];
                for (v, _) in &found {
                    seen[*v] = true;
                }
                found.extend(seen.iter().enumerate().filter(|(_, s)| !**s).map(|(v, _)| (v, c.clone())));
                found.sort_by_key(|a| a.0);
            }
            out.extend(found.into_iter().map(|(v, d)| ((i, v), d)));
            if out.len() > cap {
                return Err(Error::HorizonExceeded { cap });
            }
        }
        Ok(out)
    }

    fn base_point(&self) -> (usize, usize) {
        (0, 0)
    }

    fn label(&self, p: &(usize, usize)) -> String {
        format!("G{}:{}", p.0 + 1, self.components[p.0].label(&p.1))
    }

    fn parse_point(&self, s: &str) -> Option<(usize, usize)> {
        let (c, v) = s.trim().strip_prefix('G')?.split_once(':')?;
        let c: usize = c.parse().ok()?;
        let i = c.checked_sub(1).filter(|i| *i < self.components.len())?;
        Some((i, self.components[i].parse_point(v)?))
    }

    fn cardinality(&self) -> Option<usize> {
        Some(self.total)
    }

    fn level_radius_hint(&self, m: usize) -> Dist {
        Dist::from_u64(m.max(1) as u64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::discrete_neighborhood;
    use crate::zoo::random::cycle_graph;

    fn cycles() -> BoxSpace {
        BoxSpace::new(vec![cycle_graph(4).unwrap(), cycle_graph(8).unwrap(), cycle_graph(16).unwrap()]).unwrap()
    }

    #[test]
    fn offsets_and_cross_distances() {
        let b = cycles();
        assert_eq!(b.offsets(), &[2, 4, 8]);
        assert_eq!(b.distance(&(0, 1), &(1, 5)), Dist::from_int(6));
        assert_eq!(b.distance(&(1, 0), &(2, 3)), Dist::from_int(12));
        assert_eq!(b.distance(&(2, 0), &(2, 8)), Dist::from_int(8));
    }

    #[test]
    fn neighborhood_matches_scan() {
        let b = cycles();
        let all: Vec<(usize, usize)> = (0..3).flat_map(|i| b.component_points(i)).collect();
        let seeds = [(0, 0), (2, 5)];
        for r in [0, 1, 3, 6, 10, 13] {
            let r = Dist::from_int(r);
            let got = b.neighborhood(&seeds, &r, 1000).unwrap();
            let expect: Vec<_> = all
                .iter()
                .filter_map(|p| {
                    let d = seeds.iter().map(|s| b.distance(p, s)).min().unwrap();
                    (d <= r).then_some((*p, d))
                })
                .collect();
            assert_eq!(got, expect);
        }
    }

    #[test]
    fn witness_boundary_is_the_removed_ball() {
        let b = cycles();
        let w = b.witness(2, 1).unwrap();
        assert_eq!(w.set.len(), 4 + 8 + 13);
        let n = discrete_neighborhood(&b, &w.set, 1).unwrap();
        // the removed ball {15, 0, 1} sits at distances 1, 2, 1 from F
        assert_eq!(n.db.len(), 2);
    }

    #[test]
    fn single_component_is_the_graph() {
        let b = BoxSpace::new(vec![cycle_graph(5).unwrap()]).unwrap();
        assert_eq!(b.distance(&(0, 0), &(0, 2)), Dist::from_int(2));
        assert!(b.witness_family(1).unwrap().is_empty());
    }
}
