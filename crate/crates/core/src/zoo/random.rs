use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::metric_graph::WeightedGraph;

const MAX_ATTEMPTS: usize = 100_000;

/// A uniformly random simple connected `degree`-regular graph on `n` vertices
/// (configuration model with rejection), reproducible from `seed`.
pub fn random_regular_graph(n: usize, degree: usize, seed: u64) -> Result<WeightedGraph> {
    if degree == 0 || degree >= n || (n * degree) % 2 == 1 {
        return Err(Error::precondition(format!("no simple {degree}-regular graph on {n} vertices")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, degree)).collect();
    'attempt: for _ in 0..MAX_ATTEMPTS {
        stubs.shuffle(&mut rng);
        let mut edges = Vec::with_capacity(stubs.len() / 2);
        let mut seen = std::collections::HashSet::with_capacity(stubs.len() / 2);
        for pair in stubs.chunks(2) {
            let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if u == v || !seen.insert((u, v)) {
                continue 'attempt;
            }
            edges.push((u, v));
        }
        edges.sort_unstable();
        match WeightedGraph::unit(n, &edges) {
            Ok(g) => return Ok(g),
            Err(Error::Graph(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::precondition("could not sample a simple connected regular graph"))
}

/// The cycle on `n >= 3` vertices.
pub fn cycle_graph(n: usize) -> Result<WeightedGraph> {
    if n < 3 {
        return Err(Error::precondition("a cycle needs at least 3 vertices"));
    }
    let edges: Vec<(usize, usize)> = (0..n).map(|i| (i.min((i + 1) % n), i.max((i + 1) % n))).collect();
    WeightedGraph::unit(n, &edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regular_and_reproducible() {
        let g = random_regular_graph(64, 4, 11).unwrap();
        assert!((0..64).all(|v| g.neighbors(v).len() == 4));
        let h = random_regular_graph(64, 4, 11).unwrap();
        assert_eq!(g.edges(), h.edges());
        assert!(random_regular_graph(5, 3, 0).is_err());
    }

    #[test]
    fn cycles() {
        let c = cycle_graph(8).unwrap();
        assert_eq!(c.hop_diameter(), 4);
    }
}
