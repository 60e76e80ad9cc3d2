use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::local_graph::{bounded_search, LocalGraph};
use crate::space::MetricSpace;

/// `Z^d` with the word metric of the standard generators (the L1 metric).
#[derive(Clone, Debug)]
pub struct Lattice {
    dim: usize,
}

impl Lattice {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::precondition("lattice dimension must be at least 1"));
        }
        Ok(Lattice { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

impl MetricSpace for Lattice {
    type Point = Vec<i64>;

    fn name(&self) -> String {
        format!("integer-lattice({})", self.dim)
    }

    fn distance(&self, x: &Vec<i64>, y: &Vec<i64>) -> Dist {
        Dist::from_u64(x.iter().zip(y).map(|(a, b)| a.abs_diff(*b)).sum())
    }

    fn neighborhood(&self, seeds: &[Vec<i64>], radius: &Dist, cap: usize) -> Result<Vec<(Vec<i64>, Dist)>> {
        bounded_search(self, seeds, radius, cap)
    }

    fn base_point(&self) -> Vec<i64> {
        vec![0; self.dim]
    }

    fn label(&self, p: &Vec<i64>) -> String {
        if self.dim == 1 {
            p[0].to_string()
        } else {
            let parts: Vec<String> = p.iter().map(i64::to_string).collect();
            format!("({})", parts.join(","))
        }
    }

    fn parse_point(&self, s: &str) -> Option<Vec<i64>> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let coords: Option<Vec<i64>> = inner.split(',').map(|c| c.trim().parse().ok()).collect();
        coords.filter(|c| c.len() == self.dim)
    }

    fn level_radius_hint(&self, m: usize) -> Dist {
        Dist::from_u64(m.max(1) as u64)
    }
}

impl LocalGraph for Lattice {
    fn neighbors(&self, v: &Vec<i64>) -> Vec<(Vec<i64>, Dist)> {
        let mut out = Vec::with_capacity(2 * self.dim);
        for i in 0..self.dim {
            for step in [-1, 1] {
                let mut w = v.clone();
                w[i] += step;
                out.push((w, Dist::one()));
            }
        }
        out
    }

    fn unit_weights(&self) -> bool {
        true
    }
}
