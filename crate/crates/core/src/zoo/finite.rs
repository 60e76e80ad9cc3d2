use std::collections::HashMap;
use std::sync::Arc;

use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::space::{Arithmetic, MetricSpace};

/// A finite metric space given by its full distance matrix. Points are row
/// indices.
#[derive(Clone, Debug)]
pub struct FiniteMetric {
    name: String,
    names: Arc<Vec<String>>,
    index: Arc<HashMap<String, usize>>,
    matrix: Arc<Vec<Vec<Dist>>>,
    arithmetic: Arithmetic,
}

impl FiniteMetric {
    /// Builds the space after checking the metric axioms exactly.
    pub fn from_exact(names: Vec<String>, matrix: Vec<Vec<Dist>>) -> Result<Self> {
        Self::build(names, matrix, Arithmetic::ExactRational)
    }

    /// Float distances are stored as the exact rationals of their shortest
    /// decimal form; only the level grouping uses `level_tolerance`.
    pub fn from_float_matrix(names: Vec<String>, matrix: &[Vec<f64>], level_tolerance: f64) -> Result<Self> {
        if !(level_tolerance >= 0.0 && level_tolerance.is_finite()) {
            return Err(Error::precondition("level tolerance must be a finite nonnegative number"));
        }
        let rows = matrix
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&x| {
                        Dist::from_f64(x).ok_or_else(|| Error::MetricAxiom(format!("distance {x} is not finite")))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::build(names, rows, Arithmetic::Float { level_tolerance })
    }

    /// Integer points of the real line.
    pub fn from_points_on_line(points: &[i64]) -> Self {
        let names = points.iter().map(i64::to_string).collect();
        let matrix = points.iter().map(|a| points.iter().map(|b| Dist::from_u64(a.abs_diff(*b))).collect()).collect();
        Self::from_exact(names, matrix).expect("distinct points on a line form a metric space")
    }

    /// The subspace of `space` on the given points.
    pub fn restrict<S: MetricSpace>(space: &S, points: &[S::Point]) -> Result<Self> {
        let names = points.iter().map(|p| space.label(p)).collect();
        let matrix = points.iter().map(|p| points.iter().map(|q| space.distance(p, q)).collect()).collect();
        let arithmetic = space.arithmetic();
        Ok(Self::build(names, matrix, arithmetic)?.with_name(format!("{} (restricted)", space.name())))
    }

    fn build(names: Vec<String>, matrix: Vec<Vec<Dist>>, arithmetic: Arithmetic) -> Result<Self> {
        let n = names.len();
        if n == 0 {
            return Err(Error::precondition("a finite metric needs at least one point"));
        }
        let mut index = HashMap::with_capacity(n);
        for (i, s) in names.iter().enumerate() {
            if index.insert(s.clone(), i).is_some() {
                return Err(Error::precondition(format!("duplicate point name `{s}`")));
            }
        }
        if matrix.len() != n || matrix.iter().any(|r| r.len() != n) {
            return Err(Error::MetricAxiom(format!("distance matrix must be {n} x {n}")));
        }
        for i in 0..n {
            if !matrix[i][i].is_zero() {
                return Err(Error::MetricAxiom(format!("d({0},{0}) must be 0", names[i])));
            }
            for j in 0..i {
                if matrix[i][j] != matrix[j][i] {
                    return Err(Error::MetricAxiom(format!("d({0},{1}) != d({1},{0})", names[i], names[j])));
                }
                if !matrix[i][j].is_positive() {
                    return Err(Error::MetricAxiom(format!(
                        "d({},{}) must be positive for distinct points",
                        names[i], names[j]
                    )));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if matrix[i][k] > &matrix[i][j] + &matrix[j][k] {
                        return Err(Error::MetricAxiom(format!(
                            "triangle inequality fails for ({}, {}, {})",
                            names[i], names[j], names[k]
                        )));
                    }
                }
            }
        }
        Ok(FiniteMetric {
            name: "finite-metric".into(),
            names: Arc::new(names),
            index: Arc::new(index),
            matrix: Arc::new(matrix),
            arithmetic,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
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

    pub fn matrix(&self) -> &[Vec<Dist>] {
        &self.matrix
    }
}

impl MetricSpace for FiniteMetric {
    type Point = usize;

    fn name(&self) -> String {
        self.name.clone()
    }

    fn distance(&self, x: &usize, y: &usize) -> Dist {
        self.matrix[*x][*y].clone()
    }

    fn neighborhood(&self, seeds: &[usize], radius: &Dist, cap: usize) -> Result<Vec<(usize, Dist)>> {
        if seeds.is_empty() {
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        for y in 0..self.len() {
            let d = seeds.iter().map(|s| &self.matrix[*s][y]).min().expect("nonempty seeds");
            if d <= radius {
                out.push((y, d.clone()));
                if out.len() > cap {
                    return Err(Error::HorizonExceeded { cap });
                }
            }
        }
        Ok(out)
    }

    fn base_point(&self) -> usize {
        0
    }

    fn label(&self, p: &usize) -> String {
        self.names[*p].clone()
    }

    fn parse_point(&self, s: &str) -> Option<usize> {
        self.index.get(s.trim()).copied()
    }

    fn arithmetic(&self) -> Arithmetic {
        self.arithmetic
    }

    fn cardinality(&self) -> Option<usize> {
        Some(self.len())
    }
}
