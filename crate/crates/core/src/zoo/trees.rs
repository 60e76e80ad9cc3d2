use serde::Serialize;

use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::local_graph::{bounded_search, LocalGraph};
use crate::space::MetricSpace;

fn common_prefix(x: &[u8], y: &[u8]) -> usize {
    x.iter().zip(y).take_while(|(a, b)| a == b).count()
}

fn path_label(p: &[u8]) -> String {
    let mut s = String::from("r");
    for c in p {
        s.push('.');
        s.push_str(&c.to_string());
    }
    s
}

fn parse_path(s: &str) -> Option<Vec<u8>> {
    let mut parts = s.trim().split('.');
    if parts.next()? != "r" {
        return None;
    }
    parts.map(|c| c.parse().ok()).collect()
}

/// The `degree`-regular tree. Points are paths from a fixed root: the first
/// step picks one of `degree` neighbors, later steps one of `degree - 1`
/// children.
#[derive(Clone, Debug)]
pub struct RegularTree {
    degree: usize,
}

impl RegularTree {
    pub fn new(degree: usize) -> Result<Self> {
        if !(2..=255).contains(&degree) {
            return Err(Error::precondition("tree degree must be in 2..=255"));
        }
        Ok(RegularTree { degree })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    fn valid(&self, p: &[u8]) -> bool {
        p.iter().enumerate().all(|(i, &c)| {
            let bound = if i == 0 { self.degree } else { self.degree - 1 };
            (c as usize) < bound
        })
    }

    fn children(&self, v: &[u8]) -> impl Iterator<Item = Vec<u8>> + '_ {
        let count = if v.is_empty() { self.degree } else { self.degree - 1 };
        let v = v.to_vec();
        (0..count as u8).map(move |c| {
            let mut w = v.clone();
            w.push(c);
            w
        })
    }
}

impl MetricSpace for RegularTree {
    type Point = Vec<u8>;

    fn name(&self) -> String {
        format!("regular-tree({})", self.degree)
    }

    fn distance(&self, x: &Vec<u8>, y: &Vec<u8>) -> Dist {
        let l = common_prefix(x, y);
        Dist::from_u64((x.len() + y.len() - 2 * l) as u64)
    }

    fn neighborhood(&self, seeds: &[Vec<u8>], radius: &Dist, cap: usize) -> Result<Vec<(Vec<u8>, Dist)>> {
        bounded_search(self, seeds, radius, cap)
    }

    fn base_point(&self) -> Vec<u8> {
        Vec::new()
    }

    fn label(&self, p: &Vec<u8>) -> String {
        path_label(p)
    }

    fn parse_point(&self, s: &str) -> Option<Vec<u8>> {
        parse_path(s).filter(|p| self.valid(p))
    }

    fn level_radius_hint(&self, m: usize) -> Dist {
        Dist::from_u64(m.max(1) as u64)
    }
}

impl LocalGraph for RegularTree {
    fn neighbors(&self, v: &Vec<u8>) -> Vec<(Vec<u8>, Dist)> {
        let mut out = Vec::with_capacity(self.degree);
        if !v.is_empty() {
            out.push((v[..v.len() - 1].to_vec(), Dist::one()));
        }
        out.extend(self.children(v).map(|w| (w, Dist::one())));
        out
    }

    fn unit_weights(&self) -> bool {
        true
    }
}

/// Edge weights of a rooted tree as a function of depth.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum WeightRule {
    Unit,
    /// The edge reaching depth `j` weighs `base^(j-1)`.
    Geometric {
        base: Dist,
    },
}

/// A rooted tree in which every vertex has `arity` children, with depth
/// dependent edge weights. Arity 2 with `Geometric { base: 10 }` is the binary
/// tree whose edges at depth `k` weigh `10^k`, counting from `k = 0` at the root.
#[derive(Clone, Debug)]
pub struct WeightedTree {
    arity: usize,
    rule: WeightRule,
}

impl WeightedTree {
    pub fn new(arity: usize, rule: WeightRule) -> Result<Self> {
        if !(1..=255).contains(&arity) {
            return Err(Error::precondition("tree arity must be in 1..=255"));
        }
        if let WeightRule::Geometric { base } = &rule {
            if !base.is_positive() {
                return Err(Error::precondition("weight base must be positive"));
            }
        }
        Ok(WeightedTree { arity, rule })
    }

    /// The binary tree with weights `10^k`.
    pub fn ivanov() -> Self {
        WeightedTree { arity: 2, rule: WeightRule::Geometric { base: Dist::from_int(10) } }
    }

    pub fn rule(&self) -> &WeightRule {
        &self.rule
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Weight of the edge between depth `j - 1` and depth `j`.
    pub fn edge_weight(&self, j: usize) -> Dist {
        match &self.rule {
            WeightRule::Unit => Dist::one(),
            WeightRule::Geometric { base } => {
                Dist::from_rational(num_traits::pow(base.as_rational().clone(), j.saturating_sub(1)))
            }
        }
    }

    /// Distance from the root to depth `j`.
    pub fn depth_distance(&self, j: usize) -> Dist {
        (1..=j).map(|i| self.edge_weight(i)).sum()
    }
}

impl MetricSpace for WeightedTree {
    type Point = Vec<u8>;

    fn name(&self) -> String {
        match &self.rule {
            WeightRule::Unit => format!("weighted-tree({}, unit)", self.arity),
            WeightRule::Geometric { base } => format!("weighted-tree({}, geometric {})", self.arity, base),
        }
    }

    fn distance(&self, x: &Vec<u8>, y: &Vec<u8>) -> Dist {
        let l = common_prefix(x, y);
        (l + 1..=x.len()).chain(l + 1..=y.len()).map(|j| self.edge_weight(j)).sum()
    }

    fn neighborhood(&self, seeds: &[Vec<u8>], radius: &Dist, cap: usize) -> Result<Vec<(Vec<u8>, Dist)>> {
        bounded_search(self, seeds, radius, cap)
    }

    fn base_point(&self) -> Vec<u8> {
        Vec::new()
    }

    fn label(&self, p: &Vec<u8>) -> String {
        path_label(p)
    }

    fn parse_point(&self, s: &str) -> Option<Vec<u8>> {
        parse_path(s).filter(|p| p.iter().all(|&c| (c as usize) < self.arity))
    }

    fn level_radius_hint(&self, m: usize) -> Dist {
        match self.rule {
            WeightRule::Unit => Dist::from_u64(m.max(1) as u64),
            WeightRule::Geometric { .. } => Dist::one(),
        }
    }
}

impl LocalGraph for WeightedTree {
    fn neighbors(&self, v: &Vec<u8>) -> Vec<(Vec<u8>, Dist)> {
        let mut out = Vec::with_capacity(self.arity + 1);
        if !v.is_empty() {
            out.push((v[..v.len() - 1].to_vec(), self.edge_weight(v.len())));
        }
        let w = self.edge_weight(v.len() + 1);
        for c in 0..self.arity as u8 {
            let mut child = v.clone();
            child.push(c);
            out.push((child, w.clone()));
        }
        out
    }

    fn unit_weights(&self) -> bool {
        self.rule == WeightRule::Unit
    }
}

/// A point of [`TreePlusRay`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RayPoint {
    Tree(Vec<u8>),
    /// The ray point at distance `n >= 1` from the root.
    Ray(u64),
}

/// A regular tree with a one-sided copy of the integers glued at its root.
#[derive(Clone, Debug)]
pub struct TreePlusRay {
    tree: RegularTree,
}

impl TreePlusRay {
    pub fn new(degree: usize) -> Result<Self> {
        if degree < 3 {
            return Err(Error::precondition("tree-plus-ray needs tree degree at least 3"));
        }
        Ok(TreePlusRay { tree: RegularTree::new(degree)? })
    }

    pub fn degree(&self) -> usize {
        self.tree.degree()
    }
}

impl MetricSpace for TreePlusRay {
    type Point = RayPoint;

    fn name(&self) -> String {
        format!("tree-plus-ray({})", self.tree.degree())
    }

    fn distance(&self, x: &RayPoint, y: &RayPoint) -> Dist {
        match (x, y) {
            (RayPoint::Tree(a), RayPoint::Tree(b)) => self.tree.distance(a, b),
            (RayPoint::Tree(a), RayPoint::Ray(n)) | (RayPoint::Ray(n), RayPoint::Tree(a)) => {
                Dist::from_u64(a.len() as u64 + n)
            }
            (RayPoint::Ray(m), RayPoint::Ray(n)) => Dist::from_u64(m.abs_diff(*n)),
        }
    }

    fn neighborhood(&self, seeds: &[RayPoint], radius: &Dist, cap: usize) -> Result<Vec<(RayPoint, Dist)>> {
        bounded_search(self, seeds, radius, cap)
    }

    fn base_point(&self) -> RayPoint {
        RayPoint::Tree(Vec::new())
    }

    fn label(&self, p: &RayPoint) -> String {
        match p {
            RayPoint::Tree(v) => path_label(v),
            RayPoint::Ray(n) => format!("ray{n}"),
        }
    }

    fn parse_point(&self, s: &str) -> Option<RayPoint> {
        if let Some(n) = s.trim().strip_prefix("ray") {
            let n: u64 = n.parse().ok()?;
            return (n >= 1).then_some(RayPoint::Ray(n));
        }
        self.tree.parse_point(s).map(RayPoint::Tree)
    }

    fn level_radius_hint(&self, m: usize) -> Dist {
        Dist::from_u64(m.max(1) as u64)
    }
}

impl LocalGraph for TreePlusRay {
    fn neighbors(&self, v: &RayPoint) -> Vec<(RayPoint, Dist)> {
        match v {
            RayPoint::Tree(t) => {
                let mut out: Vec<_> = self.tree.neighbors(t).into_iter().map(|(w, d)| (RayPoint::Tree(w), d)).collect();
                if t.is_empty() {
                    out.push((RayPoint::Ray(1), Dist::one()));
                }
                out
            }
            RayPoint::Ray(n) => {
                let back = if *n == 1 { RayPoint::Tree(Vec::new()) } else { RayPoint::Ray(n - 1) };
                vec![(back, Dist::one()), (RayPoint::Ray(n + 1), Dist::one())]
            }
        }
    }

    fn unit_weights(&self) -> bool {
        true
    }
}
