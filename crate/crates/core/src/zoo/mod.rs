//! Concrete spaces: the harmonic partial sums, lattices, free groups, trees,
//! box spaces, tripods and user supplied graphs or finite metrics.

mod box_space;
mod finite;
mod free_group;
mod harmonic;
mod lattice;
pub mod random;
mod trees;

use std::path::PathBuf;

use serde::Serialize;

pub use box_space::{BoxSpace, BoxWitness};
pub use finite::FiniteMetric;
pub use free_group::FreeGroup;
pub use harmonic::Harmonic;
pub use lattice::Lattice;
pub use random::{cycle_graph, random_regular_graph};
pub use trees::{RayPoint, RegularTree, TreePlusRay, WeightRule, WeightedTree};

use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::metric_graph::{induced_metric, GraphMetric, WeightedGraph};

/// How the components of a box space are generated.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum BoxFamily {
    Cycles,
    RandomRegular { degree: usize, seed: u64 },
}

/// A description of a zoo space, validated by [`make_space`].
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SpaceSpec {
    Harmonic,
    IntegerLattice {
        dim: usize,
    },
    FreeGroup {
        rank: usize,
    },
    RegularTree {
        degree: usize,
    },
    TreePlusRay {
        degree: usize,
    },
    WeightedTree {
        arity: usize,
        rule: WeightRule,
    },
    BoxSpace {
        family: BoxFamily,
        sizes: Vec<usize>,
    },
    Tripod {
        weights: [Dist; 3],
    },
    /// A tripod plus an edge of weight `arm_edge` between the first two arms.
    SemiTripod {
        weights: [Dist; 3],
        arm_edge: Dist,
    },
    FromFile {
        path: PathBuf,
    },
}

/// Every zoo kind with a one-line description, in listing order.
pub const ZOO_KINDS: &[(&str, &str)] = &[
    ("harmonic", "partial sums of the harmonic series on the real line"),
    ("integer-lattice", "Z^d with the word metric (--dim)"),
    ("free-group", "free group with the word metric (--rank)"),
    ("regular-tree", "unit regular tree (--degree)"),
    ("tree-plus-ray", "regular tree with a one-sided ray glued at the root (--degree)"),
    ("weighted-tree", "rooted tree with geometric edge weights (--arity, --base; default binary, base 10)"),
    ("box-space", "disjoint union of growing finite graphs (--sizes, --degree, --seed)"),
    ("tripod", "center joined to three arms (--weights)"),
    ("semi-tripod", "tripod with one edge between two arms (--weights, --arm-edge)"),
    ("from-file", "weighted graph or finite metric from a file (--file)"),
];

/// A constructed space. Different kinds have different point types, so
/// generic code dispatches through [`with_space!`](crate::with_space).
#[derive(Clone, Debug)]
pub enum ZooSpace {
    Harmonic(Harmonic),
    Lattice(Lattice),
    FreeGroup(FreeGroup),
    RegularTree(RegularTree),
    TreePlusRay(TreePlusRay),
    WeightedTree(WeightedTree),
    BoxSpace(BoxSpace),
    Graph(GraphMetric),
    Finite(FiniteMetric),
}

/// Runs `$body` with `$s` bound to the concrete space inside a [`ZooSpace`].
#[macro_export]
macro_rules! with_space {
    ($zoo:expr, $s:ident => $body:expr) => {
        match $zoo {
            $crate::zoo::ZooSpace::Harmonic($s) => $body,
            $crate::zoo::ZooSpace::Lattice($s) => $body,
            $crate::zoo::ZooSpace::FreeGroup($s) => $body,
            $crate::zoo::ZooSpace::RegularTree($s) => $body,
            $crate::zoo::ZooSpace::TreePlusRay($s) => $body,
            $crate::zoo::ZooSpace::WeightedTree($s) => $body,
            $crate::zoo::ZooSpace::BoxSpace($s) => $body,
            $crate::zoo::ZooSpace::Graph($s) => $body,
            $crate::zoo::ZooSpace::Finite($s) => $body,
        }
    };
}

/// Like [`with_space!`](crate::with_space) for spaces that are graphs; other
/// kinds evaluate `$other`.
#[macro_export]
macro_rules! with_graph {
    ($zoo:expr, $s:ident => $body:expr, $other:expr) => {
        match $zoo {
            $crate::zoo::ZooSpace::Lattice($s) => $body,
            $crate::zoo::ZooSpace::FreeGroup($s) => $body,
            $crate::zoo::ZooSpace::RegularTree($s) => $body,
            $crate::zoo::ZooSpace::TreePlusRay($s) => $body,
            $crate::zoo::ZooSpace::WeightedTree($s) => $body,
            $crate::zoo::ZooSpace::Graph($s) => $body,
            _ => $other,
        }
    };
}

impl ZooSpace {
    pub fn name(&self) -> String {
        use crate::space::MetricSpace;
        with_space!(self, s => s.name())
    }

    pub fn is_graph(&self) -> bool {
        with_graph!(self, _s => true, false)
    }
}

fn positive(w: &Dist, what: &str) -> Result<()> {
    if w.is_positive() {
        Ok(())
    } else {
        Err(Error::precondition(format!("{what} must be positive")))
    }
}

/// The star with center `v` and arms `v1, v2, v3` at the given distances.
pub fn tripod_graph(weights: &[Dist; 3]) -> Result<WeightedGraph> {
    for w in weights {
        positive(w, "tripod weights")?;
    }
    let names = ["v", "v1", "v2", "v3"].map(String::from).to_vec();
    let edges = (0..3).map(|i| (0, i + 1, weights[i].clone())).collect();
    WeightedGraph::from_indexed(names, edges)
}

/// A tripod with an extra edge `v1 v2`.
pub fn semi_tripod_graph(weights: &[Dist; 3], arm_edge: &Dist) -> Result<WeightedGraph> {
    positive(arm_edge, "the arm edge weight")?;
    let star = tripod_graph(weights)?;
    let mut edges = star.edges().to_vec();
    edges.push((1, 2, arm_edge.clone()));
    WeightedGraph::from_indexed(star.names().to_vec(), edges)
}

/// Builds the space described by `spec`.
pub fn make_space(spec: &SpaceSpec) -> Result<ZooSpace> {
    Ok(match spec {
        SpaceSpec::Harmonic => ZooSpace::Harmonic(Harmonic::new()),
        SpaceSpec::IntegerLattice { dim } => ZooSpace::Lattice(Lattice::new(*dim)?),
        SpaceSpec::FreeGroup { rank } => ZooSpace::FreeGroup(FreeGroup::new(*rank)?),
        SpaceSpec::RegularTree { degree } => ZooSpace::RegularTree(RegularTree::new(*degree)?),
        SpaceSpec::TreePlusRay { degree } => ZooSpace::TreePlusRay(TreePlusRay::new(*degree)?),
        SpaceSpec::WeightedTree { arity, rule } => ZooSpace::WeightedTree(WeightedTree::new(*arity, rule.clone())?),
        SpaceSpec::BoxSpace { family, sizes } => {
            let components = sizes
                .iter()
                .enumerate()
                .map(|(i, &n)| match family {
                    BoxFamily::Cycles => cycle_graph(n),
                    BoxFamily::RandomRegular { degree, seed } => {
                        random_regular_graph(n, *degree, seed.wrapping_add(i as u64))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            ZooSpace::BoxSpace(BoxSpace::new(components)?)
        }
        SpaceSpec::Tripod { weights } => ZooSpace::Graph(induced_metric(&tripod_graph(weights)?)?.with_name("tripod")),
        SpaceSpec::SemiTripod { weights, arm_edge } => {
            ZooSpace::Graph(induced_metric(&semi_tripod_graph(weights, arm_edge)?)?.with_name("semi-tripod"))
        }
        SpaceSpec::FromFile { path } => crate::io::load_space(path)?,
    })
}
