//! Reading spaces from files: weighted graph JSON, edge lists and finite
//! metrics, then running an analysis on the result.
//!
//! Run with `cargo run --example space_files`.

use snlab::embeddability::{schoenberg_subset, DEFAULT_EIGEN_TOLERANCE};
use snlab::io::{parse_space_text, SpaceFile};
use snlab::metric_graph::{induced_metric, validate_metric_graph};
use snlab::space::discrete_neighborhood;
use snlab::{MetricSpace, PointSet};

const EDGES: &str = "\
# a path with a pendant vertex
a b 1
b c 1/2
c d 2
b e 3
";

const FINITE: &str = r#"{
  "type": "finite_metric",
  "points": ["p", "q", "r", "s"],
  "distances": [[0, 1, 2, 3], [1, 0, 1, 2], [2, 1, 0, 1], [3, 2, 1, 0]]
}"#;

fn main() -> snlab::Result<()> {
    let SpaceFile::Graph(g) = parse_space_text(EDGES)? else { unreachable!() };
    println!("edge list: {} vertices, valid {}", g.len(), validate_metric_graph(&g).is_valid());
    let m = induced_metric(&g)?;
    let n = discrete_neighborhood(&m, &PointSet::singleton(0), 2)?;
    println!("dN_2(a) = {:?}", n.dn.labels(&m));

    let SpaceFile::Finite(f) = parse_space_text(FINITE)? else { unreachable!() };
    let all: Vec<usize> = (0..f.len()).collect();
    let r = schoenberg_subset(&f, &all, DEFAULT_EIGEN_TOLERANCE)?;
    println!("{} points of {}: {:?}", all.len(), f.name(), r.verdict);
    Ok(())
}
