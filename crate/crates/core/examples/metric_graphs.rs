//! Weighted graphs whose weights are additive along hop-shortest paths, their
//! induced metrics and the tripod finder.
//!
//! Run with `cargo run --example metric_graphs`.

use snlab::metric_graph::{find_tripod, graph_boundary, induced_metric, validate_metric_graph, WeightedGraph};
use snlab::zoo::{Lattice, RegularTree};
use snlab::{Dist, MetricSpace, PointSet};

fn main() -> snlab::Result<()> {
    let names = ["a", "b", "c", "d"].map(String::from).to_vec();
    let e = |u: &str, v: &str, w: i64| (u.to_string(), v.to_string(), Dist::from_int(w));

    // a square whose diagonal shortcut is lighter than the two-hop path
    let bad = WeightedGraph::new(names.clone(), vec![e("a", "b", 1), e("b", "c", 1), e("c", "d", 1), e("d", "a", 5)])?;
    let report = validate_metric_graph(&bad);
    println!("square with a heavy edge: valid {}", report.is_valid());
    if let Some(v) = &report.condition2.violation {
        println!(
            "  {:?} ({}) is not heavier than {:?} ({})",
            v.first_path, v.first_weight, v.second_path, v.second_weight
        );
    }

    let good = WeightedGraph::new(names, vec![e("a", "b", 2), e("b", "c", 3), e("c", "d", 2), e("d", "a", 3)])?;
    let m = induced_metric(&good)?;
    println!("balanced square: d(a, c) = {}", m.distance(&0, &2));

    let z2 = Lattice::new(2)?;
    let w = find_tripod(&z2, &vec![0, 0], 3)?.witness.expect("Z^2 has tripods");
    println!("Z^2 tripod: center {} arms {:?} ({:?})", z2.label(&w.center), w.arms.map(|a| z2.label(&a)), w.kind);
    let z = Lattice::new(1)?;
    println!("Z tripod: {:?}", find_tripod(&z, &vec![0], 10)?.witness.map(|w| w.center));

    // the graph boundary always contains the discrete boundary
    let t = RegularTree::new(3)?;
    let a: PointSet<Vec<u8>> = [vec![], vec![0], vec![0, 1]].into_iter().collect();
    let b = graph_boundary(&t, &a, 2)?;
    println!(
        "tree: |dB_2(A)| = {}, |cB_2(A)| = {}, contained {}",
        b.discrete.db.len(),
        b.hop_boundary.len(),
        b.contained()
    );
    Ok(())
}
