//! Gram matrix test for isometric embeddings of finite metrics into Hilbert
//! space: tripods fail, subsets of a line pass.
//!
//! Run with `cargo run --example hilbert_embedding`.

use snlab::embeddability::{schoenberg_subset, schoenberg_test, DEFAULT_EIGEN_TOLERANCE};
use snlab::metric_graph::induced_metric;
use snlab::zoo::{semi_tripod_graph, tripod_graph, FiniteMetric};
use snlab::Dist;

fn main() -> snlab::Result<()> {
    let ones = [Dist::one(), Dist::one(), Dist::one()];
    let tripod = induced_metric(&tripod_graph(&ones)?)?;
    let r = schoenberg_subset(&tripod, &[0, 1, 2, 3], DEFAULT_EIGEN_TOLERANCE)?;
    println!("unit tripod: leading minors {:?}", r.leading_minors.iter().map(Dist::to_string).collect::<Vec<_>>());
    println!("  min eigenvalue {:.4}, verdict {:?}", r.min_eigenvalue, r.verdict);

    let semi = induced_metric(&semi_tripod_graph(&ones, &Dist::one())?)?;
    let r = schoenberg_subset(&semi, &[0, 1, 2, 3], DEFAULT_EIGEN_TOLERANCE)?;
    println!("unit semi-tripod: min eigenvalue {:.4}, verdict {:?}", r.min_eigenvalue, r.verdict);

    let line = FiniteMetric::from_points_on_line(&[0, 1, 3, 7]);
    let r = schoenberg_subset(&line, &[0, 1, 2, 3], DEFAULT_EIGEN_TOLERANCE)?;
    println!("four points on a line: verdict {:?}", r.verdict);

    // a distance matrix given directly
    let names = ["p", "q", "r"].map(String::from).to_vec();
    let d = |x: i64| Dist::from_int(x);
    let r = schoenberg_test(names, &[vec![d(0), d(3), d(4)], vec![d(3), d(0), d(5)], vec![d(4), d(5), d(0)]], 1e-8)?;
    println!("3-4-5 triangle: verdict {:?}", r.verdict);
    Ok(())
}
