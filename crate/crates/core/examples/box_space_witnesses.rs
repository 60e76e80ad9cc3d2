//! Box spaces of growing random regular graphs and the witness sets whose
//! discrete boundary is a small fraction of their size.
//!
//! Run with `cargo run --release --example box_space_witnesses`.

use snlab::isoperimetry::k_quotient;
use snlab::zoo::{random_regular_graph, BoxSpace};
use snlab::MetricSpace;

fn main() -> snlab::Result<()> {
    let components =
        (1..=7).map(|n| random_regular_graph(1 << (n + 3), 4, 7 + n as u64)).collect::<snlab::Result<Vec<_>>>()?;
    let space = BoxSpace::new(components)?;
    println!("offsets R_n: {:?}", space.offsets());
    println!("d(G_1, G_2) = {}", space.distance(&(0, 0), &(1, 0)));
    for w in space.witness_family(2)? {
        let q = k_quotient(&space, &w.set, 2)?;
        println!(
            "F_2^{}: |F| = {:5}, |dB_2(F)| = {:3}, quotient {:.4}",
            w.n,
            q.set_size,
            q.boundary_size,
            q.quotient.to_f64()
        );
    }
    Ok(())
}
