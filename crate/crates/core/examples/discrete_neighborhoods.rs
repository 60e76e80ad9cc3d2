//! Discrete k-neighborhoods versus closed neighborhoods on the harmonic
//! partial sums `x_n = 1 + 1/2 + ... + 1/n`.
//!
//! Run with `cargo run --example discrete_neighborhoods`.

use snlab::space::{closed_neighborhood, discrete_neighborhood, distance_levels};
use snlab::zoo::Harmonic;
use snlab::{Dist, MetricSpace, PointSet};

fn main() -> snlab::Result<()> {
    let h = Harmonic::new();
    let a: PointSet<u64> = (1..=5).collect();

    let levels = distance_levels(&h, &a, 3)?;
    println!("first distance levels of A_5:");
    for (d, members) in levels.levels.iter().zip(&levels.members) {
        println!("  {d:>8}  {:?}", members.labels(&h));
    }

    // the discrete neighborhood only ever adds the next k points
    for k in [1, 2, 5] {
        let n = discrete_neighborhood(&h, &a, k)?;
        println!("dN_{k}(A_5) = {:?}", n.dn.labels(&h));
    }

    // while the closed 1-neighborhood is much larger
    let c = closed_neighborhood(&h, &a, &Dist::one())?;
    println!("|cN_1(A_5)| = {} (last point {})", c.len(), h.label(&c.to_vec()[c.len() - 1]));
    Ok(())
}
