//! Isoperimetric quotients `|dB_k(A)| / |A|` with the three search strategies.
//!
//! Run with `cargo run --release --example isoperimetric_profile`.

use snlab::isoperimetry::{iso_constant_estimate, k_quotient, nested_family, SearchOptions, Strategy};
use snlab::zoo::{FreeGroup, Harmonic, Lattice};
use snlab::PointSet;

fn main() -> snlab::Result<()> {
    // nested sets in the harmonic space: quotient k/n
    let h = Harmonic::new();
    for r in nested_family(&h, &1, 3, 6)? {
        println!("harmonic A_{}: |dB_3| = {}, quotient {}", r.set_size, r.boundary_size, r.quotient);
    }

    // a ball in the free group keeps a large boundary
    let f = FreeGroup::new(2)?;
    let ball: PointSet<Vec<i8>> = snlab::space::ball(&f, &vec![], &snlab::Dist::from_int(2))?;
    let q = k_quotient(&f, &ball, 1)?;
    println!("F_2 ball of radius 2: {} / {} = {}", q.boundary_size, q.set_size, q.quotient);

    // window-scoped estimates on a segment of Z
    let z = Lattice::new(1)?;
    let window: PointSet<Vec<i64>> = (-7..=7).map(|i| vec![i]).collect();
    for strategy in [Strategy::NestedBalls, Strategy::GreedyLocal, Strategy::Exhaustive] {
        let e = iso_constant_estimate(&z, &window, 1, strategy, &SearchOptions::default())?;
        println!(
            "Z window of 15 points, {strategy:?}: {} ({:?}, certified {}, {} sets evaluated)",
            e.estimate.value, e.estimate.direction, e.estimate.certified, e.evaluated
        );
    }
    Ok(())
}
