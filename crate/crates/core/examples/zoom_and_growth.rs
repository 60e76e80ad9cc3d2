//! Zoom ratios of neighborhood cardinalities and the polynomial/exponential
//! growth classification.
//!
//! Run with `cargo run --release --example zoom_and_growth`.

use snlab::zoo::{FreeGroup, Lattice, RayPoint, TreePlusRay};
use snlab::zoom::{growth_classify, zoom_aggregate, zoom_profile};

fn main() -> snlab::Result<()> {
    let f = FreeGroup::new(2)?;
    let p = zoom_profile(&f, &vec![], 1, 8)?;
    println!("F_2 zoom: running inf {} tail sup {}", p.running_inf, p.tail_sup);
    println!("F_2 growth: {:?}", growth_classify(&f, 9)?.verdict);

    let z2 = Lattice::new(2)?;
    let p = zoom_profile(&z2, &vec![0, 0], 1, 50)?;
    println!("Z^2 zoom: running inf {:.4}", p.running_inf.to_f64());
    println!("Z^2 growth: {:?}", growth_classify(&z2, 30)?.verdict);

    // the tree side of a tree with a ray looks non-amenable to a local observer
    let t = TreePlusRay::new(4)?;
    let profiles =
        vec![zoom_profile(&t, &RayPoint::Tree(vec![1, 0]), 1, 8)?, zoom_profile(&t, &RayPoint::Ray(500), 1, 8)?];
    for p in &profiles {
        println!("tree plus ray from {}: running inf {:.3}", p.base, p.running_inf.to_f64());
    }
    let a = zoom_aggregate(&profiles)?;
    println!("aggregate over both points: {:.3}", a.zeta_lower_plus.to_f64());
    Ok(())
}
