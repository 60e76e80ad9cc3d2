//! Ball growth radii, covering estimates, bounded geometry and dyadic growth
//! bands.
//!
//! Run with `cargo run --release --example doubling_and_growth`.

use snlab::embeddability::{ball_growth_profile, covering_estimate, sn_vs_doubling_report, ubg_report};
use snlab::zoo::{FreeGroup, Harmonic, Lattice, RegularTree, WeightedTree};
use snlab::{Dist, MetricSpace};

fn main() -> snlab::Result<()> {
    let h = Harmonic::new();
    let p = ball_growth_profile(&h, &1, 8)?;
    println!("harmonic growth radii: {:?}", p.radii.iter().map(Dist::to_string).collect::<Vec<_>>());
    println!("  polynomial fit {:?}", p.poly_fit);

    let tree = RegularTree::new(3)?;
    let c = covering_estimate(&tree, &tree.base_point(), &Dist::from_int(4))?;
    println!("3-regular tree, t = 4: cover {} balls, packing {}", c.greedy_cover_size, c.packing_size);

    let ivanov = WeightedTree::ivanov();
    for t in [10, 100, 1000] {
        let c = covering_estimate(&ivanov, &ivanov.base_point(), &Dist::from_int(t))?;
        println!("weighted tree, t = {t}: |B(x, 2t)| = {}, cover {}", c.ball_size, c.greedy_cover_size);
    }

    let f = FreeGroup::new(2)?;
    let samples = vec![vec![], vec![1], vec![1, 2], vec![-2, 1, 1]];
    let u = ubg_report(&f, &samples, &[Dist::one(), Dist::from_int(3)])?;
    println!("free group bounded geometry constant on samples: {}", u.constant_estimate);

    let z2 = Lattice::new(2)?;
    let rep = sn_vs_doubling_report(&z2, &vec![0, 0], 0..=3, 1, &[])?;
    for row in rep.rows {
        println!(
            "Z^2 band r = {}: {} radii, expansion {:.3}, cover {}",
            row.r,
            row.band_count,
            row.expansion_factor.unwrap_or(f64::NAN),
            row.cover.greedy_cover_size
        );
    }
    Ok(())
}
