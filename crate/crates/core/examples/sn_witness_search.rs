//! Looking for sets with small discrete boundary (property SN), including the
//! tree with a ray attached, where such sets exist only along the ray.
//!
//! Run with `cargo run --release --example sn_witness_search`.

use snlab::isoperimetry::{sn_witness_search, SnSearchOptions, SnVerdict};
use snlab::zoo::{RayPoint, TreePlusRay};
use snlab::Dist;

fn main() -> snlab::Result<()> {
    let space = TreePlusRay::new(3)?;
    let epsilon = Dist::ratio(1, 20);
    for (name, seed) in [("ray", RayPoint::Ray(200)), ("tree", RayPoint::Tree(vec![0, 1, 1]))] {
        let options =
            SnSearchOptions { epsilon: epsilon.clone(), seeds: vec![seed], n_max: 40, greedy_moves: 0, extra: vec![] };
        let search = sn_witness_search(&space, 1, &options)?;
        let best = search.records.iter().map(|r| r.quotient.clone()).min().expect("records");
        match &search.verdict {
            SnVerdict::WitnessedBelow { record, .. } => {
                println!("seeded in the {name}: |A| = {} with quotient {}", search.records[*record].set_size, best)
            }
            SnVerdict::Inconclusive { reason } => println!("seeded in the {name}: best {best}; {reason}"),
        }
    }
    Ok(())
}
