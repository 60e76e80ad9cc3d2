//! Acceptance criteria. Runs without the libtest harness and prints one
//! `PASS`/`FAIL` line per criterion; exits nonzero if any fails.

mod common;

use std::collections::BTreeSet;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use snlab::embeddability::{covering_estimate, schoenberg_subset, schoenberg_test_squared, GramVerdict};
use snlab::io::load_graph;
use snlab::isoperimetry::{amenability_cgh_test, k_quotient, CghOptions};
use snlab::local_graph::LocalGraph;
use snlab::metric_graph::{find_tripod, graph_boundary, induced_metric, validate_metric_graph};
use snlab::space::{closed_neighborhood, discrete_neighborhood};
use snlab::zoo::{
    random_regular_graph, BoxSpace, FiniteMetric, FreeGroup, Harmonic, Lattice, RegularTree, WeightedTree,
};
use snlab::zoom::{growth_classify, zoom_profile, GrowthVerdict};
use snlab::{Dist, MetricSpace, PointSet};

use common::*;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, bool);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn data(name: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn harmonic_neighborhoods() -> Outcome {
    let h = Harmonic::new();
    let checked: usize = (1..=200u64)
        .into_par_iter()
        .map(|n| -> Result<usize, String> {
            let a: PointSet<u64> = (1..=n).collect();
            for k in 0..=20u64 {
                let got = discrete_neighborhood(&h, &a, k as usize).map_err(e)?.dn;
                let want: PointSet<u64> = (1..=n + k).collect();
                ensure(got == want, format!("dN_{k}(A_{n}) has {} points, expected {}", got.len(), n + k))?;
            }
            Ok(21)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(format!("{checked} pairs (n <= 200, k <= 20) exact"))
}

fn harmonic_cgh_exhaustive() -> Outcome {
    let h = Harmonic::new();
    let window: PointSet<u64> = (1..=12).collect();
    let res = amenability_cgh_test(&h, &Dist::one(), &CghOptions { window: Some(window), ..Default::default() })
        .map_err(e)?;
    ensure(res.checked == 4095, format!("checked {} subsets", res.checked))?;
    ensure(res.exceptions == 0, format!("{} subsets with |cN_1(A)| < 2|A|", res.exceptions))?;
    ensure(!res.verdict.is_witness(), "a witness was reported")?;
    // oracle: x_m with m <= 40 covers cN_1 of any A inside x_1..x_12
    let far: Vec<u64> = (1..=40).collect();
    ensure(h.distance(&12, &40) > Dist::one(), "oracle range too short")?;
    let pts: Vec<u64> = (1..=12).collect();
    let oracle_exceptions = (1u64..4096)
        .into_par_iter()
        .filter(|&mask| {
            let a = subset(&pts, mask);
            let n = far.iter().filter(|x| dist_to_set(&h, x, &a) <= Dist::one()).count();
            n < 2 * a.len()
        })
        .count();
    ensure(oracle_exceptions == 0, format!("oracle found {oracle_exceptions} exceptions"))?;
    Ok("4095 subsets, 0 exceptions (library and direct count)".into())
}

fn chain_oracle() -> Outcome {
    let spaces = truncations(12);
    let mut total = 0;
    for (name, m) in &spaces {
        let pts: Vec<usize> = (0..m.len()).collect();
        let mismatches: usize = (1u64..(1 << pts.len()))
            .into_par_iter()
            .map(|mask| {
                let a = subset(&pts, mask);
                let set: PointSet<usize> = a.iter().copied().collect();
                (0..=6)
                    .filter(|&k| {
                        let got: BTreeSet<usize> =
                            discrete_neighborhood(m, &set, k).expect("finite").dn.iter().copied().collect();
                        got != chain_neighborhood(m, &a, k)
                    })
                    .count()
            })
            .sum();
        ensure(mismatches == 0, format!("{name}: {mismatches} mismatches"))?;
        total += ((1usize << pts.len()) - 1) * 7;
    }
    Ok(format!("{} spaces, {total} (A, k) pairs, 0 mismatches", spaces.len()))
}

fn shortcut_on<G: LocalGraph>(g: &G, window: &[G::Point], rng: &mut ChaCha8Rng) -> Result<(), String> {
    for _ in 0..500 {
        let size = rng.random_range(1..=8);
        let a: Vec<G::Point> = window.choose_multiple(rng, size).cloned().collect();
        let k = rng.random_range(1..=5);
        let set: PointSet<G::Point> = a.iter().cloned().collect();
        let got: BTreeSet<G::Point> = discrete_neighborhood(g, &set, k).map_err(e)?.db.iter().cloned().collect();
        let mut want = hop_ball(g, &a, k);
        want.retain(|x| !set.contains(x));
        ensure(got == want, format!("{}: dB_{k} differs for |A| = {}", g.name(), a.len()))?;
        let kd = Dist::from_u64(k as u64);
        ensure(want.iter().all(|x| dist_to_set(g, x, &a) <= kd), "oracle point beyond k")?;
    }
    Ok(())
}

fn graph_shortcut() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let z = Lattice::new(1).map_err(e)?;
    let zw: Vec<Vec<i64>> = (-100..100).map(|i| vec![i]).collect();
    shortcut_on(&z, &zw, &mut rng)?;
    let z2 = Lattice::new(2).map_err(e)?;
    let z2w: Vec<Vec<i64>> = (-7..7).flat_map(|i| (-7..7).map(move |j| vec![i, j])).collect();
    shortcut_on(&z2, &z2w, &mut rng)?;
    let t = RegularTree::new(3).map_err(e)?;
    let tw: Vec<Vec<u8>> = hop_ball(&t, &[t.base_point()], 6).into_iter().collect();
    shortcut_on(&t, &tw, &mut rng)?;
    Ok(format!("windows of {}, {} and {} vertices, 500 samples each", zw.len(), z2w.len(), tw.len()))
}

fn lemma_certification() -> Outcome {
    let files = ["tripod111.json", "semi_tripod_111_1.json", "semi_tripod_234_4.json", "semi_tripod_122_2.json"];
    let mut eigs = Vec::new();
    for f in files {
        let g = load_graph(&data(f)).map_err(e)?;
        ensure(validate_metric_graph(&g).is_valid(), format!("{f} is not a metric graph"))?;
        let m = induced_metric(&g).map_err(e)?;
        let r = schoenberg_subset(&m, &[0, 1, 2, 3], 1e-8).map_err(e)?;
        ensure(r.verdict == GramVerdict::NotEmbeddable, format!("{f}: {:?}", r.verdict))?;
        ensure(r.min_eigenvalue < -1e-8, format!("{f}: min eigenvalue {}", r.min_eigenvalue))?;
        let exact = r.exact.as_ref().ok_or(format!("{f}: no exact check"))?;
        ensure(
            !exact.positive_semidefinite && exact.negative_value.as_ref().is_some_and(Dist::is_negative),
            format!("{f}: exact minors"),
        )?;
        eigs.push(format!("{:.3}", r.min_eigenvalue));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let mut xs: Vec<i64> = (-50..=50).collect::<Vec<_>>().choose_multiple(&mut rng, 4).copied().collect();
        xs.sort();
        let r = schoenberg_subset(&FiniteMetric::from_points_on_line(&xs), &[0, 1, 2, 3], 1e-8).map_err(e)?;
        ensure(r.verdict == GramVerdict::Embeddable, format!("line {xs:?}: {:?}", r.verdict))?;
    }
    let grid: Vec<(i64, i64)> = (-5..=5).flat_map(|i| (-5..=5).map(move |j| (i, j))).collect();
    for _ in 0..50 {
        let p: Vec<(i64, i64)> = grid.choose_multiple(&mut rng, 4).copied().collect();
        let sq: Vec<Vec<Dist>> = p
            .iter()
            .map(|a| p.iter().map(|b| Dist::from_int((a.0 - b.0).pow(2) + (a.1 - b.1).pow(2))).collect())
            .collect();
        let names = (0..4).map(|i| format!("p{i}")).collect();
        let r = schoenberg_test_squared(names, &sq, 1e-8).map_err(e)?;
        ensure(r.verdict == GramVerdict::Embeddable, format!("plane {p:?}: {:?}", r.verdict))?;
    }
    Ok(format!("corpus min eigenvalues [{}]; 100 Euclidean samples embeddable", eigs.join(", ")))
}

fn containment_on<G: LocalGraph>(g: &G, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let window: Vec<G::Point> = window(g, 40);
    for _ in 0..100 {
        let size = rng.random_range(1..=window.len().min(6));
        let a: PointSet<G::Point> = window.choose_multiple(rng, size).cloned().collect();
        let k = rng.random_range(1..=4);
        let b = graph_boundary(g, &a, k).map_err(e)?;
        ensure(b.contained(), format!("{}: dB_{k}(A) not inside cB_{k}(A)", g.name()))?;
    }
    Ok(())
}

fn tripod_finder() -> Outcome {
    let t = RegularTree::new(3).map_err(e)?;
    let w = find_tripod(&t, &t.base_point(), 4).map_err(e)?.witness.ok_or("no tripod in the tree")?;
    ensure(is_tripod(&t, &w.center, &w.arms), "tree witness fails the definition")?;
    let z2 = Lattice::new(2).map_err(e)?;
    for root in [vec![0, 0], vec![3, -2]] {
        let w = find_tripod(&z2, &root, 4).map_err(e)?.witness.ok_or("no tripod in Z^2")?;
        ensure(is_tripod(&z2, &w.center, &w.arms), "Z^2 witness fails the definition")?;
    }
    let z = Lattice::new(1).map_err(e)?;
    ensure(find_tripod(&z, &vec![0], 30).map_err(e)?.witness.is_none(), "tripod reported in Z")?;

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut graphs = 0;
    for f in [
        "tripod111.json",
        "semi_tripod_111_1.json",
        "semi_tripod_234_4.json",
        "semi_tripod_122_2.json",
        "hexagon.edges",
    ] {
        let g = load_graph(&data(f)).map_err(e)?;
        ensure(validate_metric_graph(&g).is_valid(), format!("{f} invalid"))?;
        containment_on(&induced_metric(&g).map_err(e)?, &mut rng)?;
        graphs += 1;
    }
    let rr = random_regular_graph(30, 3, 2).map_err(e)?;
    ensure(validate_metric_graph(&rr).is_valid(), "unit graph invalid")?;
    containment_on(&induced_metric(&rr).map_err(e)?, &mut rng)?;
    containment_on(&WeightedTree::ivanov(), &mut rng)?;
    containment_on(&z2, &mut rng)?;
    Ok(format!("tripods in the tree and Z^2, none in Z; containment on {} graphs", graphs + 3))
}

fn growth_and_zoom() -> Outcome {
    let f2 = FreeGroup::new(2).map_err(e)?;
    let ball = hop_ball(&f2, &[f2.base_point()], 10);
    let by_len = count_by(ball.iter().map(|w| w.len()));
    let mut total = 0;
    for n in 0..=10u32 {
        total += by_len.get(&(n as usize)).copied().unwrap_or(0);
        ensure(total == 2 * 3usize.pow(n) - 1, format!("|B({n})| = {total}"))?;
    }
    let c = growth_classify(&f2, 10).map_err(e)?;
    ensure(c.ball_sizes.iter().enumerate().all(|(n, &s)| s == 2 * 3usize.pow(n as u32) - 1), "classifier ball sizes")?;
    let GrowthVerdict::Exponential { rate } = c.verdict else { return Err(format!("F_2: {:?}", c.verdict)) };
    ensure((2.8..=3.0).contains(&rate), format!("F_2 rate {rate}"))?;
    let z2 = Lattice::new(2).map_err(e)?;
    let c = growth_classify(&z2, 30).map_err(e)?;
    let GrowthVerdict::Polynomial { degree } = c.verdict else { return Err(format!("Z^2: {:?}", c.verdict)) };
    ensure((1.8..=2.2).contains(&degree), format!("Z^2 degree {degree}"))?;
    let zf = zoom_profile(&f2, &f2.base_point(), 1, 10).map_err(e)?;
    ensure(zf.running_inf >= Dist::from_int(3), format!("F_2 running inf {}", zf.running_inf))?;
    let z = Lattice::new(1).map_err(e)?;
    let zz = zoom_profile(&z, &vec![0], 1, 100).map_err(e)?;
    ensure(zz.running_inf <= Dist::ratio(102, 100), format!("Z running inf {}", zz.running_inf))?;
    Ok(format!(
        "F_2 rate {rate:.3}, Z^2 degree {degree:.3}, F_2 zoom inf {:.4}, Z zoom inf {:.4}",
        zf.running_inf.to_f64(),
        zz.running_inf.to_f64()
    ))
}

fn covering() -> Outcome {
    let t = RegularTree::new(3).map_err(e)?;
    let c = covering_estimate(&t, &t.base_point(), &Dist::from_int(4)).map_err(e)?;
    ensure(c.packing_size >= 24, format!("tree packing {}", c.packing_size))?;
    // explicit leaves: one depth-8 descendant below each depth-4 vertex
    let leaves: Vec<Vec<u8>> = hop_ball(&t, &[t.base_point()], 4)
        .into_iter()
        .filter(|v| v.len() == 4)
        .map(|mut v| {
            v.extend([0, 0, 0, 0]);
            v
        })
        .collect();
    ensure(leaves.len() == 24, format!("{} depth-4 vertices", leaves.len()))?;
    for (i, a) in leaves.iter().enumerate() {
        for b in &leaves[i + 1..] {
            ensure(t.distance(a, b) > Dist::from_int(8), "leaf packing not separated")?;
        }
    }
    let iv = WeightedTree::ivanov();
    let mut covers = Vec::new();
    for t in [10, 100, 1000] {
        let c = covering_estimate(&iv, &iv.base_point(), &Dist::from_int(t)).map_err(e)?;
        ensure(c.greedy_cover_size <= 8, format!("weighted tree cover {} at t = {t}", c.greedy_cover_size))?;
        covers.push(c.greedy_cover_size.to_string());
    }
    Ok(format!("tree packing {}, weighted tree covers [{}]", c.packing_size, covers.join(", ")))
}

fn box_witnesses() -> Outcome {
    // components G_1..G_9, so that F^n (which uses G_{n+1}) exists for n <= 8
    let comps = (1..=9)
        .map(|n| random_regular_graph(1 << (n + 3), 4, 100 + n as u64))
        .collect::<Result<Vec<_>, _>>()
        .map_err(e)?;
    let space = BoxSpace::new(comps).map_err(e)?;
    let mut summary = Vec::new();
    for k in 1..=3 {
        let family = space.witness_family(k).map_err(e)?;
        ensure(family.len() == 8, format!("{} witnesses", family.len()))?;
        let q: Vec<f64> = family
            .iter()
            .map(|w| k_quotient(&space, &w.set, k).map(|r| r.quotient.to_f64()))
            .collect::<Result<_, _>>()
            .map_err(e)?;
        ensure(q.windows(2).all(|w| w[1] < w[0]), format!("k = {k}: not decreasing {q:?}"))?;
        ensure(q[7] < 0.05, format!("k = {k}: quotient {} at n = 8", q[7]))?;
        for w in family.iter().take(4) {
            let c = closed_neighborhood(&space, &w.set, &Dist::from_u64(k as u64)).map_err(e)?;
            // the center of the removed ball is at distance k + 1, so the
            // neighborhood stays inside G_1..G_{n+1} without reaching it
            let union: PointSet<(usize, usize)> = (0..=w.n).flat_map(|i| space.component_points(i)).collect();
            let added = c.difference(&w.set);
            ensure(c.is_subset(&union), format!("cN_{k}(F^{}) leaves G_1..G_{}", w.n, w.n + 1))?;
            ensure(
                added.len() < w.removed && !added.contains(&(w.n, 0)),
                format!("cN_{k}(F^{}) adds {} points", w.n, added.len()),
            )?;
        }
        summary.push(format!("k={k}: {:.4}", q[7]));
    }
    Ok(format!("decreasing to [{}] at n = 8", summary.join(", ")))
}

fn cli_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(e)?;
    let tripod = data("tripod111.json");
    let runs: Vec<Vec<String>> = vec![
        "profile --space harmonic --k 3 --family nested --n-max 200 --format csv"
            .split(' ')
            .map(String::from)
            .collect(),
        vec!["embed-check".into(), "--file".into(), tripod.display().to_string()],
        "zoom --space free-group --rank 2 --k 1 --horizon 10".split(' ').map(String::from).collect(),
        "growth-profile --space weighted-tree --horizon 12 --emit plot-data".split(' ').map(String::from).collect(),
        "amenability --test cgh --space integer-lattice --dim 2 --k 2".split(' ').map(String::from).collect(),
    ];
    for args in &runs {
        let mut outputs = Vec::new();
        for i in 0..3 {
            let out_path = dir.path().join(format!("run{i}.out"));
            let o = Command::new(env!("CARGO_BIN_EXE_snlab"))
                .args(args)
                .arg("--output")
                .arg(&out_path)
                .output()
                .map_err(e)?;
            ensure(o.status.success(), format!("`{}` failed: {}", args.join(" "), String::from_utf8_lossy(&o.stderr)))?;
            let mut bytes = std::fs::read(&out_path).map_err(e)?;
            if let Ok(plot) = std::fs::read(out_path.with_extension("plot.csv")) {
                bytes.extend(plot);
            }
            outputs.push((o.stdout, bytes));
        }
        ensure(outputs.windows(2).all(|w| w[0] == w[1]), format!("`{}` differs between runs", args.join(" ")))?;
    }
    Ok(format!("{} commands x 3 runs byte-identical", runs.len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("1 harmonic discrete neighborhoods", harmonic_neighborhoods, true),
        ("2 harmonic exhaustive closed-neighborhood test", harmonic_cgh_exhaustive, true),
        ("3 chain oracle equivalence", chain_oracle, false),
        ("4 graph shortcut", graph_shortcut, false),
        ("5 tripod Gram certification", lemma_certification, false),
        ("6 tripod finder and containment", tripod_finder, false),
        ("7 growth and zoom separation", growth_and_zoom, true),
        ("8 covering and packing", covering, false),
        ("9 box space witnesses", box_witnesses, false),
        ("10 CLI determinism", cli_determinism, false),
    ];
    let limits = [
        Duration::from_secs(10),
        Duration::from_secs(30),
        Duration::ZERO,
        Duration::ZERO,
        Duration::ZERO,
        Duration::ZERO,
        Duration::from_secs(60),
    ];
    let mut failed = 0;
    for (i, (name, run, timed)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let result = match result {
            Ok(msg) if timed && elapsed > limits[i] => Err(format!("{msg}; took {elapsed:.2?}, limit {:?}", limits[i])),
            r => r,
        };
        let time = if timed { format!(" [{elapsed:.2?}]") } else { String::new() };
        match result {
            Ok(msg) => println!("PASS {name}{time}: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL {name}{time}: {msg}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
