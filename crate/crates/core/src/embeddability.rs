//! Hilbert embeddability of finite subsets, ball growth around a point,
//! covering and packing numbers, and uniform bounded geometry.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, SymmetricEigen};
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::space::{ball, ball_with_distances, discrete_neighborhood, distance_levels, MetricSpace, PointSet};
use crate::zoo::FiniteMetric;

/// Default relative tolerance of the eigenvalue test.
pub const DEFAULT_EIGEN_TOLERANCE: f64 = 1e-8;

/// Largest Gram matrix whose principal minors are all checked exactly.
pub const EXACT_MINOR_LIMIT: usize = 6;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum GramVerdict {
    Embeddable,
    NotEmbeddable,
    /// The smallest eigenvalue is negative but within the tolerance.
    Marginal {
        tolerance: f64,
    },
}

/// Exact positive semidefiniteness check through principal minors.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExactMinorCheck {
    pub positive_semidefinite: bool,
    /// Indices (into the Gram matrix) of a principal minor that is negative.
    pub negative_minor: Option<Vec<usize>>,
    pub negative_value: Option<Dist>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GramCheckResult {
    pub base_point: String,
    pub points: Vec<String>,
    /// `G_ij = (d(x0,xi)^2 + d(x0,xj)^2 - d(xi,xj)^2) / 2` for `i, j >= 1`.
    pub gram: Vec<Vec<Dist>>,
    pub leading_minors: Vec<Dist>,
    pub min_eigenvalue: f64,
    pub max_norm: f64,
    pub tolerance: f64,
    pub exact: Option<ExactMinorCheck>,
    pub verdict: GramVerdict,
}

fn determinant(mut m: Vec<Vec<BigRational>>) -> BigRational {
    let n = m.len();
    let mut det = BigRational::from_integer(1.into());
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !m[r][c].is_zero()) else {
            return BigRational::zero();
        };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        let pivot = m[c][c].clone();
        det *= &pivot;
        for r in c + 1..n {
            if m[r][c].is_zero() {
                continue;
            }
            let f = &m[r][c] / &pivot;
            let (top, bottom) = m.split_at_mut(r);
            for (dst, src) in bottom[0][c..].iter_mut().zip(&top[c][c..]) {
                *dst -= &f * src;
            }
        }
    }
    det
}

fn principal(g: &[Vec<Dist>], idx: &[usize]) -> Vec<Vec<BigRational>> {
    idx.iter().map(|&i| idx.iter().map(|&j| g[i][j].as_rational().clone()).collect()).collect()
}

/// Exact PSD test: a symmetric matrix is PSD iff every principal minor is
/// nonnegative.
fn exact_minors(g: &[Vec<Dist>]) -> ExactMinorCheck {
    let n = g.len();
    for mask in 1u32..(1 << n) {
        let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let det = determinant(principal(g, &idx));
        if det.is_negative() {
            return ExactMinorCheck {
                positive_semidefinite: false,
                negative_minor: Some(idx),
                negative_value: Some(Dist::from_rational(det)),
            };
        }
    }
    ExactMinorCheck { positive_semidefinite: true, negative_minor: None, negative_value: None }
}

fn gram_check(names: Vec<String>, squared: &[Vec<Dist>], tolerance: f64) -> Result<GramCheckResult> {
    let n = names.len();
    if n < 2 {
        return Err(Error::precondition("the Gram test needs at least two points"));
    }
    if !(tolerance >= 0.0 && tolerance.is_finite()) {
        return Err(Error::precondition("tolerance must be a finite nonnegative number"));
    }
    let m = n - 1;
    let gram: Vec<Vec<Dist>> = (1..n)
        .map(|i| {
            (1..n)
                .map(|j| {
                    Dist::from_rational(
                        (squared[0][i].as_rational() + squared[0][j].as_rational() - squared[i][j].as_rational())
                            / BigRational::from_integer(2.into()),
                    )
                })
                .collect()
        })
        .collect();
    let leading_minors =
        (1..=m).map(|s| Dist::from_rational(determinant(principal(&gram, &(0..s).collect::<Vec<_>>())))).collect();
    let floats = DMatrix::from_fn(m, m, |i, j| gram[i][j].to_f64());
    let max_norm = floats.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let min_eigenvalue = SymmetricEigen::new(floats).eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    let exact = (m <= EXACT_MINOR_LIMIT).then(|| exact_minors(&gram));
    let threshold = tolerance * max_norm;
    let verdict = match &exact {
        Some(e) if e.positive_semidefinite => GramVerdict::Embeddable,
        Some(_) => GramVerdict::NotEmbeddable,
        None if min_eigenvalue < -threshold => GramVerdict::NotEmbeddable,
        None if min_eigenvalue < 0.0 => GramVerdict::Marginal { tolerance },
        None => GramVerdict::Embeddable,
    };
    Ok(GramCheckResult {
        base_point: names[0].clone(),
        points: names,
        gram,
        leading_minors,
        min_eigenvalue,
        max_norm,
        tolerance,
        exact,
        verdict,
    })
}

/// Schoenberg's criterion: a finite metric embeds isometrically in Hilbert
/// space iff its Gram matrix based at the first point is positive
/// semidefinite. The metric axioms are checked first.
///
/// Gram matrices of dimension at most [`EXACT_MINOR_LIMIT`] are decided by
/// exact principal minors; larger ones by the smallest eigenvalue against
/// `tolerance` times the largest entry.
pub fn schoenberg_test(names: Vec<String>, distances: &[Vec<Dist>], tolerance: f64) -> Result<GramCheckResult> {
    let metric = FiniteMetric::from_exact(names.clone(), distances.to_vec())?;
    let squared: Vec<Vec<Dist>> = metric.matrix().iter().map(|r| r.iter().map(Dist::square).collect()).collect();
    gram_check(names, &squared, tolerance)
}

/// Same as [`schoenberg_test`] with squared distances as input, which keeps
/// Euclidean point sets with integer coordinates exact. Only symmetry, the
/// zero diagonal and positivity are checked.
pub fn schoenberg_test_squared(names: Vec<String>, squared: &[Vec<Dist>], tolerance: f64) -> Result<GramCheckResult> {
    let n = names.len();
    if squared.len() != n || squared.iter().any(|r| r.len() != n) {
        return Err(Error::MetricAxiom(format!("distance matrix must be {n} x {n}")));
    }
    for i in 0..n {
        if !squared[i][i].is_zero() {
            return Err(Error::MetricAxiom(format!("d({0},{0}) must be 0", names[i])));
        }
        for j in 0..i {
            if squared[i][j] != squared[j][i] || !squared[i][j].is_positive() {
                return Err(Error::MetricAxiom(format!("bad distance between {} and {}", names[i], names[j])));
            }
        }
    }
    gram_check(names, squared, tolerance)
}

/// [`schoenberg_test`] on a finite subset of a space.
pub fn schoenberg_subset<S: MetricSpace>(space: &S, points: &[S::Point], tolerance: f64) -> Result<GramCheckResult> {
    let names = points.iter().map(|p| space.label(p)).collect();
    let d: Vec<Vec<Dist>> = points.iter().map(|p| points.iter().map(|q| space.distance(p, q)).collect()).collect();
    schoenberg_test(names, &d, tolerance)
}

// ---------------------------------------------------------------------------
// ball growth

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "fit", rename_all = "kebab-case")]
pub enum PolyFit {
    /// Smallest grid exponent `C` with `r_n <= n^C` for every computed `n`.
    Exponent {
        c: f64,
    },
    SuperPolynomial {
        horizon: usize,
    },
}

/// `|Γ^x ∩ [2^r, 2^(r+1)]|`. The band is `complete` when every radius up to
/// `2^(r+1)` was computed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DyadicCount {
    pub r: i64,
    pub count: usize,
    pub complete: bool,
}

/// The radii `r_1 < r_2 < ...` at which the closed ball about `x` grows,
/// with the ball sizes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BallGrowthProfile {
    pub base: String,
    pub radii: Vec<Dist>,
    pub counts: Vec<usize>,
    pub dyadic_counts: Vec<DyadicCount>,
    pub poly_fit: PolyFit,
    /// The space is finite and has fewer than `horizon` radii.
    pub exhausted: bool,
}

/// The exponent grid `0.25, 0.5, ..., 8.0`.
pub fn poly_grid() -> impl Iterator<Item = f64> {
    (1..=32).map(|i| i as f64 * 0.25)
}

pub fn poly_fit(radii: &[Dist]) -> PolyFit {
    let r: Vec<f64> = radii.iter().map(Dist::to_f64).collect();
    for c in poly_grid() {
        if r.iter().enumerate().all(|(i, v)| *v <= ((i + 1) as f64).powf(c)) {
            return PolyFit::Exponent { c };
        }
    }
    PolyFit::SuperPolynomial { horizon: radii.len() }
}

fn dyadic(radii: &[Dist]) -> Vec<DyadicCount> {
    let (Some(first), Some(last)) = (radii.first(), radii.last()) else {
        return Vec::new();
    };
    let lo = first.floor_log2().expect("radii are positive");
    let hi = last.floor_log2().expect("radii are positive");
    (lo..=hi)
        .map(|r| {
            let (a, b) = (Dist::pow2(r), Dist::pow2(r + 1));
            DyadicCount { r, count: radii.iter().filter(|x| **x >= a && **x <= b).count(), complete: b <= *last }
        })
        .collect()
}

/// Ball growth profile of `x` over the first `horizon` radii.
pub fn ball_growth_profile<S: MetricSpace>(space: &S, x: &S::Point, horizon: usize) -> Result<BallGrowthProfile> {
    if horizon == 0 {
        return Err(Error::precondition("horizon must be at least 1"));
    }
    let levels = distance_levels(space, &PointSet::singleton(x.clone()), horizon)?;
    let radii: Vec<Dist> = levels.levels[1..].to_vec();
    let mut total = levels.members[0].len();
    let counts = levels.members[1..]
        .iter()
        .map(|m| {
            total += m.len();
            total
        })
        .collect();
    Ok(BallGrowthProfile {
        base: space.label(x),
        dyadic_counts: dyadic(&radii),
        poly_fit: poly_fit(&radii),
        radii,
        counts,
        exhausted: levels.exhausted,
    })
}

// ---------------------------------------------------------------------------
// covering and packing

/// Window estimate of how many `t`-balls cover `B(x, 2t)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverEstimate {
    pub center: String,
    pub t: Dist,
    pub ball_size: usize,
    /// Size of a greedy cover by `t`-balls centered in `B(x, 2t)`: an upper
    /// bound for the covering number.
    pub greedy_cover_size: usize,
    pub cover_centers: Vec<String>,
    /// Size of a set in `B(x, 2t)` with pairwise distances `> 2t`: a lower
    /// bound for the covering number.
    pub packing_size: usize,
    pub packing: Vec<String>,
    pub ratio_to_ball: f64,
}

/// Greedy cover (largest number of newly covered points first, ties to the
/// canonical smallest center) and farthest-first greedy packing of
/// `B(x, 2t)`.
pub fn covering_estimate<S: MetricSpace>(space: &S, x: &S::Point, t: &Dist) -> Result<CoverEstimate> {
    if t.is_negative() {
        return Err(Error::precondition("t must be nonnegative"));
    }
    let big = ball_with_distances(space, x, &t.double())?;
    let points: Vec<S::Point> = big.iter().map(|(p, _)| p.clone()).collect();
    let index: BTreeMap<&S::Point, usize> = points.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let reach: Vec<Vec<usize>> = points
        .iter()
        .map(|c| Ok(ball(space, c, t)?.iter().filter_map(|p| index.get(p).copied()).collect()))
        .collect::<Result<_>>()?;

    let mut covered = vec![false; points.len()];
    let mut remaining = points.len();
    let mut centers = Vec::new();
    while remaining > 0 {
        let (best, gain) = reach
            .iter()
            .enumerate()
            .map(|(i, r)| (i, r.iter().filter(|&&p| !covered[p]).count()))
            .fold((0, 0), |acc, c| if c.1 > acc.1 { c } else { acc });
        for &p in &reach[best] {
            covered[p] = true;
        }
        remaining -= gain;
        centers.push(best);
    }

    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| big[b].1.cmp(&big[a].1).then(a.cmp(&b)));
    let mut packing: Vec<usize> = Vec::new();
    for i in order {
        if packing.iter().all(|&j| space.distance(&points[i], &points[j]) > t.double()) {
            packing.push(i);
        }
    }
    packing.sort_unstable();
    let label = |i: &usize| space.label(&points[*i]);
    Ok(CoverEstimate {
        center: space.label(x),
        t: t.clone(),
        ball_size: points.len(),
        greedy_cover_size: centers.len(),
        cover_centers: centers.iter().map(label).collect(),
        packing_size: packing.len(),
        packing: packing.iter().map(label).collect(),
        ratio_to_ball: centers.len() as f64 / points.len() as f64,
    })
}

// ---------------------------------------------------------------------------
// uniform bounded geometry

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UbgRow {
    pub r: Dist,
    pub largest: String,
    pub largest_size: usize,
    pub smallest: String,
    pub smallest_size: usize,
    pub ratio: f64,
}

/// `max |B(x, r)| / |B(y, r)|` over sampled points and radii, a window
/// estimate of the bounded geometry constant.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UbgReport {
    pub samples: Vec<String>,
    pub rows: Vec<UbgRow>,
    pub max_ratio: f64,
    pub constant_estimate: f64,
}

pub fn ubg_report<S: MetricSpace>(space: &S, samples: &[S::Point], radii: &[Dist]) -> Result<UbgReport> {
    if samples.is_empty() || radii.is_empty() {
        return Err(Error::precondition("need at least one sample point and one radius"));
    }
    let mut rows = Vec::with_capacity(radii.len());
    for r in radii {
        let sizes: Vec<usize> = samples.iter().map(|x| Ok(ball(space, x, r)?.len())).collect::<Result<_>>()?;
        // first index attaining the extreme, for deterministic labels
        let argmax = (0..sizes.len()).fold(0, |b, i| if sizes[i] > sizes[b] { i } else { b });
        let argmin = (0..sizes.len()).fold(0, |b, i| if sizes[i] < sizes[b] { i } else { b });
        rows.push(UbgRow {
            r: r.clone(),
            largest: space.label(&samples[argmax]),
            largest_size: sizes[argmax],
            smallest: space.label(&samples[argmin]),
            smallest_size: sizes[argmin],
            ratio: sizes[argmax] as f64 / sizes[argmin] as f64,
        });
    }
    let max_ratio = rows.iter().map(|r| r.ratio).fold(1.0, f64::max);
    Ok(UbgReport {
        samples: samples.iter().map(|p| space.label(p)).collect(),
        rows,
        max_ratio,
        constant_estimate: max_ratio,
    })
}

// ---------------------------------------------------------------------------
// small neighborhoods against doubling

/// One dyadic scale `[2^r, 2^(r+1)]` of [`sn_vs_doubling_report`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DyadicRow {
    pub r: i64,
    /// `|Γ^x_r|`.
    pub band_count: usize,
    /// `min |dN_k(B_n)| / |B_n|` over balls `B_n = B(x, r_n)` with `r_n` in
    /// the band; `None` for an empty band.
    pub expansion_factor: Option<f64>,
    /// `max |B(c, 2^r)|` over the sampled centers.
    pub k_r_surrogate: usize,
    pub ball_size: usize,
    pub cover: CoverEstimate,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SnDoublingReport {
    pub base: String,
    pub k: usize,
    pub centers: Vec<String>,
    pub rows: Vec<DyadicRow>,
}

/// For each dyadic scale `r` in `r_range`: the number of growth radii in the
/// band, the smallest expansion `|dN_k(B)| / |B|` of balls in the band, a
/// sampled `K_r` and the covering estimate at `t = 2^r`.
pub fn sn_vs_doubling_report<S: MetricSpace>(
    space: &S,
    x: &S::Point,
    r_range: std::ops::RangeInclusive<i64>,
    k: usize,
    centers: &[S::Point],
) -> Result<SnDoublingReport> {
    if k == 0 {
        return Err(Error::precondition("k must be at least 1"));
    }
    let centers: Vec<S::Point> = if centers.is_empty() { vec![x.clone()] } else { centers.to_vec() };
    let mut rows = Vec::new();
    for r in r_range {
        let (lo, hi) = (Dist::pow2(r), Dist::pow2(r + 1));
        let big = ball_with_distances(space, x, &hi)?;
        let mut radii: Vec<Dist> = big.iter().map(|(_, d)| d.clone()).filter(|d| *d >= lo).collect();
        radii.sort();
        radii.dedup();
        let mut expansion: Option<f64> = None;
        for rad in &radii {
            let b = ball(space, x, rad)?;
            let n = discrete_neighborhood(space, &b, k)?.dn.len();
            let f = n as f64 / b.len() as f64;
            expansion = Some(expansion.map_or(f, |e| e.min(f)));
        }
        let k_r_surrogate = centers
            .iter()
            .map(|c| Ok(ball(space, c, &lo)?.len()))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .max()
            .unwrap_or(0);
        rows.push(DyadicRow {
            r,
            band_count: radii.len(),
            expansion_factor: expansion,
            k_r_surrogate,
            ball_size: big.len(),
            cover: covering_estimate(space, x, &lo)?,
        });
    }
    Ok(SnDoublingReport { base: space.label(x), k, centers: centers.iter().map(|c| space.label(c)).collect(), rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo::{FreeGroup, Harmonic, Lattice, RegularTree, WeightedTree};

    fn ints(rows: &[&[i64]]) -> Vec<Vec<Dist>> {
        rows.iter().map(|r| r.iter().map(|&x| Dist::from_int(x)).collect()).collect()
    }

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("p{i}")).collect()
    }

    #[test]
    fn tripod_is_not_embeddable() {
        // arm, center, arm, arm
        let d = ints(&[&[0, 1, 2, 2], &[1, 0, 1, 1], &[2, 1, 0, 2], &[2, 1, 2, 0]]);
        let g = schoenberg_test(names(4), &d, DEFAULT_EIGEN_TOLERANCE).unwrap();
        assert_eq!(g.gram, ints(&[&[1, 2, 2], &[2, 4, 2], &[2, 2, 4]]));
        assert_eq!(g.leading_minors.last(), Some(&Dist::from_int(-4)));
        assert_eq!(g.verdict, GramVerdict::NotEmbeddable);
        assert!(g.min_eigenvalue < -1e-8);
    }

    #[test]
    fn line_points_embed() {
        let pts = [0i64, 1, 3, 7];
        let d: Vec<Vec<Dist>> =
            pts.iter().map(|a| pts.iter().map(|b| Dist::from_u64(a.abs_diff(*b))).collect()).collect();
        let g = schoenberg_test(names(4), &d, DEFAULT_EIGEN_TOLERANCE).unwrap();
        assert_eq!(g.verdict, GramVerdict::Embeddable);
        assert!(g.exact.unwrap().positive_semidefinite);
    }

    #[test]
    fn rejects_non_metric() {
        let d = ints(&[&[0, 1, 5], &[1, 0, 1], &[5, 1, 0]]);
        assert!(matches!(schoenberg_test(names(3), &d, 1e-8), Err(Error::MetricAxiom(_))));
    }

    #[test]
    fn growth_profiles() {
        let z = Lattice::new(1).unwrap();
        let p = ball_growth_profile(&z, &vec![0], 10).unwrap();
        assert_eq!(p.radii, (1..=10).map(Dist::from_int).collect::<Vec<_>>());
        assert_eq!(p.counts, (1..=10).map(|n| 2 * n + 1).collect::<Vec<_>>());
        assert_eq!(p.poly_fit, PolyFit::Exponent { c: 1.0 });
        // powers of two are counted in both adjacent bands
        assert_eq!(p.dyadic_counts[0], DyadicCount { r: 0, count: 2, complete: true });
        assert_eq!(p.dyadic_counts[1], DyadicCount { r: 1, count: 3, complete: true });
        assert!(!p.dyadic_counts.last().unwrap().complete);

        let f = FreeGroup::new(2).unwrap();
        let p = ball_growth_profile(&f, &vec![], 5).unwrap();
        assert_eq!(p.counts, vec![5, 17, 53, 161, 485]);

        let h = Harmonic::new();
        let p = ball_growth_profile(&h, &1, 6).unwrap();
        assert_eq!(p.counts, (2..=7).collect::<Vec<_>>());
        assert_eq!(p.radii[0], Dist::ratio(1, 2));
        assert_eq!(p.dyadic_counts[0].r, -1);
    }

    #[test]
    fn covers_and_packings() {
        let z = Lattice::new(1).unwrap();
        let c = covering_estimate(&z, &vec![0], &Dist::from_int(5)).unwrap();
        assert_eq!(c.ball_size, 21);
        assert!(c.greedy_cover_size <= 3);
        assert!(c.packing_size <= c.greedy_cover_size);

        let t = RegularTree::new(3).unwrap();
        let c = covering_estimate(&t, &vec![], &Dist::from_int(4)).unwrap();
        assert_eq!(c.packing_size, 24);

        let iv = WeightedTree::ivanov();
        for t in [10, 100, 1000] {
            let c = covering_estimate(&iv, &vec![], &Dist::from_int(t)).unwrap();
            assert!(c.greedy_cover_size <= 8, "t = {t}: {}", c.greedy_cover_size);
        }
        let single =
            covering_estimate(&crate::zoo::FiniteMetric::from_points_on_line(&[0, 1]), &0, &Dist::from_int(5)).unwrap();
        assert_eq!(single.greedy_cover_size, 1);
    }

    #[test]
    fn homogeneous_spaces_have_ratio_one() {
        let f = FreeGroup::new(2).unwrap();
        let samples = vec![vec![], vec![1, 2], vec![-2, -2, 1]];
        let r = ubg_report(&f, &samples, &[Dist::one(), Dist::from_int(3)]).unwrap();
        assert_eq!(r.max_ratio, 1.0);
    }
}
