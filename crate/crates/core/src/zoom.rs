//! Zoom constants: ratios `|dN_{nk}(x)| / |dN_{(n-1)k}(x)|` of successive
//! discrete neighborhoods of a point, and a growth classifier for word
//! metrics.

use serde::Serialize;

use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::space::{distance_levels, MetricSpace, PointSet};

/// Sizes `|dN_j({x})|` for `j = 0..=m`, constant after a finite space runs out
/// of levels.
fn neighborhood_sizes<S: MetricSpace>(space: &S, x: &S::Point, m: usize) -> Result<(Vec<usize>, Vec<Dist>)> {
    let levels = distance_levels(space, &PointSet::singleton(x.clone()), m)?;
    let mut sizes = Vec::with_capacity(m + 1);
    let mut total = 0;
    for j in 0..=m {
        if let Some(members) = levels.members.get(j) {
            total += members.len();
        }
        sizes.push(total);
    }
    Ok((sizes, levels.levels))
}

/// Length of the tail window used for limsup surrogates: the last
/// `ceil(horizon / 3)` entries.
pub fn tail_len(horizon: usize) -> usize {
    horizon.div_ceil(3).max(1)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZoomRow {
    pub n: usize,
    pub size: usize,
    pub ratio: Dist,
    pub running_inf: Dist,
}

/// Zoom ratios around one point for one `k`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZoomProfile {
    pub base: String,
    pub k: usize,
    pub horizon: usize,
    /// `|dN_0({x})|`.
    pub initial_size: usize,
    pub rows: Vec<ZoomRow>,
    /// Infimum of the ratios up to the horizon, an upper bound for the
    /// infimum over all `n`.
    pub running_inf: Dist,
    /// Supremum of the ratios over `tail_window`, a surrogate for the limsup.
    pub tail_sup: Dist,
    pub tail_window: (usize, usize),
}

impl ZoomProfile {
    pub fn ratios(&self) -> Vec<Dist> {
        self.rows.iter().map(|r| r.ratio.clone()).collect()
    }
}

/// Ratios `|dN_{nk}(x)| / |dN_{(n-1)k}(x)|` for `n = 1..=horizon`.
pub fn zoom_profile<S: MetricSpace>(space: &S, x: &S::Point, k: usize, horizon: usize) -> Result<ZoomProfile> {
    if k == 0 || horizon == 0 {
        return Err(Error::precondition("k and horizon must be at least 1"));
    }
    let (sizes, _) = neighborhood_sizes(space, x, k * horizon)?;
    let mut rows = Vec::with_capacity(horizon);
    let mut inf: Option<Dist> = None;
    for n in 1..=horizon {
        let ratio = Dist::ratio(sizes[n * k] as i64, sizes[(n - 1) * k] as i64);
        let running = match inf {
            Some(i) if i <= ratio => i,
            _ => ratio.clone(),
        };
        inf = Some(running.clone());
        rows.push(ZoomRow { n, size: sizes[n * k], ratio, running_inf: running });
    }
    let t = tail_len(horizon);
    let tail_sup = rows[horizon - t..].iter().map(|r| r.ratio.clone()).max().expect("nonempty tail");
    Ok(ZoomProfile {
        base: space.label(x),
        k,
        horizon,
        initial_size: sizes[0],
        running_inf: inf.expect("horizon >= 1"),
        tail_sup,
        tail_window: (horizon - t + 1, horizon),
        rows,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointZoom {
    pub base: String,
    /// `sup_k` of the running infima.
    pub zeta_lower: Dist,
    /// `sup_k` of the tail suprema.
    pub zeta_upper: Dist,
    pub ks: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZoomAggregate {
    pub points: Vec<PointZoom>,
    /// `sup_x` of `zeta_lower`.
    pub zeta_lower_plus: Dist,
    /// `sup_x` of `zeta_upper`.
    pub zeta_upper_plus: Dist,
    pub window: String,
}

/// Suprema over the given `k` and points, keeping first-seen point order.
pub fn zoom_aggregate(profiles: &[ZoomProfile]) -> Result<ZoomAggregate> {
    if profiles.is_empty() {
        return Err(Error::precondition("no zoom profiles to aggregate"));
    }
    let mut points: Vec<PointZoom> = Vec::new();
    for p in profiles {
        match points.iter_mut().find(|z| z.base == p.base) {
            Some(z) => {
                z.zeta_lower = z.zeta_lower.clone().max(p.running_inf.clone());
                z.zeta_upper = z.zeta_upper.clone().max(p.tail_sup.clone());
                z.ks.push(p.k);
            }
            None => points.push(PointZoom {
                base: p.base.clone(),
                zeta_lower: p.running_inf.clone(),
                zeta_upper: p.tail_sup.clone(),
                ks: vec![p.k],
            }),
        }
    }
    let zeta_lower_plus = points.iter().map(|z| z.zeta_lower.clone()).max().expect("nonempty");
    let zeta_upper_plus = points.iter().map(|z| z.zeta_upper.clone()).max().expect("nonempty");
    let horizons: Vec<usize> = profiles.iter().map(|p| p.horizon).collect();
    let window = format!(
        "{} profile(s), horizons {}..={}",
        profiles.len(),
        horizons.iter().min().expect("nonempty"),
        horizons.iter().max().expect("nonempty")
    );
    Ok(ZoomAggregate { points, zeta_lower_plus, zeta_upper_plus, window })
}

// ---------------------------------------------------------------------------
// growth classification

/// Tail nth roots at or above this value indicate exponential growth.
pub const EXPONENTIAL_MARGIN: f64 = 1.05;

/// Largest spread of tail log-log slopes accepted as polynomial growth.
pub const SLOPE_DRIFT_TOLERANCE: f64 = 0.1;

const MIN_HORIZON: usize = 6;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum GrowthVerdict {
    Polynomial { degree: f64 },
    Exponential { rate: f64 },
    Undetermined { reason: String },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthEvidence {
    /// `(ln B(n) - ln B(n-1)) / (ln n - ln(n-1))` for `n >= 2`.
    pub local_slopes: Vec<f64>,
    pub tail_window: (usize, usize),
    pub slope_drift: f64,
    pub tail_min_root: f64,
    /// Sphere size ratios `|S(n)| / |S(n-1)|` over the tail.
    pub tail_sphere_ratios: Vec<f64>,
}

/// Consistency of the verdict with the zoom ratios `B(n) / B(n-1)`; reported,
/// not enforced.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZoomConsistency {
    pub running_inf: f64,
    pub tail_sup: f64,
    pub consistent: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthClassification {
    pub base: String,
    pub horizon: usize,
    /// `|B(n)|` for `n = 0..=horizon`.
    pub ball_sizes: Vec<usize>,
    /// `|B(n)|^(1/n)` for `n = 1..=horizon`.
    pub nth_roots: Vec<f64>,
    pub verdict: GrowthVerdict,
    pub evidence: Option<GrowthEvidence>,
    pub zoom: Option<ZoomConsistency>,
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Classifies the growth of `|B(n)|` around the base point of a space with a
/// word metric (distance levels `0, 1, 2, ...`).
///
/// Polynomial when the local log-log slopes over the last `ceil(horizon/3)`
/// radii vary by less than [`SLOPE_DRIFT_TOLERANCE`] (degree: their mean);
/// exponential when the nth roots over that tail stay at or above
/// [`EXPONENTIAL_MARGIN`] (rate: median tail sphere ratio); undetermined
/// otherwise.
pub fn growth_classify<S: MetricSpace>(space: &S, horizon: usize) -> Result<GrowthClassification> {
    if horizon == 0 {
        return Err(Error::precondition("horizon must be at least 1"));
    }
    let x = space.base_point();
    let (ball_sizes, levels) = neighborhood_sizes(space, &x, horizon)?;
    if levels.iter().enumerate().any(|(i, l)| *l != Dist::from_u64(i as u64)) {
        return Err(Error::precondition("growth classification needs unit-step distance levels (a word metric)"));
    }
    let nth_roots: Vec<f64> = (1..=horizon).map(|n| (ball_sizes[n] as f64).powf(1.0 / n as f64)).collect();
    let mut out = GrowthClassification {
        base: space.label(&x),
        horizon,
        ball_sizes,
        nth_roots,
        verdict: GrowthVerdict::Undetermined { reason: String::new() },
        evidence: None,
        zoom: None,
    };
    if levels.len() < horizon + 1 {
        out.verdict = GrowthVerdict::Undetermined {
            reason: format!("degenerate: balls stop growing at radius {}", levels.len() - 1),
        };
        return Ok(out);
    }
    if horizon < MIN_HORIZON {
        out.verdict =
            GrowthVerdict::Undetermined { reason: format!("horizon below {MIN_HORIZON} is too small for a fit") };
        return Ok(out);
    }
    let b = &out.ball_sizes;
    let local_slopes: Vec<f64> = (2..=horizon)
        .map(|n| ((b[n] as f64).ln() - (b[n - 1] as f64).ln()) / ((n as f64).ln() - ((n - 1) as f64).ln()))
        .collect();
    let t = tail_len(horizon).min(horizon - 1);
    let tail_start = horizon - t + 1;
    let tail_slopes = &local_slopes[local_slopes.len() - t..];
    let slope_drift = tail_slopes.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - tail_slopes.iter().cloned().fold(f64::INFINITY, f64::min);
    let tail_min_root = out.nth_roots[tail_start - 1..].iter().cloned().fold(f64::INFINITY, f64::min);
    let tail_sphere_ratios: Vec<f64> =
        (tail_start..=horizon).map(|n| (b[n] - b[n - 1]) as f64 / (b[n - 1] - b[n - 2]) as f64).collect();

    let ratios: Vec<f64> = (1..=horizon).map(|n| b[n] as f64 / b[n - 1] as f64).collect();
    let running_inf = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let tail_sup = ratios[tail_start - 1..].iter().cloned().fold(f64::NEG_INFINITY, f64::max);

    out.verdict = if slope_drift < SLOPE_DRIFT_TOLERANCE {
        GrowthVerdict::Polynomial { degree: tail_slopes.iter().sum::<f64>() / t as f64 }
    } else if tail_min_root >= EXPONENTIAL_MARGIN {
        GrowthVerdict::Exponential { rate: median(tail_sphere_ratios.clone()) }
    } else {
        GrowthVerdict::Undetermined {
            reason: format!(
                "slope drift {slope_drift:.3} and tail nth roots down to {tail_min_root:.3} fit neither model"
            ),
        }
    };
    let consistent = match &out.verdict {
        GrowthVerdict::Exponential { .. } => running_inf >= EXPONENTIAL_MARGIN,
        GrowthVerdict::Polynomial { degree } => {
            let s = tail_start as f64;
            tail_sup <= (s / (s - 1.0)).powf(degree + 0.5)
        }
        GrowthVerdict::Undetermined { .. } => true,
    };
    out.zoom = Some(ZoomConsistency { running_inf, tail_sup, consistent });
    out.evidence = Some(GrowthEvidence {
        local_slopes,
        tail_window: (tail_start, horizon),
        slope_drift,
        tail_min_root,
        tail_sphere_ratios,
    });
    Ok(out)
}
