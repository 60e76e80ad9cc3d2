//! Isoperimetric quotients `|dB_k(A)| / |A|`, window-scoped estimates of the
//! isoperimetric constant, witness searches for the small neighborhood
//! property and the two amenability tests (`|cN_k(A)| < 2|A|` and the
//! Følner-type condition on a quasi-lattice).
//!
//! Nothing here claims a property of an infinite space. Every estimate states
//! its direction and the finite window it was computed on.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::space::{closed_neighborhood, discrete_neighborhood, require_nonempty, Arithmetic, MetricSpace, PointSet};

/// Default largest window searched exhaustively.
pub const DEFAULT_EXHAUSTIVE_CAP: usize = 20;

/// Default number of improving moves in greedy local search.
pub const DEFAULT_GREEDY_MOVES: usize = 200;

/// What a reported value bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    UpperBoundOfInf,
    LowerBoundOfInf,
    Estimate,
}

/// A value together with the scope it is valid for.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundEstimate {
    pub value: Dist,
    pub direction: Direction,
    /// The search was exhaustive over `window`.
    pub certified: bool,
    pub window: String,
    pub k: usize,
}

/// `|dB_k(A)| / |A|` for one set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsoQuotientRecord<P: Ord> {
    pub k: usize,
    pub set_size: usize,
    pub boundary_size: usize,
    pub quotient: Dist,
    pub witness: PointSet<P>,
}

impl<P: Ord + Clone> IsoQuotientRecord<P> {
    fn new(k: usize, witness: PointSet<P>, boundary_size: usize) -> Self {
        let set_size = witness.len();
        IsoQuotientRecord {
            k,
            set_size,
            boundary_size,
            quotient: Dist::ratio(boundary_size as i64, set_size as i64),
            witness,
        }
    }
}

/// Search strategy for [`iso_constant_estimate`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    Exhaustive,
    NestedBalls,
    GreedyLocal,
}

impl std::str::FromStr for Strategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exhaustive" => Ok(Strategy::Exhaustive),
            "nested" | "nested-balls" => Ok(Strategy::NestedBalls),
            "greedy" | "greedy-local" => Ok(Strategy::GreedyLocal),
            other => Err(Error::precondition(format!("unknown strategy `{other}`"))),
        }
    }
}

/// `|dB_k(A)| / |A|`.
pub fn k_quotient<S: MetricSpace>(space: &S, a: &PointSet<S::Point>, k: usize) -> Result<IsoQuotientRecord<S::Point>> {
    if k == 0 {
        return Err(Error::precondition("k must be at least 1"));
    }
    require_nonempty(a)?;
    let n = discrete_neighborhood(space, a, k)?;
    Ok(IsoQuotientRecord::new(k, a.clone(), n.db.len()))
}

/// The nested sets `A_n = dN_{n-1}({seed})` for `n = 1..=n_max` with their
/// quotients.
pub fn nested_family<S: MetricSpace>(
    space: &S,
    seed: &S::Point,
    k: usize,
    n_max: usize,
) -> Result<Vec<IsoQuotientRecord<S::Point>>> {
    let start = PointSet::singleton(seed.clone());
    (1..=n_max)
        .map(|n| {
            let a = discrete_neighborhood(space, &start, n - 1)?.dn;
            k_quotient(space, &a, k)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// ratio bookkeeping

/// A candidate set scored by the ratio `num / den`.
#[derive(Clone, Debug)]
struct Scored<P: Ord> {
    set: PointSet<P>,
    num: usize,
    den: usize,
}

fn cmp_ratio(a: (usize, usize), b: (usize, usize)) -> Ordering {
    (a.0 as u128 * b.1 as u128).cmp(&(b.0 as u128 * a.1 as u128))
}

impl<P: Ord> Scored<P> {
    /// Total order: by ratio, then canonical set order.
    fn order(&self, other: &Self) -> Ordering {
        cmp_ratio((self.num, self.den), (other.num, other.den)).then_with(|| self.set.cmp(&other.set))
    }

    fn min(self, other: Self) -> Self {
        if other.order(&self) == Ordering::Less {
            other
        } else {
            self
        }
    }
}

/// Lexicographic comparison of the sorted index lists of two bit masks.
fn cmp_masks(a: u32, b: u32) -> Ordering {
    if a == b {
        return Ordering::Equal;
    }
    let i = (a ^ b).trailing_zeros();
    let above = |m: u32| if i == 31 { 0 } else { m >> (i + 1) };
    if a & (1 << i) != 0 {
        if above(b) == 0 {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    } else if above(a) == 0 {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

#[derive(Clone, Copy, Debug)]
struct MaskScore {
    mask: u32,
    num: usize,
    den: usize,
}

impl MaskScore {
    fn order(&self, other: &Self) -> Ordering {
        cmp_ratio((self.num, self.den), (other.num, other.den)).then_with(|| cmp_masks(self.mask, other.mask))
    }
}

fn pick(a: Option<MaskScore>, b: Option<MaskScore>) -> Option<MaskScore> {
    match (a, b) {
        (Some(x), Some(y)) => Some(if y.order(&x) == Ordering::Less { y } else { x }),
        (x, None) => x,
        (None, y) => y,
    }
}

fn subset_of<P: Clone + Ord>(window: &[P], mask: u32) -> PointSet<P> {
    window.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, p)| p.clone()).collect()
}

fn check_exhaustive_size(len: usize, cap: usize) -> Result<()> {
    if len == 0 {
        return Err(Error::precondition("the window is empty"));
    }
    if len > cap || len > 30 {
        return Err(Error::precondition(format!(
            "exhaustive search over {len} points exceeds the cap of {}",
            cap.min(30)
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// distance tables for exhaustive search

/// Distances from each window point to every point of `cN_R(window)`,
/// replaced by their rank among all distinct values so subsets can be scored
/// with integer comparisons.
struct WindowTable {
    universe_len: usize,
    ranks: Vec<Vec<u32>>,
    values: Vec<Dist>,
    /// Ranks `<= trusted` are complete: every point at that distance from a
    /// subset of the window is in the universe.
    trusted: u32,
}

impl WindowTable {
    fn build<S: MetricSpace>(space: &S, window: &[S::Point], radius: &Dist) -> Result<Self> {
        let found = space.neighborhood(window, radius, space.point_cap())?;
        let whole = space.cardinality() == Some(found.len());
        let universe: Vec<S::Point> = found.into_iter().map(|(p, _)| p).collect();
        let raw: Vec<Vec<Dist>> =
            window.iter().map(|w| universe.iter().map(|u| space.distance(w, u)).collect()).collect();
        let mut values: Vec<Dist> = raw.iter().flatten().cloned().collect();
        values.sort();
        values.dedup();
        let rank = |d: &Dist| values.binary_search(d).expect("value present") as u32;
        let ranks = raw.iter().map(|row| row.iter().map(rank).collect()).collect();
        let trusted = if whole { u32::MAX } else { values.partition_point(|v| v <= radius) as u32 - 1 };
        Ok(WindowTable { universe_len: universe.len(), ranks, values, trusted })
    }

    fn nearest(&self, mask: u32, out: &mut Vec<u32>) {
        out.clear();
        out.resize(self.universe_len, u32::MAX);
        let mut m = mask;
        while m != 0 {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            for (o, r) in out.iter_mut().zip(&self.ranks[i]) {
                if r < o {
                    *o = *r;
                }
            }
        }
    }
}

/// `|dN_k(A)|` from the table, or `None` when the universe is too small to
/// confirm `k + 1` levels.
fn table_dn(table: &WindowTable, mask: u32, k: usize, nearest: &mut Vec<u32>, seen: &mut Vec<bool>) -> Option<usize> {
    table.nearest(mask, nearest);
    seen.clear();
    seen.resize(table.values.len(), false);
    for &r in nearest.iter() {
        if r <= table.trusted {
            seen[r as usize] = true;
        }
    }
    let mut count = 0;
    let mut threshold = None;
    for (r, s) in seen.iter().enumerate() {
        if *s {
            count += 1;
            threshold = Some(r as u32);
            if count == k + 1 {
                break;
            }
        }
    }
    if count < k + 1 && table.trusted != u32::MAX {
        return None;
    }
    let t = threshold.expect("subset points are at distance 0");
    Some(nearest.iter().filter(|&&r| r <= t).count())
}

/// Minimum of `|dB_k(A)| / |A|` over all nonempty `A` in `window`, computed
/// in parallel with a deterministic reduction. Returns the minimizer and the
/// number of subsets evaluated.
pub fn exhaustive_min_quotient<S: MetricSpace>(
    space: &S,
    window: &PointSet<S::Point>,
    k: usize,
    cap: usize,
) -> Result<(IsoQuotientRecord<S::Point>, usize)> {
    if k == 0 {
        return Err(Error::precondition("k must be at least 1"));
    }
    check_exhaustive_size(window.len(), cap)?;
    let points = window.to_vec();
    let total: u32 = ((1u64 << points.len()) - 1) as u32;
    let exact = space.arithmetic() == Arithmetic::ExactRational;
    let table = if exact {
        // radius large enough for each single point to see k + 1 levels
        let mut radius = Dist::zero();
        for p in &points {
            let l = crate::space::distance_levels(space, &PointSet::singleton(p.clone()), k)?;
            radius = radius.max(l.levels.last().cloned().unwrap_or_default());
        }
        Some(WindowTable::build(space, &points, &radius)?)
    } else {
        None
    };

    let best = (1..=total)
        .into_par_iter()
        .map_init(
            || (Vec::new(), Vec::new()),
            |(nearest, seen), mask| -> Result<Option<MaskScore>> {
                let size = mask.count_ones() as usize;
                let dn = match table.as_ref().and_then(|t| table_dn(t, mask, k, nearest, seen)) {
                    Some(dn) => dn,
                    None => discrete_neighborhood(space, &subset_of(&points, mask), k)?.dn.len(),
                };
                Ok(Some(MaskScore { mask, num: dn - size, den: size }))
            },
        )
        .try_reduce(|| None, |a, b| Ok(pick(a, b)))?
        .expect("nonempty window");
    let set = subset_of(&points, best.mask);
    Ok((IsoQuotientRecord::new(k, set, best.num), total as usize))
}

// ---------------------------------------------------------------------------
// nested balls and greedy local search

/// Greedy descent: repeatedly applies the best single add or remove move that
/// strictly lowers the ratio. Ties between moves go to the canonically
/// smallest set.
fn greedy_descent<P, F, M>(start: Scored<P>, score: F, additions: M, max_moves: usize) -> Result<(Scored<P>, usize)>
where
    P: Clone + Ord + Send + Sync,
    F: Fn(&PointSet<P>) -> Result<(usize, usize)> + Sync,
    M: Fn(&PointSet<P>) -> Result<Vec<P>>,
{
    let mut current = start;
    let mut evaluated = 0;
    for _ in 0..max_moves {
        let mut candidates: Vec<PointSet<P>> = Vec::new();
        for p in additions(&current.set)? {
            if !current.set.contains(&p) {
                let mut s = current.set.clone();
                s.insert(p);
                candidates.push(s);
            }
        }
        if current.set.len() > 1 {
            for p in current.set.iter() {
                let mut s = current.set.clone();
                s.remove(p);
                candidates.push(s);
            }
        }
        evaluated += candidates.len();
        let best = candidates
            .into_par_iter()
            .map(|set| score(&set).map(|(num, den)| Some(Scored { set, num, den })))
            .try_reduce(
            || None,
            |a, b| {
                Ok(match (a, b) {
                    (Some(x), Some(y)) => Some(x.min(y)),
                    (x, None) => x,
                    (None, y) => y,
                })
            },
        )?;
        match best {
            Some(b) if cmp_ratio((b.num, b.den), (current.num, current.den)) == Ordering::Less => current = b,
            _ => break,
        }
    }
    Ok((current, evaluated))
}

fn iso_score<S: MetricSpace>(
    space: &S,
    k: usize,
) -> impl Fn(&PointSet<S::Point>) -> Result<(usize, usize)> + Sync + '_ {
    move |a| {
        let n = discrete_neighborhood(space, a, k)?;
        Ok((n.db.len(), a.len()))
    }
}

/// Nested balls `dN_n({w})` that stay inside the window, for every window
/// point `w`.
fn nested_in_window<S: MetricSpace>(
    space: &S,
    window: &PointSet<S::Point>,
    k: usize,
) -> Result<(Scored<S::Point>, usize)> {
    let score = iso_score(space, k);
    let mut best: Option<Scored<S::Point>> = None;
    let mut evaluated = 0;
    for w in window.iter() {
        let start = PointSet::singleton(w.clone());
        let mut previous = 0;
        for n in 0.. {
            let a = discrete_neighborhood(space, &start, n)?.dn;
            if !a.is_subset(window) || a.len() == previous {
                break;
            }
            previous = a.len();
            let (num, den) = score(&a)?;
            evaluated += 1;
            let s = Scored { set: a, num, den };
            best = Some(match best {
                Some(b) => b.min(s),
                None => s,
            });
        }
    }
    Ok((best.expect("window is nonempty"), evaluated))
}

/// Options shared by the searches.
#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub exhaustive_cap: usize,
    pub greedy_moves: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { exhaustive_cap: DEFAULT_EXHAUSTIVE_CAP, greedy_moves: DEFAULT_GREEDY_MOVES }
    }
}

/// Result of [`iso_constant_estimate`].
#[derive(Clone, Debug)]
pub struct IsoEstimate<P: Ord> {
    pub strategy: Strategy,
    pub estimate: BoundEstimate,
    pub best: IsoQuotientRecord<P>,
    pub evaluated: usize,
}

/// Window-scoped estimate of `inf_A |dB_k(A)| / |A|` over nonempty `A`
/// contained in `window`.
///
/// The exhaustive strategy is certified: its value is the exact minimum over
/// the window, a lower bound for every set inside it and, being attained, an
/// upper bound for the infimum over the whole space. The other strategies
/// only produce upper bounds.
pub fn iso_constant_estimate<S: MetricSpace>(
    space: &S,
    window: &PointSet<S::Point>,
    k: usize,
    strategy: Strategy,
    options: &SearchOptions,
) -> Result<IsoEstimate<S::Point>> {
    if k == 0 {
        return Err(Error::precondition("k must be at least 1"));
    }
    if window.is_empty() {
        return Err(Error::precondition("the window is empty"));
    }
    let description = format!("nonempty subsets of a {}-point window", window.len());
    let (best, evaluated, direction, certified) = match strategy {
        Strategy::Exhaustive => {
            let (record, evaluated) = exhaustive_min_quotient(space, window, k, options.exhaustive_cap)?;
            (record, evaluated, Direction::LowerBoundOfInf, true)
        }
        Strategy::NestedBalls => {
            let (s, evaluated) = nested_in_window(space, window, k)?;
            (IsoQuotientRecord::new(k, s.set, s.num), evaluated, Direction::UpperBoundOfInf, false)
        }
        Strategy::GreedyLocal => {
            let (start, e1) = nested_in_window(space, window, k)?;
            let additions = |a: &PointSet<S::Point>| -> Result<Vec<S::Point>> {
                Ok(discrete_neighborhood(space, a, k)?.db.intersection(window).to_vec())
            };
            let (s, e2) = greedy_descent(start, iso_score(space, k), additions, options.greedy_moves)?;
            (IsoQuotientRecord::new(k, s.set, s.num), e1 + e2, Direction::UpperBoundOfInf, false)
        }
    };
    Ok(IsoEstimate {
        strategy,
        estimate: BoundEstimate { value: best.quotient.clone(), direction, certified, window: description, k },
        best,
        evaluated,
    })
}

// ---------------------------------------------------------------------------
// property SN witnesses

/// Verdict of [`sn_witness_search`]. The search never decides property SN
/// itself, only whether a set with a small quotient was seen.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum SnVerdict {
    WitnessedBelow { epsilon: Dist, record: usize },
    Inconclusive { reason: String },
}

#[derive(Clone, Debug)]
pub struct SnSearchOptions<P: Ord> {
    pub epsilon: Dist,
    pub seeds: Vec<P>,
    /// Nested sets `A_n = dN_{n-1}(seed)` are tried for `n = 1..=n_max`.
    pub n_max: usize,
    pub greedy_moves: usize,
    /// Extra candidate sets, evaluated after the nested family.
    pub extra: Vec<PointSet<P>>,
}

#[derive(Clone, Debug)]
pub struct SnSearch<P: Ord> {
    pub k: usize,
    pub records: Vec<IsoQuotientRecord<P>>,
    pub verdict: SnVerdict,
    pub diagnostics: Vec<String>,
}

/// Looks for a finite set with `|dB_k(A)| / |A| < epsilon`.
pub fn sn_witness_search<S: MetricSpace>(
    space: &S,
    k: usize,
    options: &SnSearchOptions<S::Point>,
) -> Result<SnSearch<S::Point>> {
    if k == 0 {
        return Err(Error::precondition("k must be at least 1"));
    }
    if !options.epsilon.is_positive() {
        return Err(Error::precondition("epsilon must be positive"));
    }
    let seeds = if options.seeds.is_empty() { vec![space.base_point()] } else { options.seeds.clone() };
    let mut records: Vec<IsoQuotientRecord<S::Point>> = Vec::new();
    let mut diagnostics = Vec::new();
    let below = |r: &IsoQuotientRecord<S::Point>| r.quotient < options.epsilon;
    let found = |records: &[IsoQuotientRecord<S::Point>]| records.iter().position(below);

    'seeds: for seed in &seeds {
        let start = PointSet::singleton(seed.clone());
        let mut previous = 0;
        for n in 1..=options.n_max {
            let attempt = discrete_neighborhood(space, &start, n - 1).and_then(|a| {
                let grew = a.dn.len() != previous;
                previous = a.dn.len();
                Ok((grew, k_quotient(space, &a.dn, k)?))
            });
            match attempt {
                Ok((false, _)) => {
                    diagnostics.push(format!("nested sets around {} stopped growing at n = {n}", space.label(seed)));
                    break;
                }
                Ok((true, r)) => {
                    let hit = below(&r);
                    records.push(r);
                    if hit {
                        break 'seeds;
                    }
                }
                Err(e) if e.is_budget() => {
                    diagnostics.push(format!("nested sets around {}: {e} at n = {n}", space.label(seed)));
                    break;
                }
                Err(e) => return Err(e),
            }
        }
    }
    if found(&records).is_none() {
        for set in &options.extra {
            match k_quotient(space, set, k) {
                Ok(r) => {
                    let hit = below(&r);
                    records.push(r);
                    if hit {
                        break;
                    }
                }
                Err(e) if e.is_budget() => diagnostics.push(format!("extra candidate: {e}")),
                Err(e) => return Err(e),
            }
        }
    }
    if found(&records).is_none() && options.greedy_moves > 0 {
        if let Some(best) = records.iter().min_by(|a, b| {
            cmp_ratio((a.boundary_size, a.set_size), (b.boundary_size, b.set_size))
                .then_with(|| a.witness.cmp(&b.witness))
        }) {
            let start = Scored { set: best.witness.clone(), num: best.boundary_size, den: best.set_size };
            let additions = |a: &PointSet<S::Point>| Ok(discrete_neighborhood(space, a, k)?.db.to_vec());
            match greedy_descent(start, iso_score(space, k), additions, options.greedy_moves) {
                Ok((s, _)) => {
                    if s.set != best.witness {
                        records.push(IsoQuotientRecord::new(k, s.set, s.num));
                    }
                }
                Err(e) if e.is_budget() => diagnostics.push(format!("greedy search: {e}")),
                Err(e) => return Err(e),
            }
        }
    }
    let verdict = match found(&records) {
        Some(i) => SnVerdict::WitnessedBelow { epsilon: options.epsilon.clone(), record: i },
        None => SnVerdict::Inconclusive {
            reason: if diagnostics.is_empty() {
                format!("no set with quotient below {} within the search budget", options.epsilon)
            } else {
                diagnostics.join("; ")
            },
        },
    };
    Ok(SnSearch { k, records, verdict, diagnostics })
}

// ---------------------------------------------------------------------------
// amenability: |cN_k(A)| < factor |A|

/// Verdict of an amenability test.
#[derive(Clone, Debug, PartialEq)]
pub enum AmenabilityVerdict<P: Ord> {
    WitnessFound {
        set: PointSet<P>,
        measure: usize,
    },
    /// No witness among the inspected sets. Only an exhaustive search
    /// rules out the whole window.
    NoWitnessInWindow {
        window: String,
        exhaustive: bool,
    },
    BudgetExhausted {
        diagnostics: Vec<String>,
    },
}

impl<P: Ord> AmenabilityVerdict<P> {
    pub fn is_witness(&self) -> bool {
        matches!(self, AmenabilityVerdict::WitnessFound { .. })
    }
}

#[derive(Clone, Debug)]
pub struct AmenabilityResult<P: Ord> {
    pub verdict: AmenabilityVerdict<P>,
    /// Number of candidate sets evaluated.
    pub checked: usize,
    /// For exhaustive runs, how many subsets satisfy the condition.
    pub exceptions: usize,
    pub diagnostics: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct CghOptions<P: Ord> {
    /// The test is `|cN_k(A)| < factor |A|`; the definition uses 2.
    pub factor: Dist,
    pub seeds: Vec<P>,
    pub n_max: usize,
    pub greedy_moves: usize,
    /// When set, search every nonempty subset of this window instead.
    pub window: Option<PointSet<P>>,
    pub exhaustive_cap: usize,
}

impl<P: Ord> Default for CghOptions<P> {
    fn default() -> Self {
        CghOptions {
            factor: Dist::from_int(2),
            seeds: Vec::new(),
            n_max: 50,
            greedy_moves: DEFAULT_GREEDY_MOVES,
            window: None,
            exhaustive_cap: DEFAULT_EXHAUSTIVE_CAP,
        }
    }
}

fn small_fraction(d: &Dist) -> Result<(u128, u128)> {
    let r = d.as_rational();
    let n =
        u128::try_from(r.numer()).map_err(|_| Error::precondition("factor must be a small nonnegative rational"))?;
    let q =
        u128::try_from(r.denom()).map_err(|_| Error::precondition("factor must be a small nonnegative rational"))?;
    Ok((n, q))
}

/// Whether `|cN_k(A)| < factor |A|`, with `|cN_k(A)|`.
pub fn cgh_check<S: MetricSpace>(space: &S, a: &PointSet<S::Point>, k: &Dist, factor: &Dist) -> Result<(bool, usize)> {
    let n = closed_neighborhood(space, a, k)?.len();
    let (p, q) = small_fraction(factor)?;
    Ok(((n as u128) * q < p * a.len() as u128, n))
}

/// Searches a finite `A` with `|cN_k(A)| < factor |A|`.
pub fn amenability_cgh_test<S: MetricSpace>(
    space: &S,
    k: &Dist,
    options: &CghOptions<S::Point>,
) -> Result<AmenabilityResult<S::Point>> {
    if k.is_negative() {
        return Err(Error::precondition("k must be nonnegative"));
    }
    let (p, q) = small_fraction(&options.factor)?;
    let holds = |n: usize, size: usize| (n as u128) * q < p * size as u128;

    if let Some(window) = &options.window {
        check_exhaustive_size(window.len(), options.exhaustive_cap)?;
        let points = window.to_vec();
        let table = WindowTable::build(space, &points, k)?;
        let alpha_rank = table.values.partition_point(|v| v <= k) as u32;
        let total: u32 = ((1u64 << points.len()) - 1) as u32;
        let (count, best) = (1..=total)
            .into_par_iter()
            .map_init(Vec::new, |nearest, mask| {
                table.nearest(mask, nearest);
                let n = nearest.iter().filter(|&&r| r < alpha_rank).count();
                let size = mask.count_ones() as usize;
                let ok = holds(n, size);
                (ok as usize, ok.then_some(MaskScore { mask, num: n, den: size }))
            })
            .reduce(|| (0, None), |a, b| (a.0 + b.0, pick(a.1, b.1)));
        let verdict = match best {
            Some(m) => AmenabilityVerdict::WitnessFound { set: subset_of(&points, m.mask), measure: m.num },
            None => AmenabilityVerdict::NoWitnessInWindow {
                window: format!("all nonempty subsets of a {}-point window", points.len()),
                exhaustive: true,
            },
        };
        return Ok(AmenabilityResult { verdict, checked: total as usize, exceptions: count, diagnostics: Vec::new() });
    }

    let score =
        |a: &PointSet<S::Point>| -> Result<(usize, usize)> { Ok((closed_neighborhood(space, a, k)?.len(), a.len())) };
    let seeds = if options.seeds.is_empty() { vec![space.base_point()] } else { options.seeds.clone() };
    let mut checked = 0;
    let mut diagnostics = Vec::new();
    let mut best: Option<Scored<S::Point>> = None;
    for seed in &seeds {
        let start = PointSet::singleton(seed.clone());
        let mut previous = 0;
        for n in 0..options.n_max {
            let a = match discrete_neighborhood(space, &start, n).and_then(|r| Ok((score(&r.dn)?, r.dn))) {
                Ok(((m, size), a)) => {
                    checked += 1;
                    if holds(m, size) {
                        return Ok(AmenabilityResult {
                            verdict: AmenabilityVerdict::WitnessFound { set: a, measure: m },
                            checked,
                            exceptions: 0,
                            diagnostics,
                        });
                    }
                    Scored { set: a, num: m, den: size }
                }
                Err(e) if e.is_budget() => {
                    diagnostics.push(format!("nested sets around {}: {e} at n = {n}", space.label(seed)));
                    break;
                }
                Err(e) => return Err(e),
            };
            let stalled = a.set.len() == previous;
            previous = a.set.len();
            best = Some(match best {
                Some(b) => b.min(a),
                None => a,
            });
            if stalled {
                break;
            }
        }
    }
    if let Some(start) = best.filter(|_| options.greedy_moves > 0) {
        let additions = |a: &PointSet<S::Point>| Ok(closed_neighborhood(space, a, k)?.difference(a).to_vec());
        match greedy_descent(start, score, additions, options.greedy_moves) {
            Ok((s, evaluated)) => {
                checked += evaluated;
                if holds(s.num, s.den) {
                    return Ok(AmenabilityResult {
                        verdict: AmenabilityVerdict::WitnessFound { set: s.set, measure: s.num },
                        checked,
                        exceptions: 0,
                        diagnostics,
                    });
                }
            }
            Err(e) if e.is_budget() => diagnostics.push(format!("greedy search: {e}")),
            Err(e) => return Err(e),
        }
    }
    let verdict = if diagnostics.is_empty() {
        AmenabilityVerdict::NoWitnessInWindow {
            window: format!("nested sets n < {} around {} seed(s) plus greedy moves", options.n_max, seeds.len()),
            exhaustive: false,
        }
    } else {
        AmenabilityVerdict::BudgetExhausted { diagnostics: diagnostics.clone() }
    };
    Ok(AmenabilityResult { verdict, checked, exceptions: 0, diagnostics })
}

// ---------------------------------------------------------------------------
// quasi-lattices and the Følner-type test

/// A subset `Γ` of a space.
#[derive(Clone)]
pub enum Gamma<P: Ord> {
    /// Every point of the space.
    Whole,
    /// An explicit finite set.
    Members(PointSet<P>),
    /// A membership test.
    Predicate(Arc<dyn Fn(&P) -> bool + Send + Sync>),
}

impl<P: Ord + Clone> Gamma<P> {
    pub fn predicate(f: impl Fn(&P) -> bool + Send + Sync + 'static) -> Self {
        Gamma::Predicate(Arc::new(f))
    }

    pub fn contains(&self, p: &P) -> bool {
        match self {
            Gamma::Whole => true,
            Gamma::Members(s) => s.contains(p),
            Gamma::Predicate(f) => f(p),
        }
    }
}

impl<P: Ord + fmt::Debug> fmt::Debug for Gamma<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gamma::Whole => write!(f, "Whole"),
            Gamma::Members(s) => f.debug_tuple("Members").field(s).finish(),
            Gamma::Predicate(_) => write!(f, "Predicate"),
        }
    }
}

/// A validated quasi-lattice: `Γ` covers the inspected window within
/// `alpha`, and `k_table` holds `max |Γ ∩ B_r(x)|` (open balls) over the
/// window for each sampled radius.
#[derive(Clone, Debug)]
pub struct QuasiLattice<P: Ord> {
    pub gamma: Gamma<P>,
    pub alpha: Dist,
    pub k_table: Vec<(Dist, usize)>,
    pub window: String,
}

impl<P: Ord> QuasiLattice<P> {
    /// The whole space with `alpha = 0`, always a quasi-lattice of a locally
    /// finite space.
    pub fn identity() -> Self {
        QuasiLattice { gamma: Gamma::Whole, alpha: Dist::zero(), k_table: Vec::new(), window: "identity".into() }
    }
}

/// Outcome of [`quasi_lattice_verify`].
#[derive(Clone, Debug)]
pub enum QuasiLatticeCheck<P: Ord> {
    Valid(QuasiLattice<P>),
    /// `point` has no element of `Γ` within `alpha`; `nearest` is its
    /// distance to `Γ` when one was found in the window.
    CoveringFailure {
        point: P,
        label: String,
        nearest: Option<Dist>,
    },
}

/// Open ball `B_r(x) ∩ Γ`.
fn gamma_open_ball<S: MetricSpace>(
    space: &S,
    gamma: &Gamma<S::Point>,
    x: &S::Point,
    r: &Dist,
) -> Result<Vec<S::Point>> {
    Ok(space
        .neighborhood(std::slice::from_ref(x), r, space.point_cap())?
        .into_iter()
        .filter(|(p, d)| d < r && gamma.contains(p))
        .map(|(p, _)| p)
        .collect())
}

/// Checks `cN_alpha(Γ) ⊇ window` and tabulates `K_r` over the window.
pub fn quasi_lattice_verify<S: MetricSpace>(
    space: &S,
    gamma: Gamma<S::Point>,
    alpha: &Dist,
    window: &PointSet<S::Point>,
    radii: &[Dist],
) -> Result<QuasiLatticeCheck<S::Point>> {
    if window.is_empty() {
        return Err(Error::precondition("the window is empty"));
    }
    if alpha.is_negative() {
        return Err(Error::precondition("alpha must be nonnegative"));
    }
    for x in window.iter() {
        let near = space.neighborhood(std::slice::from_ref(x), alpha, space.point_cap())?;
        if !near.iter().any(|(p, _)| gamma.contains(p)) {
            let nearest = window.iter().filter(|p| gamma.contains(p)).map(|p| space.distance(x, p)).min();
            return Ok(QuasiLatticeCheck::CoveringFailure { point: x.clone(), label: space.label(x), nearest });
        }
    }
    let mut k_table = Vec::with_capacity(radii.len());
    for r in radii {
        if !r.is_positive() {
            return Err(Error::precondition("radii must be positive"));
        }
        let mut max = 0;
        for x in window.iter() {
            max = max.max(gamma_open_ball(space, &gamma, x, r)?.len());
        }
        k_table.push((r.clone(), max));
    }
    Ok(QuasiLatticeCheck::Valid(QuasiLattice {
        gamma,
        alpha: alpha.clone(),
        k_table,
        window: format!("{}-point window", window.len()),
    }))
}

/// `∂_r U = {x ∈ Γ : d(x, U) < r and d(x, Γ \ U) < r}`.
pub fn bw_boundary<S: MetricSpace>(
    space: &S,
    gamma: &Gamma<S::Point>,
    u: &PointSet<S::Point>,
    r: &Dist,
) -> Result<PointSet<S::Point>> {
    require_nonempty(u)?;
    if !r.is_positive() {
        return Err(Error::precondition("r must be positive"));
    }
    let mut out = PointSet::new();
    for (x, d) in space.neighborhood(&u.to_vec(), r, space.point_cap())? {
        if &d >= r || !gamma.contains(&x) {
            continue;
        }
        // outside points near U, and points of U near the outside
        if !u.contains(&x) || gamma_open_ball(space, gamma, &x, r)?.iter().any(|y| !u.contains(y)) {
            out.insert(x);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct BwOptions<P: Ord> {
    pub seeds: Vec<P>,
    pub n_max: usize,
    pub greedy_moves: usize,
    /// Restricts candidates to subsets of this window; searched exhaustively
    /// when it has at most `exhaustive_cap` points of `Γ`.
    pub window: Option<PointSet<P>>,
    pub exhaustive_cap: usize,
}

impl<P: Ord> Default for BwOptions<P> {
    fn default() -> Self {
        BwOptions {
            seeds: Vec::new(),
            n_max: 50,
            greedy_moves: DEFAULT_GREEDY_MOVES,
            window: None,
            exhaustive_cap: DEFAULT_EXHAUSTIVE_CAP,
        }
    }
}

/// Searches a finite `U ⊆ Γ` with `|∂_r U| / |U| < delta`.
pub fn amenability_bw_test<S: MetricSpace>(
    space: &S,
    lattice: &QuasiLattice<S::Point>,
    r: &Dist,
    delta: &Dist,
    options: &BwOptions<S::Point>,
) -> Result<AmenabilityResult<S::Point>> {
    if !r.is_positive() || !delta.is_positive() {
        return Err(Error::precondition("r and delta must be positive"));
    }
    let gamma = &lattice.gamma;
    let (p, q) = small_fraction(delta)?;
    let holds = |b: usize, size: usize| (b as u128) * q < p * size as u128;
    let score =
        |u: &PointSet<S::Point>| -> Result<(usize, usize)> { Ok((bw_boundary(space, gamma, u, r)?.len(), u.len())) };
    let window: Option<PointSet<S::Point>> =
        options.window.as_ref().map(|w| w.iter().filter(|x| gamma.contains(x)).cloned().collect());
    let inside = |u: &PointSet<S::Point>| window.as_ref().is_none_or(|w| u.is_subset(w));

    if let Some(w) = window.as_ref().filter(|w| !w.is_empty() && w.len() <= options.exhaustive_cap) {
        let points = w.to_vec();
        let total: u32 = ((1u64 << points.len()) - 1) as u32;
        let (count, best) = (1..=total)
            .into_par_iter()
            .map(|mask| -> Result<(usize, Option<MaskScore>)> {
                let u = subset_of(&points, mask);
                let (b, size) = score(&u)?;
                let ok = holds(b, size);
                Ok((ok as usize, ok.then_some(MaskScore { mask, num: b, den: size })))
            })
            .try_reduce(|| (0, None), |a, b| Ok((a.0 + b.0, pick(a.1, b.1))))?;
        let verdict = match best {
            Some(m) => AmenabilityVerdict::WitnessFound { set: subset_of(&points, m.mask), measure: m.num },
            None => AmenabilityVerdict::NoWitnessInWindow {
                window: format!("all nonempty subsets of the {} lattice points in the window", points.len()),
                exhaustive: true,
            },
        };
        return Ok(AmenabilityResult { verdict, checked: total as usize, exceptions: count, diagnostics: Vec::new() });
    }

    let seeds: Vec<S::Point> = if options.seeds.is_empty() {
        match &window {
            Some(w) => w.first().cloned().into_iter().collect(),
            None => vec![space.base_point()],
        }
    } else {
        options.seeds.clone()
    };
    let mut checked = 0;
    let mut diagnostics = Vec::new();
    let mut best: Option<Scored<S::Point>> = None;
    for seed in seeds.iter().filter(|s| gamma.contains(s)) {
        let start = PointSet::singleton(seed.clone());
        let mut previous = 0;
        for n in 0..options.n_max {
            let u: PointSet<S::Point> = match discrete_neighborhood(space, &start, n) {
                Ok(res) => res.dn.into_iter().filter(|x| gamma.contains(x)).collect(),
                Err(e) if e.is_budget() => {
                    diagnostics.push(format!("nested sets around {}: {e}", space.label(seed)));
                    break;
                }
                Err(e) => return Err(e),
            };
            if !inside(&u) || u.len() == previous {
                break;
            }
            previous = u.len();
            let (b, size) = match score(&u) {
                Ok(s) => s,
                Err(e) if e.is_budget() => {
                    diagnostics.push(format!("boundary around {}: {e}", space.label(seed)));
                    break;
                }
                Err(e) => return Err(e),
            };
            checked += 1;
            if holds(b, size) {
                return Ok(AmenabilityResult {
                    verdict: AmenabilityVerdict::WitnessFound { set: u, measure: b },
                    checked,
                    exceptions: 0,
                    diagnostics,
                });
            }
            let s = Scored { set: u, num: b, den: size };
            best = Some(match best {
                Some(x) => x.min(s),
                None => s,
            });
        }
    }
    if let Some(start) = best.filter(|_| options.greedy_moves > 0) {
        let additions = |u: &PointSet<S::Point>| -> Result<Vec<S::Point>> {
            Ok(space
                .neighborhood(&u.to_vec(), r, space.point_cap())?
                .into_iter()
                .filter(|(x, d)| d < r && gamma.contains(x) && window.as_ref().is_none_or(|w| w.contains(x)))
                .map(|(x, _)| x)
                .collect())
        };
        match greedy_descent(start, score, additions, options.greedy_moves) {
            Ok((s, evaluated)) => {
                checked += evaluated;
                if holds(s.num, s.den) {
                    return Ok(AmenabilityResult {
                        verdict: AmenabilityVerdict::WitnessFound { set: s.set, measure: s.num },
                        checked,
                        exceptions: 0,
                        diagnostics,
                    });
                }
            }
            Err(e) if e.is_budget() => diagnostics.push(format!("greedy search: {e}")),
            Err(e) => return Err(e),
        }
    }
    let verdict = if diagnostics.is_empty() {
        AmenabilityVerdict::NoWitnessInWindow {
            window: match &window {
                Some(w) => format!("nested sets and greedy moves inside {} lattice points", w.len()),
                None => format!("nested sets n < {} plus greedy moves", options.n_max),
            },
            exhaustive: false,
        }
    } else {
        AmenabilityVerdict::BudgetExhausted { diagnostics: diagnostics.clone() }
    };
    Ok(AmenabilityResult { verdict, checked, exceptions: 0, diagnostics })
}

/// The set `U = cN_k(A)` built from a witness `A` of `|cN_{2k}(A)| < (1 + δ)|A|`,
/// with `∂_k U` and `|∂_k U| / |U|`. With `Γ` the whole space,
/// `∂_k U ⊆ cB_{2k}(A)`, so the ratio is below `δ`.
#[derive(Clone, Debug)]
pub struct BwFromCgh<P: Ord> {
    pub u: PointSet<P>,
    pub boundary: PointSet<P>,
    pub closed_boundary_2k: PointSet<P>,
    pub ratio: Dist,
}

pub fn bw_witness_from_cgh<S: MetricSpace>(space: &S, a: &PointSet<S::Point>, k: &Dist) -> Result<BwFromCgh<S::Point>> {
    let u = closed_neighborhood(space, a, k)?;
    let boundary = bw_boundary(space, &Gamma::Whole, &u, k)?;
    let closed_boundary_2k = closed_neighborhood(space, a, &k.double())?.difference(a);
    let ratio = Dist::ratio(boundary.len() as i64, u.len() as i64);
    Ok(BwFromCgh { u, boundary, closed_boundary_2k, ratio })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo::{FreeGroup, Harmonic, Lattice};

    fn line(range: std::ops::RangeInclusive<i64>) -> PointSet<Vec<i64>> {
        range.map(|i| vec![i]).collect()
    }

    #[test]
    fn mask_order_is_lexicographic() {
        let lists = |m: u32| (0..8).filter(|i| m & (1 << i) != 0).collect::<Vec<u32>>();
        for a in 1..64u32 {
            for b in 1..64u32 {
                assert_eq!(cmp_masks(a, b), lists(a).cmp(&lists(b)), "{a} {b}");
            }
        }
    }

    #[test]
    fn quotients() {
        let h = Harmonic::new();
        let a: PointSet<u64> = (1..=10).collect();
        assert_eq!(k_quotient(&h, &a, 3).unwrap().quotient, Dist::ratio(3, 10));
        let z = Lattice::new(1).unwrap();
        assert_eq!(k_quotient(&z, &line(0..=6), 1).unwrap().quotient, Dist::ratio(2, 7));
        let f = FreeGroup::new(2).unwrap();
        let ball = discrete_neighborhood(&f, &PointSet::singleton(vec![]), 2).unwrap().dn;
        let r = k_quotient(&f, &ball, 1).unwrap();
        assert_eq!((r.set_size, r.boundary_size), (17, 36));
        assert!(k_quotient(&z, &line(0..=1), 0).is_err());
    }

    #[test]
    fn exhaustive_line_window() {
        let z = Lattice::new(1).unwrap();
        let e = iso_constant_estimate(&z, &line(-9..=9), 1, Strategy::Exhaustive, &SearchOptions::default()).unwrap();
        assert_eq!(e.estimate.value, Dist::ratio(2, 19));
        assert!(e.estimate.certified);
        assert_eq!(e.best.witness, line(-9..=9));
        assert!(iso_constant_estimate(&z, &line(-10..=10), 1, Strategy::Exhaustive, &SearchOptions::default()).is_err());
    }

    #[test]
    fn nested_and_greedy_never_beat_exhaustive() {
        let z = Lattice::new(2).unwrap();
        let window: PointSet<Vec<i64>> = (-1..=1).flat_map(|x| (-1..=1).map(move |y| vec![x, y])).collect();
        let opts = SearchOptions::default();
        let ex = iso_constant_estimate(&z, &window, 1, Strategy::Exhaustive, &opts).unwrap();
        for s in [Strategy::NestedBalls, Strategy::GreedyLocal] {
            let e = iso_constant_estimate(&z, &window, 1, s, &opts).unwrap();
            assert!(e.estimate.value >= ex.estimate.value);
            assert_eq!(e.estimate.direction, Direction::UpperBoundOfInf);
        }
    }

    #[test]
    fn harmonic_nested_window() {
        let h = Harmonic::new();
        let window: PointSet<u64> = (1..=20).collect();
        let e = iso_constant_estimate(&h, &window, 2, Strategy::NestedBalls, &SearchOptions::default()).unwrap();
        assert_eq!(e.estimate.value, Dist::ratio(1, 10));
        assert_eq!(e.best.witness, window);
    }

    #[test]
    fn sn_search_on_the_line() {
        let z = Lattice::new(1).unwrap();
        let opts =
            SnSearchOptions { epsilon: Dist::ratio(1, 100), seeds: vec![], n_max: 500, greedy_moves: 0, extra: vec![] };
        let s = sn_witness_search(&z, 1, &opts).unwrap();
        let SnVerdict::WitnessedBelow { record, .. } = s.verdict else { panic!("{:?}", s.verdict) };
        assert_eq!(s.records[record].set_size, 201);
    }

    #[test]
    fn cgh_on_the_line_and_tree() {
        let z = Lattice::new(1).unwrap();
        let (ok, n) = cgh_check(&z, &line(-20..=20), &Dist::from_int(3), &Dist::from_int(2)).unwrap();
        assert!(ok);
        assert_eq!(n, 47);
        let r = amenability_cgh_test(&z, &Dist::from_int(3), &CghOptions::default()).unwrap();
        let AmenabilityVerdict::WitnessFound { set, measure } = r.verdict else { panic!() };
        assert!(measure < 2 * set.len());

        let f = FreeGroup::new(2).unwrap();
        let opts = CghOptions { greedy_moves: 5, n_max: 4, ..CghOptions::default() };
        let r = amenability_cgh_test(&f, &Dist::one(), &opts).unwrap();
        assert!(matches!(r.verdict, AmenabilityVerdict::NoWitnessInWindow { exhaustive: false, .. }));
    }

    #[test]
    fn bw_boundary_uses_open_balls() {
        let z = Lattice::new(1).unwrap();
        let b = bw_boundary(&z, &Gamma::Whole, &line(0..=99), &Dist::from_int(2)).unwrap();
        assert_eq!(b, [vec![-1], vec![0], vec![99], vec![100]].into_iter().collect());
        let r = amenability_bw_test(
            &z,
            &QuasiLattice::identity(),
            &Dist::from_int(2),
            &Dist::ratio(1, 10),
            &BwOptions::default(),
        )
        .unwrap();
        assert!(r.verdict.is_witness());
    }

    #[test]
    fn quasi_lattices() {
        let z = Lattice::new(1).unwrap();
        let evens = Gamma::predicate(|p: &Vec<i64>| p[0] % 2 == 0);
        let QuasiLatticeCheck::Valid(q) =
            quasi_lattice_verify(&z, evens, &Dist::one(), &line(-30..=30), &[Dist::from_int(3)]).unwrap()
        else {
            panic!()
        };
        assert_eq!(q.k_table, vec![(Dist::from_int(3), 3)]);

        let squares = Gamma::predicate(|p: &Vec<i64>| {
            let r = (p[0].max(0) as f64).sqrt().round() as i64;
            r * r == p[0]
        });
        match quasi_lattice_verify(&z, squares, &Dist::one(), &line(0..=100), &[]).unwrap() {
            QuasiLatticeCheck::CoveringFailure { point, nearest, .. } => {
                assert_eq!(point, vec![6]);
                assert_eq!(nearest, Some(Dist::from_int(2)));
            }
            QuasiLatticeCheck::Valid(_) => panic!("squares do not cover"),
        }
    }
}
