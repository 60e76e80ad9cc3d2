//! Locally finite metric spaces and the discrete-neighborhood machinery.
//!
//! A space is anything implementing [`MetricSpace`]: an exact distance oracle
//! plus an enumerator for bounded neighborhoods of finite sets. On top of that
//! this module computes the sorted distance levels `P = {d(y, A)}` of a finite
//! set, discrete k-neighborhoods `dN_k(A)` (the union of the first `k + 1`
//! level sets) and closed neighborhoods `cN_a(A)`.

use std::collections::BTreeSet;
use std::fmt::Debug;
use std::hash::Hash;

use serde::Serialize;

use crate::dist::Dist;
use crate::error::{Error, Result};

/// Default upper bound on the number of points a single enumeration may touch.
pub const DEFAULT_POINT_CAP: usize = 1_000_000;

/// Default relative tolerance used to group float distances into levels.
pub const DEFAULT_LEVEL_TOLERANCE: f64 = 1e-9;

const MAX_RADIUS_STEPS: usize = 256;

/// How distance levels are compared.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum Arithmetic {
    /// Levels are equal only when the rationals are equal.
    ExactRational,
    /// Distances within `level_tolerance` (relative) of a level's smallest
    /// value belong to that level.
    Float { level_tolerance: f64 },
}

impl Arithmetic {
    /// Whether `d` still belongs to the level whose smallest value is `start`.
    pub fn same_level(&self, start: &Dist, d: &Dist) -> bool {
        match self {
            Arithmetic::ExactRational => start == d,
            Arithmetic::Float { level_tolerance } => {
                let s = start.to_f64();
                d.to_f64() <= s + level_tolerance * s.abs()
            }
        }
    }

    /// Upper end of the level that starts at `start`.
    fn level_ceiling(&self, start: &Dist) -> f64 {
        match self {
            Arithmetic::ExactRational => start.to_f64(),
            Arithmetic::Float { level_tolerance } => {
                let s = start.to_f64();
                s + level_tolerance * s.abs()
            }
        }
    }
}

/// A locally finite metric space.
///
/// Implementations must be immutable after construction (interior caches are
/// fine as long as they are invisible) and safe to share across threads.
pub trait MetricSpace: Send + Sync {
    type Point: Clone + Ord + Hash + Debug + Send + Sync;

    fn name(&self) -> String;

    fn distance(&self, x: &Self::Point, y: &Self::Point) -> Dist;

    /// Every point `y` with `d(y, seeds) <= radius`, paired with `d(y, seeds)`,
    /// sorted by point. Fails with [`Error::HorizonExceeded`] once more than
    /// `cap` points would be produced.
    fn neighborhood(&self, seeds: &[Self::Point], radius: &Dist, cap: usize) -> Result<Vec<(Self::Point, Dist)>>;

    /// A distinguished point (identity, root, `x_1`, ...).
    fn base_point(&self) -> Self::Point;

    fn label(&self, p: &Self::Point) -> String;

    fn parse_point(&self, s: &str) -> Option<Self::Point>;

    fn arithmetic(&self) -> Arithmetic {
        Arithmetic::ExactRational
    }

    /// Total number of points, for finite spaces.
    fn cardinality(&self) -> Option<usize> {
        None
    }

    fn point_cap(&self) -> usize {
        DEFAULT_POINT_CAP
    }

    /// First enumeration radius tried when looking for `m + 1` levels.
    fn level_radius_hint(&self, _m: usize) -> Dist {
        Dist::one()
    }

    /// Like [`level_radius_hint`](Self::level_radius_hint), knowing the seeds.
    fn level_radius_hint_for(&self, _seeds: &[Self::Point], m: usize) -> Dist {
        self.level_radius_hint(m)
    }
}

/// Overrides the enumeration cap of another space.
#[derive(Debug, Clone)]
pub struct Capped<S> {
    pub inner: S,
    pub cap: usize,
}

impl<S> Capped<S> {
    pub fn new(inner: S, cap: usize) -> Self {
        Capped { inner, cap }
    }
}

impl<S: MetricSpace> MetricSpace for Capped<S> {
    type Point = S::Point;

    fn name(&self) -> String {
        self.inner.name()
    }
    fn distance(&self, x: &S::Point, y: &S::Point) -> Dist {
        self.inner.distance(x, y)
    }
    fn neighborhood(&self, seeds: &[S::Point], radius: &Dist, cap: usize) -> Result<Vec<(S::Point, Dist)>> {
        self.inner.neighborhood(seeds, radius, cap.min(self.cap))
    }
    fn base_point(&self) -> S::Point {
        self.inner.base_point()
    }
    fn label(&self, p: &S::Point) -> String {
        self.inner.label(p)
    }
    fn parse_point(&self, s: &str) -> Option<S::Point> {
        self.inner.parse_point(s)
    }
    fn arithmetic(&self) -> Arithmetic {
        self.inner.arithmetic()
    }
    fn cardinality(&self) -> Option<usize> {
        self.inner.cardinality()
    }
    fn point_cap(&self) -> usize {
        self.cap
    }
    fn level_radius_hint(&self, m: usize) -> Dist {
        self.inner.level_radius_hint(m)
    }
    fn level_radius_hint_for(&self, seeds: &[S::Point], m: usize) -> Dist {
        self.inner.level_radius_hint_for(seeds, m)
    }
}

/// A finite set of points in canonical (sorted) order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointSet<P: Ord>(BTreeSet<P>);

impl<P: Ord> Default for PointSet<P> {
    fn default() -> Self {
        PointSet(BTreeSet::new())
    }
}

impl<P: Ord + Clone> PointSet<P> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(p: P) -> Self {
        PointSet(BTreeSet::from([p]))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, p: &P) -> bool {
        self.0.contains(p)
    }

    pub fn insert(&mut self, p: P) -> bool {
        self.0.insert(p)
    }

    pub fn remove(&mut self, p: &P) -> bool {
        self.0.remove(p)
    }

    pub fn iter(&self) -> impl Iterator<Item = &P> + '_ {
        self.0.iter()
    }

    pub fn to_vec(&self) -> Vec<P> {
        self.0.iter().cloned().collect()
    }

    pub fn first(&self) -> Option<&P> {
        self.0.first()
    }

    pub fn is_subset(&self, other: &PointSet<P>) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn union(&self, other: &PointSet<P>) -> PointSet<P> {
        PointSet(self.0.union(&other.0).cloned().collect())
    }

    pub fn difference(&self, other: &PointSet<P>) -> PointSet<P> {
        PointSet(self.0.difference(&other.0).cloned().collect())
    }

    pub fn intersection(&self, other: &PointSet<P>) -> PointSet<P> {
        PointSet(self.0.intersection(&other.0).cloned().collect())
    }

    pub fn as_set(&self) -> &BTreeSet<P> {
        &self.0
    }

    /// Labels in canonical order, as written to reports.
    pub fn labels<S: MetricSpace<Point = P>>(&self, space: &S) -> Vec<String> {
        self.0.iter().map(|p| space.label(p)).collect()
    }
}

impl<P: Ord> FromIterator<P> for PointSet<P> {
    fn from_iter<I: IntoIterator<Item = P>>(iter: I) -> Self {
        PointSet(iter.into_iter().collect())
    }
}

impl<P: Ord> IntoIterator for PointSet<P> {
    type Item = P;
    type IntoIter = std::collections::btree_set::IntoIter<P>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl<'a, P: Ord> IntoIterator for &'a PointSet<P> {
    type Item = &'a P;
    type IntoIter = std::collections::btree_set::Iter<'a, P>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// The smallest `m + 1` values of `P = {d(y, A) : y in X}` and their level sets.
#[derive(Clone, Debug)]
pub struct DistanceLevels<P: Ord> {
    pub base_set: PointSet<P>,
    /// Strictly ascending, `levels[0] == 0`.
    pub levels: Vec<Dist>,
    pub members: Vec<PointSet<P>>,
    /// The space ran out of levels before `m + 1` were found.
    pub exhausted: bool,
    pub requested: usize,
}

impl<P: Ord + Clone> DistanceLevels<P> {
    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Union of the level sets `0..=k` (clamped to what is stored).
    pub fn union_through(&self, k: usize) -> PointSet<P> {
        let upto = k.min(self.members.len().saturating_sub(1));
        let mut out = BTreeSet::new();
        for m in &self.members[..=upto] {
            out.extend(m.iter().cloned());
        }
        PointSet(out)
    }

    /// Index of the stored level matching `d`, if any.
    pub fn level_index(&self, d: &Dist, arithmetic: Arithmetic) -> Option<usize> {
        match arithmetic {
            Arithmetic::ExactRational => self.levels.binary_search(d).ok(),
            Arithmetic::Float { .. } => {
                self.levels.iter().position(|l| arithmetic.same_level(l, d) || arithmetic.same_level(d, l))
            }
        }
    }
}

/// `dN_k(A)` and `dB_k(A) = dN_k(A) \ A`.
#[derive(Clone, Debug)]
pub struct NeighborhoodResult<P: Ord> {
    pub k: usize,
    pub dn: PointSet<P>,
    pub db: PointSet<P>,
    pub levels_used: DistanceLevels<P>,
}

pub fn require_nonempty<P: Ord + Clone>(a: &PointSet<P>) -> Result<()> {
    if a.is_empty() {
        Err(Error::precondition("the base set must be nonempty"))
    } else {
        Ok(())
    }
}

/// `d(x, A) = min_{a in A} d(x, a)`.
pub fn distance_to_set<S: MetricSpace>(space: &S, x: &S::Point, a: &PointSet<S::Point>) -> Result<Dist> {
    require_nonempty(a)?;
    Ok(a.iter().map(|y| space.distance(x, y)).min().expect("nonempty"))
}

/// Group `(point, distance)` pairs (any order) into ascending levels.
fn group_levels<P: Ord + Clone>(mut found: Vec<(P, Dist)>, arithmetic: Arithmetic) -> Vec<(Dist, Vec<P>)> {
    found.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    let mut groups: Vec<(Dist, Vec<P>)> = Vec::new();
    for (p, d) in found {
        match groups.last_mut() {
            Some((start, members)) if arithmetic.same_level(start, &d) => members.push(p),
            _ => groups.push((d, vec![p])),
        }
    }
    groups
}

/// The `m + 1` smallest distance levels of `A`.
///
/// The enumeration radius starts at the space's hint and doubles until enough
/// levels are confirmed complete; if a doubling overflows the point cap the
/// radius is bisected back before giving up.
pub fn distance_levels<S: MetricSpace>(
    space: &S,
    a: &PointSet<S::Point>,
    m: usize,
) -> Result<DistanceLevels<S::Point>> {
    require_nonempty(a)?;
    let arithmetic = space.arithmetic();
    let seeds = a.to_vec();
    let cap = space.point_cap();

    let attempt = |radius: &Dist| -> Result<Option<DistanceLevels<S::Point>>> {
        let found = space.neighborhood(&seeds, radius, cap)?;
        let whole = space.cardinality() == Some(found.len());
        let groups = group_levels(found, arithmetic);
        let r = radius.to_f64();
        let trusted = if whole {
            groups.len()
        } else {
            match arithmetic {
                Arithmetic::ExactRational => groups.len(),
                Arithmetic::Float { .. } => {
                    groups.iter().take_while(|(start, _)| arithmetic.level_ceiling(start) < r).count()
                }
            }
        };
        if trusted > m || whole {
            let exhausted = whole && groups.len() < m + 1;
            let (levels, members) =
                groups.into_iter().take(m + 1).map(|(d, ps)| (d, ps.into_iter().collect::<PointSet<_>>())).unzip();
            return Ok(Some(DistanceLevels { base_set: a.clone(), levels, members, exhausted, requested: m }));
        }
        Ok(None)
    };

    if m == 0 {
        if let Some(l) = attempt(&Dist::zero())? {
            return Ok(l);
        }
    }
    let mut lo = Dist::zero();
    let mut radius = space.level_radius_hint_for(&seeds, m);
    if !radius.is_positive() {
        radius = Dist::one();
    }
    for _ in 0..MAX_RADIUS_STEPS {
        match attempt(&radius) {
            Ok(Some(l)) => return Ok(l),
            Ok(None) => {
                lo = radius.clone();
                radius = radius.double();
            }
            Err(Error::HorizonExceeded { .. }) => {
                // bisect between the last radius that fit and the one that overflowed
                let mut hi = radius.clone();
                for _ in 0..64 {
                    let mid = (&lo + &hi).half();
                    match attempt(&mid) {
                        Ok(Some(l)) => return Ok(l),
                        Ok(None) => lo = mid,
                        Err(Error::HorizonExceeded { .. }) => hi = mid,
                        Err(e) => return Err(e),
                    }
                }
                return Err(Error::HorizonExceeded { cap });
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::HorizonExceeded { cap })
}

/// Discrete k-neighborhood of `A` via level truncation: the union of the first
/// `k + 1` level sets of `P`.
pub fn discrete_neighborhood<S: MetricSpace>(
    space: &S,
    a: &PointSet<S::Point>,
    k: usize,
) -> Result<NeighborhoodResult<S::Point>> {
    let levels = distance_levels(space, a, k)?;
    let dn = levels.union_through(k);
    let db = dn.difference(a);
    Ok(NeighborhoodResult { k, dn, db, levels_used: levels })
}

/// `cN_alpha(A) = {x : d(x, A) <= alpha}`.
pub fn closed_neighborhood<S: MetricSpace>(
    space: &S,
    a: &PointSet<S::Point>,
    alpha: &Dist,
) -> Result<PointSet<S::Point>> {
    require_nonempty(a)?;
    if alpha.is_negative() {
        return Err(Error::precondition("neighborhood radius must be nonnegative"));
    }
    let found = space.neighborhood(&a.to_vec(), alpha, space.point_cap())?;
    Ok(found.into_iter().map(|(p, _)| p).collect())
}

/// `cB_alpha(A) = cN_alpha(A) \ A`.
pub fn closed_boundary<S: MetricSpace>(space: &S, a: &PointSet<S::Point>, alpha: &Dist) -> Result<PointSet<S::Point>> {
    Ok(closed_neighborhood(space, a, alpha)?.difference(a))
}

/// Closed ball `B(x, r)`.
pub fn ball<S: MetricSpace>(space: &S, x: &S::Point, r: &Dist) -> Result<PointSet<S::Point>> {
    closed_neighborhood(space, &PointSet::singleton(x.clone()), r)
}

/// Closed ball `B(x, r)` with the distance of each point from `x`.
pub fn ball_with_distances<S: MetricSpace>(space: &S, x: &S::Point, r: &Dist) -> Result<Vec<(S::Point, Dist)>> {
    space.neighborhood(std::slice::from_ref(x), r, space.point_cap())
}

/// Whether `candidate` is a complete chain in the stored levels: it starts at
/// 0, increases strictly and consecutive entries are adjacent levels.
pub fn verify_complete_chain<P: Ord + Clone>(
    levels: &DistanceLevels<P>,
    candidate: &[Dist],
    arithmetic: Arithmetic,
) -> Result<bool> {
    let Some(max) = candidate.iter().max() else {
        return Ok(false);
    };
    let last = levels.levels.last().expect("levels always contain 0");
    if !levels.exhausted && max > last && !arithmetic.same_level(last, max) {
        return Err(Error::InsufficientLevels { needed: candidate.len(), available: levels.levels.len() });
    }
    for (i, value) in candidate.iter().enumerate() {
        match levels.level_index(value, arithmetic) {
            Some(j) if j == i => {}
            _ => return Ok(false),
        }
    }
    Ok(true)
}

/// First metric-axiom violation among the given triples, as a message.
pub fn metric_axiom_violation<S: MetricSpace>(space: &S, triples: &[(S::Point, S::Point, S::Point)]) -> Option<String> {
    for (x, y, z) in triples {
        let label = |p: &S::Point| space.label(p);
        if !space.distance(x, x).is_zero() {
            return Some(format!("d({0},{0}) != 0", label(x)));
        }
        let dxy = space.distance(x, y);
        if dxy != space.distance(y, x) {
            return Some(format!("d({0},{1}) != d({1},{0})", label(x), label(y)));
        }
        if dxy.is_negative() || (dxy.is_zero() && x != y) {
            return Some(format!("d({},{}) = {} for distinct points", label(x), label(y), dxy));
        }
        let dxz = space.distance(x, z);
        let dyz = space.distance(y, z);
        if dxz > &dxy + &dyz {
            return Some(format!("triangle inequality fails for ({}, {}, {})", label(x), label(y), label(z)));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zoo::{FiniteMetric, Harmonic, Lattice};

    fn harmonic_set(range: std::ops::RangeInclusive<u64>) -> PointSet<u64> {
        range.collect()
    }

    #[test]
    fn distance_to_set_examples() {
        let h = Harmonic::new();
        let a = harmonic_set(1..=2);
        assert_eq!(distance_to_set(&h, &3, &a).unwrap(), Dist::ratio(1, 3));
        assert!(distance_to_set(&h, &1, &a).unwrap().is_zero());

        let z = Lattice::new(1).unwrap();
        let a: PointSet<Vec<i64>> = [vec![0], vec![1]].into_iter().collect();
        assert_eq!(distance_to_set(&z, &vec![5], &a).unwrap(), Dist::from_int(4));
        assert!(matches!(distance_to_set(&z, &vec![5], &PointSet::new()), Err(Error::Precondition(_))));
    }

    #[test]
    fn harmonic_levels() {
        let h = Harmonic::new();
        let l = distance_levels(&h, &harmonic_set(1..=2), 2).unwrap();
        assert_eq!(l.levels, vec![Dist::zero(), Dist::ratio(1, 3), Dist::ratio(1, 3) + Dist::ratio(1, 4)]);
        assert!(!l.exhausted);
        assert!(verify_complete_chain(&l, &[Dist::zero(), Dist::ratio(1, 3)], h.arithmetic()).unwrap());
    }

    #[test]
    fn line_levels_and_chains() {
        let z = Lattice::new(1).unwrap();
        let l = distance_levels(&z, &PointSet::singleton(vec![0]), 3).unwrap();
        assert_eq!(l.levels, (0..=3).map(Dist::from_int).collect::<Vec<_>>());
        let ar = Arithmetic::ExactRational;
        let ints = |v: &[i64]| v.iter().map(|&i| Dist::from_int(i)).collect::<Vec<_>>();
        assert!(verify_complete_chain(&l, &ints(&[0, 1, 2]), ar).unwrap());
        assert!(!verify_complete_chain(&l, &ints(&[0, 2]), ar).unwrap());
        assert!(!verify_complete_chain(&l, &ints(&[1, 2]), ar).unwrap());
        assert!(!verify_complete_chain(&l, &[], ar).unwrap());
        assert!(matches!(
            verify_complete_chain(&l, &ints(&[0, 1, 2, 3, 4]), ar),
            Err(Error::InsufficientLevels { .. })
        ));
    }

    #[test]
    fn finite_space_is_exhausted() {
        let m = FiniteMetric::from_points_on_line(&[0, 1, 3, 7]);
        let l = distance_levels(&m, &PointSet::singleton(0), 10).unwrap();
        assert!(l.exhausted);
        assert_eq!(l.levels.len(), 4);
        // once exhausted, values past the end are simply not levels
        assert!(!verify_complete_chain(&l, &[Dist::zero(), Dist::from_int(100)], m.arithmetic()).unwrap());
    }

    #[test]
    fn zero_step_neighborhood() {
        let z = Lattice::new(1).unwrap();
        let a: PointSet<Vec<i64>> = [vec![0], vec![4]].into_iter().collect();
        let r = discrete_neighborhood(&z, &a, 0).unwrap();
        assert_eq!(r.dn, a);
        assert!(r.db.is_empty());
    }

    #[test]
    fn closed_neighborhood_line() {
        let z = Lattice::new(1).unwrap();
        let n = closed_neighborhood(&z, &PointSet::singleton(vec![0]), &"2.5".parse().unwrap()).unwrap();
        assert_eq!(n.to_vec(), (-2..=2).map(|i| vec![i]).collect::<Vec<_>>());
        let zero = closed_neighborhood(&z, &PointSet::singleton(vec![3]), &Dist::zero()).unwrap();
        assert_eq!(zero.to_vec(), vec![vec![3]]);
    }

    #[test]
    fn harmonic_closed_neighborhood_doubles() {
        let h = Harmonic::new();
        let a = harmonic_set(1..=12);
        let n = closed_neighborhood(&h, &a, &Dist::one()).unwrap();
        assert!(n.len() >= 24);
        assert!((13..=24).all(|i| n.contains(&i)));
    }

    #[test]
    fn float_levels_group_with_tolerance() {
        let m = FiniteMetric::from_float_matrix(
            vec!["a".into(), "b".into(), "c".into()],
            &[vec![0.0, 0.3, 0.1 + 0.2], vec![0.3, 0.0, 0.5], vec![0.1 + 0.2, 0.5, 0.0]],
            DEFAULT_LEVEL_TOLERANCE,
        )
        .unwrap();
        let l = distance_levels(&m, &PointSet::singleton(0), 5).unwrap();
        assert_eq!(l.levels.len(), 2);
        assert_eq!(l.members[1].len(), 2);
    }
}
