use std::sync::RwLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::space::MetricSpace;

/// Float screening margin; closer comparisons are decided exactly.
const SCREEN: f64 = 1e-9;

#[derive(Debug, Clone, Default)]
struct Sums {
    // exact[i] = H_i, exact[0] = 0; approx[i] is H_i as a float
    exact: Vec<BigRational>,
    approx: Vec<f64>,
}

impl Sums {
    /// `H_x - H_y <= r`.
    fn diff_le(&self, x: u64, y: u64, r: &BigRational, rf: f64) -> bool {
        let d = self.approx[x as usize] - self.approx[y as usize];
        if d < rf - SCREEN {
            true
        } else if d > rf + SCREEN {
            false
        } else {
            &(&self.exact[x as usize] - &self.exact[y as usize]) <= r
        }
    }
}

/// The partial sums `x_n = 1 + 1/2 + ... + 1/n` (`n >= 1`) with the metric of
/// the real line. Points are the indices `n`.
#[derive(Debug)]
pub struct Harmonic {
    sums: RwLock<Sums>,
}

impl Clone for Harmonic {
    fn clone(&self) -> Self {
        Harmonic { sums: RwLock::new(self.sums.read().expect("poisoned").clone()) }
    }
}

impl Default for Harmonic {
    fn default() -> Self {
        Self::new()
    }
}

impl Harmonic {
    pub fn new() -> Self {
        let sums = Sums { exact: vec![BigRational::from_integer(BigInt::from(0))], approx: vec![0.0] };
        Harmonic { sums: RwLock::new(sums) }
    }

    /// Makes `H_0..=H_n` available.
    fn ensure(&self, n: u64) {
        let n = n as usize;
        if n < self.sums.read().expect("poisoned").exact.len() {
            return;
        }
        let mut sums = self.sums.write().expect("poisoned");
        // grow geometrically so that walks outward do not extend one at a time
        let len = sums.exact.len();
        let target = n.max(len + (len / 2).clamp(16, 4096));
        while sums.exact.len() <= target {
            let i = sums.exact.len();
            let next = &sums.exact[i - 1] + BigRational::new(BigInt::from(1), BigInt::from(i));
            sums.approx.push(next.to_f64().unwrap_or(f64::INFINITY));
            sums.exact.push(next);
        }
    }

    /// `H_n` exactly.
    pub fn partial_sum(&self, n: u64) -> BigRational {
        self.ensure(n);
        self.sums.read().expect("poisoned").exact[n as usize].clone()
    }
}

impl MetricSpace for Harmonic {
    type Point = u64;

    fn name(&self) -> String {
        "harmonic".into()
    }

    fn distance(&self, x: &u64, y: &u64) -> Dist {
        self.ensure(*x.max(y));
        let sums = self.sums.read().expect("poisoned");
        let (a, b) = if x >= y { (x, y) } else { (y, x) };
        Dist::from_rational(&sums.exact[*a as usize] - &sums.exact[*b as usize])
    }

    fn neighborhood(&self, seeds: &[u64], radius: &Dist, cap: usize) -> Result<Vec<(u64, Dist)>> {
        let mut seeds: Vec<u64> = seeds.to_vec();
        seeds.sort_unstable();
        seeds.dedup();
        if seeds.is_empty() || radius.is_negative() {
            return Ok(Vec::new());
        }
        let r = radius.as_rational();
        let rf = radius.to_f64();
        // maximal runs of consecutive seeds
        let mut runs: Vec<(u64, u64)> = Vec::new();
        for &s in &seeds {
            match runs.last_mut() {
                Some(last) if s == last.1 + 1 => last.1 = s,
                _ => runs.push((s, s)),
            }
        }
        let mut ranges: Vec<(u64, u64)> = Vec::new();
        for &(a, b) in &runs {
            self.ensure(b + 1);
            let mut lo = a;
            {
                let sums = self.sums.read().expect("poisoned");
                while lo > 1 && sums.diff_le(a, lo - 1, r, rf) {
                    lo -= 1;
                }
            }
            let mut hi = b;
            loop {
                self.ensure(hi + 1);
                let sums = self.sums.read().expect("poisoned");
                if !sums.diff_le(hi + 1, b, r, rf) {
                    break;
                }
                hi += 1;
                if hi - lo > cap as u64 {
                    return Err(Error::HorizonExceeded { cap });
                }
            }
            match ranges.last_mut() {
                Some(last) if lo <= last.1 + 1 => last.1 = last.1.max(hi),
                _ => ranges.push((lo, hi)),
            }
        }
        let total: u64 = ranges.iter().map(|(a, b)| b - a + 1).sum();
        if total > cap as u64 {
            return Err(Error::HorizonExceeded { cap });
        }
        let sums = self.sums.read().expect("poisoned");
        let h = &sums.exact;
        let mut out = Vec::with_capacity(total as usize);
        for (a, b) in ranges {
            for y in a..=b {
                // nearest seeds on either side
                let i = seeds.partition_point(|&s| s < y);
                if i < seeds.len() && seeds[i] == y {
                    out.push((y, Dist::zero()));
                    continue;
                }
                let right = (i < seeds.len()).then(|| seeds[i]);
                let left = (i > 0).then(|| seeds[i - 1]);
                let nearer_left = match (left, right) {
                    (Some(l), Some(rt)) => {
                        let dl = sums.approx[y as usize] - sums.approx[l as usize];
                        let dr = sums.approx[rt as usize] - sums.approx[y as usize];
                        if (dl - dr).abs() > SCREEN {
                            Some(dl < dr)
                        } else {
                            None
                        }
                    }
                    (Some(_), None) => Some(true),
                    _ => Some(false),
                };
                let d = match nearer_left {
                    Some(true) => &h[y as usize] - &h[left.expect("left seed") as usize],
                    Some(false) => &h[right.expect("right seed") as usize] - &h[y as usize],
                    None => {
                        let dl = &h[y as usize] - &h[left.expect("left seed") as usize];
                        let dr = &h[right.expect("right seed") as usize] - &h[y as usize];
                        dl.min(dr)
                    }
                };
                out.push((y, Dist::from_rational(d)));
            }
        }
        Ok(out)
    }

    /// `H_(s+m) - H_s` for the largest seed `s`: that radius already holds
    /// `m` nonzero levels.
    fn level_radius_hint_for(&self, seeds: &[u64], m: usize) -> Dist {
        match seeds.iter().max() {
            Some(&s) if m > 0 => self.distance(&s, &(s + m as u64)),
            _ => Dist::one(),
        }
    }

    fn base_point(&self) -> u64 {
        1
    }

    fn label(&self, p: &u64) -> String {
        format!("x{p}")
    }

    fn parse_point(&self, s: &str) -> Option<u64> {
        let n: u64 = s.trim().trim_start_matches('x').parse().ok()?;
        (n >= 1).then_some(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_distances() {
        let h = Harmonic::new();
        assert_eq!(h.distance(&2, &5), Dist::ratio(47, 60));
        assert_eq!(h.distance(&5, &2), Dist::ratio(47, 60));
        assert_eq!(h.distance(&3, &3), Dist::zero());
        assert_eq!(h.parse_point("x7"), Some(7));
        assert_eq!(h.parse_point("0"), None);
    }

    #[test]
    fn neighborhood_matches_scan() {
        let h = Harmonic::new();
        let seeds = [3, 9, 10];
        let r = Dist::ratio(1, 4);
        let got = h.neighborhood(&seeds, &r, 1000).unwrap();
        let expect: Vec<(u64, Dist)> = (1..60)
            .filter_map(|y| {
                let d = seeds.iter().map(|s| h.distance(&y, s)).min().unwrap();
                (d <= r).then_some((y, d))
            })
            .collect();
        assert_eq!(got, expect);
    }

    #[test]
    fn neighborhood_respects_cap() {
        let h = Harmonic::new();
        assert!(matches!(h.neighborhood(&[1], &Dist::from_int(10), 100), Err(Error::HorizonExceeded { .. })));
    }
}
