use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::local_graph::{bounded_search, LocalGraph};
use crate::space::MetricSpace;

/// The free group on `rank` generators with the word metric of the symmetric
/// generating set. Points are reduced words; letter `i > 0` is generator `i`,
/// `-i` its inverse.
#[derive(Clone, Debug)]
pub struct FreeGroup {
    rank: usize,
}

impl FreeGroup {
    pub fn new(rank: usize) -> Result<Self> {
        if rank == 0 || rank > 26 {
            return Err(Error::precondition("free group rank must be in 1..=26"));
        }
        Ok(FreeGroup { rank })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Freely reduces a word.
    pub fn reduce(word: &[i8]) -> Vec<i8> {
        let mut out: Vec<i8> = Vec::with_capacity(word.len());
        for &l in word {
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        out
    }
}

fn common_prefix(x: &[i8], y: &[i8]) -> usize {
    x.iter().zip(y).take_while(|(a, b)| a == b).count()
}

impl MetricSpace for FreeGroup {
    type Point = Vec<i8>;

    fn name(&self) -> String {
        format!("free-group({})", self.rank)
    }

    fn distance(&self, x: &Vec<i8>, y: &Vec<i8>) -> Dist {
        let l = common_prefix(x, y);
        Dist::from_u64((x.len() + y.len() - 2 * l) as u64)
    }

    fn neighborhood(&self, seeds: &[Vec<i8>], radius: &Dist, cap: usize) -> Result<Vec<(Vec<i8>, Dist)>> {
        bounded_search(self, seeds, radius, cap)
    }

    fn base_point(&self) -> Vec<i8> {
        Vec::new()
    }

    fn label(&self, p: &Vec<i8>) -> String {
        if p.is_empty() {
            return "e".into();
        }
        p.iter()
            .map(|&l| {
                let c = (b'a' + (l.unsigned_abs() - 1)) as char;
                if l > 0 {
                    c.to_string()
                } else {
                    format!("{c}^-1")
                }
            })
            .collect()
    }

    fn parse_point(&self, s: &str) -> Option<Vec<i8>> {
        let s = s.trim();
        if s == "e" || s.is_empty() {
            return Some(Vec::new());
        }
        let mut word = Vec::new();
        let mut chars = s.chars().peekable();
        while let Some(c) = chars.next() {
            let (g, inverse) = if c.is_ascii_lowercase() {
                (c as u8 - b'a' + 1, false)
            } else if c.is_ascii_uppercase() {
                (c as u8 - b'A' + 1, true)
            } else {
                return None;
            };
            let mut inverse = inverse;
            if chars.peek() == Some(&'^') {
                let rest: String = chars.by_ref().take(3).collect();
                if rest != "^-1" {
                    return None;
                }
                inverse = !inverse;
            }
            if g as usize > self.rank {
                return None;
            }
            word.push(if inverse { -(g as i8) } else { g as i8 });
        }
        Some(Self::reduce(&word))
    }

    fn level_radius_hint(&self, m: usize) -> Dist {
        Dist::from_u64(m.max(1) as u64)
    }
}

impl LocalGraph for FreeGroup {
    fn neighbors(&self, v: &Vec<i8>) -> Vec<(Vec<i8>, Dist)> {
        let mut out = Vec::with_capacity(2 * self.rank);
        for g in 1..=self.rank as i8 {
            for l in [g, -g] {
                let mut w = v.clone();
                if w.last() == Some(&-l) {
                    w.pop();
                } else {
                    w.push(l);
                }
                out.push((w, Dist::one()));
            }
        }
        out
    }

    fn unit_weights(&self) -> bool {
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn word_metric() {
        let f = FreeGroup::new(2).unwrap();
        let w = f.parse_point("aba^-1").unwrap();
        assert_eq!(w, vec![1, 2, -1]);
        assert_eq!(f.distance(&f.base_point(), &w), Dist::from_int(3));
        assert_eq!(f.label(&w), "aba^-1");
        assert_eq!(f.parse_point("abB"), Some(vec![1]));
        assert_eq!(f.parse_point("c"), None);
        assert_eq!(f.distance(&vec![1, 2], &vec![1, -2]), Dist::from_int(2));
    }
}
