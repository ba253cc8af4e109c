//! Box discrepancy of coordinate vectors over `F_p^k`.
//!
//! Boxes are products of half-open integer intervals `[a_i, b_i)` with
//! `0 <= a_i < b_i <= p`. Hit counts come from a `k`-dimensional prefix-sum
//! table, so each box costs `2^k` lookups.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper bound on the number of boxes visited in exact mode.
pub const BOX_BUDGET: u64 = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoxMode {
    All,
    Sample { count: u64, seed: u64 },
}

/// `|N - vol T / p^k|` kept as the exact fraction `numerator / p^k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub numerator: u64,
    pub denominator: u64,
    /// Number of non-pole terms `T`.
    pub terms: u64,
    pub boxes: u64,
}

impl Discrepancy {
    pub fn value(&self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }
}

/// Discrepancy of `points` (each `Some(coords)`, or `None` for a pole, which
/// is dropped from both the counts and `T`), restricted to the coordinate
/// indices in `dims` (all when `None`).
pub fn discrepancy(p: u64, points: &[Option<Vec<u64>>], dims: Option<&[usize]>, mode: BoxMode) -> Result<Discrepancy> {
    let full_k = points.iter().flatten().map(|c| c.len()).next().unwrap_or(1);
    let dims: Vec<usize> = match dims {
        Some(d) => d.to_vec(),
        None => (0..full_k).collect(),
    };
    if dims.is_empty() || dims.iter().any(|&d| d >= full_k.max(1)) {
        return Err(Error::InvalidConfiguration("coordinate subset out of range".into()));
    }
    let k = dims.len() as u32;
    let side = (p + 1) as usize;
    let cells = side.pow(k);
    // prefix[c] = #{points with coord_i < c_i for all i}
    let mut table = vec![0u64; cells];
    let mut terms = 0u64;
    for c in points.iter().flatten() {
        let mut idx = 0usize;
        for &d in dims.iter().rev() {
            idx = idx * side + c[d] as usize + 1;
        }
        table[idx] += 1;
        terms += 1;
    }
    for axis in 0..k as usize {
        let stride = side.pow(axis as u32);
        for i in 0..cells {
            if !(i / stride).is_multiple_of(side) {
                table[i] += table[i - stride];
            }
        }
    }
    let denominator = p.pow(k);
    let count = |lo: &[u64], hi: &[u64]| -> i64 {
        let mut total = 0i64;
        for mask in 0u32..(1 << k) {
            let mut idx = 0usize;
            for i in (0..k as usize).rev() {
                let c = if mask & (1 << i) != 0 { lo[i] } else { hi[i] };
                idx = idx * side + c as usize;
            }
            let sign = if mask.count_ones() % 2 == 0 { 1 } else { -1 };
            total += sign * table[idx] as i64;
        }
        total
    };
    let deviation = |lo: &[u64], hi: &[u64]| -> u64 {
        let vol: u64 = lo.iter().zip(hi).map(|(a, b)| b - a).product();
        let n = count(lo, hi);
        (n as i128 * denominator as i128 - vol as i128 * terms as i128).unsigned_abs() as u64
    };
    let mut best = 0u64;
    let mut boxes = 0u64;
    match mode {
        BoxMode::All => {
            let per_axis = p * (p + 1) / 2;
            let total = (per_axis as u128).pow(k);
            if total > BOX_BUDGET as u128 {
                return Err(Error::scale("discrepancy boxes", total.min(u64::MAX as u128) as u64, BOX_BUDGET));
            }
            let intervals: Vec<(u64, u64)> = (0..p).flat_map(|a| (a + 1..=p).map(move |b| (a, b))).collect();
            let mut choice = vec![0usize; k as usize];
            let mut lo = vec![0u64; k as usize];
            let mut hi = vec![0u64; k as usize];
            loop {
                for i in 0..k as usize {
                    (lo[i], hi[i]) = intervals[choice[i]];
                }
                best = best.max(deviation(&lo, &hi));
                boxes += 1;
                let mut i = 0;
                loop {
                    if i == k as usize {
                        return Ok(Discrepancy { numerator: best, denominator, terms, boxes });
                    }
                    choice[i] += 1;
                    if choice[i] < intervals.len() {
                        break;
                    }
                    choice[i] = 0;
                    i += 1;
                }
            }
        }
        BoxMode::Sample { count: n, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut lo = vec![0u64; k as usize];
            let mut hi = vec![0u64; k as usize];
            for _ in 0..n {
                for i in 0..k as usize {
                    let a = rng.gen_range(0..p);
                    let b = rng.gen_range(a + 1..=p);
                    lo[i] = a;
                    hi[i] = b;
                }
                best = best.max(deviation(&lo, &hi));
                boxes += 1;
            }
        }
    }
    Ok(Discrepancy { numerator: best, denominator, terms, boxes })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_sequence() {
        let pts = vec![Some(vec![2u64]); 10];
        let d = discrepancy(5, &pts, None, BoxMode::All).unwrap();
        // the box [2,3) holds all 10 points against an expectation of 2
        assert_eq!(d.value(), 10.0 * (1.0 - 1.0 / 5.0));
        assert_eq!(d.boxes, 15);
    }

    #[test]
    fn uniform_input_has_zero_discrepancy() {
        let mut pts = Vec::new();
        for a in 0..3u64 {
            for b in 0..3u64 {
                pts.push(Some(vec![a, b]));
            }
        }
        let d = discrepancy(3, &pts, None, BoxMode::All).unwrap();
        assert_eq!(d.numerator, 0);
    }

    #[test]
    fn matches_direct_box_counts() {
        let pts: Vec<Option<Vec<u64>>> = (0..40u64).map(|i| Some(vec![(i * 7 + 3) % 5, (i * i) % 5])).collect();
        let d = discrepancy(5, &pts, None, BoxMode::All).unwrap();
        let mut best = 0f64;
        for a0 in 0..5u64 {
            for b0 in a0 + 1..=5 {
                for a1 in 0..5u64 {
                    for b1 in a1 + 1..=5 {
                        let n = pts
                            .iter()
                            .flatten()
                            .filter(|c| (a0..b0).contains(&c[0]) && (a1..b1).contains(&c[1]))
                            .count() as f64;
                        let e = ((b0 - a0) * (b1 - a1)) as f64 * 40.0 / 25.0;
                        best = best.max((n - e).abs());
                    }
                }
            }
        }
        assert!((d.value() - best).abs() < 1e-12);
        let first = discrepancy(5, &pts, Some(&[0]), BoxMode::All).unwrap();
        let proj: Vec<Option<Vec<u64>>> = pts.iter().map(|c| c.as_ref().map(|v| vec![v[0]])).collect();
        assert_eq!(first, discrepancy(5, &proj, None, BoxMode::All).unwrap());
    }

    #[test]
    fn sample_never_exceeds_exact() {
        let pts: Vec<Option<Vec<u64>>> = (0..30u64).map(|i| Some(vec![(i * 3 + i / 7) % 5])).collect();
        let exact = discrepancy(5, &pts, None, BoxMode::All).unwrap();
        for seed in 0..10 {
            let s = discrepancy(5, &pts, None, BoxMode::Sample { count: 7, seed }).unwrap();
            assert!(s.numerator <= exact.numerator);
        }
    }

    #[test]
    fn poles_are_dropped() {
        let pts = vec![Some(vec![0u64]), None, Some(vec![1])];
        let d = discrepancy(2, &pts, None, BoxMode::All).unwrap();
        assert_eq!(d.terms, 2);
        assert_eq!(d.numerator, 0);
    }
}
