//! Linear complexity over `F_{p^k}` and linear algebra for recurrence
//! certificates.

use crate::field::{FieldElement, FiniteField};

/// Berlekamp-Massey: length of the shortest linear recurrence generating
/// `seq`, with its connection polynomial `1 + c_1 X + ... + c_L X^L`.
pub fn berlekamp_massey(field: &FiniteField, seq: &[FieldElement]) -> (usize, Vec<FieldElement>) {
    let one = field.one();
    let mut c = vec![one];
    let mut b = vec![one];
    let mut l = 0usize;
    let mut m = 1usize;
    let mut last = one;
    for n in 0..seq.len() {
        let mut d = seq[n];
        for i in 1..=l {
            d = field.add(d, field.mul(c[i], seq[n - i]));
        }
        if d.is_zero() {
            m += 1;
            continue;
        }
        let coef = field.div(d, last).expect("last discrepancy is nonzero");
        let prev = c.clone();
        if c.len() < b.len() + m {
            c.resize(b.len() + m, field.zero());
        }
        for (i, &bi) in b.iter().enumerate() {
            c[i + m] = field.sub(c[i + m], field.mul(coef, bi));
        }
        if 2 * l <= n {
            l = n + 1 - l;
            b = prev;
            last = d;
            m = 1;
        } else {
            m += 1;
        }
    }
    c.truncate(l + 1);
    c.resize(l + 1, field.zero());
    (l, c)
}

pub fn linear_complexity(field: &FiniteField, seq: &[FieldElement]) -> usize {
    berlekamp_massey(field, seq).0
}

/// A nonzero `c` with `rows * c = 0`, if the columns are dependent.
pub fn kernel_vector(field: &FiniteField, rows: &[Vec<FieldElement>], ncols: usize) -> Option<Vec<FieldElement>> {
    let mut a: Vec<Vec<FieldElement>> = rows.to_vec();
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(pr) = (r..a.len()).find(|&i| !a[i][col].is_zero()) else { continue };
        a.swap(r, pr);
        let inv = field.inv(a[r][col]).expect("pivot is nonzero");
        for x in a[r].iter_mut() {
            *x = field.mul(*x, inv);
        }
        for i in 0..a.len() {
            if i != r && !a[i][col].is_zero() {
                let f = a[i][col];
                for j in 0..ncols {
                    let v = field.mul(f, a[r][j]);
                    a[i][j] = field.sub(a[i][j], v);
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == a.len() {
            break;
        }
    }
    let free = (0..ncols).find(|c| !pivots.contains(c))?;
    let mut x = vec![field.zero(); ncols];
    x[free] = field.one();
    for (row, &pc) in pivots.iter().enumerate() {
        x[pc] = field.neg(a[row][free]);
    }
    Some(x)
}

/// Coefficients `c_1..c_M`, not all zero, with `sum c_i s_{n + j_i} = 0`
/// for every `n` of a periodic sequence of period `s.len()`.
pub fn shift_annihilator(field: &FiniteField, s: &[FieldElement], offsets: &[usize]) -> Option<Vec<FieldElement>> {
    let t = s.len();
    let rows: Vec<Vec<FieldElement>> = (0..t).map(|n| offsets.iter().map(|&j| s[(n + j) % t]).collect()).collect();
    kernel_vector(field, &rows, offsets.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corner_cases() {
        let f = FiniteField::prime(7).unwrap();
        let zeros = vec![f.zero(); 12];
        assert_eq!(linear_complexity(&f, &zeros), 0);
        let mut tail = vec![f.zero(); 9];
        tail.push(f.one());
        assert_eq!(linear_complexity(&f, &tail), 10);
        assert_eq!(linear_complexity(&f, &[]), 0);
    }

    #[test]
    fn fibonacci_has_complexity_two() {
        let f = FiniteField::prime(5).unwrap();
        let mut s = vec![f.one(), f.one()];
        for i in 2..20 {
            s.push(f.add(s[i - 1], s[i - 2]));
        }
        let (l, c) = berlekamp_massey(&f, &s);
        assert_eq!(l, 2);
        // s_n + c1 s_{n-1} + c2 s_{n-2} = 0
        assert_eq!(c, vec![f.one(), f.from_int(-1), f.from_int(-1)]);
    }

    #[test]
    fn kernel_of_dependent_columns() {
        let f = FiniteField::prime(3).unwrap();
        let rows = vec![vec![f.one(), f.from_int(2), f.one()], vec![f.zero(), f.one(), f.one()]];
        let x = kernel_vector(&f, &rows, 3).unwrap();
        for r in &rows {
            let dot = r.iter().zip(&x).fold(f.zero(), |acc, (a, b)| f.add(acc, f.mul(*a, *b)));
            assert!(dot.is_zero());
        }
        assert!(x.iter().any(|c| !c.is_zero()));
        let full = vec![vec![f.one(), f.zero()], vec![f.zero(), f.one()]];
        assert!(kernel_vector(&f, &full, 2).is_none());
    }
}
