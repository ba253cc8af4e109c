//! Closed forms of the character-sum, discrepancy and linear-complexity
//! bounds, with every implied constant set to 1.
//!
//! Exponents are kept as exact rationals so their algebra can be checked
//! independently of floating point.

use num_rational::Ratio;
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Exponent = Ratio<i64>;

/// Every quantity entering the bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundParams<R> {
    /// Hölder parameter `nu >= 1`.
    pub nu: u32,
    pub deg_f: R,
    /// Period `T`.
    pub period: R,
    /// Point order `l`.
    pub l: R,
    /// `n(ann(P))`.
    pub norm_l: R,
    pub q: R,
    /// `|D_E|`.
    pub abs_d: R,
    pub p: R,
    /// `q = p^k`.
    pub k: u32,
}

impl<R: Float> BoundParams<R> {
    fn validate(&self) -> Result<()> {
        if self.nu < 1 {
            return Err(Error::InvalidConfiguration("nu must be >= 1".into()));
        }
        let pos = [self.deg_f, self.period, self.l, self.norm_l, self.q, self.abs_d, self.p];
        if pos.iter().any(|&x| !(x > R::zero()) || !x.is_finite()) || self.k == 0 {
            return Err(Error::InvalidConfiguration("bound parameters must be positive".into()));
        }
        Ok(())
    }

    pub fn with_nu(&self, nu: u32) -> Self {
        BoundParams { nu, ..*self }
    }
}

fn pow<R: Float>(base: R, e: Exponent) -> R {
    base.powf(R::from(*e.numer()).unwrap() / R::from(*e.denom()).unwrap())
}

fn nu_ratio(num: i64, den: i64) -> Exponent {
    Exponent::new(num, den)
}

/// Exponents `(of T, of l, of q)` in the first character-sum bound.
pub fn theorem1_exponents(nu: u32) -> (Exponent, Exponent, Exponent) {
    let n = nu as i64;
    (
        Exponent::from_integer(1) - nu_ratio(3 * n + 2, 2 * n * (n + 2)),
        nu_ratio(2 * n + 2, n * (n + 2)),
        nu_ratio(1, 4 * (n + 2)),
    )
}

/// `deg f T^{1-(3nu+2)/(2nu(nu+2))} l^{(2nu+2)/(nu(nu+2))} q^{1/(4(nu+2))}`.
pub fn theorem1<R: Float>(bp: &BoundParams<R>) -> Result<R> {
    bp.validate()?;
    let (et, el, eq) = theorem1_exponents(bp.nu);
    Ok(bp.deg_f * pow(bp.period, et) * pow(bp.l, el) * pow(bp.q, eq))
}

/// Exponents of the two branches of the small-discriminant bound, each as
/// `(of |D|, of T, of n(l), of q)`.
pub fn theorem2_exponents(nu: u32) -> [(Exponent, Exponent, Exponent, Exponent); 2] {
    let n = nu as i64;
    let one = Exponent::from_integer(1);
    [
        (
            nu_ratio(1, 4 * (n + 1)),
            one - nu_ratio(2 * n + 1, 2 * n * (n + 1)),
            nu_ratio(1, 2 * n),
            nu_ratio(1, 4 * (n + 1)),
        ),
        (nu_ratio(1, n), one - nu_ratio(1, 2 * n), Exponent::from_integer(0), nu_ratio(1, 4 * n)),
    ]
}

/// Both branches of the small-discriminant bound.
pub fn theorem2_branches<R: Float>(bp: &BoundParams<R>) -> Result<(R, R)> {
    bp.validate()?;
    let [a, b] = theorem2_exponents(bp.nu);
    let branch = |(ed, et, en, eq): (Exponent, Exponent, Exponent, Exponent)| {
        bp.deg_f * pow(bp.abs_d, ed) * pow(bp.period, et) * pow(bp.norm_l, en) * pow(bp.q, eq)
    };
    Ok((branch(a), branch(b)))
}

pub fn theorem2<R: Float>(bp: &BoundParams<R>) -> Result<R> {
    let (a, b) = theorem2_branches(bp)?;
    Ok(a.max(b))
}

/// Both branches of the linear-complexity lower bound:
/// `T / (l^{4/3} deg^{1/3})` and `T / (|D|^{5/4} n(l)^{1/2} deg^{5/4})`.
pub fn theorem3_branches<R: Float>(bp: &BoundParams<R>) -> Result<(R, R)> {
    bp.validate()?;
    let a = bp.period / (pow(bp.l, nu_ratio(4, 3)) * pow(bp.deg_f, nu_ratio(1, 3)));
    let b = bp.period / (pow(bp.abs_d, nu_ratio(5, 4)) * bp.norm_l.sqrt() * pow(bp.deg_f, nu_ratio(5, 4)));
    Ok((a, b))
}

pub fn theorem3<R: Float>(bp: &BoundParams<R>) -> Result<R> {
    let (a, b) = theorem3_branches(bp)?;
    Ok(a.max(b))
}

/// Degree hypothesis `deg f < l^{2 - eps}` of the linear-complexity bound.
pub fn theorem3_hypothesis<R: Float>(bp: &BoundParams<R>, eps: R) -> bool {
    bp.deg_f < bp.l.powf(R::from(2).unwrap() - eps)
}

/// `(log p + 1)^k`, natural logarithm.
pub fn corollary_factor<R: Float>(bp: &BoundParams<R>) -> R {
    (bp.p.ln() + R::one()).powi(bp.k as i32)
}

/// Discrepancy bound derived from the first character-sum bound.
pub fn corollary1<R: Float>(bp: &BoundParams<R>) -> Result<R> {
    Ok(theorem1(bp)? * corollary_factor(bp))
}

/// Discrepancy bound derived from the small-discriminant bound.
pub fn corollary2<R: Float>(bp: &BoundParams<R>) -> Result<R> {
    Ok(theorem2(bp)? * corollary_factor(bp))
}

/// Where a bound stops being trivial, and whether its hypotheses hold for an
/// explicitly supplied `eps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Threshold<R> {
    pub min_period: R,
    pub min_size: R,
    pub period_ok: bool,
    pub size_ok: bool,
}

/// `T >= l^{4/3} q^{1/6+eps}` and `l >= q^{1/4+eps}`.
pub fn theorem1_threshold<R: Float>(bp: &BoundParams<R>, eps: R) -> Threshold<R> {
    let min_period = pow(bp.l, nu_ratio(4, 3)) * bp.q.powf(R::from(1.0 / 6.0).unwrap() + eps);
    let min_size = bp.q.powf(R::from(0.25).unwrap() + eps);
    Threshold { min_period, min_size, period_ok: bp.period >= min_period, size_ok: bp.l >= min_size }
}

/// `T >= max{|D|^{1/4} n(l)^{1/2} q^{1/4+eps}, D^2 q}` and `n(l) >= q^{1/2+eps}`.
pub fn theorem2_threshold<R: Float>(bp: &BoundParams<R>, eps: R) -> Threshold<R> {
    let quarter = R::from(0.25).unwrap();
    let a = bp.abs_d.powf(quarter) * bp.norm_l.sqrt() * bp.q.powf(quarter + eps);
    let b = bp.abs_d * bp.abs_d * bp.q;
    let min_period = a.max(b);
    let min_size = bp.q.powf(R::from(0.5).unwrap() + eps);
    Threshold { min_period, min_size, period_ok: bp.period >= min_period, size_ok: bp.norm_l >= min_size }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(nu: u32) -> BoundParams<f64> {
        BoundParams { nu, deg_f: 2.0, period: 64.0, l: 8.0, norm_l: 64.0, q: 16.0, abs_d: 4.0, p: 2.0, k: 4 }
    }

    #[test]
    fn nu_one_exponents() {
        let (et, el, eq) = theorem1_exponents(1);
        assert_eq!(et, Exponent::new(1, 6));
        assert_eq!(el, Exponent::new(4, 3));
        assert_eq!(eq, Exponent::new(1, 12));
        // with l^2 = T the l-power folds into T: 1/6 + (4/3)/2 = 5/6
        assert_eq!(et + el / 2, Exponent::new(5, 6));
    }

    #[test]
    fn theorem1_hand_value() {
        // 2 * 64^{1/6} * 8^{4/3} * 16^{1/12} = 2 * 2 * 16 * 2^{1/3}
        let v = theorem1(&params(1)).unwrap();
        assert!((v - 64.0 * 2f64.cbrt()).abs() < 1e-9);
    }

    #[test]
    fn theorem1_tends_to_trivial() {
        let mut prev = 0.0;
        for nu in 1..60 {
            let (et, _, _) = theorem1_exponents(nu);
            let e = *et.numer() as f64 / *et.denom() as f64;
            assert!(e > prev);
            prev = e;
        }
        assert!(prev > 0.97);
    }

    #[test]
    fn theorem2_and_3_are_maxima() {
        let bp = params(2);
        let (a, b) = theorem2_branches(&bp).unwrap();
        assert_eq!(theorem2(&bp).unwrap(), a.max(b));
        let big_d = BoundParams { abs_d: 1e12, ..bp };
        let (c, d) = theorem3_branches(&big_d).unwrap();
        assert!(c > d);
        assert_eq!(theorem3(&big_d).unwrap(), c);
    }

    #[test]
    fn nu_zero_rejected() {
        assert!(matches!(theorem1(&params(0)), Err(Error::InvalidConfiguration(_))));
        assert!(theorem2(&params(0)).is_err());
    }

    #[test]
    fn single_precision_agrees() {
        let p64 = params(3);
        let p32 = BoundParams::<f32> {
            nu: 3,
            deg_f: 2.0,
            period: 64.0,
            l: 8.0,
            norm_l: 64.0,
            q: 16.0,
            abs_d: 4.0,
            p: 2.0,
            k: 4,
        };
        let (a, b) = (theorem1(&p64).unwrap(), theorem1(&p32).unwrap() as f64);
        assert!((a - b).abs() / a < 1e-5);
    }
}
