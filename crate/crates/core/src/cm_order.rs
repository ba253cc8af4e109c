//! Orders `O = Z[omega]` of imaginary quadratic fields, `omega = (D + sqrt D)/2`,
//! with ideals kept in Hermite normal form `sZ + (b + c omega)Z`.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};

/// `x + y omega` in the standard basis of an order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OrderElement {
    pub x: i64,
    pub y: i64,
}

impl OrderElement {
    pub const ZERO: OrderElement = OrderElement { x: 0, y: 0 };
    pub const ONE: OrderElement = OrderElement { x: 1, y: 0 };
    pub const OMEGA: OrderElement = OrderElement { x: 0, y: 1 };

    pub fn new(x: i64, y: i64) -> Self {
        OrderElement { x, y }
    }

    pub fn integer(n: i64) -> Self {
        OrderElement { x: n, y: 0 }
    }

    pub fn is_zero(&self) -> bool {
        self.x == 0 && self.y == 0
    }

    pub fn add(self, o: Self) -> Self {
        OrderElement::new(self.x + o.x, self.y + o.y)
    }

    pub fn sub(self, o: Self) -> Self {
        OrderElement::new(self.x - o.x, self.y - o.y)
    }

    pub fn neg(self) -> Self {
        OrderElement::new(-self.x, -self.y)
    }

    pub fn scale(self, n: i64) -> Self {
        OrderElement::new(self.x * n, self.y * n)
    }
}

impl fmt::Display for OrderElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}w", self.x, self.y)
    }
}

fn narrow(v: i128) -> i64 {
    i64::try_from(v).expect("order arithmetic overflowed i64")
}

/// The order of discriminant `D = u^2 D_K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CMOrder {
    d_k: i64,
    u: u64,
    d: i64,
}

impl CMOrder {
    pub fn new(d_k: i64, u: u64) -> Result<Self> {
        if !arith::is_fundamental_discriminant(d_k) {
            return Err(Error::InvalidConfiguration(format!("{d_k} is not a negative fundamental discriminant")));
        }
        if u == 0 {
            return Err(Error::InvalidConfiguration("conductor must be >= 1".into()));
        }
        let d = (u as i128 * u as i128 * d_k as i128) as i64;
        Ok(CMOrder { d_k, u, d })
    }

    pub fn maximal(d_k: i64) -> Result<Self> {
        Self::new(d_k, 1)
    }

    pub fn fundamental_discriminant(&self) -> i64 {
        self.d_k
    }

    pub fn conductor(&self) -> u64 {
        self.u
    }

    pub fn discriminant(&self) -> i64 {
        self.d
    }

    /// Number of units: 6 for `D = -3`, 4 for `D = -4`, otherwise 2.
    pub fn unit_count(&self) -> u32 {
        match self.d {
            -3 => 6,
            -4 => 4,
            _ => 2,
        }
    }

    /// `n(omega) = (D^2 - D) / 4`; `omega^2 = D omega - n(omega)`.
    pub fn omega_norm(&self) -> i64 {
        let d = self.d as i128;
        narrow((d * d - d) / 4)
    }

    pub fn mul(&self, a: OrderElement, b: OrderElement) -> OrderElement {
        let (x1, y1, x2, y2) = (a.x as i128, a.y as i128, b.x as i128, b.y as i128);
        let n = self.omega_norm() as i128;
        let yy = y1 * y2;
        OrderElement::new(narrow(x1 * x2 - yy * n), narrow(x1 * y2 + x2 * y1 + yy * self.d as i128))
    }

    pub fn conj(&self, a: OrderElement) -> OrderElement {
        OrderElement::new(narrow(a.x as i128 + a.y as i128 * self.d as i128), -a.y)
    }

    pub fn norm(&self, a: OrderElement) -> u64 {
        let (x, y) = (a.x as i128, a.y as i128);
        let n = x * x + self.d as i128 * x * y + self.omega_norm() as i128 * y * y;
        debug_assert!(n >= 0);
        n as u64
    }

    pub fn trace(&self, a: OrderElement) -> i64 {
        2 * a.x + a.y * self.d
    }

    pub fn pow(&self, a: OrderElement, mut e: u64) -> OrderElement {
        let mut base = a;
        let mut acc = OrderElement::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn unit_ideal(&self) -> IdealHNF {
        IdealHNF { s: 1, b: 0, c: 1 }
    }

    /// Validates a triple as an ideal of this order.
    pub fn ideal(&self, s: u64, b: u64, c: u64) -> Result<IdealHNF> {
        if s == 0 || c == 0 || !s.is_multiple_of(c) || b >= s || !b.is_multiple_of(c) {
            return Err(Error::InvalidConfiguration(format!("({s}, {b}, {c}) is not in Hermite normal form")));
        }
        let a = IdealHNF { s, b, c };
        let w = OrderElement::OMEGA;
        if !a.contains_element(self.mul(w, a.basis()[0])) || !a.contains_element(self.mul(w, a.basis()[1])) {
            return Err(Error::InvalidConfiguration(format!("({s}, {b}, {c}) is not closed under omega")));
        }
        Ok(a)
    }

    /// The ideal generated by `gens` as an `O`-module.
    pub fn ideal_from_generators(&self, gens: &[OrderElement]) -> Result<IdealHNF> {
        let mut vecs = Vec::with_capacity(gens.len() * 2);
        for &g in gens {
            vecs.push(g);
            vecs.push(self.mul(g, OrderElement::OMEGA));
        }
        lattice_hnf(&vecs)
    }

    pub fn principal(&self, a: OrderElement) -> Result<IdealHNF> {
        self.ideal_from_generators(&[a])
    }

    /// `nO` for a positive integer `n`.
    pub fn integer_ideal(&self, n: u64) -> IdealHNF {
        assert!(n > 0);
        IdealHNF { s: n, b: 0, c: n }
    }

    pub fn product(&self, a: &IdealHNF, b: &IdealHNF) -> IdealHNF {
        let mut gens = Vec::with_capacity(4);
        for x in a.basis() {
            for y in b.basis() {
                gens.push(self.mul(x, y));
            }
        }
        self.ideal_from_generators(&gens).expect("product of nonzero ideals")
    }

    pub fn sum(&self, a: &IdealHNF, b: &IdealHNF) -> IdealHNF {
        let [a0, a1] = a.basis();
        let [b0, b1] = b.basis();
        lattice_hnf(&[a0, a1, b0, b1]).expect("sum of nonzero ideals")
    }

    pub fn power(&self, a: &IdealHNF, e: u32) -> IdealHNF {
        (0..e).fold(self.unit_ideal(), |acc, _| self.product(&acc, a))
    }

    pub fn conjugate_ideal(&self, a: &IdealHNF) -> IdealHNF {
        let [v0, v1] = a.basis();
        lattice_hnf(&[self.conj(v0), self.conj(v1)]).expect("nonzero ideal")
    }

    pub fn is_coprime(&self, a: &IdealHNF, b: &IdealHNF) -> bool {
        self.sum(a, b).is_unit()
    }

    /// `a` is prime to the conductor iff `gcd(n(a), u) = 1`.
    pub fn is_coprime_to_conductor(&self, a: &IdealHNF) -> bool {
        arith::gcd(a.norm(), self.u) == 1
    }

    /// Whether `(alpha) + a = O`.
    pub fn element_coprime(&self, alpha: OrderElement, a: &IdealHNF) -> bool {
        if a.is_unit() {
            return true;
        }
        if alpha.is_zero() {
            return false;
        }
        let p = self.principal(alpha).expect("nonzero");
        self.is_coprime(&p, a)
    }

    pub fn mul_mod(&self, a: OrderElement, b: OrderElement, m: &IdealHNF) -> OrderElement {
        m.reduce(self.mul(m.reduce(a), m.reduce(b)))
    }

    pub fn pow_mod(&self, a: OrderElement, mut e: u64, m: &IdealHNF) -> OrderElement {
        let mut base = m.reduce(a);
        let mut acc = m.reduce(OrderElement::ONE);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_mod(acc, base, m);
            }
            base = self.mul_mod(base, base, m);
            e >>= 1;
        }
        acc
    }

    /// Least `T >= 1` with `alpha^T = 1 mod m`, by iterating residues.
    pub fn multiplicative_order_mod(&self, alpha: OrderElement, m: &IdealHNF) -> Result<u64> {
        if !self.element_coprime(alpha, m) {
            return Err(Error::NotInvertible);
        }
        let one = m.reduce(OrderElement::ONE);
        let a = m.reduce(alpha);
        let mut cur = a;
        let mut t = 1u64;
        while cur != one {
            cur = self.mul_mod(cur, a, m);
            t += 1;
            if t > m.norm() {
                return Err(Error::Inconsistent(format!("no finite order for {alpha} mod {m}")));
            }
        }
        Ok(t)
    }

    pub fn inverse_mod(&self, alpha: OrderElement, m: &IdealHNF) -> Result<OrderElement> {
        let t = self.multiplicative_order_mod(alpha, m)?;
        Ok(self.pow_mod(alpha, t - 1, m))
    }

    /// Residues of `O / m` that are units.
    pub fn unit_residues(&self, m: &IdealHNF) -> Vec<OrderElement> {
        m.residues().filter(|&r| self.element_coprime(r, m)).collect()
    }

    /// Prime ideals above the rational prime `r`, `r` prime to the conductor.
    pub fn primes_over(&self, r: u64) -> Result<Vec<IdealHNF>> {
        if self.u.is_multiple_of(r) {
            return Err(Error::ConductorCollision { norm: r, conductor: self.u });
        }
        let d = self.d;
        let kr = arith::kronecker(d, r);
        if kr == -1 {
            return Ok(vec![self.integer_ideal(r)]);
        }
        let roots: Vec<u64> = if r == 2 {
            let n = self.omega_norm();
            (0..2u64).filter(|&a| (a as i64 * a as i64 - d * a as i64 + n).rem_euclid(2) == 0).collect()
        } else {
            let ri = r as i64;
            let sq = arith::sqrt_mod_prime(d.rem_euclid(ri) as u64, r).expect("residue by Kronecker");
            let half = arith::inv_mod(2, r).expect("odd prime");
            let mut v: Vec<u64> = [sq as i64, -(sq as i64)]
                .iter()
                .map(|&s| arith::mul_mod((d + s).rem_euclid(ri) as u64, half, r))
                .collect();
            v.sort_unstable();
            v.dedup();
            v
        };
        roots.into_iter().map(|a| self.ideal(r, (r - a) % r, 1)).collect()
    }

    /// Prime factorization of an ideal prime to the conductor.
    pub fn factor_ideal(&self, a: &IdealHNF) -> Result<Vec<(IdealHNF, u32)>> {
        let n = a.norm();
        if !self.is_coprime_to_conductor(a) {
            return Err(Error::ConductorCollision { norm: n, conductor: self.u });
        }
        let mut out = Vec::new();
        let mut covered = 1u64;
        for r in arith::prime_divisors(n) {
            for p in self.primes_over(r)? {
                let mut e = 0;
                let mut pe = p;
                while a.is_contained_in(&pe) {
                    e += 1;
                    pe = self.product(&pe, &p);
                }
                if e > 0 {
                    covered *= p.norm().pow(e);
                    out.push((p, e));
                }
            }
        }
        if covered != n {
            return Err(Error::Inconsistent(format!("factorization of {a} covers norm {covered}, expected {n}")));
        }
        Ok(out)
    }

    /// `phi_K(a) = #(O/a)^*`.
    pub fn phi(&self, a: &IdealHNF) -> Result<u64> {
        let f = self.factor_ideal(a)?;
        Ok(f.iter().fold(a.norm(), |acc, (p, _)| acc / p.norm() * (p.norm() - 1)))
    }

    pub fn mobius(&self, a: &IdealHNF) -> Result<i64> {
        let f = self.factor_ideal(a)?;
        if f.iter().any(|&(_, e)| e > 1) {
            Ok(0)
        } else if f.len() % 2 == 0 {
            Ok(1)
        } else {
            Ok(-1)
        }
    }

    /// Number of distinct prime ideal divisors.
    pub fn omega_count(&self, a: &IdealHNF) -> Result<u32> {
        Ok(self.factor_ideal(a)?.len() as u32)
    }

    /// Every ideal of norm at most `bound`, by scanning HNF triples.
    pub fn ideals_up_to(&self, bound: u64) -> Vec<IdealHNF> {
        let mut out = Vec::new();
        for s in 1..=bound {
            for c in arith::divisors(s) {
                if s * c > bound {
                    break;
                }
                for b in (0..s).step_by(c as usize) {
                    if let Ok(a) = self.ideal(s, b, c) {
                        out.push(a);
                    }
                }
            }
        }
        out.sort_by_key(|a| (a.norm(), a.s, a.b, a.c));
        out
    }

    /// All ideals containing `a` (its divisors when `a` is invertible),
    /// restricted to norm at most `bound`.
    pub fn divisors_up_to(&self, a: &IdealHNF, bound: u64) -> Vec<IdealHNF> {
        let n = a.norm();
        let mut out = Vec::new();
        for m in arith::divisors(n).into_iter().filter(|&m| m <= bound) {
            for c in arith::divisors(m) {
                if m % (c * c) != 0 {
                    continue;
                }
                let s = m / c;
                if s % c != 0 {
                    continue;
                }
                for b in (0..s).step_by(c as usize) {
                    if let Ok(cand) = self.ideal(s, b, c) {
                        if a.is_contained_in(&cand) {
                            out.push(cand);
                        }
                    }
                }
            }
        }
        out.sort_by_key(|a| (a.norm(), a.s, a.b, a.c));
        out
    }

    /// Nonzero `alpha` in `a` with `n(alpha) <= j`, row by row.
    pub fn ball_points(&self, a: &IdealHNF, j: u64) -> Vec<OrderElement> {
        let mut out = Vec::new();
        self.scan_ball(a, j, |lo, hi, k, s, b, c| {
            for m in lo..=hi {
                let e = OrderElement::new(narrow(m as i128 * s + k as i128 * b), narrow(k as i128 * c));
                if !e.is_zero() {
                    out.push(e);
                }
            }
        });
        out
    }

    /// `#{alpha in a : 0 < n(alpha) <= j}`, exact, via
    /// `4 n(x + y omega) = (2x + Dy)^2 + |D| y^2`.
    pub fn count_norm_ball(&self, a: &IdealHNF, j: u64) -> u64 {
        let mut total = 0u64;
        self.scan_ball(a, j, |lo, hi, _, _, _, _| {
            if hi >= lo {
                total += (hi - lo + 1) as u64;
            }
        });
        total - 1
    }

    /// Calls `row(m_lo, m_hi, k, s, b, c)` for each `k`, the admissible `m`
    /// being those with `m s + k (b + c omega)` in the ellipse.
    fn scan_ball(&self, a: &IdealHNF, j: u64, mut row: impl FnMut(i64, i64, i64, i128, i128, i128)) {
        let (s, b, c) = (a.s as i128, a.b as i128, a.c as i128);
        let d = self.d as i128;
        let absd = -d;
        let four_j = 4 * j as i128;
        // |D| y^2 <= 4J with y = k c
        let kmax = arith::isqrt((four_j / (absd * c * c)) as u64) as i64;
        for k in -kmax..=kmax {
            let y = k as i128 * c;
            let rem = four_j - absd * y * y;
            if rem < 0 {
                continue;
            }
            let r = arith::isqrt(rem as u64) as i128;
            // z = 2 m s + z0 with |z| <= r
            let z0 = 2 * k as i128 * b + d * y;
            let lo = (-r - z0).div_euclid(2 * s) + i128::from((-r - z0).rem_euclid(2 * s) != 0);
            let hi = (r - z0).div_euclid(2 * s);
            row(lo as i64, hi as i64, k, s, b, c);
        }
    }

    /// `#{alpha : 0 < n(alpha) <= j, (alpha) + a = O}` by enumeration and a
    /// residue-class coprimality table.
    pub fn count_coprime_norm_ball(&self, a: &IdealHNF, j: u64) -> Result<u64> {
        if !self.is_coprime_to_conductor(a) {
            return Err(Error::ConductorCollision { norm: a.norm(), conductor: self.u });
        }
        let units: HashSet<OrderElement> = self.unit_residues(a).into_iter().collect();
        let whole = self.unit_ideal();
        Ok(self.ball_points(&whole, j).into_iter().filter(|&g| units.contains(&a.reduce(g))).count() as u64)
    }

    /// The same count by inclusion-exclusion over squarefree divisors.
    pub fn count_coprime_by_mobius(&self, a: &IdealHNF, j: u64) -> Result<i64> {
        let primes: Vec<IdealHNF> = self.factor_ideal(a)?.into_iter().map(|(p, _)| p).collect();
        let mut total = 0i64;
        for mask in 0u32..(1 << primes.len()) {
            let mut b = self.unit_ideal();
            for (i, p) in primes.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    b = self.product(&b, p);
                }
            }
            let sign = if mask.count_ones() % 2 == 0 { 1 } else { -1 };
            total += sign * self.count_norm_ball(&b, j) as i64;
        }
        Ok(total)
    }

    /// `M_rho(J)`: pairs `(n, gamma)`, `1 <= n <= T`, `0 < n(gamma) <= J`,
    /// with `tau^n = rho gamma mod a`. Returns `(M_rho, T)`.
    pub fn count_representations(
        &self,
        tau: OrderElement,
        rho: OrderElement,
        a: &IdealHNF,
        j: u64,
    ) -> Result<(u64, u64)> {
        let t = self.multiplicative_order_mod(tau, a)?;
        if !self.element_coprime(rho, a) {
            return Err(Error::NotInvertible);
        }
        let powers: HashSet<OrderElement> = (1..=t).map(|n| self.pow_mod(tau, n, a)).collect();
        let whole = self.unit_ideal();
        let m = self.ball_points(&whole, j).into_iter().filter(|&g| powers.contains(&self.mul_mod(rho, g, a))).count()
            as u64;
        Ok((m, t))
    }

    /// Main term `2 pi J / (w sqrt|D| n(a))` for the count of `a`-elements up
    /// to units.
    pub fn lattice_main_term(&self, a: &IdealHNF, j: f64) -> f64 {
        2.0 * std::f64::consts::PI * j / (self.unit_count() as f64 * (-(self.d as f64)).sqrt() * a.norm() as f64)
    }
}

/// Integers in `[1, j]` prime to `l`, by sieving out multiples of the prime
/// divisors of `l`.
pub fn sieve_coprime_count(j: u64, l: u64) -> u64 {
    let mut alive = vec![true; j as usize + 1];
    alive[0] = false;
    for r in arith::prime_divisors(l) {
        let mut m = r;
        while m <= j {
            alive[m as usize] = false;
            m += r;
        }
    }
    alive.iter().filter(|&&x| x).count() as u64
}

/// HNF of the Z-lattice spanned by `vecs`; errors on a degenerate lattice.
fn lattice_hnf(vecs: &[OrderElement]) -> Result<IdealHNF> {
    // the pivot x-coordinate is kept reduced modulo s once s is known
    let mut pivot: Option<(i128, i128)> = None;
    let mut s: i128 = 0;
    let red = |x: i128, s: i128| if s == 0 { x } else { x.rem_euclid(s) };
    for v in vecs {
        let (x, y) = (v.x as i128, v.y as i128);
        if y == 0 {
            s = arith::gcd_i128(s, x);
        } else {
            match pivot {
                None => pivot = Some((x, y)),
                Some((px, py)) => {
                    let (g, al, be) = arith::ext_gcd_i128(py, y);
                    let x = red(x, s);
                    let nx = al * px + be * x;
                    let rx = (y / g) * px - (py / g) * x;
                    s = arith::gcd_i128(s, rx);
                    pivot = Some((nx, g));
                }
            }
        }
        if let Some((px, py)) = pivot {
            pivot = Some((red(px, s), py));
        }
    }
    let Some((px, py)) = pivot else {
        return Err(Error::InvalidConfiguration("lattice has rank < 2".into()));
    };
    if s == 0 {
        return Err(Error::InvalidConfiguration("lattice has rank < 2".into()));
    }
    let (px, py) = if py < 0 { (-px, -py) } else { (px, py) };
    Ok(IdealHNF { s: u64::try_from(s).expect("ideal norm fits in u64"), b: px.rem_euclid(s) as u64, c: py as u64 })
}

/// The lattice `sZ + (b + c omega)Z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IdealHNF {
    s: u64,
    b: u64,
    c: u64,
}

impl fmt::Display for IdealHNF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {} + {}w)", self.s, self.b, self.c)
    }
}

impl IdealHNF {
    /// Raw triple without any validation; used to build fault fixtures.
    pub fn from_raw_unchecked(s: u64, b: u64, c: u64) -> Self {
        IdealHNF { s, b, c }
    }

    pub fn triple(&self) -> (u64, u64, u64) {
        (self.s, self.b, self.c)
    }

    pub fn norm(&self) -> u64 {
        self.s * self.c
    }

    /// The least positive rational integer in the ideal.
    pub fn least_integer(&self) -> u64 {
        self.s
    }

    pub fn is_unit(&self) -> bool {
        self.s == 1
    }

    pub fn basis(&self) -> [OrderElement; 2] {
        [OrderElement::new(self.s as i64, 0), OrderElement::new(self.b as i64, self.c as i64)]
    }

    pub fn contains_element(&self, a: OrderElement) -> bool {
        let c = self.c as i64;
        if a.y.rem_euclid(c) != 0 {
            return false;
        }
        let k = a.y / c;
        (a.x as i128 - k as i128 * self.b as i128).rem_euclid(self.s as i128) == 0
    }

    /// `self` is a subset of `other`.
    pub fn is_contained_in(&self, other: &IdealHNF) -> bool {
        self.basis().iter().all(|&v| other.contains_element(v))
    }

    /// Canonical representative `x + y omega`, `0 <= y < c`, `0 <= x < s`.
    pub fn reduce(&self, a: OrderElement) -> OrderElement {
        let c = self.c as i64;
        let y = a.y.rem_euclid(c);
        let k = (a.y - y) / c;
        let x = (a.x as i128 - k as i128 * self.b as i128).rem_euclid(self.s as i128) as i64;
        OrderElement::new(x, y)
    }

    /// All canonical residues of `O / self`.
    pub fn residues(&self) -> impl Iterator<Item = OrderElement> + '_ {
        (0..self.c as i64).flat_map(move |y| (0..self.s as i64).map(move |x| OrderElement::new(x, y)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn element_norms() {
        let o = CMOrder::maximal(-11).unwrap();
        assert_eq!(o.norm(OrderElement::ONE), 1);
        assert_eq!(o.norm(OrderElement::OMEGA), 33);
        let w = OrderElement::OMEGA;
        assert_eq!(o.mul(w, o.conj(w)), OrderElement::integer(33));
        // omega satisfies its minimal polynomial
        let lhs = o.sub_poly(w);
        assert!(lhs.is_zero());
    }

    impl CMOrder {
        fn sub_poly(&self, w: OrderElement) -> OrderElement {
            self.mul(w, w).sub(w.scale(self.d)).add(OrderElement::integer(self.omega_norm()))
        }
    }

    #[test]
    fn unit_counts() {
        assert_eq!(CMOrder::maximal(-3).unwrap().unit_count(), 6);
        assert_eq!(CMOrder::maximal(-4).unwrap().unit_count(), 4);
        assert_eq!(CMOrder::new(-3, 2).unwrap().unit_count(), 2);
        assert_eq!(CMOrder::maximal(-7).unwrap().unit_count(), 2);
        assert!(CMOrder::maximal(-12).is_err());
    }

    #[test]
    fn gaussian_ball() {
        let o = CMOrder::maximal(-4).unwrap();
        let one = o.unit_ideal();
        assert_eq!(o.count_norm_ball(&one, 0), 0);
        assert_eq!(o.count_norm_ball(&one, 1), 4);
        assert_eq!(o.count_norm_ball(&one, 2), 8);
        let p5 = o.primes_over(5).unwrap()[0];
        assert_eq!(o.count_norm_ball(&p5, 4), 0);
    }

    #[test]
    fn ball_count_matches_brute_force() {
        for (dk, u) in [(-3, 1), (-4, 1), (-7, 2), (-11, 1), (-20, 1), (-3, 3)] {
            let o = CMOrder::new(dk, u).unwrap();
            for a in o.ideals_up_to(20) {
                for j in [0u64, 1, 5, 17, 60] {
                    let lim = 40i64;
                    let mut brute = 0;
                    for x in -lim * 10..=lim * 10 {
                        for y in -lim..=lim {
                            let e = OrderElement::new(x, y);
                            if !e.is_zero() && a.contains_element(e) && o.norm(e) <= j {
                                brute += 1;
                            }
                        }
                    }
                    assert_eq!(o.count_norm_ball(&a, j), brute, "D={} a={a} J={j}", o.d);
                    assert_eq!(o.ball_points(&a, j).len() as u64, brute);
                }
            }
        }
    }

    #[test]
    fn splitting_and_phi() {
        let o = CMOrder::maximal(-11).unwrap();
        // (-11/3) = 1: 3 splits; (-11/2) = -1: 2 inert
        assert_eq!(o.primes_over(3).unwrap().len(), 2);
        assert_eq!(o.primes_over(2).unwrap(), vec![o.integer_ideal(2)]);
        assert_eq!(o.primes_over(11).unwrap().len(), 1);
        let unit = o.unit_ideal();
        assert_eq!(o.phi(&unit).unwrap(), 1);
        assert_eq!(o.mobius(&unit).unwrap(), 1);
        assert_eq!(o.omega_count(&unit).unwrap(), 0);
        for t in [2u64, 3, 5, 7, 11, 13] {
            let ideal = o.integer_ideal(t);
            let brute = o.unit_residues(&ideal).len() as u64;
            let expected = match arith::kronecker(-11, t) {
                -1 => t * t - 1,
                1 => (t - 1) * (t - 1),
                _ => t * (t - 1),
            };
            assert_eq!(brute, expected, "t = {t}");
            assert_eq!(o.phi(&ideal).unwrap(), expected);
        }
    }

    #[test]
    fn ramified_prime_squares_to_rational() {
        for dk in [-3i64, -4, -7, -8, -15, -20] {
            let o = CMOrder::maximal(dk).unwrap();
            for r in arith::prime_divisors(dk.unsigned_abs()) {
                let ps = o.primes_over(r).unwrap();
                assert_eq!(ps.len(), 1);
                assert_eq!(o.power(&ps[0], 2), o.integer_ideal(r), "D={dk} r={r}");
            }
        }
    }

    #[test]
    fn conductor_collision() {
        let o = CMOrder::new(-3, 2).unwrap();
        let a = o.integer_ideal(2);
        assert!(!o.is_coprime_to_conductor(&a));
        assert!(matches!(o.phi(&a), Err(Error::ConductorCollision { .. })));
    }

    #[test]
    fn hnf_is_canonical() {
        let o = CMOrder::maximal(-23).unwrap();
        let ideals = o.ideals_up_to(30);
        for a in &ideals {
            assert_eq!(o.product(a, &o.unit_ideal()), *a);
            let [v0, v1] = a.basis();
            // a different basis of the same lattice
            let alt = lattice_hnf(&[v1.add(v0.scale(3)), v0.add(v1.scale(-2)).add(v1.scale(2)), v1]).unwrap();
            assert_eq!(alt, *a);
        }
        for a in ideals.iter().take(8) {
            for b in ideals.iter().take(8) {
                for c in ideals.iter().take(5) {
                    assert_eq!(o.product(&o.product(a, b), c), o.product(a, &o.product(b, c)));
                }
                assert_eq!(o.product(a, b).norm(), a.norm() * b.norm());
            }
        }
    }

    #[test]
    fn ideal_rejects_non_ideal_lattice() {
        let o = CMOrder::maximal(-4).unwrap();
        // 5Z + (1 + w)Z is not closed: w^2 = -4w - 5... check via the minimal
        // polynomial X^2 + 4X + 5; roots mod 5 are 0 and 1, so b = 4 or 0.
        assert!(o.ideal(5, 1, 1).is_err());
        assert!(o.ideal(5, 0, 1).is_ok());
        assert!(o.ideal(5, 4, 1).is_ok());
        assert!(o.ideal(4, 1, 2).is_err());
    }

    #[test]
    fn multiplicative_order_in_inert_quotient() {
        let o = CMOrder::maximal(-3).unwrap();
        // 2 is inert in Z[(1+sqrt-3)/2]; O/(2) = F_4
        let two = o.integer_ideal(2);
        let orders: Vec<u64> =
            o.unit_residues(&two).iter().map(|&r| o.multiplicative_order_mod(r, &two).unwrap()).collect();
        assert_eq!(orders.iter().max(), Some(&3));
        assert_eq!(o.multiplicative_order_mod(OrderElement::integer(2), &two), Err(Error::NotInvertible));
    }

    #[test]
    fn sieve_matches_gcd_count() {
        for l in 1..60u64 {
            for j in [0u64, 1, 10, 77] {
                let direct = (1..=j).filter(|&n| arith::gcd(n, l) == 1).count() as u64;
                assert_eq!(sieve_coprime_count(j, l), direct);
            }
        }
    }
}
