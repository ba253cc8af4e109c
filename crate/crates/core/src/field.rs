//! Arithmetic in `F_p` and `F_{p^k}`.
//!
//! Elements are packed as the integer `c_0 + c_1 p + ... + c_{k-1} p^{k-1}`
//! of their power-basis coordinates. Every field keeps discrete log and
//! exponent tables built from a primitive element, so multiplication,
//! powering, square roots and Frobenius are table lookups. That caps the
//! field size at [`MAX_FIELD_SIZE`], which is the desk-scale regime all
//! enumeration kernels live in anyway.

use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use num_complex::Complex;
use num_traits::{Float, FloatConst};
use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};

/// Largest field order for which tables are built.
pub const MAX_FIELD_SIZE: u64 = 1 << 24;

/// Serializable description of a field: `p`, `k` and the monic modulus
/// `X^k + c_{k-1} X^{k-1} + ... + c_0`, constant coefficient first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u64,
    pub k: usize,
    pub modulus: Vec<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FieldElement(u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);

    /// Packed representation (base-`p` digits are the coordinates).
    pub fn index(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

const NO_LOG: u32 = u32::MAX;

pub struct FiniteField {
    p: u64,
    k: usize,
    q: u64,
    modulus: Vec<u64>,
    exp: Vec<u32>,
    log: Vec<u32>,
    // z -> some root of Z^2 + Z = c, char 2 only.
    artin_schreier: OnceLock<Vec<u32>>,
}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteField").field("p", &self.p).field("k", &self.k).field("modulus", &self.modulus).finish()
    }
}

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.k == other.k && self.modulus == other.modulus
    }
}

impl Eq for FiniteField {}

impl FiniteField {
    /// The prime field `F_p`.
    pub fn prime(p: u64) -> Result<Self> {
        Self::new(p, 1, None)
    }

    /// `F_{p^k}` with a caller-supplied modulus or, if `None`, the first
    /// irreducible monic polynomial in lexicographic order.
    pub fn new(p: u64, k: usize, modulus: Option<&[u64]>) -> Result<Self> {
        if !arith::is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        if k == 0 {
            return Err(Error::InvalidField("extension degree must be >= 1".into()));
        }
        let q = checked_order(p, k)?;
        let modulus = match modulus {
            Some(m) => {
                if m.len() != k {
                    return Err(Error::InvalidField(format!("modulus needs {k} coefficients, got {}", m.len())));
                }
                if let Some(c) = m.iter().find(|&&c| c >= p) {
                    return Err(Error::InvalidField(format!("coefficient {c} not reduced mod {p}")));
                }
                if !poly::is_irreducible(m, p) {
                    return Err(Error::InvalidField(format!("modulus {m:?} is reducible over F_{p}")));
                }
                m.to_vec()
            }
            None => default_modulus(p, k),
        };
        let (exp, log) = build_tables(p, k, q, &modulus);
        Ok(FiniteField { p, k, q, modulus, exp, log, artin_schreier: OnceLock::new() })
    }

    pub fn from_spec(spec: &FieldSpec) -> Result<Self> {
        Self::new(spec.p, spec.k, Some(&spec.modulus))
    }

    pub fn spec(&self) -> FieldSpec {
        FieldSpec { p: self.p, k: self.k, modulus: self.modulus.clone() }
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn order(&self) -> u64 {
        self.q
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement(0)
    }

    pub fn one(&self) -> FieldElement {
        FieldElement(1)
    }

    /// The class of `X` in `F_p[X]/(modulus)`.
    pub fn gen_x(&self) -> FieldElement {
        if self.k == 1 {
            FieldElement(((self.p - self.modulus[0]) % self.p) as u32)
        } else {
            FieldElement(self.p as u32)
        }
    }

    pub fn from_int(&self, n: i64) -> FieldElement {
        FieldElement(n.rem_euclid(self.p as i64) as u32)
    }

    /// Element from an index in `[0, q)`; used to walk the field.
    pub fn element(&self, index: u64) -> FieldElement {
        debug_assert!(index < self.q);
        FieldElement(index as u32)
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.q as u32).map(FieldElement)
    }

    pub fn from_coords(&self, coords: &[u64]) -> Result<FieldElement> {
        if coords.len() != self.k {
            return Err(Error::InvalidField(format!("expected {} coordinates, got {}", self.k, coords.len())));
        }
        let mut v = 0u64;
        for &c in coords.iter().rev() {
            if c >= self.p {
                return Err(Error::InvalidField(format!("coordinate {c} not reduced mod {}", self.p)));
            }
            v = v * self.p + c;
        }
        Ok(FieldElement(v as u32))
    }

    /// Power-basis coordinates `(c_0, ..., c_{k-1})`.
    pub fn coords(&self, a: FieldElement) -> Vec<u64> {
        let mut v = a.0 as u64;
        (0..self.k)
            .map(|_| {
                let c = v % self.p;
                v /= self.p;
                c
            })
            .collect()
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.k == 1 {
            let s = a.0 as u64 + b.0 as u64;
            return FieldElement(if s >= self.p { s - self.p } else { s } as u32);
        }
        if self.p == 2 {
            return FieldElement(a.0 ^ b.0);
        }
        let (mut x, mut y) = (a.0 as u64, b.0 as u64);
        let (mut out, mut scale) = (0u64, 1u64);
        while x > 0 || y > 0 {
            let mut d = x % self.p + y % self.p;
            if d >= self.p {
                d -= self.p;
            }
            out += d * scale;
            scale *= self.p;
            x /= self.p;
            y /= self.p;
        }
        FieldElement(out as u32)
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        if self.p == 2 {
            return a;
        }
        if self.k == 1 {
            return FieldElement(if a.0 == 0 { 0 } else { (self.p - a.0 as u64) as u32 });
        }
        let mut x = a.0 as u64;
        let (mut out, mut scale) = (0u64, 1u64);
        while x > 0 {
            let d = x % self.p;
            if d != 0 {
                out += (self.p - d) * scale;
            }
            scale *= self.p;
            x /= self.p;
        }
        FieldElement(out as u32)
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.0 == 0 || b.0 == 0 {
            return FieldElement(0);
        }
        let n = self.q as u32 - 1;
        let mut s = self.log[a.0 as usize] + self.log[b.0 as usize];
        if s >= n {
            s -= n;
        }
        FieldElement(self.exp[s as usize])
    }

    pub fn square(&self, a: FieldElement) -> FieldElement {
        self.mul(a, a)
    }

    /// Scalar multiple `n * a` for a rational integer `n`.
    pub fn mul_int(&self, a: FieldElement, n: i64) -> FieldElement {
        self.mul(a, self.from_int(n))
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.0 == 0 {
            return Err(Error::DivisionByZero);
        }
        let n = self.q as u32 - 1;
        let l = self.log[a.0 as usize];
        Ok(FieldElement(self.exp[if l == 0 { 0 } else { (n - l) as usize }]))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        if e == 0 {
            return self.one();
        }
        if a.0 == 0 {
            return a;
        }
        let n = self.q - 1;
        let l = self.log[a.0 as usize] as u64;
        FieldElement(self.exp[arith::mul_mod(l, e % n, n) as usize])
    }

    /// `a^(p^e)`.
    pub fn frobenius(&self, a: FieldElement, e: u32) -> FieldElement {
        self.pow(a, arith::pow_mod(self.p, e as u64, self.q - 1).max(1))
    }

    /// Discrete log to the table's primitive element.
    pub fn log(&self, a: FieldElement) -> Option<u64> {
        let l = self.log[a.0 as usize];
        (l != NO_LOG).then_some(l as u64)
    }

    pub fn primitive_element(&self) -> FieldElement {
        FieldElement(self.exp[if self.exp.len() > 1 { 1 } else { 0 }])
    }

    pub fn is_square(&self, a: FieldElement) -> bool {
        a.0 == 0 || self.p == 2 || self.log[a.0 as usize].is_multiple_of(2)
    }

    /// A square root, if one exists. Deterministic: for odd `q` returns
    /// `g^(log a / 2)`.
    pub fn sqrt(&self, a: FieldElement) -> Option<FieldElement> {
        if a.0 == 0 {
            return Some(a);
        }
        let l = self.log[a.0 as usize] as u64;
        if self.p == 2 {
            let half = if l.is_multiple_of(2) { l / 2 } else { (l + self.q - 1) / 2 };
            return Some(FieldElement(self.exp[half as usize]));
        }
        l.is_multiple_of(2).then(|| FieldElement(self.exp[(l / 2) as usize]))
    }

    /// Absolute trace `Tr(a) = a + a^p + ... + a^(p^(k-1))`, as a residue mod `p`.
    pub fn abs_trace(&self, a: FieldElement) -> u64 {
        let mut acc = self.zero();
        let mut x = a;
        for _ in 0..self.k {
            acc = self.add(acc, x);
            x = self.frobenius(x, 1);
        }
        debug_assert!((acc.0 as u64) < self.p);
        acc.0 as u64
    }

    /// `psi_j(a) = exp(2 pi i j Tr(a) / p)` for `j` not divisible by `p`.
    pub fn additive_character<R: Float + FloatConst>(&self, a: FieldElement, j: u64) -> Result<Complex<R>> {
        if j.is_multiple_of(self.p) {
            return Err(Error::TrivialCharacter(j));
        }
        let j = j % self.p;
        let t = arith::mul_mod(j, self.abs_trace(a), self.p);
        let angle = R::TAU() * R::from(t).unwrap() / R::from(self.p).unwrap();
        Ok(Complex::new(angle.cos(), angle.sin()))
    }

    /// Some `z` with `z^2 + z = c` in characteristic 2.
    pub fn solve_artin_schreier(&self, c: FieldElement) -> Option<FieldElement> {
        assert_eq!(self.p, 2, "Artin-Schreier solver is for characteristic 2");
        let table = self.artin_schreier.get_or_init(|| {
            let mut t = vec![NO_LOG; self.q as usize];
            for z in self.elements() {
                let w = self.add(self.square(z), z);
                if t[w.0 as usize] == NO_LOG {
                    t[w.0 as usize] = z.0;
                }
            }
            t
        });
        let z = table[c.0 as usize];
        (z != NO_LOG).then_some(FieldElement(z))
    }

    /// Evaluates a polynomial with coefficients (constant first) in this field.
    pub fn eval_poly(&self, coeffs: &[FieldElement], x: FieldElement) -> FieldElement {
        coeffs.iter().rev().fold(self.zero(), |acc, &c| self.add(self.mul(acc, x), c))
    }

    /// Embedding of `self` into `target`, a field of order `q^m` over the same
    /// prime. The image of `X` is the smallest root of `self`'s modulus lying
    /// in the order-`q` subfield of `target`.
    pub fn embedding_into(&self, target: &FiniteField) -> Result<Embedding> {
        self.embeddings_into(target)?
            .into_iter()
            .next()
            .ok_or_else(|| Error::InvalidField("no root of the base modulus in the extension".into()))
    }

    /// Every embedding of `self` into `target`, ordered by the image of `X`.
    pub fn embeddings_into(&self, target: &FiniteField) -> Result<Vec<Embedding>> {
        if target.p != self.p || !target.k.is_multiple_of(self.k) {
            return Err(Error::InvalidField(format!(
                "F_{}^{} does not contain F_{}^{}",
                target.p, target.k, self.p, self.k
            )));
        }
        let lift = |c: u64| target.from_int(c as i64);
        let roots: Vec<FieldElement> = if self.k == 1 {
            vec![target.zero()]
        } else {
            let mut poly: Vec<FieldElement> = self.modulus.iter().map(|&c| lift(c)).collect();
            poly.push(target.one());
            let step = (target.q - 1) / (self.q - 1);
            let mut r: Vec<FieldElement> = (0..self.q - 1)
                .map(|i| FieldElement(target.exp[(i * step) as usize]))
                .filter(|&z| target.eval_poly(&poly, z).is_zero())
                .collect();
            r.sort();
            r
        };
        Ok(roots
            .into_iter()
            .map(|root| {
                let mut powers = Vec::with_capacity(self.k);
                let mut acc = target.one();
                for _ in 0..self.k {
                    powers.push(acc);
                    acc = target.mul(acc, root);
                }
                let mut embedding = Embedding { powers, back: HashMap::with_capacity(self.q as usize) };
                for a in self.elements() {
                    let img = embedding.image(self, target, a);
                    embedding.back.insert(img, a);
                }
                embedding
            })
            .collect())
    }
}

/// Ring embedding `F_q -> F_{q^m}` fixed by the image of `X`.
#[derive(Debug, Clone)]
pub struct Embedding {
    powers: Vec<FieldElement>,
    back: HashMap<FieldElement, FieldElement>,
}

impl Embedding {
    fn image(&self, source: &FiniteField, target: &FiniteField, a: FieldElement) -> FieldElement {
        source
            .coords(a)
            .iter()
            .zip(&self.powers)
            .fold(target.zero(), |acc, (&c, &w)| target.add(acc, target.mul_int(w, c as i64)))
    }

    pub fn apply(&self, source: &FiniteField, target: &FiniteField, a: FieldElement) -> FieldElement {
        self.image(source, target, a)
    }

    /// Preimage of an element of the subfield, `None` outside it.
    pub fn preimage(&self, b: FieldElement) -> Option<FieldElement> {
        self.back.get(&b).copied()
    }
}

fn checked_order(p: u64, k: usize) -> Result<u64> {
    let mut q = 1u64;
    for _ in 0..k {
        q = q.saturating_mul(p);
        if q > MAX_FIELD_SIZE {
            return Err(Error::scale(format!("field F_{p}^{k}"), q, MAX_FIELD_SIZE));
        }
    }
    Ok(q)
}

fn default_modulus(p: u64, k: usize) -> Vec<u64> {
    if k == 1 {
        return vec![0];
    }
    let q = p.pow(k as u32);
    (0..q)
        .map(|n| {
            let mut v = n;
            (0..k)
                .map(|_| {
                    let c = v % p;
                    v /= p;
                    c
                })
                .collect::<Vec<_>>()
        })
        .find(|m| poly::is_irreducible(m, p))
        .expect("irreducible polynomials exist in every degree")
}

fn build_tables(p: u64, k: usize, q: u64, modulus: &[u64]) -> (Vec<u32>, Vec<u32>) {
    let n = q - 1;
    let mul = |a: u64, b: u64| {
        poly::pack(&poly::mul_mod_monic(&poly::unpack(a, p, k), &poly::unpack(b, p, k), modulus, p), p)
    };
    let pow = |a: u64, mut e: u64| {
        let (mut acc, mut base) = (1u64, a);
        while e > 0 {
            if e & 1 == 1 {
                acc = mul(acc, base);
            }
            base = mul(base, base);
            e >>= 1;
        }
        acc
    };
    let primes = arith::prime_divisors(n);
    let generator = (1..q)
        .find(|&g| pow(g, n) == 1 && primes.iter().all(|&r| pow(g, n / r) != 1))
        .expect("multiplicative group of a field is cyclic");
    let mut exp = vec![0u32; n as usize];
    let mut log = vec![NO_LOG; q as usize];
    let mut x = 1u64;
    for i in 0..n {
        exp[i as usize] = x as u32;
        log[x as usize] = i as u32;
        x = mul(x, generator);
    }
    (exp, log)
}

/// Dense polynomials over `F_p`, constant coefficient first.
pub(crate) mod poly {
    use crate::arith;

    pub fn unpack(mut v: u64, p: u64, k: usize) -> Vec<u64> {
        (0..k)
            .map(|_| {
                let c = v % p;
                v /= p;
                c
            })
            .collect()
    }

    pub fn pack(c: &[u64], p: u64) -> u64 {
        c.iter().rev().fold(0, |acc, &x| acc * p + x)
    }

    fn trim(mut a: Vec<u64>) -> Vec<u64> {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    /// `a * b mod (X^k + modulus)` for reduced `a`, `b` of length `k`.
    pub fn mul_mod_monic(a: &[u64], b: &[u64], modulus: &[u64], p: u64) -> Vec<u64> {
        let k = modulus.len();
        let mut prod = vec![0u64; 2 * k];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        for d in (k..2 * k).rev() {
            let c = prod[d];
            if c == 0 {
                continue;
            }
            prod[d] = 0;
            for (i, &m) in modulus.iter().enumerate() {
                prod[d - k + i] = (prod[d - k + i] + p * p - c * m % p) % p;
            }
        }
        prod.truncate(k);
        prod
    }

    fn rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let b = trim(b.to_vec());
        let mut r = trim(a.to_vec());
        let lead_inv = arith::inv_mod(*b.last().unwrap() as i64, p).unwrap();
        while r.len() >= b.len() {
            let shift = r.len() - b.len();
            let c = r.last().unwrap() * lead_inv % p;
            for (i, &bi) in b.iter().enumerate() {
                r[shift + i] = (r[shift + i] + p * p - c * bi % p) % p;
            }
            r = trim(r);
        }
        r
    }

    fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    /// Rabin's test for the monic polynomial `X^k + modulus`.
    pub fn is_irreducible(modulus: &[u64], p: u64) -> bool {
        let k = modulus.len();
        if k == 1 {
            return true;
        }
        let mut full: Vec<u64> = modulus.to_vec();
        full.push(1);
        let x = {
            let mut v = vec![0u64; k];
            v[1] = 1;
            v
        };
        let pow_p = |a: &[u64]| {
            let (mut acc, mut base, mut e) = (
                {
                    let mut one = vec![0u64; k];
                    one[0] = 1;
                    one
                },
                a.to_vec(),
                p,
            );
            while e > 0 {
                if e & 1 == 1 {
                    acc = mul_mod_monic(&acc, &base, modulus, p);
                }
                base = mul_mod_monic(&base, &base, modulus, p);
                e >>= 1;
            }
            acc
        };
        // frob[i] = X^(p^i) mod f
        let mut frob = vec![x.clone()];
        for i in 1..=k {
            let next = pow_p(&frob[i - 1]);
            frob.push(next);
        }
        if frob[k] != x {
            return false;
        }
        arith::prime_divisors(k as u64).into_iter().all(|r| {
            let mut h = frob[k / r as usize].clone();
            h[1] = (h[1] + p - 1) % p;
            let g = gcd(&full, &h, p);
            g.len() == 1
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f25() -> FiniteField {
        FiniteField::new(5, 2, Some(&[2, 0])).unwrap()
    }

    #[test]
    fn prime_field_examples() {
        let f = FiniteField::prime(5).unwrap();
        assert_eq!(f.add(f.from_int(3), f.from_int(4)), f.from_int(2));
        assert_eq!(f.inv(f.from_int(2)).unwrap(), f.from_int(3));
        assert_eq!(f.inv(f.zero()), Err(Error::DivisionByZero));
    }

    #[test]
    fn extension_reduction_by_modulus() {
        let f = f25();
        let x = f.gen_x();
        // X^2 = -2 = 3
        assert_eq!(f.mul(x, x), f.from_int(3));
    }

    #[test]
    fn default_modulus_is_lexicographically_first() {
        let f = FiniteField::new(5, 2, None).unwrap();
        assert_eq!(f.modulus(), &[2, 0]);
        let f8 = FiniteField::new(2, 3, None).unwrap();
        // X^3 + X + 1
        assert_eq!(f8.modulus(), &[1, 1, 0]);
    }

    #[test]
    fn reducible_modulus_rejected() {
        // X^2 + 1 = (X - 2)(X + 2) over F_5
        assert!(matches!(FiniteField::new(5, 2, Some(&[1, 0])), Err(Error::InvalidField(_))));
        assert!(FiniteField::new(4, 1, None).is_err());
    }

    #[test]
    fn oversized_field_is_scale_limited() {
        assert!(matches!(FiniteField::new(2, 30, None), Err(Error::ScaleLimit { .. })));
    }

    #[test]
    fn trace_of_x_in_f25() {
        let f = f25();
        let x = f.gen_x();
        // oracle: X + X^5 evaluated by repeated squaring on the residue
        let mut x5 = f.one();
        for _ in 0..5 {
            x5 = f.mul(x5, x);
        }
        let direct = f.add(x, x5);
        assert_eq!(direct.index() as u64, f.abs_trace(x));
        // X^5 = X * (X^2)^2 = X * 9 = 4X, so X + X^5 = 5X = 0
        assert_eq!(f.abs_trace(x), 0);
        assert_eq!(f.abs_trace(f.zero()), 0);
        assert_eq!(f.abs_trace(f.one()), 2);
    }

    #[test]
    fn trace_on_prime_field_is_identity() {
        let f = FiniteField::prime(13).unwrap();
        for a in f.elements() {
            assert_eq!(f.abs_trace(a), a.index() as u64);
        }
    }

    #[test]
    fn coords_roundtrip_examples() {
        let f = f25();
        let a = f.from_coords(&[2, 3]).unwrap();
        assert_eq!(f.coords(a), vec![2, 3]);
        assert_eq!(f.coords(f.zero()), vec![0, 0]);
        let p = FiniteField::prime(7).unwrap();
        assert_eq!(p.coords(p.from_int(3)), vec![3]);
        // reassembling sum c_i X^i gives the element back
        let x = f.gen_x();
        assert_eq!(f.add(f.from_int(2), f.mul_int(x, 3)), a);
    }

    #[test]
    fn character_examples() {
        let f = FiniteField::prime(5).unwrap();
        let one: Complex<f64> = f.additive_character(f.zero(), 1).unwrap();
        assert!((one - Complex::new(1.0, 0.0)).norm() < 1e-15);
        let z: Complex<f64> = f.additive_character(f.one(), 1).unwrap();
        let expected = Complex::from_polar(1.0, std::f64::consts::TAU / 5.0);
        assert!((z - expected).norm() < 1e-15);
        let total: Complex<f64> = f.elements().map(|a| f.additive_character::<f64>(a, 1).unwrap()).sum();
        assert!(total.norm() < 1e-12);
        assert_eq!(f.additive_character::<f64>(f.one(), 5), Err(Error::TrivialCharacter(5)));
    }

    #[test]
    fn frobenius_fixes_exactly_prime_field() {
        for (p, k) in [(2u64, 12usize), (3, 7), (5, 5), (7, 4), (71, 2), (4999, 1)] {
            let f = FiniteField::new(p, k, None).unwrap();
            if f.order() > 5000 {
                continue;
            }
            let mut fixed = 0;
            for a in f.elements() {
                let fa = f.frobenius(a, 1);
                if fa == a {
                    fixed += 1;
                    assert!((a.index() as u64) < p);
                }
            }
            assert_eq!(fixed, p);
            for a in f.elements().step_by(7) {
                for b in f.elements().step_by(11) {
                    assert_eq!(f.frobenius(f.add(a, b), 1), f.add(f.frobenius(a, 1), f.frobenius(b, 1)));
                }
            }
        }
    }

    #[test]
    fn character_orthogonality_exhaustive() {
        // (1/q) sum over all q characters psi_c(xi) = [xi == 0], where the
        // characters of F_q are xi -> psi_1(c * xi).
        for (p, k) in [(2u64, 1usize), (3, 2), (5, 3), (7, 2), (2, 6), (5, 1)] {
            let f = FiniteField::new(p, k, None).unwrap();
            let q = f.order() as f64;
            for xi in f.elements() {
                let s: Complex<f64> = f.elements().map(|c| f.additive_character::<f64>(f.mul(c, xi), 1).unwrap()).sum();
                let want = if xi.is_zero() { 1.0 } else { 0.0 };
                assert!((s / q - Complex::new(want, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn sqrt_and_artin_schreier() {
        for (p, k) in [(7u64, 1usize), (3, 3), (2, 5), (2, 4)] {
            let f = FiniteField::new(p, k, None).unwrap();
            for a in f.elements() {
                match f.sqrt(a) {
                    Some(r) => assert_eq!(f.square(r), a),
                    None => assert!(!f.is_square(a)),
                }
                if p == 2 {
                    if let Some(z) = f.solve_artin_schreier(a) {
                        assert_eq!(f.add(f.square(z), z), a);
                        assert_eq!(f.abs_trace(a), 0);
                    } else {
                        assert_eq!(f.abs_trace(a), 1);
                    }
                }
            }
        }
    }

    #[test]
    fn embedding_is_a_ring_homomorphism() {
        let base = FiniteField::new(3, 2, None).unwrap();
        let ext = FiniteField::new(3, 6, None).unwrap();
        let e = base.embedding_into(&ext).unwrap();
        for a in base.elements() {
            for b in base.elements() {
                let (ea, eb) = (e.apply(&base, &ext, a), e.apply(&base, &ext, b));
                assert_eq!(e.apply(&base, &ext, base.mul(a, b)), ext.mul(ea, eb));
                assert_eq!(e.apply(&base, &ext, base.add(a, b)), ext.add(ea, eb));
            }
            assert_eq!(e.preimage(e.apply(&base, &ext, a)), Some(a));
        }
    }
}
