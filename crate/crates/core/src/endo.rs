//! Endomorphisms of an ordinary curve as elements of an imaginary quadratic
//! order, their action on torsion points, annihilator ideals and periods.
//!
//! The order is written with `omega = (D + sqrt D)/2` and the Frobenius is
//! identified with `pi = c0 + w omega`, `w = v/u`, `c0 = (t - w D)/2`, so
//! `omega` acts on points as `(pi - c0)/w`.

use std::collections::{HashMap, HashSet};

use num_rational::Ratio;
use num_traits::{One, Zero};

use crate::arith;
use crate::cm_order::{CMOrder, IdealHNF, OrderElement};
use crate::curve::{Curve, Extension, Point, ENUMERATION_BUDGET};
use crate::error::{Error, Result};
use crate::field::Embedding;

pub type Rational = Ratio<i64>;

/// `End(E)` as an order of discriminant `u^2 D_K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EndRing {
    order: CMOrder,
    certified: bool,
    v: u64,
    trace: i64,
    q: u64,
    p: u64,
}

impl EndRing {
    /// The order `End(E)`; when uncertified, an order known to lie inside it.
    pub fn order(&self) -> &CMOrder {
        &self.order
    }

    pub fn is_certified(&self) -> bool {
        self.certified
    }

    pub fn require_certified(&self) -> Result<&Self> {
        if self.certified {
            Ok(self)
        } else {
            Err(Error::UncertifiedRing { conductor_bound: self.order.conductor() })
        }
    }

    pub fn conductor(&self) -> u64 {
        self.order.conductor()
    }

    /// `D_E = u^2 D_K`.
    pub fn discriminant(&self) -> i64 {
        self.order.discriminant()
    }

    /// `w = v / u`, the index of `Z[pi]` in `End(E)`.
    pub fn w(&self) -> u64 {
        self.v / self.order.conductor()
    }

    /// `c0 = (t - w D)/2`, so that `pi = c0 + w omega`.
    pub fn c0(&self) -> i64 {
        (self.trace - self.w() as i64 * self.order.discriminant()) / 2
    }

    /// The Frobenius in order coordinates.
    pub fn pi(&self) -> OrderElement {
        OrderElement::new(self.c0(), self.w() as i64)
    }

    /// `P = (p, pi)`, the ideal of inseparable endomorphisms.
    pub fn frobenius_prime(&self) -> IdealHNF {
        self.order
            .ideal_from_generators(&[OrderElement::integer(self.p as i64), self.pi()])
            .expect("nonzero generators")
    }

    pub fn q(&self) -> u64 {
        self.q
    }
}

/// An element `x + y pi` of `End(E) ⊗ Q` with rational coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Endomorphism {
    pub x: Rational,
    pub y: Rational,
}

impl Endomorphism {
    pub fn new(x: Rational, y: Rational) -> Self {
        Endomorphism { x, y }
    }

    pub fn integer(e: i64) -> Self {
        Endomorphism::new(Rational::from_integer(e), Rational::zero())
    }

    pub fn pi() -> Self {
        Endomorphism::new(Rational::zero(), Rational::one())
    }

    /// Parses `[x_num, x_den, y_num, y_den]`.
    pub fn from_fractions(v: [i64; 4]) -> Result<Self> {
        if v[1] == 0 || v[3] == 0 {
            return Err(Error::Parse("zero denominator in endomorphism".into()));
        }
        Ok(Endomorphism::new(Rational::new(v[0], v[1]), Rational::new(v[2], v[3])))
    }

    pub fn to_fractions(&self) -> [i64; 4] {
        [*self.x.numer(), *self.x.denom(), *self.y.numer(), *self.y.denom()]
    }

    /// Least common denominator of both coordinates.
    pub fn denominator(&self) -> u64 {
        arith::lcm(self.x.denom().unsigned_abs(), self.y.denom().unsigned_abs())
    }

    /// Coordinates `a + b omega` in the endomorphism order; fails when the
    /// element is not integral there.
    pub fn to_order(&self, ring: &EndRing) -> Result<OrderElement> {
        let a = self.x + self.y * Rational::from_integer(ring.c0());
        let b = self.y * Rational::from_integer(ring.w() as i64);
        if a.is_integer() && b.is_integer() {
            Ok(OrderElement::new(a.to_integer(), b.to_integer()))
        } else {
            Err(Error::NotInRing(format!("{} + {} pi", self.x, self.y)))
        }
    }

    pub fn from_order(ring: &EndRing, e: OrderElement) -> Self {
        let y = Rational::new(e.y, ring.w() as i64);
        let x = Rational::from_integer(e.x) - y * Rational::from_integer(ring.c0());
        Endomorphism::new(x, y)
    }
}

/// Certifies the conductor of `End(E)` by testing, for each prime power
/// `s^j | v`, whether `pi` acts as a scalar on `E[s^j]`.
pub fn determine_end_ring(curve: &Curve) -> Result<EndRing> {
    let v = curve.v();
    let mut u = v;
    let mut certified = true;
    for (s, e) in arith::factor(v) {
        let mut j = 0;
        while j < e {
            match scalar_on_torsion(curve, s.pow(j + 1)) {
                Ok(Some(_)) => j += 1,
                Ok(None) => break,
                Err(Error::ScaleLimit { .. }) => {
                    certified = false;
                    break;
                }
                Err(other) => return Err(other),
            }
        }
        u /= s.pow(j);
    }
    Ok(EndRing {
        order: CMOrder::new(curve.d_k(), u)?,
        certified,
        v,
        trace: curve.trace(),
        q: curve.q(),
        p: curve.characteristic(),
    })
}

/// `Some(a)` when `pi` acts as multiplication by `a` on all of `E[n]`,
/// `None` when it provably does not. `n` must be prime to `p`.
pub fn scalar_on_torsion(curve: &Curve, n: u64) -> Result<Option<u64>> {
    let (t, q) = (curve.trace(), curve.q());
    let ni = n as i64;
    // pi = a + n beta forces t = 2a and q = a^2 modulo n.
    let candidates: Vec<u64> = (0..n)
        .filter(|&a| (t - 2 * a as i64).rem_euclid(ni) == 0 && (arith::mul_mod(a, a, n) + n - q % n).is_multiple_of(n))
        .collect();
    for a in candidates {
        // If pi = a on E[n] then E[n] is rational over F_{q^M}, M = ord(a mod n).
        let Some(m) = arith::multiplicative_order_mod(a, n) else { continue };
        let size = (q as u128).checked_pow(m as u32).unwrap_or(u128::MAX);
        if size > ENUMERATION_BUDGET as u128 {
            return Err(Error::scale(
                format!("E[{n}] certification"),
                size.min(u64::MAX as u128) as u64,
                ENUMERATION_BUDGET,
            ));
        }
        let m = m as u32;
        if !curve.order_over(m).is_multiple_of(n * n) {
            continue;
        }
        let ext = curve.over_extension(m)?;
        let g = &ext.group;
        let pts = g.torsion_points(n);
        if pts.len() as u64 != n * n {
            continue;
        }
        if pts.iter().all(|&r| g.frobenius(r) == g.scalar_mul(a as i64, r)) {
            return Ok(Some(a));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone)]
struct Division {
    big: Extension,
    emb: Embedding,
    /// Image in the big field of `R'` mapped to some `S` with `g S = R'`.
    lifts: HashMap<Point, Point>,
}

/// The action of `End(E)` on `E(F_{q^m})[n]`.
///
/// When `w` is prime to `n` the element `omega = (pi - c0)/w` acts through
/// `w^{-1} mod n`. Otherwise `w = g h` with every prime of `g` dividing `n`,
/// and `omega R = (pi - c0) S` for any `S` with `g S = h^{-1} R`; such `S`
/// are found once over a larger extension.
#[derive(Debug, Clone)]
pub struct PointAction {
    ring: EndRing,
    ext: Extension,
    n: u64,
    h_inv: u64,
    division: Option<Division>,
}

impl PointAction {
    pub fn new(curve: &Curve, ring: &EndRing, m: u32, n: u64) -> Result<Self> {
        ring.require_certified()?;
        if n == 0 {
            return Err(Error::InvalidConfiguration("torsion exponent must be >= 1".into()));
        }
        let ext = curve.over_extension(m)?;
        let w = ring.w();
        let mut g = 1;
        for r in arith::prime_divisors(w) {
            if n.is_multiple_of(r) {
                g *= r.pow(arith::valuation(w, r));
            }
        }
        let h = w / g;
        let h_inv = arith::inv_mod(h as i64, n).expect("h is prime to n");
        let division = if g > 1 { Some(Self::build_division(curve, &ext, m, n, g)?) } else { None };
        Ok(PointAction { ring: *ring, ext, n, h_inv, division })
    }

    fn build_division(curve: &Curve, ext: &Extension, m: u32, n: u64, g: u64) -> Result<Division> {
        let targets = ext.group.torsion_points(n);
        let need = targets.len() as u64 * g * g;
        let mut j = 1u32;
        loop {
            let big_m = m * j;
            j += 1;
            let size = (curve.q() as u128).checked_pow(big_m).unwrap_or(u128::MAX);
            if size > ENUMERATION_BUDGET as u128 {
                return Err(Error::scale(
                    format!("{g}-division points of E[{n}]"),
                    size.min(u64::MAX as u128) as u64,
                    ENUMERATION_BUDGET,
                ));
            }
            if !curve.order_over(big_m).is_multiple_of(need) {
                continue;
            }
            let big = curve.over_extension(big_m)?;
            let emb = ext.embedding_to(&big)?;
            let wanted: HashSet<Point> = targets.iter().map(|&r| ext.transport(&big, &emb, r)).collect();
            let mut lifts = HashMap::new();
            let mut hits = 0u64;
            for s in big.group.torsion_points(g * n) {
                let gs = big.group.scalar_mul(g as i64, s);
                if wanted.contains(&gs) {
                    hits += 1;
                    lifts.entry(gs).or_insert(s);
                }
            }
            if hits == need && lifts.len() == wanted.len() {
                return Ok(Division { big, emb, lifts });
            }
        }
    }

    pub fn extension(&self) -> &Extension {
        &self.ext
    }

    pub fn ring(&self) -> &EndRing {
        &self.ring
    }

    /// The exponent `n` this action was built for.
    pub fn exponent(&self) -> u64 {
        self.n
    }

    /// Degree of the auxiliary extension used for division points, if any.
    pub fn division_degree(&self) -> Option<u32> {
        self.division.as_ref().map(|d| d.big.degree())
    }

    /// `omega R` for `R` killed by `n`.
    pub fn omega(&self, r: Point) -> Point {
        let grp = &self.ext.group;
        let c0 = self.ring.c0();
        let r1 = grp.scalar_mul(self.h_inv as i64, r);
        match &self.division {
            None => grp.sub(grp.frobenius(r1), grp.scalar_mul(c0, r1)),
            Some(d) => {
                let big = &d.big.group;
                let key = self.ext.transport(&d.big, &d.emb, r1);
                let s = *d.lifts.get(&key).expect("point outside the prepared torsion subgroup");
                let img = big.sub(big.frobenius(s), big.scalar_mul(c0, s));
                self.ext.pull_back(&d.big, &d.emb, img).expect("omega image is defined over the smaller field")
            }
        }
    }

    /// `(a + b omega) R`.
    pub fn apply(&self, tau: OrderElement, r: Point) -> Point {
        let grp = &self.ext.group;
        let a = tau.x.rem_euclid(self.n as i64);
        let b = tau.y.rem_euclid(self.n as i64);
        let ar = grp.scalar_mul(a, r);
        if b == 0 {
            return ar;
        }
        grp.add(ar, grp.scalar_mul(b, self.omega(r)))
    }

    /// Applies a rational `x + y pi` by lifting coordinates modulo the point
    /// order; requires the denominator to be prime to that order.
    pub fn apply_lift(&self, tau: &Endomorphism, r: Point) -> Result<Point> {
        tau.to_order(&self.ring)?;
        let grp = &self.ext.group;
        let l = grp.order_dividing(r, self.n);
        let d = tau.denominator();
        if arith::gcd(d, l) != 1 {
            return Err(Error::DenominatorCollision { denominator: d, order: l });
        }
        let lift = |c: Rational| -> i64 {
            let inv = arith::inv_mod(*c.denom(), l).expect("denominator prime to order") as i128;
            ((*c.numer() as i128).rem_euclid(l as i128) * inv % l as i128) as i64
        };
        let (x, y) = (lift(tau.x), lift(tau.y));
        Ok(grp.add(grp.scalar_mul(x, r), grp.scalar_mul(y, grp.frobenius(r))))
    }

    /// `ann(P) = {alpha : alpha P = inf}` in Hermite normal form.
    pub fn annihilator(&self, p: Point) -> Result<AnnihilatorIdeal> {
        let grp = &self.ext.group;
        if !grp.contains(&p) {
            return Err(Error::DomainMismatch);
        }
        let l = grp.order_dividing(p, self.n);
        if !grp.scalar_mul(self.n as i64, p).is_infinity() {
            return Err(Error::InvalidConfiguration(format!("point is not killed by {}", self.n)));
        }
        let order = self.ring.order();
        if l == 1 {
            return Ok(AnnihilatorIdeal { ideal: order.unit_ideal(), point: p, order: 1 });
        }
        let mut multiples = HashMap::with_capacity(l as usize);
        let mut acc = grp.infinity();
        for k in 0..l {
            multiples.insert(acc, k as i64);
            acc = grp.add(acc, p);
        }
        let wp = self.omega(p);
        let mut gens = vec![OrderElement::integer(l as i64), OrderElement::new(0, l as i64)];
        let mut neg_bw = grp.infinity();
        for b in 1..l as i64 {
            neg_bw = grp.sub(neg_bw, wp);
            if let Some(&k) = multiples.get(&neg_bw) {
                gens.push(OrderElement::new(k, b));
                break;
            }
        }
        let lattice = order.ideal_from_generators(&gens)?;
        let (s, b, c) = lattice.triple();
        // The Z-span of the kernel must already be an ideal.
        let ideal = order.ideal(s, b, c)?;
        if ideal.least_integer() != l {
            return Err(Error::Inconsistent(format!("least integer of {ideal} differs from point order {l}")));
        }
        Ok(AnnihilatorIdeal { ideal, point: p, order: l })
    }

    /// Period `T` of `tau` modulo `ann(P)`, computed from residues and from
    /// the orbit of `P`; the two must agree.
    pub fn multiplicative_order(&self, tau: OrderElement, ann: &AnnihilatorIdeal) -> Result<u64> {
        let order = self.ring.order();
        let by_residue = order.multiplicative_order_mod(tau, &ann.ideal)?;
        let mut cur = self.apply(tau, ann.point);
        let mut by_points = 1u64;
        while cur != ann.point {
            cur = self.apply(tau, cur);
            by_points += 1;
            if by_points > ann.ideal.norm() {
                break;
            }
        }
        if by_residue != by_points {
            return Err(Error::Inconsistent(format!("period {by_residue} from residues, {by_points} from points")));
        }
        Ok(by_residue)
    }

    /// `E[a]` inside this extension: points killed by both HNF generators.
    pub fn ideal_torsion(&self, a: &IdealHNF) -> Vec<Point> {
        let grp = &self.ext.group;
        let [g0, g1] = a.basis();
        grp.torsion_points(a.least_integer())
            .into_iter()
            .filter(|&r| self.apply(g0, r).is_infinity() && self.apply(g1, r).is_infinity())
            .collect()
    }
}

/// `ann(P)` together with `P` and its order `l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnnihilatorIdeal {
    pub ideal: IdealHNF,
    pub point: Point,
    pub order: u64,
}

impl AnnihilatorIdeal {
    pub fn norm(&self) -> u64 {
        self.ideal.norm()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FiniteField;
    use std::sync::Arc;

    fn curve(p: u64, a: i64, b: i64) -> Curve {
        let f = Arc::new(FiniteField::prime(p).unwrap());
        Curve::short(f.clone(), f.from_int(a), f.from_int(b)).unwrap()
    }

    #[test]
    fn trivial_conductor() {
        let e = curve(5, 1, 1);
        let ring = determine_end_ring(&e).unwrap();
        assert!(ring.is_certified());
        assert_eq!(ring.conductor(), 1);
        assert_eq!(ring.discriminant(), -11);
        // pi satisfies X^2 - tX + q
        let o = ring.order();
        let pi = ring.pi();
        let lhs = o.mul(pi, pi).sub(pi.scale(e.trace())).add(OrderElement::integer(e.q() as i64));
        assert!(lhs.is_zero());
        assert_eq!(o.norm(pi), e.q());
    }

    /// Ordinary short curves over F_7 with full rational 2-torsion.
    fn full_two_torsion_curves() -> Vec<Curve> {
        let f = Arc::new(FiniteField::prime(7).unwrap());
        let mut out = Vec::new();
        for a in 0..7 {
            for b in 0..7 {
                if let Ok(e) = Curve::short(f.clone(), f.from_int(a), f.from_int(b)) {
                    if e.rational_torsion(2, 1).unwrap() == (2, 2) {
                        out.push(e);
                    }
                }
            }
        }
        out
    }

    #[test]
    fn full_two_torsion_descends_conductor() {
        let curves = full_two_torsion_curves();
        assert!(!curves.is_empty());
        for e in &curves {
            // oracle: #E in {4, 12} forces t = +-4, t^2 - 28 = -12 = 2^2 (-3)
            assert_eq!(e.trace().abs(), 4);
            assert_eq!((e.v(), e.d_k()), (2, -3));
            let ring = determine_end_ring(e).unwrap();
            assert!(ring.is_certified());
            assert_eq!(ring.conductor(), 1);
            assert_eq!(ring.w(), 2);
        }
    }

    #[test]
    fn inert_two_gives_maximal_period() {
        let e = &full_two_torsion_curves()[0];
        let ring = determine_end_ring(e).unwrap();
        let act = PointAction::new(e, &ring, 1, 2).unwrap();
        assert!(act.division_degree().is_some());
        let o = ring.order();
        let two = o.integer_ideal(2);
        let pts = act.extension().group.torsion_points(2);
        assert_eq!(pts.len(), 4);
        let mut best = 0;
        for &p in pts.iter().filter(|p| !p.is_infinity()) {
            let ann = act.annihilator(p).unwrap();
            assert_eq!(ann.ideal, two);
            for tau in o.unit_residues(&two) {
                best = best.max(act.multiplicative_order(tau, &ann).unwrap());
            }
        }
        assert_eq!(best, 3);
    }

    #[test]
    fn apply_routes_agree() {
        let e = curve(5, 1, 1);
        let ring = determine_end_ring(&e).unwrap();
        let act = PointAction::new(&e, &ring, 1, 9).unwrap();
        let g = &act.extension().group;
        let o = ring.order();
        for p in g.points() {
            assert_eq!(act.apply(OrderElement::ONE, p), p);
            assert_eq!(act.apply(ring.pi(), p), p);
            assert_eq!(act.apply_lift(&Endomorphism::pi(), p).unwrap(), p);
            assert_eq!(act.apply_lift(&Endomorphism::integer(4), p).unwrap(), g.scalar_mul(4, p));
            for x in -3..3 {
                for y in -3..3 {
                    let tau = OrderElement::new(x, y);
                    let endo = Endomorphism::from_order(&ring, tau);
                    assert_eq!(endo.to_order(&ring).unwrap(), tau);
                    assert_eq!(act.apply_lift(&endo, p).unwrap(), act.apply(tau, p));
                    let sigma = OrderElement::new(y + 1, x);
                    assert_eq!(act.apply(o.mul(tau, sigma), p), act.apply(tau, act.apply(sigma, p)));
                }
            }
        }
    }

    #[test]
    fn denominator_collision() {
        let e = &full_two_torsion_curves()[0];
        let ring = determine_end_ring(e).unwrap();
        let act = PointAction::new(e, &ring, 1, 2).unwrap();
        let p = act.extension().group.torsion_points(2)[1];
        let omega = Endomorphism::from_order(&ring, OrderElement::OMEGA);
        assert_eq!(omega.denominator(), 2);
        assert!(matches!(act.apply_lift(&omega, p), Err(Error::DenominatorCollision { .. })));
        let half_pi = Endomorphism::new(Rational::new(1, 3), Rational::new(1, 3));
        assert!(matches!(half_pi.to_order(&ring), Err(Error::NotInRing(_))));
    }

    #[test]
    fn frobenius_prime_has_norm_p() {
        for (p, a, b) in [(5u64, 1i64, 1i64), (7, 3, 2), (11, 1, 3)] {
            let e = curve(p, a, b);
            let ring = determine_end_ring(&e).unwrap();
            let big_p = ring.frobenius_prime();
            assert_eq!(big_p.norm(), p);
            assert!(big_p.contains_element(ring.pi()));
        }
    }
}
