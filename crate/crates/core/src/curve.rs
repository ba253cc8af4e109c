//! Weierstrass curves `y^2 + (a1 x + a3) y = x^3 + a2 x^2 + a4 x + a6` over
//! small fields, their groups of points over extensions, exhaustive point
//! counting and rational torsion.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith;
use crate::error::{Error, Result};
use crate::field::{Embedding, FieldElement, FiniteField};

/// Upper bound on `q^m` for anything that walks a whole field.
pub const ENUMERATION_BUDGET: u64 = 10_000_000;

/// Weierstrass coefficients in the order `a1, a2, a3, a4, a6`.
pub type Coefficients = [FieldElement; 5];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Point {
    domain: u64,
    xy: Option<(FieldElement, FieldElement)>,
}

impl Point {
    pub fn is_infinity(&self) -> bool {
        self.xy.is_none()
    }

    pub fn x(&self) -> Option<FieldElement> {
        self.xy.map(|(x, _)| x)
    }

    pub fn y(&self) -> Option<FieldElement> {
        self.xy.map(|(_, y)| y)
    }

    pub fn coords(&self) -> Option<(FieldElement, FieldElement)> {
        self.xy
    }

    /// Identifier of the curve-and-extension this point belongs to.
    pub fn domain(&self) -> u64 {
        self.domain
    }
}

/// The group `E(F_{q^m})` for one fixed extension degree `m`.
#[derive(Debug, Clone)]
pub struct CurveGroup {
    field: Arc<FiniteField>,
    a: Coefficients,
    base_q: u64,
    degree: u32,
    order: u64,
    domain: u64,
}

impl CurveGroup {
    fn new(field: Arc<FiniteField>, a: Coefficients, base_q: u64, degree: u32, order: u64) -> Self {
        let mut h = DefaultHasher::new();
        field.characteristic().hash(&mut h);
        field.modulus().hash(&mut h);
        a.hash(&mut h);
        degree.hash(&mut h);
        let domain = h.finish();
        CurveGroup { field, a, base_q, degree, order, domain }
    }

    pub fn field(&self) -> &Arc<FiniteField> {
        &self.field
    }

    pub fn coefficients(&self) -> &Coefficients {
        &self.a
    }

    /// Extension degree `m` over the curve's field of definition.
    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// Order `q` of the field of definition (the Frobenius exponent).
    pub fn base_order(&self) -> u64 {
        self.base_q
    }

    /// `#E(F_{q^m})`.
    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn domain(&self) -> u64 {
        self.domain
    }

    pub fn infinity(&self) -> Point {
        Point { domain: self.domain, xy: None }
    }

    pub fn is_on_curve(&self, x: FieldElement, y: FieldElement) -> bool {
        let f = &*self.field;
        let [a1, _, a3, _, _] = self.a;
        let lhs = f.mul(y, f.add(y, f.add(f.mul(a1, x), a3)));
        let rhs = self.rhs(x);
        lhs == rhs
    }

    pub fn point(&self, x: FieldElement, y: FieldElement) -> Result<Point> {
        if !self.is_on_curve(x, y) {
            return Err(Error::InvalidConfiguration(format!("({x}, {y}) is not on the curve")));
        }
        Ok(Point { domain: self.domain, xy: Some((x, y)) })
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.domain == self.domain && p.xy.is_none_or(|(x, y)| self.is_on_curve(x, y))
    }

    fn rhs(&self, x: FieldElement) -> FieldElement {
        let f = &*self.field;
        let [_, a2, _, a4, a6] = self.a;
        // ((x + a2) x + a4) x + a6
        f.add(f.mul(f.add(f.mul(f.add(x, a2), x), a4), x), a6)
    }

    fn check(&self, p: &Point) -> Result<()> {
        if p.domain != self.domain {
            Err(Error::DomainMismatch)
        } else {
            Ok(())
        }
    }

    pub fn neg(&self, p: Point) -> Point {
        assert_eq!(p.domain, self.domain, "point from another curve or extension");
        let f = &*self.field;
        match p.xy {
            None => p,
            Some((x, y)) => {
                Point { domain: self.domain, xy: Some((x, f.sub(f.neg(y), f.add(f.mul(self.a[0], x), self.a[2])))) }
            }
        }
    }

    pub fn try_add(&self, p: Point, q: Point) -> Result<Point> {
        self.check(&p)?;
        self.check(&q)?;
        Ok(self.add(p, q))
    }

    /// Chord-tangent addition. Panics if either point belongs to another group;
    /// use [`CurveGroup::try_add`] for a checked variant.
    pub fn add(&self, p: Point, q: Point) -> Point {
        assert!(p.domain == self.domain && q.domain == self.domain, "point from another curve or extension");
        let (x1, y1) = match p.xy {
            None => return q,
            Some(c) => c,
        };
        let (x2, y2) = match q.xy {
            None => return p,
            Some(c) => c,
        };
        let f = &*self.field;
        let [a1, a2, a3, a4, a6] = self.a;
        let (lambda, nu) = if x1 != x2 {
            let dx = f.inv(f.sub(x2, x1)).expect("x1 != x2");
            let lambda = f.mul(f.sub(y2, y1), dx);
            let nu = f.mul(f.sub(f.mul(y1, x2), f.mul(y2, x1)), dx);
            (lambda, nu)
        } else {
            // x1 == x2: either Q = -P or Q = P.
            let denom = f.add(f.add(f.mul_int(y1, 2), f.mul(a1, x1)), a3);
            if y1 != y2 || denom.is_zero() {
                return self.infinity();
            }
            let inv = f.inv(denom).expect("nonzero");
            let x1sq = f.square(x1);
            let num_l = f.sub(f.add(f.add(f.mul_int(x1sq, 3), f.mul_int(f.mul(a2, x1), 2)), a4), f.mul(a1, y1));
            let num_n = f.sub(f.add(f.add(f.neg(f.mul(x1sq, x1)), f.mul(a4, x1)), f.mul_int(a6, 2)), f.mul(a3, y1));
            (f.mul(num_l, inv), f.mul(num_n, inv))
        };
        let x3 = f.sub(f.sub(f.sub(f.add(f.square(lambda), f.mul(a1, lambda)), a2), x1), x2);
        let y3 = f.sub(f.neg(f.add(f.mul(f.add(lambda, a1), x3), nu)), a3);
        Point { domain: self.domain, xy: Some((x3, y3)) }
    }

    pub fn sub(&self, p: Point, q: Point) -> Point {
        self.add(p, self.neg(q))
    }

    /// `n P` by double-and-add; negative `n` multiplies `-P`.
    pub fn scalar_mul(&self, n: i64, p: Point) -> Point {
        let mut base = if n < 0 { self.neg(p) } else { p };
        let mut k = n.unsigned_abs();
        let mut acc = self.infinity();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(acc, base);
            }
            base = self.add(base, base);
            k >>= 1;
        }
        acc
    }

    pub fn try_scalar_mul(&self, n: i64, p: Point) -> Result<Point> {
        self.check(&p)?;
        Ok(self.scalar_mul(n, p))
    }

    /// The `q`-power Frobenius `(x, y) -> (x^q, y^q)`.
    pub fn frobenius(&self, p: Point) -> Point {
        assert_eq!(p.domain, self.domain, "point from another curve or extension");
        match p.xy {
            None => p,
            Some((x, y)) => Point {
                domain: self.domain,
                xy: Some((self.field.pow(x, self.base_q), self.field.pow(y, self.base_q))),
            },
        }
    }

    /// All `y` with `(x, y)` on the curve.
    pub fn lift_x(&self, x: FieldElement) -> Vec<Point> {
        let f = &*self.field;
        let h = f.add(f.mul(self.a[0], x), self.a[2]);
        let g = self.rhs(x);
        let ys: Vec<FieldElement> = if f.characteristic() == 2 {
            if h.is_zero() {
                vec![f.sqrt(g).expect("every element is a square in characteristic 2")]
            } else {
                let c = f.div(g, f.square(h)).expect("h != 0");
                match f.solve_artin_schreier(c) {
                    Some(z) => {
                        let y = f.mul(h, z);
                        vec![y, f.add(y, h)]
                    }
                    None => vec![],
                }
            }
        } else {
            let d = f.add(f.square(h), f.mul_int(g, 4));
            match f.sqrt(d) {
                None => vec![],
                Some(r) => {
                    let half = f.inv(f.from_int(2)).expect("odd characteristic");
                    let y0 = f.mul(f.sub(r, h), half);
                    if r.is_zero() {
                        vec![y0]
                    } else {
                        vec![y0, f.mul(f.sub(f.neg(r), h), half)]
                    }
                }
            }
        };
        ys.into_iter().map(|y| Point { domain: self.domain, xy: Some((x, y)) }).collect()
    }

    /// Number of affine points with abscissa `x` (0, 1 or 2).
    fn points_above(&self, x: FieldElement) -> u64 {
        let f = &*self.field;
        let h = f.add(f.mul(self.a[0], x), self.a[2]);
        let g = self.rhs(x);
        if f.characteristic() == 2 {
            if h.is_zero() {
                1
            } else {
                let c = f.div(g, f.square(h)).expect("h != 0");
                if f.abs_trace(c) == 0 {
                    2
                } else {
                    0
                }
            }
        } else {
            let d = f.add(f.square(h), f.mul_int(g, 4));
            if d.is_zero() {
                1
            } else if f.is_square(d) {
                2
            } else {
                0
            }
        }
    }

    /// Exact `#E(F_{q^m})` by walking every abscissa.
    pub fn count_points(&self) -> Result<u64> {
        let size = self.field.order();
        if size > ENUMERATION_BUDGET {
            return Err(Error::scale("point count", size, ENUMERATION_BUDGET));
        }
        Ok(1 + self.field.elements().map(|x| self.points_above(x)).sum::<u64>())
    }

    /// Every point, infinity first, then by abscissa.
    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        std::iter::once(self.infinity()).chain(self.field.elements().flat_map(move |x| self.lift_x(x)))
    }

    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        loop {
            let x = self.field.element(rng.gen_range(0..self.field.order()));
            let ys = self.lift_x(x);
            if !ys.is_empty() {
                return ys[rng.gen_range(0..ys.len())];
            }
        }
    }

    /// Least `l >= 1` with `l P = inf`, by peeling prime factors off the
    /// group order.
    pub fn point_order(&self, p: Point) -> u64 {
        self.order_dividing(p, self.order)
    }

    /// Order of a point known to be killed by `n`.
    pub fn order_dividing(&self, p: Point, n: u64) -> u64 {
        let mut ord = n;
        for (r, _) in arith::factor(n) {
            while ord.is_multiple_of(r) && self.scalar_mul((ord / r) as i64, p).is_infinity() {
                ord /= r;
            }
        }
        ord
    }

    /// Closure of the subgroup generated by `gens`, stopping early once
    /// `target` elements are reached.
    pub fn subgroup_closure(&self, gens: impl IntoIterator<Item = Point>, target: u64) -> Vec<Point> {
        let inf = self.infinity();
        let mut elems = vec![inf];
        let mut seen: HashSet<Point> = HashSet::from([inf]);
        for g in gens {
            if elems.len() as u64 >= target {
                break;
            }
            if seen.contains(&g) {
                continue;
            }
            let base_len = elems.len();
            let mut c = g;
            while !seen.contains(&c) {
                for i in 0..base_len {
                    let e = self.add(elems[i], c);
                    elems.push(e);
                    seen.insert(e);
                }
                c = self.add(c, g);
            }
        }
        elems
    }

    /// All points of `E(F_{q^m})` killed by `n`.
    pub fn torsion_points(&self, n: u64) -> Vec<Point> {
        assert!(n >= 1);
        let primes = arith::prime_divisors(n);
        let mut primary = 1u64;
        for (r, e) in arith::factor(self.order) {
            if primes.contains(&r) {
                primary *= r.pow(e);
            }
        }
        if primary == 1 {
            return vec![self.infinity()];
        }
        let cofactor = (self.order / primary) as i64;
        // Images of uniform-ish random points under the cofactor map generate
        // the primary part; the closure stops once its known order is reached.
        let mut rng = ChaCha8Rng::seed_from_u64(self.domain);
        let gens = std::iter::repeat_with(move || self.random_point(&mut rng)).map(|r| self.scalar_mul(cofactor, r));
        self.subgroup_closure(gens, primary)
            .into_iter()
            .filter(|&r| self.scalar_mul(n as i64, r).is_infinity())
            .collect()
    }

    /// Structure `(d1, d2)`, `d1 | d2`, of the rational `n`-torsion: `d2` is
    /// the largest point order and `d1 d2` the cardinality.
    pub fn torsion_structure(&self, n: u64) -> (u64, u64) {
        let pts = self.torsion_points(n);
        let d2 = pts.iter().map(|&r| self.order_dividing(r, n)).max().unwrap_or(1);
        (pts.len() as u64 / d2, d2)
    }
}

/// An ordinary elliptic curve over `F_q` with its Frobenius data cached.
#[derive(Debug, Clone)]
pub struct Curve {
    group: CurveGroup,
    trace: i64,
    v: u64,
    d_k: i64,
}

/// A base change `E / F_{q^m}` together with the field embedding used.
#[derive(Debug, Clone)]
pub struct Extension {
    pub group: CurveGroup,
    base: Arc<FiniteField>,
    base_domain: u64,
    embedding: Embedding,
}

impl Extension {
    pub fn embed_element(&self, a: FieldElement) -> FieldElement {
        self.embedding.apply(&self.base, self.group.field(), a)
    }

    pub fn embed_point(&self, p: Point) -> Point {
        assert_eq!(p.domain, self.base_domain, "point is not on the base curve");
        Point { domain: self.group.domain, xy: p.xy.map(|(x, y)| (self.embed_element(x), self.embed_element(y))) }
    }

    pub fn degree(&self) -> u32 {
        self.group.degree
    }

    /// Embedding of this extension's field into a larger one of the same
    /// tower, agreeing with both embeddings of the base field.
    pub fn embedding_to(&self, other: &Extension) -> Result<Embedding> {
        let (small, big) = (self.group.field(), other.group.field());
        let x = self.base.gen_x();
        let (xs, xb) = (self.embed_element(x), other.embed_element(x));
        small
            .embeddings_into(big)?
            .into_iter()
            .find(|e| e.apply(small, big, xs) == xb)
            .ok_or_else(|| Error::InvalidField("no compatible embedding between extensions".into()))
    }

    /// Moves a point of this extension into `other` along `emb`.
    pub fn transport(&self, other: &Extension, emb: &Embedding, p: Point) -> Point {
        assert_eq!(p.domain, self.group.domain, "point is not on this extension");
        let (small, big) = (self.group.field(), other.group.field());
        Point {
            domain: other.group.domain,
            xy: p.xy.map(|(x, y)| (emb.apply(small, big, x), emb.apply(small, big, y))),
        }
    }

    /// Inverse of [`Extension::transport`] on points defined over this field.
    pub fn pull_back(&self, other: &Extension, emb: &Embedding, p: Point) -> Option<Point> {
        assert_eq!(p.domain, other.group.domain, "point is not on the larger extension");
        let xy = match p.xy {
            None => None,
            Some((x, y)) => Some((emb.preimage(x)?, emb.preimage(y)?)),
        };
        Some(Point { domain: self.group.domain, xy })
    }

    /// The base-curve point a rational point came from; `None` when some
    /// coordinate lies outside `F_q`.
    pub fn descend_point(&self, p: Point) -> Option<Point> {
        assert_eq!(p.domain, self.group.domain, "point is not on this extension");
        let xy = match p.xy {
            None => None,
            Some((x, y)) => Some((self.embedding.preimage(x)?, self.embedding.preimage(y)?)),
        };
        Some(Point { domain: self.base_domain, xy })
    }
}

impl Curve {
    /// Validates nonsingularity, counts points and rejects supersingular
    /// curves.
    pub fn new(field: Arc<FiniteField>, a: Coefficients) -> Result<Self> {
        if discriminant(&field, &a).is_zero() {
            return Err(Error::Singular);
        }
        let q = field.order();
        if q > ENUMERATION_BUDGET {
            return Err(Error::scale("point count", q, ENUMERATION_BUDGET));
        }
        let mut group = CurveGroup::new(field, a, q, 1, 0);
        let n = group.count_points()?;
        group.order = n;
        let trace = q as i64 + 1 - n as i64;
        let p = group.field.characteristic() as i64;
        if trace % p == 0 {
            return Err(Error::Supersingular { trace });
        }
        let (v, d_k) = frobenius_discriminant_split(trace, q);
        Ok(Curve { group, trace, v, d_k })
    }

    /// Short Weierstrass `y^2 = x^3 + a x + b`.
    pub fn short(field: Arc<FiniteField>, a: FieldElement, b: FieldElement) -> Result<Self> {
        let z = field.zero();
        Self::new(field, [z, z, z, a, b])
    }

    pub fn field(&self) -> &Arc<FiniteField> {
        &self.group.field
    }

    pub fn coefficients(&self) -> &Coefficients {
        &self.group.a
    }

    /// The rational group `E(F_q)`.
    pub fn group(&self) -> &CurveGroup {
        &self.group
    }

    pub fn q(&self) -> u64 {
        self.group.base_q
    }

    pub fn characteristic(&self) -> u64 {
        self.group.field.characteristic()
    }

    pub fn n_points(&self) -> u64 {
        self.group.order
    }

    /// Frobenius trace `t = q + 1 - #E(F_q)`.
    pub fn trace(&self) -> i64 {
        self.trace
    }

    /// Always true; supersingular curves are rejected at construction.
    pub fn is_ordinary(&self) -> bool {
        true
    }

    /// `v` in `t^2 - 4q = v^2 D_K`.
    pub fn v(&self) -> u64 {
        self.v
    }

    /// Fundamental discriminant `D_K` in `t^2 - 4q = v^2 D_K`.
    pub fn d_k(&self) -> i64 {
        self.d_k
    }

    /// `#E(F_{q^m}) = q^m + 1 - (alpha^m + conj(alpha)^m)`, with the power
    /// sums taken from the recurrence `s_m = t s_{m-1} - q s_{m-2}`.
    pub fn order_over(&self, m: u32) -> u64 {
        let (t, q) = (self.trace as i128, self.q() as i128);
        let (mut s_prev, mut s) = (2i128, t);
        for _ in 1..m {
            (s_prev, s) = (s, t * s - q * s_prev);
        }
        let qm = q.pow(m);
        (qm + 1 - s) as u64
    }

    /// Base change to `F_{q^m}`, built as `F_p^{km}` with its default modulus.
    pub fn over_extension(&self, m: u32) -> Result<Extension> {
        if m == 0 {
            return Err(Error::InvalidConfiguration("extension degree must be >= 1".into()));
        }
        let base = self.group.field.clone();
        let size = (self.q() as u128).pow(m);
        if size > ENUMERATION_BUDGET as u128 {
            return Err(Error::scale(format!("F_q^{m}"), size.min(u64::MAX as u128) as u64, ENUMERATION_BUDGET));
        }
        let field = if m == 1 {
            base.clone()
        } else {
            Arc::new(FiniteField::new(base.characteristic(), base.degree() * m as usize, None)?)
        };
        let embedding = base.embedding_into(&field)?;
        let a = self.group.a.map(|c| embedding.apply(&base, &field, c));
        let group =
            if m == 1 { self.group.clone() } else { CurveGroup::new(field, a, self.q(), m, self.order_over(m)) };
        Ok(Extension { group, base, base_domain: self.group.domain, embedding })
    }

    /// Exhaustive `#E(F_{q^m})`.
    pub fn count_points(&self, m: u32) -> Result<u64> {
        if m == 1 {
            return self.group.count_points();
        }
        self.over_extension(m)?.group.count_points()
    }

    /// Structure `(d1, d2)` of `E(F_{q^m})[a]`.
    pub fn rational_torsion(&self, a: u64, m: u32) -> Result<(u64, u64)> {
        if a == 0 {
            return Err(Error::InvalidConfiguration("torsion index must be >= 1".into()));
        }
        if a == 1 {
            return Ok((1, 1));
        }
        Ok(self.over_extension(m)?.group.torsion_structure(a))
    }

    /// Expected `#E[n]` over the algebraic closure for an ordinary curve:
    /// `n^2 / p^nu` where `p^nu || n`.
    pub fn full_torsion_size(&self, n: u64) -> u64 {
        let p = self.characteristic();
        let nu = arith::valuation(n, p);
        n * n / p.pow(nu)
    }

    /// Smallest `m` (within the enumeration budget) with all of `E[n]`
    /// rational over `F_{q^m}`.
    pub fn full_torsion_degree(&self, n: u64) -> Result<u32> {
        let want = self.full_torsion_size(n);
        let mut m = 1u32;
        loop {
            let size = (self.q() as u128).pow(m);
            if size > ENUMERATION_BUDGET as u128 {
                return Err(Error::scale(
                    format!("full {n}-torsion"),
                    size.min(u64::MAX as u128) as u64,
                    ENUMERATION_BUDGET,
                ));
            }
            if self.order_over(m).is_multiple_of(want) {
                let ext = self.over_extension(m)?;
                if ext.group.torsion_points(n).len() as u64 == want {
                    return Ok(m);
                }
            }
            m += 1;
        }
    }
}

impl fmt::Display for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = self.coefficients().map(|c| c.index());
        write!(f, "E[{},{},{},{},{}]/F_{}", a[0], a[1], a[2], a[3], a[4], self.q())
    }
}

/// Every ordinary curve over `field`, coefficients `(a1, a2, a3, a4, a6)`
/// in lexicographic order of their packed indices.
pub fn all_curves(field: &Arc<FiniteField>) -> impl Iterator<Item = Curve> + '_ {
    let q = field.order();
    (0..q.pow(5)).filter_map(move |mut idx| {
        let mut a = [FieldElement::ZERO; 5];
        for slot in a.iter_mut().rev() {
            *slot = field.element(idx % q);
            idx /= q;
        }
        Curve::new(field.clone(), a).ok()
    })
}

/// Discriminant of the general Weierstrass equation.
pub fn discriminant(f: &FiniteField, a: &Coefficients) -> FieldElement {
    let [a1, a2, a3, a4, a6] = *a;
    let b2 = f.add(f.square(a1), f.mul_int(a2, 4));
    let b4 = f.add(f.mul_int(a4, 2), f.mul(a1, a3));
    let b6 = f.add(f.square(a3), f.mul_int(a6, 4));
    let b8 = f.sub(
        f.add(
            f.sub(f.add(f.mul(f.square(a1), a6), f.mul_int(f.mul(a2, a6), 4)), f.mul(f.mul(a1, a3), a4)),
            f.mul(a2, f.square(a3)),
        ),
        f.square(a4),
    );
    let t1 = f.neg(f.mul(f.square(b2), b8));
    let t2 = f.mul_int(f.mul(f.square(b4), b4), 8);
    let t3 = f.mul_int(f.square(b6), 27);
    let t4 = f.mul_int(f.mul(f.mul(b2, b4), b6), 9);
    f.add(f.sub(f.sub(t1, t2), t3), t4)
}

/// Splits `t^2 - 4q = v^2 D_K` with `D_K` fundamental.
pub fn frobenius_discriminant_split(trace: i64, q: u64) -> (u64, i64) {
    let disc = trace as i128 * trace as i128 - 4 * q as i128;
    assert!(disc < 0, "ordinary Frobenius discriminant is negative");
    let (f, m) = arith::square_part((-disc) as u64);
    let d0 = -(m as i64);
    if d0.rem_euclid(4) == 1 {
        (f, d0)
    } else {
        (f / 2, 4 * d0)
    }
}
