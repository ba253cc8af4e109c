//! Additive character sums along generator orbits and over subgroups.

use std::collections::BTreeSet;

use num_complex::Complex;
use num_traits::{Float, FloatConst};

use crate::cm_order::OrderElement;
use crate::curve::Point;
use crate::endo::PointAction;
use crate::error::{Error, Result};
use crate::field::{FieldElement, FiniteField};
use crate::generator::{GeneratorState, Observable, Output};
use crate::numeric::ComplexSum;

/// `sum psi_j(s_n)` with poles contributing 0.
pub fn exp_sum<R: Float + FloatConst>(field: &FiniteField, outputs: &[Output], j: u64) -> Result<Complex<R>> {
    if j.is_multiple_of(field.characteristic()) {
        return Err(Error::TrivialCharacter(j));
    }
    let mut acc = ComplexSum::default();
    for o in outputs {
        if let Output::Value(v) = *o {
            acc.add(field.additive_character::<R>(v, j)?);
        }
    }
    Ok(acc.value())
}

/// `S = sum_{n=1}^{len} psi_j(f(tau^n P))`, starting from `P_1`.
pub fn exp_sum_state<R: Float + FloatConst>(
    state: &GeneratorState,
    f: &Observable,
    j: u64,
    len: usize,
) -> Result<Complex<R>> {
    if let Some(t) = state.period() {
        if len as u64 > t {
            return Err(Error::InvalidConfiguration(format!("sum length {len} exceeds the period {t}")));
        }
    }
    let mut s = state.clone();
    s.reset();
    let out = s.emit(f, len);
    exp_sum(state.field(), &out, j)
}

/// Which subgroup of `E(F_q)` a character sum runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubgroupSpec {
    Trivial,
    Full,
    /// `{alpha P : alpha in End(E)}`.
    Generated(Point),
}

/// Points of the subgroup, ordered by coordinates for a reproducible sum.
pub fn subgroup_points(action: &PointAction, spec: SubgroupSpec) -> Vec<Point> {
    let g = &action.extension().group;
    match spec {
        SubgroupSpec::Trivial => vec![g.infinity()],
        SubgroupSpec::Full => g.points().collect(),
        SubgroupSpec::Generated(p) => {
            let l = g.order_dividing(p, action.exponent());
            let wp = action.omega(p);
            let mut set = BTreeSet::new();
            let mut row = g.infinity();
            for _ in 0..l {
                let mut pt = row;
                for _ in 0..l {
                    set.insert(pt.coords());
                    pt = g.add(pt, p);
                }
                row = g.add(row, wp);
            }
            set.into_iter()
                .map(|c| match c {
                    None => g.infinity(),
                    Some((x, y)) => g.point(x, y).expect("closed under the group law"),
                })
                .collect()
        }
    }
}

/// `sum_{Q in H} psi_j(sum_i c_i f(tau_i Q))`; terms where some `tau_i Q`
/// is a pole contribute 0.
pub fn subgroup_char_sum<R: Float + FloatConst>(
    action: &PointAction,
    spec: SubgroupSpec,
    f: &Observable,
    j: u64,
    coeffs: &[FieldElement],
    taus: &[OrderElement],
) -> Result<Complex<R>> {
    validate_combination(action, coeffs, taus)?;
    let g = &action.extension().group;
    if g.degree() != 1 {
        return Err(Error::InvalidConfiguration("subgroup must lie in E(F_q)".into()));
    }
    let field = g.field();
    if j.is_multiple_of(field.characteristic()) {
        return Err(Error::TrivialCharacter(j));
    }
    let pts = subgroup_points(action, spec);
    let mut acc = ComplexSum::default();
    'points: for q in pts {
        let mut v = field.zero();
        for (c, tau) in coeffs.iter().zip(taus) {
            let img = action.apply(*tau, q);
            match f.eval(field, &img) {
                Some(fv) => v = field.add(v, field.mul(*c, fv)),
                None => continue 'points,
            }
        }
        acc.add(field.additive_character::<R>(v, j)?);
    }
    Ok(acc.value())
}

pub(crate) fn validate_combination(action: &PointAction, coeffs: &[FieldElement], taus: &[OrderElement]) -> Result<()> {
    let bad = |m: &str| Err(Error::InvalidConfiguration(m.to_string()));
    if coeffs.is_empty() || coeffs.len() != taus.len() {
        return bad("need one coefficient per endomorphism");
    }
    if coeffs.iter().all(|c| c.is_zero()) {
        return bad("coefficients are all zero");
    }
    let ring = action.ring();
    let order = ring.order();
    let u = order.integer_ideal(order.conductor());
    let units = units(order);
    for (i, &a) in taus.iter().enumerate() {
        if a.is_zero() {
            return bad("zero endomorphism");
        }
        if !order.element_coprime(a, &u) {
            return bad("endomorphism shares a factor with the conductor");
        }
        for &b in &taus[..i] {
            if units.iter().any(|&e| order.mul(e, b) == a) {
                return bad("endomorphisms are associated");
            }
            // a / b = pi^k needs n(a) = q^k n(b)
            let (na, nb) = (order.norm(a), order.norm(b));
            let (hi, lo, x, y) = if na >= nb { (na, nb, a, b) } else { (nb, na, b, a) };
            let mut k = 0u32;
            let mut m = lo;
            while m < hi {
                m = m.saturating_mul(ring.q());
                k += 1;
            }
            if m == hi && order.mul(order.pow(ring.pi(), k as u64), y) == x {
                return bad("ratio of endomorphisms is a power of pi");
            }
        }
    }
    Ok(())
}

/// Units of the order.
pub fn units(order: &crate::cm_order::CMOrder) -> Vec<OrderElement> {
    let mut out = Vec::new();
    for x in -2..=2 {
        for y in -2..=2 {
            let e = OrderElement::new(x, y);
            if order.norm(e) == 1 {
                out.push(e);
            }
        }
    }
    out
}
