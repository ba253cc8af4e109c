//! Verifiers that reduce the structural lemmas on torsion, annihilators and
//! lattice counts to exact identities checkable by enumeration.
//!
//! A verifier returns `Err` when an instance violates a precondition or the
//! budget, and a report with a non-empty `failures` list when an identity
//! does not hold.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::arith;
use crate::cm_order::{sieve_coprime_count, CMOrder, IdealHNF, OrderElement};
use crate::curve::{all_curves, Curve, Point, ENUMERATION_BUDGET};
use crate::endo::{determine_end_ring, EndRing, PointAction};
use crate::error::{Error, Result};
use crate::field::FiniteField;
use crate::generator::Observable;

use super::sums::validate_combination;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LemmaId {
    L2,
    L3,
    L4,
    L5,
    L6,
    L7,
    L8,
    L9,
}

impl LemmaId {
    pub const ALL: [LemmaId; 8] =
        [LemmaId::L2, LemmaId::L3, LemmaId::L4, LemmaId::L5, LemmaId::L6, LemmaId::L7, LemmaId::L8, LemmaId::L9];
}

impl fmt::Display for LemmaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for LemmaId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LemmaId::ALL
            .into_iter()
            .find(|id| id.to_string().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::Parse(format!("unknown lemma id {s:?}")))
    }
}

/// Ideals are carried as raw HNF triples so malformed input reaches the
/// verifier and is reported as a failure.
#[derive(Debug, Clone)]
pub enum LemmaInstance {
    /// `E[a]` for `a` prime to the conductor and to the Frobenius prime.
    Torsion { curve: Curve, ideal: (u64, u64, u64) },
    /// Preimages under `tau` of points of `E[n0]`, at most `samples` of them.
    Preimage { curve: Curve, tau: OrderElement, n0: u64, samples: usize },
    /// `F = sum c_i f(tau_i Q)` on `E(F_q)`.
    Degree { curve: Curve, f: Observable, coeffs: Vec<i64>, taus: Vec<OrderElement> },
    /// Integers up to `j` prime to `l`.
    Sieve { l: u64, j: u64 },
    /// Elements of `a` with norm at most `j`, in the order of discriminant
    /// `u^2 d_k`.
    Lattice { d_k: i64, u: u64, ideal: (u64, u64, u64), j: u64 },
    /// `M_rho(J)` for every invertible residue `rho` modulo `a`.
    Representation { d_k: i64, u: u64, tau: OrderElement, ideal: (u64, u64, u64), j: u64 },
}

fn triple_str((s, b, c): (u64, u64, u64)) -> String {
    format!("[{s},{b},{c}]")
}

impl fmt::Display for LemmaInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LemmaInstance::Torsion { curve, ideal } => write!(f, "{curve} a={}", triple_str(*ideal)),
            LemmaInstance::Preimage { curve, tau, n0, samples } => {
                write!(f, "{curve} tau={tau} n0={n0} samples={samples}")
            }
            LemmaInstance::Degree { curve, f: obs, coeffs, taus } => {
                let t: Vec<String> = taus.iter().map(|t| t.to_string()).collect();
                write!(f, "{curve} f={obs} c={coeffs:?} tau=[{}]", t.join(","))
            }
            LemmaInstance::Sieve { l, j } => write!(f, "l={l} J={j}"),
            LemmaInstance::Lattice { d_k, u, ideal, j } => {
                write!(f, "D_K={d_k} u={u} a={} J={j}", triple_str(*ideal))
            }
            LemmaInstance::Representation { d_k, u, tau, ideal, j } => {
                write!(f, "D_K={d_k} u={u} tau={tau} a={} J={j}", triple_str(*ideal))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub lemma: LemmaId,
    pub instance: String,
    /// Number of exact identities evaluated.
    pub checks: u64,
    pub failures: Vec<String>,
    /// Measured count over its main term, where the lemma has one.
    pub ratio: Option<f64>,
}

impl LemmaReport {
    fn new(lemma: LemmaId, instance: &LemmaInstance) -> Self {
        LemmaReport { lemma, instance: instance.to_string(), checks: 0, failures: Vec::new(), ratio: None }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn verify_lemma(id: LemmaId, instance: &LemmaInstance) -> Result<LemmaReport> {
    let mut report = LemmaReport::new(id, instance);
    match (id, instance) {
        (LemmaId::L2 | LemmaId::L3, LemmaInstance::Torsion { curve, ideal }) => {
            let ring = determine_end_ring(curve)?;
            let Some(a) = checked_ideal(ring.order(), *ideal, &mut report) else {
                return Ok(report);
            };
            let action = torsion_action(curve, &ring, &a)?;
            let pts = action.ideal_torsion(&a);
            if id == LemmaId::L2 {
                verify_torsion_size(&action, &a, &pts, &mut report);
            } else {
                verify_annihilator_exists(&action, &a, &pts, &mut report)?;
            }
        }
        (LemmaId::L4, LemmaInstance::Preimage { curve, tau, n0, samples }) => {
            verify_preimages(curve, *tau, *n0, *samples, &mut report)?;
        }
        (LemmaId::L5, LemmaInstance::Degree { curve, f, coeffs, taus }) => {
            verify_degree(curve, f, coeffs, taus, &mut report)?;
        }
        (LemmaId::L6, LemmaInstance::Sieve { l, j }) => verify_sieve(*l, *j, &mut report)?,
        (LemmaId::L7 | LemmaId::L8, LemmaInstance::Lattice { d_k, u, ideal, j }) => {
            let order = CMOrder::new(*d_k, *u)?;
            let Some(a) = checked_ideal(&order, *ideal, &mut report) else {
                return Ok(report);
            };
            if id == LemmaId::L7 {
                verify_lattice(&order, &a, *j, &mut report);
            } else {
                verify_coprime_count(&order, &a, *j, &mut report)?;
            }
        }
        (LemmaId::L9, LemmaInstance::Representation { d_k, u, tau, ideal, j }) => {
            let order = CMOrder::new(*d_k, *u)?;
            let Some(a) = checked_ideal(&order, *ideal, &mut report) else {
                return Ok(report);
            };
            verify_representations(&order, *tau, &a, *j, &mut report)?;
        }
        _ => {
            return Err(Error::InvalidConfiguration(format!("instance kind does not match {id}")));
        }
    }
    Ok(report)
}

fn checked_ideal(order: &CMOrder, (s, b, c): (u64, u64, u64), report: &mut LemmaReport) -> Option<IdealHNF> {
    match order.ideal(s, b, c) {
        Ok(a) => {
            report.checks += 1;
            Some(a)
        }
        Err(e) => {
            report.check(false, || format!("malformed ideal [{s},{b},{c}]: {e}"));
            None
        }
    }
}

/// `a` must be prime to `u` and to the Frobenius prime.
pub fn admissible(ring: &EndRing, a: &IdealHNF) -> bool {
    let order = ring.order();
    order.is_coprime_to_conductor(a) && order.is_coprime(a, &ring.frobenius_prime())
}

/// Smallest `m` with `E[a]` rational over `F_{q^m}`: the order of `pi`
/// modulo `a`, since `pi^m - 1` in `a` kills `E[a]`.
pub fn torsion_degree(ring: &EndRing, a: &IdealHNF) -> Result<u32> {
    if !admissible(ring, a) {
        return Err(Error::InvalidConfiguration(format!("{a} is not prime to the conductor and Frobenius prime")));
    }
    let m = ring.order().multiplicative_order_mod(ring.pi(), a)?;
    Ok(m as u32)
}

fn check_budget(q: u64, m: u32, what: String) -> Result<()> {
    let size = (q as u128).checked_pow(m).unwrap_or(u128::MAX);
    if size > ENUMERATION_BUDGET as u128 {
        return Err(Error::scale(what, size.min(u64::MAX as u128) as u64, ENUMERATION_BUDGET));
    }
    Ok(())
}

/// The action on `E(F_{q^m})[s]`, `m` the torsion degree of `a` and `s` its
/// least positive integer.
pub fn torsion_action(curve: &Curve, ring: &EndRing, a: &IdealHNF) -> Result<PointAction> {
    let m = torsion_degree(ring, a)?;
    check_budget(curve.q(), m, format!("E[{a}] over degree {m}"))?;
    PointAction::new(curve, ring, m, a.least_integer())
}

fn verify_torsion_size(action: &PointAction, a: &IdealHNF, pts: &[Point], report: &mut LemmaReport) {
    report.check(pts.len() as u64 == a.norm(), || format!("#E[a] = {} but n(a) = {}", pts.len(), a.norm()));
    // O/a has exponent s = least integer, and so must E[a].
    let g = &action.extension().group;
    let exponent = pts.iter().map(|&r| g.order_dividing(r, a.least_integer())).fold(1, arith::lcm);
    report.check(exponent == a.least_integer(), || {
        format!("exponent of E[a] is {exponent}, expected {}", a.least_integer())
    });
}

fn verify_annihilator_exists(
    action: &PointAction,
    a: &IdealHNF,
    pts: &[Point],
    report: &mut LemmaReport,
) -> Result<()> {
    let mut found = false;
    for &r in pts {
        if action.annihilator(r)?.ideal == *a {
            found = true;
            break;
        }
    }
    report.check(found, || format!("no point of E[a] has annihilator {a}"));
    Ok(())
}

fn verify_preimages(curve: &Curve, tau: OrderElement, n0: u64, samples: usize, report: &mut LemmaReport) -> Result<()> {
    let ring = determine_end_ring(curve)?;
    ring.require_certified()?;
    let order = ring.order();
    let conductor = order.integer_ideal(order.conductor());
    if tau.is_zero() || !order.element_coprime(tau, &conductor) || !order.element_coprime(tau, &ring.frobenius_prime())
    {
        return Err(Error::InvalidConfiguration(format!("{tau} must be prime to u and the Frobenius prime")));
    }
    let kernel = order.norm(tau);
    let n = n0 * kernel;
    if n0 == 0 || n.is_multiple_of(curve.characteristic()) {
        return Err(Error::InvalidConfiguration(format!("n0 n(tau) = {n} must be prime to p")));
    }
    let m = order.multiplicative_order_mod(ring.pi(), &order.integer_ideal(n))? as u32;
    check_budget(curve.q(), m, format!("E[{n}] over degree {m}"))?;
    let action = PointAction::new(curve, &ring, m, n)?;
    let g = &action.extension().group;
    let full = g.torsion_points(n);
    report.check(full.len() as u64 == n * n, || format!("#E[{n}] = {}", full.len()));
    let mut fibres: HashMap<Point, Vec<Point>> = HashMap::new();
    for &s in &full {
        fibres.entry(action.apply(tau, s)).or_default().push(s);
    }
    let mut targets: Vec<Point> = full.iter().copied().filter(|&r| g.scalar_mul(n0 as i64, r).is_infinity()).collect();
    targets.sort_by_key(|r| r.coords());
    let stride = (targets.len() / samples.max(1)).max(1);
    let principal = order.principal(tau)?;
    for &target in targets.iter().step_by(stride).take(samples) {
        let pre = fibres.get(&target).map(Vec::as_slice).unwrap_or(&[]);
        report.check(pre.len() as u64 == kernel, || {
            format!("{} preimages of {:?}, expected n(tau) = {kernel}", pre.len(), target.coords())
        });
        let want = order.product(&principal, &action.annihilator(target)?.ideal);
        let mut hit = false;
        for &s in pre {
            if action.annihilator(s)?.ideal == want {
                hit = true;
                break;
            }
        }
        report.check(hit, || format!("no preimage of {:?} has annihilator {want}", target.coords()));
    }
    Ok(())
}

fn verify_degree(
    curve: &Curve,
    f: &Observable,
    coeffs: &[i64],
    taus: &[OrderElement],
    report: &mut LemmaReport,
) -> Result<()> {
    let ring = determine_end_ring(curve)?;
    let action = PointAction::new(curve, &ring, 1, curve.n_points())?;
    let field = curve.field();
    let cs: Vec<_> = coeffs.iter().map(|&c| field.from_int(c)).collect();
    validate_combination(&action, &cs, taus)?;
    let order = ring.order();
    let j = taus.iter().map(|&t| order.norm(t)).max().unwrap_or(0);
    let bound = taus.len() as u64 * f.pole_degree() as u64 * j;
    let mut poles = 0u64;
    let mut levels: HashMap<_, u64> = HashMap::new();
    'points: for q in curve.group().points() {
        let mut v = field.zero();
        for (c, tau) in cs.iter().zip(taus) {
            match f.eval(field, &action.apply(*tau, q)) {
                Some(fv) => v = field.add(v, field.mul(*c, fv)),
                None => {
                    poles += 1;
                    continue 'points;
                }
            }
        }
        *levels.entry(v).or_default() += 1;
    }
    report.check(poles <= bound, || format!("{poles} rational poles exceed s deg f J = {bound}"));
    // A nonconstant F takes each value at most deg F times.
    let (level, most) = levels.iter().max_by_key(|(v, n)| (**n, **v)).map(|(v, n)| (*v, *n)).unwrap_or_default();
    report.check(most <= bound, || format!("F = {level} at {most} rational points, more than {bound}"));
    Ok(())
}

fn verify_sieve(l: u64, j: u64, report: &mut LemmaReport) -> Result<()> {
    if l == 0 || j == 0 {
        return Err(Error::InvalidConfiguration("l and J must be positive".into()));
    }
    let sieved = sieve_coprime_count(j, l);
    let direct = (1..=j).filter(|&n| arith::gcd(n, l) == 1).count() as u64;
    report.check(sieved == direct, || format!("sieve gives {sieved}, direct count {direct}"));
    let phi = arith::euler_phi(l);
    report.ratio = Some(sieved as f64 * l as f64 / (j as f64 * phi as f64));
    if j * j >= l {
        // calibration c = 1/2 of the implied constant
        report.check(2 * sieved as u128 * l as u128 >= j as u128 * phi as u128, || format!("{sieved} < J phi(l) / 2l"));
    }
    Ok(())
}

/// Independent count of `#{alpha in a : 0 < n(alpha) <= j}` over a bounding
/// box in the `(1, omega)` basis.
fn brute_ball_count(order: &CMOrder, a: &IdealHNF, j: u64) -> u64 {
    let absd = order.discriminant().unsigned_abs();
    let ymax = arith::isqrt(4 * j / absd) as i64 + 1;
    let root = arith::isqrt(j) as i64 + 1;
    let d = order.discriminant();
    let mut n = 0;
    for y in -ymax..=ymax {
        // |2x + D y| <= 2 sqrt(J)
        let centre = (-d * y).div_euclid(2);
        for x in centre - root - 1..=centre + root + 1 {
            let e = OrderElement::new(x, y);
            if !e.is_zero() && order.norm(e) <= j && a.contains_element(e) {
                n += 1;
            }
        }
    }
    n
}

fn verify_lattice(order: &CMOrder, a: &IdealHNF, j: u64, report: &mut LemmaReport) {
    let rows = order.count_norm_ball(a, j);
    let brute = brute_ball_count(order, a, j);
    report.check(rows == brute, || format!("row count {rows}, box count {brute}"));
    let listed = order.ball_points(a, j).len() as u64;
    report.check(listed == rows, || format!("{listed} listed points, {rows} counted"));
    let main = order.lattice_main_term(a, j as f64);
    report.ratio = Some(rows as f64 / order.unit_count() as f64 / main);
}

fn verify_coprime_count(order: &CMOrder, a: &IdealHNF, j: u64, report: &mut LemmaReport) -> Result<()> {
    let direct = order.count_coprime_norm_ball(a, j)?;
    let mobius = order.count_coprime_by_mobius(a, j)?;
    report.check(direct as i64 == mobius, || format!("enumeration {direct}, inclusion-exclusion {mobius}"));
    let phi = order.phi(a)?;
    let whole = order.unit_ideal();
    let main = order.lattice_main_term(&whole, j as f64) * order.unit_count() as f64;
    report.ratio = Some(direct as f64 / (main * phi as f64 / a.norm() as f64));
    Ok(())
}

fn verify_representations(
    order: &CMOrder,
    tau: OrderElement,
    a: &IdealHNF,
    j: u64,
    report: &mut LemmaReport,
) -> Result<()> {
    let coprime = order.count_coprime_norm_ball(a, j)?;
    let mut total = 0u64;
    let mut best = 0u64;
    let mut period = 0u64;
    for rho in order.unit_residues(a) {
        let (m, t) = order.count_representations(tau, rho, a, j)?;
        total += m;
        best = best.max(m);
        period = t;
    }
    report.check(total == period * coprime, || {
        format!("sum of M_rho = {total}, T * coprime count = {period} * {coprime}")
    });
    let absd = (order.discriminant().unsigned_abs()) as f64;
    report.ratio = Some(best as f64 / (j as f64 * period as f64 / (absd.sqrt() * a.norm() as f64)));
    Ok(())
}

/// Admissible ideals of norm at most `max_norm`, unit ideal excluded.
pub fn admissible_ideals(ring: &EndRing, max_norm: u64) -> Vec<IdealHNF> {
    ring.order().ideals_up_to(max_norm).into_iter().filter(|a| !a.is_unit() && admissible(ring, a)).collect()
}

/// Whether every admissible ideal up to `max_norm` fits the enumeration
/// budget and needs no division points.
pub fn torsion_feasible(curve: &Curve, ring: &EndRing, max_norm: u64) -> bool {
    ring.is_certified()
        && admissible_ideals(ring, max_norm).iter().all(|a| {
            arith::gcd(ring.w(), a.least_integer()) == 1
                && torsion_degree(ring, a).map(|m| check_budget(curve.q(), m, String::new()).is_ok()).unwrap_or(false)
        })
}

/// First `count` curves, over the fields of order `qs`, on which every
/// admissible ideal of norm at most `max_norm` is feasible.
pub fn torsion_curves(qs: &[u64], max_norm: u64, count: usize) -> Result<Vec<Curve>> {
    let mut out = Vec::new();
    for &q in qs {
        let (p, k) = prime_power(q)?;
        let field = Arc::new(FiniteField::new(p, k, None)?);
        let mut per_field = 0;
        for curve in all_curves(&field) {
            if out.len() == count || per_field == count.div_ceil(qs.len()) + 1 {
                break;
            }
            let Ok(ring) = determine_end_ring(&curve) else { continue };
            if !admissible_ideals(&ring, max_norm).is_empty() && torsion_feasible(&curve, &ring, max_norm) {
                out.push(curve);
                per_field += 1;
            }
        }
    }
    Ok(out)
}

pub fn prime_power(q: u64) -> Result<(u64, usize)> {
    let f = arith::factor(q);
    match f.as_slice() {
        [(p, k)] => Ok((*p, *k as usize)),
        _ => Err(Error::InvalidField(format!("{q} is not a prime power"))),
    }
}

/// A deterministic set of instances covering every lemma, at most `budget`
/// of them.
pub fn lemma_corpus(budget: usize) -> Result<Vec<(LemmaId, LemmaInstance)>> {
    let mut out = Vec::new();
    if budget == 0 {
        return Ok(out);
    }
    for curve in torsion_curves(&[2, 3, 4, 5, 7], 9, 4)? {
        let ring = determine_end_ring(&curve)?;
        for a in admissible_ideals(&ring, 9) {
            out.push((LemmaId::L2, LemmaInstance::Torsion { curve: curve.clone(), ideal: a.triple() }));
            out.push((LemmaId::L3, LemmaInstance::Torsion { curve: curve.clone(), ideal: a.triple() }));
        }
        let order = ring.order();
        let frob = ring.frobenius_prime();
        let conductor = order.integer_ideal(order.conductor());
        let mut taus: Vec<OrderElement> = order
            .ball_points(&order.unit_ideal(), 12)
            .into_iter()
            .filter(|&t| {
                let n = order.norm(t);
                t.y != 0
                    && n > 1
                    && order.element_coprime(t, &conductor)
                    && order.element_coprime(t, &frob)
                    && n % curve.characteristic() != 0
            })
            .collect();
        taus.sort_by_key(|&t| (order.norm(t), t.x, t.y));
        if let Some(&tau) = taus.iter().find(|&&t| {
            let n0 = if curve.characteristic() == 2 { 3 } else { 2 };
            let n = n0 * order.norm(t);
            arith::gcd(ring.w(), n) == 1
                && order
                    .multiplicative_order_mod(ring.pi(), &order.integer_ideal(n))
                    .is_ok_and(|m| check_budget(curve.q(), m as u32, String::new()).is_ok())
        }) {
            let n0 = if curve.characteristic() == 2 { 3 } else { 2 };
            let inst = LemmaInstance::Preimage { curve: curve.clone(), tau, n0, samples: 3 };
            out.push((LemmaId::L4, inst));
        }
        let mut combo = vec![OrderElement::ONE];
        combo.extend(taus.first().copied());
        let coeffs = vec![1; combo.len()];
        out.push((LemmaId::L5, LemmaInstance::Degree { curve: curve.clone(), f: Observable::X, coeffs, taus: combo }));
    }
    for (l, j) in [(30, 6), (210, 15), (2310, 49), (30030, 174), (9699690, 3115), (97, 10), (1024, 32)] {
        out.push((LemmaId::L6, LemmaInstance::Sieve { l, j }));
    }
    for (d_k, u) in [(-4, 1), (-3, 1), (-7, 1), (-8, 1), (-11, 1), (-3, 2), (-4, 3)] {
        let order = CMOrder::new(d_k, u)?;
        for a in order.ideals_up_to(12).into_iter().filter(|a| order.is_coprime_to_conductor(a)).take(4) {
            out.push((LemmaId::L7, LemmaInstance::Lattice { d_k, u, ideal: a.triple(), j: 400 }));
            out.push((LemmaId::L8, LemmaInstance::Lattice { d_k, u, ideal: a.triple(), j: 400 }));
            if !a.is_unit() {
                let tau =
                    order.unit_residues(&a).into_iter().find(|&t| t != OrderElement::ONE).unwrap_or(OrderElement::ONE);
                out.push((LemmaId::L9, LemmaInstance::Representation { d_k, u, tau, ideal: a.triple(), j: 60 }));
            }
        }
    }
    out.truncate(budget);
    Ok(out)
}
