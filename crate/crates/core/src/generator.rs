//! The endomorphism generator `P_n = tau P_{n-1} = tau^n P` and the
//! observables read off its points.

use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;
use std::sync::Arc;

use crate::cm_order::OrderElement;
use crate::curve::Point;
use crate::endo::{AnnihilatorIdeal, PointAction};
use crate::error::{Error, Result};
use crate::field::{FieldElement, FiniteField};

/// A monomial `x^i y^j`, `j <= 1`, with pole divisor `(2i + 3j) inf`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Observable {
    X,
    Y,
    Monomial { i: u32, j: u32 },
}

impl Observable {
    pub fn monomial(i: u32, j: u32) -> Result<Self> {
        if j > 1 {
            return Err(Error::InvalidConfiguration(format!("y exponent {j} > 1 is not supported")));
        }
        if 2 * i + 3 * j < 2 {
            return Err(Error::InvalidConfiguration("constant observable".into()));
        }
        Ok(match (i, j) {
            (1, 0) => Observable::X,
            (0, 1) => Observable::Y,
            _ => Observable::Monomial { i, j },
        })
    }

    pub fn exponents(&self) -> (u32, u32) {
        match *self {
            Observable::X => (1, 0),
            Observable::Y => (0, 1),
            Observable::Monomial { i, j } => (i, j),
        }
    }

    /// `deg f = 2i + 3j`.
    pub fn pole_degree(&self) -> u32 {
        let (i, j) = self.exponents();
        2 * i + 3 * j
    }

    /// `f(P)`, or `None` at the pole `inf`.
    pub fn eval(&self, field: &FiniteField, p: &Point) -> Option<FieldElement> {
        let (x, y) = p.coords()?;
        let (i, j) = self.exponents();
        let xi = field.pow(x, i as u64);
        Some(if j == 1 { field.mul(xi, y) } else { xi })
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Observable::X => write!(f, "x"),
            Observable::Y => write!(f, "y"),
            Observable::Monomial { i, j } => write!(f, "x^{i}*y^{j}"),
        }
    }
}

impl FromStr for Observable {
    type Err = Error;

    /// Accepts `x`, `y`, or `x^i*y^j`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "x" | "X" => return Ok(Observable::X),
            "y" | "Y" => return Ok(Observable::Y),
            _ => {}
        }
        let bad = || Error::Parse(format!("observable {s:?}; expected x, y or x^i*y^j"));
        let (xs, ys) = s.split_once('*').ok_or_else(bad)?;
        let i = xs.trim().strip_prefix("x^").ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let j = ys.trim().strip_prefix("y^").ok_or_else(bad)?.parse().map_err(|_| bad())?;
        Observable::monomial(i, j)
    }
}

/// One emitted value: `f(P_n)` or the pole mark for `P_n = inf`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Output {
    Value(FieldElement),
    Pole,
}

impl Output {
    /// Poles read as zero where a field value is required.
    pub fn or_zero(self, field: &FiniteField) -> FieldElement {
        match self {
            Output::Value(v) => v,
            Output::Pole => field.zero(),
        }
    }
}

/// Full state of the generator; `current = tau^n P`.
#[derive(Debug, Clone)]
pub struct GeneratorState {
    action: Arc<PointAction>,
    tau: OrderElement,
    start: Point,
    ann: AnnihilatorIdeal,
    period: Option<u64>,
    index: u64,
    current: Point,
}

impl GeneratorState {
    /// A purely periodic generator; fails with `NotInvertible` unless
    /// `(tau) + ann(P) = O`.
    pub fn new(action: Arc<PointAction>, tau: OrderElement, p: Point) -> Result<Self> {
        if p.is_infinity() {
            return Err(Error::InvalidConfiguration("starting point must not be inf".into()));
        }
        let ann = action.annihilator(p)?;
        let period = action.multiplicative_order(tau, &ann)?;
        Ok(GeneratorState { action, tau, start: p, ann, period: Some(period), index: 0, current: p })
    }

    /// Like [`GeneratorState::new`] but accepts `tau` sharing a factor with
    /// `ann(P)`; such sequences are only ultimately periodic.
    pub fn with_tail(action: Arc<PointAction>, tau: OrderElement, p: Point) -> Result<Self> {
        match Self::new(action.clone(), tau, p) {
            Err(Error::NotInvertible) => {
                let ann = action.annihilator(p)?;
                Ok(GeneratorState { action, tau, start: p, ann, period: None, index: 0, current: p })
            }
            other => other,
        }
    }

    pub fn action(&self) -> &PointAction {
        &self.action
    }

    pub fn field(&self) -> &FiniteField {
        self.action.extension().group.field()
    }

    pub fn tau(&self) -> OrderElement {
        self.tau
    }

    pub fn start(&self) -> Point {
        self.start
    }

    pub fn annihilator(&self) -> &AnnihilatorIdeal {
        &self.ann
    }

    /// Point order `l` of `P`.
    pub fn point_order(&self) -> u64 {
        self.ann.order
    }

    /// `T`, or `None` for a sequence with a tail.
    pub fn period(&self) -> Option<u64> {
        self.period
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn current(&self) -> Point {
        self.current
    }

    pub fn reset(&mut self) {
        self.index = 0;
        self.current = self.start;
    }

    /// Advances to `P_{n+1} = tau P_n` and returns it.
    pub fn next_point(&mut self) -> Point {
        self.current = self.action.apply(self.tau, self.current);
        self.index += 1;
        self.current
    }

    /// `P_n` directly from the residue `tau^n mod ann(P)`.
    pub fn nth(&self, n: u64) -> Point {
        let o = self.action.ring().order();
        let r = o.pow_mod(self.tau, n, &self.ann.ideal);
        self.action.apply(r, self.start)
    }

    /// `f(P_{n+1}), ..., f(P_{n+len})` from the current index on.
    pub fn emit(&mut self, f: &Observable, len: usize) -> Vec<Output> {
        (0..len)
            .map(|_| {
                let p = self.next_point();
                match f.eval(self.field(), &p) {
                    Some(v) => Output::Value(v),
                    None => Output::Pole,
                }
            })
            .collect()
    }

    /// Points `P_1, ..., P_len` from the start, leaving `self` untouched.
    pub fn points(&self, len: usize) -> Vec<Point> {
        let mut s = self.clone();
        s.reset();
        (0..len).map(|_| s.next_point()).collect()
    }

    /// `(tail, cycle)` lengths of the orbit `P_0, P_1, ...`.
    pub fn orbit_shape(&self) -> (u64, u64) {
        let mut seen: HashMap<Point, u64> = HashMap::new();
        let mut p = self.start;
        let mut n = 0u64;
        loop {
            if let Some(&m) = seen.get(&p) {
                return (m, n - m);
            }
            seen.insert(p, n);
            p = self.action.apply(self.tau, p);
            n += 1;
        }
    }
}

/// CSV rows `n,x,y,s_n` for `P_1 .. P_len`; coordinates are `;`-joined
/// prime-field digits and `inf` renders as `INF`.
pub fn stream_csv(state: &GeneratorState, f: &Observable, len: usize) -> String {
    let field = state.field();
    let coords = |a: FieldElement| field.coords(a).iter().map(|c| c.to_string()).collect::<Vec<_>>().join(";");
    let mut out = String::from("n,x,y,s_n\n");
    for (k, p) in state.points(len).into_iter().enumerate() {
        let (x, y, s) = match p.coords() {
            None => ("INF".to_string(), "INF".to_string(), "INF".to_string()),
            Some((x, y)) => (coords(x), coords(y), coords(f.eval(field, &p).expect("affine point"))),
        };
        writeln!(out, "{},{x},{y},{s}", k + 1).expect("writing to a String");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::Curve;
    use crate::endo::determine_end_ring;

    fn setup() -> (Arc<PointAction>, Point) {
        let f = Arc::new(FiniteField::prime(5).unwrap());
        let e = Curve::short(f.clone(), f.from_int(1), f.from_int(1)).unwrap();
        let ring = determine_end_ring(&e).unwrap();
        let act = Arc::new(PointAction::new(&e, &ring, 1, 9).unwrap());
        let g = &act.extension().group;
        let p = g.points().find(|&p| g.point_order(p) == 9).unwrap();
        (act.clone(), p)
    }

    #[test]
    fn observable_parsing_and_degree() {
        assert_eq!("x".parse::<Observable>().unwrap(), Observable::X);
        assert_eq!("x^1*y^1".parse::<Observable>().unwrap().pole_degree(), 5);
        assert_eq!("x^0*y^1".parse::<Observable>().unwrap(), Observable::Y);
        assert!("x^0*y^0".parse::<Observable>().is_err());
        assert!("x^1*y^2".parse::<Observable>().is_err());
    }

    #[test]
    fn identity_tau_is_constant() {
        let (act, p) = setup();
        let mut s = GeneratorState::new(act, OrderElement::ONE, p).unwrap();
        assert_eq!(s.period(), Some(1));
        let out = s.emit(&Observable::X, 5);
        assert!(out.iter().all(|&o| o == Output::Value(p.x().unwrap())));
    }

    #[test]
    fn power_generator_and_random_access() {
        let (act, p) = setup();
        let g = act.extension().group.clone();
        let s = GeneratorState::new(act, OrderElement::integer(2), p).unwrap();
        // 2 has order 6 modulo 9
        assert_eq!(s.period(), Some(6));
        let pts = s.points(12);
        let mut expect = p;
        for (n, q) in pts.iter().enumerate() {
            expect = g.scalar_mul(2, expect);
            assert_eq!(*q, expect);
            assert_eq!(s.nth(n as u64 + 1), *q);
        }
        assert_eq!(pts[5], p);
    }

    #[test]
    fn periodic_blocks_repeat() {
        let (act, p) = setup();
        let tau = OrderElement::new(1, 1);
        let mut s = GeneratorState::new(act, tau, p).unwrap();
        let t = s.period().unwrap() as usize;
        let a = s.emit(&Observable::Y, t);
        let b = s.emit(&Observable::Y, t);
        assert_eq!(a, b);
        assert_eq!(s.orbit_shape(), (0, t as u64));
    }

    #[test]
    fn non_coprime_tau_has_tail_and_pole() {
        let (act, p) = setup();
        assert_eq!(GeneratorState::new(act.clone(), OrderElement::integer(3), p).unwrap_err(), Error::NotInvertible);
        let mut s = GeneratorState::with_tail(act, OrderElement::integer(3), p).unwrap();
        assert_eq!(s.period(), None);
        let (tail, cycle) = s.orbit_shape();
        assert!(tail > 0);
        assert_eq!(cycle, 1);
        let out = s.emit(&Observable::monomial(1, 1).unwrap(), 3);
        assert_eq!(out[1], Output::Pole);
    }

    #[test]
    fn csv_layout() {
        let (act, p) = setup();
        let s = GeneratorState::with_tail(act, OrderElement::integer(3), p).unwrap();
        let csv = stream_csv(&s, &Observable::X, 2);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "n,x,y,s_n");
        assert_eq!(lines[2], "2,INF,INF,INF");
        assert!(lines[1].starts_with("1,"));
    }
}
