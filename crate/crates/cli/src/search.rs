//! Deterministic scan for curves in the regimes the bounds care about.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use endogen::analysis::lemmas::prime_power;
use endogen::arith;
use endogen::curve::all_curves;
use endogen::{determine_end_ring, Curve, Endomorphism, FiniteField, GeneratorState, OrderElement, PointAction};
use serde_json::{json, Value};

use crate::config::CurveSpec;
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Want {
    /// `l` inert in `End(E)`.
    Inert,
    /// `l` split in `End(E)`.
    Split,
    /// `E[l]` inside `E(F_q)`.
    FullTorsion,
    /// Full rational `l`-torsion, `l` inert, and some `tau` of period `l^2 - 1`.
    MaxPeriod,
}

impl FromStr for Want {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "inert" => Ok(Want::Inert),
            "split" => Ok(Want::Split),
            "full-torsion" => Ok(Want::FullTorsion),
            "max-period" => Ok(Want::MaxPeriod),
            _ => Err(CliError::Config(format!("unknown criterion {s:?}"))),
        }
    }
}

impl fmt::Display for Want {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Want::Inert => "inert",
            Want::Split => "split",
            Want::FullTorsion => "full-torsion",
            Want::MaxPeriod => "max-period",
        })
    }
}

#[derive(Debug, Clone)]
pub struct Criteria {
    pub q_min: u64,
    pub q_max: u64,
    pub l: u64,
    pub want: Want,
    /// Curves examined per field, in lexicographic coefficient order.
    pub scan: usize,
    /// Stop after this many candidates.
    pub limit: usize,
}

pub const MAX_Q: u64 = 500;

#[derive(Debug, Clone)]
pub struct Candidate {
    pub curve: Curve,
    pub conductor: u64,
    /// Generator data, for `MaxPeriod`.
    pub generator: Option<MaxPeriod>,
}

#[derive(Debug, Clone)]
pub struct MaxPeriod {
    pub point: (u64, u64),
    pub tau: OrderElement,
    pub tau_fractions: [i64; 4],
    pub annihilator: (u64, u64, u64),
    /// Period from residues; the generator also checked it on points.
    pub period: u64,
}

impl Candidate {
    pub fn to_json(&self) -> Value {
        let c = &self.curve;
        let mut v = json!({
            "curve": c.to_string(),
            "q": c.q(),
            "a": CurveSpec::from_curve(c).a,
            "points": c.n_points(),
            "trace": c.trace(),
            "d_k": c.d_k(),
            "v": c.v(),
            "u": self.conductor,
        });
        if let Some(g) = &self.generator {
            v["point"] = json!([g.point.0, g.point.1]);
            v["tau"] = json!(g.tau_fractions);
            v["tau_omega"] = json!([g.tau.x, g.tau.y]);
            v["annihilator"] = json!([g.annihilator.0, g.annihilator.1, g.annihilator.2]);
            v["period"] = json!(g.period);
        }
        v
    }
}

pub fn search(c: &Criteria) -> CliResult<Vec<Candidate>> {
    if c.q_max > MAX_Q {
        return Err(CliError::Config(format!("q range limited to {MAX_Q}")));
    }
    if !arith::is_prime(c.l) {
        return Err(CliError::Config(format!("l = {} must be prime", c.l)));
    }
    let mut out = Vec::new();
    for q in c.q_min.max(2)..=c.q_max {
        if out.len() >= c.limit {
            break;
        }
        let Ok((p, k)) = prime_power(q) else { continue };
        let field = Arc::new(FiniteField::new(p, k, None)?);
        for curve in all_curves(&field).take(c.scan) {
            if out.len() >= c.limit {
                break;
            }
            if let Some(cand) = examine(&curve, c)? {
                out.push(cand);
            }
        }
    }
    Ok(out)
}

fn examine(curve: &Curve, c: &Criteria) -> CliResult<Option<Candidate>> {
    let l = c.l;
    let full_torsion = || -> CliResult<bool> {
        Ok(l != curve.characteristic()
            && curve.n_points().is_multiple_of(l * l)
            && curve.rational_torsion(l, 1)? == (l, l))
    };
    if matches!(c.want, Want::FullTorsion | Want::MaxPeriod) && !full_torsion()? {
        return Ok(None);
    }
    let ring = match determine_end_ring(curve) {
        Ok(r) if r.is_certified() => r,
        Ok(_) | Err(endogen::Error::ScaleLimit { .. }) => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let order = ring.order();
    let splitting = if order.conductor() % l == 0 { 0 } else { arith::kronecker(order.discriminant(), l) };
    let keep = match c.want {
        Want::Inert => splitting == -1,
        Want::Split => splitting == 1,
        Want::FullTorsion => true,
        Want::MaxPeriod => splitting == -1,
    };
    if !keep {
        return Ok(None);
    }
    let generator = if c.want == Want::MaxPeriod {
        match max_period(curve, &ring, l)? {
            Some(g) => Some(g),
            None => return Ok(None),
        }
    } else {
        None
    };
    Ok(Some(Candidate { curve: curve.clone(), conductor: order.conductor(), generator }))
}

/// A point of `E[l]` with annihilator `(l)` and the first `tau` modulo `l`
/// whose period is `l^2 - 1`.
fn max_period(curve: &Curve, ring: &endogen::EndRing, l: u64) -> CliResult<Option<MaxPeriod>> {
    let action = Arc::new(PointAction::new(curve, ring, 1, l)?);
    let g = &action.extension().group;
    let mut pts: Vec<_> = g.torsion_points(l).into_iter().filter(|p| !p.is_infinity()).collect();
    pts.sort_by_key(|p| p.coords());
    let Some(&p0) = pts.first() else { return Ok(None) };
    let target = ring.order().integer_ideal(l);
    let ann = action.annihilator(p0)?;
    if ann.ideal != target {
        return Ok(None);
    }
    let li = l as i64;
    for y in 0..li {
        for x in 0..li {
            let tau = OrderElement::new(x, y);
            let state = match GeneratorState::new(action.clone(), tau, p0) {
                Ok(s) => s,
                Err(endogen::Error::NotInvertible) => continue,
                Err(e) => return Err(e.into()),
            };
            if state.period() == Some(l * l - 1) {
                let (px, py) = p0.coords().expect("finite point");
                return Ok(Some(MaxPeriod {
                    point: (px.index() as u64, py.index() as u64),
                    tau,
                    tau_fractions: Endomorphism::from_order(ring, tau).to_fractions(),
                    annihilator: ann.ideal.triple(),
                    period: l * l - 1,
                }));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn criteria(l: u64, want: Want, q_max: u64) -> Criteria {
        Criteria { q_min: 2, q_max, l, want, scan: 400, limit: 5 }
    }

    #[test]
    fn three_torsion_divides_order() {
        let found = search(&criteria(3, Want::FullTorsion, 40)).unwrap();
        assert!(!found.is_empty());
        for c in found {
            assert_eq!(c.curve.n_points() % 9, 0);
        }
    }

    #[test]
    fn max_period_two() {
        let found = search(&criteria(2, Want::MaxPeriod, 30)).unwrap();
        let g = found[0].generator.as_ref().unwrap();
        assert_eq!(g.period, 3);
        assert_eq!(g.annihilator, (2, 0, 2));
    }

    #[test]
    fn rejects_composite_l() {
        assert!(search(&criteria(4, Want::Inert, 10)).is_err());
    }
}
