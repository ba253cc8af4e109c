//! Measured quantities set against the closed-form bounds, one row per
//! quantity, bound and `nu`.

use std::fmt::Write as _;
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::cm_order::{CMOrder, OrderElement};
use crate::curve::{all_curves, Curve, Point};
use crate::endo::{determine_end_ring, PointAction};
use crate::error::{Error, Result};
use crate::field::FiniteField;
use crate::generator::{GeneratorState, Observable};

use super::bounds::{self, BoundParams};
use super::complexity::linear_complexity;
use super::discrepancy::{discrepancy, BoxMode};
use super::lemmas::prime_power;
use super::sums::exp_sum;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub quantity: String,
    pub bound_name: String,
    pub instance: String,
    pub nu: u32,
    pub params: BoundParams<f64>,
    pub measured: f64,
    /// Closed form with implied constant 1.
    pub bound: f64,
    /// `measured / bound` when the bound is positive.
    pub ratio: Option<f64>,
    /// Upper bounds at least `T`, or lower bounds at most 1.
    pub vacuous: bool,
    /// Whether the size and period hypotheses hold for the supplied `eps`.
    pub hypotheses: bool,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_time_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyzeOptions {
    /// Character index `j` of `psi_j`.
    pub j: u64,
    pub nus: Vec<u32>,
    pub boxes: BoxMode,
    pub eps: f64,
    pub seed: u64,
    pub timed: bool,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions { j: 1, nus: vec![1, 2, 3], boxes: BoxMode::All, eps: 0.01, seed: 0, timed: false }
    }
}

/// The parameters of the bounds for one purely periodic generator.
pub fn bound_params(state: &GeneratorState, f: &Observable, nu: u32) -> Result<BoundParams<f64>> {
    let period = state.period().ok_or_else(|| Error::InvalidConfiguration("sequence not purely periodic".into()))?;
    let field = state.field();
    let order = state.action().ring().order();
    Ok(BoundParams {
        nu,
        deg_f: f.pole_degree() as f64,
        period: period as f64,
        l: state.point_order() as f64,
        norm_l: state.annihilator().norm() as f64,
        q: field.order() as f64,
        abs_d: order.discriminant().unsigned_abs() as f64,
        p: field.characteristic() as f64,
        k: field.degree() as u32,
    })
}

/// Sum, discrepancy and linear complexity over one full period, each paired
/// with its bounds for every `nu` in `opts`.
pub fn analyze(
    state: &GeneratorState,
    f: &Observable,
    label: &str,
    opts: &AnalyzeOptions,
) -> Result<Vec<AnalysisReport>> {
    if opts.nus.is_empty() {
        return Err(Error::InvalidConfiguration("no nu values".into()));
    }
    let period = state.period().ok_or_else(|| Error::InvalidConfiguration("sequence not purely periodic".into()))?;
    let field = state.field();
    let mut s = state.clone();
    s.reset();

    let clock = Instant::now();
    let out = s.emit(f, period as usize);
    let sum = exp_sum::<f64>(field, &out, opts.j)?.norm();
    let sum_ms = ms(clock);

    let clock = Instant::now();
    let pts: Vec<Option<Vec<u64>>> = out
        .iter()
        .map(|o| match *o {
            crate::generator::Output::Value(v) => Some(field.coords(v)),
            crate::generator::Output::Pole => None,
        })
        .collect();
    let disc = discrepancy(field.characteristic(), &pts, None, opts.boxes)?.value();
    let disc_ms = ms(clock);

    // two periods determine the recurrence of a sequence of period T
    let clock = Instant::now();
    let mut seq: Vec<_> = out.iter().map(|o| o.or_zero(field)).collect();
    seq.extend_from_within(..);
    let lc = linear_complexity(field, &seq) as f64;
    let lc_ms = ms(clock);

    let mut rows = Vec::new();
    for &nu in &opts.nus {
        let bp = bound_params(state, f, nu)?;
        let t = bp.period;
        let h1 = {
            let th = bounds::theorem1_threshold(&bp, opts.eps);
            th.period_ok && th.size_ok
        };
        let h2 = {
            let th = bounds::theorem2_threshold(&bp, opts.eps);
            th.period_ok && th.size_ok
        };
        let h3 = bounds::theorem3_hypothesis(&bp, opts.eps);
        let entries = [
            ("exp_sum", "theorem1", sum, bounds::theorem1(&bp)?, h1, true, sum_ms),
            ("exp_sum", "theorem2", sum, bounds::theorem2(&bp)?, h2, true, sum_ms),
            ("discrepancy", "corollary1", disc, bounds::corollary1(&bp)?, h1, true, disc_ms),
            ("discrepancy", "corollary2", disc, bounds::corollary2(&bp)?, h2, true, disc_ms),
            ("linear_complexity", "theorem3", lc, bounds::theorem3(&bp)?, h3, false, lc_ms),
        ];
        for (quantity, bound_name, measured, bound, hypotheses, upper, wall) in entries {
            rows.push(AnalysisReport {
                quantity: quantity.into(),
                bound_name: bound_name.into(),
                instance: label.into(),
                nu,
                params: bp,
                measured,
                bound,
                ratio: (bound > 0.0).then(|| measured / bound),
                vacuous: if upper { bound >= t } else { bound <= 1.0 },
                hypotheses,
                seed: opts.seed,
                wall_time_ms: opts.timed.then_some(wall),
            });
        }
    }
    Ok(rows)
}

fn ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Nonzero elements of norm at most `max_norm` outside `Z`, by increasing
/// norm.
pub fn candidate_taus(order: &CMOrder, max_norm: u64) -> Vec<OrderElement> {
    let mut taus: Vec<OrderElement> =
        order.ball_points(&order.unit_ideal(), max_norm).into_iter().filter(|t| t.y != 0).collect();
    taus.sort_by_key(|&t| (order.norm(t), t.x, t.y));
    taus
}

/// First point of maximal order in `E(F_q)`, in enumeration order.
pub fn max_order_point(curve: &Curve) -> Point {
    let g = curve.group();
    let mut best = (0, g.infinity());
    for p in g.points() {
        let o = g.order_dividing(p, curve.n_points());
        if o > best.0 {
            best = (o, p);
        }
    }
    best.1
}

/// A generator on `E(F_q)` together with its label.
#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub label: String,
    pub state: GeneratorState,
    pub f: Observable,
}

/// Seed of the committed corpus report.
pub const CORPUS_SEED: u64 = 20_240_601;

const CORPUS_FIELDS: [u64; 14] = [5, 7, 11, 13, 17, 19, 23, 29, 31, 4, 8, 9, 16, 25];

/// Deterministic generators: among the first 40 curves of each field the two
/// with the largest cyclic part, and on each the two `tau` of norm at most 60
/// with the longest periods, observed through `x` and `y` respectively.
pub fn corpus_entries() -> Result<Vec<CorpusEntry>> {
    let mut out = Vec::new();
    for q in CORPUS_FIELDS {
        let (p, k) = prime_power(q)?;
        let field = Arc::new(FiniteField::new(p, k, None)?);
        let mut curves: Vec<(u64, Curve, Point)> = all_curves(&field)
            .take(40)
            .map(|c| {
                let p0 = max_order_point(&c);
                (c.group().order_dividing(p0, c.n_points()), c, p0)
            })
            .collect();
        // stable: ties keep enumeration order
        curves.sort_by_key(|e| std::cmp::Reverse(e.0));
        let mut used = 0;
        for (_, curve, p0) in curves {
            if used == 2 {
                break;
            }
            let Ok(ring) = determine_end_ring(&curve) else { continue };
            let Ok(action) = PointAction::new(&curve, &ring, 1, curve.n_points()) else { continue };
            let action = Arc::new(action);
            let mut states: Vec<GeneratorState> = candidate_taus(ring.order(), 60)
                .into_iter()
                .filter_map(|tau| GeneratorState::new(action.clone(), tau, p0).ok())
                .filter(|s| s.period().is_some_and(|t| t > 1))
                .collect();
            states.sort_by_key(|s| std::cmp::Reverse(s.period()));
            if states.is_empty() {
                continue;
            }
            for (i, state) in states.into_iter().take(2).enumerate() {
                let f = if i == 0 { Observable::X } else { Observable::Y };
                let label = format!("{curve} P={:?} tau={} f={f}", point_label(&field, p0), state.tau());
                out.push(CorpusEntry { label, state, f });
            }
            used += 1;
        }
    }
    Ok(out)
}

fn point_label(field: &FiniteField, p: Point) -> Option<(Vec<u64>, Vec<u64>)> {
    p.coords().map(|(x, y)| (field.coords(x), field.coords(y)))
}

/// Every corpus entry analysed at `nu = 1, 2, 3`; exact boxes when
/// `p^k <= 121`, otherwise a seeded sample.
pub fn corpus_reports(seed: u64) -> Result<Vec<AnalysisReport>> {
    let mut rows = Vec::new();
    for e in corpus_entries()? {
        let boxes = if e.state.field().order() <= 121 { BoxMode::All } else { BoxMode::Sample { count: 4096, seed } };
        let opts = AnalyzeOptions { boxes, seed, ..AnalyzeOptions::default() };
        rows.extend(analyze(&e.state, &e.f, &e.label, &opts)?);
    }
    Ok(rows)
}

/// Pretty JSON with a trailing newline.
pub fn to_json(rows: &[AnalysisReport]) -> Result<String> {
    let mut s = serde_json::to_string_pretty(rows).map_err(|e| Error::Parse(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn to_csv(rows: &[AnalysisReport]) -> String {
    let mut s = String::from("quantity,bound_name,nu,measured,bound,ratio,vacuous,hypotheses,instance\n");
    for r in rows {
        let ratio = r.ratio.map(|x| x.to_string()).unwrap_or_default();
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},\"{}\"",
            r.quantity, r.bound_name, r.nu, r.measured, r.bound, ratio, r.vacuous, r.hypotheses, r.instance
        );
    }
    s
}
