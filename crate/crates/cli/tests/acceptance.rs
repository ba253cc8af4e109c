//! One line per acceptance criterion; exits nonzero if any fails.

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use endogen::analysis::bounds::{self, BoundParams};
use endogen::analysis::complexity::linear_complexity;
use endogen::analysis::discrepancy::{discrepancy, BoxMode};
use endogen::analysis::lemmas::{admissible_ideals, lemma_corpus, prime_power, torsion_curves, verify_lemma};
use endogen::analysis::lemmas::{LemmaId, LemmaInstance};
use endogen::analysis::report::{corpus_entries, corpus_reports, to_json, CORPUS_SEED};
use endogen::arith;
use endogen::curve::all_curves;
use endogen::{determine_end_ring, Complex64, Curve, FieldElement, FiniteField, Output, PointAction};
use endogen_cli::search::{search, Criteria, Want};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn field(q: u64) -> Arc<FiniteField> {
    let (p, k) = prime_power(q).unwrap();
    Arc::new(FiniteField::new(p, k, None).unwrap())
}

fn prime_powers(lo: u64, hi: u64) -> Vec<u64> {
    (lo..=hi).filter(|&q| prime_power(q).is_ok()).collect()
}

/// Every ordinary curve for `q <= 13`, and 200 seeded ordinary samples for
/// every other prime power up to 101.
fn hasse_corpus() -> Vec<Curve> {
    let mut out = Vec::new();
    for q in prime_powers(2, 101) {
        let f = field(q);
        if q <= 13 {
            out.extend(all_curves(&f));
            continue;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(q);
        let mut got = 0;
        while got < 200 {
            let a: [FieldElement; 5] = std::array::from_fn(|_| f.element(rng.gen_range(0..q)));
            if let Ok(c) = Curve::new(f.clone(), a) {
                out.push(c);
                got += 1;
            }
        }
    }
    out
}

/// Affine solutions of the long Weierstrass equation plus the point at
/// infinity.
fn brute_count(c: &Curve) -> u64 {
    let f = c.field();
    let [a1, a2, a3, a4, a6] = *c.coefficients();
    let mut n = 1;
    for x in f.elements() {
        let rhs = {
            let x2 = f.mul(x, x);
            let t = f.add(f.mul(x2, x), f.mul(a2, x2));
            f.add(f.add(t, f.mul(a4, x)), a6)
        };
        for y in f.elements() {
            let lhs = f.add(f.mul(y, y), f.add(f.mul(f.mul(a1, x), y), f.mul(a3, y)));
            if lhs == rhs {
                n += 1;
            }
        }
    }
    n
}

fn c1_hasse(curves: &[Curve], build: Duration) -> Outcome {
    let start = Instant::now() - build;
    for c in curves {
        let (n, q) = (brute_count(c), c.q());
        if n != c.n_points() {
            return Err(format!("{c}: brute count {n} != {}", c.n_points()));
        }
        let t = q as i128 + 1 - n as i128;
        if t * t > 4 * q as i128 {
            return Err(format!("{c}: |t| = {} exceeds 2 sqrt q", t.abs()));
        }
    }
    let el = start.elapsed();
    if el > Duration::from_secs(60) {
        return Err(format!("took {el:?}"));
    }
    Ok(format!("{} ordinary curves, {el:.1?}", curves.len()))
}

fn c2_frobenius() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let fields = [5u64, 7, 8, 9, 11, 16, 25, 31];
    let mut checked = 0;
    while checked < 100 {
        let q = fields[rng.gen_range(0..fields.len())];
        let f = field(q);
        let a: [FieldElement; 5] = std::array::from_fn(|_| f.element(rng.gen_range(0..q)));
        let Ok(c) = Curve::new(f, a) else { continue };
        let m = rng.gen_range(1..=3u32);
        let ext = c.over_extension(m).map_err(|e| e.to_string())?;
        let g = &ext.group;
        let p = g.random_point(&mut rng);
        let pi = g.frobenius(p);
        let lhs = g.add(g.sub(g.frobenius(pi), g.scalar_mul(c.trace(), pi)), g.scalar_mul(q as i64, p));
        if !lhs.is_infinity() {
            return Err(format!("{c} over degree {m}: pi^2 - t pi + q nonzero"));
        }
        checked += 1;
    }
    let el = start.elapsed();
    if el > Duration::from_secs(30) {
        return Err(format!("took {el:?}"));
    }
    Ok(format!("{checked} points, {el:.1?}"))
}

fn torsion_lemma(id: LemmaId) -> Outcome {
    let curves = torsion_curves(&[2, 3, 4, 5, 7], 16, 10).map_err(|e| e.to_string())?;
    if curves.len() < 10 {
        return Err(format!("only {} curves", curves.len()));
    }
    let mut n = 0;
    for c in &curves {
        let ring = determine_end_ring(c).map_err(|e| e.to_string())?;
        for a in admissible_ideals(&ring, 16) {
            let inst = LemmaInstance::Torsion { curve: c.clone(), ideal: a.triple() };
            let r = verify_lemma(id, &inst).map_err(|e| format!("{inst}: {e}"))?;
            if !r.passed() {
                return Err(format!("{inst}: {}", r.failures.join("; ")));
            }
            n += 1;
        }
    }
    Ok(format!("{} curves, {n} ideals", curves.len()))
}

fn c5_character_sum(curves: &[Curve]) -> Outcome {
    let mut worst: f64 = 0.0;
    for c in curves {
        let f = c.field();
        let mut s = Complex64::new(0.0, 0.0);
        for p in c.group().points() {
            if let Some(x) = p.x() {
                s += f.additive_character::<f64>(x, 1).map_err(|e| e.to_string())?;
            }
        }
        let bound = 4.0 * (c.q() as f64).sqrt();
        if s.norm() > bound + 1e-9 {
            return Err(format!("{c}: |S| = {} > {bound}", s.norm()));
        }
        worst = worst.max(s.norm() / bound);
    }
    Ok(format!("{} curves, max |S|/4sqrt(q) = {worst:.3}", curves.len()))
}

fn c6_partition() -> Outcome {
    let corpus = lemma_corpus(usize::MAX).map_err(|e| e.to_string())?;
    let mut n = 0;
    for (id, inst) in &corpus {
        let LemmaInstance::Representation { ideal, j, .. } = inst else { continue };
        let norm = ideal.0 * ideal.2;
        if *id != LemmaId::L9 || norm > 200 || *j > 400 {
            continue;
        }
        let r = verify_lemma(*id, inst).map_err(|e| e.to_string())?;
        if !r.passed() {
            return Err(format!("{inst}: {}", r.failures.join("; ")));
        }
        n += 1;
    }
    if n < 20 {
        return Err(format!("only {n} instances"));
    }
    Ok(format!("{n} instances"))
}

fn c7_max_period() -> Outcome {
    let crit = Criteria { q_min: 2, q_max: 200, l: 2, want: Want::MaxPeriod, scan: 2000, limit: 20 };
    let found = search(&crit).map_err(|e| e.to_string())?;
    let mut hits = 0;
    for cand in &found {
        let Some(g) = &cand.generator else { continue };
        let ring = determine_end_ring(&cand.curve).map_err(|e| e.to_string())?;
        let l = crit.l;
        if g.annihilator != (l, 0, l) || arith::kronecker(ring.discriminant(), l) != -1 {
            return Err(format!("{}: ann {:?} is not an inert (l)", cand.curve, g.annihilator));
        }
        let order = ring.order();
        let residue = order.multiplicative_order_mod(g.tau, &order.integer_ideal(l)).map_err(|e| e.to_string())?;
        let action = Arc::new(PointAction::new(&cand.curve, &ring, 1, l).map_err(|e| e.to_string())?);
        let f = cand.curve.field();
        let p = cand.curve.group().point(f.element(g.point.0), f.element(g.point.1)).map_err(|e| e.to_string())?;
        let p = action.extension().embed_point(p);
        let mut walk = action.apply(g.tau, p);
        let mut by_points = 1;
        while walk != p {
            walk = action.apply(g.tau, walk);
            by_points += 1;
        }
        if residue != g.period || by_points != g.period {
            return Err(format!("{}: periods {residue} / {by_points} / {}", cand.curve, g.period));
        }
        if g.period == l * l - 1 {
            hits += 1;
        }
    }
    if hits == 0 {
        return Err(format!("no instance with T = 3 among {} candidates", found.len()));
    }
    Ok(format!("{hits} instances with T = 3, {} candidates consistent", found.len()))
}

/// Least `L` such that `s_i = sum_{j=1..L} c_j s_{i-j}` is solvable for
/// `i >= L`, by comparing ranks of the coefficient and augmented matrices.
fn brute_lfsr(f: &FiniteField, s: &[FieldElement]) -> usize {
    let n = s.len();
    (0..=n)
        .find(|&l| {
            let rows: Vec<Vec<FieldElement>> = (l..n)
                .map(|i| {
                    let mut r: Vec<FieldElement> = (1..=l).map(|j| s[i - j]).collect();
                    r.push(s[i]);
                    r
                })
                .collect();
            rank(f, rows.iter().map(|r| r[..l].to_vec()).collect(), l) == rank(f, rows, l + 1)
        })
        .unwrap()
}

fn rank(f: &FiniteField, mut m: Vec<Vec<FieldElement>>, cols: usize) -> usize {
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, piv);
        let inv = f.inv(m[r][c]).unwrap();
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let k = f.mul(m[i][c], inv);
                for j in c..cols {
                    let v = f.mul(k, m[r][j]);
                    m[i][j] = f.sub(m[i][j], v);
                }
            }
        }
        r += 1;
    }
    r
}

fn c8_berlekamp_massey() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let fields = [field(5), field(7), field(8)];
    for k in 0..500 {
        let f = &fields[k % 3];
        let len = rng.gen_range(1..=40);
        // mix of free sequences and short recurrences
        let s: Vec<FieldElement> = if k % 2 == 0 {
            (0..len).map(|_| f.element(rng.gen_range(0..f.order()))).collect()
        } else {
            let deg = rng.gen_range(0..=6usize);
            let c: Vec<FieldElement> = (0..deg).map(|_| f.element(rng.gen_range(0..f.order()))).collect();
            let mut s: Vec<FieldElement> = (0..deg.min(len)).map(|_| f.element(rng.gen_range(0..f.order()))).collect();
            while s.len() < len {
                let n = s.len();
                s.push((0..deg).fold(f.zero(), |acc, j| f.add(acc, f.mul(c[j], s[n - 1 - j]))));
            }
            s
        };
        let (bm, brute) = (linear_complexity(f, &s), brute_lfsr(f, &s));
        if bm != brute {
            return Err(format!("sequence {k} over F_{}: BM {bm}, brute force {brute}", f.order()));
        }
    }
    Ok("500 sequences".into())
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * b.abs().max(1.0)
}

fn c9_bound_reporting() -> Outcome {
    let rows = corpus_reports(CORPUS_SEED).map_err(|e| e.to_string())?;
    for r in &rows {
        let t = r.params.period;
        let ok = match r.quantity.as_str() {
            "exp_sum" | "discrepancy" => r.measured >= 0.0 && r.measured <= t + 1e-9,
            "linear_complexity" => r.measured >= 0.0,
            _ => false,
        };
        if !ok {
            return Err(format!("{} {} measured {} with T = {t}", r.quantity, r.instance, r.measured));
        }
    }

    let hand = BoundParams { nu: 1, deg_f: 2.0, period: 64.0, l: 8.0, norm_l: 64.0, q: 16.0, abs_d: 4.0, p: 2.0, k: 4 };
    let t1 = bounds::theorem1(&hand).map_err(|e| e.to_string())?;
    let sixteen = BoundParams { deg_f: 1.0, period: 16.0, l: 16.0, norm_l: 16.0, q: 16.0, abs_d: 16.0, ..hand };
    let t2 = bounds::theorem2(&sixteen).map_err(|e| e.to_string())?;
    let lc = BoundParams { deg_f: 1.0, period: 64.0, l: 8.0, norm_l: 4.0, abs_d: 1.0, ..hand };
    let t3 = bounds::theorem3(&lc).map_err(|e| e.to_string())?;
    if !close(t1, 64.0 * 2f64.cbrt()) || !close(t2, 128.0) || !close(t3, 32.0) {
        return Err(format!("hand values {t1} {t2} {t3}"));
    }

    for nu in 1..=12i64 {
        let (et, el, eq) = bounds::theorem1_exponents(nu as u32);
        let d = 2 * nu * (nu + 2);
        let frac = |e: bounds::Exponent, num: i64, den: i64| *e.numer() * den == num * *e.denom();
        if !frac(et, d - 3 * nu - 2, d) || !frac(el, 2 * nu + 2, nu * (nu + 2)) || !frac(eq, 1, 4 * (nu + 2)) {
            return Err(format!("first bound exponents at nu = {nu}"));
        }
        let [a, b] = bounds::theorem2_exponents(nu as u32);
        let e = 2 * nu * (nu + 1);
        if !frac(a.0, 1, 4 * (nu + 1))
            || !frac(a.1, e - 2 * nu - 1, e)
            || !frac(a.2, 1, 2 * nu)
            || !frac(a.3, 1, 4 * (nu + 1))
        {
            return Err(format!("second bound, first branch, nu = {nu}"));
        }
        if !frac(b.0, 1, nu) || !frac(b.1, 2 * nu - 1, 2 * nu) || !frac(b.2, 0, 1) || !frac(b.3, 1, 4 * nu) {
            return Err(format!("second bound, second branch, nu = {nu}"));
        }
    }

    let instances: std::collections::BTreeSet<&str> = rows.iter().map(|r| r.instance.as_str()).collect();
    if instances.len() < 30 {
        return Err(format!("only {} corpus instances", instances.len()));
    }
    let fixture = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/corpus_report.json");
    let committed = std::fs::read_to_string(&fixture).map_err(|e| format!("{}: {e}", fixture.display()))?;
    let fresh = to_json(&rows).map_err(|e| e.to_string())?;
    if fresh != committed {
        return Err("regenerated corpus report differs from the fixture".into());
    }
    Ok(format!("{} rows over {} instances, fixture byte-identical", rows.len(), instances.len()))
}

fn c10_sampled_discrepancy() -> Outcome {
    let mut n = 0;
    let mut slowest = Duration::ZERO;
    for e in corpus_entries().map_err(|e| e.to_string())? {
        let field = e.state.field();
        if field.order() > 121 {
            continue;
        }
        let mut s = e.state.clone();
        s.reset();
        let pts: Vec<Option<Vec<u64>>> = s
            .emit(&e.f, e.state.period().unwrap() as usize)
            .into_iter()
            .map(|o| match o {
                Output::Value(v) => Some(field.coords(v)),
                Output::Pole => None,
            })
            .collect();
        let p = field.characteristic();
        let start = Instant::now();
        let exact = discrepancy(p, &pts, None, BoxMode::All).map_err(|e| e.to_string())?;
        let el = start.elapsed();
        slowest = slowest.max(el);
        if el > Duration::from_secs(120) {
            return Err(format!("{}: exact mode took {el:?}", e.label));
        }
        for seed in [1, 2, 3] {
            let sampled = discrepancy(p, &pts, None, BoxMode::Sample { count: 64, seed }).map_err(|e| e.to_string())?;
            if sampled.value() > exact.value() {
                return Err(format!("{}: sampled {} > exact {}", e.label, sampled.value(), exact.value()));
            }
        }
        n += 1;
    }
    Ok(format!("{n} instances, slowest exact run {slowest:.1?}"))
}

fn main() -> ExitCode {
    let clock = Instant::now();
    let hasse = hasse_corpus();
    let build = clock.elapsed();
    let checks: [(&str, Box<dyn Fn() -> Outcome + '_>); 10] = [
        ("Hasse bound over all small curves", Box::new(|| c1_hasse(&hasse, build))),
        ("Frobenius characteristic polynomial", Box::new(c2_frobenius)),
        ("torsion cardinality", Box::new(|| torsion_lemma(LemmaId::L2))),
        ("annihilator existence", Box::new(|| torsion_lemma(LemmaId::L3))),
        ("explicit character sum bound", Box::new(|| c5_character_sum(&hasse))),
        ("representation partition identity", Box::new(c6_partition)),
        ("maximal period instance", Box::new(c7_max_period)),
        ("Berlekamp-Massey vs brute force", Box::new(c8_berlekamp_massey)),
        ("bound reporting and fixture", Box::new(c9_bound_reporting)),
        ("sampled vs exact discrepancy", Box::new(c10_sampled_discrepancy)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        match check() {
            Ok(msg) => println!("PASS {:>2} {name}: {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {msg}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
