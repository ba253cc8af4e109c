//! One function per subcommand. Each returns the text to print; files are
//! written only where the command says so.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use endogen::analysis::discrepancy::BoxMode;
use endogen::analysis::lemmas::{lemma_corpus, verify_lemma, LemmaId, LemmaInstance};
use endogen::analysis::report::{analyze, corpus_reports, to_csv, to_json, AnalyzeOptions};
use endogen::generator::stream_csv;
use endogen::{determine_end_ring, Endomorphism, Error, GeneratorState, Observable, PointAction};
use serde_json::json;

use crate::config::{load_curve, parse_boxes, CurveSpec, PointSpec, RunConfig};
use crate::error::{CliError, CliResult};
use crate::search::{search, Criteria};

fn write(path: &Path, contents: &str) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

pub fn curve_info(path: &Path) -> CliResult<String> {
    let curve = load_curve(path)?;
    let ring = determine_end_ring(&curve)?;
    let mut s = format!(
        "#E={}, t={}, D_K={}, v={}, u={}\n",
        curve.n_points(),
        curve.trace(),
        curve.d_k(),
        curve.v(),
        ring.conductor()
    );
    let _ = writeln!(s, "curve: {curve}");
    let _ = writeln!(s, "ordinary: {}", curve.is_ordinary());
    let _ = writeln!(s, "t^2 - 4q = {}^2 * ({})", curve.v(), curve.d_k());
    if ring.is_certified() {
        let _ =
            writeln!(s, "End(E): order of conductor {} (certified), D_E = {}", ring.conductor(), ring.discriminant());
    } else {
        let _ = writeln!(
            s,
            "End(E): not certified, conductor divides {} and is a multiple of {}",
            curve.v(),
            ring.conductor()
        );
    }
    let (d1, d2) = curve.group().torsion_structure(curve.n_points());
    let _ = writeln!(s, "E(F_q) = Z/{d1} x Z/{d2}");
    Ok(s)
}

pub fn run_search(c: &Criteria, out: Option<&Path>) -> CliResult<String> {
    let found = search(c)?;
    let list: Vec<_> = found.iter().map(|c| c.to_json()).collect();
    let mut text = serde_json::to_string_pretty(&list).expect("json values serialize");
    text.push('\n');
    if let Some(dir) = out {
        for (i, cand) in found.iter().enumerate() {
            let mut body = format!("# {} criteria {} l={}\n", cand.curve, c.want, c.l);
            body += &CurveSpec::from_curve(&cand.curve).render();
            write(&dir.join(format!("candidate_{i:03}.curve")), &body)?;
        }
        write(&dir.join("candidates.json"), &text)?;
    }
    Ok(text)
}

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub nu: Option<Vec<u32>>,
    pub boxes: Option<String>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut RunConfig) {
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(n) = &self.nu {
            cfg.nu = n.clone();
        }
        if let Some(b) = &self.boxes {
            cfg.boxes = b.clone();
        }
        if let Some(dir) = &self.out {
            cfg.stream = dir.join(cfg.stream.file_name().unwrap_or("stream.csv".as_ref()));
            cfg.report = dir.join(cfg.report.file_name().unwrap_or("report.json".as_ref()));
        }
    }
}

pub struct Run {
    pub state: GeneratorState,
    pub f: Observable,
    pub label: String,
}

pub fn build_run(cfg: &RunConfig) -> CliResult<Run> {
    let curve = load_curve(&cfg.curve)?;
    let ring = determine_end_ring(&curve)?;
    ring.require_certified()?;
    let n = curve.order_over(cfg.extension);
    let action = Arc::new(PointAction::new(&curve, &ring, cfg.extension, n)?);
    let g = &action.extension().group;
    let field = g.field();
    let p = match cfg.point {
        PointSpec::Coords(x, y) => {
            if x >= field.order() || y >= field.order() {
                return Err(CliError::Config("point coordinates out of range".into()));
            }
            g.point(field.element(x), field.element(y))?
        }
        PointSpec::Order(l) => g
            .points()
            .find(|&p| g.order_dividing(p, n) == l)
            .ok_or_else(|| CliError::Config(format!("no point of order {l}")))?,
    };
    let tau = Endomorphism::from_fractions(cfg.tau)?.to_order(&ring)?;
    let f: Observable = cfg.observable.parse()?;
    let state = GeneratorState::new(action, tau, p).map_err(|e| match e {
        Error::NotInvertible => {
            CliError::Config("sequence not purely periodic: tau shares a factor with ann(P)".into())
        }
        other => other.into(),
    })?;
    let label =
        format!("{curve} m={} P={:?} tau={tau} f={f}", cfg.extension, p.coords().map(|(x, y)| (x.index(), y.index())));
    Ok(Run { state, f, label })
}

pub fn generate(config: &Path, ov: &Overrides) -> CliResult<String> {
    let mut cfg = RunConfig::load(config)?;
    ov.apply(&mut cfg);
    let run = build_run(&cfg)?;
    let period = run.state.period().expect("purely periodic");
    let len = if cfg.length == 0 { period as usize } else { cfg.length };
    let body = format!("# config sha256={}\n{}", cfg.hash()?, stream_csv(&run.state, &run.f, len));
    write(&cfg.stream, &body)?;
    Ok(format!("{}: {len} terms, period {period}, wrote {}\n", run.label, cfg.stream.display()))
}

pub fn run_analyze(config: &Path, ov: &Overrides) -> CliResult<String> {
    let mut cfg = RunConfig::load(config)?;
    ov.apply(&mut cfg);
    let run = build_run(&cfg)?;
    let opts = AnalyzeOptions {
        j: cfg.j,
        nus: cfg.nu.clone(),
        boxes: parse_boxes(&cfg.boxes, cfg.seed)?,
        eps: cfg.eps,
        seed: cfg.seed,
        timed: false,
    };
    let rows = analyze(&run.state, &run.f, &run.label, &opts)?;
    let doc = json!({ "config_hash": cfg.hash()?, "rows": rows });
    let mut text = serde_json::to_string_pretty(&doc).expect("reports serialize");
    text.push('\n');
    write(&cfg.report, &text)?;
    let mut s = String::new();
    for r in &rows {
        let _ = writeln!(
            s,
            "{:<18} {:<11} nu={} measured={:.6} bound={:.6}{}",
            r.quantity,
            r.bound_name,
            r.nu,
            r.measured,
            r.bound,
            if r.vacuous { " (vacuous)" } else { "" }
        );
    }
    let _ = writeln!(s, "wrote {}", cfg.report.display());
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Lemmas,
    All,
}

impl std::str::FromStr for Suite {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "lemmas" => Ok(Suite::Lemmas),
            "all" => Ok(Suite::All),
            _ => Err(CliError::Config(format!("unknown suite {s:?}"))),
        }
    }
}

/// Runs the lemma corpus; `inject_fault` appends an instance with a
/// malformed ideal.
pub fn verify(suite: Suite, budget: usize, inject_fault: bool) -> CliResult<String> {
    let mut corpus = lemma_corpus(budget)?;
    if inject_fault {
        let curve = CurveSpec { p: 5, k: 1, modulus: None, a: [0, 0, 0, 1, 1] }.build()?;
        corpus.push((LemmaId::L2, LemmaInstance::Torsion { curve, ideal: (4, 1, 3) }));
    }
    let mut out = String::new();
    if corpus.is_empty() {
        out.push_str("warning: 0 instances\n");
    }
    let mut failed = Vec::new();
    for (id, inst) in &corpus {
        let r = verify_lemma(*id, inst)?;
        let status = if r.passed() { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "{status} {id} {} ({} checks)", r.instance, r.checks);
        if !r.passed() {
            failed.push(format!("{id} {}: {}", r.instance, r.failures.join("; ")));
        }
    }
    if suite == Suite::All && budget > 0 {
        let rows = corpus_reports(crate::config::DEFAULT_SEED)?;
        let mut bad = 0;
        for r in &rows {
            let t = r.params.period;
            let ok = match r.quantity.as_str() {
                "linear_complexity" => r.measured >= 0.0 && r.measured <= t,
                _ => r.measured >= 0.0 && r.measured <= t + 1e-9,
            };
            if !ok {
                bad += 1;
                failed.push(format!("{} {}: measured {} exceeds T = {t}", r.quantity, r.instance, r.measured));
            }
        }
        let _ = writeln!(out, "{} structural checks on the report corpus, {bad} failed", rows.len());
    }
    let _ = writeln!(out, "{} instances, {} failed", corpus.len(), failed.len());
    if failed.is_empty() {
        Ok(out)
    } else {
        Err(CliError::Verification(format!("{out}{}", failed.join("\n"))))
    }
}

pub fn report(out: &Path, seed: u64, csv: bool) -> CliResult<String> {
    let rows = corpus_reports(seed)?;
    let text = if csv { to_csv(&rows) } else { to_json(&rows)? };
    write(out, &text)?;
    let vacuous = rows.iter().filter(|r| r.vacuous).count();
    Ok(format!("{} rows ({vacuous} vacuous), wrote {}\n", rows.len(), out.display()))
}

/// Parses `--boxes` early so a bad value fails before any work.
pub fn check_boxes(s: &str) -> CliResult<BoxMode> {
    parse_boxes(s, 0)
}
