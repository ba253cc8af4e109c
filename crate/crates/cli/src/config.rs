//! Flat `key = value` files: curve descriptions and run configurations.
//!
//! Blank lines and lines starting with `#` or `;` are ignored. A
//! `[section]` header prefixes the keys below it with `section.`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use endogen::analysis::discrepancy::BoxMode;
use endogen::{Curve, FiniteField};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub type KeyValues = BTreeMap<String, String>;

pub fn parse_kv(text: &str) -> CliResult<KeyValues> {
    let mut out = KeyValues::new();
    let mut section = String::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            section = format!("{}.", name.trim());
            continue;
        }
        let (k, v) =
            line.split_once('=').ok_or_else(|| CliError::Config(format!("line {}: expected key = value", no + 1)))?;
        let key = format!("{section}{}", k.trim());
        if out.insert(key.clone(), v.trim().to_string()).is_some() {
            return Err(CliError::Config(format!("line {}: duplicate key {key}", no + 1)));
        }
    }
    Ok(out)
}

pub fn read_kv(path: &Path) -> CliResult<KeyValues> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_kv(&text)
}

fn parse_num<T: std::str::FromStr>(key: &str, s: &str) -> CliResult<T> {
    s.trim().parse().map_err(|_| CliError::Config(format!("{key}: cannot parse {s:?}")))
}

pub fn parse_list<T: std::str::FromStr>(key: &str, s: &str) -> CliResult<Vec<T>> {
    let s = s.trim().trim_start_matches('[').trim_end_matches(']');
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(|x| parse_num(key, x)).collect()
}

fn required<'a>(kv: &'a KeyValues, key: &str) -> CliResult<&'a str> {
    kv.get(key).map(String::as_str).ok_or_else(|| CliError::Config(format!("missing key {key}")))
}

/// A curve file:
///
/// ```text
/// p = 5
/// k = 1                 # optional, default 1
/// modulus = 2,0         # optional, k coefficients, constant first
/// a = 0,0,0,1,1         # a1,a2,a3,a4,a6 as packed element indices
/// ```
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveSpec {
    pub p: u64,
    pub k: usize,
    pub modulus: Option<Vec<u64>>,
    pub a: [u64; 5],
}

impl CurveSpec {
    pub fn from_kv(kv: &KeyValues) -> CliResult<Self> {
        let p = parse_num("p", required(kv, "p")?)?;
        let k = kv.get("k").map(|s| parse_num("k", s)).transpose()?.unwrap_or(1);
        let modulus = kv.get("modulus").map(|s| parse_list("modulus", s)).transpose()?;
        let a: Vec<u64> = parse_list("a", required(kv, "a")?)?;
        let a: [u64; 5] = a
            .try_into()
            .map_err(|v: Vec<u64>| CliError::Config(format!("a: expected 5 coefficients, got {}", v.len())))?;
        Ok(CurveSpec { p, k, modulus, a })
    }

    pub fn from_curve(curve: &Curve) -> Self {
        let f = curve.field();
        CurveSpec {
            p: f.characteristic(),
            k: f.degree(),
            modulus: (f.degree() > 1).then(|| f.modulus().to_vec()),
            a: curve.coefficients().map(|c| c.index() as u64),
        }
    }

    pub fn build(&self) -> CliResult<Curve> {
        let field = Arc::new(FiniteField::new(self.p, self.k, self.modulus.as_deref())?);
        let q = field.order();
        if let Some(&bad) = self.a.iter().find(|&&c| c >= q) {
            return Err(CliError::Config(format!("coefficient index {bad} out of range for q = {q}")));
        }
        let a = self.a.map(|c| field.element(c));
        Ok(Curve::new(field, a)?)
    }

    pub fn render(&self) -> String {
        let mut s = format!("p = {}\nk = {}\n", self.p, self.k);
        if let Some(m) = &self.modulus {
            s += &format!("modulus = {}\n", join(m));
        }
        s += &format!("a = {}\n", join(&self.a));
        s
    }
}

pub fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

pub fn load_curve(path: &Path) -> CliResult<Curve> {
    CurveSpec::from_kv(&read_kv(path)?)?.build()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PointSpec {
    /// Packed indices of `x` and `y`.
    Coords(u64, u64),
    /// First point of exactly this order, in enumeration order.
    Order(u64),
}

pub fn parse_point(s: &str) -> CliResult<PointSpec> {
    if let Some(rest) = s.trim().strip_prefix("search:") {
        let l = rest
            .strip_prefix("order=")
            .ok_or_else(|| CliError::Config(format!("point: expected search:order=N, got {s:?}")))?;
        return Ok(PointSpec::Order(parse_num("point", l)?));
    }
    let v: Vec<u64> = parse_list("point", s)?;
    match v.as_slice() {
        [x, y] => Ok(PointSpec::Coords(*x, *y)),
        _ => Err(CliError::Config(format!("point: expected x,y, got {s:?}"))),
    }
}

pub fn parse_boxes(s: &str, seed: u64) -> CliResult<BoxMode> {
    match s.trim() {
        "all" => Ok(BoxMode::All),
        other => {
            let n = other
                .strip_prefix("sample:")
                .ok_or_else(|| CliError::Config(format!("boxes: expected all or sample:N, got {s:?}")))?;
            Ok(BoxMode::Sample { count: parse_num("boxes", n)?, seed })
        }
    }
}

/// Default seed of every run.
pub const DEFAULT_SEED: u64 = endogen::analysis::report::CORPUS_SEED;

/// A run configuration.
///
/// ```text
/// curve = e5.curve            # relative to the config file
/// point = search:order=9      # or x,y
/// tau = [1,1,1,1]             # x_num,x_den,y_num,y_den meaning x + y pi
/// observable = x
/// extension = 1
/// length = 0                  # 0 means one period
/// nu = 1,2,3
/// j = 1
/// eps = 0.01
/// boxes = all
/// seed = 7
/// stream = out.csv
/// report = out.json
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub curve: PathBuf,
    pub point: PointSpec,
    pub tau: [i64; 4],
    pub observable: String,
    pub extension: u32,
    pub length: usize,
    pub nu: Vec<u32>,
    pub j: u64,
    pub eps: f64,
    pub boxes: String,
    pub seed: u64,
    pub stream: PathBuf,
    pub report: PathBuf,
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let kv = read_kv(path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_kv(&kv, base)
    }

    pub fn from_kv(kv: &KeyValues, base: &Path) -> CliResult<Self> {
        const KEYS: [&str; 13] = [
            "curve",
            "point",
            "tau",
            "observable",
            "extension",
            "length",
            "nu",
            "j",
            "eps",
            "boxes",
            "seed",
            "stream",
            "report",
        ];
        if let Some(k) = kv.keys().find(|k| !KEYS.contains(&k.as_str())) {
            return Err(CliError::Config(format!("unknown key {k}")));
        }
        let get = |k: &str, d: &str| kv.get(k).cloned().unwrap_or_else(|| d.to_string());
        let tau: Vec<i64> = parse_list("tau", required(kv, "tau")?)?;
        let tau: [i64; 4] =
            tau.try_into().map_err(|_| CliError::Config("tau: expected [x_num,x_den,y_num,y_den]".into()))?;
        Ok(RunConfig {
            curve: base.join(required(kv, "curve")?),
            point: parse_point(required(kv, "point")?)?,
            tau,
            observable: get("observable", "x"),
            extension: parse_num("extension", &get("extension", "1"))?,
            length: parse_num("length", &get("length", "0"))?,
            nu: parse_list("nu", &get("nu", "1,2,3"))?,
            j: parse_num("j", &get("j", "1"))?,
            eps: parse_num("eps", &get("eps", "0.01"))?,
            boxes: get("boxes", "all"),
            seed: parse_num("seed", &get("seed", &DEFAULT_SEED.to_string()))?,
            stream: base.join(get("stream", "stream.csv")),
            report: base.join(get("report", "report.json")),
        })
    }

    /// SHA-256 over the effective settings and the curve file contents.
    pub fn hash(&self) -> CliResult<String> {
        let curve = fs::read(&self.curve).map_err(|e| CliError::io(&self.curve, e))?;
        let mut h = Sha256::new();
        let settings =
            format!(
            "point={:?}\ntau={:?}\nobservable={}\nextension={}\nlength={}\nnu={:?}\nj={}\neps={}\nboxes={}\nseed={}\n",
            self.point, self.tau, self.observable, self.extension, self.length, self.nu, self.j, self.eps, self.boxes,
            self.seed
        );
        h.update(settings.as_bytes());
        h.update(&curve);
        Ok(h.finalize().iter().map(|b| format!("{b:02x}")).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_and_comments() {
        let kv = parse_kv("# c\np = 5\n[out]\nreport = r.json\n; x\n").unwrap();
        assert_eq!(kv["p"], "5");
        assert_eq!(kv["out.report"], "r.json");
        assert!(parse_kv("p = 1\np = 2").is_err());
        assert!(parse_kv("nonsense").is_err());
    }

    #[test]
    fn curve_spec_roundtrip() {
        let spec = CurveSpec::from_kv(&parse_kv("p = 5\na = 0,0,0,1,1").unwrap()).unwrap();
        let curve = spec.build().unwrap();
        assert_eq!(curve.n_points(), 9);
        let again = CurveSpec::from_kv(&parse_kv(&spec.render()).unwrap()).unwrap();
        assert_eq!(again, spec);
    }

    #[test]
    fn point_and_boxes() {
        assert_eq!(parse_point("search:order=3").unwrap(), PointSpec::Order(3));
        assert_eq!(parse_point("1, 2").unwrap(), PointSpec::Coords(1, 2));
        assert!(parse_point("1").is_err());
        assert_eq!(parse_boxes("sample:10", 3).unwrap(), BoxMode::Sample { count: 10, seed: 3 });
        assert!(parse_boxes("some", 3).is_err());
    }
}
