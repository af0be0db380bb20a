//! INI scenarios.

use ini::Ini;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

/// Malformed scenario, with the place it went wrong.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemaError {
    pub file: String,
    pub line: Option<usize>,
    pub section: Option<String>,
    pub key: Option<String>,
    pub msg: String,
}

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.file)?;
        if let Some(l) = self.line {
            write!(f, ":{l}")?;
        }
        match (&self.section, &self.key) {
            (Some(s), Some(k)) => write!(f, ": [{s}] {k}")?,
            (Some(s), None) => write!(f, ": [{s}]")?,
            _ => {}
        }
        write!(f, ": {}", self.msg)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    /// relative, for quadrature-based identities
    pub petersson: f64,
    /// absolute, for local integrals
    pub local: f64,
    /// p-adic digits of agreement
    pub padic_digits: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Budget {
    pub precision_digits: u32,
    pub padic_precision: u32,
    pub qexp_bound: usize,
    pub lambda_degree: usize,
    pub max_qexp_bound: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Scenario {
    pub form: String,
    pub d: i64,
    pub p: i64,
    pub a: i64,
    pub lambda: i64,
    pub c_lambda: u32,
    pub nu_order: i64,
    pub nu_exp: i64,
    pub weights: Vec<i64>,
    pub tolerance: Tolerances,
    pub budget: Budget,
    pub identities: Vec<String>,
    pub euler_identities: Vec<String>,
    pub x_nodes: usize,
    pub y_nodes: usize,
    pub local_primes: Vec<i64>,
    pub local_draws: usize,
    pub local_vmax: i64,
    pub cm_fields: Vec<i64>,
    pub seed: u64,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            form: "eta2_12".into(),
            d: 7,
            p: 11,
            a: 7,
            lambda: 19,
            c_lambda: 1,
            nu_order: 5,
            nu_exp: 1,
            weights: vec![7, 17, 27],
            tolerance: Tolerances { petersson: 1e-4, local: 1e-10, padic_digits: 8 },
            budget: Budget { precision_digits: 15, padic_precision: 8, qexp_bound: 150, lambda_degree: 8, max_qexp_bound: 2000 },
            identities: vec!["scaling".into(), "self-translate".into(), "adjoint-to-Tp".into(), "atkin-lehner".into()],
            euler_identities: vec![
                "euler-denominator".into(),
                "euler-numerator-prime-to-p".into(),
                "euler-numerator-p-part-1".into(),
                "euler-numerator-p-part-ge2".into(),
            ],
            x_nodes: 40,
            y_nodes: 20,
            local_primes: vec![3, 5, 7],
            local_draws: 25,
            local_vmax: 80,
            cm_fields: vec![3, 7],
            seed: 1,
        }
    }
}

const KEYS: &[(&str, &[&str])] = &[
    ("form", &["source"]),
    ("field", &["d"]),
    ("prime", &["p"]),
    ("xi", &["a"]),
    ("aux", &["lambda", "c_lambda", "nu_order", "nu_exp"]),
    ("weights", &["m"]),
    ("tolerance", &["petersson", "local", "padic_digits"]),
    ("budget", &["precision_digits", "padic_precision", "qexp_bound", "lambda_degree", "max_qexp_bound"]),
    ("petersson", &["identities", "euler", "x_nodes", "y_nodes"]),
    ("local", &["primes", "draws", "vmax"]),
    ("cm", &["fields"]),
    ("seed", &["seed"]),
];

/// Line of `[section]` or of `key` inside it, 1-based.
fn locate(text: &str, section: &str, key: Option<&str>) -> Option<usize> {
    let mut cur: Option<String> = None;
    for (i, raw) in text.lines().enumerate() {
        let l = raw.trim();
        if l.starts_with('[') {
            cur = Some(l.trim_start_matches('[').trim_end_matches(']').trim().to_string());
            if key.is_none() && cur.as_deref() == Some(section) {
                return Some(i + 1);
            }
            continue;
        }
        if let (Some(k), Some(c)) = (key, cur.as_deref()) {
            if c == section {
                if let Some((lhs, _)) = l.split_once('=') {
                    if lhs.trim() == k {
                        return Some(i + 1);
                    }
                }
            }
        }
    }
    None
}

struct Reader<'a> {
    file: &'a str,
    text: &'a str,
    ini: Ini,
}

impl Reader<'_> {
    fn err(&self, section: &str, key: Option<&str>, msg: String) -> SchemaError {
        SchemaError {
            file: self.file.to_string(),
            line: locate(self.text, section, key),
            section: Some(section.to_string()),
            key: key.map(str::to_string),
            msg,
        }
    }
    fn raw(&self, section: &str, key: &str) -> Option<String> {
        self.ini.section(Some(section)).and_then(|s| s.get(key)).map(|v| v.trim().to_string())
    }
    fn parse<T: std::str::FromStr>(&self, section: &str, key: &str, what: &str, into: &mut T) -> Result<(), SchemaError> {
        if let Some(v) = self.raw(section, key) {
            *into = v.parse().map_err(|_| self.err(section, Some(key), format!("expected {what}, got '{v}'")))?;
        }
        Ok(())
    }
    fn list<T: std::str::FromStr>(&self, section: &str, key: &str, what: &str, into: &mut Vec<T>) -> Result<(), SchemaError> {
        if let Some(v) = self.raw(section, key) {
            let mut out = Vec::new();
            for item in v.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                out.push(item.parse().map_err(|_| self.err(section, Some(key), format!("expected a list of {what}, bad item '{item}'")))?);
            }
            if out.is_empty() {
                return Err(self.err(section, Some(key), "empty list".into()));
            }
            *into = out;
        }
        Ok(())
    }
}

impl Scenario {
    pub fn from_path(path: &Path) -> Result<Self, SchemaError> {
        let file = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|e| SchemaError { file: file.clone(), line: None, section: None, key: None, msg: e.to_string() })?;
        let mut s = Self::parse(&text, &file)?;
        // relative newform paths resolve against the scenario's directory
        let src = PathBuf::from(&s.form);
        if s.form.contains('/') || s.form.ends_with(".txt") {
            if src.is_relative() {
                if let Some(dir) = path.parent() {
                    s.form = dir.join(src).display().to_string();
                }
            }
        }
        Ok(s)
    }

    pub fn parse(text: &str, file: &str) -> Result<Self, SchemaError> {
        let ini = Ini::load_from_str(text).map_err(|e| SchemaError { file: file.into(), line: Some(e.line), section: None, key: None, msg: e.msg.to_string() })?;
        let r = Reader { file, text, ini };
        for (sec, props) in r.ini.iter() {
            let Some(sec) = sec else {
                if let Some((k, _)) = props.iter().next() {
                    return Err(SchemaError { file: file.into(), line: locate_top(text, k), section: None, key: Some(k.into()), msg: "key outside any section".into() });
                }
                continue;
            };
            let Some((_, keys)) = KEYS.iter().find(|(s, _)| *s == sec) else {
                return Err(r.err(sec, None, "unknown section".into()));
            };
            for (k, _) in props.iter() {
                if !keys.contains(&k) {
                    return Err(r.err(sec, Some(k), format!("unknown key (allowed: {})", keys.join(", "))));
                }
            }
        }
        let mut s = Scenario::default();
        if let Some(v) = r.raw("form", "source") {
            if v.is_empty() {
                return Err(r.err("form", Some("source"), "empty form source".into()));
            }
            s.form = v;
        }
        r.parse("field", "d", "a positive integer", &mut s.d)?;
        r.parse("prime", "p", "an integer", &mut s.p)?;
        r.parse("xi", "a", "an integer", &mut s.a)?;
        r.parse("aux", "lambda", "an integer", &mut s.lambda)?;
        r.parse("aux", "c_lambda", "a non-negative integer", &mut s.c_lambda)?;
        r.parse("aux", "nu_order", "an integer", &mut s.nu_order)?;
        r.parse("aux", "nu_exp", "an integer", &mut s.nu_exp)?;
        // default weights follow a and p unless listed
        s.weights = vec![s.a, s.a + (s.p - 1), s.a + 2 * (s.p - 1)];
        r.list("weights", "m", "integers", &mut s.weights)?;
        r.parse("tolerance", "petersson", "a number", &mut s.tolerance.petersson)?;
        r.parse("tolerance", "local", "a number", &mut s.tolerance.local)?;
        r.parse("tolerance", "padic_digits", "a non-negative integer", &mut s.tolerance.padic_digits)?;
        r.parse("budget", "precision_digits", "a non-negative integer", &mut s.budget.precision_digits)?;
        r.parse("budget", "padic_precision", "a non-negative integer", &mut s.budget.padic_precision)?;
        r.parse("budget", "qexp_bound", "a non-negative integer", &mut s.budget.qexp_bound)?;
        r.parse("budget", "lambda_degree", "a non-negative integer", &mut s.budget.lambda_degree)?;
        r.parse("budget", "max_qexp_bound", "a non-negative integer", &mut s.budget.max_qexp_bound)?;
        r.list("petersson", "identities", "identity names", &mut s.identities)?;
        r.list("petersson", "euler", "identity names", &mut s.euler_identities)?;
        r.parse("petersson", "x_nodes", "a positive integer", &mut s.x_nodes)?;
        r.parse("petersson", "y_nodes", "a positive integer", &mut s.y_nodes)?;
        for (key, list) in [("identities", &s.identities), ("euler", &s.euler_identities)] {
            for name in list {
                if cmpadic::petersson::Identity::parse(name).is_none() {
                    return Err(r.err("petersson", Some(key), format!("unknown identity '{name}'")));
                }
            }
        }
        r.list("local", "primes", "integers", &mut s.local_primes)?;
        r.parse("local", "draws", "a non-negative integer", &mut s.local_draws)?;
        r.parse("local", "vmax", "an integer", &mut s.local_vmax)?;
        r.list("cm", "fields", "integers", &mut s.cm_fields)?;
        r.parse("seed", "seed", "an unsigned integer", &mut s.seed)?;
        for (sec, key, ok) in [
            ("tolerance", "petersson", s.tolerance.petersson > 0.0 && s.tolerance.petersson.is_finite()),
            ("tolerance", "local", s.tolerance.local > 0.0 && s.tolerance.local.is_finite()),
            ("petersson", "x_nodes", s.x_nodes > 0),
            ("petersson", "y_nodes", s.y_nodes > 0),
            ("budget", "qexp_bound", s.budget.qexp_bound > 0),
            ("budget", "lambda_degree", s.budget.lambda_degree > 0),
            ("field", "d", s.d > 0),
        ] {
            if !ok {
                return Err(r.err(sec, Some(key), "value out of range".into()));
            }
        }
        Ok(s)
    }

    /// Stable JSON echo; hashed into the report.
    pub fn echo(&self) -> BTreeMap<String, serde_json::Value> {
        match serde_json::to_value(self) {
            Ok(serde_json::Value::Object(m)) => m.into_iter().collect(),
            _ => BTreeMap::new(),
        }
    }
}

fn locate_top(text: &str, key: &str) -> Option<usize> {
    text.lines().position(|l| l.split_once('=').map(|(k, _)| k.trim() == key).unwrap_or(false)).map(|i| i + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_overrides() {
        let s = Scenario::parse("[prime]\np = 13\n[xi]\na = 5\n", "t.ini").unwrap();
        assert_eq!(s.p, 13);
        assert_eq!(s.weights, vec![5, 17, 29]);
        let s = Scenario::parse("[weights]\nm = 7, 17\n", "t.ini").unwrap();
        assert_eq!(s.weights, vec![7, 17]);
    }

    #[test]
    fn errors_carry_location() {
        let e = Scenario::parse("[field]\nd = 7\n\n[aux]\nlambda = nineteen\n", "t.ini").unwrap_err();
        assert_eq!(e.line, Some(5));
        assert_eq!(e.key.as_deref(), Some("lambda"));
        let e = Scenario::parse("[field]\nd = 7\n[bogus]\nx = 1\n", "t.ini").unwrap_err();
        assert_eq!(e.line, Some(3));
        let e = Scenario::parse("[field]\ndd = 7\n", "t.ini").unwrap_err();
        assert_eq!(e.line, Some(2));
        let e = Scenario::parse("[petersson]\nidentities = scaling, nonsense\n", "t.ini").unwrap_err();
        assert!(e.msg.contains("nonsense"));
        let e = Scenario::parse("[field\nd = 7\n", "t.ini").unwrap_err();
        assert!(e.line.is_some());
        assert!(e.to_string().starts_with("t.ini:"));
    }
}
