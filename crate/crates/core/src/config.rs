//! Flat `key=value` run configuration: one key per line, `#` comments.
//!
//! Every key is checked against a fixed table when it is set, so a config
//! that loads is a config whose values are in range.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::fbm::{HurstParam, Method};
use crate::spectral::Preset;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    /// Open interval `(0, 1)`.
    Unit,
    Positive,
    /// `> 1`.
    AboveOne,
    NonNegative,
    Negative,
    Finite,
    Count { min: u64 },
    Seed,
    PositiveList,
    NegativeList,
    Method,
    Preset,
    Lemma,
}

const KEYS: &[(&str, Kind)] = &[
    ("a0", Kind::Finite),
    ("alpha", Kind::Unit),
    ("delta", Kind::Positive),
    ("dt", Kind::Positive),
    ("dt_fast", Kind::Positive),
    ("eps", Kind::Positive),
    ("eps_grid", Kind::PositiveList),
    ("gamma", Kind::Unit),
    ("halvings", Kind::Count { min: 1 }),
    ("hurst", Kind::Unit),
    ("kappa", Kind::NonNegative),
    ("lambda", Kind::NegativeList),
    ("lemma", Kind::Lemma),
    ("margin", Kind::Positive),
    ("method", Kind::Method),
    ("modes", Kind::Count { min: 4 }),
    ("noise_modes", Kind::Count { min: 1 }),
    ("nu", Kind::Finite),
    ("preset", Kind::Preset),
    ("replicas", Kind::Count { min: 1 }),
    ("rho", Kind::AboveOne),
    ("samples", Kind::Count { min: 2 }),
    ("seed", Kind::Seed),
    ("seed_base", Kind::Seed),
    ("steps", Kind::Count { min: 1 }),
    ("stride", Kind::Count { min: 1 }),
    ("t0", Kind::Positive),
    ("zeta_margin", Kind::Unit),
];

pub const LEMMAS: &[&str] = &["a1", "a2", "a3", "identity", "young"];

fn kind_of(key: &str) -> Result<Kind> {
    KEYS.iter()
        .find(|(k, _)| *k == key)
        .map(|(_, kind)| *kind)
        .ok_or_else(|| Error::Config(format!("unknown key `{key}`")))
}

fn number(key: &str, raw: &str) -> Result<f64> {
    let v: f64 = raw
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("`{key}` expects a number, got `{raw}`")))?;
    if !v.is_finite() {
        return Err(Error::Config(format!("`{key}` must be finite, got `{raw}`")));
    }
    Ok(v)
}

fn validate(key: &str, kind: Kind, raw: &str) -> Result<()> {
    let bad = |what: &str| Err(Error::Config(format!("`{key}` must be {what}, got `{raw}`")));
    match kind {
        Kind::Unit => {
            let v = number(key, raw)?;
            if !(v > 0.0 && v < 1.0) {
                return bad("in the open interval (0, 1)");
            }
        }
        Kind::Positive => {
            if number(key, raw)? <= 0.0 {
                return bad("> 0");
            }
        }
        Kind::AboveOne => {
            if number(key, raw)? <= 1.0 {
                return bad("> 1");
            }
        }
        Kind::NonNegative => {
            if number(key, raw)? < 0.0 {
                return bad(">= 0");
            }
        }
        Kind::Negative => {
            if number(key, raw)? >= 0.0 {
                return bad("< 0");
            }
        }
        Kind::Finite => {
            number(key, raw)?;
        }
        Kind::Count { min } => match raw.trim().parse::<u64>() {
            Ok(v) if v >= min => {}
            _ => return bad(&format!("an integer >= {min}")),
        },
        Kind::Seed => {
            if raw.trim().parse::<u64>().is_err() {
                return bad("a nonnegative integer");
            }
        }
        Kind::PositiveList | Kind::NegativeList => {
            let inner = if kind == Kind::PositiveList { Kind::Positive } else { Kind::Negative };
            let items: Vec<&str> = raw.split(',').collect();
            if items.iter().any(|s| s.trim().is_empty()) {
                return bad("a comma-separated list of numbers");
            }
            for item in items {
                validate(key, inner, item)?;
            }
        }
        Kind::Method => {
            raw.trim().parse::<Method>().map_err(|e| Error::Config(format!("`{key}`: {e}")))?;
        }
        Kind::Preset => {
            raw.trim().parse::<Preset>().map_err(|e| Error::Config(format!("`{key}`: {e}")))?;
        }
        Kind::Lemma => {
            if !LEMMAS.contains(&raw.trim()) {
                return bad(&format!("one of {}", LEMMAS.join("|")));
            }
        }
    }
    Ok(())
}

/// Validated key/value map. Iteration order (and so the manifest text) is
/// sorted by key.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunConfig {
    values: BTreeMap<String, String>,
}

impl RunConfig {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected key=value, got `{line}`", no + 1))
            })?;
            cfg.set(k.trim(), v.trim())
                .map_err(|e| Error::Config(format!("line {}: {e}", no + 1)))?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let kind = kind_of(key)?;
        validate(key, kind, value)?;
        self.values.insert(key.to_string(), value.trim().to_string());
        Ok(())
    }

    /// Sets `key` unless already present.
    pub fn set_default(&mut self, key: &str, value: &str) -> Result<()> {
        if !self.values.contains_key(key) {
            self.set(key, value)?;
        }
        Ok(())
    }

    pub fn contains(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    pub fn raw(&self, key: &str) -> Result<&str> {
        self.values
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| Error::Config(format!("missing key `{key}`")))
    }

    pub fn f64(&self, key: &str) -> Result<f64> {
        number(key, self.raw(key)?)
    }

    pub fn usize(&self, key: &str) -> Result<usize> {
        self.raw(key)?.parse().map_err(|_| Error::Config(format!("`{key}` is not an integer")))
    }

    pub fn u64(&self, key: &str) -> Result<u64> {
        self.raw(key)?.parse().map_err(|_| Error::Config(format!("`{key}` is not an integer")))
    }

    pub fn list(&self, key: &str) -> Result<Vec<f64>> {
        self.raw(key)?.split(',').map(|s| number(key, s)).collect()
    }

    pub fn hurst(&self) -> Result<HurstParam> {
        HurstParam::new(self.f64("hurst")?)
    }

    pub fn method(&self) -> Result<Method> {
        self.raw("method")?.parse()
    }

    pub fn preset(&self) -> Result<Preset> {
        self.raw("preset")?.parse()
    }

    /// Keys to keep; anything else present is an error for this command.
    pub fn restrict(&self, allowed: &[&str]) -> Result<()> {
        match self.values.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(Error::Config(format!("key `{k}` does not apply to this command"))),
            None => Ok(()),
        }
    }

    /// `key=value` lines, sorted; [`RunConfig::parse`] reads them back.
    pub fn to_manifest(&self, command: &str) -> String {
        let mut out = format!("# ampeq {command}\n");
        for (k, v) in &self.values {
            let _ = writeln!(out, "{k}={v}");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let text = "# comment\nhurst = 0.7\neps_grid=0.2,0.1 # trailing\n\nmodes=32\nseed=5\n";
        let cfg = RunConfig::parse(text).unwrap();
        assert_eq!(cfg.hurst().unwrap().value(), 0.7);
        assert_eq!(cfg.list("eps_grid").unwrap(), vec![0.2, 0.1]);
        let again = RunConfig::parse(&cfg.to_manifest("x")).unwrap();
        assert_eq!(cfg, again);
    }

    #[test]
    fn rejects_unknown_and_out_of_range() {
        assert!(RunConfig::parse("colour=blue").is_err());
        for bad in [
            "hurst=1.0",
            "hurst=0",
            "eps=-0.1",
            "modes=3",
            "rho=1",
            "eps_grid=0.2,,0.1",
            "method=fast",
            "lambda=1",
            "seed=-1",
            "hurst=nan",
        ] {
            let err = RunConfig::parse(bad).unwrap_err();
            assert!(matches!(err, Error::Config(_)), "{bad}");
        }
        let msg = RunConfig::parse("hurst=1.0").unwrap_err().to_string();
        assert!(msg.contains("(0, 1)"), "{msg}");
    }

    #[test]
    fn missing_separator() {
        assert!(RunConfig::parse("hurst 0.5").is_err());
    }

    #[test]
    fn defaults_do_not_override() {
        let mut cfg = RunConfig::parse("modes=8").unwrap();
        cfg.set_default("modes", "32").unwrap();
        cfg.set_default("nu", "1").unwrap();
        assert_eq!(cfg.usize("modes").unwrap(), 8);
        assert_eq!(cfg.f64("nu").unwrap(), 1.0);
    }

    #[test]
    fn restrict_flags_foreign_keys() {
        let cfg = RunConfig::parse("hurst=0.5\nlemma=a1").unwrap();
        assert!(cfg.restrict(&["hurst", "lemma"]).is_ok());
        assert!(cfg.restrict(&["hurst"]).is_err());
    }
}
