//! Line-oriented `key=value` configuration. Precedence: built-in defaults,
//! then the config file, then command-line flags.

use std::path::{Path, PathBuf};

use ffdyn::ffarith::{check_family, Fq, Poly, Q};
use num_rational::Ratio;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("unknown key `{0}` (known keys: {known})", known = KEYS.join(", "))]
    UnknownKey(String),
    #[error("line `{0}` is not of the form key=value")]
    Syntax(String),
    #[error("key `{key}`: {msg}")]
    Invalid { key: String, msg: String },
    #[error("cannot read {path}: {msg}")]
    Io { path: String, msg: String },
}

fn invalid(key: &str, msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { key: key.to_string(), msg: msg.into() }
}

pub const KEYS: &[&str] =
    &["q", "n", "s", "degrees", "eps", "N", "ell", "m", "kappa", "samples", "seed", "jobs", "out", "overwrite"];

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub q: u64,
    pub n: usize,
    /// Family `s = (s_2, ..., s_n)`; a single polynomial means `(s, ..., s)`.
    pub s: Option<Vec<Poly>>,
    /// Degree sweep; experiments fall back to their own default when empty.
    pub degrees: Vec<usize>,
    /// `eps = q^{-j}` for each `j` listed.
    pub eps: Vec<i64>,
    pub big_n: Vec<usize>,
    pub ell: Vec<i64>,
    pub m: i64,
    pub kappa: Q,
    pub samples: Option<usize>,
    pub seed: u64,
    pub jobs: usize,
    pub out: Option<PathBuf>,
    pub overwrite: bool,
    raw_s: Option<String>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            q: 2,
            n: 2,
            s: None,
            degrees: Vec::new(),
            eps: vec![1, 2, 3, 4],
            big_n: vec![0],
            ell: vec![1],
            m: 1,
            kappa: Ratio::new(1, 2),
            samples: None,
            seed: 0,
            jobs: 1,
            out: None,
            overwrite: false,
            raw_s: None,
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, ConfigError> {
    v.trim().parse().map_err(|_| invalid(key, format!("`{}` is not a valid number", v)))
}

/// `a,b,c` or an inclusive range `a..b`.
fn parse_list(key: &str, v: &str) -> Result<Vec<i64>, ConfigError> {
    let v = v.trim();
    if v.is_empty() {
        return Ok(Vec::new());
    }
    if let Some((a, b)) = v.split_once("..") {
        let (a, b): (i64, i64) = (parse_num(key, a)?, parse_num(key, b)?);
        if a > b {
            return Err(invalid(key, format!("empty range {}", v)));
        }
        return Ok((a..=b).collect());
    }
    v.split(',').map(|x| parse_num(key, x)).collect()
}

fn parse_ulist(key: &str, v: &str) -> Result<Vec<usize>, ConfigError> {
    parse_list(key, v)?
        .into_iter()
        .map(|x| usize::try_from(x).map_err(|_| invalid(key, format!("{} is negative", x))))
        .collect()
}

fn parse_bool(key: &str, v: &str) -> Result<bool, ConfigError> {
    match v.trim() {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(invalid(key, format!("`{}` is not a boolean", v))),
    }
}

impl ExperimentConfig {
    /// Applies one `key=value` assignment without cross-key validation.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let v = value.trim();
        match key {
            "q" => self.q = parse_num(key, v)?,
            "n" => self.n = parse_num(key, v)?,
            "s" => self.raw_s = if v.is_empty() { None } else { Some(v.to_string()) },
            "degrees" => self.degrees = parse_ulist(key, v)?,
            "eps" => self.eps = parse_list(key, v)?,
            "N" => self.big_n = parse_ulist(key, v)?,
            "ell" => self.ell = parse_list(key, v)?,
            "m" => self.m = parse_num(key, v)?,
            "kappa" => {
                self.kappa = match v.split_once('/') {
                    Some((a, b)) => {
                        let d: i128 = parse_num(key, b)?;
                        if d == 0 {
                            return Err(invalid(key, "zero denominator"));
                        }
                        Ratio::new(parse_num(key, a)?, d)
                    }
                    None => Ratio::from_integer(parse_num(key, v)?),
                }
            }
            "samples" => self.samples = Some(parse_num(key, v)?),
            "seed" => self.seed = parse_num(key, v)?,
            "jobs" => self.jobs = parse_num(key, v)?,
            "out" => self.out = if v.is_empty() { None } else { Some(PathBuf::from(v)) },
            "overwrite" => self.overwrite = parse_bool(key, v)?,
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    /// Applies every assignment of a config text. Entries are separated by
    /// newlines or `;`, and `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("");
            for entry in line.split(';') {
                let entry = entry.trim();
                if entry.is_empty() {
                    continue;
                }
                let (k, v) = entry.split_once('=').ok_or_else(|| ConfigError::Syntax(entry.to_string()))?;
                self.set(k.trim(), v)?;
            }
        }
        Ok(())
    }

    /// Checks every key against the preconditions it feeds into.
    pub fn validate(&mut self) -> Result<(), ConfigError> {
        let f = self.field()?;
        if !(2..=6).contains(&self.n) {
            return Err(invalid("n", format!("n = {} outside 2..=6", self.n)));
        }
        if self.jobs == 0 {
            return Err(invalid("jobs", "must be at least 1"));
        }
        if self.eps.iter().any(|&j| j < 1) {
            return Err(invalid("eps", "exponents j of eps = q^-j must be >= 1"));
        }
        if self.ell.iter().any(|&l| l < 1) {
            return Err(invalid("ell", "levels must be >= 1"));
        }
        if self.m < 0 {
            return Err(invalid("m", "must be >= 0"));
        }
        if self.kappa <= Ratio::from_integer(0) {
            return Err(invalid("kappa", "must be positive"));
        }
        if self.samples == Some(0) {
            return Err(invalid("samples", "must be positive"));
        }
        self.s = match &self.raw_s {
            None => None,
            Some(raw) => {
                let mut polys = Vec::new();
                for part in raw.split(',') {
                    let p = Poly::parse_pretty(part.trim(), &f).map_err(|e| invalid("s", e.to_string()))?;
                    polys.push(p);
                }
                if polys.len() == 1 {
                    polys = vec![polys[0].clone(); self.n - 1];
                }
                if polys.len() != self.n - 1 {
                    return Err(invalid("s", format!("{} polynomials given for n = {}", polys.len(), self.n)));
                }
                check_family(&polys, &f).map_err(|e| invalid("s", e.to_string()))?;
                Some(polys)
            }
        };
        Ok(())
    }

    pub fn field(&self) -> Result<Fq, ConfigError> {
        Fq::new(self.q).map_err(|e| invalid("q", e.to_string()))
    }

    pub fn degrees_or(&self, default: &[usize]) -> Vec<usize> {
        if self.degrees.is_empty() {
            default.to_vec()
        } else {
            self.degrees.clone()
        }
    }

    pub fn samples_or(&self, default: usize) -> usize {
        self.samples.unwrap_or(default)
    }

    /// Canonical one-line echo, used in table provenance.
    pub fn echo(&self) -> String {
        let list = |v: &[i64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let ulist = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let mut parts = vec![format!("q={}", self.q), format!("n={}", self.n)];
        if let Some(s) = &self.raw_s {
            parts.push(format!("s={}", s));
        }
        if !self.degrees.is_empty() {
            parts.push(format!("degrees={}", ulist(&self.degrees)));
        }
        parts.push(format!("eps={}", list(&self.eps)));
        parts.push(format!("N={}", ulist(&self.big_n)));
        parts.push(format!("ell={}", list(&self.ell)));
        parts.push(format!("m={}", self.m));
        parts.push(format!("kappa={}", self.kappa));
        if let Some(s) = self.samples {
            parts.push(format!("samples={}", s));
        }
        parts.push(format!("seed={}", self.seed));
        parts.join(";")
    }
}

/// Defaults overridden by a config text.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let mut c = ExperimentConfig::default();
    c.apply_text(text)?;
    c.validate()?;
    Ok(c)
}

pub fn read_config(path: &Path) -> Result<String, ConfigError> {
    std::fs::read_to_string(path).map_err(|e| ConfigError::Io { path: path.display().to_string(), msg: e.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_gives_defaults() {
        let c = parse_config("").unwrap();
        assert_eq!((c.q, c.n, c.seed), (2, 2, 0));
        assert_eq!(c, ExperimentConfig::default());
    }

    #[test]
    fn rejects_bad_values() {
        assert!(matches!(parse_config("q=6"), Err(ConfigError::Invalid { key, .. }) if key == "q"));
        assert!(matches!(parse_config("s=Y^3;n=2"), Err(ConfigError::Invalid { key, .. }) if key == "s"));
        assert!(matches!(parse_config("colour=red"), Err(ConfigError::UnknownKey(k)) if k == "colour"));
        assert!(matches!(parse_config("q"), Err(ConfigError::Syntax(_))));
        assert!(parse_config("eps=0").is_err());
        assert!(parse_config("kappa=1/0").is_err());
        let msg = parse_config("colour=red").unwrap_err().to_string();
        assert!(msg.contains("colour") && msg.contains("kappa"));
    }

    #[test]
    fn parses_lists_and_families() {
        let c = parse_config("q=3\nn=3 # comment\ns=Y^3;degrees=3..6;eps=1,2;kappa=1/3").unwrap();
        assert_eq!(c.degrees, vec![3, 4, 5, 6]);
        assert_eq!(c.eps, vec![1, 2]);
        assert_eq!(c.s.as_ref().unwrap().len(), 2);
        assert_eq!(c.kappa, Ratio::new(1, 3));
        let c = parse_config("n=3;s=Y,Y^3").unwrap();
        assert_eq!(c.s.unwrap()[0], Poly::y_pow(1));
        assert!(parse_config("n=3;s=Y+1,Y^3").is_err());
        assert!(parse_config("n=3;s=Y,Y,Y^3").is_err());
    }

    #[test]
    fn flags_override_file() {
        let mut c = ExperimentConfig::default();
        c.apply_text("q=3;seed=4").unwrap();
        c.set("seed", "9").unwrap();
        c.validate().unwrap();
        assert_eq!((c.q, c.seed), (3, 9));
        assert_eq!(c.echo(), "q=3;n=2;eps=1,2,3,4;N=0;ell=1;m=1;kappa=1/2;seed=9");
    }
}
