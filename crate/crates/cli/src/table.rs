//! Result rows and their tab-separated rendering.

use std::fmt;
use std::io::Write;
use std::path::Path;

use ffdyn::ffarith::Q;

/// A measured or reference value: exact when possible.
#[derive(Debug, Clone, PartialEq)]
pub enum Num {
    Exact(Q),
    Float(f64),
}

impl Num {
    pub fn int(x: i128) -> Num {
        Num::Exact(Q::from_integer(x))
    }
    pub fn to_f64(&self) -> f64 {
        match self {
            Num::Exact(x) => *x.numer() as f64 / *x.denom() as f64,
            Num::Float(x) => *x,
        }
    }
    fn minus(&self, o: &Num) -> Num {
        match (self, o) {
            (Num::Exact(a), Num::Exact(b)) => Num::Exact(a - b),
            _ => Num::Float(self.to_f64() - o.to_f64()),
        }
    }
}

impl From<i128> for Num {
    fn from(x: i128) -> Self {
        Num::int(x)
    }
}
impl From<u128> for Num {
    fn from(x: u128) -> Self {
        Num::int(x as i128)
    }
}
impl From<usize> for Num {
    fn from(x: usize) -> Self {
        Num::int(x as i128)
    }
}
impl From<i64> for Num {
    fn from(x: i64) -> Self {
        Num::int(x as i128)
    }
}
impl From<Q> for Num {
    fn from(x: Q) -> Self {
        Num::Exact(x)
    }
}
impl From<f64> for Num {
    fn from(x: f64) -> Self {
        Num::Float(x)
    }
}

impl fmt::Display for Num {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Num::Exact(x) if x.is_integer() => write!(f, "{}", x.numer()),
            Num::Exact(x) => write!(f, "{}/{}", x.numer(), x.denom()),
            Num::Float(x) => write!(f, "{:.9}", x),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub experiment: String,
    pub anchor: &'static str,
    pub n: usize,
    pub q: u64,
    /// `key=value` pairs joined by `,`.
    pub params: String,
    pub measured: Num,
    pub reference: Option<Num>,
    pub pass: bool,
    pub note: String,
}

impl ResultRow {
    pub fn new(experiment: &str, anchor: &'static str, n: usize, q: u64) -> Self {
        ResultRow {
            experiment: experiment.to_string(),
            anchor,
            n,
            q,
            params: String::new(),
            measured: Num::int(0),
            reference: None,
            pass: true,
            note: String::new(),
        }
    }
    pub fn param(mut self, key: &str, value: impl fmt::Display) -> Self {
        if !self.params.is_empty() {
            self.params.push(',');
        }
        self.params.push_str(&format!("{}={}", key, value));
        self
    }
    pub fn measured(mut self, x: impl Into<Num>) -> Self {
        self.measured = x.into();
        self
    }
    pub fn reference(mut self, x: impl Into<Num>) -> Self {
        self.reference = Some(x.into());
        self
    }
    pub fn pass(mut self, ok: bool) -> Self {
        self.pass = ok;
        self
    }
    pub fn note(mut self, s: impl Into<String>) -> Self {
        self.note = s.into();
        self
    }
    /// `measured - reference` when a reference is present.
    pub fn residual(&self) -> Option<Num> {
        self.reference.as_ref().map(|r| self.measured.minus(r))
    }
}

pub const HEADER: &str = "experiment\tanchor\tn\tq\tparams\tmeasured\treference\tresidual\tpass\tnote";

fn clean(s: &str) -> String {
    s.replace(['\t', '\n'], " ")
}

/// Header, one line per row, and the trailing `# ` provenance line.
pub fn render_table(rows: &[ResultRow], provenance: &str) -> String {
    let mut out = String::from(HEADER);
    out.push('\n');
    for r in rows {
        let opt = |x: Option<Num>| x.map(|v| v.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            clean(&r.experiment),
            r.anchor,
            r.n,
            r.q,
            clean(&r.params),
            r.measured,
            opt(r.reference.clone()),
            opt(r.residual()),
            r.pass,
            clean(&r.note)
        ));
    }
    out.push_str(&format!("# {}\n", clean(provenance)));
    out
}

#[derive(Debug, thiserror::Error)]
pub enum EmitError {
    #[error("{0} exists and overwrite is disabled")]
    Exists(String),
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

pub fn emit_table(rows: &[ResultRow], provenance: &str, path: &Path, overwrite: bool) -> Result<(), EmitError> {
    let io = |source| EmitError::Io { path: path.display().to_string(), source };
    let text = render_table(rows, provenance);
    let mut file = if overwrite {
        std::fs::File::create(path).map_err(io)?
    } else {
        std::fs::OpenOptions::new().write(true).create_new(true).open(path).map_err(|e| {
            if e.kind() == std::io::ErrorKind::AlreadyExists {
                EmitError::Exists(path.display().to_string())
            } else {
                io(e)
            }
        })?
    };
    file.write_all(text.as_bytes()).map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_rows_give_header_only() {
        let t = render_table(&[], "ffdyn 0.1.0 seed=0");
        assert_eq!(t, format!("{}\n# ffdyn 0.1.0 seed=0\n", HEADER));
    }

    #[test]
    fn residual_and_formatting() {
        let r = ResultRow::new("counting", "lem:gauscounting", 1, 2)
            .param("t", "2^3")
            .measured(Num::int(15))
            .reference(Num::Exact(Q::new(16, 1)));
        assert_eq!(r.residual(), Some(Num::int(-1)));
        let t = render_table(&[r], "p");
        let line = t.lines().nth(1).unwrap();
        assert_eq!(line, "counting\tlem:gauscounting\t1\t2\tt=2^3\t15\t16\t-1\ttrue\t");
        assert_eq!(Num::Exact(Q::new(-1, 2)).to_string(), "-1/2");
        assert_eq!(Num::Float(0.5).to_string(), "0.500000000");
    }

    #[test]
    fn overwrite_protection() {
        let dir = std::env::temp_dir().join(format!("ffdyn-table-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join("t.tsv");
        let _ = std::fs::remove_file(&p);
        emit_table(&[], "a", &p, false).unwrap();
        assert!(matches!(emit_table(&[], "b", &p, false), Err(EmitError::Exists(_))));
        emit_table(&[], "c", &p, true).unwrap();
        assert!(std::fs::read_to_string(&p).unwrap().ends_with("# c\n"));
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
