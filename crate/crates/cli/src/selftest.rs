//! Every module's invariants at small parameters.

use crate::config::parse_config;
use crate::experiments::{run_with_hooks, Hooks};

#[derive(Debug, Clone)]
pub struct Check {
    pub experiment: &'static str,
    pub config: &'static str,
    pub anchor: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct Summary {
    pub checks: Vec<Check>,
}

impl Summary {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }
}

/// `(experiment, config, anchor filter)`; with a filter only the rows under
/// that anchor count.
pub const PLAN: &[(&str, &str, Option<&str>)] = &[
    ("counting", "q=2;degrees=0..8", None),
    ("counting", "q=3;degrees=0..6", None),
    ("euler", "q=2;degrees=0..5", None),
    ("euler", "q=3;degrees=0..3", None),
    ("coprime", "q=2;degrees=1..6", None),
    ("systole-oracle", "n=2;q=3;samples=40", None),
    ("systole-oracle", "n=3;q=2;samples=20;degrees=2", None),
    ("orbit-invariants", "n=2;degrees=2,4", None),
    ("orbit-invariants", "n=3;degrees=3", None),
    ("treecase", "q=2;samples=40", None),
    ("treecase", "q=5;samples=20;degrees=1..6", None),
    ("diamond-census", "n=3;degrees=1..20", None),
    ("a-invariance", "n=2;degrees=2,4,6,8,10,12", None),
    ("mass-decay", "n=2;degrees=4,6,8", None),
    ("ball-props", "n=2;samples=60;ell=2;N=1", None),
    ("ball-props", "n=3;samples=20", None),
    ("latpoint-bound", "n=2;degrees=2,4", None),
    ("entropy-trend", "samples=60;degrees=4", Some("lem:entromino")),
];

/// Runs [`PLAN`] with the given hooks; a check fails on any failing row or
/// on an error.
pub fn selftest(hooks: &Hooks, jobs: usize) -> Summary {
    let mut checks = Vec::new();
    for &(experiment, config, only) in PLAN {
        let anchor = crate::experiments::find(experiment).map(|e| e.anchor.to_string()).unwrap_or_default();
        let outcome = parse_config(config).map_err(|e| e.to_string()).and_then(|mut cfg| {
            cfg.jobs = jobs;
            run_with_hooks(experiment, &cfg, hooks).map_err(|e| e.to_string())
        });
        let check = match outcome {
            Ok(rows) => match rows.iter().filter(|r| only.map_or(true, |a| r.anchor == a)).find(|r| !r.pass) {
                None => Check { experiment, config, anchor, passed: true, detail: format!("{} rows", rows.len()) },
                Some(r) => Check {
                    experiment,
                    config,
                    anchor: r.anchor.to_string(),
                    passed: false,
                    detail: format!("{} measured={} {}", r.params, r.measured, r.note),
                },
            },
            Err(e) => Check { experiment, config, anchor, passed: false, detail: e },
        };
        checks.push(check);
    }
    Summary { checks }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ffdyn::ffarith::{euler_phi, Fq, Poly};

    fn faulty_phi(s: &Poly, f: &Fq) -> ffdyn::Result<u128> {
        let v = euler_phi(s, f)?;
        Ok(if s.deg() == Some(3) { v + 1 } else { v })
    }

    #[test]
    fn injected_fault_is_named() {
        let hooks = Hooks { euler_phi: faulty_phi };
        let cfg = parse_config("degrees=0..4").unwrap();
        let rows = run_with_hooks("euler", &cfg, &hooks).unwrap();
        let bad = rows.iter().find(|r| !r.pass).unwrap();
        assert_eq!(bad.anchor, "eq:defiEulerfunct");
        assert!(bad.params.contains("deg=3"));
    }

    #[test]
    fn clean_selftest_passes() {
        let s = selftest(&Hooks::default(), 1);
        assert!(s.passed(), "{:?}", s.first_failure());
    }
}
