//! Named experiments. Each returns deterministic rows for a fixed config.

mod arith;
mod balls;
mod lattices;
mod measures;

use ffdyn::ffarith::{Fq, Poly};

use crate::config::{ConfigError, ExperimentConfig};
use crate::table::ResultRow;

/// Replaceable entry points, used to inject faults in self-tests.
#[derive(Clone, Copy)]
pub struct Hooks {
    pub euler_phi: fn(&Poly, &Fq) -> ffdyn::Result<u128>,
}

impl Default for Hooks {
    fn default() -> Self {
        Hooks { euler_phi: ffdyn::ffarith::euler_phi }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("unknown experiment `{0}`; available: {list}", list = names().join(", "))]
    UnknownName(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Compute(String),
}

impl From<ffdyn::Error> for RunError {
    fn from(e: ffdyn::Error) -> Self {
        RunError::Compute(e.to_string())
    }
}

pub type RunFn = fn(&ExperimentConfig, &Hooks) -> Result<Vec<ResultRow>, RunError>;

pub struct Experiment {
    pub name: &'static str,
    pub anchor: &'static str,
    pub summary: &'static str,
    pub run: RunFn,
}

pub const EXPERIMENTS: &[Experiment] = &[
    Experiment {
        name: "counting",
        anchor: arith::ANCHOR_COUNTING,
        summary: "ideal counts up to q^d against q^{d+1}/(q-1)",
        run: arith::counting,
    },
    Experiment {
        name: "euler",
        anchor: arith::ANCHOR_EULER,
        summary: "Euler function against a gcd census of residues",
        run: arith::euler,
    },
    Experiment {
        name: "coprime",
        anchor: arith::ANCHOR_COPRIME,
        summary: "coprime ideal counts, fitted error constant per degree window",
        run: arith::coprime,
    },
    Experiment {
        name: "systole-oracle",
        anchor: lattices::ANCHOR_SYSTOLE,
        summary: "reduction-based systole against exhaustive search",
        run: lattices::systole_oracle,
    },
    Experiment {
        name: "orbit-invariants",
        anchor: lattices::ANCHOR_ORBIT,
        summary: "directional systoles and coordinate-lattice type of every x_t",
        run: lattices::orbit_invariants,
    },
    Experiment {
        name: "treecase",
        anchor: lattices::ANCHOR_TREECASE,
        summary: "truncated covolume, continued fraction height and length for n = 2",
        run: lattices::treecase,
    },
    Experiment {
        name: "diamond-census",
        anchor: lattices::ANCHOR_DIAMOND,
        summary: "compact core and fundamental wedge cardinalities",
        run: lattices::diamond_census,
    },
    Experiment {
        name: "a-invariance",
        anchor: lattices::ANCHOR_AINV,
        summary: "symmetric difference of the wedge and its a-translate",
        run: lattices::a_invariance,
    },
    Experiment {
        name: "mass-decay",
        anchor: measures::ANCHOR_DECAY,
        summary: "exact thin-part mass against eps, log-log slope",
        run: measures::mass_decay,
    },
    Experiment {
        name: "ball-props",
        anchor: balls::ANCHOR_BALLS,
        summary: "closure, conjugation, coset, systole and cover properties of B_{l,N}",
        run: balls::ball_props,
    },
    Experiment {
        name: "latpoint-bound",
        anchor: balls::ANCHOR_LATPOINT,
        summary: "family points in one dynamical ball against the counting bound",
        run: balls::latpoint_bound,
    },
    Experiment {
        name: "entropy-trend",
        anchor: measures::ANCHOR_ENTROPY,
        summary: "concavity inequalities and dynamical entropy of wedge measures",
        run: measures::entropy_trend,
    },
    Experiment {
        name: "equidist-cauchy",
        anchor: measures::ANCHOR_EQUIDIST,
        summary: "systole distributions across degrees and window gaps",
        run: measures::equidist_cauchy,
    },
];

pub fn names() -> Vec<&'static str> {
    EXPERIMENTS.iter().map(|e| e.name).collect()
}

pub fn find(name: &str) -> Option<&'static Experiment> {
    EXPERIMENTS.iter().find(|e| e.name == name)
}

pub fn run_experiment(name: &str, cfg: &ExperimentConfig) -> Result<Vec<ResultRow>, RunError> {
    run_with_hooks(name, cfg, &Hooks::default())
}

pub fn run_with_hooks(name: &str, cfg: &ExperimentConfig, hooks: &Hooks) -> Result<Vec<ResultRow>, RunError> {
    let e = find(name).ok_or_else(|| RunError::UnknownName(name.to_string()))?;
    let mut cfg = cfg.clone();
    cfg.validate()?;
    (e.run)(&cfg, hooks)
}

/// Rejects a config value for one experiment.
pub(crate) fn reject(key: &str, msg: impl Into<String>) -> RunError {
    RunError::Config(ConfigError::Invalid { key: key.to_string(), msg: msg.into() })
}

pub(crate) fn field(cfg: &ExperimentConfig) -> Result<Fq, RunError> {
    Ok(cfg.field()?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_name_lists_available() {
        let e = run_experiment("nope", &ExperimentConfig::default()).unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("treecase") && msg.contains("mass-decay"));
    }

    #[test]
    fn names_are_unique_and_anchored() {
        let mut n = names();
        n.sort();
        n.dedup();
        assert_eq!(n.len(), EXPERIMENTS.len());
        assert!(EXPERIMENTS.iter().all(|e| !e.anchor.is_empty()));
    }
}
