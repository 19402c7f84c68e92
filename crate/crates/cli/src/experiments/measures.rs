use std::collections::BTreeMap;

use ffdyn::dynball::{dynamical_refine, entromino_check, entromino_mixture_check, entropy_masses, Anchors, FiniteMeasure};
use ffdyn::ffarith::{Poly, RatFunc, Q};
use ffdyn::orbit::{build_measure, build_x_t, interval_thin_mass, q_to_f64, window_compare, Family, MeasureKind, Observable};
use rand::Rng;

use super::{field, reject, Hooks, RunError};
use crate::config::ExperimentConfig;
use crate::exec::{par_map, task_rng};
use crate::table::{Num, ResultRow};

pub const ANCHOR_DECAY: &str = "lem:decaythin";
pub const ANCHOR_ENTROPY: &str = "lem:entromino";
pub const ANCHOR_EL: &str = "theo:EL";
pub const ANCHOR_EQUIDIST: &str = "theo:main";
pub const ANCHOR_WINDOW: &str = "lem:massmostoncompcore";

const TOL: f64 = 1e-9;
const COSET_BUDGET: usize = 4000;

/// Least-squares slope of `y` against `x`.
pub fn ls_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let (mx, my) = (sx / m, sy / m);
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Thin mass of `nu_{s,[k_s,1]}` for `s = (Y^d, ..., Y^d)` against
/// `eps = q^{-j}`: the log-log slope over the positive masses must be
/// within `1/2` of `n`, and the masses must not increase as `eps` shrinks.
pub fn mass_decay(cfg: &ExperimentConfig, _: &Hooks) -> Result<Vec<ResultRow>, RunError> {
    let f = field(cfg)?;
    let n = cfg.n;
    let default: Vec<usize> = (1..=4).map(|i| i * n).collect();
    let degrees = cfg.degrees_or(&default);
    if let Some(d) = degrees.iter().find(|&&d| d == 0 || d % n != 0) {
        return Err(reject("degrees", format!("deg s = {} is not a positive multiple of n = {}", d, n)));
    }
    let mut eps = cfg.eps.clone();
    eps.sort_unstable();
    let lq = (cfg.q as f64).ln();
    let rows = par_map(cfg.jobs, degrees, |_, d| -> Result<ResultRow, RunError> {
        let fam = Family::uniform(Poly::y_pow(d), n, &f)?;
        let k = fam.k_s();
        let masses: Vec<Q> = eps.iter().map(|&j| interval_thin_mass(&fam, &k, 1, j)).collect::<Result<_, _>>()?;
        let monotone = masses.windows(2).all(|w| w[1] <= w[0]);
        let pts: Vec<(f64, f64)> = eps
            .iter()
            .zip(&masses)
            .filter(|(_, m)| **m > Q::from_integer(0))
            .map(|(&j, m)| (-(j as f64) * lq, q_to_f64(*m).ln()))
            .collect();
        let slope = ls_slope(&pts);
        let zeros = masses.len() - pts.len();
        let text: Vec<String> = masses.iter().map(|m| format!("{}/{}", m.numer(), m.denom())).collect();
        let mut note = format!("masses={}", text.join(" "));
        if zeros > 0 {
            note.push_str(&format!(" zero_masses={}", zeros));
        }
        if slope.is_none() {
            note.push_str(" fewer than two positive masses");
        }
        let ok = slope.is_some_and(|s| (s - n as f64).abs() <= 0.5) && monotone;
        Ok(ResultRow::new("mass-decay", ANCHOR_DECAY, n, cfg.q)
            .param("deg_s", d)
            .param("k", "k_s")
            .measured(Num::Float(slope.unwrap_or(f64::NAN)))
            .reference(Num::Float(n as f64))
            .pass(ok)
            .note(note))
    });
    rows.into_iter().collect()
}

fn random_measure<R: Rng>(rng: &mut R, support: usize) -> FiniteMeasure<usize> {
    let size = rng.random_range(1..=support);
    let pts: Vec<usize> = (0..size).map(|_| rng.random_range(0..support)).collect();
    let w: Vec<f64> = (0..size).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = w.iter().sum();
    FiniteMeasure::new(pts, w.iter().map(|x| x / total).collect()).expect("normalized weights")
}

/// Concavity checks on random measures, then `(1/M) H(P^M)` for the
/// uniform measure on the wedge atoms and the `(m, l)` partition.
pub fn entropy_trend(cfg: &ExperimentConfig, _: &Hooks) -> Result<Vec<ResultRow>, RunError> {
    let f = field(cfg)?;
    let n = cfg.n;
    let q = f.q();
    let samples = cfg.samples_or(200);
    let checks = par_map(cfg.jobs, (0..samples).collect(), |i, _| -> Result<(bool, bool), RunError> {
        let mut rng = task_rng(cfg.seed, i);
        let support = rng.random_range(2..=24);
        let mu = random_measure(&mut rng, support);
        let map: Vec<usize> = (0..support).map(|_| rng.random_range(0..support)).collect();
        let cells = rng.random_range(1..=4);
        let cell_of: Vec<usize> = (0..support).map(|_| rng.random_range(0..cells)).collect();
        let big_n = rng.random_range(1..=6);
        let m = rng.random_range(1..=big_n);
        let a = entromino_check(&mu, |x| map[*x], |x| cell_of[*x], cells, m, big_n, q)?.ok;
        let parts: Vec<(f64, FiniteMeasure<usize>)> = {
            let k = rng.random_range(1..=4);
            let w: Vec<f64> = (0..k).map(|_| rng.random_range(0.05..1.0)).collect();
            let total: f64 = w.iter().sum();
            w.into_iter().map(|x| (x / total, random_measure(&mut rng, support))).collect()
        };
        let b = entromino_mixture_check(&parts, |x| cell_of[*x], q)?.ok;
        Ok((a, b))
    });
    let checks: Vec<(bool, bool)> = checks.into_iter().collect::<Result<_, _>>()?;
    let first = checks.iter().filter(|c| c.0).count();
    let second = checks.iter().filter(|c| c.1).count();
    let mut rows = vec![
        ResultRow::new("entropy-trend", ANCHOR_ENTROPY, n, cfg.q)
            .param("inequality", "refinement")
            .measured(first)
            .reference(samples)
            .pass(first == samples),
        ResultRow::new("entropy-trend", ANCHOR_ENTROPY, n, cfg.q)
            .param("inequality", "mixture")
            .measured(second)
            .reference(samples)
            .pass(second == samples),
    ];

    let d = cfg.degrees_or(&[2 * n])[0];
    if d == 0 || d % n != 0 {
        return Err(reject("degrees", format!("deg s = {} is not a positive multiple of n = {}", d, n)));
    }
    let fam = match &cfg.s {
        Some(s) => Family::new(s.clone(), &f)?,
        None => Family::uniform(Poly::y_pow(d), n, &f)?,
    };
    let mu = build_measure(MeasureKind::Diamond(&fam))?;
    let max_m = 6;
    let mut anchors = Anchors::new(cfg.m, cfg.ell[0], COSET_BUDGET)?;
    let mut words = Vec::with_capacity(mu.len());
    for a in &mu.atoms {
        words.push(dynamical_refine(&a.lattice, max_m, &mut anchors)?);
    }
    let w = 1.0 / mu.len() as f64;
    let ceiling = (n * (n - 1)) as f64;
    let mut prev = f64::NEG_INFINITY;
    for m in 1..=max_m {
        let mut mass: BTreeMap<&[_], f64> = BTreeMap::new();
        for word in &words {
            *mass.entry(&word[..m]).or_insert(0.0) += w;
        }
        let h = entropy_masses(mass.into_values(), q) / m as f64;
        let ok = h <= ceiling + TOL && h >= prev - TOL;
        prev = h;
        rows.push(
            ResultRow::new("entropy-trend", ANCHOR_EL, n, cfg.q)
                .param("s", fam.s().iter().map(|p| p.pretty(&f)).collect::<Vec<_>>().join(" "))
                .param("m", cfg.m)
                .param("ell", cfg.ell[0])
                .param("M", m)
                .measured(Num::Float(h))
                .reference(Num::Float(ceiling))
                .pass(ok)
                .note(format!("atoms={} cosets={}", mu.len(), anchors.len())),
        );
    }
    Ok(rows)
}

/// Distribution of `n log_q sys` under `nu_s^Diamond`.
fn systole_cdf(fam: &Family) -> Result<BTreeMap<i64, f64>, RunError> {
    let mu = build_measure(MeasureKind::Diamond(fam))?;
    let mut dist = BTreeMap::new();
    for a in &mu.atoms {
        *dist.entry(a.lattice.systole().n_log).or_insert(0.0) += q_to_f64(a.weight);
    }
    Ok(dist)
}

fn sup_cdf_distance(a: &BTreeMap<i64, f64>, b: &BTreeMap<i64, f64>) -> f64 {
    let keys: std::collections::BTreeSet<i64> = a.keys().chain(b.keys()).copied().collect();
    let (mut ca, mut cb, mut best) = (0.0, 0.0, 0.0f64);
    for k in keys {
        ca += a.get(&k).copied().unwrap_or(0.0);
        cb += b.get(&k).copied().unwrap_or(0.0);
        best = best.max((ca - cb).abs());
    }
    best
}

pub fn equidist_cauchy(cfg: &ExperimentConfig, _: &Hooks) -> Result<Vec<ResultRow>, RunError> {
    let f = field(cfg)?;
    let n = cfg.n;
    let degrees = cfg.degrees_or(&[8, 12]);
    let (d1, d2) = (degrees[0], degrees[degrees.len() - 1]);
    if d1 == d2 || [d1, d2].iter().any(|&d| d == 0 || d % n != 0) {
        return Err(reject("degrees", "need two distinct positive multiples of n"));
    }
    let cdfs = par_map(cfg.jobs, vec![d1, d2], |_, d| systole_cdf(&Family::uniform(Poly::y_pow(d), n, &f)?));
    let cdfs: Vec<BTreeMap<i64, f64>> = cdfs.into_iter().collect::<Result<_, _>>()?;
    let dist = sup_cdf_distance(&cdfs[0], &cdfs[1]);
    let mut rows = vec![ResultRow::new("equidist-cauchy", ANCHOR_EQUIDIST, n, cfg.q)
        .param("deg_s", format!("{} vs {}", d1, d2))
        .measured(Num::Float(dist))
        .reference(Num::Float(0.05))
        .pass(dist < 0.05)
        .note("sup distance of systole CDFs")];

    // window gaps for x_t, t = (Y^-tau, ..., Y^-tau), with C_tau = tau |gap|
    let taus: Vec<i64> = (8..=24).collect();
    let gaps = par_map(cfg.jobs, taus.clone(), |_, tau| -> Result<f64, RunError> {
        let t = vec![RatFunc::y_pow(-tau); n - 1];
        let x = build_x_t(&t, &f)?;
        let r = window_compare(&x, &Observable::systole(), cfg.m)?;
        Ok(r.gap.abs() * r.tau as f64)
    });
    let gaps: Vec<f64> = gaps.into_iter().collect::<Result<_, _>>()?;
    for (tau, c) in taus.iter().zip(&gaps) {
        rows.push(
            ResultRow::new("equidist-cauchy", ANCHOR_WINDOW, n, cfg.q)
                .param("tau", tau)
                .param("m", cfg.m)
                .measured(Num::Float(*c))
                .note("tau * |gap|"),
        );
    }
    let half = gaps.len() / 2;
    let lo = gaps[..half].iter().copied().fold(0.0, f64::max);
    let hi = gaps[half..].iter().copied().fold(0.0, f64::max);
    let stable = if lo == 0.0 || hi == 0.0 { lo == hi } else { hi / lo <= 2.0 && lo / hi <= 2.0 };
    rows.push(
        ResultRow::new("equidist-cauchy", ANCHOR_WINDOW, n, cfg.q)
            .param("stability", format!("C[{}..{}] vs C[{}..{}]", taus[0], taus[half - 1], taus[half], taus[taus.len() - 1]))
            .measured(Num::Float(if lo > 0.0 { hi / lo } else { 1.0 }))
            .reference(Num::Float(1.0))
            .pass(stable)
            .note(format!("C_lo={:.6} C_hi={:.6}", lo, hi)),
    );
    Ok(rows)
}
