use ffdyn::cf2::treecase_report;
use ffdyn::ffarith::{Fq, Poly, RatFunc};
use ffdyn::latcore::{Lattice, MatK, SmithType};
use ffdyn::orbit::{a_invariance_defect, build_x_t, coordinate_sublattice, delta_x, directional_systoles, Family};
use rand::Rng;

use super::{field, reject, Hooks, RunError};
use crate::config::ExperimentConfig;
use crate::exec::{par_map, task_rng};
use crate::table::{Num, ResultRow};

pub const ANCHOR_SYSTOLE: &str = "eq:defisys";
pub const ANCHOR_ORBIT: &str = "prop:descripxt";
pub const ANCHOR_TREECASE: &str = "eq:quadrupleq";
pub const ANCHOR_DIAMOND: &str = "eq:initem1_5:descripxt";
pub const ANCHOR_CORE: &str = "prop:propriinvar";
pub const ANCHOR_AINV: &str = "lem:nuaaainvar";

pub fn random_poly<R: Rng>(rng: &mut R, max_deg: usize, q: u32) -> Poly {
    Poly::from_coeffs((0..=max_deg).map(|_| rng.random_range(0..q)).collect())
}

pub fn random_monic<R: Rng>(rng: &mut R, deg: usize, q: u32) -> Poly {
    let mut c: Vec<u32> = (0..deg).map(|_| rng.random_range(0..q)).collect();
    c.push(1);
    Poly::from_coeffs(c)
}

/// Random nonsingular basis with entries `P / Y^e`, `deg P <= max_deg`,
/// `0 <= e <= 2`.
pub fn random_lattice<R: Rng>(rng: &mut R, n: usize, max_deg: usize, f: &Fq) -> Lattice {
    loop {
        let mut b = MatK::zero(n);
        for i in 0..n {
            for j in 0..n {
                let p = random_poly(rng, max_deg, f.q());
                let e = rng.random_range(0..=2usize);
                b.set(i, j, RatFunc::new(p, Poly::y_pow(e), f).unwrap());
            }
        }
        if let Ok(l) = Lattice::new(b, f) {
            return l;
        }
    }
}

pub fn systole_oracle(cfg: &ExperimentConfig, _: &Hooks) -> Result<Vec<ResultRow>, RunError> {
    let f = field(cfg)?;
    let samples = cfg.samples_or(200);
    let max_deg = cfg.degrees_or(&[4]).into_iter().max().unwrap();
    let n = cfg.n;
    let outcomes = par_map(cfg.jobs, (0..samples).collect(), |i, _| {
        let mut rng = task_rng(cfg.seed, i);
        let l = random_lattice(&mut rng, n, max_deg, &f);
        match l.svp_bruteforce(50_000_000) {
            Ok(v) => (v == l.min_log_norm(), String::new()),
            Err(e) => (false, e.to_string()),
        }
    });
    let agree = outcomes.iter().filter(|o| o.0).count();
    let note = outcomes.iter().position(|o| !o.0).map(|i| format!("first mismatch at sample {} {}", i, outcomes[i].1));
    Ok(vec![ResultRow::new("systole-oracle", ANCHOR_SYSTOLE, n, cfg.q)
        .param("samples", samples)
        .param("max_deg", max_deg)
        .measured(agree)
        .reference(samples)
        .pass(agree == samples)
        .note(note.unwrap_or_default())])
}

/// Families with `s_* = Y^d` or `Y^{d-1}(Y+1)` in several shapes, with at
/// most `cap` points.
fn families(n: usize, d: usize, f: &Fq, cap: u128) -> Vec<Family> {
    let y = |k: usize| Poly::y_pow(k);
    let mixed = |k: usize| y(k - 1).mul(&Poly::from_coeffs(vec![1, 1]), f);
    let mut shapes: Vec<Vec<Poly>> = vec![vec![y(d); n - 1], vec![mixed(d); n - 1]];
    if n > 2 {
        let mut s = vec![y(d / 2); n - 2];
        s.push(y(d));
        shapes.push(s);
        let mut s = vec![Poly::from_coeffs(vec![1, 1]); n - 2];
        s.push(mixed(d));
        shapes.push(s);
    }
    shapes
        .into_iter()
        .filter_map(|s| Family::new(s, f).ok())
        .filter(|fam| fam.card_lambda().map_or(false, |c| c <= cap))
        .collect()
}

fn describe(fam: &Family) -> String {
    let f = fam.field();
    fam.s().iter().map(|p| p.pretty(f)).collect::<Vec<_>>().join(",")
}

pub fn orbit_invariants(cfg: &ExperimentConfig, _: &Hooks) -> Result<Vec<ResultRow>, RunError> {
    let f = field(cfg)?;
    let n = cfg.n;
    let fams: Vec<Family> = match &cfg.s {
        Some(s) => vec![Family::new(s.clone(), &f)?],
        None => cfg
            .degrees_or(&[2, 4, 6])
            .into_iter()
            .filter(|d| d % n == 0 && *d > 0)
            .flat_map(|d| families(n, d, &f, 5000))
            .collect(),
    };
    if fams.is_empty() {
        return Err(reject("degrees", format!("no degree is a positive multiple of n = {}", n)));
    }
    let rows = par_map(cfg.jobs, fams, |_, fam| -> Result<ResultRow, RunError> {
        let d = fam.d();
        let mut profile = vec![0i64; n];
        profile[0] = d;
        let mut ty = vec![Poly::one(); n - 1];
        ty.push(fam.s_star().monic(&f));
        let ty = SmithType(ty);
        let lam = fam.lambda();
        let mut ok = 0usize;
        let mut bad = None;
        for t in &lam {
            let x = build_x_t(t, &f)?;
            let (sys, tau) = directional_systoles(&x);
            let coo = coordinate_sublattice(&x)?;
            let good = sys == profile && tau == d && coo.smith_type()? == ty;
            if good {
                ok += 1;
            } else if bad.is_none() {
                bad = Some(format!("t={} sys={:?}", t.iter().map(|x| x.to_text(&f)).collect::<Vec<_>>().join(";"), sys));
            }
        }
        Ok(ResultRow::new("orbit-invariants", ANCHOR_ORBIT, n, cfg.q)
            .param("s", describe(&fam))
            .measured(ok)
            .reference(lam.len())
            .pass(ok == lam.len())
            .note(bad.unwrap_or_default()))
    });
    rows.into_iter().collect()
}

pub fn treecase(cfg: &ExperimentConfig, _: &Hooks) -> Result<Vec<ResultRow>, RunError> {
    let f = field(cfg)?;
    let samples = cfg.samples_or(100);
    let degrees = cfg.degrees_or(&(1..=12).collect::<Vec<_>>());
    if degrees.contains(&0) {
        return Err(reject("degrees", "deg s must be positive"));
    }
    let out = par_map(cfg.jobs, (0..samples).collect(), |i, _| -> Result<(bool, usize), RunError> {
        let mut rng = task_rng(cfg.seed, i);
        let d = degrees[rng.random_range(0..degrees.len())];
        let s = random_monic(&mut rng, d, f.q());
        let r = loop {
            let r = random_poly(&mut rng, d - 1, f.q());
            if r.gcd(&s, &f)?.is_one() {
                break r;
            }
        };
        Ok((treecase_report(&r, &s, &f)?.agree, d))
    });
    let out: Vec<(bool, usize)> = out.into_iter().collect::<Result<_, _>>()?;
    let agree = out.iter().filter(|o| o.0).count();
    let max_deg = out.iter().map(|o| o.1).max().unwrap_or(0);
    Ok(vec![ResultRow::new("treecase", ANCHOR_TREECASE, 2, cfg.q)
        .param("pairs", samples)
        .param("max_deg", max_deg)
        .measured(agree)
        .reference(samples)
        .pass(agree == samples)])
}

/// `(P + 1, ..., P + 1, P, ..., P)` with `tau = nP + Q`.
fn quasicentered_profile(n: usize, tau: i64) -> Vec<i64> {
    let (p, r) = (tau.div_euclid(n as i64), tau.rem_euclid(n as i64));
    (0..n as i64).map(|i| if i < r { p + 1 } else { p }).collect()
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

pub fn diamond_census(cfg: &ExperimentConfig, _: &Hooks) -> Result<Vec<ResultRow>, RunError> {
    let f = field(cfg)?;
    let n = cfg.n;
    let taus = cfg.degrees_or(&(1..=60).collect::<Vec<_>>());
    if taus.contains(&0) {
        return Err(reject("degrees", "tau must be positive"));
    }
    let mut rows = Vec::new();
    for &tau in &taus {
        let prof = quasicentered_profile(n, tau as i64);
        let diag: Vec<RatFunc> = prof.iter().map(|&s| RatFunc::y_pow(s)).collect();
        let x = Lattice::new(MatK::diag(&diag), &f)?;
        let card = delta_x(&x).len();
        let t = tau as f64;
        let ratio = card as f64 * factorial(n - 1) / t.powi(n as i32 - 1);
        let ok = directional_systoles(&x).0 == prof && (ratio - 1.0).abs() <= 5.0 / t;
        rows.push(
            ResultRow::new("diamond-census", ANCHOR_CORE, n, cfg.q)
                .param("tau", tau)
                .measured(Num::Float(ratio))
                .reference(Num::Float(1.0))
                .pass(ok)
                .note(format!("card={} tolerance={:.6}", card, 5.0 / t)),
        );
    }
    for &d in taus.iter().filter(|&&d| d % n == 0) {
        let fam = Family::uniform(Poly::y_pow(d), n, &f)?;
        let card = fam.diamond().len();
        let t = d as f64;
        let ratio = card as f64 * factorial(n) / t.powi(n as i32 - 1);
        let tol = 2.0 * n as f64 / t;
        rows.push(
            ResultRow::new("diamond-census", ANCHOR_DIAMOND, n, cfg.q)
                .param("deg_s", d)
                .measured(Num::Float(ratio))
                .reference(Num::Float(1.0))
                .pass((ratio - 1.0).abs() <= tol)
                .note(format!("card={} tolerance={:.6}", card, tol)),
        );
    }
    Ok(rows)
}

pub fn a_invariance(cfg: &ExperimentConfig, _: &Hooks) -> Result<Vec<ResultRow>, RunError> {
    let f = field(cfg)?;
    let n = cfg.n;
    let default: Vec<usize> = (1..).map(|i| i * n).take_while(|&d| d <= 24).collect();
    let mut rows = Vec::new();
    for d in cfg.degrees_or(&default) {
        if d == 0 || d % n != 0 {
            return Err(reject("degrees", format!("deg s = {} is not a positive multiple of n = {}", d, n)));
        }
        let fam = Family::uniform(Poly::y_pow(d), n, &f)?;
        let def = a_invariance_defect(&fam);
        let bound = 2.0 * n as f64 / d as f64;
        rows.push(
            ResultRow::new("a-invariance", ANCHOR_AINV, n, cfg.q)
                .param("deg_s", d)
                .measured(Num::Float(def.ratio))
                .reference(Num::Float(bound))
                .pass((def.left + def.right) * d <= 2 * n * def.card)
                .note(format!("left={} right={} card={}", def.left, def.right, def.card)),
        );
    }
    Ok(rows)
}
