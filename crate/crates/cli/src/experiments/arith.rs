use ffdyn::ffarith::{count_coprime, count_ideals_exp, enumerate_monic, omega, qpow, Fq, Poly, Q};

use super::{field, reject, Hooks, RunError};
use crate::config::ExperimentConfig;
use crate::exec::par_map;
use crate::table::{Num, ResultRow};

pub const ANCHOR_EULER: &str = "eq:defiEulerfunct";
pub const ANCHOR_COUNTING: &str = "lem:gauscounting";
pub const ANCHOR_COPRIME: &str = "lem:cardEJprim";

fn is_coprime(a: &Poly, b: &Poly, f: &Fq) -> bool {
    a.gcd(b, f).map(|g| g.is_one()).unwrap_or(false)
}

/// `Card (F_q[Y]/s)^×` by testing every residue.
pub fn phi_census(s: &Poly, f: &Fq) -> u128 {
    let d = s.deg().unwrap();
    let q = f.q();
    (0..qpow(q, d as u32) as u64).filter(|&c| is_coprime(&Poly::from_code(d, c, q), s, f)).count() as u128
}

pub fn euler(cfg: &ExperimentConfig, hooks: &Hooks) -> Result<Vec<ResultRow>, RunError> {
    let f = field(cfg)?;
    let degrees = cfg.degrees_or(&[0, 1, 2, 3, 4, 5, 6]);
    if degrees.iter().any(|&d| d > 10) {
        return Err(reject("degrees", "census is limited to degree 10"));
    }
    let phi = hooks.euler_phi;
    let rows = par_map(cfg.jobs, degrees, |_, d| -> Result<ResultRow, RunError> {
        let polys = enumerate_monic(d, false, &f);
        let mut agree = 0usize;
        let mut first_bad = None;
        for s in &polys {
            let got = phi(s, &f)?;
            if got == phi_census(s, &f) {
                agree += 1;
            } else if first_bad.is_none() {
                first_bad = Some(format!("s={} phi={}", s.pretty(&f), got));
            }
        }
        Ok(ResultRow::new("euler", ANCHOR_EULER, 1, cfg.q)
            .param("deg", d)
            .measured(agree)
            .reference(polys.len())
            .pass(agree == polys.len())
            .note(first_bad.unwrap_or_default()))
    });
    rows.into_iter().collect()
}

pub fn counting(cfg: &ExperimentConfig, _: &Hooks) -> Result<Vec<ResultRow>, RunError> {
    let f = field(cfg)?;
    let q = cfg.q as i128;
    let expected = Q::new(-1, q - 1);
    let mut rows = Vec::new();
    for n in cfg.degrees_or(&(0..=10).collect::<Vec<_>>()) {
        if n > 40 {
            return Err(reject("degrees", "counting is limited to t <= q^40"));
        }
        let r = count_ideals_exp(n as u32, &f);
        // direct enumeration of monic polynomials when it is small
        let census = (qpow(f.q(), n as u32) <= 1 << 16)
            .then(|| (0..=n).map(|d| enumerate_monic(d, false, &f).len() as u128).sum::<u128>());
        let census_ok = census.map_or(true, |c| c == r.count);
        rows.push(
            ResultRow::new("counting", ANCHOR_COUNTING, 1, cfg.q)
                .param("t", format!("q^{}", n))
                .measured(r.residual)
                .reference(expected)
                .pass(r.residual == expected && census_ok)
                .note(format!("count={}", r.count)),
        );
    }
    Ok(rows)
}

struct CoprimeStats {
    deg: usize,
    ratio: f64,
    census_ok: bool,
    checked: usize,
}

/// `#{monic r : deg r <= deg J - j, gcd(r, J) = 1}` by enumeration.
fn coprime_census(j: &Poly, e: i64, f: &Fq) -> u128 {
    let top = j.deg().unwrap() as i64 - e;
    (0..=top.max(-1)).map(|d| enumerate_monic(d as usize, false, f).iter().filter(|r| is_coprime(r, j, f)).count() as u128).sum()
}

pub fn coprime(cfg: &ExperimentConfig, _: &Hooks) -> Result<Vec<ResultRow>, RunError> {
    let f = field(cfg)?;
    let mut degrees = cfg.degrees_or(&[1, 2, 3, 4, 5, 6, 7, 8]);
    degrees.sort_unstable();
    degrees.dedup();
    if degrees.len() < 2 || degrees[0] == 0 {
        return Err(reject("degrees", "need at least two positive degrees"));
    }
    let eps = cfg.eps.clone();
    let stats = par_map(cfg.jobs, degrees.clone(), |_, d| -> Result<CoprimeStats, RunError> {
        let mut ratio: f64 = 0.0;
        let mut census_ok = true;
        let mut checked = 0;
        for j in enumerate_monic(d, false, &f) {
            let w = omega(&j, &f)?;
            for &e in &eps {
                let r = count_coprime(&j, e, &f)?;
                let res = if r.residual < Q::from_integer(0) { -r.residual } else { r.residual };
                let x = *res.numer() as f64 / *res.denom() as f64 / (1u64 << w) as f64;
                ratio = ratio.max(x);
                if d <= 10 {
                    census_ok &= coprime_census(&j, e, &f) == r.count;
                }
                checked += 1;
            }
        }
        Ok(CoprimeStats { deg: d, ratio, census_ok, checked })
    });
    let stats: Vec<CoprimeStats> = stats.into_iter().collect::<Result<_, _>>()?;
    let mut rows = Vec::new();
    for s in &stats {
        rows.push(
            ResultRow::new("coprime", ANCHOR_COPRIME, 1, cfg.q)
                .param("deg", s.deg)
                .measured(s.ratio)
                .pass(s.census_ok)
                .note(format!("max |count - pred| / 2^w over {} (J, eps)", s.checked)),
        );
    }
    let half = stats.len() / 2;
    let fit = |xs: &[CoprimeStats]| xs.iter().map(|s| s.ratio).fold(0.0, f64::max);
    let (lo, hi) = (fit(&stats[..half]), fit(&stats[half..]));
    let window = |xs: &[CoprimeStats]| format!("{}..{}", xs[0].deg, xs[xs.len() - 1].deg);
    let stable = lo > 0.0 && hi > 0.0 && hi / lo <= 2.0 && lo / hi <= 2.0;
    rows.push(
        ResultRow::new("coprime", ANCHOR_COPRIME, 1, cfg.q)
            .param("window", window(&stats[..half]))
            .measured(lo)
            .note("fitted C"),
    );
    rows.push(
        ResultRow::new("coprime", ANCHOR_COPRIME, 1, cfg.q)
            .param("window", window(&stats[half..]))
            .measured(hi)
            .note("fitted C"),
    );
    rows.push(
        ResultRow::new("coprime", ANCHOR_COPRIME, 1, cfg.q)
            .param("stability", "C_hi/C_lo")
            .measured(Num::Float(if lo > 0.0 { hi / lo } else { f64::INFINITY }))
            .reference(Num::Float(1.0))
            .pass(stable)
            .note("within a factor 2"),
    );
    Ok(rows)
}
