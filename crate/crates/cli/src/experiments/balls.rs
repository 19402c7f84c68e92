use ffdyn::dynball::{
    check_count_hypotheses, conj_a, conj_ball, count_family_in_ball, cover_ball, cover_bound, family_ball_classes,
    in_ball, inverse_expansion_holds, latpoint_bound as lemma_bound, same_ball_coset, sample_ball, sample_small,
    systole_minoration_holds, BallParams, CosetAnswer,
};
use ffdyn::ffarith::{Fq, Poly, RatFunc};
use ffdyn::latcore::{Lattice, MatK};
use ffdyn::orbit::{build_x_t, exp_k, Family};
use rand::Rng;

use super::lattices::random_lattice;
use super::{field, reject, Hooks, RunError};
use crate::config::ExperimentConfig;
use crate::exec::{par_map, task_rng};
use crate::table::ResultRow;

pub const ANCHOR_BALLS: &str = "lem:inverse_dyn_balls";
pub const ANCHOR_PRODUCT: &str = "eq:BellBelldansBell";
pub const ANCHOR_COSET: &str = "lem:reciprocal_inclusion_dyn_balls";
pub const ANCHOR_CONJ: &str = "eq:dynamic_a_on_balls";
pub const ANCHOR_MINO: &str = "lem:minosystole";
pub const ANCHOR_COVER: &str = "lem:cover_dynamic_balls_SLn";
pub const ANCHOR_LATPOINT: &str = "lem:counting_latpts_dynballs";

const COSET_BUDGET: usize = 4000;
const COEFFS: usize = 3;

#[derive(Default, Clone, Copy)]
struct Tally {
    inverse: bool,
    product: bool,
    conj: bool,
    coset: bool,
    mino: bool,
}

/// `I + c E_ij` with `c` of valuation `lvl`, usually outside `B_{l,N}`.
fn elementary<R: Rng>(rng: &mut R, n: usize, lvl: i64, f: &Fq) -> MatK {
    let i = rng.random_range(0..n);
    let j = (i + rng.random_range(1..n)) % n;
    let c = RatFunc::y_pow(-lvl).scale(rng.random_range(1..f.q()), f);
    let mut g = MatK::identity(n);
    g.set(i, j, c);
    g
}

fn coset_consistent<R: Rng>(rng: &mut R, n: usize, p: BallParams, f: &Fq) -> Result<bool, RunError> {
    let x = random_lattice(rng, n, 2, f);
    let h = if rng.random_bool(0.5) {
        sample_ball(n, p, COEFFS, rng, f)?
    } else {
        let lvl = rng.random_range(-1..p.ell);
        elementary(rng, n, lvl, f)
    };
    let y = x.act(&h)?;
    let g = sample_ball(n, p, COEFFS, rng, f)?;
    let z = y.act(&g)?;
    let a = same_ball_coset(&x, &y, p, COSET_BUDGET)?;
    let b = same_ball_coset(&x, &z, p, COSET_BUDGET)?;
    let witness_ok = |ans: &CosetAnswer, target: &Lattice| match ans {
        CosetAnswer::Same(w) => in_ball(w, p, f) && x.act(w).map_or(false, |l| &l == target),
        CosetAnswer::Different => true,
        CosetAnswer::Inconclusive(_) => false,
    };
    let forced = !in_ball(&h, p, f) || a.is_same();
    Ok(a.is_same() == b.is_same() && witness_ok(&a, &y) && witness_ok(&b, &z) && forced)
}

fn one_sample(cfg: &ExperimentConfig, i: usize, p: BallParams, f: &Fq) -> Result<Tally, RunError> {
    let n = cfg.n;
    let mut rng = task_rng(cfg.seed, i);
    let g = sample_ball(n, p, COEFFS, &mut rng, f)?;
    let h = sample_ball(n, p, COEFFS, &mut rng, f)?;
    let inverse = in_ball(&g, p, f) && in_ball(&g.inverse(f)?, p, f) && inverse_expansion_holds(&g, p, f)?;
    let product = in_ball(&g.mul(&h, f), p, f);
    let lp = rng.random_range(-2..=p.big_n + 2);
    let conj = in_ball(&conj_a(&g, lp, f), conj_ball(p, lp, n), f);
    let coset = coset_consistent(&mut rng, n, p, f)?;
    let w = sample_small(n, p.ell, COEFFS, &mut rng, f);
    let k: Vec<i64> = (0..n).map(|_| rng.random_range(-4..=4)).collect();
    let mino = systole_minoration_holds(&w, &k, p.ell, f)?;
    Ok(Tally { inverse, product, conj, coset, mino })
}

pub fn ball_props(cfg: &ExperimentConfig, _: &Hooks) -> Result<Vec<ResultRow>, RunError> {
    let f = field(cfg)?;
    let n = cfg.n;
    let p = BallParams::new(cfg.ell[0], cfg.big_n[0] as i64);
    let samples = cfg.samples_or(500);
    let tallies = par_map(cfg.jobs, (0..samples).collect(), |i, _| one_sample(cfg, i, p, &f));
    let tallies: Vec<Tally> = tallies.into_iter().collect::<Result<_, _>>()?;
    let row = |name: &str, anchor: &'static str, pick: fn(&Tally) -> bool| {
        let ok = tallies.iter().filter(|t| pick(t)).count();
        ResultRow::new("ball-props", anchor, n, cfg.q)
            .param("property", name)
            .param("ell", p.ell)
            .param("N", p.big_n)
            .measured(ok)
            .reference(samples)
            .pass(ok == samples)
    };
    let mut rows = vec![
        row("inverse", ANCHOR_BALLS, |t| t.inverse),
        row("product", ANCHOR_PRODUCT, |t| t.product),
        row("conjugation", ANCHOR_CONJ, |t| t.conj),
        row("coset-dichotomy", ANCHOR_COSET, |t| t.coset),
        row("systole-minoration", ANCHOR_MINO, |t| t.mino),
    ];
    // covers of 50-element samples of B_{l,N} by B_{l+l',N}-cosets, l' = 1
    let covers = (samples / 50).max(1);
    let ell_prime = 1;
    let bound = cover_bound(f.q(), ell_prime, n);
    let sizes = par_map(cfg.jobs, (0..covers).collect(), |i, _| -> Result<usize, RunError> {
        let mut rng = task_rng(cfg.seed ^ 0x5eed_c0fe, i);
        let s: Vec<MatK> = (0..50).map(|_| sample_ball(n, p, COEFFS + 1, &mut rng, &f)).collect::<Result<_, _>>()?;
        Ok(cover_ball(&s, p, ell_prime, &f)?.0.len())
    });
    let sizes: Vec<usize> = sizes.into_iter().collect::<Result<_, _>>()?;
    let worst = sizes.iter().copied().max().unwrap_or(0);
    rows.push(
        ResultRow::new("ball-props", ANCHOR_COVER, n, cfg.q)
            .param("property", "cover")
            .param("ell", p.ell)
            .param("ell_prime", ell_prime)
            .measured(worst)
            .reference(bound)
            .pass(worst as u128 <= bound)
            .note(format!("{} covers", covers)),
    );
    Ok(rows)
}

/// One admissible grid point `(s, k, l, N)`.
struct GridPoint {
    fam: usize,
    k: Vec<i64>,
    p: BallParams,
}

fn grid_families(cfg: &ExperimentConfig, f: &Fq) -> Result<Vec<Family>, RunError> {
    let n = cfg.n;
    if let Some(s) = &cfg.s {
        return Ok(vec![Family::new(s.clone(), f)?]);
    }
    let mut out = Vec::new();
    for d in cfg.degrees_or(&[2, 4, 6]) {
        if d == 0 || d % n != 0 {
            continue;
        }
        out.push(Family::uniform(Poly::y_pow(d), n, f)?);
        if n > 2 {
            let mut s = vec![Poly::y_pow(d / 2); n - 2];
            s.push(Poly::y_pow(d));
            out.push(Family::new(s, f)?);
        }
    }
    out.retain(|fam| fam.card_lambda().map_or(false, |c| c <= 5000));
    if out.is_empty() {
        return Err(reject("degrees", format!("no admissible family for n = {}", n)));
    }
    Ok(out)
}

pub fn latpoint_bound(cfg: &ExperimentConfig, _: &Hooks) -> Result<Vec<ResultRow>, RunError> {
    let f = field(cfg)?;
    let n = cfg.n;
    let fams = grid_families(cfg, &f)?;
    let mut grid = Vec::new();
    for (fi, fam) in fams.iter().enumerate() {
        for k in fam.delta() {
            let kmax = *k[1..].iter().max().unwrap();
            for ell in 1.. {
                let room = fam.d() - ell + k[0] - kmax;
                if room < 0 {
                    break;
                }
                for big_n in 0..=room / n as i64 {
                    grid.push(GridPoint { fam: fi, k: k.clone(), p: BallParams::new(ell, big_n) });
                }
            }
        }
    }
    let rows = par_map(cfg.jobs, grid, |_, g| -> Result<Option<ResultRow>, RunError> {
        let fam = &fams[g.fam];
        let lam = fam.lambda();
        let e = exp_k(&g.k);
        let classes = family_ball_classes(fam, &g.k, g.p, COSET_BUDGET)?;
        let mut worst = None::<(usize, usize)>;
        for c in &classes {
            let x = build_x_t(&lam[c[0]], &f)?.act(&e)?;
            if check_count_hypotheses(fam, &g.k, g.p, &x).is_ok() && worst.map_or(true, |w| c.len() > w.0) {
                worst = Some((c.len(), c[0]));
            }
        }
        let Some((count, rep)) = worst else { return Ok(None) };
        // the partition agrees with a direct count around its largest class
        let x = build_x_t(&lam[rep], &f)?.act(&e)?;
        let direct = count_family_in_ball(fam, &g.k, g.p, &x, COSET_BUDGET)?;
        let bound = lemma_bound(fam, g.p);
        let kk = g.k.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        Ok(Some(
            ResultRow::new("latpoint-bound", ANCHOR_LATPOINT, n, cfg.q)
                .param("s", fam.s().iter().map(|p| p.pretty(&f)).collect::<Vec<_>>().join(" "))
                .param("k", kk)
                .param("ell", g.p.ell)
                .param("N", g.p.big_n)
                .measured(count)
                .reference(bound)
                .pass(count as u128 <= bound && direct.count == count as u128)
                .note(format!("classes={}", classes.len())),
        ))
    });
    let rows: Vec<Option<ResultRow>> = rows.into_iter().collect::<Result<_, _>>()?;
    Ok(rows.into_iter().flatten().collect())
}
