//! Invariants of divergent diagonal orbits of rational lattices.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::Result;
use crate::ffarith::{Fq, Poly, RatFunc};
use crate::latcore::{Lattice, MatK};

/// `exp(k) = diag(Y^{k_1}, ..., Y^{k_n})`.
pub fn exp_k(k: &[i64]) -> MatK {
    MatK::exp_diag(k)
}

/// Directional systoles and truncated covolume of an axial lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitInvariants {
    pub sys: Vec<i64>,
    pub tau: i64,
    pub delta_x: Vec<Vec<i64>>,
    pub quasicenter_shift: Vec<i64>,
}

/// `sys_i = log_q |lambda_i|` with `L ∩ K e_i = R_v lambda_i e_i`, and
/// `tau = sum sys_i`.
pub fn directional_systoles(l: &Lattice) -> (Vec<i64>, i64) {
    let sys = l.axis_logs();
    let tau = sys.iter().sum();
    (sys, tau)
}

pub fn orbit_invariants(l: &Lattice) -> OrbitInvariants {
    let (sys, tau) = directional_systoles(l);
    let delta_x = delta_set(&sys.iter().map(|s| -s).collect::<Vec<_>>());
    let quasicenter_shift = quasicenter_shift(&sys);
    OrbitInvariants { sys, tau, delta_x, quasicenter_shift }
}

/// All `k` in `Z_0^n` with `k_i >= lower_i`, in lexicographic order.
pub fn delta_set(lower: &[i64]) -> Vec<Vec<i64>> {
    let n = lower.len();
    let slack = -lower.iter().sum::<i64>();
    let mut out = Vec::new();
    if slack < 0 || n == 0 {
        return out;
    }
    let mut cur = vec![0i64; n];
    fn rec(i: usize, left: i64, lower: &[i64], cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        let n = lower.len();
        if i == n - 1 {
            cur[i] = lower[i] + left;
            out.push(cur.clone());
            return;
        }
        for j in 0..=left {
            cur[i] = lower[i] + j;
            rec(i + 1, left - j, lower, cur, out);
        }
    }
    rec(0, slack, lower, &mut cur, &mut out);
    out
}

/// `Delta^x`.
pub fn delta_x(l: &Lattice) -> Vec<Vec<i64>> {
    delta_x_m(l, 0)
}

/// `Delta^{x,m} = {k : k_i >= -sys_i - m}`.
pub fn delta_x_m(l: &Lattice, m: i64) -> Vec<Vec<i64>> {
    let (sys, _) = directional_systoles(l);
    delta_set(&sys.iter().map(|s| -s - m).collect::<Vec<_>>())
}

/// `Card Delta-hat(m)`, where `Delta-hat(m) = {k in Z_0^n : k_i >= -m}`,
/// by enumeration.
pub fn card_delta_hat(n: usize, m: i64) -> usize {
    delta_set(&vec![-m; n]).len()
}

/// Shift `k` such that `exp(k) x` is the quasicenter: with `tau = nP + Q`,
/// the first `Q` directional systoles become `P + 1` and the others `P`.
pub fn quasicenter_shift(sys: &[i64]) -> Vec<i64> {
    let n = sys.len() as i64;
    let tau: i64 = sys.iter().sum();
    let p = tau.div_euclid(n);
    let qq = tau.rem_euclid(n);
    sys.iter()
        .enumerate()
        .map(|(i, &s)| if (i as i64) < qq { p + 1 - s } else { p - s })
        .collect()
}

/// Coordinate sublattice `(L ∩ K e_1) + ... + (L ∩ K e_n)`.
pub fn coordinate_sublattice(l: &Lattice) -> Result<Lattice> {
    let g = l.axis_generators();
    Lattice::new(MatK::diag(&g), l.field())
}

/// Diagonal `a` over `K` with `a L` integral, obtained by clearing the
/// denominators of each row of the canonical basis.
pub fn integral_representative(l: &Lattice) -> Result<(MatK, Lattice)> {
    let f = l.field();
    let b = l.canonical_basis();
    let n = b.n();
    let mut d = Vec::with_capacity(n);
    for i in 0..n {
        let mut den = Poly::one();
        for j in 0..n {
            let x = b.get(i, j);
            if !x.is_zero() {
                let g = den.gcd(x.den(), f)?;
                den = den.mul(x.den(), f).div_exact(&g, f);
            }
        }
        d.push(RatFunc::from_poly(den.monic(f)));
    }
    let a = MatK::diag(&d);
    let al = l.act(&a)?;
    Ok((a, al))
}

/// `x_t = u_t R_v^n` where `u_t` is lower unipotent with first column
/// `(1, t_2, ..., t_n)`.
pub fn build_x_t(t: &[RatFunc], f: &Fq) -> Result<Lattice> {
    Lattice::new(u_t(t), f)
}

pub fn u_t(t: &[RatFunc]) -> MatK {
    let n = t.len() + 1;
    let mut m = MatK::identity(n);
    for (i, x) in t.iter().enumerate() {
        m.set(i + 1, 0, x.clone());
    }
    m
}
