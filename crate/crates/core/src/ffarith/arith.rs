//! Arithmetic functions of F_q[Y]: factorization, Euler and Moebius
//! functions, ideal counting, zeta values and the related constants.

use alloc::format;
use alloc::vec::Vec;

use num_rational::Ratio;
use num_traits::{One, Zero};

use super::field::{Elt, Fq};
use super::poly::Poly;
use crate::error::{Error, Result};

/// Exact rationals used for counting residuals and zeta values.
pub type Q = Ratio<i128>;

/// Monic irreducible factors with multiplicities, and a unit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub unit: Elt,
    pub factors: Vec<(Poly, u32)>,
}

impl Factorization {
    pub fn product(&self, f: &Fq) -> Poly {
        let mut r = Poly::constant(self.unit);
        for (p, e) in &self.factors {
            r = r.mul(&p.pow(*e, f), f);
        }
        r
    }
}

/// `q^e` as u128.
pub fn qpow(q: u32, e: u32) -> u128 {
    (q as u128).pow(e)
}

/// Complete factorization of a monic polynomial by trial division in
/// increasing degree order (the first divisor found in each degree is
/// irreducible).
pub fn factor_monic(s: &Poly, f: &Fq) -> Result<Factorization> {
    if s.is_zero() || !s.is_monic() {
        return Err(Error::NotMonic);
    }
    let q = f.q();
    let mut rest = s.clone();
    let mut factors = Vec::new();
    let mut d = 1usize;
    while rest.deg().unwrap() >= 2 * d {
        let count = (q as u64).pow(d as u32);
        for code in 0..count {
            let g = Poly::monic_from_code(d, code, q);
            let mut e = 0;
            loop {
                let (qq, r) = rest.divmod(&g, f)?;
                if !r.is_zero() {
                    break;
                }
                rest = qq;
                e += 1;
            }
            if e > 0 {
                factors.push((g, e));
            }
            if rest.deg().unwrap() < 2 * d {
                break;
            }
        }
        d += 1;
    }
    if rest.deg().unwrap() > 0 {
        match factors.iter_mut().find(|(g, _)| *g == rest) {
            Some(slot) => slot.1 += 1,
            None => factors.push((rest, 1)),
        }
    }
    factors.sort();
    Ok(Factorization { unit: 1, factors })
}

/// Irreducibility via the test `gcd(Y^{q^i} - Y mod f, f) = 1` for
/// `i <= deg f / 2`.
pub fn is_irreducible(p: &Poly, f: &Fq) -> bool {
    let d = match p.deg() {
        None | Some(0) => return false,
        Some(d) => d,
    };
    if d == 1 {
        return true;
    }
    let m = p.monic(f);
    let y = Poly::y_pow(1);
    let mut h = y.clone();
    for _ in 1..=d / 2 {
        h = h.pow_mod(f.q() as u128, &m, f);
        let g = h.sub(&y, f).gcd(&m, f).unwrap();
        if !g.is_one() {
            return false;
        }
    }
    true
}

/// All monic polynomials of degree `d`, optionally only the irreducible ones.
pub fn enumerate_monic(d: usize, irreducible_only: bool, f: &Fq) -> Vec<Poly> {
    let count = (f.q() as u64).pow(d as u32);
    (0..count)
        .map(|c| Poly::monic_from_code(d, c, f.q()))
        .filter(|p| !irreducible_only || is_irreducible(p, f))
        .collect()
}

/// Monic polynomials of degree at most `d`.
pub fn enumerate_monic_upto(d: usize, f: &Fq) -> Vec<Poly> {
    (0..=d).flat_map(|k| enumerate_monic(k, false, f)).collect()
}

/// Norm `N(s) = q^{deg s}`.
pub fn norm(s: &Poly, f: &Fq) -> u128 {
    qpow(f.q(), s.deg().expect("nonzero") as u32)
}

/// Euler function `phi(s) = N(s) prod (1 - 1/N(p))`.
pub fn euler_phi(s: &Poly, f: &Fq) -> Result<u128> {
    if s.is_zero() {
        return Err(Error::OutOfRange(format!("euler_phi of zero")));
    }
    let fac = factor_monic(&s.monic(f), f)?;
    Ok(phi_from(&fac, f))
}

pub fn phi_from(fac: &Factorization, f: &Fq) -> u128 {
    let q = f.q();
    fac.factors
        .iter()
        .map(|(p, e)| {
            let d = p.deg().unwrap() as u32;
            qpow(q, d * e) - qpow(q, d * (e - 1))
        })
        .product()
}

/// Moebius function.
pub fn moebius(s: &Poly, f: &Fq) -> Result<i8> {
    if s.is_zero() {
        return Err(Error::OutOfRange(format!("moebius of zero")));
    }
    let fac = factor_monic(&s.monic(f), f)?;
    if fac.factors.iter().any(|(_, e)| *e > 1) {
        return Ok(0);
    }
    Ok(if fac.factors.len() % 2 == 0 { 1 } else { -1 })
}

/// Number of distinct prime factors.
pub fn omega(s: &Poly, f: &Fq) -> Result<u32> {
    if s.is_zero() {
        return Err(Error::OutOfRange(format!("omega of zero")));
    }
    Ok(factor_monic(&s.monic(f), f)?.factors.len() as u32)
}

/// Count of monic polynomials of norm at most `t`, the main term
/// `q^{n+1}/(q-1)` and the residual.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountReport {
    pub count: u128,
    pub main_term: Q,
    pub residual: Q,
}

/// Ideal count up to `t`, which must be a power of `q`.
pub fn count_ideals_upto(t: u128, f: &Fq) -> Result<CountReport> {
    let q = f.q() as u128;
    let mut n = 0u32;
    let mut x = t;
    if x == 0 {
        return Err(Error::OutOfRange(format!("t = 0 is not a power of q")));
    }
    while x % q == 0 {
        x /= q;
        n += 1;
    }
    if x != 1 {
        return Err(Error::OutOfRange(format!("t = {} is not a power of q = {}", t, q)));
    }
    Ok(count_ideals_exp(n, f))
}

/// Ideal count up to `q^n`.
pub fn count_ideals_exp(n: u32, f: &Fq) -> CountReport {
    let q = f.q();
    let count: u128 = (0..=n).map(|d| qpow(q, d)).sum();
    let main_term = Q::new(qpow(q, n + 1) as i128, q as i128 - 1);
    let residual = Q::from_integer(count as i128) - main_term;
    CountReport { count, main_term, residual }
}

/// Squarefree monic divisors of `s` with their Moebius signs.
fn squarefree_divisors(fac: &Factorization, f: &Fq) -> Vec<(Poly, i8)> {
    let mut out = alloc::vec![(Poly::one(), 1i8)];
    for (p, _) in &fac.factors {
        let mut extra = Vec::with_capacity(out.len());
        for (d, m) in &out {
            extra.push((d.mul(p, f), -m));
        }
        out.extend(extra);
    }
    out
}

/// Coprime ideal count against `eps * (q/(q-1)) * phi(J)`, for
/// `eps = q^{-eps_exp}` with `eps_exp >= 1`.
pub fn count_coprime(j: &Poly, eps_exp: i64, f: &Fq) -> Result<CountReport> {
    if eps_exp <= 0 {
        return Err(Error::OutOfRange(format!("eps = q^{} must be < 1", -eps_exp)));
    }
    if j.is_zero() || !j.is_monic() {
        return Err(Error::NotMonic);
    }
    let q = f.q();
    let dj = j.deg().unwrap() as i64;
    let dmax = dj - eps_exp;
    let fac = factor_monic(j, f)?;
    let mut count: i128 = 0;
    if dmax >= 0 {
        for (d, mu) in squarefree_divisors(&fac, f) {
            let dd = d.deg().unwrap() as i64;
            if dd > dmax {
                continue;
            }
            let multiples: u128 = (0..=(dmax - dd) as u32).map(|e| qpow(q, e)).sum();
            count += mu as i128 * multiples as i128;
        }
    }
    let phi = phi_from(&fac, f) as i128;
    let predicted = Q::new(phi * q as i128, (q as i128 - 1) * qpow(q, eps_exp as u32) as i128);
    Ok(CountReport {
        count: count as u128,
        main_term: predicted,
        residual: Q::from_integer(count) - predicted,
    })
}

/// `zeta_v(z) = 1/(1 - q^{1-z})` for integers `z <= -1`.
pub fn zeta_v_at(z: i64, q: u32) -> Result<Q> {
    if z >= 0 {
        return Err(Error::OutOfRange(format!("zeta_v at z = {} (need z <= -1)", z)));
    }
    let e = (1 - z) as u32;
    Ok(Q::new(1, 1 - qpow(q, e) as i128))
}

/// A constant reported with both sign conventions for the zeta values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedPair {
    /// Product of the zeta values as continued.
    pub signed: Q,
    /// Same product with `|zeta_v(-i)|`.
    pub absolute: Q,
}

/// `c_{K,n} = (n-1)! prod_{i<n} zeta_v(-i) / (q (q-1) prod_{2<=i<n} (q^i - 1))`.
pub fn c_kn(n: u32, q: u32) -> Result<SignedPair> {
    if n < 2 {
        return Err(Error::OutOfRange(format!("c_Kn needs n >= 2, got {}", n)));
    }
    let mut signed = Q::one();
    for i in 1..n {
        signed *= zeta_v_at(-(i as i64), q)?;
    }
    let fact: i128 = (1..n as i128).product();
    let mut den = Q::from_integer(q as i128 * (q as i128 - 1));
    for i in 2..n {
        den *= Q::from_integer(qpow(q, i) as i128 - 1);
    }
    let signed = signed * Q::from_integer(fact) / den;
    let absolute = if signed < Q::zero() { -signed } else { signed };
    Ok(SignedPair { signed, absolute })
}

/// Total mass `(q-1)/(q(q-1)) prod_{i<n} zeta_v(-i)/(q^i - 1)` of the space of
/// unimodular lattices, with `q_v = q`.
pub fn total_mass_x1(n: u32, q: u32) -> Result<SignedPair> {
    if n < 2 {
        return Err(Error::OutOfRange(format!("total mass needs n >= 2, got {}", n)));
    }
    let qq = q as i128;
    let mut signed = Q::new(qq - 1, qq * (qq - 1));
    for i in 1..n {
        signed *= zeta_v_at(-(i as i64), q)? / Q::from_integer(qpow(q, i) as i128 - 1);
    }
    let absolute = if signed < Q::zero() { -signed } else { signed };
    Ok(SignedPair { signed, absolute })
}

/// Checks the family conditions on `s = (s_2..s_n)`: nonzero monic entries
/// forming a divisibility chain after sorting, with `deg s_*` divisible by
/// `n = len + 1`. Returns the index of `s_*`.
pub fn check_family(s: &[Poly], f: &Fq) -> Result<usize> {
    if s.is_empty() {
        return Err(Error::InvalidFamily(format!("empty tuple")));
    }
    let n = s.len() + 1;
    for p in s {
        if p.is_zero() || !p.is_monic() {
            return Err(Error::InvalidFamily(format!("entries must be monic and nonzero")));
        }
    }
    let mut idx: Vec<usize> = (0..s.len()).collect();
    idx.sort_by_key(|&i| (s[i].deg().unwrap(), i));
    for w in idx.windows(2) {
        if !s[w[0]].divides(&s[w[1]], f) {
            return Err(Error::InvalidFamily(format!(
                "entries do not form a divisibility chain up to permutation"
            )));
        }
    }
    let star = *idx.last().unwrap();
    let d = s[star].deg().unwrap();
    if d % n != 0 {
        return Err(Error::InvalidFamily(format!(
            "v(s_*) = -{} is not in {}Z",
            d, n
        )));
    }
    Ok(star)
}

/// `kappa'(s) = (1/n)(-v(s_*) + max_i log_q(2^{w(s_i)} max{1, ln ln|s_i|} / |s_i|))`,
/// evaluated in floating point; `ln ln |s_i| = ln(deg s_i ln q)`.
pub fn kappa_prime(s: &[Poly], f: &Fq) -> Result<f64> {
    let star = check_family(s, f)?;
    let n = (s.len() + 1) as f64;
    let lq = libm::log(f.q() as f64);
    let mut best = f64::NEG_INFINITY;
    for p in s {
        let d = p.deg().unwrap() as f64;
        let w = omega(p, f)? as f64;
        let lnln = if d > 0.0 { libm::log(d * lq) } else { f64::NEG_INFINITY };
        let term = w * libm::log(2.0) / lq + libm::log(lnln.max(1.0)) / lq - d;
        best = best.max(term);
    }
    Ok((s[star].deg().unwrap() as f64 + best) / n)
}

/// Fitted constants for `phi(s) >= c |s| / max{1, ln deg s}` and
/// `w(s) <= c' deg s / max{1, ln deg s}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundsReport {
    pub c_phi: f64,
    pub c_omega: f64,
    /// Running constants after each degree of the range.
    pub per_degree: Vec<(usize, f64, f64)>,
}

pub fn arith_bounds_report(lo: usize, hi: usize, f: &Fq) -> Result<BoundsReport> {
    if lo > hi {
        return Err(Error::OutOfRange(format!("empty degree range {}..={}", lo, hi)));
    }
    let mut c_phi = f64::INFINITY;
    let mut c_omega: f64 = 0.0;
    let mut per_degree = Vec::new();
    for d in lo..=hi {
        for s in enumerate_monic(d, false, f) {
            let fac = factor_monic(&s, f)?;
            let phi = phi_from(&fac, f) as f64;
            let w = fac.factors.len() as f64;
            let damp = libm::log(d as f64).max(1.0);
            let size = libm::pow(f.q() as f64, d as f64);
            c_phi = c_phi.min(phi * damp / size);
            if d > 0 {
                c_omega = c_omega.max(w * damp / d as f64);
            }
        }
        per_degree.push((d, c_phi, c_omega));
    }
    Ok(BoundsReport { c_phi, c_omega, per_degree })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;

    fn p(c: &[u32]) -> Poly {
        Poly::from_coeffs(c.to_vec())
    }

    #[test]
    fn factor_examples() {
        let f = Fq::new(2).unwrap();
        let fac = factor_monic(&p(&[0, 1, 1]), &f).unwrap();
        assert_eq!(fac.factors, alloc::vec![(p(&[0, 1]), 1), (p(&[1, 1]), 1)]);
        assert!(factor_monic(&Poly::one(), &f).unwrap().factors.is_empty());
        let fac = factor_monic(&p(&[1, 1, 1]), &f).unwrap();
        assert_eq!(fac.factors, alloc::vec![(p(&[1, 1, 1]), 1)]);
        assert_eq!(factor_monic(&p(&[1, 0, 1]), &f).unwrap().factors, alloc::vec![(p(&[1, 1]), 2)]);
        assert_eq!(factor_monic(&Poly::zero(), &f), Err(Error::NotMonic));
    }

    #[test]
    fn enumerate_examples() {
        let f = Fq::new(2).unwrap();
        assert_eq!(enumerate_monic(1, false, &f), alloc::vec![p(&[0, 1]), p(&[1, 1])]);
        assert_eq!(enumerate_monic(2, true, &f), alloc::vec![p(&[1, 1, 1])]);
        assert_eq!(enumerate_monic(0, false, &f), alloc::vec![Poly::one()]);
    }

    #[test]
    fn phi_mu_examples() {
        let f = Fq::new(2).unwrap();
        assert_eq!(euler_phi(&p(&[0, 1]), &f).unwrap(), 1);
        assert_eq!(euler_phi(&Poly::one(), &f).unwrap(), 1);
        assert_eq!(euler_phi(&p(&[1, 1, 1]), &f).unwrap(), 3);
        assert_eq!((moebius(&Poly::one(), &f).unwrap(), omega(&Poly::one(), &f).unwrap()), (1, 0));
        assert_eq!((moebius(&p(&[0, 1]), &f).unwrap(), omega(&p(&[0, 1]), &f).unwrap()), (-1, 1));
        assert_eq!((moebius(&p(&[0, 0, 1]), &f).unwrap(), omega(&p(&[0, 0, 1]), &f).unwrap()), (0, 1));
        assert!(euler_phi(&Poly::zero(), &f).is_err());
    }

    #[test]
    fn counting_examples() {
        let f2 = Fq::new(2).unwrap();
        let r = count_ideals_upto(4, &f2).unwrap();
        assert_eq!((r.count, r.main_term, r.residual), (7, Q::from_integer(8), Q::from_integer(-1)));
        let f3 = Fq::new(3).unwrap();
        let r = count_ideals_upto(1, &f3).unwrap();
        assert_eq!((r.count, r.main_term, r.residual), (1, Q::new(3, 2), Q::new(-1, 2)));
        assert!(count_ideals_upto(6, &f2).is_err());
    }

    #[test]
    fn coprime_examples() {
        let f = Fq::new(2).unwrap();
        let r = count_coprime(&p(&[0, 1, 1]), 1, &f).unwrap();
        assert_eq!((r.count, r.main_term, r.residual), (1, Q::from_integer(1), Q::zero()));
        let r = count_coprime(&p(&[0, 0, 1]), 1, &f).unwrap();
        assert_eq!((r.count, r.main_term, r.residual), (2, Q::from_integer(2), Q::zero()));
        assert!(count_coprime(&p(&[0, 1]), 0, &f).is_err());
    }

    #[test]
    fn coprime_with_unit_modulus_is_ideal_count() {
        // J = 1 with eps = q^{-k}: no monic I has N(I) <= q^{-k}
        let f = Fq::new(3).unwrap();
        assert_eq!(count_coprime(&Poly::one(), 1, &f).unwrap().count, 0);
    }

    #[test]
    fn zeta_and_constants() {
        assert_eq!(zeta_v_at(-1, 2).unwrap(), Q::new(-1, 3));
        assert!(zeta_v_at(0, 2).is_err());
        let z = zeta_v_at(-30, 2).unwrap();
        assert!(z.abs() < Q::new(1, 1 << 30));
        let c = c_kn(2, 2).unwrap();
        assert_eq!(c.absolute, Q::new(1, 6));
        assert_eq!(c.signed, Q::new(-1, 6));
    }

    #[test]
    fn kappa_examples() {
        let f = Fq::new(2).unwrap();
        let k = kappa_prime(&[Poly::y_pow(2)], &f).unwrap();
        assert!((k - 0.5).abs() < 1e-12);
        // ln ln 16 slightly exceeds 1, so the clamp does not apply
        let k4 = kappa_prime(&[Poly::y_pow(4)], &f).unwrap();
        let expect = (4.0 + 1.0 + libm::log2(libm::log(4.0 * libm::log(2.0))) - 4.0) / 2.0;
        assert!((k4 - expect).abs() < 1e-12);
        assert!(kappa_prime(&[], &f).is_err());
        assert!(kappa_prime(&[Poly::y_pow(3)], &f).is_err());
    }

    #[test]
    fn bounds_report_small() {
        let f = Fq::new(2).unwrap();
        let r = arith_bounds_report(1, 6, &f).unwrap();
        assert!(r.c_phi > 0.0 && r.c_phi <= 0.5);
        assert!(r.c_omega >= 1.0);
    }
}
