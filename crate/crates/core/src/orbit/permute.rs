//! Coordinate permutations of families and the cyclic symmetry of uniform
//! families.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::ffarith::{Poly, RatFunc};
use crate::latcore::{lattice_equal, MatK};

use super::family::Family;
use super::invariants::{build_x_t, exp_k};

fn check_perm(sigma: &[usize], n: usize) -> Result<()> {
    let mut seen = alloc::vec![false; n];
    if sigma.len() != n {
        return Err(Error::Dimension(format!("permutation of length {} for n = {}", sigma.len(), n)));
    }
    for &x in sigma {
        if x >= n || seen[x] {
            return Err(Error::OutOfRange(format!("{:?} is not a permutation of 0..{}", sigma, n)));
        }
        seen[x] = true;
    }
    Ok(())
}

/// `(sigma . v)_{sigma(i)} = v_i`.
pub fn permute_vec<T: Clone>(sigma: &[usize], v: &[T]) -> Vec<T> {
    let mut out = v.to_vec();
    for (i, x) in v.iter().enumerate() {
        out[sigma[i]] = x.clone();
    }
    out
}

/// Acts on an `(n-1)`-tuple indexed by coordinates `2..n`.
fn permute_tail<T: Clone>(sigma: &[usize], v: &[T]) -> Vec<T> {
    let mut out = v.to_vec();
    for (i, x) in v.iter().enumerate() {
        out[sigma[i + 1] - 1] = x.clone();
    }
    out
}

/// Transported family `sigma . s` together with the bijection
/// `t -> sigma . t` from `Lambda_s` onto `Lambda_{sigma . s}`.
#[derive(Debug, Clone)]
pub struct Transport {
    pub family: Family,
    pub lambda_map: Vec<(Vec<RatFunc>, Vec<RatFunc>)>,
}

/// `sigma` is given 0-based by `P_sigma e_i = e_{sigma(i)}` and must fix
/// the first coordinate.
pub fn permute_family(fam: &Family, sigma: &[usize]) -> Result<Transport> {
    check_perm(sigma, fam.n())?;
    if sigma[0] != 0 {
        return Err(Error::Hypothesis(format!("sigma must fix the first coordinate")));
    }
    let s: Vec<Poly> = permute_tail(sigma, fam.s());
    let family = Family::new(s, fam.field())?;
    let lambda_map = fam.lambda().into_iter().map(|t| {
        let u = permute_tail(sigma, &t);
        (t, u)
    });
    Ok(Transport { family, lambda_map: lambda_map.collect() })
}

/// Checks `Lambda_{sigma.s} = sigma.Lambda_s`, the invariance of `Delta` and
/// `Diamond`, and `P_sigma exp(k) x_t = exp(sigma.k) x_{sigma.t}` for all
/// `t` and all `k` in `Diamond_s`.
pub fn check_permutation(fam: &Family, sigma: &[usize]) -> Result<bool> {
    let f = fam.field();
    let tr = permute_family(fam, sigma)?;
    let mut image: Vec<Vec<RatFunc>> = tr.lambda_map.iter().map(|(_, u)| u.clone()).collect();
    let mut target = tr.family.lambda();
    image.sort_by_key(|t| t.iter().map(|x| x.to_text(f)).collect::<Vec<_>>());
    target.sort_by_key(|t| t.iter().map(|x| x.to_text(f)).collect::<Vec<_>>());
    if image != target {
        return Ok(false);
    }
    for (a, b) in [(fam.delta(), tr.family.delta()), (fam.diamond(), tr.family.diamond())] {
        let mut moved: Vec<Vec<i64>> = a.iter().map(|k| permute_vec(sigma, k)).collect();
        moved.sort();
        let mut b = b;
        b.sort();
        if moved != b {
            return Ok(false);
        }
    }
    let p = MatK::permutation(sigma);
    for (t, u) in &tr.lambda_map {
        let x = build_x_t(t, f)?;
        let y = build_x_t(u, f)?;
        for k in fam.diamond() {
            let lhs = x.act(&exp_k(&k))?.act(&p)?;
            let rhs = y.act(&exp_k(&permute_vec(sigma, &k)))?;
            if !lattice_equal(&lhs, &rhs) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Image `a' exp(k_s) x_{t'}` of `exp(k_s) x_t` under the cyclic shift
/// `e_i -> e_{i+1 mod n}`, for `a = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleImage {
    pub a_prime: MatK,
    pub t_prime: Vec<RatFunc>,
}

fn uniform_modulus(fam: &Family) -> Result<Poly> {
    let s = fam.s()[0].clone();
    if fam.s().iter().any(|x| *x != s) {
        return Err(Error::Hypothesis(format!("the cyclic map needs s = (s, ..., s)")));
    }
    Ok(s)
}

/// `a' = diag(s'^{-1}, s', 1, ..., 1)` with `s' = s / Y^{deg s}` and
/// `t' = (rbar_n/s, rbar_n r_2/s, ..., rbar_n r_{n-1}/s)`.
pub fn cycle_transport(fam: &Family, r: &[Poly]) -> Result<CycleImage> {
    let f = fam.field();
    let s = uniform_modulus(fam)?;
    let n = fam.n();
    if r.len() != n - 1 {
        return Err(Error::Dimension(format!("expected {} residues", n - 1)));
    }
    let rbar = r[n - 2]
        .inv_mod(&s, f)
        .ok_or_else(|| Error::Hypothesis(format!("r_n is not a unit modulo s")))?;
    let mut tp = Vec::with_capacity(n - 1);
    tp.push(RatFunc::new(rbar.clone(), s.clone(), f)?);
    for ri in &r[..n - 2] {
        tp.push(RatFunc::new(rbar.mul(ri, f).rem(&s, f)?, s.clone(), f)?);
    }
    let sp = RatFunc::new(s.clone(), Poly::y_pow(s.deg().unwrap()), f)?;
    let mut d = alloc::vec![RatFunc::one(); n];
    d[0] = sp.inv(f)?;
    d[1] = sp;
    Ok(CycleImage { a_prime: MatK::diag(&d), t_prime: tp })
}

/// Checks `sigma_n(exp(k_s) x_t) = a' exp(k_s) x_{t'}` for every `t`, and
/// that `t -> t'` is a bijection of `Lambda_s`.
pub fn check_cycle(fam: &Family) -> Result<bool> {
    let f = fam.field();
    let n = fam.n();
    let sigma: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
    let p = MatK::permutation(&sigma);
    let e = exp_k(&fam.k_s());
    let mut images = Vec::new();
    for r in fam.lambda_residues() {
        let t = fam.t_of(&r);
        let img = cycle_transport(fam, &r)?;
        let lhs = build_x_t(&t, f)?.act(&e)?.act(&p)?;
        let rhs = build_x_t(&img.t_prime, f)?.act(&e)?.act(&img.a_prime)?;
        if !lattice_equal(&lhs, &rhs) {
            return Ok(false);
        }
        images.push(img.t_prime.iter().map(|x| x.to_text(f)).collect::<Vec<_>>());
    }
    let total = images.len();
    images.sort();
    images.dedup();
    Ok(images.len() == total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffarith::Fq;

    #[test]
    fn identity_and_swap() {
        let f = Fq::new(2).unwrap();
        let fam = Family::new(alloc::vec![Poly::y_pow(1), Poly::y_pow(2)], &f).unwrap_err();
        let _ = fam;
        let fam = Family::new(alloc::vec![Poly::y_pow(1), Poly::y_pow(3)], &f).unwrap();
        let id = permute_family(&fam, &[0, 1, 2]).unwrap();
        assert_eq!(id.family, fam);
        assert!(id.lambda_map.iter().all(|(a, b)| a == b));
        let sw = permute_family(&fam, &[0, 2, 1]).unwrap();
        assert_eq!(sw.family.s(), &[Poly::y_pow(3), Poly::y_pow(1)]);
        for (a, b) in &sw.lambda_map {
            assert_eq!((&a[0], &a[1]), (&b[1], &b[0]));
        }
        assert!(check_permutation(&fam, &[0, 2, 1]).unwrap());
        assert!(permute_family(&fam, &[1, 0, 2]).is_err());
        assert!(permute_family(&fam, &[0, 1, 1]).is_err());
    }

    #[test]
    fn cycle_examples() {
        let f = Fq::new(2).unwrap();
        let fam = Family::new(alloc::vec![Poly::y_pow(2)], &f).unwrap();
        let img = cycle_transport(&fam, &[Poly::one()]).unwrap();
        assert_eq!(img.t_prime, alloc::vec![RatFunc::y_pow(-2)]);
        assert_eq!(img.a_prime, MatK::identity(2));
        assert!(check_cycle(&fam).unwrap());
        let f3 = Fq::new(3).unwrap();
        let s = Poly::from_coeffs(alloc::vec![1, 0, 1, 1]);
        let fam = Family::uniform(s, 3, &f3).unwrap();
        assert!(check_cycle(&fam).unwrap());
    }
}
