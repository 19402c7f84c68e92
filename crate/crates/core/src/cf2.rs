//! Continued fractions over `F_q(Y)` and the rank-two comparison between
//! the truncated covolume, the height and the total length.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::ffarith::{Elt, Fq, Poly, RatFunc, Val};
use crate::orbit::{build_x_t, directional_systoles};

/// `f = [f] + {f}` with `[f]` a polynomial and `v({f}) >= 1`.
pub fn int_frac(x: &RatFunc, f: &Fq) -> (Poly, RatFunc) {
    let (a, r) = x.num().divmod(x.den(), f).unwrap();
    (a, RatFunc::new(r, x.den().clone(), f).unwrap())
}

/// The Artin map `x -> {1/x}` on `pi O \ {0}`.
pub fn artin(x: &RatFunc, f: &Fq) -> Result<RatFunc> {
    match x.val() {
        Val::Inf => Err(Error::OutOfRange(format!("the Artin map is undefined at 0"))),
        Val::Fin(v) if v < 1 => Err(Error::OutOfRange(format!("v(f) = {} < 1", v))),
        Val::Fin(_) => Ok(int_frac(&x.inv(f)?, f).1),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CFExpansion {
    /// `a_0, a_1, ..., a_n`.
    pub a: Vec<Poly>,
    /// `P_0, ..., P_n`.
    pub p: Vec<Poly>,
    /// `Q_0, ..., Q_n`.
    pub q: Vec<Poly>,
    pub exact: bool,
}

impl CFExpansion {
    /// Builds the convergents from `a` with `P_{-1} = 1, Q_{-1} = 0,
    /// P_0 = a_0, Q_0 = 1`.
    pub fn from_coeffs(a: Vec<Poly>, f: &Fq) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::OutOfRange(format!("empty coefficient list")));
        }
        if a[1..].iter().any(|x| x.deg().unwrap_or(0) < 1) {
            return Err(Error::OutOfRange(format!("a_i must be nonconstant for i >= 1")));
        }
        let (mut p, mut q) = (Vec::with_capacity(a.len()), Vec::with_capacity(a.len()));
        let (mut p2, mut q2) = (Poly::one(), Poly::zero());
        let (mut p1, mut q1) = (a[0].clone(), Poly::one());
        p.push(p1.clone());
        q.push(q1.clone());
        for ai in &a[1..] {
            let pi = p1.mul(ai, f).add(&p2, f);
            let qi = q1.mul(ai, f).add(&q2, f);
            p.push(pi.clone());
            q.push(qi.clone());
            (p2, q2, p1, q1) = (p1, q1, pi, qi);
        }
        Ok(CFExpansion { a, p, q, exact: true })
    }
    /// Index `n` of the last coefficient.
    pub fn len(&self) -> usize {
        self.a.len() - 1
    }
    pub fn convergent(&self, i: usize, f: &Fq) -> RatFunc {
        RatFunc::new(self.p[i].clone(), self.q[i].clone(), f).unwrap()
    }
    pub fn value(&self, f: &Fq) -> RatFunc {
        self.convergent(self.len(), f)
    }
    /// `deg Q_n`.
    pub fn height(&self) -> usize {
        self.q.last().unwrap().deg().unwrap()
    }
    /// `sum_{i >= 1} deg a_i`.
    pub fn cf_length(&self) -> usize {
        self.a[1..].iter().map(|x| x.deg().unwrap()).sum()
    }
    /// Coefficients joined by `;`, e.g. `0;Y;Y`.
    pub fn to_text(&self, f: &Fq) -> String {
        self.a.iter().map(|x| x.pretty(f)).collect::<Vec<_>>().join(";")
    }
    pub fn parse(text: &str, f: &Fq) -> Result<Self> {
        let a = text.split(';').map(|t| Poly::parse_pretty(t.trim(), f)).collect::<Result<Vec<_>>>()?;
        Self::from_coeffs(a, f)
    }
}

/// Expansion by iterating the Artin map on `x - [x]`.
pub fn cf_expand(x: &RatFunc, f: &Fq) -> CFExpansion {
    let (a0, mut g) = int_frac(x, f);
    let mut a = alloc::vec![a0];
    while !g.is_zero() {
        let (ai, rest) = int_frac(&g.inv(f).unwrap(), f);
        a.push(ai);
        g = rest;
    }
    CFExpansion::from_coeffs(a, f).unwrap()
}

/// `(deg Q_n, sum deg a_i)`.
pub fn ht_cf(x: &RatFunc, f: &Fq) -> (usize, usize) {
    let e = cf_expand(x, f);
    (e.height(), e.cf_length())
}

/// `u [0; a_1, ..., a_n] = [0; u^{-1} a_1, u a_2, ..., u^{(-1)^n} a_n]`.
pub fn twist_coeffs(a: &[Poly], u: Elt, f: &Fq) -> Result<Vec<Poly>> {
    if u == 0 || u >= f.q() {
        return Err(Error::OutOfRange(format!("{} is not a unit of F_{}", u, f.q())));
    }
    let ui = f.inv(u);
    Ok(a.iter()
        .enumerate()
        .map(|(i, x)| match i {
            0 => x.scale(u, f),
            _ if i % 2 == 1 => x.scale(ui, f),
            _ => x.scale(u, f),
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreecaseReport {
    pub tau: i64,
    pub height: usize,
    pub cf_length: usize,
    pub agree: bool,
}

/// Compares `tau(x_{r/s})`, read off from the lattice, with the height and
/// total length of the expansion of `r/s` reduced modulo 1.
pub fn treecase_report(r: &Poly, s: &Poly, f: &Fq) -> Result<TreecaseReport> {
    if s.is_zero() {
        return Err(Error::DivisionByZero);
    }
    if !r.gcd(s, f)?.is_one() {
        return Err(Error::Hypothesis(format!("r and s are not coprime")));
    }
    let t = RatFunc::new(r.clone(), s.clone(), f)?;
    let (_, tau) = directional_systoles(&build_x_t(&[t.clone()], f)?);
    let e = cf_expand(&int_frac(&t, f).1, f);
    let (height, cf_length) = (e.height(), e.cf_length());
    let agree = tau >= 0 && tau as usize == height && height == cf_length;
    Ok(TreecaseReport { tau, height, cf_length, agree })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[u32]) -> Poly {
        Poly::from_coeffs(c.to_vec())
    }
    fn rf(n: Poly, d: Poly, f: &Fq) -> RatFunc {
        RatFunc::new(n, d, f).unwrap()
    }

    #[test]
    fn int_frac_and_artin() {
        let f = Fq::new(2).unwrap();
        let x = rf(p(&[1, 0, 1]), Poly::y_pow(1), &f);
        assert_eq!(int_frac(&x, &f), (Poly::y_pow(1), RatFunc::y_pow(-1)));
        assert_eq!(int_frac(&RatFunc::from_poly(p(&[1, 1])), &f), (p(&[1, 1]), RatFunc::zero()));
        let z = rf(Poly::y_pow(1), p(&[1, 0, 1]), &f);
        assert_eq!(int_frac(&z, &f), (Poly::zero(), z.clone()));
        assert_eq!(artin(&RatFunc::y_pow(-1), &f).unwrap(), RatFunc::zero());
        assert_eq!(artin(&z, &f).unwrap(), RatFunc::y_pow(-1));
        assert_eq!(artin(&rf(Poly::one(), p(&[1, 0, 1]), &f), &f).unwrap(), RatFunc::zero());
        assert!(artin(&RatFunc::zero(), &f).is_err());
        assert!(artin(&RatFunc::one(), &f).is_err());
    }

    #[test]
    fn expansion_examples() {
        let f = Fq::new(2).unwrap();
        let z = rf(Poly::y_pow(1), p(&[1, 0, 1]), &f);
        let e = cf_expand(&z, &f);
        assert_eq!(e.a, alloc::vec![Poly::zero(), Poly::y_pow(1), Poly::y_pow(1)]);
        assert_eq!(e.convergent(1, &f), RatFunc::y_pow(-1));
        assert_eq!(e.value(&f), z);
        assert_eq!(ht_cf(&z, &f), (2, 2));
        assert_eq!(e.to_text(&f), "0;Y;Y");
        assert_eq!(CFExpansion::parse("0;Y;Y", &f).unwrap(), e);
        let poly = RatFunc::from_poly(p(&[1, 1, 1]));
        assert_eq!(cf_expand(&poly, &f).a, alloc::vec![p(&[1, 1, 1])]);
        assert_eq!(ht_cf(&poly, &f), (0, 0));
        let w = rf(Poly::one(), p(&[1, 0, 1]), &f);
        assert_eq!(cf_expand(&w, &f).a, alloc::vec![Poly::zero(), p(&[1, 0, 1])]);
        assert_eq!(ht_cf(&w, &f), (2, 2));
        assert!(CFExpansion::parse("0;1", &f).is_err());
    }

    #[test]
    fn treecase_examples() {
        let f = Fq::new(2).unwrap();
        let r = treecase_report(&Poly::y_pow(1), &p(&[1, 0, 1]), &f).unwrap();
        assert_eq!(r, TreecaseReport { tau: 2, height: 2, cf_length: 2, agree: true });
        for d in 1..6 {
            let r = treecase_report(&Poly::one(), &Poly::y_pow(d), &f).unwrap();
            assert_eq!((r.tau, r.height, r.cf_length, r.agree), (d as i64, d, d, true));
        }
        let r = treecase_report(&Poly::zero(), &Poly::one(), &f).unwrap();
        assert_eq!((r.tau, r.height, r.cf_length, r.agree), (0, 0, 0, true));
        assert!(treecase_report(&Poly::y_pow(1), &Poly::y_pow(2), &f).is_err());
    }

    #[test]
    fn unit_twist_examples() {
        let f = Fq::new(5).unwrap();
        let x = rf(p(&[1, 2]), p(&[3, 0, 1, 1]), &f);
        let e = cf_expand(&x, &f);
        for u in 1..5 {
            let tw = CFExpansion::from_coeffs(twist_coeffs(&e.a, u, &f).unwrap(), &f).unwrap();
            assert_eq!(tw.value(&f), x.scale(u, &f));
            assert_eq!((tw.height(), tw.cf_length()), (e.height(), e.cf_length()));
        }
        assert!(twist_coeffs(&e.a, 0, &f).is_err());
    }
}
