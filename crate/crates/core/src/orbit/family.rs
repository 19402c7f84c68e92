//! The index data `Lambda_s`, `Delta_s`, `Diamond_s`, `k_s` of an
//! equidistributing family `s = (s_2, ..., s_n)`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::ffarith::{check_family, euler_phi, Fq, Poly, RatFunc};

use super::invariants::delta_set;

#[derive(Debug, Clone)]
pub struct Family {
    fq: Fq,
    s: Vec<Poly>,
    star: usize,
}

impl PartialEq for Family {
    fn eq(&self, o: &Self) -> bool {
        self.fq == o.fq && self.s == o.s
    }
}

impl Family {
    /// Validates the divisibility chain and `deg s_* ∈ nZ`.
    pub fn new(s: Vec<Poly>, fq: &Fq) -> Result<Self> {
        let star = check_family(&s, fq)?;
        Ok(Family { fq: fq.clone(), s, star })
    }
    /// `(s, ..., s)` with `n - 1` entries.
    pub fn uniform(s: Poly, n: usize, fq: &Fq) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidFamily(format!("n = {} < 2", n)));
        }
        Self::new(alloc::vec![s; n - 1], fq)
    }
    pub fn field(&self) -> &Fq {
        &self.fq
    }
    pub fn n(&self) -> usize {
        self.s.len() + 1
    }
    pub fn s(&self) -> &[Poly] {
        &self.s
    }
    pub fn s_star(&self) -> &Poly {
        &self.s[self.star]
    }
    /// `-v(s_*) = deg s_*`.
    pub fn d(&self) -> i64 {
        self.s_star().deg().unwrap() as i64
    }

    /// Residues `r` with `deg r < deg s_i` coprime to `s_i` (the residue `0`
    /// when `s_i` is a unit).
    pub fn residues(&self, i: usize) -> Vec<Poly> {
        let f = &self.fq;
        let s = &self.s[i];
        let e = s.deg().unwrap();
        if e == 0 {
            return alloc::vec![Poly::zero()];
        }
        let total = (f.q() as u64).pow(e as u32);
        (0..total)
            .map(|c| Poly::from_code(e, c, f.q()))
            .filter(|r| !r.is_zero() && r.gcd(s, f).unwrap().is_one())
            .collect()
    }
    pub fn card_lambda(&self) -> Result<u128> {
        let mut c = 1u128;
        for s in &self.s {
            c *= euler_phi(s, &self.fq)?;
        }
        Ok(c)
    }
    /// All of `Lambda_s` as residue tuples `(r_2, ..., r_n)`, in
    /// mixed-radix order with the last coordinate varying fastest.
    pub fn lambda_residues(&self) -> Vec<Vec<Poly>> {
        let lists: Vec<Vec<Poly>> = (0..self.s.len()).map(|i| self.residues(i)).collect();
        let total: usize = lists.iter().map(|l| l.len()).product();
        let mut out = Vec::with_capacity(total);
        for mut idx in 0..total {
            let mut r = alloc::vec![Poly::zero(); lists.len()];
            for c in (0..lists.len()).rev() {
                let len = lists[c].len();
                r[c] = lists[c][idx % len].clone();
                idx /= len;
            }
            out.push(r);
        }
        out
    }
    /// `t = (r_2/s_2, ..., r_n/s_n)`.
    pub fn t_of(&self, r: &[Poly]) -> Vec<RatFunc> {
        r.iter()
            .zip(&self.s)
            .map(|(ri, si)| RatFunc::new(ri.clone(), si.clone(), &self.fq).unwrap())
            .collect()
    }
    pub fn lambda(&self) -> Vec<Vec<RatFunc>> {
        self.lambda_residues().iter().map(|r| self.t_of(r)).collect()
    }

    pub fn in_delta(&self, k: &[i64]) -> bool {
        k.len() == self.n() && k.iter().sum::<i64>() == 0 && k[0] >= -self.d() && k[1..].iter().all(|&x| x >= 0)
    }
    pub fn in_diamond(&self, k: &[i64]) -> bool {
        k.len() == self.n()
            && k.iter().sum::<i64>() == 0
            && k[1..].iter().all(|&x| 0 <= x && x <= k[0] + self.d())
    }
    /// `Delta_s = {k : k_1 >= v(s_*), k_i >= 0}`.
    pub fn delta(&self) -> Vec<Vec<i64>> {
        let mut lower = alloc::vec![0i64; self.n()];
        lower[0] = -self.d();
        delta_set(&lower)
    }
    /// `Diamond_s = {k : 0 <= k_i <= k_1 - v(s_*)}`, in lexicographic order.
    pub fn diamond(&self) -> Vec<Vec<i64>> {
        self.delta().into_iter().filter(|k| self.in_diamond(k)).collect()
    }
    /// `k_s = ((n-1)/n v(s_*), -v(s_*)/n, ..., -v(s_*)/n)`.
    pub fn k_s(&self) -> Vec<i64> {
        let n = self.n() as i64;
        let d = self.d();
        let mut k = alloc::vec![d / n; self.n()];
        k[0] = -(n - 1) * d / n;
        k
    }

    /// Descriptor `q=..;n=..;s=p1,p2,...` with polynomials in the form
    /// `Y^2+1`.
    pub fn descriptor(&self) -> String {
        let ps: Vec<String> = self.s.iter().map(|p| p.pretty(&self.fq)).collect();
        format!("q={};n={};s={}", self.fq.q(), self.n(), ps.join(","))
    }
    pub fn parse_descriptor(text: &str) -> Result<Family> {
        let mut q = None;
        let mut n = None;
        let mut s = None;
        for part in text.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got `{}`", part)))?;
            match k.trim() {
                "q" => q = Some(v.trim().parse::<u64>().map_err(|_| Error::Parse(format!("bad q `{}`", v)))?),
                "n" => n = Some(v.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad n `{}`", v)))?),
                "s" => s = Some(String::from(v.trim())),
                other => return Err(Error::Parse(format!("unknown descriptor key `{}`", other))),
            }
        }
        let fq = Fq::new(q.ok_or_else(|| Error::Parse(format!("missing q")))?)?;
        let s = s.ok_or_else(|| Error::Parse(format!("missing s")))?;
        let polys = s.split(',').map(|p| Poly::parse_pretty(p, &fq)).collect::<Result<Vec<_>>>()?;
        let fam = Family::new(polys, &fq)?;
        if let Some(n) = n {
            if n != fam.n() {
                return Err(Error::Parse(format!("n = {} but s has {} entries", n, fam.s.len())));
            }
        }
        Ok(fam)
    }
}

/// `w = (1 - n, 1, ..., 1)`.
pub fn w_vector(n: usize) -> Vec<i64> {
    let mut w = alloc::vec![1i64; n];
    w[0] = 1 - n as i64;
    w
}

/// Sizes of `Diamond_s \ (Diamond_s + w)` and `(Diamond_s + w) \ Diamond_s`,
/// with their total divided by `Card Diamond_s`.
#[derive(Debug, Clone, PartialEq)]
pub struct InvarianceDefect {
    pub left: usize,
    pub right: usize,
    pub card: usize,
    pub ratio: f64,
}

pub fn a_invariance_defect(fam: &Family) -> InvarianceDefect {
    let w = w_vector(fam.n());
    let dia = fam.diamond();
    let shifted: Vec<Vec<i64>> = dia.iter().map(|k| k.iter().zip(&w).map(|(a, b)| a + b).collect()).collect();
    let left = dia.iter().filter(|k| !fam.in_diamond(&k.iter().zip(&w).map(|(a, b)| a - b).collect::<Vec<_>>())).count();
    let right = shifted.iter().filter(|k| !fam.in_diamond(k)).count();
    let card = dia.len();
    InvarianceDefect { left, right, card, ratio: (left + right) as f64 / card as f64 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffarith::euler_phi;

    fn y(k: usize) -> Poly {
        Poly::y_pow(k)
    }

    #[test]
    fn family_index_examples() {
        let f = Fq::new(2).unwrap();
        let fam = Family::new(alloc::vec![y(2)], &f).unwrap();
        let lam = fam.lambda();
        assert_eq!(lam.len(), 2);
        assert!(lam.contains(&alloc::vec![RatFunc::y_pow(-2)]));
        let yp1 = RatFunc::new(Poly::from_coeffs(alloc::vec![1, 1]), y(2), &f).unwrap();
        assert!(lam.contains(&alloc::vec![yp1]));
        assert_eq!(fam.diamond(), alloc::vec![alloc::vec![-1, 1], alloc::vec![0, 0]]);
        assert_eq!(fam.k_s(), alloc::vec![-1, 1]);
        assert_eq!(fam.delta(), alloc::vec![alloc::vec![-2, 2], alloc::vec![-1, 1], alloc::vec![0, 0]]);
        assert!(Family::new(alloc::vec![y(3)], &f).is_err());
        assert!(Family::new(alloc::vec![y(2), Poly::from_coeffs(alloc::vec![1, 1])], &f).is_err());
    }

    #[test]
    fn cardinalities_match_formulas() {
        for q in [2u64, 3] {
            let f = Fq::new(q).unwrap();
            for (s, n) in [(alloc::vec![y(1), y(2)], 3usize), (alloc::vec![y(2)], 2), (alloc::vec![Poly::from_coeffs(alloc::vec![1, 1, 1, 1])], 2)] {
                if let Ok(fam) = Family::new(s.clone(), &f) {
                    assert_eq!(fam.n(), n);
                    let expect: u128 = s.iter().map(|p| euler_phi(p, &f).unwrap()).product();
                    assert_eq!(fam.lambda().len() as u128, expect);
                    assert!(fam.in_diamond(&fam.k_s()));
                    for k in fam.diamond() {
                        assert!(fam.in_delta(&k));
                    }
                }
            }
        }
    }

    #[test]
    fn descriptor_roundtrip() {
        let f = Fq::new(3).unwrap();
        let fam = Family::new(alloc::vec![y(1), y(3).add(&y(2), &f)], &f).unwrap();
        let d = fam.descriptor();
        assert_eq!(d, "q=3;n=3;s=Y,Y^3+Y^2");
        assert_eq!(Family::parse_descriptor(&d).unwrap(), fam);
        assert!(Family::parse_descriptor("q=2;n=2;s=Y^3").is_err());
    }

    #[test]
    fn defect_examples() {
        let f = Fq::new(2).unwrap();
        let fam = Family::new(alloc::vec![y(2)], &f).unwrap();
        let d = a_invariance_defect(&fam);
        assert_eq!((d.left, d.right, d.card), (1, 1, 2));
        for dd in (2..=24).step_by(2) {
            let fam = Family::new(alloc::vec![y(dd)], &f).unwrap();
            let d = a_invariance_defect(&fam);
            assert_eq!((d.left, d.right), (1, 1));
        }
    }
}
