//! Rational functions in K = F_q(Y) and the valuation at infinity.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::field::{Elt, Fq};
use super::poly::Poly;
use crate::error::{Error, Result};

/// Valuation at infinity, `v(P/Q) = deg Q - deg P`, with `v(0) = +inf`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Val {
    Fin(i64),
    Inf,
}

impl Val {
    pub fn fin(self) -> Option<i64> {
        match self {
            Val::Fin(v) => Some(v),
            Val::Inf => None,
        }
    }
}

/// Absolute value `|x| = q^{-v(x)}`, stored as its exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AbsQ {
    Zero,
    /// `q^e`
    Pow(i64),
}

impl AbsQ {
    pub fn from_val(v: Val) -> AbsQ {
        match v {
            Val::Inf => AbsQ::Zero,
            Val::Fin(e) => AbsQ::Pow(-e),
        }
    }
    /// Floating value for reporting.
    pub fn to_f64(self, q: u32) -> f64 {
        match self {
            AbsQ::Zero => 0.0,
            AbsQ::Pow(e) => libm::pow(q as f64, e as f64),
        }
    }
}

/// Reduced fraction `num/den` with `den` monic.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly, f: &Fq) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Self::zero());
        }
        let g = num.gcd(&den, f)?;
        let (n, d) = if g.is_one() { (num, den) } else { (num.div_exact(&g, f), den.div_exact(&g, f)) };
        let inv = f.inv(d.lead());
        Ok(RatFunc { num: n.scale(inv, f), den: d.scale(inv, f) })
    }
    pub fn zero() -> Self {
        RatFunc { num: Poly::zero(), den: Poly::one() }
    }
    pub fn one() -> Self {
        RatFunc { num: Poly::one(), den: Poly::one() }
    }
    pub fn from_poly(p: Poly) -> Self {
        RatFunc { num: p, den: Poly::one() }
    }
    pub fn constant(c: Elt) -> Self {
        Self::from_poly(Poly::constant(c))
    }
    /// `Y^k` for any integer `k`.
    pub fn y_pow(k: i64) -> Self {
        if k >= 0 {
            Self::from_poly(Poly::y_pow(k as usize))
        } else {
            RatFunc { num: Poly::one(), den: Poly::y_pow((-k) as usize) }
        }
    }
    pub fn num(&self) -> &Poly {
        &self.num
    }
    pub fn den(&self) -> &Poly {
        &self.den
    }
    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }
    pub fn is_poly(&self) -> bool {
        self.den.is_one()
    }

    pub fn val(&self) -> Val {
        match self.num.deg() {
            None => Val::Inf,
            Some(dn) => Val::Fin(self.den.deg().unwrap() as i64 - dn as i64),
        }
    }
    pub fn abs(&self) -> AbsQ {
        AbsQ::from_val(self.val())
    }

    pub fn add(&self, o: &RatFunc, f: &Fq) -> RatFunc {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            return Self::new(self.num.add(&o.num, f), self.den.clone(), f).unwrap();
        }
        let n = self.num.mul(&o.den, f).add(&o.num.mul(&self.den, f), f);
        Self::new(n, self.den.mul(&o.den, f), f).unwrap()
    }
    pub fn neg(&self, f: &Fq) -> RatFunc {
        RatFunc { num: self.num.neg(f), den: self.den.clone() }
    }
    pub fn sub(&self, o: &RatFunc, f: &Fq) -> RatFunc {
        self.add(&o.neg(f), f)
    }
    pub fn mul(&self, o: &RatFunc, f: &Fq) -> RatFunc {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        if self.is_poly() && o.is_poly() {
            return Self::from_poly(self.num.mul(&o.num, f));
        }
        Self::new(self.num.mul(&o.num, f), self.den.mul(&o.den, f), f).unwrap()
    }
    pub fn mul_poly(&self, p: &Poly, f: &Fq) -> RatFunc {
        self.mul(&Self::from_poly(p.clone()), f)
    }
    pub fn inv(&self, f: &Fq) -> Result<RatFunc> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Self::new(self.den.clone(), self.num.clone(), f)
    }
    pub fn div(&self, o: &RatFunc, f: &Fq) -> Result<RatFunc> {
        Ok(self.mul(&o.inv(f)?, f))
    }
    pub fn scale(&self, c: Elt, f: &Fq) -> RatFunc {
        if c == 0 {
            return Self::zero();
        }
        RatFunc { num: self.num.scale(c, f), den: self.den.clone() }
    }

    /// Coefficients of the expansion in `1/Y` at infinity: entry `j` is the
    /// coefficient of `Y^{-e}` for `e = e0 + j`, covering `e0 <= e < e1`.
    pub fn laurent(&self, e0: i64, e1: i64, f: &Fq) -> Vec<Elt> {
        let len = (e1 - e0).max(0) as usize;
        let mut out = alloc::vec![0; len];
        if self.is_zero() || len == 0 {
            return out;
        }
        // num * Y^s = A den + R  gives num/den = A Y^{-s} + O(Y^{-s-1})
        let s = e1 - 1;
        let dd = self.den.deg().unwrap() as i64;
        let dn = self.num.deg().unwrap() as i64;
        if dn - dd + s < 0 {
            return out;
        }
        let a = if s >= 0 {
            self.num.shift(s as usize).divmod(&self.den, f).unwrap().0
        } else {
            self.num.divmod(&self.den.shift((-s) as usize), f).unwrap().0
        };
        // coefficient of Y^{-e} in A Y^{-s} is A_{s-e}
        for (j, slot) in out.iter_mut().enumerate() {
            let e = e0 + j as i64;
            let idx = s - e;
            if idx >= 0 {
                *slot = a.coeff(idx as usize);
            }
        }
        out
    }

    /// Serializes as `num/den` with polynomial coefficient strings.
    pub fn to_text(&self, f: &Fq) -> String {
        format!("{}/{}", self.num.to_text(f), self.den.to_text(f))
    }
    pub fn parse(text: &str, f: &Fq) -> Result<RatFunc> {
        match text.split_once('/') {
            Some((a, b)) => Self::new(Poly::parse(a, f)?, Poly::parse(b, f)?, f),
            None => Ok(Self::from_poly(Poly::parse(text, f)?)),
        }
    }
    pub fn pretty(&self, f: &Fq) -> String {
        if self.is_poly() {
            self.num.pretty(f)
        } else {
            format!("({})/({})", self.num.pretty(f), self.den.pretty(f))
        }
    }
}

/// Valuation and absolute value of `x`.
pub fn val_abs(x: &RatFunc) -> (Val, AbsQ) {
    (x.val(), x.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn val_abs_examples() {
        assert_eq!(val_abs(&RatFunc::y_pow(1)), (Val::Fin(-1), AbsQ::Pow(1)));
        assert_eq!(val_abs(&RatFunc::y_pow(-1)), (Val::Fin(1), AbsQ::Pow(-1)));
        assert_eq!(val_abs(&RatFunc::zero()), (Val::Inf, AbsQ::Zero));
    }

    #[test]
    fn reduced_and_monic() {
        let f = Fq::new(3).unwrap();
        let x = RatFunc::new(
            Poly::from_coeffs(alloc::vec![0, 2]),
            Poly::from_coeffs(alloc::vec![0, 0, 2]),
            &f,
        )
        .unwrap();
        assert_eq!(x.num(), &Poly::one());
        assert_eq!(x.den(), &Poly::y_pow(1));
    }

    #[test]
    fn laurent_of_inverse() {
        let f = Fq::new(2).unwrap();
        // Y/(Y^2+1) = 1/Y + 1/Y^3 + ...
        let x = RatFunc::new(Poly::y_pow(1), Poly::from_coeffs(alloc::vec![1, 0, 1]), &f).unwrap();
        assert_eq!(x.laurent(0, 5, &f), alloc::vec![0, 1, 0, 1, 0]);
        // Y^2 + 1/Y
        let y = RatFunc::y_pow(2).add(&RatFunc::y_pow(-1), &f);
        assert_eq!(y.laurent(-3, 3, &f), alloc::vec![0, 1, 0, 0, 1, 0]);
        assert_eq!(y.laurent(2, 4, &f), alloc::vec![0, 0]);
    }
}
