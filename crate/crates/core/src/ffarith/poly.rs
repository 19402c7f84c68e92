//! Polynomials over F_q in the variable Y.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use super::field::{Elt, Fq};
use crate::error::{Error, Result};

/// Degree with a distinct sentinel for the zero polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    NegInf,
    Finite(usize),
}

/// Polynomial in F_q[Y], coefficients low degree first, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Poly {
    c: Vec<Elt>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { c: Vec::new() }
    }
    pub fn one() -> Self {
        Poly { c: vec![1] }
    }
    pub fn constant(a: Elt) -> Self {
        Self::from_coeffs(vec![a])
    }
    /// The monomial `Y^k`.
    pub fn y_pow(k: usize) -> Self {
        let mut c = vec![0; k + 1];
        c[k] = 1;
        Poly { c }
    }
    pub fn from_coeffs(mut c: Vec<Elt>) -> Self {
        while c.last() == Some(&0) {
            c.pop();
        }
        Poly { c }
    }
    pub fn coeffs(&self) -> &[Elt] {
        &self.c
    }
    pub fn coeff(&self, i: usize) -> Elt {
        self.c.get(i).copied().unwrap_or(0)
    }
    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }
    pub fn is_one(&self) -> bool {
        self.c.len() == 1 && self.c[0] == 1
    }
    pub fn degree(&self) -> Degree {
        match self.c.len() {
            0 => Degree::NegInf,
            l => Degree::Finite(l - 1),
        }
    }
    /// Degree, or `None` for the zero polynomial.
    pub fn deg(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }
    /// Degree as a signed integer; the zero polynomial maps to `i64::MIN`.
    pub fn deg_i(&self) -> i64 {
        self.deg().map_or(i64::MIN, |d| d as i64)
    }
    pub fn lead(&self) -> Elt {
        self.c.last().copied().unwrap_or(0)
    }
    pub fn is_monic(&self) -> bool {
        self.lead() == 1
    }
    pub fn is_constant(&self) -> bool {
        self.c.len() <= 1
    }

    pub fn add(&self, o: &Poly, f: &Fq) -> Poly {
        let n = self.c.len().max(o.c.len());
        let c = (0..n).map(|i| f.add(self.coeff(i), o.coeff(i))).collect();
        Poly::from_coeffs(c)
    }
    pub fn sub(&self, o: &Poly, f: &Fq) -> Poly {
        let n = self.c.len().max(o.c.len());
        let c = (0..n).map(|i| f.sub(self.coeff(i), o.coeff(i))).collect();
        Poly::from_coeffs(c)
    }
    pub fn neg(&self, f: &Fq) -> Poly {
        Poly { c: self.c.iter().map(|&a| f.neg(a)).collect() }
    }
    pub fn scale(&self, a: Elt, f: &Fq) -> Poly {
        if a == 0 {
            return Poly::zero();
        }
        Poly { c: self.c.iter().map(|&x| f.mul(x, a)).collect() }
    }
    /// Multiplication by `Y^k`.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![0; k];
        c.extend_from_slice(&self.c);
        Poly { c }
    }
    pub fn mul(&self, o: &Poly, f: &Fq) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![0; self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                c[i + j] = f.add(c[i + j], f.mul(a, b));
            }
        }
        Poly::from_coeffs(c)
    }
    pub fn pow(&self, e: u32, f: &Fq) -> Poly {
        let mut r = Poly::one();
        for _ in 0..e {
            r = r.mul(self, f);
        }
        r
    }

    /// Euclidean division: `self = quot * b + rem` with `deg rem < deg b`.
    pub fn divmod(&self, b: &Poly, f: &Fq) -> Result<(Poly, Poly)> {
        let db = b.deg().ok_or(Error::DivisionByZero)?;
        if self.c.len() <= db {
            return Ok((Poly::zero(), self.clone()));
        }
        let inv = f.inv(b.lead());
        let mut r = self.c.clone();
        let mut qc = vec![0; r.len() - db];
        for top in (db..r.len()).rev() {
            let c = r[top];
            if c == 0 {
                continue;
            }
            let t = f.mul(c, inv);
            let s = top - db;
            qc[s] = t;
            for (i, &bi) in b.c.iter().enumerate() {
                r[s + i] = f.sub(r[s + i], f.mul(t, bi));
            }
        }
        r.truncate(db);
        Ok((Poly::from_coeffs(qc), Poly::from_coeffs(r)))
    }
    pub fn rem(&self, b: &Poly, f: &Fq) -> Result<Poly> {
        Ok(self.divmod(b, f)?.1)
    }
    /// Exact quotient; panics if `b` is zero.
    pub fn div_exact(&self, b: &Poly, f: &Fq) -> Poly {
        let (q, r) = self.divmod(b, f).expect("division by zero polynomial");
        debug_assert!(r.is_zero());
        q
    }
    pub fn divides(&self, a: &Poly, f: &Fq) -> bool {
        if self.is_zero() {
            return a.is_zero();
        }
        a.rem(self, f).map(|r| r.is_zero()).unwrap_or(false)
    }
    pub fn monic(&self, f: &Fq) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        self.scale(f.inv(self.lead()), f)
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, o: &Poly, f: &Fq) -> Result<Poly> {
        if self.is_zero() && o.is_zero() {
            return Err(Error::GcdOfZeros);
        }
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let r = a.rem(&b, f)?;
            a = b;
            b = r;
        }
        Ok(a.monic(f))
    }
    /// Returns `(g, u, v)` with `u*self + v*o = g` and `g` monic.
    pub fn ext_gcd(&self, o: &Poly, f: &Fq) -> Result<(Poly, Poly, Poly)> {
        if self.is_zero() && o.is_zero() {
            return Err(Error::GcdOfZeros);
        }
        let (mut r0, mut r1) = (self.clone(), o.clone());
        let (mut s0, mut s1) = (Poly::one(), Poly::zero());
        let (mut t0, mut t1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (qq, r) = r0.divmod(&r1, f)?;
            let s = s0.sub(&qq.mul(&s1, f), f);
            let t = t0.sub(&qq.mul(&t1, f), f);
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
            t0 = t1;
            t1 = t;
        }
        let inv = f.inv(r0.lead());
        Ok((r0.scale(inv, f), s0.scale(inv, f), t0.scale(inv, f)))
    }
    /// Inverse of `self` modulo `m`, when coprime.
    pub fn inv_mod(&self, m: &Poly, f: &Fq) -> Option<Poly> {
        let (g, u, _) = self.ext_gcd(m, f).ok()?;
        if !g.is_one() {
            return None;
        }
        u.rem(m, f).ok()
    }
    /// `self^e mod m`.
    pub fn pow_mod(&self, mut e: u128, m: &Poly, f: &Fq) -> Poly {
        let mut base = self.rem(m, f).expect("nonzero modulus");
        let mut r = Poly::one().rem(m, f).expect("nonzero modulus");
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&base, f).rem(m, f).unwrap();
            }
            base = base.mul(&base, f).rem(m, f).unwrap();
            e >>= 1;
        }
        r
    }

    /// Monic polynomial of degree `d` with lower coefficients given by the
    /// base-q digits of `code`.
    pub fn monic_from_code(d: usize, mut code: u64, q: u32) -> Poly {
        let mut c = Vec::with_capacity(d + 1);
        for _ in 0..d {
            c.push((code % q as u64) as Elt);
            code /= q as u64;
        }
        c.push(1);
        Poly { c }
    }
    /// Polynomial of degree `< d` with coefficients given by the base-q
    /// digits of `code`.
    pub fn from_code(d: usize, mut code: u64, q: u32) -> Poly {
        let mut c = Vec::with_capacity(d);
        for _ in 0..d {
            c.push((code % q as u64) as Elt);
            code /= q as u64;
        }
        Poly::from_coeffs(c)
    }

    /// Serializes as `c0,c1,...,cd`, each coefficient written in base p;
    /// the zero polynomial is `0`.
    pub fn to_text(&self, f: &Fq) -> String {
        if self.is_zero() {
            return String::from("0");
        }
        let mut s = String::new();
        for (i, &c) in self.c.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            write_elt(&mut s, c, f);
        }
        s
    }
    pub fn parse(text: &str, f: &Fq) -> Result<Poly> {
        let t = text.trim();
        if t.is_empty() {
            return Err(Error::Parse(String::from("empty polynomial")));
        }
        let mut c = Vec::new();
        for part in t.split(',') {
            c.push(parse_elt(part.trim(), f)?);
        }
        Ok(Poly::from_coeffs(c))
    }

    /// Human-readable form such as `Y^2+2Y+1`.
    pub fn pretty(&self, f: &Fq) -> String {
        if self.is_zero() {
            return String::from("0");
        }
        let mut s = String::new();
        for (i, &c) in self.c.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !s.is_empty() {
                s.push('+');
            }
            let show_c = c != 1 || i == 0;
            if show_c {
                if f.k() > 1 {
                    s.push('[');
                    write_elt(&mut s, c, f);
                    s.push(']');
                } else {
                    write_elt(&mut s, c, f);
                }
            }
            match i {
                0 => {}
                1 => s.push('Y'),
                _ => {
                    let _ = write!(s, "Y^{}", i);
                }
            }
        }
        s
    }
    /// Parses the form produced by [`Poly::pretty`], e.g. `Y^3+Y+1` or
    /// `[10]Y^2+1` when q is not prime.
    pub fn parse_pretty(text: &str, f: &Fq) -> Result<Poly> {
        let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let err = || Error::Parse(alloc::format!("bad polynomial `{}`", text));
        if t.is_empty() {
            return Err(err());
        }
        let mut acc = Poly::zero();
        for term in t.split('+') {
            let (coef, rest) = if let Some(r) = term.strip_prefix('[') {
                let (c, rest) = r.split_once(']').ok_or_else(err)?;
                (parse_elt(c, f)?, rest)
            } else {
                let end = term.find('Y').unwrap_or(term.len());
                if end == 0 {
                    (1, term)
                } else {
                    (parse_elt(&term[..end], f)?, &term[end..])
                }
            };
            let e = if rest.is_empty() {
                0
            } else if rest == "Y" {
                1
            } else {
                let ds = rest.strip_prefix("Y^").ok_or_else(err)?;
                ds.parse::<usize>().map_err(|_| err())?
            };
            acc = acc.add(&Poly::y_pow(e).scale(coef, f), f);
        }
        Ok(acc)
    }
}

fn write_elt(s: &mut String, c: Elt, f: &Fq) {
    if f.k() == 1 {
        let _ = write!(s, "{}", c);
        return;
    }
    let p = f.p();
    let mut d = Vec::new();
    let mut x = c;
    for _ in 0..f.k() {
        d.push(x % p);
        x /= p;
    }
    while d.len() > 1 && *d.last().unwrap() == 0 {
        d.pop();
    }
    for &x in d.iter().rev() {
        let _ = write!(s, "{}", x);
    }
}

fn parse_elt(t: &str, f: &Fq) -> Result<Elt> {
    let err = || Error::Parse(alloc::format!("bad coefficient `{}`", t));
    if t.is_empty() {
        return Err(err());
    }
    if f.k() == 1 {
        let v: u32 = t.parse().map_err(|_| err())?;
        if v >= f.p() {
            return Err(err());
        }
        return Ok(v);
    }
    if t.len() > f.k() as usize {
        return Err(err());
    }
    let mut v = 0u32;
    for ch in t.chars() {
        let d = ch.to_digit(10).ok_or_else(err)?;
        if d >= f.p() {
            return Err(err());
        }
        v = v * f.p() + d;
    }
    Ok(v)
}
