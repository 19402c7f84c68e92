//! Finite fields F_q as F_p[X]/(m) with lookup tables.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// Field element, encoded as `sum d_i p^i` for the residue `sum d_i X^i`.
pub type Elt = u32;

const MAX_Q: u64 = 1024;

struct Tables {
    p: u32,
    k: u32,
    q: u32,
    modulus: Vec<u32>,
    add: Vec<Elt>,
    mul: Vec<Elt>,
    neg: Vec<Elt>,
    inv: Vec<Elt>,
}

/// Handle to a finite field of order `q = p^k`. Cheap to clone.
#[derive(Clone)]
pub struct Fq(Arc<Tables>);

impl fmt::Debug for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.0.q)
    }
}

impl PartialEq for Fq {
    fn eq(&self, other: &Self) -> bool {
        self.0.q == other.0.q && self.0.modulus == other.0.modulus
    }
}
impl Eq for Fq {}

/// Splits `q` as `p^k` with `p` prime.
pub fn prime_power(q: u64) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2u64;
    while p * p <= q && q % p != 0 {
        p += 1;
    }
    if q % p != 0 {
        p = q;
    }
    let mut r = q;
    let mut k = 0;
    while r % p == 0 {
        r /= p;
        k += 1;
    }
    if r == 1 {
        Some((p as u32, k))
    } else {
        None
    }
}

fn digits(mut x: u32, p: u32, k: u32) -> Vec<u32> {
    let mut d = vec![0; k as usize];
    for slot in d.iter_mut() {
        *slot = x % p;
        x /= p;
    }
    d
}

fn undigits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}

// product of two residues of degree < k modulo a monic modulus of degree k
fn mulmod_prime(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let k = m.len() - 1;
    let mut prod = vec![0u32; 2 * k];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    for top in (k..prod.len()).rev() {
        let c = prod[top];
        if c == 0 {
            continue;
        }
        for (i, &mi) in m.iter().enumerate().take(k) {
            let idx = top - k + i;
            prod[idx] = (prod[idx] + (p - c) * mi % p) % p;
        }
        prod[top] = 0;
    }
    prod.truncate(k);
    prod
}

fn irreducible_over_prime(m: &[u32], p: u32) -> bool {
    // no monic factor of degree 1..=deg/2, by brute force on small moduli
    let k = m.len() - 1;
    for d in 1..=k / 2 {
        let count = (p as usize).pow(d as u32);
        for code in 0..count {
            let mut g = digits(code as u32, p, d as u32);
            g.push(1);
            if rem_prime(m, &g, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn rem_prime(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    while r.len() > db {
        let c = *r.last().unwrap();
        let shift = r.len() - 1 - db;
        for (i, &bi) in b.iter().enumerate() {
            r[shift + i] = (r[shift + i] + (p - c) * bi % p) % p;
        }
        r.pop();
    }
    r
}

impl Fq {
    /// Field of order `q`, using the smallest monic irreducible modulus in
    /// base-p lexicographic order.
    pub fn new(q: u64) -> Result<Self> {
        let (p, k) = prime_power(q).ok_or(Error::NotPrimePower(q))?;
        if q > MAX_Q {
            return Err(Error::FieldTooLarge(q));
        }
        let modulus = if k == 1 {
            vec![0, 1]
        } else {
            let count = (p as u64).pow(k) as u32;
            let mut found = None;
            for code in 0..count {
                let mut m = digits(code, p, k);
                m.push(1);
                if irreducible_over_prime(&m, p) {
                    found = Some(m);
                    break;
                }
            }
            found.expect("an irreducible polynomial exists in every degree")
        };
        Ok(Self::build(p, k, modulus))
    }

    fn build(p: u32, k: u32, modulus: Vec<u32>) -> Self {
        let q = p.pow(k);
        let qs = q as usize;
        let mut add = vec![0; qs * qs];
        let mut mul = vec![0; qs * qs];
        let dig: Vec<Vec<u32>> = (0..q).map(|x| digits(x, p, k)).collect();
        for a in 0..qs {
            for b in 0..qs {
                let s: Vec<u32> = dig[a].iter().zip(&dig[b]).map(|(x, y)| (x + y) % p).collect();
                add[a * qs + b] = undigits(&s, p);
                let m = if k == 1 {
                    vec![(a as u32 * b as u32) % p]
                } else {
                    mulmod_prime(&dig[a], &dig[b], &modulus, p)
                };
                mul[a * qs + b] = undigits(&m, p);
            }
        }
        let mut neg = vec![0; qs];
        let mut inv = vec![0; qs];
        for a in 0..qs {
            for b in 0..qs {
                if add[a * qs + b] == 0 {
                    neg[a] = b as Elt;
                }
                if mul[a * qs + b] == 1 {
                    inv[a] = b as Elt;
                }
            }
        }
        Fq(Arc::new(Tables { p, k, q, modulus, add, mul, neg, inv }))
    }

    pub fn q(&self) -> u32 {
        self.0.q
    }
    pub fn p(&self) -> u32 {
        self.0.p
    }
    pub fn k(&self) -> u32 {
        self.0.k
    }
    /// Coefficients of the defining modulus over F_p, low degree first.
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    #[inline]
    pub fn add(&self, a: Elt, b: Elt) -> Elt {
        self.0.add[(a * self.0.q + b) as usize]
    }
    #[inline]
    pub fn sub(&self, a: Elt, b: Elt) -> Elt {
        self.add(a, self.neg(b))
    }
    #[inline]
    pub fn mul(&self, a: Elt, b: Elt) -> Elt {
        self.0.mul[(a * self.0.q + b) as usize]
    }
    #[inline]
    pub fn neg(&self, a: Elt) -> Elt {
        self.0.neg[a as usize]
    }
    /// Multiplicative inverse; panics on zero.
    #[inline]
    pub fn inv(&self, a: Elt) -> Elt {
        assert!(a != 0, "inverse of zero in F_q");
        self.0.inv[a as usize]
    }
    #[inline]
    pub fn div(&self, a: Elt, b: Elt) -> Elt {
        self.mul(a, self.inv(b))
    }

    /// Nonzero elements in increasing code order.
    pub fn units(&self) -> impl Iterator<Item = Elt> {
        1..self.0.q
    }
    pub fn elements(&self) -> impl Iterator<Item = Elt> {
        0..self.0.q
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_powers() {
        assert_eq!(prime_power(2), Some((2, 1)));
        assert_eq!(prime_power(4), Some((2, 2)));
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(6), None);
        assert_eq!(prime_power(1), None);
    }

    #[test]
    fn field_axioms_small() {
        for q in [2u64, 3, 4, 5, 8, 9] {
            let f = Fq::new(q).unwrap();
            for a in f.elements() {
                assert_eq!(f.add(a, f.neg(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a)), 1);
                }
                for b in f.elements() {
                    for c in f.elements() {
                        let l = f.mul(a, f.add(b, c));
                        let r = f.add(f.mul(a, b), f.mul(a, c));
                        assert_eq!(l, r);
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_non_prime_power() {
        assert!(matches!(Fq::new(6), Err(Error::NotPrimePower(6))));
    }
}
