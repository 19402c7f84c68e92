//! Square matrices over K and over F_q[Y].

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::error::{Error, Result};
use crate::ffarith::{Fq, Poly, RatFunc, Val};

/// Square matrix over K = F_q(Y), row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MatK {
    n: usize,
    e: Vec<RatFunc>,
}

impl MatK {
    pub fn zero(n: usize) -> Self {
        MatK { n, e: alloc::vec![RatFunc::zero(); n * n] }
    }
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.set(i, i, RatFunc::one());
        }
        m
    }
    pub fn from_rows(rows: Vec<Vec<RatFunc>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension(format!("matrix rows must have length {}", n)));
        }
        Ok(MatK { n, e: rows.into_iter().flatten().collect() })
    }
    /// Matrix whose columns are the given vectors.
    pub fn from_cols(cols: &[Vec<RatFunc>]) -> Result<Self> {
        let n = cols.len();
        if cols.iter().any(|c| c.len() != n) {
            return Err(Error::Dimension(format!("columns must have length {}", n)));
        }
        let mut m = Self::zero(n);
        for (j, c) in cols.iter().enumerate() {
            for (i, x) in c.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        Ok(m)
    }
    pub fn diag(d: &[RatFunc]) -> Self {
        let mut m = Self::zero(d.len());
        for (i, x) in d.iter().enumerate() {
            m.set(i, i, x.clone());
        }
        m
    }
    /// `diag(Y^{k_1}, ..., Y^{k_n})`.
    pub fn exp_diag(k: &[i64]) -> Self {
        let d: Vec<RatFunc> = k.iter().map(|&x| RatFunc::y_pow(x)).collect();
        Self::diag(&d)
    }
    /// Permutation matrix sending `e_j` to `e_{perm[j]}`.
    pub fn permutation(perm: &[usize]) -> Self {
        let mut m = Self::zero(perm.len());
        for (j, &i) in perm.iter().enumerate() {
            m.set(i, j, RatFunc::one());
        }
        m
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn get(&self, i: usize, j: usize) -> &RatFunc {
        &self.e[i * self.n + j]
    }
    pub fn set(&mut self, i: usize, j: usize, x: RatFunc) {
        self.e[i * self.n + j] = x;
    }
    pub fn col(&self, j: usize) -> Vec<RatFunc> {
        (0..self.n).map(|i| self.get(i, j).clone()).collect()
    }
    pub fn entries(&self) -> &[RatFunc] {
        &self.e
    }

    pub fn mul(&self, o: &MatK, f: &Fq) -> MatK {
        let n = self.n;
        let mut m = Self::zero(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = RatFunc::zero();
                for k in 0..n {
                    let a = self.get(i, k);
                    let b = o.get(k, j);
                    if !a.is_zero() && !b.is_zero() {
                        acc = acc.add(&a.mul(b, f), f);
                    }
                }
                m.set(i, j, acc);
            }
        }
        m
    }
    pub fn mul_vec(&self, v: &[RatFunc], f: &Fq) -> Vec<RatFunc> {
        (0..self.n)
            .map(|i| {
                let mut acc = RatFunc::zero();
                for (k, x) in v.iter().enumerate() {
                    if !x.is_zero() && !self.get(i, k).is_zero() {
                        acc = acc.add(&self.get(i, k).mul(x, f), f);
                    }
                }
                acc
            })
            .collect()
    }
    pub fn add(&self, o: &MatK, f: &Fq) -> MatK {
        MatK { n: self.n, e: self.e.iter().zip(&o.e).map(|(a, b)| a.add(b, f)).collect() }
    }
    pub fn sub(&self, o: &MatK, f: &Fq) -> MatK {
        MatK { n: self.n, e: self.e.iter().zip(&o.e).map(|(a, b)| a.sub(b, f)).collect() }
    }
    pub fn scale(&self, c: &RatFunc, f: &Fq) -> MatK {
        MatK { n: self.n, e: self.e.iter().map(|a| a.mul(c, f)).collect() }
    }

    /// Determinant by Gaussian elimination over K.
    pub fn det(&self, f: &Fq) -> RatFunc {
        let n = self.n;
        let mut a = self.e.clone();
        let mut det = RatFunc::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&r| !a[r * n + c].is_zero()) else {
                return RatFunc::zero();
            };
            if p != c {
                for j in 0..n {
                    a.swap(p * n + j, c * n + j);
                }
                det = det.neg(f);
            }
            let piv = a[c * n + c].clone();
            det = det.mul(&piv, f);
            let inv = piv.inv(f).unwrap();
            for r in c + 1..n {
                if a[r * n + c].is_zero() {
                    continue;
                }
                let t = a[r * n + c].mul(&inv, f);
                for j in c..n {
                    let v = t.mul(&a[c * n + j], f);
                    a[r * n + j] = a[r * n + j].sub(&v, f);
                }
            }
        }
        det
    }
    pub fn det_val(&self, f: &Fq) -> Val {
        self.det(f).val()
    }

    /// Inverse by Gauss-Jordan elimination.
    pub fn inverse(&self, f: &Fq) -> Result<MatK> {
        let n = self.n;
        let mut a = self.e.clone();
        let mut b = Self::identity(n).e;
        for c in 0..n {
            let p = (c..n).find(|&r| !a[r * n + c].is_zero()).ok_or(Error::Singular)?;
            if p != c {
                for j in 0..n {
                    a.swap(p * n + j, c * n + j);
                    b.swap(p * n + j, c * n + j);
                }
            }
            let inv = a[c * n + c].inv(f)?;
            for j in 0..n {
                a[c * n + j] = a[c * n + j].mul(&inv, f);
                b[c * n + j] = b[c * n + j].mul(&inv, f);
            }
            for r in 0..n {
                if r == c || a[r * n + c].is_zero() {
                    continue;
                }
                let t = a[r * n + c].clone();
                for j in 0..n {
                    let va = t.mul(&a[c * n + j], f);
                    a[r * n + j] = a[r * n + j].sub(&va, f);
                    let vb = t.mul(&b[c * n + j], f);
                    b[r * n + j] = b[r * n + j].sub(&vb, f);
                }
            }
        }
        Ok(MatK { n, e: b })
    }

    /// Minimum valuation over all entries.
    pub fn min_val(&self) -> Val {
        self.e.iter().map(|x| x.val()).min().unwrap_or(Val::Inf)
    }

    /// Serializes as a header `n=<n> q=<q>` then `n` rows of `num/den`.
    pub fn to_text(&self, f: &Fq) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "n={} q={}", self.n, f.q());
        for i in 0..self.n {
            for j in 0..self.n {
                if j > 0 {
                    s.push(' ');
                }
                s.push_str(&self.get(i, j).to_text(f));
            }
            s.push('\n');
        }
        s
    }
    pub fn parse(text: &str, f: &Fq) -> Result<MatK> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse(String::from("missing header")))?;
        let mut n = None;
        for tok in header.split_whitespace() {
            match tok.split_once('=') {
                Some(("n", v)) => n = v.parse::<usize>().ok(),
                Some(("q", v)) => {
                    if v.parse::<u32>().ok() != Some(f.q()) {
                        return Err(Error::Parse(format!("header q={} does not match field", v)));
                    }
                }
                _ => return Err(Error::Parse(format!("bad header token `{}`", tok))),
            }
        }
        let n = n.ok_or_else(|| Error::Parse(String::from("header lacks n")))?;
        let mut rows = Vec::new();
        for line in lines.by_ref().take(n) {
            let row = line.split_whitespace().map(|t| RatFunc::parse(t, f)).collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        if rows.len() != n {
            return Err(Error::Parse(format!("expected {} rows", n)));
        }
        Self::from_rows(rows)
    }
}

/// Square polynomial matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PMat {
    n: usize,
    e: Vec<Poly>,
}

impl PMat {
    pub fn zero(n: usize) -> Self {
        PMat { n, e: alloc::vec![Poly::zero(); n * n] }
    }
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.set(i, i, Poly::one());
        }
        m
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn get(&self, i: usize, j: usize) -> &Poly {
        &self.e[i * self.n + j]
    }
    pub fn set(&mut self, i: usize, j: usize, x: Poly) {
        self.e[i * self.n + j] = x;
    }
    pub fn col(&self, j: usize) -> Vec<Poly> {
        (0..self.n).map(|i| self.get(i, j).clone()).collect()
    }
    pub fn swap_cols(&mut self, a: usize, b: usize) {
        for i in 0..self.n {
            self.e.swap(i * self.n + a, i * self.n + b);
        }
    }
    /// `col_dst += t * col_src`.
    pub fn col_axpy(&mut self, dst: usize, src: usize, t: &Poly, f: &Fq) {
        if t.is_zero() {
            return;
        }
        for i in 0..self.n {
            let v = self.get(i, src).mul(t, f);
            if !v.is_zero() {
                let nv = self.get(i, dst).add(&v, f);
                self.set(i, dst, nv);
            }
        }
    }
    pub fn scale_col(&mut self, j: usize, c: crate::ffarith::Elt, f: &Fq) {
        for i in 0..self.n {
            let v = self.get(i, j).scale(c, f);
            self.set(i, j, v);
        }
    }
    pub fn permute_rows(&self, order: &[usize]) -> PMat {
        let mut m = Self::zero(self.n);
        for (new, &old) in order.iter().enumerate() {
            for j in 0..self.n {
                m.set(new, j, self.get(old, j).clone());
            }
        }
        m
    }
    /// Degree of column `j` (maximum entry degree), `None` for a zero column.
    pub fn col_deg(&self, j: usize) -> Option<usize> {
        (0..self.n).filter_map(|i| self.get(i, j).deg()).max()
    }
    pub fn to_matk(&self, den: &Poly, f: &Fq) -> MatK {
        let mut m = MatK::zero(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m.set(i, j, RatFunc::new(self.get(i, j).clone(), den.clone(), f).unwrap());
            }
        }
        m
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self, f: &Fq) -> Poly {
        let n = self.n;
        if n == 0 {
            return Poly::one();
        }
        let mut a = self.e.clone();
        let mut prev = Poly::one();
        let mut sign_neg = false;
        for k in 0..n - 1 {
            if a[k * n + k].is_zero() {
                let Some(p) = (k + 1..n).find(|&r| !a[r * n + k].is_zero()) else {
                    return Poly::zero();
                };
                for j in 0..n {
                    a.swap(p * n + j, k * n + j);
                }
                sign_neg = !sign_neg;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let t = a[i * n + j].mul(&a[k * n + k], f).sub(&a[i * n + k].mul(&a[k * n + j], f), f);
                    a[i * n + j] = t.div_exact(&prev, f);
                }
            }
            prev = a[k * n + k].clone();
        }
        let d = a[n * n - 1].clone();
        if sign_neg {
            d.neg(f)
        } else {
            d
        }
    }
    /// Submatrix on the given rows and columns.
    pub fn minor(&self, rows: &[usize], cols: &[usize]) -> PMat {
        let k = rows.len();
        let mut m = Self::zero(k);
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                m.set(a, b, self.get(i, j).clone());
            }
        }
        m
    }
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}
