//! Dense linear algebra over F_q.

use alloc::vec;
use alloc::vec::Vec;

use crate::ffarith::{Elt, Fq};

/// Row-reduces `a` (rows of equal length) in place and returns the pivot
/// columns.
pub fn rref(a: &mut [Vec<Elt>], f: &Fq) -> Vec<usize> {
    let rows = a.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = a[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| a[i][c] != 0) else { continue };
        a.swap(r, pr);
        let inv = f.inv(a[r][c]);
        for x in a[r].iter_mut() {
            *x = f.mul(*x, inv);
        }
        for i in 0..rows {
            if i != r && a[i][c] != 0 {
                let t = a[i][c];
                for j in 0..cols {
                    let v = f.mul(t, a[r][j]);
                    a[i][j] = f.sub(a[i][j], v);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// A basis of the right kernel `{x : a x = 0}`.
pub fn kernel(a: &[Vec<Elt>], cols: usize, f: &Fq) -> Vec<Vec<Elt>> {
    let mut m: Vec<Vec<Elt>> = a.to_vec();
    let pivots = rref(&mut m, f);
    let mut out = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut x = vec![0; cols];
        x[free] = 1;
        for (r, &pc) in pivots.iter().enumerate() {
            x[pc] = f.neg(m[r][free]);
        }
        out.push(x);
    }
    out
}

/// Solves `a x = b`; returns one solution and a kernel basis, or `None`
/// when inconsistent.
pub fn solve_affine(a: &[Vec<Elt>], b: &[Elt], cols: usize, f: &Fq) -> Option<(Vec<Elt>, Vec<Vec<Elt>>)> {
    let mut m: Vec<Vec<Elt>> = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let mut r = row.clone();
            r.push(bi);
            r
        })
        .collect();
    let pivots = rref(&mut m, f);
    if pivots.contains(&cols) {
        return None;
    }
    let mut x = vec![0; cols];
    for (r, &pc) in pivots.iter().enumerate() {
        x[pc] = m[r][cols];
    }
    let ker = {
        let mut out = Vec::new();
        for free in (0..cols).filter(|c| !pivots.contains(c)) {
            let mut k = vec![0; cols];
            k[free] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                k[pc] = f.neg(m[r][free]);
            }
            out.push(k);
        }
        out
    };
    Some((x, ker))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_and_solve() {
        let f = Fq::new(3).unwrap();
        let a = vec![vec![1, 2, 0], vec![0, 0, 1]];
        let k = kernel(&a, 3, &f);
        assert_eq!(k, vec![vec![1, 1, 0]]);
        let (x, ker) = solve_affine(&a, &[1, 2], 3, &f).unwrap();
        assert_eq!(ker.len(), 1);
        for (row, b) in a.iter().zip([1, 2]) {
            let s = row.iter().zip(&x).fold(0, |acc, (&r, &xi)| f.add(acc, f.mul(r, xi)));
            assert_eq!(s, b);
        }
        assert!(solve_affine(&[vec![0, 0]], &[1], 2, &f).is_none());
    }
}
