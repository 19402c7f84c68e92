//! Exact thin-part counts for families.
//!
//! For `j >= 1` and `k` with `k_i > -j` (`i >= 2`), the vectors of
//! `exp(k) x_t` of norm `<= q^{-j}` correspond to the `lambda` in
//!
//! `V_t = {lambda : deg lambda <= D, deg(lambda r_i mod s_i) <= e_i}`,
//!
//! with `D = -j - k_1` and `e_i = deg s_i - j - k_i`, so thinness of
//! `exp(k) x_t` is `V_t != 0`. Each condition is `F_q`-linear in `lambda`.
//!
//! The generic path tests `V_t != 0` for every `t`. Over `F_2` there is a
//! faster path: fixing `r_2` and writing `U = {lambda : condition 2}`,
//!
//! `#{(r_3..r_n) : V_t != 0} = sum_{0 != W <= U} (-1)^{dim W + 1} 2^{C(dim W, 2)} prod_{i >= 3} c_i(W)`
//!
//! where `c_i(W)` counts the units `r_i` whose condition space contains
//! `W`. Those units form a subspace minus the multiples of the prime
//! factors of `s_i`, so `c_i(W)` is an inclusion-exclusion of ranks.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::ffarith::{factor_monic, Elt, Fq, Poly, Q};
use crate::latcore::linalg::rref;

use super::family::Family;
use super::invariants::{build_x_t, exp_k};
use super::measure::interval;

/// Rows over `lambda`-coordinates `0..dim` expressing
/// `deg(lambda r mod s) <= e`.
fn condition_rows(r: &Poly, s: &Poly, dim: usize, e: i64, f: &Fq) -> Vec<Vec<Elt>> {
    let ds = s.deg().unwrap() as i64;
    let lo = (e + 1).max(0);
    let mut a = alloc::vec![alloc::vec![0 as Elt; dim]; (ds - lo).max(0) as usize];
    let mut x = r.rem(s, f).unwrap();
    let y = Poly::y_pow(1);
    for col in 0..dim {
        for (ri, deg) in (lo..ds).enumerate() {
            a[ri][col] = x.coeff(deg as usize);
        }
        x = x.mul(&y, f).rem(s, f).unwrap();
    }
    a
}

fn validate(fam: &Family, k: &[i64], j: i64) -> Result<Option<usize>> {
    let n = fam.n();
    if k.len() != n || k.iter().sum::<i64>() != 0 {
        return Err(Error::Dimension(format!("k must lie in Z_0^{}", n)));
    }
    if j < 1 {
        return Err(Error::OutOfRange(format!("j = {} < 1", j)));
    }
    if let Some(i) = (1..n).find(|&i| k[i] <= -j) {
        return Err(Error::Hypothesis(format!("k_{} = {} <= -j = {}", i + 1, k[i], -j)));
    }
    let d = -j - k[0];
    Ok(if d < 0 { None } else { Some((d + 1) as usize) })
}

/// `#{t in Lambda_s : exp(k) x_t has a nonzero vector of norm <= q^{-j}}`.
pub fn thin_count_exact(fam: &Family, k: &[i64], j: i64) -> Result<u128> {
    let Some(dim) = validate(fam, k, j)? else { return Ok(0) };
    let f = fam.field();
    let fits = dim <= 64 && fam.s().iter().all(|s| s.deg().unwrap() < 64);
    if f.q() == 2 && fits {
        gf2::count(fam, k, j, dim)
    } else {
        thin_count_direct(fam, k, j)
    }
}

/// Same count by testing `V_t != 0` for every `t`.
pub fn thin_count_direct(fam: &Family, k: &[i64], j: i64) -> Result<u128> {
    let Some(dim) = validate(fam, k, j)? else { return Ok(0) };
    let f = fam.field();
    let n = fam.n();
    let blocks: Vec<Vec<Vec<Vec<Elt>>>> = (0..n - 1)
        .map(|i| {
            let s = &fam.s()[i];
            let e = s.deg().unwrap() as i64 - j - k[i + 1];
            fam.residues(i).iter().map(|r| condition_rows(r, s, dim, e, f)).collect()
        })
        .collect();
    let mut idx = alloc::vec![0usize; n - 1];
    let mut count = 0u128;
    loop {
        let mut m: Vec<Vec<Elt>> = Vec::new();
        for (i, &x) in idx.iter().enumerate() {
            m.extend(blocks[i][x].iter().cloned());
        }
        if rref(&mut m, f).len() < dim {
            count += 1;
        }
        let mut pos = n - 2;
        loop {
            idx[pos] += 1;
            if idx[pos] < blocks[pos].len() {
                break;
            }
            idx[pos] = 0;
            if pos == 0 {
                return Ok(count);
            }
            pos -= 1;
        }
    }
}

/// Same count by reducing every `exp(k) x_t`.
pub fn thin_count_brute(fam: &Family, k: &[i64], j: i64) -> Result<u128> {
    let f = fam.field();
    let e = exp_k(k);
    let mut c = 0u128;
    for t in fam.lambda() {
        let l = build_x_t(&t, f)?.act(&e)?;
        if l.min_log_norm() <= -j {
            c += 1;
        }
    }
    Ok(c)
}

/// Exact `nu_{s,[k,N]}` mass of `{sys <= q^{-j}}`.
pub fn interval_thin_mass(fam: &Family, k: &[i64], len: usize, j: i64) -> Result<Q> {
    if len == 0 || !fam.in_diamond(k) {
        return Err(Error::Hypothesis(format!("k = {:?} is not in Diamond_s", k)));
    }
    let ks = interval(k, len);
    if !fam.in_diamond(ks.last().unwrap()) {
        return Err(Error::Hypothesis(format!("interval leaves Diamond_s")));
    }
    let card = fam.card_lambda()?;
    let mut total: i128 = 0;
    for kk in &ks {
        total += thin_count_exact(fam, kk, j)? as i128;
    }
    Ok(Q::new(total, card as i128 * len as i128))
}

mod gf2 {
    use super::*;

    fn bits(p: &Poly) -> u64 {
        p.coeffs().iter().enumerate().fold(0u64, |acc, (i, &c)| acc | ((c as u64 & 1) << i))
    }

    /// `Y^c mod s` for `c < count`.
    fn ypows(s: u64, ds: usize, count: usize) -> Vec<u64> {
        let mut out = Vec::with_capacity(count);
        let mut x = if ds == 0 { 0 } else { 1u64 };
        for _ in 0..count {
            out.push(x);
            x <<= 1;
            if x >> ds & 1 == 1 {
                x ^= s;
            }
        }
        out
    }

    /// Echelon basis keyed by leading bit.
    #[derive(Clone)]
    struct Echelon {
        piv: [u64; 64],
        rank: u32,
    }

    impl Echelon {
        fn new() -> Self {
            Echelon { piv: [0; 64], rank: 0 }
        }
        /// Inserts `v`, returning the new pivot bit if the rank grew.
        fn insert(&mut self, mut v: u64) -> Option<u8> {
            while v != 0 {
                let b = 63 - v.leading_zeros() as usize;
                if self.piv[b] == 0 {
                    self.piv[b] = v;
                    self.rank += 1;
                    return Some(b as u8);
                }
                v ^= self.piv[b];
            }
            None
        }
        fn remove(&mut self, b: u8) {
            self.piv[b as usize] = 0;
            self.rank -= 1;
        }
    }

    /// `lambda`-rows of the condition `deg(lambda r mod s) <= e`, i.e. the
    /// coefficients of degree `lo..ds` of `Y^a r mod s` as bits over `a`.
    fn lambda_rows(r: u64, s: u64, ds: usize, lo: usize, dim: usize) -> Vec<u64> {
        let mut cols = Vec::with_capacity(dim);
        let mut x = r;
        for _ in 0..dim {
            cols.push(x);
            x <<= 1;
            if x >> ds & 1 == 1 {
                x ^= s;
            }
        }
        (lo..ds).map(|p| cols.iter().enumerate().fold(0u64, |acc, (a, &c)| acc | ((c >> p & 1) << a))).collect()
    }

    fn kernel_basis(mut rows: Vec<u64>, dim: usize) -> Vec<u64> {
        let mut pivots: Vec<usize> = Vec::new();
        let mut rank = 0;
        for c in 0..dim {
            let Some(pr) = (rank..rows.len()).find(|&i| rows[i] >> c & 1 == 1) else { continue };
            rows.swap(rank, pr);
            let pivot_row = rows[rank];
            for (i, row) in rows.iter_mut().enumerate() {
                if i != rank && *row >> c & 1 == 1 {
                    *row ^= pivot_row;
                }
            }
            pivots.push(c);
            rank += 1;
        }
        (0..dim)
            .filter(|c| !pivots.contains(c))
            .map(|free| {
                let mut v = 1u64 << free;
                for (ri, &pc) in pivots.iter().enumerate() {
                    if rows[ri] >> free & 1 == 1 {
                        v |= 1 << pc;
                    }
                }
                v
            })
            .collect()
    }

    /// Data for `c_i(W)` on one coordinate.
    struct Coord {
        ds: u32,
        /// `rows[a][p]`: the `r`-row giving coefficient `lo + p` of `Y^a r mod s`.
        rows: Vec<Vec<u64>>,
        /// Inclusion-exclusion terms: sign and echelon seeded with `r = 0 mod g`.
        terms: Vec<(i128, Echelon)>,
        /// `lambda`-rows for every unit residue.
        residue_rows: Vec<Vec<u64>>,
    }

    impl Coord {
        fn new(fam: &Family, i: usize, e: i64, dim: usize) -> Result<Coord> {
            let f = fam.field();
            let s = &fam.s()[i];
            let ds = s.deg().unwrap();
            let sb = bits(s);
            let lo = (e + 1).max(0) as usize;
            let yp = ypows(sb, ds, dim + ds);
            let rows = (0..dim)
                .map(|a| {
                    (lo..ds)
                        .map(|p| (0..ds).fold(0u64, |acc, b| acc | ((yp[a + b] >> p & 1) << b)))
                        .collect()
                })
                .collect();
            let primes: Vec<Poly> = factor_monic(s, f)?.factors.into_iter().map(|(p, _)| p).collect();
            let mut terms = Vec::new();
            for mask in 0..(1usize << primes.len()) {
                let mut g = Poly::one();
                for (i, p) in primes.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        g = g.mul(p, f);
                    }
                }
                let dg = g.deg().unwrap();
                let gp = ypows(bits(&g), dg, ds);
                let mut ech = Echelon::new();
                for c in 0..dg {
                    ech.insert((0..ds).fold(0u64, |acc, b| acc | ((gp[b] >> c & 1) << b)));
                }
                let sign = if mask.count_ones() % 2 == 0 { 1 } else { -1 };
                terms.push((sign, ech));
            }
            let residue_rows = fam.residues(i).iter().map(|r| lambda_rows(bits(r), sb, ds, lo, dim)).collect();
            Ok(Coord { ds: ds as u32, rows, terms, residue_rows })
        }
    }

    /// Möbius sum over the subspaces of `span(basis)`, by depth-first
    /// enumeration of reduced bases with pivots added in decreasing order.
    /// A subspace element is addressed by its coordinate mask `x` in the
    /// basis; `rows[ci][x]` holds its condition rows on coordinate `ci`.
    /// Echelon states are updated in place and rolled back.
    struct Dfs<'a> {
        u: usize,
        coords: &'a [Coord],
        rows: Vec<Vec<Vec<u64>>>,
        state: Vec<Echelon>,
        undo: Vec<(u16, u8)>,
        acc: i128,
    }

    impl<'a> Dfs<'a> {
        fn new(basis: &[u64], coords: &'a [Coord], init: &[Echelon]) -> Self {
            let u = basis.len();
            let rows = coords
                .iter()
                .map(|c| {
                    let nrows = c.rows.first().map_or(0, |r| r.len());
                    let single: Vec<Vec<u64>> = basis
                        .iter()
                        .map(|&b| {
                            let mut acc = alloc::vec![0u64; nrows];
                            let mut l = b;
                            while l != 0 {
                                let a = l.trailing_zeros() as usize;
                                for (x, r) in acc.iter_mut().zip(&c.rows[a]) {
                                    *x ^= r;
                                }
                                l &= l - 1;
                            }
                            acc
                        })
                        .collect();
                    let mut table = alloc::vec![alloc::vec![0u64; nrows]; 1 << u];
                    for x in 1..(1usize << u) {
                        let low = x.trailing_zeros() as usize;
                        let prev = x & (x - 1);
                        let row: Vec<u64> = table[prev].iter().zip(&single[low]).map(|(a, b)| a ^ b).collect();
                        table[x] = row;
                    }
                    table
                })
                .collect();
            Dfs { u, coords, rows, state: init.to_vec(), undo: Vec::new(), acc: 0 }
        }

        fn push(&mut self, x: usize) -> (usize, i128) {
            let mark = self.undo.len();
            let mut prod: i128 = 1;
            let mut slot = 0usize;
            for (ci, c) in self.coords.iter().enumerate() {
                let rows = &self.rows[ci][x];
                let mut cnt: i128 = 0;
                for (ti, (sign, _)) in c.terms.iter().enumerate() {
                    let ech = &mut self.state[slot + ti];
                    for &row in rows {
                        if let Some(b) = ech.insert(row) {
                            self.undo.push(((slot + ti) as u16, b));
                        }
                    }
                    cnt += sign * (1i128 << (c.ds - ech.rank));
                }
                slot += c.terms.len();
                prod *= cnt;
                if prod == 0 {
                    break;
                }
            }
            (mark, prod)
        }

        fn pop(&mut self, mark: usize) {
            while self.undo.len() > mark {
                let (slot, b) = self.undo.pop().unwrap();
                self.state[slot as usize].remove(b);
            }
        }

        fn rec(&mut self, below: usize, chosen: usize, depth: u32) {
            let all = (1usize << self.u) - 1;
            for pivot in 0..below {
                let free = all & !chosen & !((1usize << (pivot + 1)) - 1);
                let mut sub = 0usize;
                loop {
                    let (mark, prod) = self.push(sub | 1 << pivot);
                    if prod != 0 {
                        let w = depth + 1;
                        let sign = if w % 2 == 1 { 1 } else { -1 };
                        self.acc += sign * (1i128 << (w * (w - 1) / 2)) * prod;
                        self.rec(pivot, chosen | 1 << pivot, w);
                    }
                    self.pop(mark);
                    sub = (sub.wrapping_sub(free)) & free;
                    if sub == 0 {
                        break;
                    }
                }
            }
        }
    }

    /// Reduced echelon basis, so that equal spans give equal keys.
    fn canonical(basis: Vec<u64>) -> Vec<u64> {
        let mut b = basis;
        for i in 0..b.len() {
            b[i..].sort_unstable_by(|x, y| y.cmp(x));
            if b[i] == 0 {
                b.truncate(i);
                break;
            }
            let top = 63 - b[i].leading_zeros();
            for r in 0..b.len() {
                if r != i && (b[r] >> top) & 1 == 1 {
                    b[r] ^= b[i];
                }
            }
        }
        b
    }

    /// Number of subspaces of `F_2^u`, saturating.
    fn subspace_total(u: usize) -> u128 {
        // g(u) = 2 g(u-1) + (2^{u-1} - 1) g(u-2) (Goldman-Rota).
        let (mut a, mut b) = (1u128, 2u128);
        if u == 0 {
            return 1;
        }
        for k in 2..=u {
            let next = b.saturating_mul(2).saturating_add(((1u128 << (k - 1)) - 1).saturating_mul(a));
            a = b;
            b = next;
        }
        b
    }

    /// Whether `span(basis)` meets the condition spaces of some tuple of the
    /// other coordinates, counted over all such tuples by direct rank tests.
    fn direct(basis: &[u64], coords: &[Coord]) -> u128 {
        let u = basis.len();
        let restrict = |row: u64| -> u64 {
            basis.iter().enumerate().fold(0u64, |acc, (c, &b)| acc | (((row & b).count_ones() as u64 & 1) << c))
        };
        let restricted: Vec<Vec<Vec<u64>>> = coords
            .iter()
            .map(|c| c.residue_rows.iter().map(|rows| rows.iter().map(|&r| restrict(r)).collect()).collect())
            .collect();
        let mut idx = alloc::vec![0usize; coords.len()];
        let mut count = 0u128;
        loop {
            let mut ech = Echelon::new();
            for (i, &x) in idx.iter().enumerate() {
                for &row in &restricted[i][x] {
                    ech.insert(row);
                }
            }
            if (ech.rank as usize) < u {
                count += 1;
            }
            let mut pos = coords.len();
            loop {
                if pos == 0 {
                    return count;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < coords[pos].residue_rows.len() {
                    break;
                }
                idx[pos] = 0;
            }
        }
    }

    pub(super) fn count(fam: &Family, k: &[i64], j: i64, dim: usize) -> Result<u128> {
        let n = fam.n();
        let e: Vec<i64> = (0..n - 1).map(|i| fam.s()[i].deg().unwrap() as i64 - j - k[i + 1]).collect();
        let rows = |i: usize| fam.s()[i].deg().unwrap() as i64 - (e[i] + 1).max(0);
        let first = (0..n - 1).max_by_key(|&i| (rows(i), core::cmp::Reverse(i))).unwrap();
        let first_coord = Coord::new(fam, first, e[first], dim)?;
        let coords: Vec<Coord> =
            (0..n - 1).filter(|&i| i != first).map(|i| Coord::new(fam, i, e[i], dim)).collect::<Result<_>>()?;
        let tuples: u128 = coords.iter().map(|c| c.residue_rows.len() as u128).product();
        let init: Vec<Echelon> = coords.iter().flat_map(|c| c.terms.iter().map(|(_, ech)| ech.clone())).collect();
        let mut total: i128 = 0;
        let mut memo: BTreeMap<Vec<u64>, i128> = BTreeMap::new();
        for lrows in &first_coord.residue_rows {
            let basis = canonical(kernel_basis(lrows.clone(), dim));
            if basis.is_empty() {
                continue;
            }
            if coords.is_empty() {
                total += 1;
                continue;
            }
            if let Some(v) = memo.get(&basis) {
                total += v;
                continue;
            }
            let before = total;
            if basis.len() > 20 || tuples.saturating_mul(4) < subspace_total(basis.len()) {
                total += direct(&basis, &coords) as i128;
                memo.insert(basis, total - before);
                continue;
            }
            let mut dfs = Dfs::new(&basis, &coords, &init);
            dfs.rec(basis.len(), 0, 0);
            total += dfs.acc;
            memo.insert(basis, total - before);
        }
        Ok(total as u128)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn families(f: &Fq) -> Vec<Family> {
        let cands = [
            alloc::vec![Poly::y_pow(2)],
            alloc::vec![Poly::y_pow(4)],
            alloc::vec![Poly::y_pow(6)],
            alloc::vec![Poly::y_pow(3), Poly::y_pow(3)],
            alloc::vec![Poly::y_pow(1), Poly::y_pow(3)],
            alloc::vec![Poly::y_pow(3), Poly::y_pow(1)],
            alloc::vec![Poly::from_coeffs(alloc::vec![1, 1, 0, 1])],
            alloc::vec![Poly::from_coeffs(alloc::vec![0, 1, 1, 0, 1])],
            alloc::vec![Poly::from_coeffs(alloc::vec![1, 1]), Poly::from_coeffs(alloc::vec![1, 0, 1, 1])],
        ];
        cands.into_iter().filter_map(|s| Family::new(s, f).ok()).filter(|fam| fam.card_lambda().unwrap() <= 600).collect()
    }

    #[test]
    fn three_counts_agree() {
        for q in [2u64, 3] {
            let f = Fq::new(q).unwrap();
            for fam in families(&f) {
                let mut ks = fam.diamond();
                ks.extend(fam.delta().into_iter().take(4));
                for k in ks {
                    for j in 1..4 {
                        if (1..fam.n()).any(|i| k[i] <= -j) {
                            continue;
                        }
                        let brute = thin_count_brute(&fam, &k, j).unwrap();
                        let msg = format!("q={} {} k={:?} j={}", q, fam.descriptor(), k, j);
                        assert_eq!(thin_count_direct(&fam, &k, j).unwrap(), brute, "{}", msg);
                        assert_eq!(thin_count_exact(&fam, &k, j).unwrap(), brute, "{}", msg);
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let f = Fq::new(2).unwrap();
        let fam = Family::new(alloc::vec![Poly::y_pow(2)], &f).unwrap();
        assert!(thin_count_exact(&fam, &[0, 0], 0).is_err());
        assert!(thin_count_exact(&fam, &[1, -1], 1).is_err());
        assert_eq!(thin_count_exact(&fam, &[0, 0], 1).unwrap(), 0);
        assert!(interval_thin_mass(&fam, &[0, 0], 3, 1).is_err());
        assert_eq!(interval_thin_mass(&fam, &[0, 0], 2, 1).unwrap(), Q::new(1, 4));
    }
}
