//! F_q[Y]-lattices in K^n: canonical forms, reduction, systoles and types.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::hash::{Hash, Hasher};

use num_rational::Ratio;

use super::linalg;
use super::matrix::{subsets, MatK, PMat};
use crate::error::{Error, Result};
use crate::ffarith::{AbsQ, Elt, Fq, Poly, RatFunc, Val};

/// Column Hermite normal form: lower triangular, monic diagonal, entries
/// left of each pivot reduced modulo it.
pub fn hermite(m: &PMat, f: &Fq) -> Result<PMat> {
    let n = m.n();
    let mut h = m.clone();
    for i in 0..n {
        loop {
            let piv = (i..n)
                .filter(|&j| !h.get(i, j).is_zero())
                .min_by_key(|&j| (h.get(i, j).deg().unwrap(), j))
                .ok_or(Error::Singular)?;
            h.swap_cols(i, piv);
            let mut clean = true;
            for j in i + 1..n {
                if h.get(i, j).is_zero() {
                    continue;
                }
                let (qq, r) = h.get(i, j).divmod(h.get(i, i), f)?;
                h.col_axpy(j, i, &qq.neg(f), f);
                if !r.is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        let inv = f.inv(h.get(i, i).lead());
        h.scale_col(i, inv, f);
        for j in 0..i {
            let qq = h.get(i, j).divmod(h.get(i, i), f)?.0;
            h.col_axpy(j, i, &qq.neg(f), f);
        }
    }
    Ok(h)
}

/// Column-reduces a nonsingular polynomial matrix: afterwards the leading
/// coefficient vectors of the columns are linearly independent. Columns are
/// returned sorted by `(degree, original position)`.
pub fn column_reduce(m: &PMat, f: &Fq) -> Result<PMat> {
    let n = m.n();
    let mut a = m.clone();
    loop {
        let mut degs = Vec::with_capacity(n);
        for j in 0..n {
            degs.push(a.col_deg(j).ok_or(Error::Singular)?);
        }
        let lc: Vec<Vec<Elt>> =
            (0..n).map(|i| (0..n).map(|j| a.get(i, j).coeff(degs[j])).collect()).collect();
        let ker = linalg::kernel(&lc, n, f);
        let Some(alpha) = ker.first() else { break };
        let j0 = (0..n).filter(|&j| alpha[j] != 0).max_by_key(|&j| (degs[j], j)).unwrap();
        let inv = f.inv(alpha[j0]);
        for j in 0..n {
            if j == j0 || alpha[j] == 0 {
                continue;
            }
            let t = Poly::y_pow(degs[j0] - degs[j]).scale(f.mul(alpha[j], inv), f);
            a.col_axpy(j0, j, &t, f);
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&j| (a.col_deg(j), j));
    let mut out = PMat::zero(n);
    for (new, &old) in order.iter().enumerate() {
        for i in 0..n {
            out.set(i, new, a.get(i, old).clone());
        }
    }
    Ok(out)
}

/// Normalized systole as an exact logarithm: `log_q sys = n_log / n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SysValue {
    pub n_log: i64,
    pub n: u32,
}

impl SysValue {
    pub fn log_q(&self) -> Ratio<i64> {
        Ratio::new(self.n_log, self.n as i64)
    }
    pub fn log_q_f64(&self) -> f64 {
        self.n_log as f64 / self.n as f64
    }
    pub fn value(&self, q: u32) -> f64 {
        libm::pow(q as f64, self.log_q_f64())
    }
    /// `sys < q^e`.
    pub fn below_exp(&self, e: i64) -> bool {
        self.n_log < e * self.n as i64
    }
}

impl PartialOrd for SysValue {
    fn partial_cmp(&self, o: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for SysValue {
    fn cmp(&self, o: &Self) -> core::cmp::Ordering {
        (self.n_log as i128 * o.n as i128).cmp(&(o.n_log as i128 * self.n as i128))
    }
}

/// Smith type `(I_1 | ... | I_n)` of an integral lattice.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SmithType(pub Vec<Poly>);

impl SmithType {
    pub fn degree_sum(&self) -> usize {
        self.0.iter().map(|p| p.deg().unwrap()).sum()
    }
}

/// A reduced basis with the `log_q` norms of its vectors.
#[derive(Debug, Clone)]
pub struct ReducedBasis {
    pub basis: MatK,
    pub log_norms: Vec<i64>,
}

/// R_v-lattice `B R_v^n` with `B` over K, stored with its canonical form:
/// `D` is the least monic polynomial with `D L` integral and `hnf` is the
/// column Hermite form of `D B`.
#[derive(Debug, Clone)]
pub struct Lattice {
    fq: Fq,
    basis: MatK,
    den: Poly,
    hnf: PMat,
    covol_log: i64,
}

impl PartialEq for Lattice {
    fn eq(&self, o: &Self) -> bool {
        self.den == o.den && self.hnf == o.hnf
    }
}
impl Eq for Lattice {}
impl Hash for Lattice {
    fn hash<H: Hasher>(&self, h: &mut H) {
        self.den.hash(h);
        self.hnf.hash(h);
    }
}

fn lcm(a: &Poly, b: &Poly, f: &Fq) -> Poly {
    let g = a.gcd(b, f).unwrap();
    a.mul(b, f).div_exact(&g, f).monic(f)
}

impl Lattice {
    pub fn new(basis: MatK, fq: &Fq) -> Result<Self> {
        let n = basis.n();
        let mut den = Poly::one();
        for x in basis.entries() {
            if !x.is_poly() {
                den = lcm(&den, x.den(), fq);
            }
        }
        let mut m = PMat::zero(n);
        for i in 0..n {
            for j in 0..n {
                let x = basis.get(i, j);
                let v = x.num().mul(&den.div_exact(x.den(), fq), fq);
                m.set(i, j, v);
            }
        }
        let hnf = hermite(&m, fq)?;
        let det_deg: i64 = (0..n).map(|i| hnf.get(i, i).deg().unwrap() as i64).sum();
        let covol_log = det_deg - n as i64 * den.deg().unwrap() as i64;
        Ok(Lattice { fq: fq.clone(), basis, den, hnf, covol_log })
    }
    pub fn standard(n: usize, fq: &Fq) -> Self {
        Self::new(MatK::identity(n), fq).unwrap()
    }
    pub fn field(&self) -> &Fq {
        &self.fq
    }
    pub fn n(&self) -> usize {
        self.basis.n()
    }
    pub fn basis(&self) -> &MatK {
        &self.basis
    }
    /// `(D, H)` with `D L = H R_v^n`.
    pub fn canonical(&self) -> (&Poly, &PMat) {
        (&self.den, &self.hnf)
    }
    /// Canonical basis `H / D`.
    pub fn canonical_basis(&self) -> MatK {
        self.hnf.to_matk(&self.den, &self.fq)
    }
    /// `log_q(covol(L)/covol(R_v^n)) = -v(det B)`.
    pub fn norm_covol_log(&self) -> i64 {
        self.covol_log
    }
    pub fn is_unimodular(&self) -> bool {
        self.covol_log == 0
    }
    pub fn is_integral(&self) -> bool {
        self.den.is_one()
    }
    /// `g L`.
    pub fn act(&self, g: &MatK) -> Result<Lattice> {
        Lattice::new(g.mul(&self.basis, &self.fq), &self.fq)
    }

    /// Membership test by triangular solving against the canonical basis.
    pub fn contains(&self, w: &[RatFunc]) -> bool {
        let f = &self.fq;
        let n = self.n();
        if w.len() != n {
            return false;
        }
        let mut rhs = Vec::with_capacity(n);
        for x in w {
            let y = x.mul_poly(&self.den, f);
            if !y.is_poly() {
                return false;
            }
            rhs.push(y.num().clone());
        }
        let mut c: Vec<Poly> = Vec::with_capacity(n);
        for i in 0..n {
            let mut r = rhs[i].clone();
            for (j, cj) in c.iter().enumerate() {
                r = r.sub(&self.hnf.get(i, j).mul(cj, f), f);
            }
            let (qq, rem) = r.divmod(self.hnf.get(i, i), f).unwrap();
            if !rem.is_zero() {
                return false;
            }
            c.push(qq);
        }
        true
    }

    /// Reduced basis realizing the successive minima, sorted by norm.
    pub fn reduce_basis(&self) -> ReducedBasis {
        let f = &self.fq;
        let r = column_reduce(&self.hnf, f).expect("lattice basis is nonsingular");
        let dd = self.den.deg().unwrap() as i64;
        let log_norms = (0..self.n()).map(|j| r.col_deg(j).unwrap() as i64 - dd).collect();
        ReducedBasis { basis: r.to_matk(&self.den, f), log_norms }
    }

    /// `log_q` of the shortest nonzero vector norm (not normalized).
    pub fn min_log_norm(&self) -> i64 {
        let r = column_reduce(&self.hnf, &self.fq).expect("lattice basis is nonsingular");
        r.col_deg(0).unwrap() as i64 - self.den.deg().unwrap() as i64
    }

    /// Normalized systole `q^{-covol_log/n} min ||w||`.
    pub fn systole(&self) -> SysValue {
        let n = self.n() as i64;
        SysValue { n_log: n * self.min_log_norm() - self.covol_log, n: n as u32 }
    }

    /// `sys(L) < eps` for `eps = q^{eps_exp}`.
    pub fn thin_indicator(&self, eps_exp: i64) -> bool {
        self.systole().below_exp(eps_exp)
    }

    /// Exhaustive shortest vector search over the triangular canonical basis,
    /// returning the `log_q` norm. Independent of [`Lattice::reduce_basis`].
    /// Fails when more than `budget` partial vectors would be visited.
    pub fn svp_bruteforce(&self, budget: u64) -> Result<i64> {
        let f = &self.fq;
        let n = self.n();
        let h = &self.hnf;
        let upper = (0..n).filter_map(|j| h.col_deg(j)).min().unwrap() as i64;
        let mut visited = 0u64;
        for d in 0..=upper {
            let mut c: Vec<Poly> = Vec::with_capacity(n);
            if exists_short(h, d, 0, &mut c, false, &mut visited, budget, f)? {
                return Ok(d - self.den.deg().unwrap() as i64);
            }
        }
        unreachable!("a basis column attains the upper bound")
    }

    /// Smith type of an integral lattice via determinantal divisors.
    pub fn smith_type(&self) -> Result<SmithType> {
        if !self.is_integral() {
            return Err(Error::NotIntegral);
        }
        let f = &self.fq;
        let n = self.n();
        let mut prev = Poly::one();
        let mut out = Vec::with_capacity(n);
        for k in 1..=n {
            let mut g = Poly::zero();
            'outer: for rows in subsets(n, k) {
                for cols in subsets(n, k) {
                    let d = self.hnf.minor(&rows, &cols).det(f);
                    if !d.is_zero() {
                        g = if g.is_zero() { d.monic(f) } else { g.gcd(&d, f).unwrap() };
                        if g.is_one() {
                            break 'outer;
                        }
                    }
                }
            }
            out.push(g.div_exact(&prev, f));
            prev = g;
        }
        Ok(SmithType(out))
    }

    /// Generator degree data of `L ∩ K e_i`: returns `log_q |lambda_i|` for
    /// each coordinate axis.
    pub fn axis_logs(&self) -> Vec<i64> {
        let f = &self.fq;
        let n = self.n();
        let dd = self.den.deg().unwrap() as i64;
        (0..n)
            .map(|i| {
                let mut order: Vec<usize> = (0..n).filter(|&r| r != i).collect();
                order.push(i);
                let h = hermite(&self.hnf.permute_rows(&order), f).unwrap();
                h.get(n - 1, n - 1).deg().unwrap() as i64 - dd
            })
            .collect()
    }

    /// Generators `lambda_i` with `L ∩ K e_i = R_v lambda_i e_i`.
    pub fn axis_generators(&self) -> Vec<RatFunc> {
        let f = &self.fq;
        let n = self.n();
        (0..n)
            .map(|i| {
                let mut order: Vec<usize> = (0..n).filter(|&r| r != i).collect();
                order.push(i);
                let h = hermite(&self.hnf.permute_rows(&order), f).unwrap();
                RatFunc::new(h.get(n - 1, n - 1).clone(), self.den.clone(), f).unwrap()
            })
            .collect()
    }
}

// Depth-first search for a nonzero vector H c with every coordinate of
// degree <= d. Row i of H c only involves c_0..c_i.
#[allow(clippy::too_many_arguments)]
fn exists_short(
    h: &PMat,
    d: i64,
    i: usize,
    c: &mut Vec<Poly>,
    nonzero: bool,
    visited: &mut u64,
    budget: u64,
    f: &Fq,
) -> Result<bool> {
    let n = h.n();
    if i == n {
        return Ok(nonzero);
    }
    *visited += 1;
    if *visited > budget {
        return Err(Error::Budget(format!("shortest vector search exceeded {} nodes", budget)));
    }
    let mut r = Poly::zero();
    for (j, cj) in c.iter().enumerate() {
        r = r.add(&h.get(i, j).mul(cj, f), f);
    }
    let hii = h.get(i, i);
    let dh = hii.deg().unwrap() as i64;
    let (qq, rem) = r.divmod(hii, f).unwrap();
    // component = hii * e + rem with c_i = e - qq
    let free = d - dh;
    if free < 0 {
        if rem.deg_i() > d {
            return Ok(false);
        }
        c.push(qq.neg(f));
        let nz = nonzero || !c[i].is_zero();
        let ok = exists_short(h, d, i + 1, c, nz, visited, budget, f)?;
        c.pop();
        return Ok(ok);
    }
    let q = f.q();
    let count = (q as u64).checked_pow((free + 1) as u32).ok_or_else(|| {
        Error::Budget(format!("coefficient space q^{} too large", free + 1))
    })?;
    for code in 0..count {
        let e = Poly::from_code((free + 1) as usize, code, q);
        c.push(e.sub(&qq, f));
        let nz = nonzero || !c[i].is_zero();
        let ok = exists_short(h, d, i + 1, c, nz, visited, budget, f)?;
        c.pop();
        if ok {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Norm `max |w_i|` of a vector.
pub fn vec_norm(w: &[RatFunc]) -> AbsQ {
    w.iter().map(|x| x.abs()).max().unwrap_or(AbsQ::Zero)
}

/// Equality of lattices through canonical forms.
pub fn lattice_equal(a: &Lattice, b: &Lattice) -> bool {
    a == b
}

/// Elementary divisor valuations of `g` over the valuation ring at infinity,
/// in nondecreasing order, from minimal valuations of minors.
pub fn local_divisors(g: &MatK, f: &Fq) -> Result<Vec<i64>> {
    let n = g.n();
    if g.det(f).is_zero() {
        return Err(Error::Singular);
    }
    let mut prev = 0i64;
    let mut out = Vec::with_capacity(n);
    for k in 1..=n {
        let mut best: Option<i64> = None;
        for rows in subsets(n, k) {
            for cols in subsets(n, k) {
                let mut m = MatK::zero(k);
                for (a, &i) in rows.iter().enumerate() {
                    for (b, &j) in cols.iter().enumerate() {
                        m.set(a, b, g.get(i, j).clone());
                    }
                }
                if let Val::Fin(v) = m.det(f).val() {
                    best = Some(best.map_or(v, |b: i64| b.min(v)));
                }
            }
        }
        let dk = best.ok_or(Error::Singular)?;
        out.push(dk - prev);
        prev = dk;
    }
    Ok(out)
}

/// Distance in the tree between the vertex classes `g O_v^2` and `h O_v^2`.
pub fn tree_distance(g: &MatK, h: &MatK, f: &Fq) -> Result<i64> {
    if g.n() != 2 || h.n() != 2 {
        return Err(Error::Dimension(format!("tree distance needs n = 2")));
    }
    let m = g.inverse(f)?.mul(h, f);
    let d = local_divisors(&m, f)?;
    Ok(d[1] - d[0])
}

/// `vec![x; n]` helper for coordinate vectors.
pub fn unit_vector(n: usize, i: usize, x: RatFunc) -> Vec<RatFunc> {
    let mut v = vec![RatFunc::zero(); n];
    v[i] = x;
    v
}
