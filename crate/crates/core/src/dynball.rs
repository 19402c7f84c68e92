//! Dynamical neighbourhoods `B_{l,N} = (I + W_{l,N}) ∩ SL_n` of the
//! identity, exact coset tests `B_{l,N} x = B_{l,N} y` for lattices,
//! partitions by the thin part and ball cosets, and entropy of finitely
//! supported measures (logarithms in base `q`).

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::ffarith::{Elt, Fq, Poly, RatFunc, Val, Q};
use crate::latcore::linalg::solve_affine;
use crate::latcore::{Lattice, MatK};
use crate::orbit::{build_x_t, exp_k, w_vector, Family};

/// Parameters `(l, N)` of `B_{l,N}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BallParams {
    pub ell: i64,
    pub big_n: i64,
}

impl BallParams {
    pub fn new(ell: i64, big_n: i64) -> Self {
        BallParams { ell, big_n }
    }
    /// Required valuation of entry `(i, j)` of `w ∈ W_{l,N}` (0-based).
    pub fn level(&self, n: usize, i: usize, j: usize) -> i64 {
        if j == 0 && i >= 1 {
            self.ell + n as i64 * self.big_n
        } else {
            self.ell
        }
    }
}

fn val_at_least(x: &RatFunc, lvl: i64) -> bool {
    match x.val() {
        Val::Inf => true,
        Val::Fin(v) => v >= lvl,
    }
}

/// `w ∈ W_{l,N}`.
pub fn in_w(w: &MatK, p: BallParams) -> bool {
    let n = w.n();
    (0..n).all(|i| (0..n).all(|j| val_at_least(w.get(i, j), p.level(n, i, j))))
}

/// `g ∈ B_{l,N}`: `g - I ∈ W_{l,N}` and `det g = 1`.
pub fn in_ball(g: &MatK, p: BallParams, f: &Fq) -> bool {
    in_w(&g.sub(&MatK::identity(g.n()), f), p) && g.det(f).is_one()
}

/// `sum_{e = lo}^{lo + len - 1} a_e Y^{-e}`.
fn laurent_poly(lo: i64, coeffs: &[Elt], f: &Fq) -> RatFunc {
    if coeffs.iter().all(|&c| c == 0) {
        return RatFunc::zero();
    }
    let top = lo + coeffs.len() as i64 - 1;
    // Y^top * sum a_e Y^{-e} = sum a_e Y^{top - e}
    let mut num = alloc::vec![0; coeffs.len()];
    for (i, &c) in coeffs.iter().enumerate() {
        num[coeffs.len() - 1 - i] = c;
    }
    let num = Poly::from_coeffs(num);
    if top >= 0 {
        RatFunc::new(num, Poly::y_pow(top as usize), f).unwrap()
    } else {
        RatFunc::from_poly(num.shift((-top) as usize))
    }
}

/// The element `L D U` of `B_{l,N}` built from the coefficient source: `L`
/// and `U` are products of elementary unipotents with entries of the form
/// `sum a_e Y^{-e}` respecting the levels of `W_{l,N}`, and `D` is
/// `diag(1 + c_1, ..., 1 + c_{n-1}, prod (1 + c_i)^{-1})`. Requires `l >= 0`.
pub fn ball_element(n: usize, p: BallParams, budget: usize, mut coeff: impl FnMut() -> Elt, f: &Fq) -> MatK {
    let mut next = |lvl: i64| -> RatFunc {
        let c: Vec<Elt> = (0..budget).map(|_| coeff()).collect();
        laurent_poly(lvl, &c, f)
    };
    let mut g = MatK::identity(n);
    for j in 0..n {
        for i in j + 1..n {
            let mut e = MatK::identity(n);
            e.set(i, j, next(p.level(n, i, j)));
            g = g.mul(&e, f);
        }
    }
    let mut d = alloc::vec![RatFunc::one(); n];
    let mut prod = RatFunc::one();
    for di in d.iter_mut().take(n - 1) {
        let c = next(p.ell.max(1));
        *di = RatFunc::one().add(&c, f);
        prod = prod.mul(di, f);
    }
    d[n - 1] = prod.inv(f).unwrap();
    g = g.mul(&MatK::diag(&d), f);
    for j in 0..n {
        for i in 0..j {
            let mut e = MatK::identity(n);
            e.set(i, j, next(p.level(n, i, j)));
            g = g.mul(&e, f);
        }
    }
    g
}

/// Random element of `B_{l,N}`: [`ball_element`] with `budget` uniform
/// coefficients per entry.
pub fn sample_ball<R: Rng + ?Sized>(n: usize, p: BallParams, budget: usize, rng: &mut R, f: &Fq) -> Result<MatK> {
    if budget == 0 {
        return Err(Error::OutOfRange(format!("coefficient budget must be positive")));
    }
    if p.ell < 1 || p.big_n < 0 {
        return Err(Error::OutOfRange(format!("need l >= 1 and N >= 0, got {:?}", p)));
    }
    let q = f.q();
    Ok(ball_element(n, p, budget, || rng.random_range(0..q), f))
}

/// Random `w` with `||w|| <= q^{-l}` (no determinant condition).
pub fn sample_small<R: Rng + ?Sized>(n: usize, ell: i64, budget: usize, rng: &mut R, f: &Fq) -> MatK {
    let q = f.q();
    let mut w = MatK::zero(n);
    for i in 0..n {
        for j in 0..n {
            let c: Vec<Elt> = (0..budget).map(|_| rng.random_range(0..q)).collect();
            w.set(i, j, laurent_poly(ell, &c, f));
        }
    }
    w
}

/// `(I + w)^{-1} ∈ I - w + W_{2l,N}` for `g = I + w`.
pub fn inverse_expansion_holds(g: &MatK, p: BallParams, f: &Fq) -> Result<bool> {
    let n = g.n();
    let id = MatK::identity(n);
    let w = g.sub(&id, f);
    let r = g.inverse(f)?.sub(&id, f).add(&w, f);
    Ok(in_w(&r, BallParams::new(2 * p.ell, p.big_n)))
}

/// `a^{l'} B_{l,N} a^{-l'} ⊂ B_{min(l, l + n l'), N - l'}`.
pub fn conj_ball(p: BallParams, ell_prime: i64, n: usize) -> BallParams {
    BallParams::new(p.ell.min(p.ell + n as i64 * ell_prime), p.big_n - ell_prime)
}

/// `a^j` for `a = exp(w)`.
pub fn a_power(n: usize, j: i64) -> MatK {
    let k: Vec<i64> = w_vector(n).iter().map(|x| x * j).collect();
    exp_k(&k)
}

/// `a^{l'} g a^{-l'}`.
pub fn conj_a(g: &MatK, ell_prime: i64, f: &Fq) -> MatK {
    let n = g.n();
    a_power(n, ell_prime).mul(g, f).mul(&a_power(n, -ell_prime), f)
}

/// `sys((I + exp(k) w exp(-k)) R_v^d) >= 1 - q^{-l}` for `||w|| <= q^{-l}`,
/// decided exactly.
pub fn systole_minoration_holds(w: &MatK, k: &[i64], ell: i64, f: &Fq) -> Result<bool> {
    let n = w.n();
    if ell < 1 || !in_w(w, BallParams::new(ell, 0)) {
        return Err(Error::Hypothesis(format!("need l >= 1 and ||w|| <= q^-l")));
    }
    let g = MatK::identity(n).add(&exp_k(k).mul(w, f).mul(&exp_k(&k.iter().map(|x| -x).collect::<Vec<_>>()), f), f);
    let sys = Lattice::new(g, f)?.systole();
    if sys.n_log >= 0 {
        return Ok(true);
    }
    // q^{n_log/n} >= 1 - q^{-l}  <=>  q^{l n} >= (q^l - 1)^n q^{-n_log}
    let q = f.q() as u128;
    let lhs = q.checked_pow((ell * n as i64) as u32);
    let rhs = (q.pow(ell as u32) - 1)
        .checked_pow(n as u32)
        .and_then(|a| q.checked_pow((-sys.n_log) as u32).and_then(|b| a.checked_mul(b)));
    Ok(match (lhs, rhs) {
        (Some(a), Some(b)) => a >= b,
        _ => sys.value(f.q()) >= 1.0 - libm::pow(f.q() as f64, -ell as f64),
    })
}

/// Greedy cover of `s ⊂ B_{l,N}` by disjoint cosets `B_{l+l',N} g_i` with
/// centers taken from `s`. Returns the center indices and, for each
/// element, the index of its center.
pub fn cover_ball(s: &[MatK], p: BallParams, ell_prime: i64, f: &Fq) -> Result<(Vec<usize>, Vec<usize>)> {
    if ell_prime < 1 || ell_prime > p.ell {
        return Err(Error::OutOfRange(format!("need 1 <= l' <= l, got l' = {}", ell_prime)));
    }
    let fine = BallParams::new(p.ell + ell_prime, p.big_n);
    let mut centers: Vec<usize> = Vec::new();
    let mut inv: Vec<MatK> = Vec::new();
    let mut assign = Vec::with_capacity(s.len());
    for (idx, g) in s.iter().enumerate() {
        match inv.iter().position(|ci| in_ball(&g.mul(ci, f), fine, f)) {
            Some(c) => assign.push(c),
            None => {
                assign.push(centers.len());
                centers.push(idx);
                inv.push(g.inverse(f)?);
            }
        }
    }
    Ok((centers, assign))
}

/// `q^{l' n^2}`, saturating.
pub fn cover_bound(q: u32, ell_prime: i64, n: usize) -> u128 {
    (q as u128).checked_pow((ell_prime as u32) * (n * n) as u32).unwrap_or(u128::MAX)
}

fn clear_denominators(m: &MatK, f: &Fq) -> (Poly, Vec<Poly>) {
    let mut den = Poly::one();
    for x in m.entries() {
        if !x.is_poly() {
            let g = den.gcd(x.den(), f).unwrap();
            den = den.mul(&x.den().div_exact(&g, f), f).monic(f);
        }
    }
    let nums = m.entries().iter().map(|x| x.num().mul(&den.div_exact(x.den(), f), f)).collect();
    (den, nums)
}

/// The `F_q`-affine system for `gamma ∈ M_n(R_v)` with
/// `Y gamma X^{-1} - I ∈ W_{l,N}`, where `X` and `Y` are basis matrices.
/// Every entry `gamma_ab` is a polynomial of degree at most `deg_ab`,
/// read off from `||gamma|| <= ||Y^{-1}|| ||X||` for `l >= 0`.
struct BallSystem {
    n: usize,
    degs: Vec<i64>,
    offsets: Vec<usize>,
    unknowns: usize,
    rows: Vec<Vec<Elt>>,
    rhs: Vec<Elt>,
}

impl BallSystem {
    fn new(x: &MatK, y: &MatK, p: BallParams, homogeneous: bool, budget: usize, f: &Fq) -> Result<Option<Self>> {
        let n = x.n();
        let xinv = x.inverse(f)?;
        let yinv = y.inverse(f)?;
        let neg_val = |v: Val| match v {
            Val::Inf => None,
            Val::Fin(v) => Some(-v),
        };
        let mut degs = Vec::with_capacity(n * n);
        for a in 0..n {
            let ya = (0..n).filter_map(|c| neg_val(yinv.get(a, c).val())).max();
            for b in 0..n {
                let xb = (0..n).filter_map(|c| neg_val(x.get(c, b).val())).max();
                degs.push(match (ya, xb) {
                    (Some(u), Some(v)) => u + v,
                    _ => -1,
                });
            }
        }
        let mut offsets = Vec::with_capacity(n * n);
        let mut unknowns = 0usize;
        for &d in &degs {
            offsets.push(unknowns);
            unknowns += (d + 1).max(0) as usize;
        }
        if unknowns > budget {
            return Ok(None);
        }
        let (dy, yn) = clear_denominators(y, f);
        let (dx, xn) = clear_denominators(&xinv, f);
        let den = dy.mul(&dx, f);
        let dd = den.deg().unwrap() as i64;
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let prods: Vec<Poly> =
                    (0..n * n).map(|ab| yn[i * n + ab / n].mul(&xn[(ab % n) * n + j], f)).collect();
                let hi = prods
                    .iter()
                    .zip(&degs)
                    .filter_map(|(pr, &d)| pr.deg().map(|e| e as i64 + d))
                    .max()
                    .unwrap_or(-1)
                    .max(dd);
                let lo = (dd - p.level(n, i, j) + 1).max(0);
                for t in lo..=hi {
                    let mut row = alloc::vec![0; unknowns];
                    for (ab, pr) in prods.iter().enumerate() {
                        for s in 0..=degs[ab] {
                            let e = t - s;
                            if e >= 0 {
                                row[offsets[ab] + s as usize] = pr.coeff(e as usize);
                            }
                        }
                    }
                    let b = if i == j && !homogeneous { den.coeff(t as usize) } else { 0 };
                    if row.iter().any(|&c| c != 0) || b != 0 {
                        rows.push(row);
                        rhs.push(b);
                    }
                }
            }
        }
        Ok(Some(BallSystem { n, degs, offsets, unknowns, rows, rhs }))
    }

    fn solve(&self, f: &Fq) -> Option<(Vec<Elt>, Vec<Vec<Elt>>)> {
        if self.unknowns == 0 {
            return if self.rhs.iter().all(|&b| b == 0) { Some((Vec::new(), Vec::new())) } else { None };
        }
        solve_affine(&self.rows, &self.rhs, self.unknowns, f)
    }

    fn gamma(&self, sol: &[Elt]) -> MatK {
        let mut m = MatK::zero(self.n);
        for ab in 0..self.n * self.n {
            let len = (self.degs[ab] + 1).max(0) as usize;
            let c = sol[self.offsets[ab]..self.offsets[ab] + len].to_vec();
            m.set(ab / self.n, ab % self.n, RatFunc::from_poly(Poly::from_coeffs(c)));
        }
        m
    }
}

/// Outcome of a coset test.
#[derive(Debug, Clone, PartialEq)]
pub enum CosetAnswer {
    /// `y = g x` with the given `g ∈ B_{l,N}`.
    Same(MatK),
    Different,
    /// The linear system exceeded the unknown budget.
    Inconclusive(String),
}

impl CosetAnswer {
    pub fn is_same(&self) -> bool {
        matches!(self, CosetAnswer::Same(_))
    }
}

/// Decides `y ∈ B_{l,N} x` for `l >= 1`. A witness `g = Y gamma X^{-1}`
/// exists iff `det Y / det X ∈ F_q^×` and the affine system for `gamma`
/// is consistent; every solution then has `det gamma ∈ F_q^×` and
/// `det g = 1`, since `det g ∈ 1 + pi O_v`.
pub fn same_ball_coset(x: &Lattice, y: &Lattice, p: BallParams, budget: usize) -> Result<CosetAnswer> {
    let f = x.field();
    if p.ell < 1 || p.big_n < 0 {
        return Err(Error::Hypothesis(format!("need l >= 1 and N >= 0, got {:?}", p)));
    }
    if x.n() != y.n() {
        return Err(Error::Dimension(format!("{} vs {}", x.n(), y.n())));
    }
    let (xb, yb) = (x.basis(), y.basis());
    let c = yb.det(f).div(&xb.det(f), f)?;
    if !(c.is_poly() && c.num().deg() == Some(0)) {
        return Ok(CosetAnswer::Different);
    }
    let Some(sys) = BallSystem::new(xb, yb, p, false, budget, f)? else {
        return Ok(CosetAnswer::Inconclusive(format!("more than {} unknowns", budget)));
    };
    Ok(match sys.solve(f) {
        None => CosetAnswer::Different,
        Some((sol, _)) => {
            let g = yb.mul(&sys.gamma(&sol), f).mul(&xb.inverse(f)?, f);
            CosetAnswer::Same(g)
        }
    })
}

/// Exact count of `t ∈ Lambda_s` with `exp(k) x_t ∈ B_{l,N} x`, with the
/// bound `2^{n-1} q^{(n-1)(deg s_* - l - nN)}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyCount {
    pub count: u128,
    pub bound: u128,
}

/// Checks `k ∈ Delta_s`, `l > max(0, -log_q sys(x))` and
/// `0 <= N <= (deg s_* - l + k_1 - max_{i>=2} k_i)/n`.
pub fn check_count_hypotheses(fam: &Family, k: &[i64], p: BallParams, x: &Lattice) -> Result<()> {
    let n = fam.n() as i64;
    if !fam.in_delta(k) {
        return Err(Error::Hypothesis(format!("k = {:?} is not in Delta_s", k)));
    }
    let sys = x.systole();
    if p.ell < 1 || p.ell * n + sys.n_log <= 0 {
        return Err(Error::Hypothesis(format!("l = {} <= max(0, -log_q sys(x)) with log_q sys(x) = {}/{}", p.ell, sys.n_log, n)));
    }
    let kmax = k[1..].iter().copied().max().unwrap();
    let room = fam.d() - p.ell + k[0] - kmax;
    if p.big_n < 0 || n * p.big_n > room {
        return Err(Error::Hypothesis(format!("N = {} outside [0, {}/{}]", p.big_n, room, n)));
    }
    Ok(())
}

pub fn latpoint_bound(fam: &Family, p: BallParams) -> u128 {
    let n = fam.n() as u32;
    let e = (n as i64 - 1) * (fam.d() - p.ell - n as i64 * p.big_n);
    let q = fam.field().q() as u128;
    (1u128 << (n - 1)).saturating_mul(q.checked_pow(e as u32).unwrap_or(u128::MAX))
}

pub fn count_family_in_ball(fam: &Family, k: &[i64], p: BallParams, x: &Lattice, budget: usize) -> Result<FamilyCount> {
    check_count_hypotheses(fam, k, p, x)?;
    let f = fam.field();
    let e = exp_k(k);
    let mut count = 0u128;
    for t in fam.lambda() {
        let y = build_x_t(&t, f)?.act(&e)?;
        match same_ball_coset(x, &y, p, budget)? {
            CosetAnswer::Same(_) => count += 1,
            CosetAnswer::Different => {}
            CosetAnswer::Inconclusive(why) => return Err(Error::Budget(why)),
        }
    }
    Ok(FamilyCount { count, bound: latpoint_bound(fam, p) })
}

/// Shortest vectors of `l`, each truncated to the coefficients above
/// `min ||w|| q^{-ell}`, sorted. Invariant under `B_ell`, which acts by
/// isometries moving each vector by at most that amount.
pub fn coset_key(l: &Lattice, ell: i64) -> Vec<Vec<Elt>> {
    let f = l.field();
    let q = f.q();
    let rb = l.reduce_basis();
    let c0 = rb.log_norms[0];
    let short: Vec<usize> = (0..l.n()).filter(|&j| rb.log_norms[j] == c0).collect();
    let total = (q as u64).pow(short.len() as u32);
    let mut out = Vec::with_capacity(total as usize);
    for code in 1..total {
        let mut v = alloc::vec![RatFunc::zero(); l.n()];
        let mut c = code;
        for &j in &short {
            let a = (c % q as u64) as Elt;
            c /= q as u64;
            if a != 0 {
                for (i, vi) in v.iter_mut().enumerate() {
                    *vi = vi.add(&rb.basis.get(i, j).scale(a, f), f);
                }
            }
        }
        let mut key = Vec::with_capacity(l.n() * ell as usize);
        for vi in &v {
            key.extend(vi.laurent(-c0, -c0 + ell, f));
        }
        out.push(key);
    }
    out.sort();
    out.dedup();
    out
}

/// Partition of `{exp(k) x_t : t ∈ Lambda_s}` (in `Family::lambda` order)
/// into `B_{l,N}`-cosets.
pub fn family_ball_classes(fam: &Family, k: &[i64], p: BallParams, budget: usize) -> Result<Vec<Vec<usize>>> {
    let f = fam.field();
    let e = exp_k(k);
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut reps: Vec<Lattice> = Vec::new();
    let mut buckets: BTreeMap<Vec<Vec<Elt>>, Vec<usize>> = BTreeMap::new();
    for (idx, t) in fam.lambda().iter().enumerate() {
        let y = build_x_t(t, f)?.act(&e)?;
        let bucket = buckets.entry(coset_key(&y, p.ell)).or_default();
        let mut found = None;
        for &c in bucket.iter() {
            match same_ball_coset(&reps[c], &y, p, budget)? {
                CosetAnswer::Same(_) => {
                    found = Some(c);
                    break;
                }
                CosetAnswer::Different => {}
                CosetAnswer::Inconclusive(why) => return Err(Error::Budget(why)),
            }
        }
        match found {
            Some(c) => classes[c].push(idx),
            None => {
                bucket.push(classes.len());
                classes.push(alloc::vec![idx]);
                reps.push(y);
            }
        }
    }
    Ok(classes)
}

/// Cell of an `(m, l)`-partition: the `q^{-m}`-thin part, or a
/// `B_l`-coset named by the index of its anchor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CellId {
    Thin,
    Coset(usize),
}

/// Anchors of the `B_l`-cosets met so far, grown on demand.
#[derive(Debug, Clone)]
pub struct Anchors {
    pub m: i64,
    pub ell: i64,
    pub budget: usize,
    reps: Vec<Lattice>,
    buckets: BTreeMap<Vec<Vec<Elt>>, Vec<usize>>,
}

impl Anchors {
    pub fn new(m: i64, ell: i64, budget: usize) -> Result<Self> {
        if ell < 1 {
            return Err(Error::OutOfRange(format!("l = {} < 1", ell)));
        }
        Ok(Anchors { m, ell, budget, reps: Vec::new(), buckets: BTreeMap::new() })
    }
    pub fn reps(&self) -> &[Lattice] {
        &self.reps
    }
    pub fn len(&self) -> usize {
        self.reps.len()
    }
    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }
}

pub fn cell_id(l: &Lattice, anchors: &mut Anchors) -> Result<CellId> {
    if l.thin_indicator(-anchors.m) {
        return Ok(CellId::Thin);
    }
    let p = BallParams::new(anchors.ell, 0);
    let key = coset_key(l, anchors.ell);
    if let Some(bucket) = anchors.buckets.get(&key) {
        for &c in bucket {
            match same_ball_coset(&anchors.reps[c], l, p, anchors.budget)? {
                CosetAnswer::Same(_) => return Ok(CellId::Coset(c)),
                CosetAnswer::Different => {}
                CosetAnswer::Inconclusive(why) => return Err(Error::Budget(why)),
            }
        }
    }
    let id = anchors.reps.len();
    anchors.reps.push(l.clone());
    anchors.buckets.entry(key).or_default().push(id);
    Ok(CellId::Coset(id))
}

/// `(cell_id(a^i L))_{0 <= i < N}`.
pub fn dynamical_refine(l: &Lattice, big_n: usize, anchors: &mut Anchors) -> Result<Vec<CellId>> {
    let a = a_power(l.n(), 1);
    let mut cur = l.clone();
    let mut out = Vec::with_capacity(big_n);
    for i in 0..big_n {
        out.push(cell_id(&cur, anchors)?);
        if i + 1 < big_n {
            cur = cur.act(&a)?;
        }
    }
    Ok(out)
}

/// `f_N(L) = (1/N) Card{0 <= i < N : sys(a^i L) < q^{-m}}`.
pub fn excursion_fn(l: &Lattice, big_n: usize, m: i64) -> Result<Q> {
    if big_n == 0 {
        return Err(Error::OutOfRange(format!("N must be positive")));
    }
    let a = a_power(l.n(), 1);
    let mut cur = l.clone();
    let mut thin = 0i128;
    for _ in 0..big_n {
        if cur.thin_indicator(-m) {
            thin += 1;
        }
        cur = cur.act(&a)?;
    }
    Ok(Q::new(thin, big_n as i128))
}

/// `L ∈ X'` iff `f_N(L) <= kappa`.
pub fn x_prime_member(l: &Lattice, m: i64, kappa: Q, big_n: usize) -> Result<bool> {
    Ok(excursion_fn(l, big_n, m)? <= kappa)
}

/// Finitely supported probability measure.
#[derive(Debug, Clone)]
pub struct FiniteMeasure<P> {
    pub points: Vec<P>,
    pub weights: Vec<f64>,
}

impl<P> FiniteMeasure<P> {
    pub fn new(points: Vec<P>, weights: Vec<f64>) -> Result<Self> {
        if points.len() != weights.len() || points.is_empty() {
            return Err(Error::Dimension(format!("{} points, {} weights", points.len(), weights.len())));
        }
        let total: f64 = weights.iter().sum();
        if weights.iter().any(|&w| !(w > 0.0)) || libm::fabs(total - 1.0) > 1e-9 {
            return Err(Error::OutOfRange(format!("weights must be positive with sum 1 (sum {})", total)));
        }
        Ok(FiniteMeasure { points, weights })
    }
    pub fn uniform(points: Vec<P>) -> Result<Self> {
        let w = 1.0 / points.len().max(1) as f64;
        let len = points.len();
        Self::new(points, alloc::vec![w; len])
    }
}

/// `-sum p log_q p` with `0 log 0 = 0`.
pub fn entropy_masses(masses: impl IntoIterator<Item = f64>, q: u32) -> f64 {
    let lq = libm::log(q as f64);
    -masses.into_iter().filter(|&p| p > 0.0).map(|p| p * libm::log(p) / lq).sum::<f64>()
}

/// `H_mu(P)` for the partition given by a cell function.
pub fn entropy_h<P, C: Ord>(mu: &FiniteMeasure<P>, mut cell: impl FnMut(&P) -> C, q: u32) -> f64 {
    let mut mass: BTreeMap<C, f64> = BTreeMap::new();
    for (x, &w) in mu.points.iter().zip(&mu.weights) {
        *mass.entry(cell(x)).or_insert(0.0) += w;
    }
    entropy_masses(mass.into_values(), q)
}

/// `(cell(x), cell(phi x), ..., cell(phi^{M-1} x))`, the cell of `x` in
/// `P^M`.
pub fn refine_word<P, C>(x: &P, m: usize, phi: &mut impl FnMut(&P) -> P, cell: &mut impl FnMut(&P) -> C) -> Vec<C> {
    let mut out = Vec::with_capacity(m);
    if m == 0 {
        return out;
    }
    out.push(cell(x));
    let mut cur = phi(x);
    for i in 1..m {
        out.push(cell(&cur));
        if i + 1 < m {
            cur = phi(&cur);
        }
    }
    out
}

/// `S_N mu = (1/N) sum_{i<N} phi^i_* mu`.
pub fn birkhoff_sn<P: Clone>(mu: &FiniteMeasure<P>, mut phi: impl FnMut(&P) -> P, big_n: usize) -> Result<FiniteMeasure<P>> {
    if big_n == 0 {
        return Err(Error::OutOfRange(format!("N must be positive")));
    }
    let mut points = Vec::with_capacity(mu.points.len() * big_n);
    let mut weights = Vec::with_capacity(mu.points.len() * big_n);
    for (x, &w) in mu.points.iter().zip(&mu.weights) {
        let mut cur = x.clone();
        for i in 0..big_n {
            if i > 0 {
                cur = phi(&cur);
            }
            points.push(cur.clone());
            weights.push(w / big_n as f64);
        }
    }
    Ok(FiniteMeasure { points, weights })
}

/// Both sides of a concavity inequality, with `ok = lhs >= rhs - 1e-9`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntrominoReport {
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

impl EntrominoReport {
    fn new(lhs: f64, rhs: f64) -> Self {
        EntrominoReport { lhs, rhs, ok: lhs >= rhs - 1e-9 }
    }
}

/// `(1/M) H_{S_N mu}(P^M) >= (1/N) H_mu(P^N) - (M/N) log_q Card P`.
pub fn entromino_check<P: Clone, C: Ord>(
    mu: &FiniteMeasure<P>,
    mut phi: impl FnMut(&P) -> P,
    mut cell: impl FnMut(&P) -> C,
    card_p: usize,
    m: usize,
    big_n: usize,
    q: u32,
) -> Result<EntrominoReport> {
    if m == 0 || m > big_n {
        return Err(Error::OutOfRange(format!("need 1 <= M <= N, got M = {}, N = {}", m, big_n)));
    }
    let sn = birkhoff_sn(mu, &mut phi, big_n)?;
    let lhs = entropy_h(&sn, |x| refine_word(x, m, &mut phi, &mut cell), q) / m as f64;
    let hn = entropy_h(mu, |x| refine_word(x, big_n, &mut phi, &mut cell), q);
    let rhs = hn / big_n as f64 - m as f64 / big_n as f64 * libm::log(card_p as f64) / libm::log(q as f64);
    Ok(EntrominoReport::new(lhs, rhs))
}

/// `H_mu(P) >= sum_x omega_x H_{mu_x}(P)` for `mu = sum_x omega_x mu_x`.
pub fn entromino_mixture_check<P: Clone, C: Ord>(
    parts: &[(f64, FiniteMeasure<P>)],
    mut cell: impl FnMut(&P) -> C,
    q: u32,
) -> Result<EntrominoReport> {
    let mut points = Vec::new();
    let mut weights = Vec::new();
    let mut rhs = 0.0;
    for (om, mu) in parts {
        rhs += om * entropy_h(mu, &mut cell, q);
        points.extend(mu.points.iter().cloned());
        weights.extend(mu.weights.iter().map(|w| w * om));
    }
    let mix = FiniteMeasure::new(points, weights)?;
    Ok(EntrominoReport::new(entropy_h(&mix, &mut cell, q), rhs))
}

/// Outcome of the search for `l_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct EllReport {
    pub ell_m: i64,
    /// For `l_m - 1 >= n`: a sample index `i` and `gamma ≠ I` in the
    /// stabilizer of `x_i` lying in `B_{l_m - 1 - n}`.
    pub witness_below: Option<(usize, MatK)>,
    /// Number of lattices certified injective at `l_m`.
    pub certified: usize,
}

enum Injectivity {
    Injective,
    Witness(MatK),
    Unknown,
}

/// Whether `g -> g x` is injective on `B_j`, i.e. `x`'s stabilizer meets
/// `B_j` trivially. For `j >= 1` this is exact linear algebra; for `j = 0`
/// the solution space is searched for a determinant-one element.
fn injective_on(x: &Lattice, j: i64, budget: usize) -> Result<Injectivity> {
    let f = x.field();
    let xb = x.basis();
    let Some(sys) = BallSystem::new(xb, xb, BallParams::new(j, 0), true, budget, f)? else {
        return Ok(Injectivity::Unknown);
    };
    let Some((_, ker)) = sys.solve(f) else { unreachable!("homogeneous systems are consistent") };
    if ker.is_empty() {
        return Ok(Injectivity::Injective);
    }
    let id = MatK::identity(x.n());
    let to_stab = |v: &[Elt]| -> MatK {
        let delta = sys.gamma(v);
        id.add(&xb.mul(&delta, f).mul(&xb.inverse(f).unwrap(), f), f)
    };
    if j >= 1 {
        return Ok(Injectivity::Witness(to_stab(&ker[0])));
    }
    let q = f.q() as u64;
    let total = (ker.len() < 20).then(|| q.pow(ker.len() as u32)).filter(|&t| t <= budget as u64);
    let Some(total) = total else { return Ok(Injectivity::Unknown) };
    for code in 1..total {
        let mut v = alloc::vec![0; sys.unknowns];
        let mut c = code;
        for kv in &ker {
            let a = (c % q) as Elt;
            c /= q;
            for (vi, &ki) in v.iter_mut().zip(kv) {
                *vi = f.add(*vi, f.mul(a, ki));
            }
        }
        let g = to_stab(&v);
        if g.det(f).is_one() {
            return Ok(Injectivity::Witness(g));
        }
    }
    Ok(Injectivity::Injective)
}

/// Smallest `l >= n` such that `g -> g x` is injective on `B_{l-n}` for every
/// `x` in the sample (doubling, then bisection; injectivity is monotone in
/// `l`). Every sampled lattice must be `q^{-m}`-thick.
pub fn find_ell_m(m: i64, sample: &[Lattice], budget: usize) -> Result<EllReport> {
    let Some(first) = sample.first() else {
        return Err(Error::OutOfRange(format!("empty sample")));
    };
    let n = first.n() as i64;
    if let Some(i) = sample.iter().position(|x| x.thin_indicator(-m)) {
        return Err(Error::Hypothesis(format!("sample lattice {} is q^-{}-thin", i, m)));
    }
    let all_injective = |ell: i64| -> Result<Option<(usize, MatK)>> {
        for (i, x) in sample.iter().enumerate() {
            match injective_on(x, ell - n, budget)? {
                Injectivity::Injective => {}
                Injectivity::Witness(g) => return Ok(Some((i, g))),
                Injectivity::Unknown => return Ok(Some((i, MatK::identity(n as usize)))),
            }
        }
        Ok(None)
    };
    let mut lo = n - 1;
    let mut hi = n;
    let mut step = 1;
    let mut below = None;
    loop {
        match all_injective(hi)? {
            None => break,
            Some(w) => {
                lo = hi;
                below = Some(w);
                hi += step;
                step *= 2;
                if hi - n > 4096 {
                    return Err(Error::Budget(format!("no injectivity radius below l = {}", hi)));
                }
            }
        }
    }
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        match all_injective(mid)? {
            None => hi = mid,
            Some(w) => {
                lo = mid;
                below = Some(w);
            }
        }
    }
    let witness_below = if lo >= n { below } else { None };
    Ok(EllReport { ell_m: hi, witness_below, certified: sample.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f2() -> Fq {
        Fq::new(2).unwrap()
    }

    #[test]
    fn membership_examples() {
        let f = f2();
        for (l, nn) in [(1, 0), (2, 1), (3, 2)] {
            assert!(in_ball(&MatK::identity(2), BallParams::new(l, nn), &f));
        }
        let p = BallParams::new(1, 1);
        let edge = crate::orbit::u_t(&[RatFunc::y_pow(-(p.ell + 2 * p.big_n))]);
        assert!(in_ball(&edge, p, &f));
        let beyond = crate::orbit::u_t(&[RatFunc::y_pow(-(p.ell + 2 * p.big_n - 1))]);
        assert!(!in_ball(&beyond, p, &f));
        let mut g = MatK::identity(2);
        g.set(0, 1, RatFunc::one());
        assert!(!in_ball(&g, BallParams::new(1, 0), &f));
        let zero = ball_element(3, BallParams::new(2, 1), 3, || 0, &f);
        assert_eq!(zero, MatK::identity(3));
    }

    #[test]
    fn sampled_ball_properties() {
        let f = Fq::new(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [2, 3] {
            let p = BallParams::new(2, 1);
            for _ in 0..20 {
                let g = sample_ball(n, p, 3, &mut rng, &f).unwrap();
                let h = sample_ball(n, p, 3, &mut rng, &f).unwrap();
                assert!(in_ball(&g, p, &f));
                assert!(in_ball(&g.inverse(&f).unwrap(), p, &f));
                assert!(inverse_expansion_holds(&g, p, &f).unwrap());
                assert!(in_ball(&g.mul(&h, &f), p, &f));
                for lp in [-1, 0, 1, 2] {
                    assert!(in_ball(&conj_a(&g, lp, &f), conj_ball(p, lp, n), &f));
                }
            }
        }
        assert!(sample_ball(2, BallParams::new(1, 0), 0, &mut rng, &f).is_err());
        assert_eq!(conj_ball(BallParams::new(3, 2), 0, 2), BallParams::new(3, 2));
        assert_eq!(conj_ball(BallParams::new(1, 1), 1, 2), BallParams::new(1, 0));
        assert_eq!(conj_ball(BallParams::new(5, 1), -2, 2), BallParams::new(1, 3));
    }

    #[test]
    fn systole_minoration() {
        let f = f2();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let w = sample_small(3, 1, 3, &mut rng, &f);
            let k = [rng.random_range(-4..5), rng.random_range(-4..5), rng.random_range(-4..5)];
            assert!(systole_minoration_holds(&w, &k, 1, &f).unwrap());
        }
    }

    #[test]
    fn coset_examples() {
        let f = f2();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x = build_x_t(&[RatFunc::new(Poly::one(), Poly::from_coeffs(alloc::vec![1, 1, 1]), &f).unwrap()], &f).unwrap();
        let p = BallParams::new(1, 1);
        assert!(same_ball_coset(&x, &x, p, 400).unwrap().is_same());
        for _ in 0..10 {
            let g = sample_ball(2, p, 3, &mut rng, &f).unwrap();
            let y = x.act(&g).unwrap();
            match same_ball_coset(&x, &y, p, 400).unwrap() {
                CosetAnswer::Same(h) => {
                    assert!(in_ball(&h, p, &f));
                    assert_eq!(x.act(&h).unwrap(), y);
                }
                other => panic!("{:?}", other),
            }
        }
        let std = Lattice::standard(2, &f);
        let d = std.act(&exp_k(&[1, -1])).unwrap();
        assert_eq!(same_ball_coset(&std, &d, BallParams::new(1, 0), 400).unwrap(), CosetAnswer::Different);
        assert!(matches!(same_ball_coset(&x, &x, p, 0).unwrap(), CosetAnswer::Inconclusive(_)));
        assert!(same_ball_coset(&x, &x, BallParams::new(0, 0), 400).is_err());
    }

    #[test]
    fn cover_examples() {
        let f = f2();
        let p = BallParams::new(2, 0);
        let (c, a) = cover_ball(&[MatK::identity(2)], p, 1, &f).unwrap();
        assert_eq!((c, a), (alloc::vec![0], alloc::vec![0]));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s: Vec<MatK> = (0..50).map(|_| sample_ball(2, p, 4, &mut rng, &f).unwrap()).collect();
        let (c, a) = cover_ball(&s, p, 1, &f).unwrap();
        assert!(c.len() as u128 <= cover_bound(2, 1, 2));
        let fine = BallParams::new(3, 0);
        for (g, &ci) in s.iter().zip(&a) {
            assert!(in_ball(&g.mul(&s[c[ci]].inverse(&f).unwrap(), &f), fine, &f));
        }
        for (i, &x) in c.iter().enumerate() {
            for &y in &c[i + 1..] {
                assert!(!in_ball(&s[x].mul(&s[y].inverse(&f).unwrap(), &f), fine, &f));
            }
        }
    }

    #[test]
    fn family_count_examples() {
        let f = f2();
        let fam = Family::new(alloc::vec![Poly::y_pow(2)], &f).unwrap();
        let k = [0, 0];
        let p = BallParams::new(1, 0);
        let t0 = fam.lambda()[0].clone();
        let x = build_x_t(&t0, &f).unwrap();
        let c = count_family_in_ball(&fam, &k, p, &x, 400).unwrap();
        assert!(c.count >= 1 && c.count <= 2);
        assert_eq!(c.bound, 4);
        assert!(c.count <= c.bound);
        let far = x.act(&exp_k(&[-2, 2])).unwrap();
        assert!(count_family_in_ball(&fam, &k, BallParams::new(3, 0), &far, 400).is_err());
        let classes = family_ball_classes(&fam, &k, p, 400).unwrap();
        assert_eq!(classes.iter().map(|c| c.len()).sum::<usize>(), 2);
        assert!(count_family_in_ball(&fam, &k, BallParams::new(1, 1), &x, 400).is_err());
    }

    #[test]
    fn partition_examples() {
        let f = f2();
        let mut an = Anchors::new(0, 2, 400).unwrap();
        let std = Lattice::standard(2, &f);
        assert_eq!(cell_id(&std, &mut an).unwrap(), CellId::Coset(0));
        assert_eq!(cell_id(&std, &mut an).unwrap(), CellId::Coset(0));
        let thin = std.act(&exp_k(&[-1, 1])).unwrap();
        assert_eq!(cell_id(&thin, &mut an).unwrap(), CellId::Thin);
        assert_eq!(dynamical_refine(&std, 1, &mut an).unwrap(), alloc::vec![CellId::Coset(0)]);
        assert_eq!(excursion_fn(&std, 1, 0).unwrap(), Q::zero());
        assert_eq!(excursion_fn(&thin, 1, 0).unwrap(), Q::new(1, 1));
        assert!(x_prime_member(&std, 0, Q::new(1, 2), 1).unwrap());
        assert!(!x_prime_member(&thin, 0, Q::new(1, 2), 1).unwrap());
    }

    #[test]
    fn entropy_examples() {
        assert!((entropy_masses([0.5, 0.5], 2) - 1.0).abs() < 1e-12);
        assert_eq!(entropy_masses([1.0], 2), 0.0);
        let h = entropy_masses([0.25, 0.75], 2);
        assert!((h - (2.0 - 0.75 * libm::log2(3.0))).abs() < 1e-12);
        assert!((h - 0.81128).abs() < 1e-5);
        let mu = FiniteMeasure::uniform((0u32..12).collect()).unwrap();
        let phi = |x: &u32| (x * 5 + 1) % 12;
        let cell = |x: &u32| x % 3;
        for (m, nn) in [(1, 1), (1, 4), (2, 5), (3, 3)] {
            assert!(entromino_check(&mu, phi, cell, 3, m, nn, 2).unwrap().ok);
        }
        let a = FiniteMeasure::new(alloc::vec![0u32, 1], alloc::vec![0.5, 0.5]).unwrap();
        let b = FiniteMeasure::new(alloc::vec![2u32], alloc::vec![1.0]).unwrap();
        assert!(entromino_mixture_check(&[(0.3, a), (0.7, b)], |x| *x, 2).unwrap().ok);
        assert!(FiniteMeasure::new(alloc::vec![0u32], alloc::vec![0.5]).is_err());
    }

    #[test]
    fn ell_m_search() {
        let f = f2();
        let r = find_ell_m(0, &[Lattice::standard(2, &f)], 4000).unwrap();
        assert!(r.ell_m >= 2);
        assert_eq!(r.ell_m, 3);
        assert!(r.witness_below.is_some());
    }
}
