//! Finitely supported measures on the space of lattices built from orbit
//! windows and families, and observables to integrate against them.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt::Write;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::ffarith::{Fq, Poly, RatFunc, Q};
use crate::latcore::{Lattice, MatK, SmithType};

use super::family::{w_vector, Family};
use super::invariants::{build_x_t, directional_systoles, exp_k, orbit_invariants};

/// A real-valued function on lattices. Integration against measures whose
/// diagonal-unit average has been collapsed is only meaningful when the
/// function is invariant under `A(O_v)`; the witness records why.
#[derive(Clone)]
pub struct Observable {
    name: String,
    witness: Option<&'static str>,
    eval: Arc<dyn Fn(&Lattice) -> f64 + Send + Sync>,
}

impl core::fmt::Debug for Observable {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "Observable({})", self.name)
    }
}

const NORM_WITNESS: &str = "depends only on norms of lattice vectors";

impl Observable {
    pub fn new<F>(name: &str, witness: &'static str, f: F) -> Self
    where
        F: Fn(&Lattice) -> f64 + Send + Sync + 'static,
    {
        Observable { name: String::from(name), witness: Some(witness), eval: Arc::new(f) }
    }
    /// An observable without an invariance witness; rejected by
    /// [`eval_observable`].
    pub fn unwitnessed<F>(name: &str, f: F) -> Self
    where
        F: Fn(&Lattice) -> f64 + Send + Sync + 'static,
    {
        Observable { name: String::from(name), witness: None, eval: Arc::new(f) }
    }
    pub fn constant(c: f64) -> Self {
        Self::new("constant", "constant", move |_| c)
    }
    /// `log_q sys(L)`.
    pub fn log_systole() -> Self {
        Self::new("log_sys", NORM_WITNESS, |l| l.systole().log_q_f64())
    }
    /// `sys(L)` as a real number.
    pub fn systole() -> Self {
        Self::new("sys", NORM_WITNESS, |l| l.systole().value(l.field().q()))
    }
    /// Indicator of `sys(L) < q^e`.
    pub fn thin(e: i64) -> Self {
        Self::new("thin", NORM_WITNESS, move |l| if l.thin_indicator(e) { 1.0 } else { 0.0 })
    }
    /// Indicator of `sys(L) <= q^e`.
    pub fn thin_le(e: i64) -> Self {
        Self::new("thin_le", NORM_WITNESS, move |l| if l.systole().n_log <= e * l.n() as i64 { 1.0 } else { 0.0 })
    }
    /// Indicator of `sys(L) >= q^{-m}`.
    pub fn thick(m: i64) -> Self {
        Self::new("thick", NORM_WITNESS, move |l| if l.thin_indicator(-m) { 0.0 } else { 1.0 })
    }
    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn witness(&self) -> Option<&'static str> {
        self.witness
    }
    pub fn eval(&self, l: &Lattice) -> f64 {
        (self.eval)(l)
    }
}

/// Checks `f(aL) = f(L)` for diagonal `a` with entries in `F_q^×`, trying at
/// most `limit` such twists.
pub fn check_unit_twist(f: &Observable, l: &Lattice, limit: usize) -> bool {
    let fq = l.field();
    let n = l.n();
    let units: Vec<u32> = fq.units().collect();
    let base = f.eval(l);
    let total = units.len().pow(n as u32);
    for code in 0..total.min(limit) {
        let mut c = code;
        let d: Vec<RatFunc> = (0..n)
            .map(|_| {
                let u = units[c % units.len()];
                c /= units.len();
                RatFunc::constant(u)
            })
            .collect();
        let al = l.act(&MatK::diag(&d)).unwrap();
        if f.eval(&al) != base {
            return false;
        }
    }
    true
}

#[derive(Debug, Clone)]
pub struct Atom {
    pub t: Vec<RatFunc>,
    pub k: Vec<i64>,
    pub lattice: Lattice,
    pub weight: Q,
}

/// Weighted finite collection of lattices.
#[derive(Debug, Clone)]
pub struct SampledMeasure {
    pub atoms: Vec<Atom>,
    pub normalized: bool,
}

impl SampledMeasure {
    pub fn total_mass(&self) -> Q {
        self.atoms.iter().fold(Q::zero(), |a, x| a + x.weight)
    }
    pub fn len(&self) -> usize {
        self.atoms.len()
    }
    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }
    /// `c_a mu_a + c_b mu_b`.
    pub fn mixture(a: &SampledMeasure, ca: Q, b: &SampledMeasure, cb: Q) -> SampledMeasure {
        let mut atoms = Vec::with_capacity(a.len() + b.len());
        for x in &a.atoms {
            atoms.push(Atom { weight: x.weight * ca, ..x.clone() });
        }
        for x in &b.atoms {
            atoms.push(Atom { weight: x.weight * cb, ..x.clone() });
        }
        let mut m = SampledMeasure { atoms, normalized: false };
        m.normalized = m.total_mass().is_one();
        m
    }
}

#[derive(Debug, Clone)]
pub enum MeasureKind<'a> {
    /// Uniform over the compact core window `exp(Delta^x) x`.
    NuX(&'a Lattice),
    /// `nu_s^Diamond`.
    Diamond(&'a Family),
    /// `nu_s^Delta`.
    Delta(&'a Family),
    /// `nu_{s,[k,N]}`.
    Interval { family: &'a Family, k: Vec<i64>, len: usize },
}

fn family_atoms(fam: &Family, ks: &[Vec<i64>]) -> Result<Vec<Atom>> {
    let f = fam.field();
    let lam = fam.lambda();
    let total = (lam.len() * ks.len()) as i128;
    if total == 0 {
        return Err(Error::InvalidFamily(format!("empty index set")));
    }
    let w = Q::new(1, total);
    let mut atoms = Vec::with_capacity(total as usize);
    for t in &lam {
        let x = build_x_t(t, f)?;
        for k in ks {
            atoms.push(Atom { t: t.clone(), k: k.clone(), lattice: x.act(&exp_k(k))?, weight: w });
        }
    }
    Ok(atoms)
}

/// Discrete interval `[k, N] = {k + j w : 0 <= j < N}`.
pub fn interval(k: &[i64], len: usize) -> Vec<Vec<i64>> {
    let w = w_vector(k.len());
    (0..len as i64).map(|j| k.iter().zip(&w).map(|(a, b)| a + j * b).collect()).collect()
}

pub fn build_measure(kind: MeasureKind<'_>) -> Result<SampledMeasure> {
    let atoms = match kind {
        MeasureKind::NuX(x) => {
            let inv = orbit_invariants(x);
            let w = Q::new(1, inv.delta_x.len() as i128);
            let mut atoms = Vec::with_capacity(inv.delta_x.len());
            for k in inv.delta_x {
                atoms.push(Atom { t: Vec::new(), lattice: x.act(&exp_k(&k))?, k, weight: w });
            }
            atoms
        }
        MeasureKind::Diamond(fam) => family_atoms(fam, &fam.diamond())?,
        MeasureKind::Delta(fam) => family_atoms(fam, &fam.delta())?,
        MeasureKind::Interval { family, k, len } => {
            if len == 0 {
                return Err(Error::OutOfRange(format!("interval length must be positive")));
            }
            if !family.in_diamond(&k) {
                return Err(Error::Hypothesis(format!("k = {:?} is not in Diamond_s", k)));
            }
            let ks = interval(&k, len);
            if !family.in_diamond(ks.last().unwrap()) {
                return Err(Error::Hypothesis(format!("k + (N-1)w = {:?} leaves Diamond_s", ks.last().unwrap())));
            }
            family_atoms(family, &ks)?
        }
    };
    Ok(SampledMeasure { atoms, normalized: true })
}

/// `sum_atoms weight * f(atom)`; observables without a witness are rejected.
pub fn eval_observable(mu: &SampledMeasure, f: &Observable) -> Result<f64> {
    if f.witness().is_none() {
        return Err(Error::NoWitness);
    }
    let mut acc = 0.0;
    for a in &mu.atoms {
        acc += q_to_f64(a.weight) * f.eval(&a.lattice);
    }
    Ok(acc)
}

/// Exact mass of the atoms satisfying `pred`.
pub fn mass_where<P: Fn(&Lattice) -> bool>(mu: &SampledMeasure, pred: P) -> Q {
    mu.atoms.iter().filter(|a| pred(&a.lattice)).fold(Q::zero(), |acc, a| acc + a.weight)
}

pub fn q_to_f64(x: Q) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

/// Tab-separated atom table with columns `t, k, weight, sys, sys_i`.
pub fn atom_table(mu: &SampledMeasure, f: &Fq) -> String {
    let mut s = String::from("t\tk\tweight\tsys\tsys_i\n");
    for a in &mu.atoms {
        let t: Vec<String> = a.t.iter().map(|x| x.to_text(f)).collect();
        let k: Vec<String> = a.k.iter().map(|x| format!("{}", x)).collect();
        let (dsys, _) = directional_systoles(&a.lattice);
        let ds: Vec<String> = dsys.iter().map(|x| format!("{}", x)).collect();
        let sys = a.lattice.systole().log_q();
        let _ = writeln!(
            s,
            "{}\t{}\t{}/{}\t{}/{}\t{}",
            t.join(";"),
            k.join(","),
            a.weight.numer(),
            a.weight.denom(),
            sys.numer(),
            sys.denom(),
            ds.join(",")
        );
    }
    s
}

/// Comparison of the windowed orbital average with the compact-core
/// average for an observable clipped to `sys >= q^{-m}`.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowReport {
    pub tau: i64,
    pub card_window: usize,
    pub card_core: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
}

/// `lhs = (1/(c_n tau^{n-1})) sum_{k in Delta^{x,m}} f(exp(k) x)`,
/// `rhs = mean_{k in Delta^x} f(exp(k) x)`, with `c_n = 1/(n-1)!`; the
/// normalizer is replaced by 1 when `tau = 0`.
pub fn window_compare(x: &Lattice, f: &Observable, m: i64) -> Result<WindowReport> {
    if f.witness().is_none() {
        return Err(Error::NoWitness);
    }
    if m < 0 {
        return Err(Error::OutOfRange(format!("m = {} < 0", m)));
    }
    let n = x.n();
    let (sys, tau) = directional_systoles(x);
    let clipped = |l: &Lattice| if l.thin_indicator(-m) { 0.0 } else { f.eval(l) };
    let window = super::invariants::delta_set(&sys.iter().map(|s| -s - m).collect::<Vec<_>>());
    let core = super::invariants::delta_set(&sys.iter().map(|s| -s).collect::<Vec<_>>());
    let mut sum_w = 0.0;
    for k in &window {
        sum_w += clipped(&x.act(&exp_k(k))?);
    }
    let mut sum_c = 0.0;
    for k in &core {
        sum_c += clipped(&x.act(&exp_k(k))?);
    }
    let mut fact = 1.0;
    for i in 1..n {
        fact *= i as f64;
    }
    let norm = if tau > 0 { libm::pow(tau as f64, (n - 1) as f64) / fact } else { 1.0 };
    let lhs = sum_w / norm;
    let rhs = sum_c / core.len() as f64;
    Ok(WindowReport { tau, card_window: window.len(), card_core: core.len(), lhs, rhs, gap: lhs - rhs })
}

/// Discriminant (log form and value) and type of the orbit of `x_t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscType {
    pub disc_log: i64,
    pub disc_value: u128,
    pub types: Vec<SmithType>,
}

/// Closed form for the family: `disc = sum deg s_i`, type
/// `(1, s_(2), ..., s_(n))` in divisibility order.
pub fn orbit_disc_type(fam: &Family) -> DiscType {
    let q = fam.field().q() as u128;
    let disc_log: i64 = fam.s().iter().map(|p| p.deg().unwrap() as i64).sum();
    let mut sorted: Vec<Poly> = fam.s().to_vec();
    sorted.sort_by_key(|p| p.deg());
    let mut ty = alloc::vec![Poly::one()];
    ty.extend(sorted);
    DiscType { disc_log, disc_value: q.pow(disc_log as u32), types: alloc::vec![SmithType(ty)] }
}

/// Bounded search over diagonal scalings `a = diag(a_1, ..., a_n)` with
/// monic polynomial entries and `sum deg a_i <= bound`, keeping the
/// integral lattices `a x` of least covolume.
pub fn disc_type_search(x: &Lattice, bound: usize) -> Result<Option<DiscType>> {
    let f = x.field();
    let n = x.n();
    let polys = crate::ffarith::enumerate_monic_upto(bound, f);
    let mut best: Option<(i64, Vec<SmithType>)> = None;
    let mut idx = alloc::vec![0usize; n];
    loop {
        let degs: usize = idx.iter().map(|&i| polys[i].deg().unwrap()).sum();
        if degs <= bound {
            let d: Vec<RatFunc> = idx.iter().map(|&i| RatFunc::from_poly(polys[i].clone())).collect();
            let al = x.act(&MatK::diag(&d))?;
            if al.is_integral() {
                let c = al.norm_covol_log();
                let ty = al.smith_type()?;
                match &mut best {
                    Some((bc, set)) if *bc == c => {
                        if !set.contains(&ty) {
                            set.push(ty);
                        }
                    }
                    Some((bc, _)) if *bc < c => {}
                    _ => {
                        best = Some((c, alloc::vec![ty]));
                    }
                }
            }
        }
        let mut pos = 0;
        loop {
            if pos == n {
                return Ok(best.map(|(c, set)| DiscType {
                    disc_log: c,
                    disc_value: (f.q() as u128).pow(c as u32),
                    types: set,
                }));
            }
            idx[pos] += 1;
            if idx[pos] < polys.len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffarith::Fq;

    #[test]
    fn measure_examples() {
        let f = Fq::new(2).unwrap();
        let std = Lattice::standard(2, &f);
        let m = build_measure(MeasureKind::NuX(&std)).unwrap();
        assert_eq!(m.len(), 1);
        assert!(m.total_mass().is_one());
        assert_eq!(eval_observable(&m, &Observable::systole()).unwrap(), 1.0);
        let fam = Family::new(alloc::vec![Poly::y_pow(2)], &f).unwrap();
        let d = build_measure(MeasureKind::Diamond(&fam)).unwrap();
        assert_eq!(d.len(), 4);
        assert!(d.atoms.iter().all(|a| a.weight == Q::new(1, 4)));
        let iv = build_measure(MeasureKind::Interval { family: &fam, k: fam.k_s(), len: 1 }).unwrap();
        assert_eq!(iv.len(), 2);
        assert!(build_measure(MeasureKind::Interval { family: &fam, k: fam.k_s(), len: 2 }).is_err());
        assert_eq!(eval_observable(&d, &Observable::constant(1.0)).unwrap(), 1.0);
        let bad = Observable::unwitnessed("raw", |l| l.norm_covol_log() as f64);
        assert_eq!(eval_observable(&d, &bad), Err(Error::NoWitness));
    }

    #[test]
    fn nu_delta_decomposes() {
        let f = Fq::new(2).unwrap();
        let fam = Family::new(alloc::vec![Poly::y_pow(4)], &f).unwrap();
        let nd = build_measure(MeasureKind::Delta(&fam)).unwrap();
        let lam = fam.lambda();
        let mut pieces = Vec::new();
        for t in &lam {
            let x = build_x_t(t, &f).unwrap();
            pieces.extend(build_measure(MeasureKind::NuX(&x)).unwrap().atoms);
        }
        assert_eq!(pieces.len(), nd.len());
        for (a, b) in nd.atoms.iter().zip(&pieces) {
            assert_eq!(a.lattice, b.lattice);
            assert_eq!(a.weight, b.weight / Q::from_integer(lam.len() as i128));
        }
    }

    #[test]
    fn window_examples() {
        let f = Fq::new(2).unwrap();
        let std = Lattice::standard(2, &f);
        let r = window_compare(&std, &Observable::constant(0.0), 2).unwrap();
        assert_eq!(r.gap, 0.0);
        let r = window_compare(&std, &Observable::thick(1), 1).unwrap();
        assert_eq!(r.card_core, 1);
        assert!(r.card_window > 1);
    }

    #[test]
    fn disc_type_examples() {
        let f = Fq::new(2).unwrap();
        let fam = Family::new(alloc::vec![Poly::y_pow(2)], &f).unwrap();
        let dt = orbit_disc_type(&fam);
        assert_eq!(dt.disc_log, 2);
        assert_eq!(dt.disc_value, 4);
        assert_eq!(dt.types, alloc::vec![SmithType(alloc::vec![Poly::one(), Poly::y_pow(2)])]);
        for t in fam.lambda() {
            let x = build_x_t(&t, &f).unwrap();
            assert_eq!(disc_type_search(&x, 3).unwrap().unwrap(), dt);
        }
        let fam3 = Family::new(alloc::vec![Poly::y_pow(1), Poly::y_pow(3)], &f).unwrap();
        let dt3 = orbit_disc_type(&fam3);
        assert_eq!(dt3.disc_log, 4);
        let t = fam3.lambda().into_iter().next().unwrap();
        let x = build_x_t(&t, &f).unwrap();
        assert_eq!(disc_type_search(&x, 4).unwrap().unwrap(), dt3);
    }

    #[test]
    fn twist_invariance_of_shipped_observables() {
        let f = Fq::new(3).unwrap();
        let fam = Family::new(alloc::vec![Poly::y_pow(2)], &f).unwrap();
        for t in fam.lambda() {
            let x = build_x_t(&t, &f).unwrap().act(&exp_k(&fam.k_s())).unwrap();
            for o in [Observable::systole(), Observable::thin(0), Observable::thick(0), Observable::log_systole()] {
                assert!(check_unit_twist(&o, &x, 16));
            }
        }
    }
}
