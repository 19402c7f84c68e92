use ffdyn::ffarith::{count_ideals_exp, enumerate_monic, euler_phi, factor_monic, Fq, Poly, RatFunc, Val, Q};
use proptest::prelude::*;

fn field() -> impl Strategy<Value = Fq> {
    prop::sample::select(vec![2u64, 3, 4, 5]).prop_map(|q| Fq::new(q).unwrap())
}

fn poly(f: &Fq, max_deg: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec(0..f.q(), 0..=max_deg + 1).prop_map(Poly::from_coeffs)
}

fn monic(f: &Fq, deg: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Poly> {
    let q = f.q();
    deg.prop_flat_map(move |d| prop::collection::vec(0..q, d)).prop_map(|mut c| {
        c.push(1);
        Poly::from_coeffs(c)
    })
}

fn with_field<T: std::fmt::Debug>(g: impl Fn(&Fq) -> BoxedStrategy<T> + 'static) -> impl Strategy<Value = (Fq, T)> {
    field().prop_flat_map(move |f| (Just(f.clone()), g(&f)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn division_with_remainder((f, (a, b)) in with_field(|f| (poly(f, 8), poly(f, 5)).boxed())) {
        prop_assume!(!b.is_zero());
        let (quo, rem) = a.divmod(&b, &f).unwrap();
        prop_assert_eq!(quo.mul(&b, &f).add(&rem, &f), a);
        prop_assert!(rem.deg().map_or(true, |d| d < b.deg().unwrap()));
    }

    #[test]
    fn bezout((f, (a, b)) in with_field(|f| (poly(f, 7), poly(f, 7)).boxed())) {
        prop_assume!(!a.is_zero() || !b.is_zero());
        let (g, u, v) = a.ext_gcd(&b, &f).unwrap();
        prop_assert!(g.is_monic());
        prop_assert_eq!(u.mul(&a, &f).add(&v.mul(&b, &f), &f), g.clone());
        prop_assert!(g.divides(&a, &f) && g.divides(&b, &f));
    }

    #[test]
    fn factorization_multiplies_back((f, s) in with_field(|f| monic(f, 1..=8).boxed())) {
        prop_assert_eq!(factor_monic(&s, &f).unwrap().product(&f), s);
    }

    #[test]
    fn phi_is_multiplicative((f, (a, b)) in with_field(|f| (monic(f, 0..=4), monic(f, 0..=4)).boxed())) {
        prop_assume!(a.gcd(&b, &f).unwrap().is_one());
        let ab = a.mul(&b, &f);
        prop_assert_eq!(euler_phi(&ab, &f).unwrap(), euler_phi(&a, &f).unwrap() * euler_phi(&b, &f).unwrap());
    }

    #[test]
    fn valuation_is_additive_and_ultrametric((f, (a, b, c)) in with_field(|f| (poly(f, 5), poly(f, 5), monic(f, 0..=4)).boxed())) {
        let x = RatFunc::new(a, c.clone(), &f).unwrap();
        let y = RatFunc::new(b, c, &f).unwrap();
        let xy = x.mul(&y, &f).val();
        match (x.val(), y.val()) {
            (Val::Fin(a), Val::Fin(b)) => prop_assert_eq!(xy, Val::Fin(a + b)),
            _ => prop_assert_eq!(xy, Val::Inf),
        }
        prop_assert!(x.add(&y, &f).abs() <= x.abs().max(y.abs()));
    }
}

#[test]
fn ideal_count_residual_is_exact() {
    for q in [2u64, 3, 4, 5, 7] {
        let f = Fq::new(q).unwrap();
        for n in 0..12 {
            let r = count_ideals_exp(n, &f);
            assert_eq!(r.residual, Q::new(-1, q as i128 - 1), "q={} n={}", q, n);
            if n <= 5 {
                let direct: u128 = (0..=n as usize).map(|d| enumerate_monic(d, false, &f).len() as u128).sum();
                assert_eq!(r.count, direct);
            }
        }
    }
}
