use ffdyn::cf2::{cf_expand, ht_cf, treecase_report, twist_coeffs, CFExpansion};
use ffdyn::ffarith::{Fq, Poly, RatFunc};
use ffdyn::latcore::{Lattice, MatK};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_poly(rng: &mut ChaCha8Rng, max_deg: usize, q: u32) -> Poly {
    Poly::from_coeffs((0..=max_deg).map(|_| rng.random_range(0..q)).collect())
}

fn random_lattice(rng: &mut ChaCha8Rng, n: usize, f: &Fq) -> Lattice {
    loop {
        let mut b = MatK::zero(n);
        for i in 0..n {
            for j in 0..n {
                let e = rng.random_range(0..=2usize);
                b.set(i, j, RatFunc::new(random_poly(rng, 3, f.q()), Poly::y_pow(e), f).unwrap());
            }
        }
        if let Ok(l) = Lattice::new(b, f) {
            return l;
        }
    }
}

/// Product of random elementary matrices over `F_q[Y]`, so in `GL_n(R_v)`.
fn integral_unimodular(rng: &mut ChaCha8Rng, n: usize, f: &Fq) -> MatK {
    let mut u = MatK::identity(n);
    for _ in 0..4 {
        let i = rng.random_range(0..n);
        let j = (i + rng.random_range(1..n)) % n;
        let mut e = MatK::identity(n);
        e.set(i, j, RatFunc::from_poly(random_poly(rng, 2, f.q())));
        u = u.mul(&e, f);
    }
    u
}

fn setup(seed: u64, qi: usize) -> (ChaCha8Rng, Fq) {
    let f = Fq::new([2, 3, 4, 5][qi]).unwrap();
    (ChaCha8Rng::seed_from_u64(seed), f)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn change_of_basis_keeps_the_lattice(seed in any::<u64>(), qi in 0..4usize, n in 2..=3usize) {
        let (mut rng, f) = setup(seed, qi);
        let l = random_lattice(&mut rng, n, &f);
        let u = integral_unimodular(&mut rng, n, &f);
        let m = Lattice::new(l.basis().mul(&u, &f), &f).unwrap();
        prop_assert!(m == l);
        prop_assert_eq!(m.min_log_norm(), l.min_log_norm());
        prop_assert_eq!(m.smith_type().ok(), l.smith_type().ok());
    }

    #[test]
    fn reduction_systole_matches_exhaustive_search(seed in any::<u64>(), qi in 0..2usize, n in 2..=3usize) {
        let (mut rng, f) = setup(seed, qi);
        let l = random_lattice(&mut rng, n, &f);
        prop_assert_eq!(l.svp_bruteforce(50_000_000).unwrap(), l.min_log_norm());
    }

    #[test]
    fn action_round_trip_and_covolume(seed in any::<u64>(), qi in 0..4usize, n in 2..=3usize) {
        let (mut rng, f) = setup(seed, qi);
        let l = random_lattice(&mut rng, n, &f);
        let g = random_lattice(&mut rng, n, &f).basis().clone();
        let gl = l.act(&g).unwrap();
        prop_assert!(gl.act(&g.inverse(&f).unwrap()).unwrap() == l);
        let dv = g.det(&f).val().fin().unwrap();
        prop_assert_eq!(gl.norm_covol_log(), l.norm_covol_log() - dv);
    }

    #[test]
    fn expansion_reconstructs_its_value(seed in any::<u64>(), qi in 0..4usize) {
        let (mut rng, f) = setup(seed, qi);
        let den = loop {
            let d = random_poly(&mut rng, 7, f.q());
            if !d.is_zero() { break d; }
        };
        let x = RatFunc::new(random_poly(&mut rng, 9, f.q()), den, &f).unwrap();
        let e = cf_expand(&x, &f);
        prop_assert_eq!(e.value(&f), x.clone());
        let (ht, cf) = ht_cf(&x, &f);
        prop_assert_eq!(ht, cf);
        let u = rng.random_range(1..f.q());
        let t = CFExpansion::from_coeffs(twist_coeffs(&e.a, u, &f).unwrap(), &f).unwrap();
        prop_assert_eq!(t.value(&f), x.scale(u, &f));
    }

    #[test]
    fn three_way_identity(seed in any::<u64>(), qi in 0..4usize, d in 1..=10usize) {
        let (mut rng, f) = setup(seed, qi);
        let mut c: Vec<u32> = (0..d).map(|_| rng.random_range(0..f.q())).collect();
        c.push(1);
        let s = Poly::from_coeffs(c);
        let r = random_poly(&mut rng, d - 1, f.q());
        prop_assume!(r.gcd(&s, &f).unwrap().is_one());
        let rep = treecase_report(&r, &s, &f).unwrap();
        prop_assert!(rep.agree, "{:?}", rep);
    }
}
