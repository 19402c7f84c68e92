use ffdyn::dynball::{
    conj_a, conj_ball, cover_ball, cover_bound, entropy_h, entropy_masses, entromino_check, in_ball,
    inverse_expansion_holds, same_ball_coset, sample_ball, sample_small, systole_minoration_holds, BallParams,
    CosetAnswer, FiniteMeasure,
};
use ffdyn::ffarith::{Fq, Poly, RatFunc};
use ffdyn::latcore::{Lattice, MatK};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_lattice(rng: &mut ChaCha8Rng, n: usize, f: &Fq) -> Lattice {
    loop {
        let mut b = MatK::zero(n);
        for i in 0..n {
            for j in 0..n {
                let p = Poly::from_coeffs((0..3).map(|_| rng.random_range(0..f.q())).collect());
                b.set(i, j, RatFunc::new(p, Poly::y_pow(rng.random_range(0..=2)), f).unwrap());
            }
        }
        if let Ok(l) = Lattice::new(b, f) {
            return l;
        }
    }
}

fn params() -> impl Strategy<Value = (u64, u64, usize, BallParams)> {
    (any::<u64>(), prop::sample::select(vec![2u64, 3]), 2..=3usize, 1..=3i64, 0..=2i64)
        .prop_map(|(seed, q, n, ell, big_n)| (seed, q, n, BallParams::new(ell, big_n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn balls_are_groups((seed, q, n, p) in params()) {
        let f = Fq::new(q).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = sample_ball(n, p, 3, &mut rng, &f).unwrap();
        let h = sample_ball(n, p, 3, &mut rng, &f).unwrap();
        prop_assert!(in_ball(&g, p, &f));
        prop_assert!(g.det(&f).is_one());
        prop_assert!(in_ball(&g.mul(&h, &f), p, &f));
        prop_assert!(in_ball(&g.inverse(&f).unwrap(), p, &f));
        prop_assert!(inverse_expansion_holds(&g, p, &f).unwrap());
    }

    #[test]
    fn balls_shrink_with_parameters((seed, q, n, p) in params()) {
        let f = Fq::new(q).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let finer = [BallParams::new(p.ell + 1, p.big_n), BallParams::new(p.ell, p.big_n + 1)];
        for fp in finer {
            let g = sample_ball(n, fp, 3, &mut rng, &f).unwrap();
            prop_assert!(in_ball(&g, p, &f));
        }
    }

    #[test]
    fn conjugation_moves_between_balls((seed, q, n, p) in params(), lp in -2..=4i64) {
        let f = Fq::new(q).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = sample_ball(n, p, 3, &mut rng, &f).unwrap();
        prop_assert!(in_ball(&conj_a(&g, lp, &f), conj_ball(p, lp, n), &f));
    }

    #[test]
    fn coset_witness_is_genuine((seed, q, n, p) in params()) {
        let f = Fq::new(q).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_lattice(&mut rng, n, &f);
        let g = sample_ball(n, p, 3, &mut rng, &f).unwrap();
        let y = x.act(&g).unwrap();
        match same_ball_coset(&x, &y, p, 4000).unwrap() {
            CosetAnswer::Same(w) => {
                prop_assert!(in_ball(&w, p, &f));
                prop_assert!(x.act(&w).unwrap() == y);
            }
            other => prop_assert!(false, "{:?}", other),
        }
        // the relation is symmetric
        prop_assert!(same_ball_coset(&y, &x, p, 4000).unwrap().is_same());
    }

    #[test]
    fn systole_minoration(seed in any::<u64>(), n in 2..=3usize, ell in 1..=3i64) {
        let f = Fq::new(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = sample_small(n, ell, 3, &mut rng, &f);
        let k: Vec<i64> = (0..n).map(|_| rng.random_range(-4..=4)).collect();
        prop_assert!(systole_minoration_holds(&w, &k, ell, &f).unwrap());
    }

    #[test]
    fn covers_respect_the_bound(seed in any::<u64>(), n in 2..=3usize) {
        let f = Fq::new(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = BallParams::new(1, 0);
        let s: Vec<MatK> = (0..30).map(|_| sample_ball(n, p, 4, &mut rng, &f).unwrap()).collect();
        let (centers, assign) = cover_ball(&s, p, 1, &f).unwrap();
        prop_assert!(centers.len() as u128 <= cover_bound(2, 1, n));
        prop_assert_eq!(assign.len(), s.len());
    }

    #[test]
    fn entropy_bounds(weights in prop::collection::vec(0.01f64..1.0, 1..20), cells in 1..6usize, q in 2u32..6) {
        let total: f64 = weights.iter().sum();
        let w: Vec<f64> = weights.iter().map(|x| x / total).collect();
        let k = w.len();
        let mu = FiniteMeasure::new((0..k).collect(), w).unwrap();
        let coarse = entropy_h(&mu, |x| *x % cells, q);
        let fine = entropy_h(&mu, |x| *x, q);
        prop_assert!(coarse >= -1e-12);
        prop_assert!(coarse <= fine + 1e-9);
        prop_assert!(fine <= (k as f64).ln() / (q as f64).ln() + 1e-9);
    }

    #[test]
    fn entromino_holds(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let k = rng.random_range(2..=16usize);
        let mu = FiniteMeasure::uniform((0..k).collect::<Vec<usize>>()).unwrap();
        let map: Vec<usize> = (0..k).map(|_| rng.random_range(0..k)).collect();
        let cell: Vec<usize> = (0..k).map(|_| rng.random_range(0..3)).collect();
        let big_n = rng.random_range(1..=5);
        let m = rng.random_range(1..=big_n);
        prop_assert!(entromino_check(&mu, |x| map[*x], |x| cell[*x], 3, m, big_n, 2).unwrap().ok);
    }
}

#[test]
fn entropy_reference_values() {
    assert!((entropy_masses([0.5, 0.5], 2) - 1.0).abs() < 1e-12);
    assert_eq!(entropy_masses([1.0], 2), 0.0);
    let h = entropy_masses([0.25, 0.75], 2);
    assert!((h - (2.0 - 0.75 * 3f64.log2())).abs() < 1e-12);
}
