use cstk::liealg::*;
use proptest::prelude::*;

fn su2_from(a: [f64; 3]) -> CMat {
    let s = cstk::chernweil::pauli();
    (&s[0] * C64::new(a[0], 0.0) + &s[1] * C64::new(a[1], 0.0) + &s[2] * C64::new(a[2], 0.0)) * C64::i()
}

// exp(i a·σ) = cos|a| I + i sin|a| (a·σ)/|a|
fn rodrigues(a: [f64; 3]) -> CMat {
    let n = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
    let mut m = CMat::identity(2, 2) * C64::new(n.cos(), 0.0);
    if n > 0.0 {
        m += su2_from(a) * C64::new(n.sin() / n, 0.0);
    }
    m
}

fn coords() -> impl Strategy<Value = [f64; 3]> {
    prop::array::uniform3(-1.5f64..1.5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exp_matches_rodrigues(a in coords()) {
        let x = AlgebraElement::new(GroupId::SU(2), su2_from(a)).unwrap();
        prop_assert!(frob(&(exp_map(&x).matrix() - rodrigues(a))) < 1e-12);
    }

    #[test]
    fn exp_log_round_trip(a in coords(), n in 2usize..4, seed in any::<u64>()) {
        use rand::SeedableRng;
        let g = GroupId::SU(n);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let x = if n == 2 {
            AlgebraElement::new(g, su2_from(a)).unwrap()
        } else {
            let y = AlgebraElement::random(g, &mut rng);
            y.scale(1.2 / y.norm().max(1e-12))
        };
        let back = log_map(&exp_map(&x)).unwrap();
        prop_assert!(frob(&(back.matrix() - x.matrix())) < 1e-10);
    }

    #[test]
    fn polynomials_are_ad_invariant(r in 1usize..4, n in 2usize..4, seed in any::<u64>()) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let g = GroupId::SU(n);
        let p = InvariantPolynomial::default_for(r).unwrap();
        let xs: Vec<AlgebraElement> = (0..r).map(|_| AlgebraElement::random(g, &mut rng)).collect();
        let h = GroupElement::random(g, &mut rng);
        let moved: Vec<AlgebraElement> = xs.iter().map(|x| adjoint_action(&h, x).unwrap()).collect();
        let d = eval_polynomial(&p, &xs).unwrap() - eval_polynomial(&p, &moved).unwrap();
        prop_assert!(d.norm() < 1e-12);
    }

    #[test]
    fn bracket_satisfies_jacobi(seed in any::<u64>()) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let g = GroupId::SU(3);
        let [a, b, c] = [0, 1, 2].map(|_| AlgebraElement::random(g, &mut rng));
        let j = a.bracket(&b.bracket(&c).unwrap()).unwrap()
            .add(&b.bracket(&c.bracket(&a).unwrap()).unwrap()).unwrap()
            .add(&c.bracket(&a.bracket(&b).unwrap()).unwrap()).unwrap();
        prop_assert!(j.norm() < 1e-12);
    }
}

#[test]
fn u1_exponential_is_a_phase() {
    let x = AlgebraElement::new(GroupId::U1, CMat::from_element(1, 1, C64::new(0.0, 0.7))).unwrap();
    let g = exp_map(&x);
    assert!((g.matrix()[(0, 0)] - C64::from_polar(1.0, 0.7)).norm() < 1e-15);
}
