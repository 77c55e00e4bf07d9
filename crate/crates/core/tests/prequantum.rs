use cstk::chernweil::ModZValue;
use cstk::forms::{builtin_chain, QuadratureSpec};
use cstk::liealg::InvariantPolynomial;
use cstk::prequantum::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn heisenberg_cocycle_and_corruption() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (pairs, points) = random_pairs(100, &mut rng);
    let lift = build_lift(&PrequantumData::heisenberg()).unwrap();
    assert!(cocycle_check(&lift, &pairs, &points).unwrap() < 1e-10);

    let bad = build_lift(&PrequantumData::heisenberg().with_corrupted_character(0.3)).unwrap();
    let dev = cocycle_check(&bad, &[([1, 0], [0, 1])], &[[0.4, 0.2]]).unwrap();
    assert!((dev - 0.3).abs() < 1e-9, "{dev}");
}

#[test]
fn pillowcase_holonomy_is_area() {
    let p = InvariantPolynomial::default_for(2).unwrap();
    let q = QuadratureSpec::new(8, 1e-5).unwrap();
    let pc = Pillowcase::new(&p, CORNER_MARGIN, &q).unwrap();
    let sq = vec![square([0.4, 0.5], 0.3)];
    let (h, a) = (pc.holonomy(&sq).unwrap(), pc.area(&sq).unwrap());
    eprintln!("holonomy {h}, area {a}, density {}", a / 0.09);
    assert!(h.distance(&ModZValue::new(a)) < 1e-4);
    assert!((a / 0.09 - 1.0 / (2.0 * std::f64::consts::PI.powi(2))).abs() < 1e-6);

    let big = vec![vec![[0.3, 0.2], [2.8, 0.4], [2.6, 2.9], [0.5, 2.5], [0.3, 0.2]]];
    let (h, a) = (pc.holonomy(&big).unwrap(), pc.area(&big).unwrap());
    assert!(h.distance(&ModZValue::new(a)) < 1e-4, "{h} vs {a}");

    let both = vec![big[0].clone(), square([1.0, 1.0], 0.2)];
    let h2 = pc.holonomy(&both).unwrap();
    assert!(h2.distance(&(h + ModZValue::new(pc.area(&both[1..]).unwrap()))) < 1e-4);
}

#[test]
fn high_degree_flatness() {
    let p = InvariantPolynomial::default_for(3).unwrap();
    let q = QuadratureSpec::new(6, 1e-5).unwrap();
    let fam = high_degree_family().unwrap();
    let c = builtin_chain("torus4.fundamental").unwrap();
    let a = square([0.1, 0.2], 0.5);
    let b = vec![[0.1, 0.2], [0.7, 0.1], [0.6, 0.8], [0.1, 0.7], [0.1, 0.2]];
    let t = std::time::Instant::now();
    let rep = flatness_for_high_degree(&p, &fam, &c, &[a.clone()], &[(a, b)], &q).unwrap();
    eprintln!("{rep:?} in {:?}", t.elapsed());
    assert!(rep.potential_sup.is_finite());
    assert!(rep.max_deviation() < 1e-5);
}

#[test]
fn high_degree_needs_a_flat_family() {
    use cstk::equivariant::ConnectionFamily;
    use std::sync::Arc;
    let p = InvariantPolynomial::default_for(3).unwrap();
    let q = QuadratureSpec::new(4, 1e-5).unwrap();
    let h = cstk::liealg::GroupId::SU(3).basis()[2].clone();
    let fam = ConnectionFamily::new(
        cstk::forms::ModelChart::torus(4).unwrap(),
        cstk::forms::ModelChart::Euclidean(2),
        cstk::liealg::GroupId::SU(3),
        Arc::new(move |x, s| {
            let c = cstk::liealg::C64::new(s[0] * (6.0 * x[1]).sin(), 0.0);
            vec![&h * c, h.clone() * cstk::liealg::C64::new(0.0, 0.0), h.clone(), h.clone()]
        }),
    )
    .unwrap();
    let c = builtin_chain("torus4.fundamental").unwrap();
    let r = flatness_for_high_degree(&p, &fam, &c, &[square([0.1, 0.1], 0.2)], &[], &q);
    assert!(matches!(r, Err(cstk::Error::NotFlat { .. })));
}
