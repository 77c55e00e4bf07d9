use std::f64::consts::PI;

use cstk::equivariant::*;
use cstk::forms::{FormField, ModelChart, QuadratureSpec};
use proptest::prelude::*;

fn invariant_one_form(b: ToyBundle, c: [f64; 3]) -> FormField {
    match b {
        // coefficients depend on η only
        ToyBundle::Hopf => FormField::scalar(b.total_chart(), 1, move |x| {
            vec![c[0] * x[0].sin(), c[1] * (2.0 * x[0]).cos() + 0.2, c[2] * x[0] * x[0]]
        }),
        // coefficients depend on (x¹, x²) only
        ToyBundle::TorusBundle => FormField::scalar(b.total_chart(), 1, move |x| {
            vec![c[0] * (2.0 * PI * x[1]).sin(), c[1] * (2.0 * PI * x[0]).cos(), c[2] + 0.3 * (2.0 * PI * x[0]).sin()]
        }),
    }
    .unwrap()
}

fn base_points(b: ToyBundle) -> Vec<Vec<f64>> {
    match b {
        ToyBundle::Hopf => vec![vec![0.4, 1.0], vec![0.9, 2.5], vec![1.2, 5.0]],
        ToyBundle::TorusBundle => vec![vec![0.1, 0.7], vec![0.45, 0.3], vec![0.8, 0.95]],
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn chern_weil_map_intertwines_differentials(c in prop::array::uniform3(-1.0f64..1.0), which in 0usize..2) {
        let b = ToyBundle::all()[which];
        let q = QuadratureSpec::default();
        let alpha = EquivariantForm::new(b.action(), 1, vec![EquivariantTerm::new(vec![], invariant_one_form(b, c))]).unwrap();
        let lhs = chern_weil_map(&cartan_differential(&alpha, &q).unwrap(), b).unwrap();
        let rhs = chern_weil_map(&alpha, b).unwrap().exterior_derivative(&q).unwrap();
        prop_assert!(lhs.sub(&rhs).unwrap().sup_norm(&base_points(b)) < 1e-6);
    }

    #[test]
    fn cartan_differential_squares_to_zero(c in prop::array::uniform3(-1.0f64..1.0), x in -2.0f64..2.0) {
        let b = ToyBundle::TorusBundle;
        let q = QuadratureSpec::default();
        let f = FormField::scalar(b.total_chart(), 0, move |y| vec![c[0] * (2.0 * PI * y[0]).sin() * (2.0 * PI * y[1]).cos()]).unwrap();
        let alpha = EquivariantForm::new(
            b.action(),
            2,
            vec![EquivariantTerm::new(vec![], b.curvature_form().scale(cstk::liealg::C64::new(c[1], 0.0))), EquivariantTerm::new(vec![0], f)],
        )
        .unwrap();
        let dc2 = cartan_differential(&cartan_differential(&alpha, &q).unwrap(), &q).unwrap();
        let pts = vec![vec![0.1, 0.2, 0.3], vec![0.6, 0.5, 0.9], vec![0.3, 0.8, 0.1]];
        prop_assert!(dc2.sup_norm(&[x], &pts) < 1e-5);
    }
}

#[test]
fn equivariant_curvature_extension_is_closed() {
    // F_A − x·A(V) = F_A − x is d_c-closed on both toy bundles.
    let q = QuadratureSpec::default();
    for b in ToyBundle::all() {
        let one = FormField::constant_function(b.total_chart(), -1.0);
        let alpha = EquivariantForm::new(
            b.action(),
            2,
            vec![EquivariantTerm::new(vec![], b.curvature_form()), EquivariantTerm::new(vec![0], one)],
        )
        .unwrap();
        let dc = cartan_differential(&alpha, &q).unwrap();
        let pts: Vec<Vec<f64>> = match b.total_chart() {
            ModelChart::Torus(_) => vec![vec![0.2, 0.4, 0.6], vec![0.9, 0.1, 0.3]],
            _ => vec![vec![0.5, 1.0, 2.0], vec![1.1, 4.0, 0.3]],
        };
        assert!(dc.sup_norm(&[0.7], &pts) < 1e-6, "{}", b.name());
    }
}
