//! Cartan model: equivariant forms and `d_c`, the Chern-Weil map on toy
//! bundles, equivariant characteristic forms, and connection families on
//! `M × S` with their bigraded curvature.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::chernweil::{poly_ext, poly_power, transgression_form, DEFAULT_T_NODES};
use crate::connection::Connection;
use crate::error::{Error, Result};
use crate::forms::exterior::{binomial, from_mask, masks, Ext};
use crate::forms::field::fd_jacobian;
use crate::forms::{FormField, MatrixField, ModelChart, PointMap, QuadratureSpec, ValueKind};
use crate::liealg::{mat_exp, CMat, GroupId, InvariantPolynomial, StructureConstants, C64};

/// Finite-dimensional groups acting on model charts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActingGroup {
    Circle,
    Torus(usize),
    SU2,
}

impl ActingGroup {
    pub fn dim(&self) -> usize {
        match self {
            ActingGroup::Circle => 1,
            ActingGroup::Torus(k) => *k,
            ActingGroup::SU2 => 3,
        }
    }

    /// `c` with `[e_a, e_b] = Σ_c c[a][b][c] e_c`.
    pub fn structure(&self) -> Vec<Vec<Vec<f64>>> {
        let n = self.dim();
        let mut c = vec![vec![vec![0.0; n]; n]; n];
        if let ActingGroup::SU2 = self {
            let s = StructureConstants::for_group(GroupId::SU(2));
            for (a, ca) in c.iter_mut().enumerate() {
                for (b, cab) in ca.iter_mut().enumerate() {
                    for (g, v) in cab.iter_mut().enumerate() {
                        *v = s.get(a, b, g);
                    }
                }
            }
        }
        c
    }

    /// Matrix of `ad_{e_a}` on generator coordinates.
    pub fn ad_matrix(&self, a: usize) -> DMatrix<f64> {
        let c = self.structure();
        let n = self.dim();
        DMatrix::from_fn(n, n, |g, b| c[a][b][g])
    }
}

/// A group action through its fundamental vector fields, one per generator,
/// with `[X_N, Y_N] = -[X, Y]_N`.
#[derive(Clone)]
pub struct SymmetryAction {
    chart: ModelChart,
    group: ActingGroup,
    fields: Vec<PointMap>,
}

impl fmt::Debug for SymmetryAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SymmetryAction({:?} on {})", self.group, self.chart)
    }
}

impl SymmetryAction {
    pub fn new(chart: ModelChart, group: ActingGroup, fields: Vec<PointMap>) -> Result<Self> {
        if fields.len() != group.dim() {
            return Err(Error::ArityMismatch { expected: group.dim(), got: fields.len() });
        }
        Ok(Self { chart, group, fields })
    }

    /// `U(1)` rotating the plane about the origin.
    pub fn disk_rotation() -> Self {
        Self::new(ModelChart::Euclidean(2), ActingGroup::Circle, vec![Arc::new(|x: &[f64]| vec![-x[1], x[0]])])
            .expect("one generator")
    }

    /// `U(1)` translating `Torus(n)` along one axis.
    pub fn torus_translation(n: usize, axis: usize) -> Result<Self> {
        let chart = ModelChart::torus(n)?;
        if axis >= n {
            return Err(Error::InvalidArgument(format!("axis {axis} on a {n}-torus")));
        }
        Self::new(
            chart,
            ActingGroup::Circle,
            vec![Arc::new(move |_: &[f64]| {
                let mut v = vec![0.0; n];
                v[axis] = 1.0;
                v
            })],
        )
    }

    /// `SU(2)` acting on `R³ ≅ su(2)` by the adjoint action.
    pub fn su2_rotation() -> Self {
        let g = ActingGroup::SU2;
        let fields: Vec<PointMap> = (0..3)
            .map(|a| {
                let m = g.ad_matrix(a);
                Arc::new(move |x: &[f64]| (0..3).map(|i| (0..3).map(|j| m[(i, j)] * x[j]).sum()).collect()) as PointMap
            })
            .collect();
        Self::new(ModelChart::Euclidean(3), g, fields).expect("three generators")
    }

    pub fn chart(&self) -> &ModelChart {
        &self.chart
    }

    pub fn group(&self) -> ActingGroup {
        self.group
    }

    pub fn generator_field(&self, a: usize) -> PointMap {
        self.fields[a].clone()
    }

    /// `X_N` for `X = Σ c_a e_a`.
    pub fn vector_field(&self, c: &[f64]) -> PointMap {
        let fields = self.fields.clone();
        let c = c.to_vec();
        let n = self.chart.dim();
        Arc::new(move |x: &[f64]| {
            let mut v = vec![0.0; n];
            for (f, ca) in fields.iter().zip(&c) {
                if *ca != 0.0 {
                    for (vi, fi) in v.iter_mut().zip(f(x)) {
                        *vi += ca * fi;
                    }
                }
            }
            v
        })
    }

    /// Time-`t` flow of generator `a`, RK4 with `steps` steps.
    pub fn flow(&self, a: usize, x: &[f64], t: f64, steps: usize) -> Vec<f64> {
        let f = &self.fields[a];
        let h = t / steps as f64;
        let axpy = |x: &[f64], k: &[f64], s: f64| -> Vec<f64> { x.iter().zip(k).map(|(u, v)| u + s * v).collect() };
        let mut y = x.to_vec();
        for _ in 0..steps {
            let k1 = f(&y);
            let k2 = f(&axpy(&y, &k1, h / 2.0));
            let k3 = f(&axpy(&y, &k2, h / 2.0));
            let k4 = f(&axpy(&y, &k3, h));
            for i in 0..y.len() {
                y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
        }
        y
    }

    /// `sup |[X_a, X_b] + [e_a, e_b]_N|` over the points.
    pub fn bracket_defect(&self, points: &[Vec<f64>], h: f64) -> f64 {
        let n = self.chart.dim();
        let c = self.group.structure();
        let k = self.group.dim();
        let mut worst: f64 = 0.0;
        for x in points {
            for a in 0..k {
                for b in (a + 1)..k {
                    let va = &self.fields[a];
                    let vb = &self.fields[b];
                    let ja = fd_jacobian(&**va, x, n, n, h);
                    let jb = fd_jacobian(&**vb, x, n, n, h);
                    let (ua, ub) = (va(x), vb(x));
                    let target = self.vector_field(&c[a][b])(x);
                    for i in 0..n {
                        let mut br = 0.0;
                        for j in 0..n {
                            br += ua[j] * jb[(i, j)] - ub[j] * ja[(i, j)];
                        }
                        worst = worst.max((br + target[i]).abs());
                    }
                }
            }
        }
        worst
    }
}

/// `m ⊗ ω` with `m` a monomial in generator coordinates (sorted indices,
/// repetition allowed).
#[derive(Debug, Clone)]
pub struct EquivariantTerm {
    pub monomial: Vec<usize>,
    pub form: FormField,
}

impl EquivariantTerm {
    pub fn new(mut monomial: Vec<usize>, form: FormField) -> Self {
        monomial.sort_unstable();
        Self { monomial, form }
    }

    fn coefficient(&self, x: &[f64]) -> f64 {
        self.monomial.iter().map(|&a| x[a]).product()
    }
}

/// Element of `⊕_{2k+r=q} (S^k(Lie G*) ⊗ Ω^r(N))`.
#[derive(Debug, Clone)]
pub struct EquivariantForm {
    action: SymmetryAction,
    degree: usize,
    terms: Vec<EquivariantTerm>,
}

impl EquivariantForm {
    pub fn new(action: SymmetryAction, degree: usize, terms: Vec<EquivariantTerm>) -> Result<Self> {
        for t in &terms {
            if t.form.chart() != action.chart() {
                return Err(Error::ChartMismatch);
            }
            if t.form.kind() != ValueKind::Scalar {
                return Err(Error::KindMismatch("equivariant forms are scalar valued".into()));
            }
            if let Some(&a) = t.monomial.iter().max() {
                if a >= action.group().dim() {
                    return Err(Error::InvalidArgument(format!("generator index {a}")));
                }
            }
            if 2 * t.monomial.len() + t.form.degree() != degree {
                return Err(Error::DegreeMismatch { form: 2 * t.monomial.len() + t.form.degree(), cell: degree });
            }
        }
        Ok(Self { action, degree, terms })
    }

    pub fn action(&self) -> &SymmetryAction {
        &self.action
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn terms(&self) -> &[EquivariantTerm] {
        &self.terms
    }

    pub fn polynomial_degree(&self) -> usize {
        self.terms.iter().map(|t| t.monomial.len()).max().unwrap_or(0)
    }

    /// The form-degree-`k` part of `α(X)`.
    pub fn evaluate(&self, x: &[f64], k: usize) -> FormField {
        let chart = self.action.chart().clone();
        let parts: Vec<(f64, FormField)> = self
            .terms
            .iter()
            .filter(|t| t.form.degree() == k)
            .map(|t| (t.coefficient(x), t.form.clone()))
            .filter(|(c, _)| *c != 0.0)
            .collect();
        if parts.is_empty() {
            return FormField::zero(chart, k, ValueKind::Scalar);
        }
        FormField::new(chart, k, ValueKind::Scalar, move |p| {
            let mut out = parts[0].1.eval(p);
            for m in out.iter_mut() {
                *m *= C64::new(parts[0].0, 0.0);
            }
            for (c, f) in &parts[1..] {
                for (o, v) in out.iter_mut().zip(f.eval(p)) {
                    *o += v * C64::new(*c, 0.0);
                }
            }
            out
        })
        .expect("consistent shapes")
    }

    /// Largest coefficient of `α(X)` over all form degrees and points.
    pub fn sup_norm(&self, x: &[f64], points: &[Vec<f64>]) -> f64 {
        let n = self.action.chart().dim();
        (0..=n.min(self.degree))
            .filter(|k| (self.degree - k) % 2 == 0)
            .map(|k| self.evaluate(x, k).sup_norm(points))
            .fold(0.0, f64::max)
    }

    /// `sup |φ_t^* α(Ad_{exp(t e_a)} X) − α(X)|` over generators, sample
    /// points and the given `X`, with flows integrated in `flow_steps` steps.
    pub fn invariance_defect(&self, xs: &[Vec<f64>], points: &[Vec<f64>], t: f64, flow_steps: usize) -> f64 {
        let chart = self.action.chart().clone();
        let n = chart.dim();
        let g = self.action.group();
        let mut worst: f64 = 0.0;
        for a in 0..g.dim() {
            let ad = g.ad_matrix(a).map(|v| C64::new(v * t, 0.0));
            let rot = mat_exp(&ad).map(|v| v.re);
            let action = self.action.clone();
            let flow: PointMap = Arc::new(move |p: &[f64]| action.flow(a, p, t, flow_steps));
            for x in xs {
                let xv = nalgebra::DVector::from_column_slice(x);
                let moved: Vec<f64> = (&rot * xv).iter().copied().collect();
                for k in 0..=n.min(self.degree) {
                    if (self.degree - k) % 2 != 0 {
                        continue;
                    }
                    let lhs = match self.evaluate(&moved, k).pullback(chart.clone(), flow.clone(), 1e-5) {
                        Ok(f) => f,
                        Err(_) => continue,
                    };
                    let rhs = self.evaluate(x, k);
                    if let Ok(d) = lhs.sub(&rhs) {
                        worst = worst.max(d.sup_norm(points));
                    }
                }
            }
        }
        worst
    }
}

/// `(d_c α)(X) = d(α(X)) − i_{X_N} α(X)`.
pub fn cartan_differential(alpha: &EquivariantForm, q: &QuadratureSpec) -> Result<EquivariantForm> {
    let n = alpha.action.chart().dim();
    let mut terms = Vec::new();
    for t in &alpha.terms {
        if t.form.degree() < n {
            terms.push(EquivariantTerm::new(t.monomial.clone(), t.form.exterior_derivative(q)?));
        }
        if t.form.degree() >= 1 {
            for a in 0..alpha.action.group().dim() {
                let mut m = t.monomial.clone();
                m.push(a);
                terms.push(EquivariantTerm::new(m, t.form.interior(alpha.action.generator_field(a))?.neg()));
            }
        }
    }
    EquivariantForm::new(alpha.action.clone(), alpha.degree + 1, terms)
}

/// Built-in principal `U(1)`-bundles with a fixed invariant connection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ToyBundle {
    /// `S³ → S²` in coordinates `(η, ξ1, ξ2)`.
    Hopf,
    /// `T³ → T²`, fibre the third circle.
    TorusBundle,
}

const TORUS_BUNDLE_TWIST: f64 = 0.2;

impl ToyBundle {
    pub fn all() -> [ToyBundle; 2] {
        [ToyBundle::Hopf, ToyBundle::TorusBundle]
    }

    pub fn name(&self) -> &'static str {
        match self {
            ToyBundle::Hopf => "hopf",
            ToyBundle::TorusBundle => "torus3_over_torus2",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Self::all()
            .into_iter()
            .find(|b| b.name() == name)
            .ok_or_else(|| Error::UnsupportedBundle(name.to_string()))
    }

    pub fn total_chart(&self) -> ModelChart {
        match self {
            ToyBundle::Hopf => ModelChart::Hopf,
            ToyBundle::TorusBundle => ModelChart::Torus(3),
        }
    }

    pub fn base_chart(&self) -> ModelChart {
        match self {
            ToyBundle::Hopf => ModelChart::Sphere2,
            ToyBundle::TorusBundle => ModelChart::Torus(2),
        }
    }

    /// The circle action, normalized to period one.
    pub fn action(&self) -> SymmetryAction {
        let v: PointMap = match self {
            ToyBundle::Hopf => Arc::new(|_: &[f64]| vec![0.0, 2.0 * PI, 2.0 * PI]),
            ToyBundle::TorusBundle => Arc::new(|_: &[f64]| vec![0.0, 0.0, 1.0]),
        };
        SymmetryAction::new(self.total_chart(), ActingGroup::Circle, vec![v]).expect("one generator")
    }

    /// Real connection 1-form `A` with `A(V) = 1`.
    pub fn connection_form(&self) -> FormField {
        match self {
            ToyBundle::Hopf => FormField::scalar(self.total_chart(), 1, |x| {
                let (s, c) = x[0].sin_cos();
                vec![0.0, c * c / (2.0 * PI), s * s / (2.0 * PI)]
            }),
            ToyBundle::TorusBundle => FormField::scalar(self.total_chart(), 1, |x| {
                vec![TORUS_BUNDLE_TWIST * (2.0 * PI * x[1]).sin(), 0.0, 1.0]
            }),
        }
        .expect("three components")
    }

    /// `F = dA`.
    pub fn curvature_form(&self) -> FormField {
        match self {
            ToyBundle::Hopf => FormField::scalar(self.total_chart(), 2, |x| {
                let s2 = (2.0 * x[0]).sin() / (2.0 * PI);
                vec![-s2, s2, 0.0]
            }),
            ToyBundle::TorusBundle => FormField::scalar(self.total_chart(), 2, |x| {
                vec![-2.0 * PI * TORUS_BUNDLE_TWIST * (2.0 * PI * x[1]).cos(), 0.0, 0.0]
            }),
        }
        .expect("three components")
    }

    /// The `U(1)` connection `-2πi A`.
    pub fn connection(&self) -> Connection {
        let a = self.connection_form();
        Connection::new(GroupId::U1, a.map_pointwise(ValueKind::Algebra(GroupId::U1), |_, v| {
            v.into_iter().map(|m| m * C64::new(0.0, -2.0 * PI)).collect()
        }))
        .expect("u(1)-valued 1-form")
    }

    /// A section `base → total` with its Jacobian.
    pub fn section(&self) -> (PointMap, MatrixField) {
        match self {
            ToyBundle::Hopf => (
                Arc::new(|y: &[f64]| vec![y[0], 0.0, y[1]]),
                Arc::new(|_: &[f64]| DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 0.0, 0.0, 1.0])),
            ),
            ToyBundle::TorusBundle => (
                Arc::new(|y: &[f64]| vec![y[0], y[1], 0.0]),
                Arc::new(|_: &[f64]| DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0])),
            ),
        }
    }

    /// `ω ↦ ω(hor v_1, ..., hor v_k)` with `hor = I − V Aᵀ`.
    pub fn horizontal(&self, omega: &FormField) -> Result<FormField> {
        let a = self.connection_form();
        let v = self.action().generator_field(0);
        let n = self.total_chart().dim();
        let p: MatrixField = Arc::new(move |x: &[f64]| {
            let av = a.eval_scalar(x);
            let vv = v(x);
            DMatrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 } - vv[i] * av[j].re)
        });
        omega.compose_linear(p)
    }

    /// Pull-back of a total-space form along the built-in section.
    pub fn to_base(&self, omega: &FormField) -> Result<FormField> {
        let (s, j) = self.section();
        omega.pullback_with_jacobian(self.base_chart(), s, j)
    }
}

/// `C_A(Σ p ⊗ ω) = Σ p(F_A) ∧ ω_hor`, pulled back to the base.
pub fn chern_weil_map(alpha: &EquivariantForm, bundle: ToyBundle) -> Result<FormField> {
    let action = alpha.action();
    if action.chart() != &bundle.total_chart() || action.group() != ActingGroup::Circle {
        return Err(Error::UnsupportedBundle(format!("{action:?} is not the action of {}", bundle.name())));
    }
    let f = bundle.curvature_form();
    let total = bundle.total_chart();
    let mut acc = FormField::zero(total.clone(), alpha.degree(), ValueKind::Scalar);
    for t in alpha.terms() {
        let mut w = bundle.horizontal(&t.form)?;
        for _ in 0..t.monomial.len() {
            w = f.wedge(&w, crate::forms::BracketMode::Plain)?;
        }
        acc = acc.add(&w)?;
    }
    bundle.to_base(&acc)
}

/// Form-degree parts `[p(F)^{(0)}, ..., ]` of `p(F − v_A(X), …, F − v_A(X))`,
/// index `k` holding the part of form degree `2(r − k)`.
#[derive(Debug, Clone)]
pub struct EquivariantCharForm {
    pub parts: Vec<FormField>,
}

fn check_invariant(a: &Connection, action: &SymmetryAction) -> Result<()> {
    let chart = a.chart().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(0x1a7);
    let points: Vec<Vec<f64>> = (0..20).map(|_| chart.sample_point(&mut rng)).collect();
    let mut defect: f64 = 0.0;
    for g in 0..action.group().dim() {
        let act = action.clone();
        let flow: PointMap = Arc::new(move |p: &[f64]| act.flow(g, p, 0.1, 20));
        let moved = a.form().pullback(chart.clone(), flow, 1e-5)?;
        defect = defect.max(moved.sub(a.form())?.sup_norm(&points));
    }
    if defect > 1e-6 {
        return Err(Error::NotInvariant { defect });
    }
    Ok(())
}

fn char_setup(
    a: &Connection,
    action: &SymmetryAction,
    x: &[f64],
    q: &QuadratureSpec,
) -> Result<(FormField, FormField)> {
    if a.chart() != action.chart() {
        return Err(Error::ChartMismatch);
    }
    if x.len() != action.group().dim() {
        return Err(Error::ArityMismatch { expected: action.group().dim(), got: x.len() });
    }
    check_invariant(a, action)?;
    let f = crate::connection::curvature(a, q);
    let v = a.form().interior(action.vector_field(x))?;
    Ok((f, v))
}

/// Binomial expansion `Σ_k C(r,k) (−1)^k p(v, …, v, F, …, F)`.
pub fn equivariant_char_form(
    p: &InvariantPolynomial,
    a: &Connection,
    action: &SymmetryAction,
    x: &[f64],
    q: &QuadratureSpec,
) -> Result<EquivariantCharForm> {
    let (f, v) = char_setup(a, action, x, q)?;
    let r = p.degree();
    let n = a.chart().dim();
    let p = *p;
    let parts = (0..=r)
        .map(|k| {
            let (f, v) = (f.clone(), v.clone());
            let coeff = binomial(r, k) as f64 * if k % 2 == 0 { 1.0 } else { -1.0 };
            FormField::new(a.chart().clone(), 2 * (r - k), ValueKind::Scalar, move |pt| {
                let fe = f.ext(pt);
                let ve = v.ext(pt);
                let mut args = vec![ve; k];
                args.extend(std::iter::repeat_n(fe, r - k));
                let odd = vec![false; r];
                poly_ext(&p, &args, &odd).scale(C64::new(coeff, 0.0)).homogeneous(n, 2 * (r - k), 1, 1)
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EquivariantCharForm { parts })
}

/// `p(G, …, G)` with `G = F − v_A(X)` evaluated as one mixed-degree element.
pub fn equivariant_char_form_direct(
    p: &InvariantPolynomial,
    a: &Connection,
    action: &SymmetryAction,
    x: &[f64],
    q: &QuadratureSpec,
) -> Result<EquivariantCharForm> {
    let (f, v) = char_setup(a, action, x, q)?;
    let r = p.degree();
    let n = a.chart().dim();
    let p = *p;
    let parts = (0..=r)
        .map(|k| {
            let (f, v) = (f.clone(), v.clone());
            FormField::new(a.chart().clone(), 2 * (r - k), ValueKind::Scalar, move |pt| {
                let g = f.ext(pt).add(&v.ext(pt).scale(C64::new(-1.0, 0.0)));
                poly_power(&p, &g).homogeneous(n, 2 * (r - k), 1, 1)
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EquivariantCharForm { parts })
}

/// Base-component evaluator `(x, s) -> [A_s(x)_j]`.
pub type FamilyMap = Arc<dyn Fn(&[f64], &[f64]) -> Vec<CMat> + Send + Sync>;
/// `(x, s, i) -> ∂_i [A_s(x)_j]`, `i` running over the product axes.
pub type FamilyPartial = Arc<dyn Fn(&[f64], &[f64], usize) -> Vec<CMat> + Send + Sync>;

/// A finite-dimensional family `s ↦ A_s` of connections on `base`, held as a
/// 1-form on `base × params` whose parameter components vanish unless a
/// vertical part has been added.
#[derive(Debug, Clone)]
pub struct ConnectionFamily {
    base: ModelChart,
    params: ModelChart,
    group: GroupId,
    canonical: FormField,
    form: FormField,
}

impl ConnectionFamily {
    pub fn new(base: ModelChart, params: ModelChart, group: GroupId, f: FamilyMap) -> Result<Self> {
        Self::build(base, params, group, f, None)
    }

    pub fn with_partials(base: ModelChart, params: ModelChart, group: GroupId, f: FamilyMap, d: FamilyPartial) -> Result<Self> {
        Self::build(base, params, group, f, Some(d))
    }

    fn build(base: ModelChart, params: ModelChart, group: GroupId, f: FamilyMap, d: Option<FamilyPartial>) -> Result<Self> {
        if params.dim() > 3 {
            return Err(Error::DimensionMismatch(format!("{}-dimensional parameter chart", params.dim())));
        }
        let nb = base.dim();
        let np = params.dim();
        let s = group.matrix_size();
        let chart = ModelChart::product(base.clone(), params.clone());
        let f2 = f.clone();
        let mut form = FormField::new(chart, 1, ValueKind::Algebra(group), move |x| {
            let mut v = f2(&x[..nb], &x[nb..]);
            v.resize(nb + np, CMat::zeros(s, s));
            v
        })?;
        if let Some(d) = d {
            form = form.with_partials(Arc::new(move |x, i| {
                let mut v = d(&x[..nb], &x[nb..], i);
                v.resize(nb + np, CMat::zeros(s, s));
                v
            }));
        }
        Ok(Self { base, params, group, canonical: form.clone(), form })
    }

    /// `A_s = Σ_i s_i dx^i · H` on `Torus(n)` with parameters in `Euclidean(n)`.
    pub fn commuting(n: usize, group: GroupId, h: &CMat) -> Result<Self> {
        let base = ModelChart::torus(n)?;
        let s = h.nrows();
        let (h1, h2) = (h.clone(), h.clone());
        Self::with_partials(
            base,
            ModelChart::Euclidean(n),
            group,
            Arc::new(move |_, p| p.iter().map(|c| &h1 * C64::new(*c, 0.0)).collect()),
            Arc::new(move |_, _, i| {
                (0..n).map(|j| if i == n + j { h2.clone() } else { CMat::zeros(s, s) }).collect()
            }),
        )
    }

    /// A flat SU(2) family on `T³` with non-constant, non-abelian base
    /// components: `A_s = (Σ s_j dx^j)·g⁻¹Hg + g⁻¹dg`, `H = diag(i, −i)`,
    /// `g = exp(φ₁ iσ₁) exp(φ₂ iσ₂)`. Partials are analytic.
    pub fn gauged_torus3() -> Result<Self> {
        let [s1, s2, s3] = crate::chernweil::pauli();
        let (k1, k2, h) = (s1 * C64::i(), s2 * C64::i(), s3 * C64::i());
        let phi1 = TrigSum(vec![(0.4, [1.0, 0.0, 0.0], 0.0), (0.3, [0.0, 0.0, 1.0], PI / 2.0)]);
        let phi2 = TrigSum(vec![(0.5, [0.0, 1.0, 0.0], 0.0), (0.2, [1.0, 0.0, 1.0], 0.0)]);
        let frame = Arc::new(move |x: &[f64]| {
            let (v1, g1, h1) = phi1.eval(x);
            let (v2, g2, h2) = phi2.eval(x);
            let rot = |v: f64, k: &CMat| CMat::identity(2, 2) * C64::new(v.cos(), 0.0) + k * C64::new(v.sin(), 0.0);
            let b = rot(v2, &k2);
            let g = rot(v1, &k1) * &b;
            let m1 = b.adjoint() * &k1 * &b;
            let conj = g.adjoint() * &h * &g;
            let theta: Vec<CMat> = (0..3).map(|j| &m1 * C64::new(g1[j], 0.0) + &k2 * C64::new(g2[j], 0.0)).collect();
            let br = &m1 * &k2 - &k2 * &m1;
            // ∂ᵢθⱼ = ∂ᵢⱼφ₁ M₁ + ∂ⱼφ₁ ∂ᵢφ₂ [M₁, K₂] + ∂ᵢⱼφ₂ K₂
            let dtheta: Vec<Vec<CMat>> = (0..3)
                .map(|i| {
                    (0..3)
                        .map(|j| {
                            &m1 * C64::new(h1[i][j], 0.0)
                                + &br * C64::new(g1[j] * g2[i], 0.0)
                                + &k2 * C64::new(h2[i][j], 0.0)
                        })
                        .collect()
                })
                .collect();
            (conj, theta, dtheta)
        });
        let frame1 = frame.clone();
        let f = move |x: &[f64], s: &[f64]| -> Vec<CMat> {
            let (conj, theta, _) = frame1(x);
            theta.into_iter().enumerate().map(|(j, t)| &conj * C64::new(s[j], 0.0) + t).collect()
        };
        let d = move |x: &[f64], s: &[f64], axis: usize| -> Vec<CMat> {
            let (conj, theta, dtheta) = frame(x);
            if axis >= 3 {
                return (0..3).map(|j| if j == axis - 3 { conj.clone() } else { CMat::zeros(2, 2) }).collect();
            }
            // ∂ᵢ(g⁻¹Hg) = [g⁻¹Hg, θᵢ]
            let dconj = &conj * &theta[axis] - &theta[axis] * &conj;
            (0..3).map(|j| &dconj * C64::new(s[j], 0.0) + &dtheta[axis][j]).collect()
        };
        Self::with_partials(ModelChart::Torus(3), ModelChart::Euclidean(3), GroupId::SU(2), Arc::new(f), Arc::new(d))
    }

    /// Same base components, parameter components `η(x, s)`.
    pub fn with_vertical(&self, eta: FamilyMap) -> Result<Self> {
        let nb = self.base.dim();
        let canon = self.canonical.clone();
        let form = FormField::new(self.chart(), 1, ValueKind::Algebra(self.group), move |x| {
            let mut v = canon.eval(x);
            for (a, e) in eta(&x[..nb], &x[nb..]).into_iter().enumerate() {
                v[nb + a] = e;
            }
            v
        })?;
        Ok(Self { form, ..self.clone() })
    }

    pub fn base(&self) -> &ModelChart {
        &self.base
    }

    pub fn params(&self) -> &ModelChart {
        &self.params
    }

    pub fn chart(&self) -> ModelChart {
        ModelChart::product(self.base.clone(), self.params.clone())
    }

    pub fn group(&self) -> GroupId {
        self.group
    }

    /// The family as a 1-form on `base × params`.
    pub fn form(&self) -> &FormField {
        &self.form
    }

    pub fn total_connection(&self) -> Connection {
        Connection::new(self.group, self.form.clone()).expect("algebra-valued 1-form")
    }

    pub fn connection_at(&self, s: &[f64]) -> Result<Connection> {
        let np = self.params.dim();
        if s.len() != np {
            return Err(Error::DimensionMismatch(format!("{} parameters, expected {np}", s.len())));
        }
        let nb = self.base.dim();
        let canon = self.canonical.clone();
        let sv = s.to_vec();
        let join = move |x: &[f64]| {
            let mut p = x.to_vec();
            p.extend_from_slice(&sv);
            p
        };
        let j1 = join.clone();
        let mut form = FormField::new(self.base.clone(), 1, ValueKind::Algebra(self.group), move |x| {
            canon.eval(&j1(x))[..nb].to_vec()
        })?;
        if self.canonical.has_analytic_partials() {
            let canon = self.canonical.clone();
            form = form.with_partials(Arc::new(move |x, i| canon.partial(&join(x), i, 0.0)[..nb].to_vec()));
        }
        Connection::new(self.group, form)
    }
}

/// Components of a form on `base × params` sorted by bidegree `(i, j)`:
/// `i` base indices, `j` parameter indices.
#[derive(Debug, Clone)]
pub struct BigradedForm {
    split: usize,
    form: FormField,
}

impl BigradedForm {
    pub fn new(form: FormField, split: usize) -> Self {
        Self { split, form }
    }

    pub fn degree(&self) -> usize {
        self.form.degree()
    }

    pub fn total(&self) -> &FormField {
        &self.form
    }

    /// Bidegrees that have at least one component.
    pub fn bidegrees(&self) -> Vec<(usize, usize)> {
        let k = self.degree();
        let np = self.form.dim() - self.split;
        (0..=k.min(np)).filter(|j| k - j <= self.split).map(|j| (k - j, j)).collect()
    }

    /// The `(i, j)` part as a form of degree `i + j`.
    pub fn part(&self, i: usize, j: usize) -> Result<FormField> {
        if i + j != self.degree() {
            return Err(Error::DegreeMismatch { form: i + j, cell: self.degree() });
        }
        Ok(self.form.bigraded_part(self.split, j))
    }

    pub fn sup(&self, i: usize, j: usize, points: &[Vec<f64>]) -> Result<f64> {
        Ok(self.part(i, j)?.sup_norm(points))
    }
}

/// Curvature components `[(i,j) index pairs in canonical order]` of the
/// canonical family form at a product-chart point. The `(0,2)` entries are
/// never written.
fn family_curvature_at(canon: &FormField, nb: usize, x: &[f64], h: f64) -> Vec<CMat> {
    let n = canon.dim();
    let vals = canon.eval(x);
    let parts: Vec<Vec<CMat>> = (0..n).map(|i| canon.partial(x, i, h)).collect();
    let s = vals[0].nrows();
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            out.push(if j < nb {
                &parts[i][j] - &parts[j][i] + &vals[i] * &vals[j] - &vals[j] * &vals[i]
            } else if i < nb {
                -&parts[j][i]
            } else {
                CMat::zeros(s, s)
            });
        }
    }
    out
}

/// `𝔽 = F^{2,0} + F^{1,1}` of the canonical family connection.
pub fn family_curvature_bigrading(fam: &ConnectionFamily, q: &QuadratureSpec) -> BigradedForm {
    let canon = fam.canonical.clone();
    let nb = fam.base.dim();
    let h = q.fd_step();
    let f = FormField::new(fam.chart(), 2, ValueKind::Algebra(fam.group), move |x| family_curvature_at(&canon, nb, x, h))
        .expect("2-form shape");
    BigradedForm::new(f, nb)
}

/// `p(𝔽, …, 𝔽)` on the family space.
pub fn family_char_form(p: &InvariantPolynomial, fam: &ConnectionFamily, q: &QuadratureSpec) -> BigradedForm {
    let canon = fam.canonical.clone();
    let nb = fam.base.dim();
    let n = canon.dim();
    let h = q.fd_step();
    let r = p.degree();
    let p = *p;
    let f = FormField::new(fam.chart(), 2 * r, ValueKind::Scalar, move |x| {
        let fx = family_curvature_at(&canon, nb, x, h);
        poly_power(&p, &Ext::from_homogeneous(n, 2, fx)).homogeneous(n, 2 * r, 1, 1)
    })
    .expect("scalar form");
    BigradedForm::new(f, nb)
}

/// Sample points of the family space used by the family checks.
pub fn family_samples(fam: &ConnectionFamily, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let chart = fam.chart();
    (0..count).map(|_| chart.sample_point(&mut rng)).collect()
}

pub const FAMILY_FLATNESS_TOLERANCE: f64 = 1e-8;

/// `sup ‖F_{A_s}‖` over family-space points.
pub fn family_flatness(fam: &ConnectionFamily, points: &[Vec<f64>], q: &QuadratureSpec) -> f64 {
    family_curvature_bigrading(fam, q).part(2, 0).map(|f| f.sup_norm(points)).unwrap_or(0.0)
}

fn require_flat(fam: &ConnectionFamily, points: &[Vec<f64>], q: &QuadratureSpec) -> Result<()> {
    let sup = family_flatness(fam, points, q);
    if sup >= FAMILY_FLATNESS_TOLERANCE {
        return Err(Error::NotFlat { sup });
    }
    Ok(())
}

/// Per-bidegree sup magnitudes of `p(𝔽)`.
#[derive(Debug, Clone, PartialEq)]
pub struct VanishingReport {
    /// `(i, j, sup)` for every bidegree; entries with `j < r` are the checked ones.
    pub entries: Vec<(usize, usize, f64)>,
    pub degree: usize,
}

impl VanishingReport {
    /// Largest magnitude among bidegrees `(2r − j, j)` with `j < r`.
    pub fn max_below_middle(&self) -> f64 {
        self.entries.iter().filter(|e| e.1 < self.degree).map(|e| e.2).fold(0.0, f64::max)
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.entries.iter().find(|e| e.0 == i && e.1 == j).map(|e| e.2)
    }
}

/// `Σ a sin(2π k·x + b)` with gradient and Hessian.
struct TrigSum(Vec<(f64, [f64; 3], f64)>);

impl TrigSum {
    fn eval(&self, x: &[f64]) -> (f64, [f64; 3], [[f64; 3]; 3]) {
        let (mut v, mut g, mut h) = (0.0, [0.0; 3], [[0.0; 3]; 3]);
        for (a, k, b) in &self.0 {
            let arg = 2.0 * PI * (k[0] * x[0] + k[1] * x[1] + k[2] * x[2]) + b;
            let (sn, cs) = arg.sin_cos();
            v += a * sn;
            for i in 0..3 {
                g[i] += a * cs * 2.0 * PI * k[i];
                for j in 0..3 {
                    h[i][j] -= a * sn * 4.0 * PI * PI * k[i] * k[j];
                }
            }
        }
        (v, g, h)
    }
}

/// Components of `p(𝔽)` by bidegree on a flat family; every `(2r − j, j)`
/// with `j ≤ r` is reported, including those absent for dimension reasons.
pub fn flat_vanishing_check(
    p: &InvariantPolynomial,
    fam: &ConnectionFamily,
    points: &[Vec<f64>],
    q: &QuadratureSpec,
) -> Result<VanishingReport> {
    require_flat(fam, points, q)?;
    let r = p.degree();
    let form = family_char_form(p, fam, q);
    let nb = fam.base.dim();
    let np = fam.params.dim();
    let entries = (0..=r)
        .map(|j| {
            let i = 2 * r - j;
            let sup = if i <= nb && j <= np { form.sup(i, j, points)? } else { 0.0 };
            Ok((i, j, sup))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(VanishingReport { entries, degree: r })
}

/// Sup magnitudes of `Tp(𝔄′, 𝔄)^{2r−1−k, k}`, `k < r`, for the family with
/// two vertical parts.
pub fn connection_independence_check(
    p: &InvariantPolynomial,
    fam: &ConnectionFamily,
    eta: FamilyMap,
    eta_prime: FamilyMap,
    points: &[Vec<f64>],
    q: &QuadratureSpec,
) -> Result<Vec<(usize, usize, f64)>> {
    require_flat(fam, points, q)?;
    let a = fam.with_vertical(eta)?;
    let a_prime = fam.with_vertical(eta_prime)?;
    let tp = transgression_form(p, a_prime.form(), a.form(), DEFAULT_T_NODES, q)?;
    let r = p.degree();
    let nb = fam.base.dim();
    let np = fam.params.dim();
    let bf = BigradedForm::new(tp, nb);
    (0..r)
        .map(|k| {
            let i = 2 * r - 1 - k;
            let sup = if i <= nb && k <= np { bf.sup(i, k, points)? } else { 0.0 };
            Ok((i, k, sup))
        })
        .collect()
}

/// Components of an ordered multi-index on `n` axes with `j` in `split..`.
pub fn bidegree_of(mask: u32, split: usize) -> (usize, usize) {
    let idx = from_mask(mask);
    let j = idx.iter().filter(|&&i| i >= split).count();
    (idx.len() - j, j)
}

/// Number of components of each bidegree of a `k`-form on `nb + np` axes.
pub fn bidegree_counts(nb: usize, np: usize, k: usize) -> Vec<((usize, usize), usize)> {
    let mut out: Vec<((usize, usize), usize)> = Vec::new();
    for m in masks(nb + np, k) {
        let b = bidegree_of(m, nb);
        match out.iter_mut().find(|e| e.0 == b) {
            Some(e) => e.1 += 1,
            None => out.push((b, 1)),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::{builtin_chain, integrate};
    use crate::liealg::frob;

    fn h_diag() -> CMat {
        CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![C64::new(0.0, 1.0), C64::new(0.0, -1.0)]))
    }

    fn pts(chart: &ModelChart, n: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| chart.sample_point(&mut rng)).collect()
    }

    #[test]
    fn fundamental_fields_satisfy_bracket_relation() {
        let a = SymmetryAction::su2_rotation();
        let p = pts(a.chart(), 20, 1);
        assert!(a.bracket_defect(&p, 1e-5) < 1e-8);
        assert!(SymmetryAction::disk_rotation().bracket_defect(&p, 1e-5) == 0.0);
    }

    #[test]
    fn disk_symplectic_form_is_equivariantly_closed() {
        let act = SymmetryAction::disk_rotation();
        let chart = act.chart().clone();
        let w = FormField::scalar(chart.clone(), 2, |_| vec![1.0]).unwrap();
        let mu = FormField::scalar(chart.clone(), 0, |x| vec![-0.5 * (x[0] * x[0] + x[1] * x[1])]).unwrap();
        let alpha = EquivariantForm::new(
            act,
            2,
            vec![EquivariantTerm::new(vec![], w), EquivariantTerm::new(vec![0], mu)],
        )
        .unwrap();
        let dc = cartan_differential(&alpha, &QuadratureSpec::default()).unwrap();
        assert_eq!(dc.degree(), 3);
        let p = pts(&chart, 200, 2);
        assert!(dc.sup_norm(&[0.7], &p) < 1e-6);
        assert!(alpha.invariance_defect(&[vec![1.3]], &p[..10], 0.3, 20) < 1e-6);
    }

    #[test]
    fn cartan_differential_squares_to_zero_on_invariant_forms() {
        let act = SymmetryAction::torus_translation(2, 0).unwrap();
        let chart = act.chart().clone();
        let f = FormField::scalar(chart.clone(), 1, |x| vec![(2.0 * PI * x[1]).sin(), (2.0 * PI * x[1]).cos() + 0.3]).unwrap();
        let g = FormField::scalar(chart.clone(), 2, |x| vec![x[1].sin() + 0.2]).unwrap();
        let alpha =
            EquivariantForm::new(act, 3, vec![EquivariantTerm::new(vec![0], f), EquivariantTerm::new(vec![], g.clone())])
                .unwrap_err();
        assert!(matches!(alpha, Error::DegreeMismatch { .. }));
        let h = FormField::scalar(chart.clone(), 0, |x| vec![(2.0 * PI * x[1]).cos()]).unwrap();
        let alpha = EquivariantForm::new(
            SymmetryAction::torus_translation(2, 0).unwrap(),
            2,
            vec![EquivariantTerm::new(vec![], g), EquivariantTerm::new(vec![0], h)],
        )
        .unwrap();
        let q = QuadratureSpec::default();
        let dc2 = cartan_differential(&cartan_differential(&alpha, &q).unwrap(), &q).unwrap();
        let p = pts(&chart, 30, 3);
        assert!(dc2.sup_norm(&[0.8], &p) < 1e-5);
    }

    #[test]
    fn hopf_first_chern_form_integrates_to_one() {
        let b = ToyBundle::Hopf;
        let one = FormField::constant_function(b.total_chart(), 1.0);
        let alpha = EquivariantForm::new(b.action(), 2, vec![EquivariantTerm::new(vec![0], one)]).unwrap();
        let c = chern_weil_map(&alpha, b).unwrap();
        let v = integrate(&c, &builtin_chain("sphere2.fundamental").unwrap(), &QuadratureSpec::default()).unwrap();
        assert!((v[(0, 0)].re.abs() - 1.0).abs() < 1e-6, "{}", v[(0, 0)]);
    }

    #[test]
    fn toy_curvature_is_derivative_of_connection() {
        let q = QuadratureSpec::default();
        for b in ToyBundle::all() {
            let d = b.connection_form().exterior_derivative(&q).unwrap();
            let p = pts(&b.total_chart(), 20, 4);
            assert!(d.sub(&b.curvature_form()).unwrap().sup_norm(&p) < 1e-8);
            let a = b.connection_form();
            let v = b.action().generator_field(0);
            for x in &p {
                let av: f64 = a.eval_scalar(x).iter().zip(v(x)).map(|(c, w)| c.re * w).sum();
                assert!((av - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn basic_forms_are_fixed_by_the_chern_weil_map() {
        let b = ToyBundle::TorusBundle;
        let beta = FormField::scalar(b.total_chart(), 2, |x| vec![1.0 + 0.5 * (2.0 * PI * x[0]).sin(), 0.0, 0.0]).unwrap();
        let alpha = EquivariantForm::new(b.action(), 2, vec![EquivariantTerm::new(vec![], beta)]).unwrap();
        let c = chern_weil_map(&alpha, b).unwrap();
        for y in [[0.1, 0.2], [0.6, 0.9]] {
            assert!((c.eval_scalar(&y)[0].re - (1.0 + 0.5 * (2.0 * PI * y[0]).sin())).abs() < 1e-14);
        }
    }

    #[test]
    fn family_bigrading_of_linear_family() {
        let h = h_diag();
        let h1 = h.clone();
        let fam = ConnectionFamily::new(
            ModelChart::Torus(2),
            ModelChart::Euclidean(1),
            GroupId::SU(2),
            Arc::new(move |x, s| vec![CMat::zeros(2, 2), &h1 * C64::new(s[0] * (2.0 * PI * x[0]).sin(), 0.0)]),
        )
        .unwrap();
        let bg = family_curvature_bigrading(&fam, &QuadratureSpec::default());
        let f11 = bg.part(1, 1).unwrap();
        for x in [[0.2, 0.3, 0.4], [0.7, 0.1, -0.5]] {
            // ds∧dy = -dy∧ds
            let c = f11.component(&x, &[1, 2]);
            assert!(frob(&(c + &h * C64::new((2.0 * PI * x[0]).sin(), 0.0))) < 1e-9);
            assert!(frob(&f11.component(&x, &[0, 2])) < 1e-9);
        }
        assert_eq!(bg.bidegrees(), vec![(2, 0), (1, 1)]);
    }

    #[test]
    fn commuting_family_is_flat_and_restricts() {
        let fam = ConnectionFamily::commuting(2, GroupId::SU(2), &h_diag()).unwrap();
        let p = family_samples(&fam, 50, 5);
        assert!(family_flatness(&fam, &p, &QuadratureSpec::default()) < 1e-12);
        let a = fam.connection_at(&[0.3, -0.2]).unwrap();
        assert!(frob(&(&a.form().eval(&[0.5, 0.5])[0] - h_diag() * C64::new(0.3, 0.0))) < 1e-15);
    }

    #[test]
    fn non_flat_family_is_rejected() {
        let h = h_diag();
        let fam = ConnectionFamily::new(
            ModelChart::Torus(2),
            ModelChart::Euclidean(1),
            GroupId::SU(2),
            Arc::new(move |x, s| vec![CMat::zeros(2, 2), &h * C64::new(s[0] * (2.0 * PI * x[0]).sin(), 0.0)]),
        )
        .unwrap();
        let p = family_samples(&fam, 20, 6);
        let r = flat_vanishing_check(&InvariantPolynomial::default_for(2).unwrap(), &fam, &p, &QuadratureSpec::default());
        assert!(matches!(r, Err(Error::NotFlat { .. })));
    }

    #[test]
    fn binomial_and_direct_characteristic_forms_agree() {
        let act = SymmetryAction::torus_translation(2, 0).unwrap();
        let h = h_diag();
        let a = Connection::from_fn(ModelChart::Torus(2), GroupId::SU(2), move |x| {
            vec![&h * C64::new(0.4 * (2.0 * PI * x[1]).sin(), 0.0), &h * C64::new(0.7, 0.0)]
        })
        .unwrap();
        let p = InvariantPolynomial::default_for(2).unwrap();
        let q = QuadratureSpec::default();
        let b = equivariant_char_form(&p, &a, &act, &[1.7], &q).unwrap();
        let d = equivariant_char_form_direct(&p, &a, &act, &[1.7], &q).unwrap();
        let pt = pts(&ModelChart::Torus(2), 10, 7);
        for (u, v) in b.parts.iter().zip(&d.parts) {
            assert!(u.sub(v).unwrap().sup_norm(&pt) < 1e-12);
        }
    }

    #[test]
    fn non_invariant_connection_is_rejected() {
        let act = SymmetryAction::torus_translation(2, 0).unwrap();
        let h = h_diag();
        let a = Connection::from_fn(ModelChart::Torus(2), GroupId::SU(2), move |x| {
            vec![CMat::zeros(2, 2), &h * C64::new((2.0 * PI * x[0]).sin(), 0.0)]
        })
        .unwrap();
        let p = InvariantPolynomial::default_for(1).unwrap();
        let r = equivariant_char_form(&p, &a, &act, &[1.0], &QuadratureSpec::default());
        assert!(matches!(r, Err(Error::NotInvariant { .. })));
    }

    #[test]
    fn bidegree_counts_cover_all_components() {
        let c = bidegree_counts(2, 2, 2);
        assert_eq!(c.iter().map(|e| e.1).sum::<usize>(), 6);
        assert!(c.contains(&((1, 1), 4)));
    }

    #[test]
    fn gauged_torus_family_is_flat_with_exact_partials() {
        let fam = ConnectionFamily::gauged_torus3().unwrap();
        let p = family_samples(&fam, 20, 6);
        assert!(family_flatness(&fam, &p, &QuadratureSpec::default()) < 1e-12);
        let form = fam.form();
        for x in &p {
            for axis in 0..6 {
                let exact = form.partial(x, axis, 1e-5);
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[axis] += 1e-5;
                xm[axis] -= 1e-5;
                let (fp, fm) = (form.eval(&xp), form.eval(&xm));
                for j in 0..6 {
                    let fd = (&fp[j] - &fm[j]) * C64::new(0.5e5, 0.0);
                    assert!(frob(&(fd - &exact[j])) < 1e-7);
                }
            }
        }
    }
}
