//! Connections on trivial principal bundles over model charts.

use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::forms::{Chain, FormField, ModelChart, QuadratureSpec, ValueKind};
use crate::liealg::{algebra_coords, exp_map, frob, AlgebraElement, CMat, GroupElement, GroupId, StructureConstants, C64};

/// Point evaluator of a group-valued map.
pub type GroupMap = Arc<dyn Fn(&[f64]) -> CMat + Send + Sync>;
/// `(x, i) -> ∂_i g(x)`.
pub type GroupMapPartial = Arc<dyn Fn(&[f64], usize) -> CMat + Send + Sync>;
/// `(x, i, j) -> ∂_i ∂_j g(x)`.
pub type GroupMapHessian = Arc<dyn Fn(&[f64], usize, usize) -> CMat + Send + Sync>;

#[derive(Debug, Clone)]
pub struct Connection {
    group: GroupId,
    form: FormField,
}

impl Connection {
    pub fn new(group: GroupId, form: FormField) -> Result<Self> {
        if form.degree() != 1 {
            return Err(Error::DimensionMismatch(format!("connection form of degree {}", form.degree())));
        }
        if form.kind() != ValueKind::Algebra(group) {
            return Err(Error::KindMismatch(format!("{:?} form for group {}", form.kind(), group.name())));
        }
        Ok(Self { group, form })
    }

    /// Builds `A = Σ_j A_j dx^j` from its component matrices.
    pub fn from_fn(
        chart: ModelChart,
        group: GroupId,
        f: impl Fn(&[f64]) -> Vec<CMat> + Send + Sync + 'static,
    ) -> Result<Self> {
        Self::new(group, FormField::new(chart, 1, ValueKind::Algebra(group), f)?)
    }

    pub fn zero(chart: ModelChart, group: GroupId) -> Self {
        Self { group, form: FormField::zero(chart, 1, ValueKind::Algebra(group)) }
    }

    /// `Σ_j c_j dx^j · H` with constant coefficients.
    pub fn constant(chart: ModelChart, group: GroupId, coeffs: &[f64], h: &CMat) -> Result<Self> {
        let n = chart.dim();
        if coeffs.len() != n {
            return Err(Error::DimensionMismatch(format!("{} coefficients on a {n}-dimensional chart", coeffs.len())));
        }
        let vals: Vec<CMat> = coeffs.iter().map(|c| h * C64::new(*c, 0.0)).collect();
        let s = h.nrows();
        let form = FormField::new(chart, 1, ValueKind::Algebra(group), move |_| vals.clone())?
            .with_partials(Arc::new(move |_, _| vec![CMat::zeros(s, s); n]));
        Self::new(group, form)
    }

    pub fn group(&self) -> GroupId {
        self.group
    }

    pub fn chart(&self) -> &ModelChart {
        self.form.chart()
    }

    pub fn form(&self) -> &FormField {
        &self.form
    }

    pub fn identification_defect<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> f64 {
        self.form.identification_defect(count, rng)
    }
}

/// Values `A_j` and curvature components `F_{ij}` (canonical order) at `x`.
pub(crate) fn curvature_at(a: &FormField, x: &[f64], h: f64) -> (Vec<CMat>, Vec<CMat>) {
    let n = a.dim();
    let vals = a.eval(x);
    let parts: Vec<Vec<CMat>> = (0..n).map(|i| a.partial(x, i, h)).collect();
    let mut f = Vec::with_capacity(n * (n.saturating_sub(1)) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            f.push(&parts[i][j] - &parts[j][i] + &vals[i] * &vals[j] - &vals[j] * &vals[i]);
        }
    }
    (vals, f)
}

/// `F = dA + ½[A ∧ A]`.
pub fn curvature(a: &Connection, q: &QuadratureSpec) -> FormField {
    let form = a.form.clone();
    let h = q.fd_step();
    FormField::new(a.chart().clone(), 2, ValueKind::Algebra(a.group), move |x| curvature_at(&form, x, h).1)
        .expect("curvature has the right shape")
}

#[derive(Clone)]
pub struct GaugeTransformation {
    chart: ModelChart,
    group: GroupId,
    g: GroupMap,
    dg: Option<GroupMapPartial>,
    d2g: Option<GroupMapHessian>,
}

impl std::fmt::Debug for GaugeTransformation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GaugeTransformation")
            .field("chart", &self.chart)
            .field("group", &self.group)
            .field("analytic_derivative", &self.dg.is_some())
            .field("analytic_second_derivative", &self.d2g.is_some())
            .finish()
    }
}

impl GaugeTransformation {
    pub fn new(chart: ModelChart, group: GroupId, g: GroupMap) -> Self {
        Self { chart, group, g, dg: None, d2g: None }
    }

    pub fn with_derivative(mut self, dg: GroupMapPartial) -> Self {
        self.dg = Some(dg);
        self
    }

    /// Attaches second derivatives; with them (and analytic partials of `A`)
    /// the transformed connection carries analytic partials as well.
    pub fn with_second_derivative(mut self, d2g: GroupMapHessian) -> Self {
        self.d2g = Some(d2g);
        self
    }

    pub fn constant(chart: ModelChart, g: &GroupElement) -> Self {
        let m = g.matrix().clone();
        let n = m.nrows();
        Self {
            chart,
            group: g.group(),
            g: Arc::new(move |_| m.clone()),
            dg: Some(Arc::new(move |_, _| CMat::zeros(n, n))),
            d2g: Some(Arc::new(move |_, _, _| CMat::zeros(n, n))),
        }
    }

    pub fn identity(chart: ModelChart, group: GroupId) -> Self {
        Self::constant(chart, &GroupElement::identity(group))
    }

    /// `x -> exp(f(x))` for an algebra-valued function.
    pub fn exponential(chart: ModelChart, group: GroupId, f: Arc<dyn Fn(&[f64]) -> CMat + Send + Sync>) -> Self {
        Self::new(
            chart,
            group,
            Arc::new(move |x| exp_map(&AlgebraElement::from_matrix_unchecked(group, f(x))).matrix().clone()),
        )
    }

    pub fn chart(&self) -> &ModelChart {
        &self.chart
    }

    pub fn group(&self) -> GroupId {
        self.group
    }

    pub fn matrix(&self, x: &[f64]) -> CMat {
        (self.g)(x)
    }

    pub fn eval(&self, x: &[f64]) -> GroupElement {
        GroupElement::from_matrix_unchecked(self.group, self.matrix(x))
    }

    pub fn partial(&self, x: &[f64], i: usize, h: f64) -> CMat {
        if let Some(dg) = &self.dg {
            return dg(x, i);
        }
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[i] += h;
        xm[i] -= h;
        ((self.g)(&xp) - (self.g)(&xm)) * C64::new(0.5 / h, 0.0)
    }

    /// Pointwise product `(φψ)(x) = φ(x)ψ(x)`.
    pub fn compose(&self, other: &GaugeTransformation) -> Result<GaugeTransformation> {
        if self.chart != other.chart {
            return Err(Error::ChartMismatch);
        }
        if self.group != other.group {
            return Err(Error::GroupMismatch(format!("{} vs {}", self.group.name(), other.group.name())));
        }
        let (g1, g2) = (self.g.clone(), other.g.clone());
        let g: GroupMap = Arc::new(move |x| g1(x) * g2(x));
        let dg = match (&self.dg, &other.dg) {
            (Some(d1), Some(d2)) => {
                let (d1, d2, g1, g2) = (d1.clone(), d2.clone(), self.g.clone(), other.g.clone());
                Some(Arc::new(move |x: &[f64], i: usize| d1(x, i) * g2(x) + g1(x) * d2(x, i)) as GroupMapPartial)
            }
            _ => None,
        };
        let d2g = match (&self.dg, &other.dg, &self.d2g, &other.d2g) {
            (Some(d1), Some(d2), Some(h1), Some(h2)) => {
                let (d1, d2, h1, h2, g1, g2) =
                    (d1.clone(), d2.clone(), h1.clone(), h2.clone(), self.g.clone(), other.g.clone());
                Some(Arc::new(move |x: &[f64], i: usize, j: usize| {
                    h1(x, i, j) * g2(x) + d1(x, i) * d2(x, j) + d1(x, j) * d2(x, i) + g1(x) * h2(x, i, j)
                }) as GroupMapHessian)
            }
            _ => None,
        };
        Ok(GaugeTransformation { chart: self.chart.clone(), group: self.group, g, dg, d2g })
    }

    /// Largest `‖g(p) - g(q)‖` over identified boundary points.
    pub fn identification_defect<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> f64 {
        self.chart
            .identified_pairs(count, rng)
            .iter()
            .map(|pair| frob(&(self.matrix(&pair.p) - self.matrix(&pair.q))))
            .fold(0.0, f64::max)
    }
}

/// `A^φ = Ad_{g^{-1}} A + g^{-1} dg`.
pub fn gauge_transform(a: &Connection, phi: &GaugeTransformation, q: &QuadratureSpec) -> Result<Connection> {
    if a.chart() != phi.chart() {
        return Err(Error::ChartMismatch);
    }
    if a.group != phi.group {
        return Err(Error::GroupMismatch(format!("{} vs {}", a.group.name(), phi.group.name())));
    }
    let form = a.form.clone();
    let phi2 = phi.clone();
    let h = q.fd_step();
    let mut f = FormField::new(a.chart().clone(), 1, ValueKind::Algebra(a.group), move |x| {
        let g = phi2.matrix(x);
        let gi = g.adjoint();
        form.eval(x)
            .iter()
            .enumerate()
            .map(|(i, ai)| &gi * ai * &g + &gi * phi2.partial(x, i, h))
            .collect::<Vec<_>>()
    })?;
    if let (Some(dg), Some(d2g), true) = (&phi.dg, &phi.d2g, a.form.has_analytic_partials()) {
        let (g, dg, d2g, form) = (phi.g.clone(), dg.clone(), d2g.clone(), a.form.clone());
        let n = a.chart().dim();
        f = f.with_partials(Arc::new(move |x: &[f64], j: usize| {
            let gm = g(x);
            let gi = gm.adjoint();
            let dgj = dg(x, j);
            let dgi_j = -(&gi * &dgj * &gi);
            let vals = form.eval(x);
            let dvals = form.partial(x, j, 0.0);
            (0..n)
                .map(|i| {
                    &dgi_j * &vals[i] * &gm
                        + &gi * &dvals[i] * &gm
                        + &gi * &vals[i] * &dgj
                        + &dgi_j * dg(x, i)
                        + &gi * d2g(x, i, j)
                })
                .collect()
        }));
    }
    Connection::new(a.group, f)
}

/// Parallel transport around a closed chain of 1-cells with `steps`
/// midpoint factors per cell; later factors multiply on the left.
pub fn holonomy(a: &Connection, lp: &Chain, steps: usize) -> Result<GroupElement> {
    if a.chart() != lp.chart() {
        return Err(Error::ChartMismatch);
    }
    if lp.cells().iter().any(|c| c.dim() != 1) {
        return Err(Error::DegreeMismatch { form: 1, cell: lp.dim().unwrap_or(0) });
    }
    let group = a.group;
    let mut u = group.identity();
    if lp.is_empty() {
        return Ok(GroupElement::identity(group));
    }
    let ends = |c: &crate::forms::Cell| {
        let (p0, p1) = (c.eval(&[0.0]), c.eval(&[1.0]));
        if c.sign() > 0.0 {
            (p0, p1)
        } else {
            (p1, p0)
        }
    };
    let chart = a.chart();
    let first = ends(&lp.cells()[0]).0;
    let mut prev_end = first.clone();
    for (k, c) in lp.cells().iter().enumerate() {
        let (s, e) = ends(c);
        if k > 0 && !chart.same_point(&prev_end, &s, 1e-9) {
            let gap = prev_end.iter().zip(&s).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
            return Err(Error::OpenLoop { gap });
        }
        prev_end = e;
    }
    if !chart.same_point(&prev_end, &first, 1e-9) {
        let gap = prev_end.iter().zip(&first).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
        return Err(Error::OpenLoop { gap });
    }
    let dt = 1.0 / steps as f64;
    let n = chart.dim();
    for c in lp.cells() {
        for step in 0..steps {
            let k = if c.sign() > 0.0 { step } else { steps - 1 - step };
            let t = (k as f64 + 0.5) * dt;
            let x = c.eval(&[t]);
            let j = c.jacobian(&[t], n);
            let vals = a.form.eval(&x);
            let mut ag = CMat::zeros(u.nrows(), u.ncols());
            for (i, ai) in vals.iter().enumerate() {
                ag += ai * C64::new(j[(i, 0)] * c.sign(), 0.0);
            }
            let factor = exp_map(&AlgebraElement::from_matrix_unchecked(group, ag * C64::new(-dt, 0.0)));
            u = factor.matrix() * u;
        }
    }
    Ok(GroupElement::from_matrix_unchecked(group, u))
}

/// Values `A^α_j` and first derivatives `A^α_{j,i}` of a connection at a point.
#[derive(Debug, Clone)]
pub struct ConnectionCoordinates {
    /// `values[α][j]`
    pub values: Vec<Vec<f64>>,
    /// `derivatives[α][j][i] = ∂_i A^α_j`
    pub derivatives: Vec<Vec<Vec<f64>>>,
    pub structure: StructureConstants,
}

impl ConnectionCoordinates {
    pub fn sample(a: &Connection, x: &[f64], q: &QuadratureSpec) -> Self {
        let n = a.chart().dim();
        let g = a.group;
        let structure = StructureConstants::for_group(g);
        let m = structure.dim();
        let vals = a.form.eval(x);
        let parts: Vec<Vec<CMat>> = (0..n).map(|i| a.form.partial(x, i, q.fd_step())).collect();
        let mut values = vec![vec![0.0; n]; m];
        let mut derivatives = vec![vec![vec![0.0; n]; n]; m];
        for j in 0..n {
            for (al, c) in algebra_coords(&g, &vals[j]).into_iter().enumerate() {
                values[al][j] = c;
            }
            for i in 0..n {
                for (al, c) in algebra_coords(&g, &parts[i][j]).into_iter().enumerate() {
                    derivatives[al][j][i] = c;
                }
            }
        }
        Self { values, derivatives, structure }
    }
}

/// Weight of the structure-constant term in `curvature_components`.
pub const KAPPA: f64 = 0.5;

/// `F^α_{ij} = A^α_{j,i} - A^α_{i,j} + κ c^α_{βγ}(A^β_i A^γ_j - A^β_j A^γ_i)`,
/// returned as `[α][i][j]`.
pub fn curvature_components(c: &ConnectionCoordinates) -> Vec<Vec<Vec<f64>>> {
    let m = c.values.len();
    let n = if m > 0 { c.values[0].len() } else { 0 };
    let mut f = vec![vec![vec![0.0; n]; n]; m];
    for al in 0..m {
        for i in 0..n {
            for j in 0..n {
                let mut v = c.derivatives[al][j][i] - c.derivatives[al][i][j];
                for be in 0..m {
                    for ga in 0..m {
                        let k = c.structure.get(al, be, ga);
                        if k != 0.0 {
                            v += KAPPA
                                * k
                                * (c.values[be][i] * c.values[ga][j] - c.values[be][j] * c.values[ga][i]);
                        }
                    }
                }
                f[al][i][j] = v;
            }
        }
    }
    f
}
