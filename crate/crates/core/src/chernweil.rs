//! Chern-Weil forms, transgression, Chern-Simons actions mod Z and the
//! integer gauge defect.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::connection::{curvature_at, gauge_transform, Connection, GaugeTransformation};
use crate::equivariant::ConnectionFamily;
use crate::error::{Error, Result};
use crate::forms::exterior::{multi_indices, Ext};
use crate::forms::{gauss_legendre, integrate, Chain, FormField, ModelChart, QuadratureSpec, ValueKind};
use crate::liealg::{permutations, CMat, GroupId, InvariantPolynomial, C64};

/// A real number modulo 1 with tolerance-aware equality.
#[derive(Debug, Clone, Copy)]
pub struct ModZValue {
    rep: f64,
    tol: f64,
}

impl ModZValue {
    pub const DEFAULT_TOLERANCE: f64 = 1e-6;

    pub fn new(x: f64) -> Self {
        Self::with_tolerance(x, Self::DEFAULT_TOLERANCE)
    }

    pub fn with_tolerance(x: f64, tol: f64) -> Self {
        let mut rep = x - x.floor();
        if rep >= 1.0 {
            rep = 0.0;
        }
        Self { rep, tol }
    }

    pub fn zero() -> Self {
        Self::new(0.0)
    }

    /// Representative in `[0, 1)`.
    pub fn value(&self) -> f64 {
        self.rep
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    /// Circle distance in `[0, 1/2]`.
    pub fn distance(&self, other: &ModZValue) -> f64 {
        circle_distance(self.rep, other.rep)
    }

    /// Representative in `(-1/2, 1/2]`.
    pub fn centered(&self) -> f64 {
        if self.rep > 0.5 {
            self.rep - 1.0
        } else {
            self.rep
        }
    }
}

/// Distance between `a` and `b` on `R/Z`.
pub fn circle_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(1.0);
    d.min(1.0 - d)
}

impl PartialEq for ModZValue {
    fn eq(&self, other: &Self) -> bool {
        self.distance(other) <= self.tol.max(other.tol)
    }
}

impl std::ops::Add for ModZValue {
    type Output = ModZValue;
    fn add(self, o: ModZValue) -> ModZValue {
        ModZValue::with_tolerance(self.rep + o.rep, self.tol.max(o.tol))
    }
}

impl std::ops::Sub for ModZValue {
    type Output = ModZValue;
    fn sub(self, o: ModZValue) -> ModZValue {
        ModZValue::with_tolerance(self.rep - o.rep, self.tol.max(o.tol))
    }
}

impl std::ops::Neg for ModZValue {
    type Output = ModZValue;
    fn neg(self) -> ModZValue {
        ModZValue::with_tolerance(-self.rep, self.tol)
    }
}

impl fmt::Display for ModZValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.12} mod 1", self.rep)
    }
}

/// `N_r · sym-tr` of mixed-degree matrix-valued exterior elements, with
/// Koszul signs for odd arguments. Values of the result are 1 x 1.
pub(crate) fn poly_ext(p: &InvariantPolynomial, args: &[Ext], odd: &[bool]) -> Ext {
    let r = args.len();
    let perms = permutations(r);
    let mut total = Ext::new();
    for perm in &perms {
        let mut sign = 1.0;
        for i in 0..r {
            for j in (i + 1)..r {
                if perm[i] > perm[j] && odd[perm[i]] && odd[perm[j]] {
                    sign = -sign;
                }
            }
        }
        let mut prod = args[perm[0]].clone();
        for &k in &perm[1..] {
            prod = prod.mul(&args[k]);
        }
        total = total.add(&prod.trace().scale(C64::new(sign, 0.0)));
    }
    total.scale(p.normalization() / C64::new(perms.len() as f64, 0.0))
}

/// `N_r tr(G^r)` for an even element `G` (all arguments equal).
pub(crate) fn poly_power(p: &InvariantPolynomial, g: &Ext) -> Ext {
    let mut prod = g.clone();
    for _ in 1..p.degree() {
        prod = prod.mul(g);
    }
    prod.trace().scale(p.normalization())
}

/// `N_r tr(a ∧ F^{r-1})`, equal to `p(a, F, ..., F)` for even `F`.
pub(crate) fn poly_linear(p: &InvariantPolynomial, a: &Ext, f: &Ext) -> Ext {
    let mut prod = a.clone();
    for _ in 1..p.degree() {
        prod = prod.mul(f);
    }
    prod.trace().scale(p.normalization())
}

fn kind_ok(k: ValueKind, size: usize) -> bool {
    !matches!(k, ValueKind::Scalar) && k.size() == size
}

/// `p(ω_1, ..., ω_r)` for matrix- or algebra-valued forms.
pub fn polynomial_form(p: &InvariantPolynomial, args: &[&FormField]) -> Result<FormField> {
    if args.len() != p.degree() {
        return Err(Error::ArityMismatch { expected: p.degree(), got: args.len() });
    }
    let chart = args[0].chart().clone();
    let size = args[0].kind().size();
    for a in args {
        if a.chart() != &chart {
            return Err(Error::ChartMismatch);
        }
        if !kind_ok(a.kind(), size) {
            return Err(Error::KindMismatch(format!("{:?} in an invariant polynomial", a.kind())));
        }
    }
    let degree: usize = args.iter().map(|a| a.degree()).sum();
    let odd: Vec<bool> = args.iter().map(|a| a.degree() % 2 == 1).collect();
    let owned: Vec<FormField> = args.iter().map(|a| (*a).clone()).collect();
    let n = chart.dim();
    let p = *p;
    FormField::new(chart, degree, ValueKind::Scalar, move |x| {
        let exts: Vec<Ext> = owned.iter().map(|a| a.ext(x)).collect();
        poly_ext(&p, &exts, &odd).homogeneous(n, degree, 1, 1)
    })
}

/// `p(F, ..., F)` with `F` the curvature of `A`.
pub fn chern_weil_form(p: &InvariantPolynomial, a: &Connection, q: &QuadratureSpec) -> FormField {
    let form = a.form().clone();
    let h = q.fd_step();
    let n = a.chart().dim();
    let r = p.degree();
    let p = *p;
    FormField::new(a.chart().clone(), 2 * r, ValueKind::Scalar, move |x| {
        let (_, f) = curvature_at(&form, x, h);
        poly_power(&p, &Ext::from_homogeneous(n, 2, f)).homogeneous(n, 2 * r, 1, 1)
    })
    .expect("shape is consistent")
}

pub const DEFAULT_T_NODES: usize = 12;

/// Transgression `r ∫_0^1 p(A' - A, F_t, ..., F_t) dt`, `A_t = (1-t)A' + tA`,
/// by Gauss-Legendre in `t`. The integrand has degree `2r - 2` in `t`, so more
/// than `r` nodes are never used.
pub fn transgression_form(
    p: &InvariantPolynomial,
    a_prime: &FormField,
    a: &FormField,
    t_nodes: usize,
    q: &QuadratureSpec,
) -> Result<FormField> {
    if a_prime.chart() != a.chart() {
        return Err(Error::ChartMismatch);
    }
    if a_prime.kind() != a.kind() {
        return Err(Error::GroupMismatch(format!("{:?} vs {:?}", a_prime.kind(), a.kind())));
    }
    let n = a.dim();
    let r = p.degree();
    let (nodes, weights) = gauss_legendre(t_nodes.clamp(1, r.max(1)));
    let (ap, a0) = (a_prime.clone(), a.clone());
    let h = q.fd_step();
    let p = *p;
    let pairs: Vec<(usize, usize)> = multi_indices(n, 2).into_iter().map(|v| (v[0], v[1])).collect();
    FormField::new(a.chart().clone(), 2 * r - 1, ValueKind::Scalar, move |x| {
        let vp = ap.eval(x);
        let v0 = a0.eval(x);
        let diff: Vec<CMat> = vp.iter().zip(&v0).map(|(u, v)| u - v).collect();
        let a_ext = Ext::from_homogeneous(n, 1, diff);
        if r == 1 {
            return poly_linear(&p, &a_ext, &Ext::new()).homogeneous(n, 1, 1, 1);
        }
        let dp: Vec<Vec<CMat>> = (0..n).map(|i| ap.partial(x, i, h)).collect();
        let d0: Vec<Vec<CMat>> = (0..n).map(|i| a0.partial(x, i, h)).collect();
        let dap: Vec<CMat> = pairs.iter().map(|&(i, j)| &dp[i][j] - &dp[j][i]).collect();
        let da0: Vec<CMat> = pairs.iter().map(|&(i, j)| &d0[i][j] - &d0[j][i]).collect();
        let mut acc = Ext::new();
        for (t, w) in nodes.iter().zip(&weights) {
            let (cp, c0) = (C64::new(1.0 - t, 0.0), C64::new(*t, 0.0));
            let at: Vec<CMat> = vp.iter().zip(&v0).map(|(u, v)| u * cp + v * c0).collect();
            let ft: Vec<CMat> = pairs
                .iter()
                .zip(dap.iter().zip(&da0))
                .map(|(&(i, j), (u, v))| u * cp + v * c0 + &at[i] * &at[j] - &at[j] * &at[i])
                .collect();
            let term = poly_linear(&p, &a_ext, &Ext::from_homogeneous(n, 2, ft));
            acc = acc.add(&term.scale(C64::new(w * r as f64, 0.0)));
        }
        acc.homogeneous(n, 2 * r - 1, 1, 1)
    })
}

/// `Tp(A', A)` for connections.
pub fn transgression(
    p: &InvariantPolynomial,
    a_prime: &Connection,
    a: &Connection,
    t_nodes: usize,
    q: &QuadratureSpec,
) -> Result<FormField> {
    if a_prime.group() != a.group() {
        return Err(Error::GroupMismatch(format!("{} vs {}", a_prime.group().name(), a.group().name())));
    }
    transgression_form(p, a_prime.form(), a.form(), t_nodes, q)
}

/// Data of a Chern-Simons action `λ_c(A) = λ_c(A₀) + ∫_c Tp(A, A₀)`.
#[derive(Debug, Clone)]
pub struct CSActionSpec {
    pub polynomial: InvariantPolynomial,
    pub background: Connection,
    pub offset: ModZValue,
    pub cycle: Chain,
    pub t_nodes: usize,
    pub quadrature: QuadratureSpec,
}

impl CSActionSpec {
    pub fn new(polynomial: InvariantPolynomial, background: Connection, cycle: Chain) -> Result<Self> {
        let spec = Self {
            polynomial,
            background,
            offset: ModZValue::zero(),
            cycle,
            t_nodes: DEFAULT_T_NODES,
            quadrature: QuadratureSpec::default(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_offset(mut self, offset: ModZValue) -> Self {
        self.offset = offset;
        self
    }

    pub fn with_quadrature(mut self, q: QuadratureSpec) -> Self {
        self.quadrature = q;
        self
    }

    pub fn with_t_nodes(mut self, t: usize) -> Self {
        self.t_nodes = t;
        self
    }

    pub fn with_cycle(&self, cycle: Chain) -> Result<Self> {
        let mut s = self.clone();
        s.cycle = cycle;
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<()> {
        let want = 2 * self.polynomial.degree() - 1;
        if self.cycle.chart() != self.background.chart() {
            return Err(Error::ChartMismatch);
        }
        if let Some(k) = self.cycle.dim() {
            if k != want {
                return Err(Error::DimensionMismatch(format!("cycle of dimension {k}, need {want}")));
            }
        }
        if want > self.background.chart().dim() {
            return Err(Error::DimensionMismatch(format!(
                "a {want}-cycle does not fit in a {}-dimensional chart",
                self.background.chart().dim()
            )));
        }
        Ok(())
    }
}

/// Real lift `λ_c(A₀) + ∫_c Tp(A, A₀)` (complex for non-real normalizations).
pub fn cs_action_lift(spec: &CSActionSpec, a: &Connection) -> Result<C64> {
    spec.validate()?;
    if a.chart() != spec.background.chart() {
        return Err(Error::ChartMismatch);
    }
    let tp = transgression(&spec.polynomial, a, &spec.background, spec.t_nodes, &spec.quadrature)?;
    let v = integrate(&tp, &spec.cycle, &spec.quadrature)?;
    Ok(v[(0, 0)] + C64::new(spec.offset.value(), 0.0))
}

pub fn cs_action(spec: &CSActionSpec, a: &Connection) -> Result<ModZValue> {
    let v = cs_action_lift(spec, a)?;
    Ok(ModZValue::with_tolerance(v.re, spec.offset.tolerance()))
}

/// Result of a gauge-defect computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaugeDefect {
    pub defect: i64,
    pub raw: f64,
    pub residual: f64,
}

pub const DEFECT_RESIDUAL_LIMIT: f64 = 0.05;

/// `round(CS(A^φ) - CS(A))` with the rounding residual.
pub fn cs_gauge_defect_detailed(spec: &CSActionSpec, a: &Connection, phi: &GaugeTransformation) -> Result<GaugeDefect> {
    let transformed = gauge_transform(a, phi, &spec.quadrature)?;
    let raw = cs_action_lift(spec, &transformed)?.re - cs_action_lift(spec, a)?.re;
    let defect = raw.round();
    let residual = (raw - defect).abs();
    if residual >= DEFECT_RESIDUAL_LIMIT {
        return Err(Error::NonIntegerDefect { raw, residual });
    }
    Ok(GaugeDefect { defect: defect as i64, raw, residual })
}

pub fn cs_gauge_defect(spec: &CSActionSpec, a: &Connection, phi: &GaugeTransformation) -> Result<i64> {
    cs_gauge_defect_detailed(spec, a, phi).map(|d| d.defect)
}

/// `(1/24π²) ∫_c tr((g⁻¹dg)³)`.
pub fn degree_integral(phi: &GaugeTransformation, chain: &Chain, q: &QuadratureSpec) -> Result<f64> {
    if phi.chart() != chain.chart() {
        return Err(Error::ChartMismatch);
    }
    if phi.chart().dim() != 3 {
        return Err(Error::DimensionMismatch("degree integral needs a 3-dimensional chart".into()));
    }
    let phi2 = phi.clone();
    let h = q.fd_step();
    let w = FormField::new(phi.chart().clone(), 3, ValueKind::Scalar, move |x| {
        let g = phi2.matrix(x);
        let gi = g.adjoint();
        let a: Vec<CMat> = (0..3).map(|i| &gi * phi2.partial(x, i, h)).collect();
        let e = Ext::from_homogeneous(3, 1, a);
        e.mul(&e).mul(&e).trace().homogeneous(3, 3, 1, 1)
    })?;
    let v = integrate(&w, chain, q)?;
    Ok(v[(0, 0)].re / (24.0 * PI * PI))
}

/// Radial profile `θ(r) = π(1 - S(r/R))` with `S' ∝ (1 - u²)^k` and its derivative.
fn profile(r: f64, radius: f64, k: u32) -> (f64, f64) {
    let u = r / radius;
    if u >= 1.0 {
        return (0.0, 0.0);
    }
    // S(u) = Σ_j binom(k, j) (-1)^j u^{2j+1}/(2j+1), normalized by S(1).
    let mut s = 0.0;
    let mut s1 = 0.0;
    let mut binom = 1.0;
    for j in 0..=k {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let d = (2 * j + 1) as f64;
        s += sign * binom * u.powi(2 * j as i32 + 1) / d;
        s1 += sign * binom / d;
        binom = binom * (k - j) as f64 / (j + 1) as f64;
    }
    let ds = (1.0 - u * u).powi(k as i32) / s1;
    (PI * (1.0 - s / s1), -PI * ds / radius)
}

pub const WINDING_RADIUS: f64 = 0.45;
const WINDING_SMOOTHNESS: u32 = 4;

/// Degree-`d` map `[0,1]³ → SU(2)`, `exp(-i d θ(r) n̂·σ)` about the cube centre,
/// equal to the identity near the collapsed boundary.
pub fn winding_map(d: i32) -> GaugeTransformation {
    let pauli = pauli();
    let (p1, p2, p3) = (pauli.clone(), pauli.clone(), pauli);
    let dd = d as f64;
    // orientation chosen so that the degree integral returns +d
    let orient = -1.0;
    let parts = move |x: &[f64]| {
        let y = [x[0] - 0.5, x[1] - 0.5, x[2] - 0.5];
        let r = (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt();
        let (th, dth) = profile(r, WINDING_RADIUS, WINDING_SMOOTHNESS);
        (y, r, th, dth)
    };
    let g = move |x: &[f64]| {
        let (y, r, th, _) = parts(x);
        let c = (dd * th).cos();
        let f = if r > 1e-12 { orient * (dd * th).sin() / r } else { 0.0 };
        let mut m = CMat::identity(2, 2) * C64::new(c, 0.0);
        for k in 0..3 {
            m += &p1[k] * C64::new(0.0, f * y[k]);
        }
        m
    };
    let dg = move |x: &[f64], k: usize| {
        let (y, r, th, dth) = parts(x);
        let (sn, cs) = (dd * th).sin_cos();
        let f = if r > 1e-12 { orient * sn / r } else { orient * dd * dth_at_zero() };
        let mut m = &p2[k] * C64::new(0.0, f);
        if r > 1e-9 {
            let dc = -dd * sn * dth;
            let df = orient * (dd * cs * dth * r - sn) / (r * r);
            m += CMat::identity(2, 2) * C64::new(dc * y[k] / r, 0.0);
            for l in 0..3 {
                m += &p2[l] * C64::new(0.0, df * y[k] / r * y[l]);
            }
        }
        m
    };
    let _ = &p3;
    GaugeTransformation::new(ModelChart::CubeS3, GroupId::SU(2), Arc::new(g)).with_derivative(Arc::new(dg))
}

fn dth_at_zero() -> f64 {
    profile(0.0, WINDING_RADIUS, WINDING_SMOOTHNESS).1
}

/// Pauli matrices.
pub fn pauli() -> [CMat; 3] {
    let z = C64::new(0.0, 0.0);
    let o = C64::new(1.0, 0.0);
    let i = C64::i();
    [
        CMat::from_row_slice(2, 2, &[z, o, o, z]),
        CMat::from_row_slice(2, 2, &[z, -i, i, z]),
        CMat::from_row_slice(2, 2, &[o, z, z, -o]),
    ]
}

/// Default deterministic sample points on a chart for flatness checks.
pub(crate) fn flatness_samples(chart: &ModelChart, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| chart.sample_point(&mut rng)).collect()
}

pub const FLATNESS_TOLERANCE: f64 = 1e-8;

/// Largest curvature component of `A` over sample points.
pub fn curvature_sup(a: &Connection, points: &[Vec<f64>], q: &QuadratureSpec) -> f64 {
    crate::connection::curvature(a, q).sup_norm(points)
}

/// Maximal circle deviation of `λ_c(A_s)` from its value at the start of a
/// parameter path through a flat family.
pub fn locally_constant_check(spec: &CSActionSpec, family: &ConnectionFamily, path: &[Vec<f64>]) -> Result<f64> {
    if path.is_empty() {
        return Ok(0.0);
    }
    let samples = flatness_samples(family.base(), 32, 0x5eed);
    let mut values = Vec::with_capacity(path.len());
    for s in path {
        let a = family.connection_at(s)?;
        let sup = curvature_sup(&a, &samples, &spec.quadrature);
        if sup >= FLATNESS_TOLERANCE {
            return Err(Error::NotFlat { sup });
        }
        values.push(cs_action(spec, &a)?);
    }
    Ok(values.iter().map(|v| v.distance(&values[0])).fold(0.0, f64::max))
}

/// `|λ_c(A) - λ_{c+∂u}(A)|` on the circle.
pub fn homology_invariance_check(spec: &CSActionSpec, a: &Connection, u: &Chain) -> Result<f64> {
    let shifted = spec.with_cycle(spec.cycle.concat(&u.boundary())?)?;
    Ok(cs_action(spec, a)?.distance(&cs_action(&shifted, a)?))
}
