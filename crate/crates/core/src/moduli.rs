//! Flat connections on surfaces through holonomy representations of the
//! surface group, their tangent cocycles, the Atiyah-Bott form and the moment
//! map on connection families.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;

use crate::chernweil::poly_linear;
use crate::equivariant::{family_char_form, family_curvature_bigrading, ConnectionFamily};
use crate::error::{Error, Result};
use crate::forms::exterior::Ext;
use crate::forms::{fiber_integrate, integrate, BracketMode, Chain, FormField, ModelChart, QuadratureSpec, ValueKind};
use crate::liealg::{algebra_coords, exp_map, frob, AlgebraElement, CMat, GroupElement, GroupId, InvariantPolynomial, C64};

pub const FLAT_TOLERANCE: f64 = 1e-8;

/// `ρ: π₁(Σ_g) → G` given by the images of `a₁, b₁, ..., a_g, b_g`.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceGroupRep {
    genus: usize,
    group: GroupId,
    generators: Vec<GroupElement>,
}

/// A letter of the relator word: generator index and whether it is inverted.
type Letter = (usize, bool);

fn relator_word(genus: usize) -> Vec<Letter> {
    (0..genus)
        .flat_map(|i| [(2 * i, false), (2 * i + 1, false), (2 * i, true), (2 * i + 1, true)])
        .collect()
}

impl SurfaceGroupRep {
    pub fn new(genus: usize, group: GroupId, generators: Vec<GroupElement>) -> Result<Self> {
        if genus == 0 {
            return Err(Error::InvalidArgument("genus must be positive".into()));
        }
        if generators.len() != 2 * genus {
            return Err(Error::ArityMismatch { expected: 2 * genus, got: generators.len() });
        }
        if let Some(g) = generators.iter().find(|g| g.group() != group) {
            return Err(Error::GroupMismatch(format!("{} in a {} representation", g.group().name(), group.name())));
        }
        Ok(Self { genus, group, generators })
    }

    pub fn trivial(genus: usize, group: GroupId) -> Result<Self> {
        Self::new(genus, group, vec![GroupElement::identity(group); 2 * genus])
    }

    pub fn random<R: Rng + ?Sized>(genus: usize, group: GroupId, rng: &mut R) -> Result<Self> {
        let gens = (0..2 * genus).map(|_| GroupElement::random(group, rng)).collect();
        Self::new(genus, group, gens)
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn group(&self) -> GroupId {
        self.group
    }

    pub fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    fn letter(&self, l: Letter) -> CMat {
        let m = self.generators[l.0].matrix();
        if l.1 {
            m.adjoint()
        } else {
            m.clone()
        }
    }

    /// `∏ [a_i, b_i]`, `[a, b] = a b a⁻¹ b⁻¹`.
    pub fn relator(&self) -> CMat {
        let n = self.group.matrix_size();
        relator_word(self.genus).into_iter().fold(CMat::identity(n, n), |acc, l| acc * self.letter(l))
    }

    /// `ρ ↦ h ρ h⁻¹`.
    pub fn conjugate(&self, h: &GroupElement) -> Result<Self> {
        let gens = self
            .generators
            .iter()
            .map(|g| h.mul(g)?.mul(&h.inverse()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.genus, self.group, gens)
    }

    /// Conjugation-invariant coordinates `(tr a_i, tr b_i, tr a_i b_i)`, real parts.
    pub fn trace_coordinates(&self) -> Vec<f64> {
        (0..self.genus)
            .flat_map(|i| {
                let a = self.generators[2 * i].matrix();
                let b = self.generators[2 * i + 1].matrix();
                [a.trace().re, b.trace().re, (a * b).trace().re]
            })
            .collect()
    }

    pub fn is_flat(&self) -> bool {
        relator_residual(self) < FLAT_TOLERANCE
    }
}

/// `‖∏[a_i, b_i] − I‖_F`.
pub fn relator_residual(rho: &SurfaceGroupRep) -> f64 {
    let n = rho.group.matrix_size();
    frob(&(rho.relator() - CMat::identity(n, n)))
}

/// `d/dε ∏ letters` when generator `k` moves to `g_k exp(ε X)`.
fn relator_variation(rho: &SurfaceGroupRep, k: usize, x: &CMat) -> CMat {
    let word = relator_word(rho.genus);
    let n = rho.group.matrix_size();
    let mats: Vec<CMat> = word.iter().map(|&l| rho.letter(l)).collect();
    let mut prefix = vec![CMat::identity(n, n)];
    for m in &mats {
        let next = prefix.last().unwrap() * m;
        prefix.push(next);
    }
    let mut suffix = vec![CMat::identity(n, n); mats.len() + 1];
    for j in (0..mats.len()).rev() {
        suffix[j] = &mats[j] * &suffix[j + 1];
    }
    let mut out = CMat::zeros(n, n);
    for (j, &(g, inv)) in word.iter().enumerate() {
        if g != k {
            continue;
        }
        // d(g e^{εX}) = g X ; d(e^{-εX} g⁻¹) = -X g⁻¹
        let dl = if inv { -(x * &mats[j]) } else { &mats[j] * x };
        out += &prefix[j] * dl * &suffix[j + 1];
    }
    out
}

/// Gradient of `residual²` in the coordinates `(k, α)` of right
/// perturbations `g_k exp(Σ_α ξ_{kα} B_α)`.
pub fn relator_gradient(rho: &SurfaceGroupRep) -> Vec<f64> {
    let n = rho.group.matrix_size();
    let e = rho.relator() - CMat::identity(n, n);
    let basis = rho.group.basis();
    let mut g = Vec::with_capacity(rho.generators.len() * basis.len());
    for k in 0..rho.generators.len() {
        for b in &basis {
            let dr = relator_variation(rho, k, b);
            g.push(2.0 * (e.adjoint() * dr).trace().re);
        }
    }
    g
}

/// Moves every generator by `g_k exp(Σ_α ξ_{kα} B_α)`.
pub fn retract(rho: &SurfaceGroupRep, xi: &[f64]) -> Result<SurfaceGroupRep> {
    let d = rho.group.algebra_dim();
    if xi.len() != d * rho.generators.len() {
        return Err(Error::DimensionMismatch(format!("{} coordinates, expected {}", xi.len(), d * rho.generators.len())));
    }
    let gens = rho
        .generators
        .iter()
        .enumerate()
        .map(|(k, g)| g.mul(&exp_map(&AlgebraElement::from_coords(rho.group, &xi[k * d..(k + 1) * d])?)))
        .collect::<Result<Vec<_>>>()?;
    SurfaceGroupRep::new(rho.genus, rho.group, gens)
}

/// Central finite-difference gradient of `residual²` along the retraction.
pub fn relator_gradient_fd(rho: &SurfaceGroupRep, h: f64) -> Result<Vec<f64>> {
    let m = rho.generators.len() * rho.group.algebra_dim();
    (0..m)
        .map(|i| {
            let mut xi = vec![0.0; m];
            xi[i] = h;
            let fp = relator_residual(&retract(rho, &xi)?).powi(2);
            xi[i] = -h;
            let fm = relator_residual(&retract(rho, &xi)?).powi(2);
            Ok((fp - fm) / (2.0 * h))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlatSearchOptions {
    pub tolerance: f64,
    pub max_iters: usize,
    pub initial_step: f64,
    pub armijo: f64,
}

impl Default for FlatSearchOptions {
    fn default() -> Self {
        Self { tolerance: FLAT_TOLERANCE, max_iters: 5000, initial_step: 0.5, armijo: 1e-4 }
    }
}

#[derive(Debug, Clone)]
pub struct FlatSearchResult {
    pub rep: SurfaceGroupRep,
    pub iterations: usize,
    pub residual: f64,
    /// Residual after each accepted step, starting with the seed's.
    pub history: Vec<f64>,
}

/// Gradient descent on `residual²` with exponential retraction and a
/// backtracking Armijo search whose trial step grows after easy acceptances.
pub fn find_flat(seed: &SurfaceGroupRep, options: &FlatSearchOptions) -> Result<FlatSearchResult> {
    if options.tolerance <= 0.0 || options.initial_step <= 0.0 {
        return Err(Error::InvalidArgument("tolerance and step must be positive".into()));
    }
    let mut rho = seed.clone();
    let mut f = relator_residual(&rho).powi(2);
    let mut history = vec![f.sqrt()];
    let mut step = options.initial_step;
    let mut iterations = 0;
    while f.sqrt() >= options.tolerance {
        if iterations >= options.max_iters {
            return Err(Error::NoConvergence { iterations, best: f.sqrt() });
        }
        iterations += 1;
        let g = relator_gradient(&rho);
        let gg: f64 = g.iter().map(|v| v * v).sum();
        if gg == 0.0 {
            return Err(Error::NoConvergence { iterations, best: f.sqrt() });
        }
        let mut t = step;
        let mut accepted = None;
        for trial in 0..60 {
            let xi: Vec<f64> = g.iter().map(|v| -t * v).collect();
            let cand = retract(&rho, &xi)?;
            let fc = relator_residual(&cand).powi(2);
            if fc <= f - options.armijo * t * gg {
                accepted = Some((cand, fc, trial));
                break;
            }
            t *= 0.5;
        }
        match accepted {
            Some((cand, fc, trial)) => {
                rho = cand;
                f = fc;
                history.push(f.sqrt());
                step = if trial == 0 { (2.0 * t).min(1e3) } else { t };
            }
            None => return Err(Error::NoConvergence { iterations, best: f.sqrt() }),
        }
    }
    Ok(FlatSearchResult { residual: f.sqrt(), rep: rho, iterations, history })
}

/// Infinitesimal deformation `g_k ↦ g_k exp(ε u_k)` of a flat representation.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentCocycle {
    rep: SurfaceGroupRep,
    components: Vec<AlgebraElement>,
}

impl TangentCocycle {
    pub fn new(rep: SurfaceGroupRep, components: Vec<AlgebraElement>) -> Result<Self> {
        if components.len() != rep.generators.len() {
            return Err(Error::ArityMismatch { expected: rep.generators.len(), got: components.len() });
        }
        Ok(Self { rep, components })
    }

    fn from_coords(rep: &SurfaceGroupRep, v: &[f64]) -> Self {
        let d = rep.group.algebra_dim();
        let components = (0..rep.generators.len())
            .map(|k| AlgebraElement::from_coords(rep.group, &v[k * d..(k + 1) * d]).expect("coordinate count"))
            .collect();
        Self { rep: rep.clone(), components }
    }

    pub fn rep(&self) -> &SurfaceGroupRep {
        &self.rep
    }

    pub fn components(&self) -> &[AlgebraElement] {
        &self.components
    }

    pub fn coords(&self) -> Vec<f64> {
        self.components.iter().flat_map(|c| c.coords()).collect()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { rep: self.rep.clone(), components: self.components.iter().map(|c| c.scale(s)).collect() }
    }

    /// `‖d(relator)(u)‖_F`.
    pub fn linearized_residual(&self) -> f64 {
        let n = self.rep.group.matrix_size();
        let mut acc = CMat::zeros(n, n);
        for (k, c) in self.components.iter().enumerate() {
            acc += relator_variation(&self.rep, k, c.matrix());
        }
        frob(&acc)
    }

    /// Transport along `ρ ↦ h ρ h⁻¹`.
    pub fn conjugate(&self, h: &GroupElement) -> Result<Self> {
        let rep = self.rep.conjugate(h)?;
        let components = self
            .components
            .iter()
            .map(|c| crate::liealg::adjoint_action(h, c))
            .collect::<Result<Vec<_>>>()?;
        Self::new(rep, components)
    }
}

/// Cocycles modulo coboundaries at a flat representation.
#[derive(Debug, Clone)]
pub struct TangentSpace {
    pub cocycle_dim: usize,
    pub coboundary_dim: usize,
    pub basis: Vec<TangentCocycle>,
    /// Coboundary directions `u_k = g_k⁻¹ η g_k − η`, one per spanning vector.
    pub coboundaries: Vec<TangentCocycle>,
}

pub const SVD_THRESHOLD: f64 = 1e-6;

fn orthonormal_range(m: &DMatrix<f64>, threshold: f64) -> DMatrix<f64> {
    if m.ncols() == 0 || m.nrows() == 0 {
        return DMatrix::zeros(m.nrows(), 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors");
    let keep: Vec<usize> = (0..svd.singular_values.len()).filter(|&i| svd.singular_values[i] > threshold).collect();
    DMatrix::from_fn(m.nrows(), keep.len(), |r, c| u[(r, keep[c])])
}

/// Basis of `ker dR / im δ` by singular-value thresholding.
pub fn tangent_cocycles(rho: &SurfaceGroupRep) -> Result<TangentSpace> {
    let res = relator_residual(rho);
    if res >= FLAT_TOLERANCE {
        return Err(Error::NotFlat { sup: res });
    }
    let group = rho.group;
    let basis = group.basis();
    let d = basis.len();
    let m = d * rho.generators.len();
    // Jacobian of the relator in algebra coordinates.
    let mut jac = DMatrix::zeros(d, m);
    for k in 0..rho.generators.len() {
        for (a, b) in basis.iter().enumerate() {
            let c = algebra_coords(&group, &relator_variation(rho, k, b));
            for (r, v) in c.iter().enumerate() {
                jac[(r, k * d + a)] = *v;
            }
        }
    }
    let svd = jac.clone().svd(false, true);
    let vt = svd.v_t.expect("right singular vectors");
    let rank = svd.singular_values.iter().filter(|s| **s > SVD_THRESHOLD).count();
    // Kernel: complement of the row space.
    let row_space = DMatrix::from_fn(m, rank, |r, c| {
        let idx = (0..svd.singular_values.len()).filter(|&i| svd.singular_values[i] > SVD_THRESHOLD).nth(c).unwrap();
        vt[(idx, r)]
    });
    let p_row = &row_space * row_space.transpose();
    let p_z = DMatrix::identity(m, m) - p_row;
    // Coboundary map η ↦ (g_k⁻¹ η g_k − η)_k.
    let mut cob = DMatrix::zeros(m, d);
    for (e, b) in basis.iter().enumerate() {
        for (k, g) in rho.generators.iter().enumerate() {
            let gm = g.matrix();
            let u = gm.adjoint() * b * gm - b;
            for (a, v) in algebra_coords(&group, &u).iter().enumerate() {
                cob[(k * d + a, e)] = *v;
            }
        }
    }
    let b_range = orthonormal_range(&cob, SVD_THRESHOLD);
    let p_b = &b_range * b_range.transpose();
    let eig = SymmetricEigen::new(&p_z - &p_b);
    let mut quotient: Vec<DVector<f64>> = Vec::new();
    for i in 0..m {
        if eig.eigenvalues[i] > 0.5 {
            quotient.push(eig.eigenvectors.column(i).into_owned());
        }
    }
    let cocycle_dim = m - rank;
    Ok(TangentSpace {
        cocycle_dim,
        coboundary_dim: b_range.ncols(),
        basis: quotient.iter().map(|v| TangentCocycle::from_coords(rho, v.as_slice())).collect(),
        coboundaries: (0..b_range.ncols())
            .map(|c| TangentCocycle::from_coords(rho, b_range.column(c).into_owned().as_slice()))
            .collect(),
    })
}

/// `(1/4π²) tr`, the invariant form pairing the tangent cocycles.
fn ab_pairing(x: &CMat, y: &CMat) -> f64 {
    (x * y).trace().re / (4.0 * PI * PI)
}

/// Atiyah-Bott pairing of two tangent cocycles by the cup product on the
/// 4g-gon: the fundamental cycle `Σ_j [p_{j−1} | x_j] − Σ_{inverse letters
/// y⁻¹} [y | y⁻¹]` of the relator word `x_1 ⋯ x_{4g}` evaluated on
/// `(u ∪ v)(g, h) = B(u(g), Ad_g v(h))`, with `u(g_k) = Ad_{g_k} u_k`.
pub fn atiyah_bott_form(u: &TangentCocycle, v: &TangentCocycle) -> Result<f64> {
    if u.rep != v.rep {
        return Err(Error::PointMismatch);
    }
    let rho = &u.rep;
    let n = rho.group.matrix_size();
    let left = |c: &TangentCocycle, k: usize| -> CMat {
        let g = rho.generators[k].matrix();
        g * c.components[k].matrix() * g.adjoint()
    };
    // Value of a left cocycle on a letter.
    let on_letter = |c: &TangentCocycle, l: Letter| -> CMat {
        let x = left(c, l.0);
        if l.1 {
            let gi = rho.letter(l);
            -(&gi * x * gi.adjoint())
        } else {
            x
        }
    };
    let mut total = 0.0;
    let mut prefix = CMat::identity(n, n);
    let mut u_prefix = CMat::zeros(n, n);
    for l in relator_word(rho.genus) {
        let vx = on_letter(v, l);
        total += ab_pairing(&u_prefix, &(&prefix * vx * prefix.adjoint()));
        u_prefix += &prefix * on_letter(u, l) * prefix.adjoint();
        prefix *= rho.letter(l);
        if l.1 {
            let y = (l.0, false);
            let gy = rho.letter(y);
            total -= ab_pairing(&on_letter(u, y), &(&gy * on_letter(v, l) * gy.adjoint()));
        }
    }
    Ok(total)
}

/// `(1/4π²) ∫_c tr(a ∧ b)` for algebra-valued 1-forms on a surface chart.
pub fn atiyah_bott_direct(a: &FormField, b: &FormField, c: &Chain, q: &QuadratureSpec) -> Result<f64> {
    if a.degree() != 1 || b.degree() != 1 {
        return Err(Error::DegreeMismatch { form: a.degree().max(b.degree()), cell: 1 });
    }
    let w = a.wedge(b, BracketMode::PolynomialSlot)?.trace();
    Ok(integrate(&w, c, q)?[(0, 0)].re / (4.0 * PI * PI))
}

/// The commuting family `A_θ = Σ θ_i dx^i · H` on `Torus(n)`.
#[derive(Debug, Clone)]
pub struct FlatFamily {
    n: usize,
    group: GroupId,
    direction: CMat,
}

impl FlatFamily {
    pub fn new(n: usize, group: GroupId, direction: CMat) -> Result<Self> {
        ModelChart::torus(n)?;
        AlgebraElement::new(group, direction.clone())?;
        Ok(Self { n, group, direction })
    }

    /// `H = diag(i, −i)` in `SU(2)`.
    pub fn su2_torus(n: usize) -> Result<Self> {
        let z = C64::new(0.0, 0.0);
        Self::new(n, GroupId::SU(2), CMat::from_row_slice(2, 2, &[C64::i(), z, z, -C64::i()]))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn direction(&self) -> &CMat {
        &self.direction
    }

    pub fn family(&self) -> ConnectionFamily {
        ConnectionFamily::commuting(self.n, self.group, &self.direction).expect("validated dimension")
    }

    /// The constant 1-form `Σ v_i dx^i · H` tangent to the family.
    pub fn tangent(&self, v: &[f64]) -> Result<FormField> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch(format!("{} tangent coordinates on a {}-torus", v.len(), self.n)));
        }
        let vals: Vec<CMat> = v.iter().map(|c| &self.direction * C64::new(*c, 0.0)).collect();
        FormField::new(ModelChart::Torus(self.n), 1, ValueKind::Algebra(self.group), move |_| vals.clone())
    }
}

/// `∫_c p(𝔽)^{·, 2}` as a 2-form on the parameter chart.
pub fn family_symplectic_form(
    p: &InvariantPolynomial,
    fam: &ConnectionFamily,
    c: &Chain,
    q: &QuadratureSpec,
) -> Result<FormField> {
    let r = p.degree();
    if c.dim().is_some_and(|k| k + 2 != 2 * r) {
        return Err(Error::DimensionMismatch(format!("{:?}-chain, need {}", c.dim(), 2 * r - 2)));
    }
    let pf = family_char_form(p, fam, q);
    fiber_integrate(&pf.part(2 * r - 2, 2)?, c, q)
}

/// `μ_c(X) = −r ∫_c p(pr₁*X, 𝔽, …, 𝔽)` as a function on the parameters.
pub fn moment_map(
    p: &InvariantPolynomial,
    fam: &ConnectionFamily,
    c: &Chain,
    x: &FormField,
    q: &QuadratureSpec,
) -> Result<FormField> {
    let r = p.degree();
    match c.dim() {
        Some(k) if k + 2 == 2 * r => {}
        Some(k) => return Err(Error::DimensionMismatch(format!("{k}-chain, need {}", 2 * r - 2))),
        None => return Ok(FormField::zero(fam.params().clone(), 0, ValueKind::Scalar)),
    }
    if x.degree() != 0 || x.chart() != fam.base() {
        return Err(Error::DimensionMismatch("X must be a function on the base".into()));
    }
    if x.kind() != ValueKind::Algebra(fam.group()) {
        return Err(Error::KindMismatch(format!("{:?} generator for group {}", x.kind(), fam.group().name())));
    }
    let curv = family_curvature_bigrading(fam, q).total().clone();
    let nb = fam.base().dim();
    let n = curv.dim();
    let xf = x.clone();
    let p = *p;
    let integrand = FormField::new(fam.chart(), 2 * r - 2, ValueKind::Scalar, move |pt| {
        let xe = Ext::scalar_part(xf.eval(&pt[..nb])[0].clone());
        poly_linear(&p, &xe, &curv.ext(pt)).homogeneous(n, 2 * r - 2, 1, 1)
    })?;
    Ok(fiber_integrate(&integrand, c, q)?.scale(C64::new(-(r as f64), 0.0)))
}

/// Constant algebra-valued function on a chart.
pub fn constant_generator(chart: ModelChart, x: &AlgebraElement) -> FormField {
    let m = x.matrix().clone();
    FormField::new(chart, 0, ValueKind::Algebra(x.group()), move |_| vec![m.clone()]).expect("0-form")
}

/// Random constant generator, Gaussian in the algebra.
pub fn random_generator<R: Rng + ?Sized>(chart: ModelChart, group: GroupId, rng: &mut R) -> FormField {
    constant_generator(chart, &AlgebraElement::random(group, rng))
}
