//! The lifted action `α_φ = ∫_γ λ − χ(π∘γ)`, the holonomy of `ϑ − 2πiλ`, and
//! holonomy-versus-area experiments on flat-connection parameter spaces.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chernweil::{circle_distance, transgression_form, ModZValue, DEFAULT_T_NODES};
use crate::equivariant::{family_flatness, family_samples, ConnectionFamily, FAMILY_FLATNESS_TOLERANCE};
use crate::error::{Error, Result};
use crate::forms::{builtin_chain, fiber_integrate, integrate, Cell, Chain, FormField, ModelChart, QuadratureSpec};
use crate::liealg::{mat_exp, CMat, GroupId, InvariantPolynomial, C64};
use crate::moduli::{family_symplectic_form, FlatFamily};

/// `ℤ²` acting on the plane by integer translations.
pub type Deck = [i64; 2];

/// A path in `N` whose end is the deck image of its start, standing for a
/// loop in `N/ℤ²`.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedLoop {
    pub points: Vec<[f64; 2]>,
    pub deck: Deck,
}

impl LiftedLoop {
    pub fn new(points: Vec<[f64; 2]>, deck: Deck) -> Result<Self> {
        let (Some(first), Some(last)) = (points.first(), points.last()) else {
            return Err(Error::NonLiftable("empty path".into()));
        };
        let target = translate(deck, *first);
        let gap = ((last[0] - target[0]).powi(2) + (last[1] - target[1]).powi(2)).sqrt();
        if gap > 1e-12 {
            return Err(Error::NonLiftable(format!("path ends {gap:.3e} away from the deck image of its start")));
        }
        Ok(Self { points, deck })
    }

    /// Straight segment from `x` to `φx`.
    pub fn segment(x: [f64; 2], deck: Deck) -> Self {
        Self { points: vec![x, translate(deck, x)], deck }
    }

    pub fn start(&self) -> [f64; 2] {
        self.points[0]
    }
}

pub fn translate(deck: Deck, x: [f64; 2]) -> [f64; 2] {
    [x[0] + deck[0] as f64, x[1] + deck[1] as f64]
}

/// Reference character on loops of `N/ℤ²`.
pub type Character = Arc<dyn Fn(&LiftedLoop) -> f64 + Send + Sync>;

/// `(N, ℤ², λ, χ, ω)` with `N = R²`.
#[derive(Clone)]
pub struct PrequantumData {
    pub lambda: FormField,
    pub omega: FormField,
    pub chi: Character,
    pub quadrature: QuadratureSpec,
}

impl std::fmt::Debug for PrequantumData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "PrequantumData(λ on {})", self.lambda.chart())
    }
}

/// Signed-area character of curvature `c·dx∧dy` with holonomies `h_a`, `h_b`
/// on the loops `t ↦ (t, 0)` and `t ↦ (0, t)`:
/// `χ = ½∮(x dy − y dx) + ½det(P, v) + mn/2` scaled by `c`, plus `m h_a + n h_b`.
pub fn area_character(c: f64, h_a: f64, h_b: f64) -> Character {
    Arc::new(move |l: &LiftedLoop| {
        let p = l.start();
        let (m, n) = (l.deck[0] as f64, l.deck[1] as f64);
        let shoelace: f64 = l.points.windows(2).map(|w| w[0][0] * w[1][1] - w[0][1] * w[1][0]).sum::<f64>() / 2.0;
        c * (shoelace + 0.5 * (p[0] * n - p[1] * m) + 0.5 * m * n) + m * h_a + n * h_b
    })
}

impl PrequantumData {
    /// `λ = x dy`, `ω = dx ∧ dy`, `χ` the area character with zero holonomy
    /// on both fundamental cycles.
    pub fn heisenberg() -> Self {
        Self::heisenberg_with(0.0, 0.0)
    }

    pub fn heisenberg_with(h_a: f64, h_b: f64) -> Self {
        let chart = ModelChart::Euclidean(2);
        Self {
            lambda: FormField::scalar(chart.clone(), 1, |x| vec![0.0, x[0]]).expect("1-form"),
            omega: FormField::scalar(chart, 2, |_| vec![1.0]).expect("2-form"),
            chi: area_character(1.0, h_a, h_b),
            quadrature: QuadratureSpec::default(),
        }
    }

    /// Same data with `λ + df`.
    pub fn with_exact_shift(&self, df: &FormField) -> Result<Self> {
        Ok(Self { lambda: self.lambda.add(df)?, ..self.clone() })
    }

    /// Same data with `χ` shifted by `delta` on loops of class `(1, 0)` only.
    pub fn with_corrupted_character(&self, delta: f64) -> Self {
        let chi = self.chi.clone();
        Self {
            chi: Arc::new(move |l: &LiftedLoop| chi(l) + if l.deck == [1, 0] { delta } else { 0.0 }),
            ..self.clone()
        }
    }
}

pub const HYPOTHESIS_TOLERANCE: f64 = 1e-8;

/// `α_φ(x) = ∫_γ λ − χ(π∘γ)` along straight segments.
#[derive(Debug, Clone)]
pub struct LiftedAction {
    data: PrequantumData,
}

fn path_integral(lambda: &FormField, points: &[[f64; 2]], q: &QuadratureSpec) -> Result<f64> {
    Ok(integrate(lambda, &polyline_chain(ModelChart::Euclidean(2), points), q)?[(0, 0)].re)
}

/// Piecewise-linear path as a chain of affine 1-cells.
pub fn polyline_chain(chart: ModelChart, points: &[[f64; 2]]) -> Chain {
    let cells = points
        .windows(2)
        .map(|w| Cell::affine(w[0].to_vec(), vec![vec![w[1][0] - w[0][0], w[1][1] - w[0][1]]]))
        .collect();
    Chain::new(chart, cells)
}

/// Fan of triangles from the first vertex, spanning a closed polygon.
pub fn polygon_span(chart: ModelChart, points: &[[f64; 2]]) -> Chain {
    let v0 = points[0];
    let cells = points
        .windows(2)
        .skip(1)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let map = move |t: &[f64]| {
                vec![
                    v0[0] + t[0] * (a[0] - v0[0] + t[1] * (b[0] - a[0])),
                    v0[1] + t[0] * (a[1] - v0[1] + t[1] * (b[1] - a[1])),
                ]
            };
            let jac = move |t: &[f64]| {
                DMatrix::from_row_slice(
                    2,
                    2,
                    &[
                        a[0] - v0[0] + t[1] * (b[0] - a[0]),
                        t[0] * (b[0] - a[0]),
                        a[1] - v0[1] + t[1] * (b[1] - a[1]),
                        t[0] * (b[1] - a[1]),
                    ],
                )
            };
            Cell::general_with_jacobian(2, Arc::new(map), Arc::new(jac))
        })
        .collect();
    Chain::new(chart, cells)
}

/// Checks `dλ = π*ω` and returns the lifted action.
pub fn build_lift(data: &PrequantumData) -> Result<LiftedAction> {
    let chart = data.lambda.chart().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(0x11f7);
    let points: Vec<Vec<f64>> = (0..50).map(|_| chart.sample_point(&mut rng)).collect();
    let defect = data.lambda.exterior_derivative(&data.quadrature)?.sub(&data.omega)?.sup_norm(&points);
    if defect > HYPOTHESIS_TOLERANCE {
        return Err(Error::HypothesisViolated { defect });
    }
    Ok(LiftedAction { data: data.clone() })
}

impl LiftedAction {
    pub fn data(&self) -> &PrequantumData {
        &self.data
    }

    pub fn alpha(&self, phi: Deck, x: [f64; 2]) -> Result<ModZValue> {
        self.alpha_along(&LiftedLoop::segment(x, phi))
    }

    /// `α_φ(x)` with an explicit connecting path from `x` to `φx`.
    pub fn alpha_along(&self, path: &LiftedLoop) -> Result<ModZValue> {
        let v = path_integral(&self.data.lambda, &path.points, &self.data.quadrature)? - (self.data.chi)(path);
        Ok(ModZValue::new(v))
    }
}

/// `max dist(α_{φψ}(x), α_φ(ψx) + α_ψ(x))` on the circle.
pub fn cocycle_check(lift: &LiftedAction, pairs: &[(Deck, Deck)], points: &[[f64; 2]]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &(phi, psi) in pairs {
        for &x in points {
            let lhs = lift.alpha([phi[0] + psi[0], phi[1] + psi[1]], x)?;
            let rhs = lift.alpha(phi, translate(psi, x))? + lift.alpha(psi, x)?;
            worst = worst.max(lhs.distance(&rhs));
        }
    }
    Ok(worst)
}

/// `(∫_{lift} λ − α_φ(start)) mod 1` with `φ` the deck element closing the lift.
pub fn prequantum_holonomy(lift: &LiftedAction, l: &LiftedLoop) -> Result<ModZValue> {
    LiftedLoop::new(l.points.clone(), l.deck)?;
    let v = path_integral(&lift.data.lambda, &l.points, &lift.data.quadrature)?;
    Ok(ModZValue::new(v) - lift.alpha(l.deck, l.start())?)
}

/// Random deck pairs and points for cocycle sweeps.
pub fn random_pairs<R: Rng + ?Sized>(count: usize, rng: &mut R) -> (Vec<(Deck, Deck)>, Vec<[f64; 2]>) {
    let mut d = || [rng.random_range(-3..=3), rng.random_range(-3..=3)];
    let pairs: Vec<(Deck, Deck)> = (0..count).map(|_| (d(), d())).collect();
    let points = (0..count).map(|_| [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)]).collect();
    (pairs, points)
}

/// `λ_c = ∫_c Tp(𝔸, 0)` on the parameter chart of a family.
pub fn family_potential(
    p: &InvariantPolynomial,
    fam: &ConnectionFamily,
    c: &Chain,
    t_nodes: usize,
    q: &QuadratureSpec,
) -> Result<FormField> {
    let zero = FormField::zero(fam.chart(), 1, fam.form().kind());
    let tp = transgression_form(p, fam.form(), &zero, t_nodes, q)?;
    fiber_integrate(&tp, c, q)
}

/// `∫_loop λ mod 1`.
pub fn loop_holonomy(lambda: &FormField, lp: &Chain, q: &QuadratureSpec) -> Result<ModZValue> {
    Ok(ModZValue::new(integrate(lambda, lp, q)?[(0, 0)].re))
}

/// Distance from a segment to the nearest point of `πℤ²`.
fn segment_corner_distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    let lo = |i: usize| (a[i].min(b[i]) / PI).floor() as i64 - 1;
    let hi = |i: usize| (a[i].max(b[i]) / PI).ceil() as i64 + 1;
    let mut best = f64::INFINITY;
    for i in lo(0)..=hi(0) {
        for j in lo(1)..=hi(1) {
            let c = [i as f64 * PI, j as f64 * PI];
            let d = [b[0] - a[0], b[1] - a[1]];
            let len2 = d[0] * d[0] + d[1] * d[1];
            let t = if len2 == 0.0 { 0.0 } else { (((c[0] - a[0]) * d[0] + (c[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0) };
            let e = [a[0] + t * d[0] - c[0], a[1] + t * d[1] - c[1]];
            best = best.min((e[0] * e[0] + e[1] * e[1]).sqrt());
        }
    }
    best
}

pub const CORNER_MARGIN: f64 = 0.05;

/// The pillowcase model: the SU(2) commuting family on `T²` with `ρ_c` and
/// `σ_c` precomputed as lazy forms on the `(u, v)` parameter plane.
#[derive(Debug, Clone)]
pub struct Pillowcase {
    pub lambda: FormField,
    pub sigma: FormField,
    pub margin: f64,
    pub quadrature: QuadratureSpec,
}

impl Pillowcase {
    pub fn new(p: &InvariantPolynomial, margin: f64, q: &QuadratureSpec) -> Result<Self> {
        if p.degree() != 2 {
            return Err(Error::InvalidArgument(format!("pillowcase needs r = 2, got {}", p.degree())));
        }
        let fam = FlatFamily::su2_torus(2)?.family();
        let c = builtin_chain("torus2.fundamental")?;
        Ok(Self {
            lambda: family_potential(p, &fam, &c, DEFAULT_T_NODES, q)?,
            sigma: family_symplectic_form(p, &fam, &c, q)?,
            margin,
            quadrature: *q,
        })
    }

    fn check_corners(&self, polygon: &[[f64; 2]]) -> Result<()> {
        for w in polygon.windows(2) {
            let d = segment_corner_distance(w[0], w[1]);
            if d < self.margin {
                return Err(Error::CornerTooClose { distance: d, margin: self.margin });
            }
        }
        Ok(())
    }

    /// Holonomy of `ϑ − 2πiρ_c` around closed polygons (all contributions summed).
    pub fn holonomy(&self, polygons: &[Vec<[f64; 2]>]) -> Result<ModZValue> {
        let mut total = ModZValue::zero();
        for poly in polygons {
            self.check_corners(poly)?;
            let lp = polyline_chain(ModelChart::Euclidean(2), poly);
            total = total + loop_holonomy(&self.lambda, &lp, &self.quadrature)?;
        }
        Ok(total)
    }

    /// `∫ σ_c` over fans spanning the polygons.
    pub fn area(&self, polygons: &[Vec<[f64; 2]>]) -> Result<f64> {
        let mut total = 0.0;
        for poly in polygons {
            if poly.len() >= 3 {
                let span = polygon_span(ModelChart::Euclidean(2), poly);
                total += integrate(&self.sigma, &span, &self.quadrature)?[(0, 0)].re;
            }
        }
        Ok(total)
    }
}

/// `(holonomy, σ_c-area)` for a closed polygon in the `(u, v)` plane.
pub fn pillowcase_experiment(
    p: &InvariantPolynomial,
    polygon: &[[f64; 2]],
    margin: f64,
    q: &QuadratureSpec,
) -> Result<(ModZValue, f64)> {
    let pc = Pillowcase::new(p, margin, q)?;
    let polys = vec![polygon.to_vec()];
    Ok((pc.holonomy(&polys)?, pc.area(&polys)?))
}

/// Counter-clockwise closed square `[lo, hi]²`.
pub fn square(lo: [f64; 2], side: f64) -> Vec<[f64; 2]> {
    let [x, y] = lo;
    vec![[x, y], [x + side, y], [x + side, y + side], [x, y + side], [x, y]]
}

/// A flat SU(3) family on `T⁴`: the commuting family
/// `(u dx¹ + c₃ dx³)·H₁ + (v dx² + c₄ dx⁴)·H₂` with `H₁ = diag(i, i, −2i)`,
/// `H₂ = diag(i, −i, 0)`, gauge transformed by `g = exp(φ(x, u, v) K)` with
/// `K` not commuting with either.
pub fn high_degree_family() -> Result<ConnectionFamily> {
    let z = C64::new(0.0, 0.0);
    let i = C64::i();
    let h1 = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![i, i, -i * 2.0]));
    let h2 = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![i, -i, z]));
    let o = C64::new(1.0, 0.0);
    let k = CMat::from_row_slice(3, 3, &[z, i, o, i, z, i * 0.5, -o, i * 0.5, z]);
    let tau = 2.0 * PI;
    // φ = 0.3(1+u) sin τx¹ + 0.2 cos τx³ + 0.4 v sin τx⁴ with gradient and
    // Hessian over (x¹, x², x³, x⁴, u, v).
    let phi = move |x: &[f64], s: &[f64]| {
        let (s1, c1) = (tau * x[0]).sin_cos();
        let (s3, c3) = (tau * x[2]).sin_cos();
        let (s4, c4) = (tau * x[3]).sin_cos();
        let v = 0.3 * (1.0 + s[0]) * s1 + 0.2 * c3 + 0.4 * s[1] * s4;
        let g = [0.3 * (1.0 + s[0]) * tau * c1, 0.0, -0.2 * tau * s3, 0.4 * s[1] * tau * c4, 0.3 * s1, 0.4 * s4];
        let mut hs = [[0.0; 6]; 6];
        hs[0][0] = -0.3 * (1.0 + s[0]) * tau * tau * s1;
        hs[0][4] = 0.3 * tau * c1;
        hs[2][2] = -0.2 * tau * tau * c3;
        hs[3][3] = -0.4 * s[1] * tau * tau * s4;
        hs[3][5] = 0.4 * tau * c4;
        hs[4][0] = hs[0][4];
        hs[5][3] = hs[3][5];
        (v, g, hs)
    };
    let kk = k.clone();
    let setup = Arc::new(move |x: &[f64], s: &[f64]| {
        let (v, g, hs) = phi(x, s);
        let gm = mat_exp(&(&kk * C64::new(v, 0.0)));
        let gi = gm.adjoint();
        let conj = [&gi * &h1 * &gm, &gi * &h2 * &gm];
        (conj, [s[0], s[1], 0.4, -0.7], g, hs)
    });
    let (k1, setup1) = (k.clone(), setup.clone());
    let f = move |x: &[f64], s: &[f64]| -> Vec<CMat> {
        let (conj, a, g, _) = setup1(x, s);
        (0..4).map(|j| &conj[j % 2] * C64::new(a[j], 0.0) + &k1 * C64::new(g[j], 0.0)).collect()
    };
    let d = move |x: &[f64], s: &[f64], axis: usize| -> Vec<CMat> {
        let (conj, a, g, hs) = setup(x, s);
        // ∂(g⁻¹Hg) = ∂φ [g⁻¹Hg, K]
        let br = conj.clone().map(|c| (&c * &k - &k * &c) * C64::new(g[axis], 0.0));
        (0..4)
            .map(|j| {
                let mut m = &br[j % 2] * C64::new(a[j], 0.0) + &k * C64::new(hs[axis][j], 0.0);
                if axis == 4 + j {
                    m += &conj[j % 2];
                }
                m
            })
            .collect()
    };
    ConnectionFamily::with_partials(
        ModelChart::Torus(4),
        ModelChart::Euclidean(2),
        GroupId::SU(3),
        Arc::new(f),
        Arc::new(d),
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct HighDegreeReport {
    /// Circle distance of each bounding loop's holonomy from 0.
    pub bounding: Vec<f64>,
    /// Circle distance between the holonomies of each homotopic pair.
    pub homotopic: Vec<f64>,
    /// Largest component of `ρ_c` seen at the loop vertices.
    pub potential_sup: f64,
}

impl HighDegreeReport {
    pub fn max_deviation(&self) -> f64 {
        self.bounding.iter().chain(&self.homotopic).copied().fold(0.0, f64::max)
    }
}

/// Holonomy of `ρ_c` for `r ≥ 3` on a flat family: bounding polygons and
/// pairs of homotopic polygons in the parameter plane.
pub fn flatness_for_high_degree(
    p: &InvariantPolynomial,
    fam: &ConnectionFamily,
    c: &Chain,
    bounding: &[Vec<[f64; 2]>],
    homotopic: &[(Vec<[f64; 2]>, Vec<[f64; 2]>)],
    q: &QuadratureSpec,
) -> Result<HighDegreeReport> {
    let points = family_samples(fam, 20, 0x3d);
    let sup = family_flatness(fam, &points, q);
    if sup >= FAMILY_FLATNESS_TOLERANCE {
        return Err(Error::NotFlat { sup });
    }
    if fam.params().dim() != 2 {
        return Err(Error::DimensionMismatch("loops live in a 2-parameter family".into()));
    }
    let vertices: Vec<Vec<f64>> = bounding
        .iter()
        .chain(homotopic.iter().flat_map(|(a, b)| [a, b]))
        .flatten()
        .map(|v| v.to_vec())
        .collect();
    let lambda = family_potential(p, fam, c, DEFAULT_T_NODES, q)?;
    let hol = |poly: &[[f64; 2]]| loop_holonomy(&lambda, &polyline_chain(fam.params().clone(), poly), q);
    let bounding = bounding.iter().map(|b| Ok(hol(b)?.distance(&ModZValue::zero()))).collect::<Result<Vec<_>>>()?;
    let homotopic = homotopic
        .iter()
        .map(|(a, b)| Ok(circle_distance(hol(a)?.value(), hol(b)?.value())))
        .collect::<Result<Vec<_>>>()?;
    let potential_sup = lambda.sup_norm(&vertices);
    Ok(HighDegreeReport { bounding, homotopic, potential_sup })
}
