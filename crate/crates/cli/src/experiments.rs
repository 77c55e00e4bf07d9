//! One runner per experiment kind. Each returns its fixed value columns and
//! a residual compared against the declared tolerance.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cstk::chernweil::*;
use cstk::connection::Connection;
use cstk::equivariant::*;
use cstk::forms::*;
use cstk::liealg::{GroupId, InvariantPolynomial, C64};
use cstk::moduli::*;
use cstk::prequantum::*;
use cstk::{Error, Result};

use crate::catalog;
use crate::config::{Config, ExperimentConfig, ExperimentKind};

/// Value columns reported for each kind, in CSV order.
pub fn columns(kind: ExperimentKind) -> &'static [&'static str] {
    match kind {
        ExperimentKind::CsAction => &["lambda", "lift", "path_deviation"],
        ExperimentKind::GaugeDefect => &["degree", "defect", "raw_shift", "degree_integral", "integer_residual"],
        ExperimentKind::FlatSearch => &["trials", "successes", "mean_iterations", "quantile_residual"],
        ExperimentKind::AbForm => &["direct", "equivariant", "oracle", "sign_flipped_gap"],
        ExperimentKind::MomentMap => &["samples", "max_abs_mu"],
        ExperimentKind::EquivariantCheck => &["samples", "intertwining_defect", "dc_squared"],
        ExperimentKind::Prequantum => &["corruption", "cocycle_deviation", "holonomy_gap"],
        ExperimentKind::Pillowcase => &["holonomy", "area", "gap"],
        ExperimentKind::HighDegreeFlatness => &["bounding", "homotopic", "potential_sup"],
    }
}

fn defaults(kind: ExperimentKind) -> ExperimentConfig {
    let mut d = ExperimentConfig::new("", kind);
    let s = |x: &str| Some(x.to_string());
    d.fd_step = Some(1e-5);
    match kind {
        ExperimentKind::CsAction => {
            d.group = s("SU2");
            d.polynomial = s("p2");
            d.family = s("torus3.su2_gauged");
            d.params = Some(vec![0.2, 0.4, -0.3]);
            d.samples = Some(10);
            d.quadrature_order = Some(12);
            d.tolerance = Some(1e-6);
        }
        ExperimentKind::GaugeDefect => {
            d.group = s("SU2");
            d.polynomial = s("p2");
            d.chart = s("cubes3");
            d.winding = s("cubes3.winding(1)");
            d.quadrature_order = Some(16);
            d.tolerance = Some(DEFECT_RESIDUAL_LIMIT);
        }
        ExperimentKind::FlatSearch => {
            d.group = s("SU2");
            d.genus = Some(1);
            d.trials = Some(20);
            d.min_success = Some(0.9);
            d.tolerance = Some(FLAT_TOLERANCE);
        }
        ExperimentKind::AbForm => {
            d.polynomial = s("p2");
            d.family = s("torus2.su2_flat");
            d.params = Some(vec![0.3, 0.4]);
            d.quadrature_order = Some(16);
            d.tolerance = Some(1e-6);
        }
        ExperimentKind::MomentMap => {
            d.polynomial = s("p2");
            d.family = s("torus2.su2_flat");
            d.samples = Some(10);
            d.quadrature_order = Some(8);
            d.tolerance = Some(1e-9);
        }
        ExperimentKind::EquivariantCheck => {
            d.bundle = s("torus3_over_torus2");
            d.samples = Some(4);
            d.quadrature_order = Some(16);
            d.tolerance = Some(1e-5);
        }
        ExperimentKind::Prequantum => {
            d.samples = Some(50);
            d.corruption = Some(0.0);
            d.tolerance = Some(1e-8);
        }
        ExperimentKind::Pillowcase => {
            d.polynomial = s("p2");
            d.square = Some([0.1, 0.1, 0.2]);
            d.quadrature_order = Some(8);
            d.tolerance = Some(1e-4);
        }
        ExperimentKind::HighDegreeFlatness => {
            d.polynomial = s("p3");
            d.family = s("torus4.su3_high_degree");
            d.square = Some([0.1, 0.2, 0.5]);
            d.quadrature_order = Some(6);
            d.tolerance = Some(1e-5);
        }
    }
    d
}

/// Fills unset fields from the top level of the config and then from the
/// kind's defaults. The result is what the report echoes.
pub fn resolve(e: &ExperimentConfig, cfg: &Config) -> ExperimentConfig {
    let d = defaults(e.kind);
    let mut r = e.clone();
    r.quadrature_order = r.quadrature_order.or(cfg.quadrature_order).or(d.quadrature_order);
    r.fd_step = r.fd_step.or(cfg.fd_step).or(d.fd_step);
    r.tolerance = r.tolerance.or(cfg.tolerance).or(d.tolerance);
    r.group = r.group.or(d.group);
    r.polynomial = r.polynomial.or(d.polynomial);
    r.family = r.family.or(d.family.clone());
    r.winding = r.winding.or(d.winding);
    r.bundle = r.bundle.or(d.bundle);
    r.genus = r.genus.or(d.genus);
    r.trials = r.trials.or(d.trials);
    r.min_success = r.min_success.or(d.min_success);
    r.samples = r.samples.or(d.samples);
    r.corruption = r.corruption.or(d.corruption);
    r.square = r.square.or(d.square);
    r.chart = r.chart.or(d.chart);
    if r.params.is_none() && d.params.is_some() {
        r.params = if r.family == d.family {
            d.params.clone()
        } else {
            r.family.as_deref().and_then(catalog::family).and_then(|f| f.ok()).map(|f| vec![0.2; f.params().dim()])
        };
    }
    if r.cycle.is_none() {
        let chart = match (&r.family, &r.chart) {
            (Some(f), _) => catalog::family(f).and_then(|f| f.ok()).map(|f| f.base().name()),
            (None, Some(c)) => Some(c.clone()),
            _ => None,
        };
        r.cycle = chart.map(|c| format!("{c}.fundamental"));
    }
    r
}

/// Independent generator for one experiment, derived from the run seed and
/// the experiment id.
pub fn substream(seed: u64, name: &str) -> ChaCha8Rng {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(h);
    rng
}

pub struct Measured {
    pub values: Vec<f64>,
    pub residual: f64,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

fn quadrature(r: &ExperimentConfig) -> Result<QuadratureSpec> {
    QuadratureSpec::new(r.quadrature_order.unwrap_or(16), r.fd_step.unwrap_or(1e-5))
}

fn polynomial(r: &ExperimentConfig) -> Result<InvariantPolynomial> {
    let name = r.polynomial.as_deref().ok_or_else(|| invalid("no polynomial"))?;
    let p = catalog::parse_polynomial(name).ok_or_else(|| invalid(format!("unknown polynomial '{name}'")))?;
    match r.normalization {
        Some([re, im]) => InvariantPolynomial::new(p.degree(), C64::new(re, im)),
        None => Ok(p),
    }
}

fn family(r: &ExperimentConfig) -> Result<ConnectionFamily> {
    let name = r.family.as_deref().ok_or_else(|| invalid("no family"))?;
    let fam = catalog::family(name).ok_or_else(|| invalid(format!("unknown family '{name}'")))??;
    if let Some(g) = r.group.as_deref().and_then(catalog::parse_group) {
        if g != fam.group() {
            return Err(Error::GroupMismatch(format!("family is {}, config says {}", fam.group().name(), g.name())));
        }
    }
    Ok(fam)
}

fn cycle(r: &ExperimentConfig) -> Result<Chain> {
    builtin_chain(r.cycle.as_deref().ok_or_else(|| invalid("no cycle"))?)
}

fn params(r: &ExperimentConfig, fam: &ConnectionFamily) -> Result<Vec<f64>> {
    let n = fam.params().dim();
    let p = r.params.clone().unwrap_or_else(|| vec![0.2; n]);
    if p.len() != n {
        return Err(Error::DimensionMismatch(format!("{} params for a {n}-parameter family", p.len())));
    }
    Ok(p)
}

fn require_group(r: &ExperimentConfig, want: GroupId) -> Result<()> {
    match r.group.as_deref().and_then(catalog::parse_group) {
        Some(g) if g != want => Err(Error::GroupMismatch(format!("{} experiment needs {}", r.kind.name(), want.name()))),
        _ => Ok(()),
    }
}

pub fn run(r: &ExperimentConfig, seed: u64) -> Result<Measured> {
    let mut rng = substream(seed, &r.id);
    let tol = r.tolerance.ok_or_else(|| invalid("no tolerance"))?;
    match r.kind {
        ExperimentKind::CsAction => run_cs_action(r),
        ExperimentKind::GaugeDefect => gauge_defect(r),
        ExperimentKind::FlatSearch => flat_search(r, tol, &mut rng),
        ExperimentKind::AbForm => ab_form(r),
        ExperimentKind::MomentMap => moment(r, &mut rng),
        ExperimentKind::EquivariantCheck => equivariant_check(r, &mut rng),
        ExperimentKind::Prequantum => prequantum(r, &mut rng),
        ExperimentKind::Pillowcase => pillowcase(r),
        ExperimentKind::HighDegreeFlatness => high_degree(r),
    }
}

fn run_cs_action(r: &ExperimentConfig) -> Result<Measured> {
    let fam = family(r)?;
    let q = quadrature(r)?;
    let a0 = Connection::zero(fam.base().clone(), fam.group());
    let spec = CSActionSpec::new(polynomial(r)?, a0, cycle(r)?)?.with_quadrature(q);
    let s = params(r, &fam)?;
    let a = fam.connection_at(&s)?;
    let lambda = cs_action(&spec, &a)?;
    let lift = cs_action_lift(&spec, &a)?;
    let n = r.samples.unwrap_or(10).max(2);
    let path: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let t = 0.1 * i as f64 / (n - 1) as f64;
            s.iter().enumerate().map(|(k, v)| v + if k % 2 == 0 { t } else { -t }).collect()
        })
        .collect();
    let dev = locally_constant_check(&spec, &fam, &path)?;
    Ok(Measured { values: vec![lambda.value(), lift.re, dev], residual: dev })
}

fn gauge_defect(r: &ExperimentConfig) -> Result<Measured> {
    require_group(r, GroupId::SU(2))?;
    let name = r.winding.as_deref().ok_or_else(|| invalid("no winding map"))?;
    let (d, g) = catalog::parse_winding(name).ok_or_else(|| invalid(format!("unknown winding map '{name}'")))?;
    let q = quadrature(r)?;
    let chain = cycle(r)?;
    let a0 = Connection::zero(ModelChart::CubeS3, GroupId::SU(2));
    let spec = CSActionSpec::new(polynomial(r)?, a0.clone(), chain.clone())?.with_quadrature(q);
    let gd = cs_gauge_defect_detailed(&spec, &a0, &g)?;
    let deg = degree_integral(&g, &chain, &q)?;
    let miss = (gd.defect.abs() - d.abs() as i64).abs() as f64;
    let residual = gd.residual.max((deg - d as f64).abs()).max(miss);
    Ok(Measured { values: vec![d as f64, gd.defect as f64, gd.raw, deg, gd.residual], residual })
}

fn flat_search<R: Rng>(r: &ExperimentConfig, tol: f64, rng: &mut R) -> Result<Measured> {
    let group = r.group.as_deref().and_then(catalog::parse_group).unwrap_or(GroupId::SU(2));
    let (genus, trials) = (r.genus.unwrap_or(1), r.trials.unwrap_or(20));
    let opts = FlatSearchOptions { tolerance: tol, ..Default::default() };
    let mut residuals = Vec::with_capacity(trials);
    let mut iters = 0usize;
    for _ in 0..trials {
        let seed = SurfaceGroupRep::random(genus, group, rng)?;
        match find_flat(&seed, &opts) {
            Ok(res) => {
                iters += res.iterations;
                residuals.push(res.residual);
            }
            Err(Error::NoConvergence { iterations, best }) => {
                iters += iterations;
                residuals.push(best);
            }
            Err(e) => return Err(e),
        }
    }
    let successes = residuals.iter().filter(|v| **v < tol).count();
    residuals.sort_by(f64::total_cmp);
    let k = ((r.min_success.unwrap_or(0.9) * trials as f64).ceil() as usize).clamp(1, trials);
    let quantile = residuals[k - 1];
    Ok(Measured {
        values: vec![trials as f64, successes as f64, iters as f64 / trials as f64, quantile],
        residual: quantile,
    })
}

fn ab_form(r: &ExperimentConfig) -> Result<Measured> {
    if r.family.as_deref() != Some("torus2.su2_flat") {
        return Err(invalid("ab-form needs the torus2.su2_flat family"));
    }
    let ff = FlatFamily::su2_torus(2)?;
    let q = quadrature(r)?;
    let chain = cycle(r)?;
    let direct = atiyah_bott_direct(&ff.tangent(&[1.0, 0.0])?, &ff.tangent(&[0.0, 1.0])?, &chain, &q)?;
    let s = params(r, &ff.family())?;
    let sigma = family_symplectic_form(&polynomial(r)?, &ff.family(), &chain, &q)?.eval_scalar(&s)[0].re;
    let oracle = -1.0 / (2.0 * PI * PI);
    Ok(Measured {
        values: vec![direct, sigma, oracle, (direct + sigma).abs()],
        residual: (direct - sigma).abs().max((direct - oracle).abs()),
    })
}

fn moment<R: Rng>(r: &ExperimentConfig, rng: &mut R) -> Result<Measured> {
    let fam = family(r)?;
    let q = quadrature(r)?;
    let p = polynomial(r)?;
    let chain = cycle(r)?;
    let n = r.samples.unwrap_or(10);
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let x = random_generator(fam.base().clone(), fam.group(), rng);
        let s: Vec<f64> = match &r.params {
            Some(s) => s.clone(),
            None => (0..fam.params().dim()).map(|_| rng.random_range(-1.0..1.0)).collect(),
        };
        let mu = moment_map(&p, &fam, &chain, &x, &q)?;
        worst = worst.max(mu.eval_scalar(&s)[0].norm());
    }
    Ok(Measured { values: vec![n as f64, worst], residual: worst })
}

fn invariant_one_form(b: ToyBundle, c: [f64; 3]) -> Result<FormField> {
    match b {
        ToyBundle::Hopf => FormField::scalar(b.total_chart(), 1, move |x| {
            vec![c[0] * x[0].sin(), c[1] * (2.0 * x[0]).cos() + 0.2, c[2] * x[0] * x[0]]
        }),
        ToyBundle::TorusBundle => FormField::scalar(b.total_chart(), 1, move |x| {
            vec![c[0] * (2.0 * PI * x[1]).sin(), c[1] * (2.0 * PI * x[0]).cos(), c[2] + 0.3 * (2.0 * PI * x[0]).sin()]
        }),
    }
}

fn invariant_function(b: ToyBundle, c: f64) -> Result<FormField> {
    match b {
        ToyBundle::Hopf => FormField::scalar(b.total_chart(), 0, move |x| vec![c * x[0].sin()]),
        ToyBundle::TorusBundle => {
            FormField::scalar(b.total_chart(), 0, move |x| vec![c * (2.0 * PI * x[0]).sin() * (2.0 * PI * x[1]).cos()])
        }
    }
}

fn equivariant_check<R: Rng>(r: &ExperimentConfig, rng: &mut R) -> Result<Measured> {
    let b = ToyBundle::parse(r.bundle.as_deref().unwrap_or("torus3_over_torus2"))?;
    let q = quadrature(r)?;
    let (base_pts, total_pts): (Vec<Vec<f64>>, Vec<Vec<f64>>) = match b {
        ToyBundle::Hopf => (vec![vec![0.4, 1.0], vec![0.9, 2.5], vec![1.2, 5.0]], vec![vec![0.5, 1.0, 2.0], vec![1.1, 4.0, 0.3]]),
        ToyBundle::TorusBundle => (
            vec![vec![0.1, 0.7], vec![0.45, 0.3], vec![0.8, 0.95]],
            vec![vec![0.1, 0.2, 0.3], vec![0.6, 0.5, 0.9], vec![0.3, 0.8, 0.1]],
        ),
    };
    let n = r.samples.unwrap_or(4);
    let (mut inter, mut dc2): (f64, f64) = (0.0, 0.0);
    for _ in 0..n {
        let c: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let alpha = EquivariantForm::new(b.action(), 1, vec![EquivariantTerm::new(vec![], invariant_one_form(b, c)?)])?;
        let lhs = chern_weil_map(&cartan_differential(&alpha, &q)?, b)?;
        let rhs = chern_weil_map(&alpha, b)?.exterior_derivative(&q)?;
        inter = inter.max(lhs.sub(&rhs)?.sup_norm(&base_pts));
        let beta = EquivariantForm::new(
            b.action(),
            2,
            vec![
                EquivariantTerm::new(vec![], b.curvature_form().scale(C64::new(c[1], 0.0))),
                EquivariantTerm::new(vec![0], invariant_function(b, c[0])?),
            ],
        )?;
        let twice = cartan_differential(&cartan_differential(&beta, &q)?, &q)?;
        dc2 = dc2.max(twice.sup_norm(&[c[2] * 2.0], &total_pts));
    }
    Ok(Measured { values: vec![n as f64, inter, dc2], residual: inter.max(dc2) })
}

fn prequantum<R: Rng>(r: &ExperimentConfig, rng: &mut R) -> Result<Measured> {
    let delta = r.corruption.unwrap_or(0.0);
    let mut data = PrequantumData::heisenberg();
    if delta != 0.0 {
        data = data.with_corrupted_character(delta);
    }
    let lift = build_lift(&data)?;
    let (mut pairs, mut points) = random_pairs(r.samples.unwrap_or(50), rng);
    pairs.push(([1, 0], [0, 1]));
    points.push([0.4, 0.2]);
    let coc = cocycle_check(&lift, &pairs, &points)?;
    let polys: [Vec<[f64; 2]>; 2] = [
        vec![[0.1, 0.1], [0.7, 0.2], [0.9, 0.8], [0.3, 0.6], [0.1, 0.1]],
        vec![[-1.0, -0.5], [1.2, -0.7], [1.3, 1.1], [-0.4, 1.4], [-1.0, -0.5]],
    ];
    let mut hol: f64 = 0.0;
    for poly in polys {
        let shoelace: f64 = poly.windows(2).map(|w| w[0][0] * w[1][1] - w[1][0] * w[0][1]).sum::<f64>() / 2.0;
        let h = prequantum_holonomy(&lift, &LiftedLoop::new(poly, [0, 0])?)?;
        hol = hol.max(h.distance(&ModZValue::new(shoelace)));
    }
    Ok(Measured { values: vec![delta, coc, hol], residual: coc.max(hol) })
}

fn pillowcase(r: &ExperimentConfig) -> Result<Measured> {
    let [x, y, side] = r.square.unwrap_or([0.1, 0.1, 0.2]);
    let (h, a) = pillowcase_experiment(&polynomial(r)?, &square([x, y], side), CORNER_MARGIN, &quadrature(r)?)?;
    let gap = h.distance(&ModZValue::new(a));
    Ok(Measured { values: vec![h.value(), a, gap], residual: gap })
}

fn high_degree(r: &ExperimentConfig) -> Result<Measured> {
    let fam = family(r)?;
    let [x, y, side] = r.square.unwrap_or([0.1, 0.2, 0.5]);
    let a = square([x, y], side);
    let b = vec![
        [x, y],
        [x + 1.2 * side, y - 0.2 * side],
        [x + side, y + 1.2 * side],
        [x, y + side],
        [x, y],
    ];
    let rep = flatness_for_high_degree(&polynomial(r)?, &fam, &cycle(r)?, &[a.clone()], &[(a, b)], &quadrature(r)?)?;
    Ok(Measured { values: vec![rep.bounding[0], rep.homotopic[0], rep.potential_sup], residual: rep.max_deviation() })
}
