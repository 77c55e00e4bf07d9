//! Parametrized cubical chains, boundary, integration and fiber integration.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::chart::ModelChart;
use super::exterior::{binomial, from_mask, mask_position, masks, multi_indices, to_mask};
use super::field::{fd_jacobian, minor_det, FormField, MatrixField, PointMap};
use super::quadrature::{gauss_legendre, QuadratureSpec};
use crate::error::{Error, Result};
use crate::liealg::{CMat, C64};

const JACOBIAN_STEP: f64 = 1e-6;
const CHUNK: usize = 512;

#[derive(Clone)]
pub enum CellMap {
    /// `t -> origin + Σ t_i edges[i]` (exact Jacobian).
    Affine { origin: Vec<f64>, edges: Vec<Vec<f64>> },
    /// Arbitrary smooth map from `[0,1]^k`, Jacobian analytic or by differences.
    General { map: PointMap, jacobian: Option<MatrixField> },
}

#[derive(Clone)]
pub struct Cell {
    map: CellMap,
    dim: usize,
    sign: f64,
    order: Option<usize>,
}

impl std::fmt::Debug for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let kind = match &self.map {
            CellMap::Affine { origin, edges } => format!("affine at {origin:?} with edges {edges:?}"),
            CellMap::General { .. } => "general".to_string(),
        };
        write!(f, "Cell({}; dim {}, sign {}, order {:?})", kind, self.dim, self.sign, self.order)
    }
}

impl Cell {
    pub fn affine(origin: Vec<f64>, edges: Vec<Vec<f64>>) -> Self {
        let dim = edges.len();
        Cell { map: CellMap::Affine { origin, edges }, dim, sign: 1.0, order: None }
    }

    pub fn point(x: Vec<f64>) -> Self {
        Cell::affine(x, vec![])
    }

    /// Axis-aligned box `[lo_i, hi_i]` over the listed axes of an
    /// `n`-dimensional chart, other coordinates fixed at `base`.
    pub fn axis_box(base: Vec<f64>, axes: &[(usize, f64, f64)]) -> Self {
        let n = base.len();
        let mut origin = base;
        let mut edges = Vec::new();
        for &(axis, lo, hi) in axes {
            origin[axis] = lo;
            let mut e = vec![0.0; n];
            e[axis] = hi - lo;
            edges.push(e);
        }
        Cell::affine(origin, edges)
    }

    pub fn general(dim: usize, map: PointMap) -> Self {
        Cell { map: CellMap::General { map, jacobian: None }, dim, sign: 1.0, order: None }
    }

    pub fn general_with_jacobian(dim: usize, map: PointMap, jacobian: MatrixField) -> Self {
        Cell { map: CellMap::General { map, jacobian: Some(jacobian) }, dim, sign: 1.0, order: None }
    }

    pub fn with_sign(mut self, sign: f64) -> Self {
        self.sign = sign;
        self
    }

    pub fn with_order(mut self, order: usize) -> Self {
        self.order = Some(order);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sign(&self) -> f64 {
        self.sign
    }

    pub fn order(&self) -> Option<usize> {
        self.order
    }

    pub fn map(&self) -> &CellMap {
        &self.map
    }

    pub fn eval(&self, t: &[f64]) -> Vec<f64> {
        match &self.map {
            CellMap::Affine { origin, edges } => {
                let mut x = origin.clone();
                for (ti, e) in t.iter().zip(edges) {
                    for (xi, ei) in x.iter_mut().zip(e) {
                        *xi += ti * ei;
                    }
                }
                x
            }
            CellMap::General { map, .. } => map(t),
        }
    }

    /// Jacobian (target dimension x cell dimension) at `t`.
    pub fn jacobian(&self, t: &[f64], target_dim: usize) -> DMatrix<f64> {
        match &self.map {
            CellMap::Affine { edges, .. } => DMatrix::from_fn(target_dim, self.dim, |i, j| edges[j][i]),
            CellMap::General { map, jacobian } => match jacobian {
                Some(j) => j(t),
                None => fd_jacobian(&**map, t, self.dim, target_dim, JACOBIAN_STEP),
            },
        }
    }

    /// Face `t_i = c`.
    pub fn face(&self, i: usize, c: f64) -> Cell {
        let map = match &self.map {
            CellMap::Affine { origin, edges } => {
                let mut o = origin.clone();
                for (oi, ei) in o.iter_mut().zip(&edges[i]) {
                    *oi += c * ei;
                }
                let es = edges.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, e)| e.clone()).collect();
                CellMap::Affine { origin: o, edges: es }
            }
            CellMap::General { map, jacobian } => {
                let insert = move |t: &[f64]| {
                    let mut full = t.to_vec();
                    full.insert(i, c);
                    full
                };
                let m = map.clone();
                let new_map: PointMap = Arc::new(move |t| m(&insert(t)));
                let new_jac = jacobian.clone().map(|j| {
                    Arc::new(move |t: &[f64]| {
                        let full = j(&insert(t));
                        full.remove_column(i)
                    }) as MatrixField
                });
                CellMap::General { map: new_map, jacobian: new_jac }
            }
        };
        Cell { map, dim: self.dim - 1, sign: self.sign, order: self.order }
    }
}

#[derive(Clone, Debug)]
pub struct Chain {
    chart: ModelChart,
    cells: Vec<Cell>,
}

impl Chain {
    pub fn new(chart: ModelChart, cells: Vec<Cell>) -> Self {
        Chain { chart, cells }
    }

    pub fn empty(chart: ModelChart) -> Self {
        Chain { chart, cells: vec![] }
    }

    pub fn chart(&self) -> &ModelChart {
        &self.chart
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Dimension of the cells (`None` for the empty chain).
    pub fn dim(&self) -> Option<usize> {
        self.cells.first().map(|c| c.dim)
    }

    pub fn push(&mut self, cell: Cell) {
        self.cells.push(cell);
    }

    pub fn neg(&self) -> Chain {
        Chain {
            chart: self.chart.clone(),
            cells: self.cells.iter().map(|c| c.clone().with_sign(-c.sign)).collect(),
        }
    }

    pub fn concat(&self, other: &Chain) -> Result<Chain> {
        if self.chart != other.chart {
            return Err(Error::ChartMismatch);
        }
        let mut cells = self.cells.clone();
        cells.extend(other.cells.iter().cloned());
        Ok(Chain { chart: self.chart.clone(), cells })
    }

    pub fn with_order(&self, order: usize) -> Chain {
        Chain {
            chart: self.chart.clone(),
            cells: self.cells.iter().map(|c| c.clone().with_order(order)).collect(),
        }
    }

    /// `∂ = Σ_i (-1)^i (face_{t_i = 1} - face_{t_i = 0})`.
    pub fn boundary(&self) -> Chain {
        let mut cells = Vec::new();
        for c in &self.cells {
            for i in 0..c.dim {
                let s = if i % 2 == 0 { 1.0 } else { -1.0 };
                cells.push(c.face(i, 1.0).with_sign(c.sign * s));
                cells.push(c.face(i, 0.0).with_sign(-c.sign * s));
            }
        }
        Chain { chart: self.chart.clone(), cells }
    }

    /// Smallest singular value of the cell Jacobians over quadrature nodes.
    pub fn min_jacobian_singular_value(&self, order: usize) -> f64 {
        let n = self.chart.dim();
        let mut worst = f64::INFINITY;
        for c in &self.cells {
            if c.dim == 0 {
                continue;
            }
            for (t, _) in tensor_nodes(c.dim, order) {
                let j = c.jacobian(&t, n);
                let sv = j.svd(false, false).singular_values;
                worst = worst.min(sv.iter().copied().fold(f64::INFINITY, f64::min));
            }
        }
        worst
    }

    /// Checks that every cell is an immersion at the quadrature nodes.
    pub fn check_immersion(&self, order: usize) -> Result<()> {
        let s = self.min_jacobian_singular_value(order);
        if s > 1e-10 {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("cell Jacobian is rank deficient (σ_min = {s:.3e})")))
        }
    }
}

/// Tensor-product Gauss-Legendre nodes on `[0,1]^k` with weights.
pub fn tensor_nodes(k: usize, order: usize) -> Vec<(Vec<f64>, f64)> {
    let (x, w) = gauss_legendre(order);
    let total = order.pow(k as u32);
    (0..total)
        .map(|mut flat| {
            let mut t = vec![0.0; k];
            let mut weight = 1.0;
            for slot in t.iter_mut() {
                let i = flat % order;
                flat /= order;
                *slot = x[i];
                weight *= w[i];
            }
            (t, weight)
        })
        .collect()
}

/// Pull-back density `Σ_I ω_I det(J[I, :])` of a k-form on a k-cell.
fn pulled_back(values: &[CMat], idx: &[Vec<usize>], j: &DMatrix<f64>, s: usize) -> CMat {
    let cols: Vec<usize> = (0..j.ncols()).collect();
    let mut acc = CMat::zeros(s, s);
    for (ii, v) in idx.iter().zip(values) {
        let d = minor_det(j, ii, &cols);
        if d != 0.0 {
            acc += v * C64::new(d, 0.0);
        }
    }
    acc
}

fn cell_integral(omega: &FormField, cell: &Cell, order: usize, idx: &[Vec<usize>]) -> CMat {
    let s = omega.kind().size();
    let n = omega.dim();
    if cell.dim == 0 {
        return omega.eval(&cell.eval(&[]))[0].clone() * C64::new(cell.sign, 0.0);
    }
    let nodes = tensor_nodes(cell.dim, order);
    let partial: Vec<CMat> = nodes
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut acc = CMat::zeros(s, s);
            for (t, w) in chunk {
                let x = cell.eval(t);
                let j = cell.jacobian(t, n);
                acc += pulled_back(&omega.eval(&x), idx, &j, s) * C64::new(*w, 0.0);
            }
            acc
        })
        .collect();
    let mut total = CMat::zeros(s, s);
    for p in partial {
        total += p;
    }
    total * C64::new(cell.sign, 0.0)
}

/// `∫_σ ω`, summed over oriented cells. Values are 1 x 1 for scalar forms.
pub fn integrate(omega: &FormField, chain: &Chain, q: &QuadratureSpec) -> Result<CMat> {
    if omega.chart() != chain.chart() {
        return Err(Error::ChartMismatch);
    }
    let s = omega.kind().size();
    let mut total = CMat::zeros(s, s);
    let idx = multi_indices(omega.dim(), omega.degree());
    for cell in chain.cells() {
        if cell.dim != omega.degree() {
            return Err(Error::DegreeMismatch { form: omega.degree(), cell: cell.dim });
        }
        total += cell_integral(omega, cell, cell.order.unwrap_or(q.order()), &idx);
    }
    Ok(total)
}

/// Integral of a scalar form.
pub fn integrate_scalar(omega: &FormField, chain: &Chain, q: &QuadratureSpec) -> Result<C64> {
    let m = integrate(omega, chain, q)?;
    if m.nrows() != 1 {
        return Err(Error::KindMismatch("integrate_scalar on a matrix-valued form".into()));
    }
    Ok(m[(0, 0)])
}

/// Integration along the first factor of a product chart: for a component
/// `f dx^I ∧ ds^J` with `|I| = dim(cells)`, returns
/// `(-1)^{|I||J|} (∫_c f dx^I) ds^J` as a form on the parameter chart.
pub fn fiber_integrate(omega: &FormField, chain: &Chain, q: &QuadratureSpec) -> Result<FormField> {
    let (base, params) = match omega.chart() {
        ModelChart::Product(a, b) => ((**a).clone(), (**b).clone()),
        _ => return Err(Error::ChartMismatch),
    };
    if chain.chart() != &base {
        return Err(Error::ChartMismatch);
    }
    let m = match chain.dim() {
        Some(m) => m,
        None => return Ok(FormField::zero(params, omega.degree(), omega.kind())),
    };
    if chain.cells().iter().any(|c| c.dim != m) || omega.degree() < m {
        return Err(Error::DegreeMismatch { form: omega.degree(), cell: m });
    }
    let nb = base.dim();
    let np = params.dim();
    let n = nb + np;
    let j = omega.degree() - m;
    if j > np {
        return Err(Error::DegreeMismatch { form: omega.degree(), cell: m });
    }
    let base_idx = multi_indices(nb, m);
    // For each output J: list of (input component position, base multi-index slot).
    let table: Vec<Vec<(usize, usize)>> = masks(np, j)
        .into_iter()
        .map(|pm| {
            base_idx
                .iter()
                .enumerate()
                .map(|(slot, bi)| {
                    let mut mask = to_mask(bi);
                    for a in from_mask(pm) {
                        mask |= 1 << (nb + a);
                    }
                    (mask_position(n, mask), slot)
                })
                .collect()
        })
        .collect();
    let sign = if (m * j) % 2 == 0 { 1.0 } else { -1.0 };
    let s = omega.kind().size();
    let eval = omega.evaluator();
    let cells: Vec<(Cell, usize)> =
        chain.cells().iter().map(|c| (c.clone(), c.order.unwrap_or(q.order()))).collect();
    let count = binomial(np, j);
    let node_cache: Vec<Vec<(Vec<f64>, f64)>> = cells.iter().map(|(c, o)| tensor_nodes(c.dim, *o)).collect();
    let cols: Vec<usize> = (0..m).collect();
    FormField::from_evaluator(
        params,
        j,
        omega.kind(),
        Arc::new(move |sv: &[f64]| {
            let mut out = vec![CMat::zeros(s, s); count];
            for ((cell, _), nodes) in cells.iter().zip(&node_cache) {
                for (t, w) in nodes {
                    let mut x = cell.eval(t);
                    let jac = cell.jacobian(t, nb);
                    let dets: Vec<f64> = base_idx.iter().map(|bi| minor_det(&jac, bi, &cols)).collect();
                    x.extend_from_slice(sv);
                    let vals = eval(&x);
                    let wt = w * cell.sign * sign;
                    for (o, terms) in out.iter_mut().zip(&table) {
                        for &(pos, slot) in terms {
                            if dets[slot] != 0.0 {
                                *o += &vals[pos] * C64::new(wt * dets[slot], 0.0);
                            }
                        }
                    }
                }
            }
            out
        }),
    )
}

fn torus_box(n: usize, axes: &[usize]) -> Cell {
    Cell::axis_box(vec![0.0; n], &axes.iter().map(|&a| (a, 0.0, 1.0)).collect::<Vec<_>>())
}

/// `[0,1]^3` subdivided into `subdiv^3` congruent cells.
pub fn cube_chain(subdiv: usize) -> Chain {
    let h = 1.0 / subdiv as f64;
    let mut cells = Vec::new();
    for i in 0..subdiv {
        for j in 0..subdiv {
            for k in 0..subdiv {
                cells.push(Cell::axis_box(
                    vec![0.0; 3],
                    &[
                        (0, i as f64 * h, (i + 1) as f64 * h),
                        (1, j as f64 * h, (j + 1) as f64 * h),
                        (2, k as f64 * h, (k + 1) as f64 * h),
                    ],
                ));
            }
        }
    }
    Chain::new(ModelChart::CubeS3, cells)
}

/// Edge `a_i` (`which = 0`) or `b_i` (`which = 1`) of the 4g-gon, `i` 1-based.
pub fn polygon_edge(genus: usize, which: usize, i: usize) -> Result<Chain> {
    let chart = ModelChart::polygon(genus)?;
    if i == 0 || i > genus || which > 1 {
        return Err(Error::InvalidArgument(format!("no edge {i} on a genus-{genus} polygon")));
    }
    let vs = ModelChart::polygon_vertices(genus);
    let e = 4 * (i - 1) + which;
    let (a, b) = (vs[e], vs[e + 1]);
    Ok(Chain::new(chart, vec![Cell::affine(vec![a[0], a[1]], vec![vec![b[0] - a[0], b[1] - a[1]]])]))
}

/// Fan of quadrilateral cells from the centre of the polygon.
pub fn polygon_fundamental(genus: usize) -> Result<Chain> {
    let chart = ModelChart::polygon(genus)?;
    let vs = ModelChart::polygon_vertices(genus);
    let m = vs.len();
    let cells = (0..m)
        .map(|k| {
            let a = vs[k];
            let b = vs[(k + 1) % m];
            let map: PointMap = Arc::new(move |t: &[f64]| {
                let r = t[0];
                vec![r * (a[0] + t[1] * (b[0] - a[0])), r * (a[1] + t[1] * (b[1] - a[1]))]
            });
            let jac: MatrixField = Arc::new(move |t: &[f64]| {
                let r = t[0];
                DMatrix::from_row_slice(
                    2,
                    2,
                    &[
                        a[0] + t[1] * (b[0] - a[0]),
                        r * (b[0] - a[0]),
                        a[1] + t[1] * (b[1] - a[1]),
                        r * (b[1] - a[1]),
                    ],
                )
            });
            Cell::general_with_jacobian(2, map, jac)
        })
        .collect();
    Ok(Chain::new(chart, cells))
}

/// Names of the built-in cycles.
pub fn builtin_chain_names() -> Vec<String> {
    let mut v = vec!["torus1.x_cycle".to_string(), "torus1.fundamental".to_string()];
    for (n, axes) in [(2, "xy"), (3, "xyz"), (4, "xyzw")] {
        for a in axes.chars() {
            v.push(format!("torus{n}.{a}_cycle"));
        }
        v.push(format!("torus{n}.fundamental"));
    }
    v.push("torus3.xy_torus".into());
    v.push("cubes3.fundamental".into());
    v.push("sphere2.fundamental".into());
    for g in 1..=3 {
        for i in 1..=g {
            v.push(format!("polygon({g}).a_{i}"));
            v.push(format!("polygon({g}).b_{i}"));
        }
        v.push(format!("polygon({g}).fundamental"));
    }
    v
}

/// Resolves a built-in cycle name such as `torus2.fundamental`,
/// `cubes3.fundamental` or `polygon(2).b_1`.
pub fn builtin_chain(name: &str) -> Result<Chain> {
    let bad = || Error::InvalidArgument(format!("unknown cycle '{name}'"));
    let (chart_name, cycle) = name.trim().split_once('.').ok_or_else(bad)?;
    let chart = ModelChart::parse(chart_name)?;
    match &chart {
        ModelChart::Torus(n) => {
            let n = *n;
            let axes = ["x", "y", "z", "w"];
            if cycle == "fundamental" {
                return Ok(Chain::new(chart, vec![torus_box(n, &(0..n).collect::<Vec<_>>())]));
            }
            if cycle == "xy_torus" && n >= 2 {
                return Ok(Chain::new(chart, vec![torus_box(n, &[0, 1])]));
            }
            let axis = cycle.strip_suffix("_cycle").and_then(|a| axes.iter().position(|s| *s == a));
            match axis {
                Some(a) if a < n => Ok(Chain::new(chart, vec![torus_box(n, &[a])])),
                _ => Err(bad()),
            }
        }
        ModelChart::CubeS3 if cycle == "fundamental" => Ok(cube_chain(4)),
        ModelChart::Sphere2 if cycle == "fundamental" => Ok(Chain::new(
            chart,
            vec![Cell::axis_box(vec![0.0, 0.0], &[(0, 0.0, PI / 2.0), (1, 0.0, 2.0 * PI)])],
        )),
        ModelChart::PolygonSurface(g) => {
            let g = *g;
            if cycle == "fundamental" {
                return polygon_fundamental(g);
            }
            let (which, idx) = if let Some(r) = cycle.strip_prefix("a_") {
                (0, r)
            } else if let Some(r) = cycle.strip_prefix("b_") {
                (1, r)
            } else {
                return Err(bad());
            };
            polygon_edge(g, which, idx.parse().map_err(|_| bad())?)
        }
        _ => Err(bad()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::field::FormField;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn torus_area_is_one() {
        let area = FormField::scalar(ModelChart::Torus(2), 2, |_| vec![1.0]).unwrap();
        let v = integrate_scalar(&area, &builtin_chain("torus2.fundamental").unwrap(), &q()).unwrap();
        assert!((v.re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn circle_integral_of_cosine() {
        let w = FormField::scalar(ModelChart::Torus(1), 1, |x| vec![1.0 + (2.0 * PI * x[0]).cos()]).unwrap();
        let v = integrate_scalar(&w, &builtin_chain("torus1.x_cycle").unwrap(), &q()).unwrap();
        assert!((v.re - 1.0).abs() < 1e-10);
    }

    #[test]
    fn degree_mismatch_is_reported() {
        let w = FormField::scalar(ModelChart::Torus(2), 1, |_| vec![1.0, 0.0]).unwrap();
        let c = builtin_chain("torus2.fundamental").unwrap();
        assert_eq!(integrate(&w, &c, &q()), Err(Error::DegreeMismatch { form: 1, cell: 2 }));
    }

    #[test]
    fn boundary_of_point_and_square() {
        let p = Chain::new(ModelChart::Euclidean(2), vec![Cell::point(vec![0.0, 0.0])]);
        assert!(p.boundary().is_empty());
        let sq = Chain::new(ModelChart::Euclidean(2), vec![Cell::axis_box(vec![0.0; 2], &[(0, 0.0, 1.0), (1, 0.0, 1.0)])]);
        let b = sq.boundary();
        assert_eq!(b.cells().len(), 4);
        let exact = FormField::scalar(ModelChart::Euclidean(2), 1, |x| vec![2.0 * x[0] * x[1], x[0] * x[0]]).unwrap();
        assert!(integrate_scalar(&exact, &b, &q()).unwrap().norm() < 1e-9);
    }

    #[test]
    fn stokes_on_square_cell() {
        let c = ModelChart::Euclidean(2);
        let w = FormField::scalar(c.clone(), 1, |x| vec![0.0, x[0]]).unwrap();
        let sq = Chain::new(c.clone(), vec![Cell::axis_box(vec![0.0; 2], &[(0, 0.2, 0.9), (1, -0.3, 0.4)])]);
        let lhs = integrate_scalar(&w, &sq.boundary(), &q()).unwrap();
        let rhs = integrate_scalar(&w.exterior_derivative(&q()).unwrap(), &sq, &q()).unwrap();
        assert!((lhs - rhs).norm() < 1e-8);
        assert!((lhs.re - 0.49).abs() < 1e-12);
    }

    #[test]
    fn boundary_of_boundary_integrates_to_zero() {
        let c = ModelChart::Euclidean(3);
        let cube = Chain::new(c.clone(), vec![Cell::axis_box(vec![0.0; 3], &[(0, 0.0, 1.0), (1, 0.0, 1.0), (2, 0.0, 1.0)])]);
        let bb = cube.boundary().boundary();
        let w = FormField::scalar(c, 1, |x| vec![x[1].sin() * x[2], x[0].exp(), x[0] * x[1] * x[2]]).unwrap();
        assert!(integrate_scalar(&w, &bb, &q()).unwrap().norm() < 1e-10);
    }

    #[test]
    fn orientation_flip_negates_exactly() {
        let w = FormField::scalar(ModelChart::Torus(2), 2, |x| vec![(x[0] * x[1]).cos()]).unwrap();
        let c = builtin_chain("torus2.fundamental").unwrap();
        let a = integrate_scalar(&w, &c, &q()).unwrap();
        let b = integrate_scalar(&w, &c.neg(), &q()).unwrap();
        assert_eq!(a, -b);
    }

    #[test]
    fn polygon_fundamental_has_unit_circle_polygon_area() {
        for g in 1..=3 {
            let chain = builtin_chain(&format!("polygon({g}).fundamental")).unwrap();
            let area = FormField::scalar(ModelChart::PolygonSurface(g), 2, |_| vec![1.0]).unwrap();
            let m = 4.0 * g as f64;
            let expect = 0.5 * m * (2.0 * PI / m).sin();
            assert!((integrate_scalar(&area, &chain, &q()).unwrap().re - expect).abs() < 1e-12);
            chain.check_immersion(8).unwrap();
        }
    }

    #[test]
    fn fiber_integration_of_product_form() {
        // ω = f(x) g(s) dx ∧ ds on T^1 x R^1, ∫ over x gives (∫f) g ds with sign (-1)^{1·1}
        let chart = ModelChart::product(ModelChart::Torus(1), ModelChart::Euclidean(1));
        let w = FormField::scalar(chart, 2, |x| vec![(1.0 + x[0]) * x[1] * x[1]]).unwrap();
        let c = builtin_chain("torus1.x_cycle").unwrap();
        let fw = fiber_integrate(&w, &c, &q()).unwrap();
        let v = fw.eval_scalar(&[0.5])[0].re;
        assert!((v + 1.5 * 0.25).abs() < 1e-12);
    }

    #[test]
    fn all_builtin_names_resolve() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for name in builtin_chain_names() {
            let c = builtin_chain(&name).unwrap();
            assert!(!c.is_empty(), "{name}");
            let _ = c.chart().sample_point(&mut rng);
        }
        assert!(builtin_chain("torus2.z_cycle").is_err());
    }
}
