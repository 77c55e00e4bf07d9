//! Differential forms with evaluable coefficients.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::Rng;

use super::chart::ModelChart;
use super::exterior::{binomial, from_mask, mask_position, masks, multi_indices, to_mask, wedge_table, Ext};
use super::quadrature::QuadratureSpec;
use crate::error::{Error, Result};
use crate::liealg::{frob, CMat, GroupId, C64};

/// All components at a point, in canonical multi-index order.
pub type Evaluator = Arc<dyn Fn(&[f64]) -> Vec<CMat> + Send + Sync>;
/// `(x, i) -> ∂_i` of all components at `x`.
pub type PartialEvaluator = Arc<dyn Fn(&[f64], usize) -> Vec<CMat> + Send + Sync>;
pub type Coefficient = Arc<dyn Fn(&[f64]) -> CMat + Send + Sync>;
pub type PointMap = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
pub type MatrixField = Arc<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ValueKind {
    Scalar,
    Algebra(GroupId),
    /// General n x n matrices (products of algebra values).
    Matrix(usize),
}

impl ValueKind {
    pub fn size(&self) -> usize {
        match self {
            ValueKind::Scalar => 1,
            ValueKind::Algebra(g) => g.matrix_size(),
            ValueKind::Matrix(n) => *n,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BracketMode {
    /// Scalar times anything.
    Plain,
    /// `[α ∧ β]` for algebra-valued forms.
    LieBracket,
    /// Matrix product of the values; used inside invariant polynomials.
    PolynomialSlot,
}

#[derive(Clone)]
pub struct FormField {
    chart: ModelChart,
    degree: usize,
    kind: ValueKind,
    eval: Evaluator,
    partials: Option<PartialEvaluator>,
}

impl fmt::Debug for FormField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FormField")
            .field("chart", &self.chart)
            .field("degree", &self.degree)
            .field("kind", &self.kind)
            .field("analytic_partials", &self.partials.is_some())
            .finish()
    }
}

fn scale_mat(m: &CMat, s: f64) -> CMat {
    m * C64::new(s, 0.0)
}

/// Determinant of the minor of `j` with the given rows and columns.
pub(crate) fn minor_det(j: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> f64 {
    let k = rows.len();
    match k {
        0 => 1.0,
        1 => j[(rows[0], cols[0])],
        2 => j[(rows[0], cols[0])] * j[(rows[1], cols[1])] - j[(rows[0], cols[1])] * j[(rows[1], cols[0])],
        _ => DMatrix::from_fn(k, k, |a, b| j[(rows[a], cols[b])]).determinant(),
    }
}

/// Canonical position and permutation sign of an arbitrary multi-index.
fn canonical(idx: &[usize]) -> Option<(Vec<usize>, f64)> {
    let mut v = idx.to_vec();
    let mut sign = 1.0;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                sign = -sign;
            } else if v[j] == v[j + 1] {
                return None;
            }
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, sign))
}

impl FormField {
    pub fn new(
        chart: ModelChart,
        degree: usize,
        kind: ValueKind,
        f: impl Fn(&[f64]) -> Vec<CMat> + Send + Sync + 'static,
    ) -> Result<Self> {
        Self::from_evaluator(chart, degree, kind, Arc::new(f))
    }

    pub fn from_evaluator(chart: ModelChart, degree: usize, kind: ValueKind, eval: Evaluator) -> Result<Self> {
        let n = chart.dim();
        let probe: Vec<f64> = chart.bounds().iter().map(|(lo, hi)| lo + 0.37 * (hi - lo)).collect();
        let vals = eval(&probe);
        let s = kind.size();
        if vals.len() != binomial(n, degree) || vals.iter().any(|m| m.nrows() != s || m.ncols() != s) {
            return Err(Error::DimensionMismatch(format!(
                "coefficient function returned {} components, expected {} of size {s}x{s}",
                vals.len(),
                binomial(n, degree)
            )));
        }
        Ok(Self { chart, degree, kind, eval, partials: None })
    }

    /// Real scalar form from its components.
    pub fn scalar(
        chart: ModelChart,
        degree: usize,
        f: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Result<Self> {
        Self::new(chart, degree, ValueKind::Scalar, move |x| {
            f(x).into_iter().map(|v| CMat::from_element(1, 1, C64::new(v, 0.0))).collect()
        })
    }

    /// Form assembled from individually given components; multi-indices may
    /// be unsorted (the sign of the sorting permutation is applied).
    pub fn from_components(
        chart: ModelChart,
        degree: usize,
        kind: ValueKind,
        components: Vec<(Vec<usize>, Coefficient)>,
    ) -> Result<Self> {
        let n = chart.dim();
        let mut placed = Vec::new();
        for (idx, c) in components {
            if idx.len() != degree || idx.iter().any(|&i| i >= n) {
                return Err(Error::DimensionMismatch(format!("multi-index {idx:?} for a {degree}-form")));
            }
            if let Some((sorted, sign)) = canonical(&idx) {
                placed.push((mask_position(n, to_mask(&sorted)), sign, c));
            }
        }
        let count = binomial(n, degree);
        let s = kind.size();
        Self::new(chart, degree, kind, move |x| {
            let mut out = vec![CMat::zeros(s, s); count];
            for (pos, sign, c) in &placed {
                out[*pos] += scale_mat(&c(x), *sign);
            }
            out
        })
    }

    pub fn zero(chart: ModelChart, degree: usize, kind: ValueKind) -> Self {
        let count = binomial(chart.dim(), degree);
        let s = kind.size();
        Self {
            chart,
            degree,
            kind,
            eval: Arc::new(move |_| vec![CMat::zeros(s, s); count]),
            partials: Some(Arc::new(move |_, _| vec![CMat::zeros(s, s); count])),
        }
    }

    pub fn constant_function(chart: ModelChart, value: f64) -> Self {
        let v = CMat::from_element(1, 1, C64::new(value, 0.0));
        Self {
            chart,
            degree: 0,
            kind: ValueKind::Scalar,
            eval: Arc::new(move |_| vec![v.clone()]),
            partials: Some(Arc::new(|_, _| vec![CMat::zeros(1, 1)])),
        }
    }

    /// The coordinate 1-form `dx^i`.
    pub fn coordinate_differential(chart: ModelChart, i: usize) -> Result<Self> {
        let n = chart.dim();
        if i >= n {
            return Err(Error::DimensionMismatch(format!("axis {i} on a {n}-dimensional chart")));
        }
        let f = Self::scalar(chart, 1, move |_| {
            let mut v = vec![0.0; n];
            v[i] = 1.0;
            v
        })?;
        Ok(f.with_partials(Arc::new(move |_, _| vec![CMat::zeros(1, 1); n])))
    }

    /// Attaches analytic partial derivatives, used by `d` instead of
    /// finite differences.
    pub fn with_partials(mut self, p: PartialEvaluator) -> Self {
        self.partials = Some(p);
        self
    }

    pub fn has_analytic_partials(&self) -> bool {
        self.partials.is_some()
    }

    pub fn chart(&self) -> &ModelChart {
        &self.chart
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn kind(&self) -> ValueKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn num_components(&self) -> usize {
        binomial(self.dim(), self.degree)
    }

    pub fn evaluator(&self) -> Evaluator {
        self.eval.clone()
    }

    pub fn eval(&self, x: &[f64]) -> Vec<CMat> {
        (self.eval)(x)
    }

    /// Components as complex numbers (1 x 1 values only).
    pub fn eval_scalar(&self, x: &[f64]) -> Vec<C64> {
        self.eval(x).iter().map(|m| m[(0, 0)]).collect()
    }

    /// Coefficient of `dx^{idx}` for an arbitrary (possibly unsorted) multi-index.
    pub fn component(&self, x: &[f64], idx: &[usize]) -> CMat {
        let s = self.kind.size();
        match canonical(idx) {
            Some((sorted, sign)) => scale_mat(&self.eval(x)[mask_position(self.dim(), to_mask(&sorted))], sign),
            None => CMat::zeros(s, s),
        }
    }

    /// `∂_i` of all components, analytic when available.
    pub fn partial(&self, x: &[f64], i: usize, h: f64) -> Vec<CMat> {
        if let Some(p) = &self.partials {
            return p(x, i);
        }
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[i] += h;
        xm[i] -= h;
        let fp = self.eval(&xp);
        let fm = self.eval(&xm);
        fp.iter().zip(fm.iter()).map(|(a, b)| (a - b) * C64::new(0.5 / h, 0.0)).collect()
    }

    pub fn ext(&self, x: &[f64]) -> Ext {
        Ext::from_homogeneous(self.dim(), self.degree, self.eval(x))
    }

    /// `ω(v_1, ..., v_k)` at `x`.
    pub fn evaluate_on(&self, x: &[f64], vectors: &[Vec<f64>]) -> Result<CMat> {
        if vectors.len() != self.degree {
            return Err(Error::DimensionMismatch(format!(
                "{} vectors for a {}-form",
                vectors.len(),
                self.degree
            )));
        }
        let n = self.dim();
        let k = self.degree;
        let v = DMatrix::from_fn(n, k, |i, j| vectors[j][i]);
        let cols: Vec<usize> = (0..k).collect();
        let vals = self.eval(x);
        let s = self.kind.size();
        let mut out = CMat::zeros(s, s);
        for (idx, val) in multi_indices(n, k).iter().zip(vals.iter()) {
            let d = minor_det(&v, idx, &cols);
            if d != 0.0 {
                out += scale_mat(val, d);
            }
        }
        Ok(out)
    }

    fn same_shape(&self, other: &FormField) -> Result<()> {
        if self.chart != other.chart {
            return Err(Error::ChartMismatch);
        }
        if self.kind != other.kind {
            return Err(Error::KindMismatch(format!("{:?} vs {:?}", self.kind, other.kind)));
        }
        if self.degree != other.degree {
            return Err(Error::DimensionMismatch(format!(
                "adding forms of degree {} and {}",
                self.degree, other.degree
            )));
        }
        Ok(())
    }

    /// Linear combination `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &FormField, b: f64) -> Result<FormField> {
        self.same_shape(other)?;
        let (f, g) = (self.eval.clone(), other.eval.clone());
        let partials = match (&self.partials, &other.partials) {
            (Some(p), Some(q)) => {
                let (p, q) = (p.clone(), q.clone());
                Some(Arc::new(move |x: &[f64], i: usize| {
                    p(x, i).iter().zip(q(x, i).iter()).map(|(u, v)| scale_mat(u, a) + scale_mat(v, b)).collect()
                }) as PartialEvaluator)
            }
            _ => None,
        };
        Ok(FormField {
            chart: self.chart.clone(),
            degree: self.degree,
            kind: self.kind,
            eval: Arc::new(move |x| {
                f(x).iter().zip(g(x).iter()).map(|(u, v)| scale_mat(u, a) + scale_mat(v, b)).collect()
            }),
            partials,
        })
    }

    pub fn add(&self, other: &FormField) -> Result<FormField> {
        self.combine(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &FormField) -> Result<FormField> {
        self.combine(1.0, other, -1.0)
    }

    pub fn scale(&self, s: C64) -> FormField {
        let f = self.eval.clone();
        let partials = self.partials.clone().map(|p| {
            Arc::new(move |x: &[f64], i: usize| p(x, i).into_iter().map(|m| m * s).collect()) as PartialEvaluator
        });
        FormField {
            chart: self.chart.clone(),
            degree: self.degree,
            kind: self.kind,
            eval: Arc::new(move |x| f(x).into_iter().map(|m| m * s).collect()),
            partials,
        }
    }

    pub fn neg(&self) -> FormField {
        self.scale(C64::new(-1.0, 0.0))
    }

    /// Applies a pointwise map to the list of component values.
    pub fn map_pointwise(
        &self,
        kind: ValueKind,
        f: impl Fn(&[f64], Vec<CMat>) -> Vec<CMat> + Send + Sync + 'static,
    ) -> FormField {
        let e = self.eval.clone();
        FormField {
            chart: self.chart.clone(),
            degree: self.degree,
            kind,
            eval: Arc::new(move |x| f(x, e(x))),
            partials: None,
        }
    }

    /// Forgets the Lie-algebra structure (values become general matrices).
    pub fn as_matrix(&self) -> FormField {
        let mut out = self.clone();
        if !matches!(self.kind, ValueKind::Scalar) {
            out.kind = ValueKind::Matrix(self.kind.size());
        }
        out
    }

    pub fn trace(&self) -> FormField {
        let mut out = self.map_pointwise(ValueKind::Scalar, |_, v| {
            v.into_iter().map(|m| CMat::from_element(1, 1, m.trace())).collect()
        });
        if let Some(p) = self.partials.clone() {
            out.partials = Some(Arc::new(move |x, i| {
                p(x, i).into_iter().map(|m| CMat::from_element(1, 1, m.trace())).collect()
            }));
        }
        out
    }

    /// Graded product `self ∧ other`.
    pub fn wedge(&self, other: &FormField, mode: BracketMode) -> Result<FormField> {
        if self.chart != other.chart {
            return Err(Error::ChartMismatch);
        }
        let n = self.dim();
        let (ka, kb) = (self.kind, other.kind);
        let mismatch = || Err(Error::KindMismatch(format!("{ka:?} ∧ {kb:?} in mode {mode:?}")));
        let (kind, op): (ValueKind, fn(&CMat, &CMat) -> CMat) = match mode {
            BracketMode::Plain => match (ka, kb) {
                (ValueKind::Scalar, k) => (k, |a, b| b * a[(0, 0)]),
                (k, ValueKind::Scalar) => (k, |a, b| a * b[(0, 0)]),
                _ => return mismatch(),
            },
            BracketMode::LieBracket => match (ka, kb) {
                (ValueKind::Algebra(g), ValueKind::Algebra(h)) if g == h => {
                    (ValueKind::Algebra(g), |a, b| a * b - b * a)
                }
                (ValueKind::Matrix(p), ValueKind::Matrix(q)) if p == q => (ValueKind::Matrix(p), |a, b| a * b - b * a),
                _ => return mismatch(),
            },
            BracketMode::PolynomialSlot => match (ka, kb) {
                (ValueKind::Scalar, ValueKind::Scalar) => (ValueKind::Scalar, |a, b| a * b),
                (ValueKind::Scalar, k) => (ValueKind::Matrix(k.size()), |a, b| b * a[(0, 0)]),
                (k, ValueKind::Scalar) => (ValueKind::Matrix(k.size()), |a, b| a * b[(0, 0)]),
                (p, q) if p.size() == q.size() => (ValueKind::Matrix(p.size()), |a, b| a * b),
                _ => return mismatch(),
            },
        };
        let table = wedge_table(n, self.degree, other.degree);
        let degree = self.degree + other.degree;
        let count = binomial(n, degree);
        let s = kind.size();
        let (f, g) = (self.eval.clone(), other.eval.clone());
        Ok(FormField {
            chart: self.chart.clone(),
            degree,
            kind,
            eval: Arc::new(move |x| {
                let (a, b) = (f(x), g(x));
                let mut out = vec![CMat::zeros(s, s); count];
                for &(i, j, o, sign) in &table {
                    out[o] += scale_mat(&op(&a[i], &b[j]), sign);
                }
                out
            }),
            partials: None,
        })
    }

    /// Exterior derivative by central differences of step `q.fd_step()`
    /// (or analytic partials when attached).
    pub fn exterior_derivative(&self, q: &QuadratureSpec) -> Result<FormField> {
        let n = self.dim();
        if self.degree >= n {
            return Err(Error::DegreeOverflow { degree: self.degree, dim: n });
        }
        let k = self.degree;
        // For each output component: (axis, input position, sign).
        let mut table: Vec<Vec<(usize, usize, f64)>> = Vec::new();
        for idx in multi_indices(n, k + 1) {
            let mut terms = Vec::new();
            for (m, &axis) in idx.iter().enumerate() {
                let rest: Vec<usize> = idx.iter().copied().filter(|&j| j != axis).collect();
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                terms.push((axis, mask_position(n, to_mask(&rest)), sign));
            }
            table.push(terms);
        }
        let h = q.fd_step();
        let src = self.clone();
        let s = self.kind.size();
        Ok(FormField {
            chart: self.chart.clone(),
            degree: k + 1,
            kind: self.kind,
            eval: Arc::new(move |x| {
                let parts: Vec<Vec<CMat>> = (0..n).map(|i| src.partial(x, i, h)).collect();
                table
                    .iter()
                    .map(|terms| {
                        let mut acc = CMat::zeros(s, s);
                        for &(axis, pos, sign) in terms {
                            acc += scale_mat(&parts[axis][pos], sign);
                        }
                        acc
                    })
                    .collect()
            }),
            partials: None,
        })
    }

    /// Interior product `i_V ω` with a vector field.
    pub fn interior(&self, v: PointMap) -> Result<FormField> {
        let n = self.dim();
        let k = self.degree;
        if k == 0 {
            return Ok(FormField::zero(self.chart.clone(), 0, self.kind));
        }
        let mut table: Vec<Vec<(usize, usize, f64)>> = Vec::new();
        for idx in multi_indices(n, k - 1) {
            let mask = to_mask(&idx);
            let mut terms = Vec::new();
            for m in 0..n {
                if mask & (1 << m) != 0 {
                    continue;
                }
                let pos_in = idx.iter().filter(|&&j| j < m).count();
                let sign = if pos_in % 2 == 0 { 1.0 } else { -1.0 };
                terms.push((m, mask_position(n, mask | (1 << m)), sign));
            }
            table.push(terms);
        }
        let f = self.eval.clone();
        let s = self.kind.size();
        Ok(FormField {
            chart: self.chart.clone(),
            degree: k - 1,
            kind: self.kind,
            eval: Arc::new(move |x| {
                let vals = f(x);
                let vx = v(x);
                table
                    .iter()
                    .map(|terms| {
                        let mut acc = CMat::zeros(s, s);
                        for &(m, pos, sign) in terms {
                            if vx[m] != 0.0 {
                                acc += scale_mat(&vals[pos], sign * vx[m]);
                            }
                        }
                        acc
                    })
                    .collect()
            }),
            partials: None,
        })
    }

    /// Pull-back along `map: source -> self.chart` with Jacobian `jac`
    /// (rows: target axes, columns: source axes).
    pub fn pullback_with_jacobian(&self, source: ModelChart, map: PointMap, jac: MatrixField) -> Result<FormField> {
        let ns = source.dim();
        let nt = self.dim();
        let k = self.degree;
        let src_idx = multi_indices(ns, k);
        let tgt_idx = multi_indices(nt, k);
        let f = self.eval.clone();
        let s = self.kind.size();
        FormField::from_evaluator(
            source,
            k,
            self.kind,
            Arc::new(move |x| {
                let vals = f(&map(x));
                let j = jac(x);
                src_idx
                    .iter()
                    .map(|kk| {
                        let mut acc = CMat::zeros(s, s);
                        for (ii, val) in tgt_idx.iter().zip(vals.iter()) {
                            let d = minor_det(&j, ii, kk);
                            if d != 0.0 {
                                acc += scale_mat(val, d);
                            }
                        }
                        acc
                    })
                    .collect()
            }),
        )
    }

    /// Pull-back with a finite-difference Jacobian of step `h`.
    pub fn pullback(&self, source: ModelChart, map: PointMap, h: f64) -> Result<FormField> {
        let ns = source.dim();
        let nt = self.dim();
        let m = map.clone();
        let jac: MatrixField = Arc::new(move |x| fd_jacobian(&*m, x, ns, nt, h));
        self.pullback_with_jacobian(source, map, jac)
    }

    /// `ω(P v_1, ..., P v_k)` for a pointwise linear endomorphism `P`.
    pub fn compose_linear(&self, p: MatrixField) -> Result<FormField> {
        let id: PointMap = Arc::new(|x: &[f64]| x.to_vec());
        self.pullback_with_jacobian(self.chart.clone(), id, p)
    }

    /// Largest mismatch across the chart's identified boundary points.
    pub fn identification_defect<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> f64 {
        let n = self.dim();
        let k = self.degree;
        let basis: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let mut v = vec![0.0; n];
                v[i] = 1.0;
                v
            })
            .collect();
        let mut worst = 0.0f64;
        for pair in self.chart.identified_pairs(count, rng) {
            for sub in multi_indices(pair.frame_p.len(), k) {
                let vp: Vec<Vec<f64>> = sub.iter().map(|&i| pair.frame_p[i].clone()).collect();
                let vq: Vec<Vec<f64>> = sub.iter().map(|&i| pair.frame_q[i].clone()).collect();
                let a = self.evaluate_on(&pair.p, &vp).expect("degree matches");
                let b = self.evaluate_on(&pair.q, &vq).expect("degree matches");
                worst = worst.max(frob(&(a - b)));
            }
            if k == 0 && pair.frame_p.is_empty() {
                let a = self.eval(&pair.p);
                let b = self.eval(&pair.q);
                worst = worst.max(frob(&(&a[0] - &b[0])));
            }
            for null in &pair.null_p {
                if k == 0 {
                    continue;
                }
                for sub in multi_indices(n, k - 1) {
                    let mut vs = vec![null.clone()];
                    vs.extend(sub.iter().map(|&i| basis[i].clone()));
                    worst = worst.max(frob(&self.evaluate_on(&pair.p, &vs).expect("degree matches")));
                }
            }
        }
        worst
    }

    /// Largest Frobenius norm of any component over the given points.
    pub fn sup_norm(&self, points: &[Vec<f64>]) -> f64 {
        points
            .iter()
            .flat_map(|x| self.eval(x).into_iter().map(|m| frob(&m)))
            .fold(0.0, f64::max)
    }

    /// Keeps the components whose multi-index has exactly `j` entries among
    /// the axes `split..dim` (parameter directions of a product chart).
    pub fn bigraded_part(&self, split: usize, j: usize) -> FormField {
        let n = self.dim();
        let keep: Vec<bool> = masks(n, self.degree)
            .iter()
            .map(|m| from_mask(*m).iter().filter(|&&i| i >= split).count() == j)
            .collect();
        let s = self.kind.size();
        self.map_pointwise(self.kind, move |_, v| {
            v.into_iter()
                .zip(keep.iter())
                .map(|(m, &k)| if k { m } else { CMat::zeros(s, s) })
                .collect()
        })
    }
}

pub(crate) fn fd_jacobian(map: &dyn Fn(&[f64]) -> Vec<f64>, x: &[f64], ns: usize, nt: usize, h: f64) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(nt, ns);
    let mut xp = x.to_vec();
    for c in 0..ns {
        xp[c] = x[c] + h;
        let fp = map(&xp);
        xp[c] = x[c] - h;
        let fm = map(&xp);
        xp[c] = x[c];
        for r in 0..nt {
            j[(r, c)] = (fp[r] - fm[r]) / (2.0 * h);
        }
    }
    j
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn t2() -> ModelChart {
        ModelChart::Torus(2)
    }

    #[test]
    fn d_of_constant_is_zero() {
        let f = FormField::constant_function(t2(), 3.0);
        let df = f.exterior_derivative(&QuadratureSpec::default()).unwrap();
        assert_eq!(df.degree(), 1);
        assert!(df.sup_norm(&[vec![0.2, 0.4]]) == 0.0);
    }

    #[test]
    fn d_of_x_dy_is_dx_dy() {
        let w = FormField::scalar(t2(), 1, |x| vec![0.0, x[0]]).unwrap();
        let dw = w.exterior_derivative(&QuadratureSpec::default()).unwrap();
        let v = dw.eval_scalar(&[0.3, 0.7]);
        assert!((v[0].re - 1.0).abs() < 1e-8);
    }

    #[test]
    fn top_degree_d_overflows() {
        let w = FormField::scalar(t2(), 2, |_| vec![1.0]).unwrap();
        assert!(matches!(
            w.exterior_derivative(&QuadratureSpec::default()),
            Err(Error::DegreeOverflow { degree: 2, dim: 2 })
        ));
    }

    #[test]
    fn wedge_is_graded_antisymmetric() {
        let dx = FormField::coordinate_differential(t2(), 0).unwrap();
        let dy = FormField::coordinate_differential(t2(), 1).unwrap();
        let a = dx.wedge(&dy, BracketMode::Plain).unwrap().eval_scalar(&[0.1, 0.1]);
        let b = dy.wedge(&dx, BracketMode::Plain).unwrap().eval_scalar(&[0.1, 0.1]);
        assert_eq!(a[0].re, 1.0);
        assert_eq!(b[0].re, -1.0);
    }

    #[test]
    fn wedge_with_one_is_identity() {
        let w = FormField::scalar(t2(), 1, |x| vec![x[0].sin(), x[1] * x[0]]).unwrap();
        let one = FormField::constant_function(t2(), 1.0);
        let p = w.wedge(&one, BracketMode::Plain).unwrap();
        let x = [0.3, 0.6];
        assert_eq!(p.eval(&x), w.eval(&x));
    }

    #[test]
    fn lie_bracket_wedge_matches_hand_expansion() {
        let g = GroupId::SU(2);
        let basis = g.basis();
        let (bx, by) = (basis[0].clone(), basis[1].clone());
        let (bx2, by2) = (bx.clone(), by.clone());
        let a = FormField::new(t2(), 1, ValueKind::Algebra(g), move |x| {
            vec![&bx2 * C64::new((2.0 * PI * x[1]).sin(), 0.0), &by2 * C64::new(x[0] * x[0], 0.0)]
        })
        .unwrap();
        let aa = a.wedge(&a, BracketMode::LieBracket).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let x = t2().sample_point(&mut rng);
            let f = (2.0 * PI * x[1]).sin();
            let gg = x[0] * x[0];
            let expect = (&bx * &by - &by * &bx) * C64::new(2.0 * f * gg, 0.0);
            assert!(frob(&(&aa.eval(&x)[0] - expect)) < 1e-10);
        }
    }

    #[test]
    fn plain_wedge_of_two_algebra_forms_is_kind_mismatch() {
        let a = FormField::zero(t2(), 1, ValueKind::Algebra(GroupId::SU(2)));
        assert!(matches!(a.wedge(&a, BracketMode::Plain), Err(Error::KindMismatch(_))));
        let b = FormField::zero(ModelChart::Torus(3), 1, ValueKind::Scalar);
        assert!(matches!(b.wedge(&FormField::constant_function(t2(), 1.0), BracketMode::Plain), Err(Error::ChartMismatch)));
    }

    #[test]
    fn from_components_applies_sorting_sign() {
        let c: Coefficient = Arc::new(|_| CMat::from_element(1, 1, C64::new(2.0, 0.0)));
        let w = FormField::from_components(t2(), 2, ValueKind::Scalar, vec![(vec![1, 0], c)]).unwrap();
        assert_eq!(w.eval_scalar(&[0.0, 0.0])[0].re, -2.0);
        assert_eq!(w.component(&[0.0, 0.0], &[1, 0])[(0, 0)].re, 2.0);
    }

    #[test]
    fn interior_product_of_area_form() {
        let area = FormField::scalar(t2(), 2, |_| vec![1.0]).unwrap();
        let v: PointMap = Arc::new(|_| vec![0.0, 1.0]);
        // i_{∂y}(dx ∧ dy) = -dx
        let i = area.interior(v).unwrap().eval_scalar(&[0.5, 0.5]);
        assert_eq!(i[0].re, -1.0);
        assert_eq!(i[1].re, 0.0);
    }

    #[test]
    fn pullback_of_area_under_rotation() {
        let c = ModelChart::Euclidean(2);
        let area = FormField::scalar(c.clone(), 2, |_| vec![1.0]).unwrap();
        let map: PointMap = Arc::new(|x| vec![x[0] * 2.0 - x[1], x[1] + x[0]]);
        let pb = area.pullback(c, map, 1e-6).unwrap();
        assert!((pb.eval_scalar(&[0.3, 0.2])[0].re - 3.0).abs() < 1e-8);
    }

    #[test]
    fn periodic_forms_pass_identification_check() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let good = FormField::scalar(t2(), 1, |x| vec![(2.0 * PI * x[0]).cos(), 1.0]).unwrap();
        let bad = FormField::scalar(t2(), 1, |x| vec![x[0], 1.0]).unwrap();
        assert!(good.identification_defect(20, &mut rng) < 1e-10);
        assert!(bad.identification_defect(20, &mut rng) > 0.5);
    }

    #[test]
    fn d_squared_vanishes_on_polynomial_forms() {
        let c = ModelChart::Torus(3);
        let w = FormField::scalar(c.clone(), 1, |x| {
            vec![x[1] * x[2] * x[2], x[0].powi(3) - x[2], x[0] * x[1] * x[2]]
        })
        .unwrap();
        let q = QuadratureSpec::default();
        let ddw = w.exterior_derivative(&q).unwrap().exterior_derivative(&q).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let pts: Vec<Vec<f64>> = (0..100).map(|_| c.sample_point(&mut rng)).collect();
        assert!(ddw.sup_norm(&pts) < 1e-5);
    }
}
