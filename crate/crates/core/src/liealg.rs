//! Matrix Lie groups U(1) and SU(n), n <= 4, with their Lie algebras.
//!
//! Algebra elements are anti-Hermitian n x n complex matrices (traceless for
//! SU(n)); group elements are unitary matrices (determinant one for SU(n)).
//! The exponential uses scaling-and-squaring with a Taylor core, the
//! logarithm uses inverse scaling-and-squaring (Denman-Beavers square roots
//! followed by an inverse-hyperbolic-tangent series).

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;

const ALGEBRA_TOL: f64 = 1e-12;
const GROUP_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupId {
    U1,
    SU(usize),
}

impl GroupId {
    pub fn su(n: usize) -> Result<Self> {
        if (2..=4).contains(&n) {
            Ok(GroupId::SU(n))
        } else {
            Err(Error::InvalidArgument(format!("SU({n}) is not supported (2 <= n <= 4)")))
        }
    }

    /// Size of the defining matrix representation.
    pub fn matrix_size(&self) -> usize {
        match self {
            GroupId::U1 => 1,
            GroupId::SU(n) => *n,
        }
    }

    /// Real dimension of the Lie algebra.
    pub fn algebra_dim(&self) -> usize {
        match self {
            GroupId::U1 => 1,
            GroupId::SU(n) => n * n - 1,
        }
    }

    /// Orthogonal basis of the Lie algebra: `i` times the generalized
    /// Gell-Mann matrices (Pauli matrices for SU(2)), `i` for U(1).
    /// Every basis element has `tr(B^† B) = 2` except U(1) where it is 1.
    pub fn basis(&self) -> Vec<CMat> {
        let i = C64::i();
        match self {
            GroupId::U1 => vec![CMat::from_element(1, 1, i)],
            GroupId::SU(n) => {
                let n = *n;
                let mut out = Vec::with_capacity(n * n - 1);
                for j in 0..n {
                    for k in (j + 1)..n {
                        let mut s = CMat::zeros(n, n);
                        s[(j, k)] = i;
                        s[(k, j)] = i;
                        out.push(s);
                        let mut a = CMat::zeros(n, n);
                        // i * (-i E_jk + i E_kj)
                        a[(j, k)] = C64::new(1.0, 0.0);
                        a[(k, j)] = C64::new(-1.0, 0.0);
                        out.push(a);
                    }
                }
                for l in 1..n {
                    let scale = (2.0 / (l as f64 * (l as f64 + 1.0))).sqrt();
                    let mut d = CMat::zeros(n, n);
                    for m in 0..l {
                        d[(m, m)] = i * scale;
                    }
                    d[(l, l)] = i * (-(l as f64) * scale);
                    out.push(d);
                }
                // Pauli ordering for SU(2): (sigma_1, sigma_2, sigma_3).
                out
            }
        }
    }

    pub fn identity(&self) -> CMat {
        CMat::identity(self.matrix_size(), self.matrix_size())
    }

    pub fn name(&self) -> String {
        match self {
            GroupId::U1 => "U1".to_string(),
            GroupId::SU(n) => format!("SU{n}"),
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name.trim().to_ascii_uppercase().replace(['(', ')'], "").as_str() {
            "U1" => Ok(GroupId::U1),
            "SU2" => Ok(GroupId::SU(2)),
            "SU3" => Ok(GroupId::SU(3)),
            "SU4" => Ok(GroupId::SU(4)),
            other => Err(Error::InvalidArgument(format!("unknown group '{other}'"))),
        }
    }
}

/// Frobenius norm of a complex matrix.
pub fn frob(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn dagger(m: &CMat) -> CMat {
    m.adjoint()
}

fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement {
    group: GroupId,
    matrix: CMat,
}

impl AlgebraElement {
    pub fn new(group: GroupId, matrix: CMat) -> Result<Self> {
        let n = group.matrix_size();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::InvalidElement(format!(
                "expected {n}x{n} matrix for {}",
                group.name()
            )));
        }
        let herm = frob(&(dagger(&matrix) + &matrix));
        if herm > ALGEBRA_TOL * (1.0 + frob(&matrix)) {
            return Err(Error::InvalidElement(format!("not anti-Hermitian (defect {herm:.3e})")));
        }
        if matches!(group, GroupId::SU(_)) && matrix.trace().norm() > ALGEBRA_TOL * (1.0 + frob(&matrix)) {
            return Err(Error::InvalidElement("su(n) element must be traceless".into()));
        }
        Ok(Self { group, matrix })
    }

    /// Builds an element without validation. Callers guarantee the invariants.
    pub(crate) fn from_matrix_unchecked(group: GroupId, matrix: CMat) -> Self {
        Self { group, matrix }
    }

    pub fn zero(group: GroupId) -> Self {
        let n = group.matrix_size();
        Self { group, matrix: CMat::zeros(n, n) }
    }

    /// Linear combination of the standard basis.
    pub fn from_coords(group: GroupId, coords: &[f64]) -> Result<Self> {
        let basis = group.basis();
        if coords.len() != basis.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} coordinates for a {}-dimensional algebra",
                coords.len(),
                basis.len()
            )));
        }
        let n = group.matrix_size();
        let mut m = CMat::zeros(n, n);
        for (c, b) in coords.iter().zip(basis.iter()) {
            m += b * C64::new(*c, 0.0);
        }
        Ok(Self { group, matrix: m })
    }

    /// Coordinates in the standard basis.
    pub fn coords(&self) -> Vec<f64> {
        algebra_coords(&self.group, &self.matrix)
    }

    pub fn group(&self) -> GroupId {
        self.group
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMat {
        self.matrix
    }

    pub fn norm(&self) -> f64 {
        frob(&self.matrix)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { group: self.group, matrix: &self.matrix * C64::new(s, 0.0) }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        same_group(self.group, other.group)?;
        Ok(Self { group: self.group, matrix: &self.matrix + &other.matrix })
    }

    pub fn bracket(&self, other: &Self) -> Result<Self> {
        same_group(self.group, other.group)?;
        Ok(Self { group: self.group, matrix: commutator(&self.matrix, &other.matrix) })
    }

    /// Sample with independent standard normal coordinates.
    pub fn random<R: Rng + ?Sized>(group: GroupId, rng: &mut R) -> Self {
        let coords: Vec<f64> = (0..group.algebra_dim()).map(|_| rng.sample(StandardNormal)).collect();
        Self::from_coords(group, &coords).expect("dimension matches basis")
    }
}

/// Real coordinates of an algebra-valued matrix in the standard basis
/// (projection with respect to `Re tr(X^† Y)`).
pub fn algebra_coords(group: &GroupId, m: &CMat) -> Vec<f64> {
    group
        .basis()
        .iter()
        .map(|b| (dagger(b) * m).trace().re / (dagger(b) * b).trace().re)
        .collect()
}

fn same_group(a: GroupId, b: GroupId) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::GroupMismatch(format!("{} vs {}", a.name(), b.name())))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    group: GroupId,
    matrix: CMat,
}

impl GroupElement {
    pub fn new(group: GroupId, matrix: CMat) -> Result<Self> {
        let n = group.matrix_size();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::InvalidElement(format!("expected {n}x{n} matrix")));
        }
        let unit = frob(&(dagger(&matrix) * &matrix - CMat::identity(n, n)));
        if unit > GROUP_TOL {
            return Err(Error::InvalidElement(format!("not unitary (defect {unit:.3e})")));
        }
        if matches!(group, GroupId::SU(_)) {
            let det = matrix.determinant();
            if (det - C64::new(1.0, 0.0)).norm() > GROUP_TOL {
                return Err(Error::InvalidElement(format!("det = {det} is not 1")));
            }
        }
        Ok(Self { group, matrix })
    }

    pub(crate) fn from_matrix_unchecked(group: GroupId, matrix: CMat) -> Self {
        Self { group, matrix }
    }

    pub fn identity(group: GroupId) -> Self {
        Self { group, matrix: group.identity() }
    }

    pub fn group(&self) -> GroupId {
        self.group
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn inverse(&self) -> Self {
        Self { group: self.group, matrix: dagger(&self.matrix) }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        same_group(self.group, other.group)?;
        Ok(Self { group: self.group, matrix: &self.matrix * &other.matrix })
    }

    /// Haar-random SU(2) element (normalized Gaussian quaternion).
    pub fn haar_su2<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let q: Vec<f64> = (0..4).map(|_| rng.sample(StandardNormal)).collect();
        let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
        let (a, b, c, d) = (q[0] / n, q[1] / n, q[2] / n, q[3] / n);
        // a + i(b s1 + c s2 + d s3)
        let m = CMat::from_row_slice(
            2,
            2,
            &[C64::new(a, d), C64::new(c, b), C64::new(-c, b), C64::new(a, -d)],
        );
        Self { group: GroupId::SU(2), matrix: m }
    }

    /// Random element `exp(X)` with `X` Gaussian in the algebra.
    pub fn random<R: Rng + ?Sized>(group: GroupId, rng: &mut R) -> Self {
        match group {
            GroupId::SU(2) => Self::haar_su2(rng),
            _ => exp_map(&AlgebraElement::random(group, rng)),
        }
    }
}

/// Matrix exponential by scaling and squaring with a degree-18 Taylor core.
pub fn mat_exp(x: &CMat) -> CMat {
    let n = x.nrows();
    let norm1 = (0..n)
        .map(|j| (0..n).map(|i| x[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut s = 0u32;
    if norm1 > 0.25 {
        s = (norm1 / 0.25).log2().ceil() as u32;
    }
    let scaled = x * C64::new(0.5f64.powi(s as i32), 0.0);
    let mut term = CMat::identity(n, n);
    let mut sum = CMat::identity(n, n);
    for k in 1..=18 {
        term = &term * &scaled * C64::new(1.0 / k as f64, 0.0);
        sum += &term;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

pub fn exp_map(x: &AlgebraElement) -> GroupElement {
    let mut m = mat_exp(&x.matrix);
    if matches!(x.group, GroupId::SU(_)) {
        m = reunitarize(&m);
    }
    GroupElement::from_matrix_unchecked(x.group, m)
}

/// One Newton step towards the nearest unitary matrix; removes rounding drift.
fn reunitarize(m: &CMat) -> CMat {
    let n = m.nrows();
    match m.clone().try_inverse() {
        Some(inv) => (m + dagger(&inv)) * C64::new(0.5, 0.0),
        None => {
            let _ = n;
            m.clone()
        }
    }
}

/// Principal square root by the Denman-Beavers iteration.
fn sqrtm(a: &CMat) -> Option<CMat> {
    let n = a.nrows();
    let mut y = a.clone();
    let mut z = CMat::identity(n, n);
    for _ in 0..100 {
        let yi = y.clone().try_inverse()?;
        let zi = z.clone().try_inverse()?;
        let y_next = (&y + zi) * C64::new(0.5, 0.0);
        let z_next = (&z + yi) * C64::new(0.5, 0.0);
        let delta = frob(&(&y_next - &y));
        y = y_next;
        z = z_next;
        if !y.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            return None;
        }
        if delta < 1e-15 * (1.0 + frob(&y)) {
            return Some(y);
        }
    }
    Some(y)
}

/// Principal matrix logarithm of a matrix near the identity region.
fn logm(g: &CMat) -> Option<CMat> {
    let n = g.nrows();
    let id = CMat::identity(n, n);
    let mut y = g.clone();
    let mut k = 0;
    while frob(&(&y - &id)) > 0.1 {
        y = sqrtm(&y)?;
        k += 1;
        if k > 60 {
            return None;
        }
    }
    // log(Y) = 2 artanh(Z), Z = (Y - I)(Y + I)^{-1}
    let z = (&y - &id) * (&y + &id).try_inverse()?;
    let z2 = &z * &z;
    let mut term = z.clone();
    let mut sum = z.clone();
    for j in 1..40 {
        term = &term * &z2;
        let add = &term * C64::new(1.0 / (2 * j + 1) as f64, 0.0);
        let small = frob(&add);
        sum += add;
        if small < 1e-18 {
            break;
        }
    }
    Some(sum * C64::new(2.0 * 2f64.powi(k), 0.0))
}

/// Smallest singular value of `dexp` at an anti-Hermitian `x`:
/// `min |2 sin(phi/2) / phi|` over differences `phi` of eigen-angles.
pub fn dexp_min_singular_value(x: &CMat) -> f64 {
    let h = x * C64::new(0.0, -1.0); // Hermitian
    let h = (&h + dagger(&h)) * C64::new(0.5, 0.0);
    let eig = nalgebra::linalg::SymmetricEigen::new(h);
    let ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let mut min = 1.0f64;
    for a in &ev {
        for b in &ev {
            let phi = a - b;
            if phi.abs() > 1e-14 {
                min = min.min((2.0 * (phi / 2.0).sin() / phi).abs());
            }
        }
    }
    min
}

pub fn log_map(g: &GroupElement) -> Result<AlgebraElement> {
    let x = logm(&g.matrix).ok_or(Error::CutLocus { sigma: 0.0 })?;
    if !x.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
        return Err(Error::CutLocus { sigma: 0.0 });
    }
    // Project onto the algebra (removes rounding residue).
    let mut x = (&x - dagger(&x)) * C64::new(0.5, 0.0);
    let sigma = dexp_min_singular_value(&x);
    if sigma < 1e-8 {
        return Err(Error::CutLocus { sigma });
    }
    if let GroupId::SU(n) = g.group {
        let tr = x.trace();
        if tr.norm() > 1e-8 {
            // principal logarithm leaves su(n) (e.g. non-identity central elements)
            return Err(Error::CutLocus { sigma });
        }
        for i in 0..n {
            x[(i, i)] -= tr / C64::new(n as f64, 0.0);
        }
    }
    Ok(AlgebraElement::from_matrix_unchecked(g.group, x))
}

pub fn adjoint_action(g: &GroupElement, x: &AlgebraElement) -> Result<AlgebraElement> {
    same_group(g.group, x.group)?;
    Ok(AlgebraElement::from_matrix_unchecked(x.group, ad(&g.matrix, &x.matrix)))
}

/// `g X g^{-1}` for a unitary `g`.
pub fn ad(g: &CMat, x: &CMat) -> CMat {
    g * x * dagger(g)
}

/// Symmetrized normalized trace polynomial `N_r * sym-tr(X_1 ... X_r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantPolynomial {
    degree: usize,
    normalization: C64,
}

impl InvariantPolynomial {
    pub fn new(degree: usize, normalization: C64) -> Result<Self> {
        if degree == 0 {
            return Err(Error::InvalidArgument("polynomial degree must be positive".into()));
        }
        Ok(Self { degree, normalization })
    }

    /// Default normalizations: `r = 1`: `(i/2pi) tr`, `r = 2`: `1/(8 pi^2) tr`,
    /// `r >= 3`: Chern-character weight `(i/2pi)^r / r!`.
    pub fn default_for(degree: usize) -> Result<Self> {
        let n = match degree {
            0 => return Err(Error::InvalidArgument("polynomial degree must be positive".into())),
            1 => C64::new(0.0, 1.0 / (2.0 * PI)),
            2 => C64::new(1.0 / (8.0 * PI * PI), 0.0),
            r => {
                let base = C64::new(0.0, 1.0 / (2.0 * PI)).powu(r as u32);
                base / C64::new((1..=r).product::<usize>() as f64, 0.0)
            }
        };
        Self::new(degree, n)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn normalization(&self) -> C64 {
        self.normalization
    }
}

/// All permutations of `0..r` (Heap's algorithm).
pub(crate) fn permutations(r: usize) -> Vec<Vec<usize>> {
    fn heap(k: usize, a: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(a.clone());
            return;
        }
        heap(k - 1, a, out);
        for i in 0..(k - 1) {
            if k % 2 == 0 {
                a.swap(i, k - 1);
            } else {
                a.swap(0, k - 1);
            }
            heap(k - 1, a, out);
        }
    }
    let mut a: Vec<usize> = (0..r).collect();
    let mut out = Vec::new();
    heap(r, &mut a, &mut out);
    out
}

/// Evaluates the polarized polynomial on raw matrices.
pub fn eval_polynomial_matrices(p: &InvariantPolynomial, args: &[&CMat]) -> Result<C64> {
    if args.len() != p.degree {
        return Err(Error::ArityMismatch { expected: p.degree, got: args.len() });
    }
    let perms = permutations(p.degree);
    let mut total = C64::new(0.0, 0.0);
    for perm in &perms {
        let mut prod = args[perm[0]].clone();
        for &i in &perm[1..] {
            prod = &prod * args[i];
        }
        total += prod.trace();
    }
    Ok(total * p.normalization / C64::new(perms.len() as f64, 0.0))
}

pub fn eval_polynomial(p: &InvariantPolynomial, args: &[AlgebraElement]) -> Result<C64> {
    if let Some(first) = args.first() {
        for a in args {
            same_group(first.group, a.group)?;
        }
    }
    let mats: Vec<&CMat> = args.iter().map(|a| &a.matrix).collect();
    eval_polynomial_matrices(p, &mats)
}

/// Basis together with structure constants `[B_b, B_c] = sum_a c^a_{bc} B_a`.
#[derive(Debug, Clone)]
pub struct StructureConstants {
    group: GroupId,
    basis: Vec<AlgebraElement>,
    c: Vec<f64>,
}

impl StructureConstants {
    pub fn for_group(group: GroupId) -> Self {
        let basis: Vec<CMat> = group.basis();
        let m = basis.len();
        let mut c = vec![0.0; m * m * m];
        for b in 0..m {
            for g in 0..m {
                let br = commutator(&basis[b], &basis[g]);
                for (a, coef) in algebra_coords(&group, &br).into_iter().enumerate() {
                    c[(a * m + b) * m + g] = coef;
                }
            }
        }
        let basis = basis
            .into_iter()
            .map(|mat| AlgebraElement::from_matrix_unchecked(group, mat))
            .collect();
        Self { group, basis, c }
    }

    pub fn group(&self) -> GroupId {
        self.group
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[AlgebraElement] {
        &self.basis
    }

    /// `c^alpha_{beta gamma}`.
    pub fn get(&self, alpha: usize, beta: usize, gamma: usize) -> f64 {
        let m = self.dim();
        self.c[(alpha * m + beta) * m + gamma]
    }
}
