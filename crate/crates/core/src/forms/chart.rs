//! Model manifolds as single coordinate charts with boundary identifications.

use std::f64::consts::PI;

use rand::Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ModelChart {
    /// `[0,1]^n` with opposite faces glued by unit translations, `1 <= n <= 4`.
    Torus(usize),
    /// Regular 4g-gon inscribed in the unit circle with edge word
    /// `a_1 b_1 a_1^-1 b_1^-1 ... a_g b_g a_g^-1 b_g^-1`, `1 <= g <= 3`.
    PolygonSurface(usize),
    /// `[0,1]^3` with its whole boundary collapsed to one point.
    CubeS3,
    /// Coordinates `(eta, phi) in [0, pi/2] x [0, 2pi]`; the edges `eta = 0`
    /// and `eta = pi/2` collapse to the poles.
    Sphere2,
    /// Three-sphere in Hopf coordinates `(eta, xi1, xi2)`,
    /// `(cos(eta) e^{i xi1}, sin(eta) e^{i xi2})`.
    Hopf,
    /// `R^n` (disks, planes and parameter spaces).
    Euclidean(usize),
    /// Cartesian product; coordinates of the first factor come first.
    Product(Box<ModelChart>, Box<ModelChart>),
}

/// Two points identified by the chart, with matching tangent frames and
/// directions that collapse at the first point.
#[derive(Debug, Clone)]
pub struct IdentifiedPair {
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub frame_p: Vec<Vec<f64>>,
    pub frame_q: Vec<Vec<f64>>,
    pub null_p: Vec<Vec<f64>>,
}

fn unit(n: usize, i: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[i] = 1.0;
    v
}

impl ModelChart {
    pub fn torus(n: usize) -> Result<Self> {
        if (1..=4).contains(&n) {
            Ok(ModelChart::Torus(n))
        } else {
            Err(Error::InvalidArgument(format!("Torus({n}) is not a built-in chart")))
        }
    }

    pub fn polygon(genus: usize) -> Result<Self> {
        if (1..=3).contains(&genus) {
            Ok(ModelChart::PolygonSurface(genus))
        } else {
            Err(Error::InvalidArgument(format!("polygon surface of genus {genus} is not built in")))
        }
    }

    pub fn product(a: ModelChart, b: ModelChart) -> Self {
        ModelChart::Product(Box::new(a), Box::new(b))
    }

    pub fn dim(&self) -> usize {
        match self {
            ModelChart::Torus(n) | ModelChart::Euclidean(n) => *n,
            ModelChart::PolygonSurface(_) | ModelChart::Sphere2 => 2,
            ModelChart::CubeS3 | ModelChart::Hopf => 3,
            ModelChart::Product(a, b) => a.dim() + b.dim(),
        }
    }

    pub fn name(&self) -> String {
        match self {
            ModelChart::Torus(n) => format!("torus{n}"),
            ModelChart::PolygonSurface(g) => format!("polygon({g})"),
            ModelChart::CubeS3 => "cubes3".into(),
            ModelChart::Sphere2 => "sphere2".into(),
            ModelChart::Hopf => "hopf".into(),
            ModelChart::Euclidean(n) => format!("euclidean{n}"),
            ModelChart::Product(a, b) => format!("{}x{}", a.name(), b.name()),
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        let s = name.trim().to_ascii_lowercase();
        if let Some(rest) = s.strip_prefix("torus") {
            return rest
                .parse::<usize>()
                .map_err(|_| Error::InvalidArgument(format!("bad chart '{name}'")))
                .and_then(ModelChart::torus);
        }
        if let Some(rest) = s.strip_prefix("polygon(").and_then(|r| r.strip_suffix(')')) {
            return rest
                .parse::<usize>()
                .map_err(|_| Error::InvalidArgument(format!("bad chart '{name}'")))
                .and_then(ModelChart::polygon);
        }
        if let Some(rest) = s.strip_prefix("euclidean") {
            return rest
                .parse::<usize>()
                .map(ModelChart::Euclidean)
                .map_err(|_| Error::InvalidArgument(format!("bad chart '{name}'")));
        }
        match s.as_str() {
            "cubes3" => Ok(ModelChart::CubeS3),
            "sphere2" => Ok(ModelChart::Sphere2),
            "hopf" => Ok(ModelChart::Hopf),
            _ => Err(Error::InvalidArgument(format!("unknown chart '{name}'"))),
        }
    }

    /// Vertices of the 4g-gon, counter-clockwise.
    pub fn polygon_vertices(genus: usize) -> Vec<[f64; 2]> {
        let m = 4 * genus;
        (0..m)
            .map(|k| {
                let th = 2.0 * PI * k as f64 / m as f64 - PI / 2.0 - PI / m as f64;
                [th.cos(), th.sin()]
            })
            .collect()
    }

    /// Per-axis sampling box of the fundamental domain.
    pub fn bounds(&self) -> Vec<(f64, f64)> {
        match self {
            ModelChart::Torus(n) => vec![(0.0, 1.0); *n],
            ModelChart::CubeS3 => vec![(0.0, 1.0); 3],
            ModelChart::PolygonSurface(_) => vec![(-1.0, 1.0); 2],
            ModelChart::Sphere2 => vec![(0.0, PI / 2.0), (0.0, 2.0 * PI)],
            ModelChart::Hopf => vec![(0.0, PI / 2.0), (0.0, 2.0 * PI), (0.0, 2.0 * PI)],
            ModelChart::Euclidean(n) => vec![(-1.0, 1.0); *n],
            ModelChart::Product(a, b) => {
                let mut v = a.bounds();
                v.extend(b.bounds());
                v
            }
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            ModelChart::PolygonSurface(g) => {
                let vs = Self::polygon_vertices(*g);
                (0..vs.len()).all(|k| {
                    let a = vs[k];
                    let b = vs[(k + 1) % vs.len()];
                    (b[0] - a[0]) * (x[1] - a[1]) - (b[1] - a[1]) * (x[0] - a[0]) >= 0.0
                })
            }
            ModelChart::Euclidean(_) => true,
            ModelChart::Product(a, b) => {
                let n = a.dim();
                a.contains(&x[..n]) && b.contains(&x[n..])
            }
            _ => self.bounds().iter().zip(x).all(|((lo, hi), v)| *v >= *lo && *v <= *hi),
        }
    }

    /// Uniform sample in the fundamental domain.
    pub fn sample_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let b = self.bounds();
        loop {
            let x: Vec<f64> = b.iter().map(|(lo, hi)| lo + (hi - lo) * rng.random::<f64>()).collect();
            if self.contains(&x) {
                return x;
            }
        }
    }

    /// Random pairs of points identified by the chart's gluing rules.
    pub fn identified_pairs<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> Vec<IdentifiedPair> {
        let n = self.dim();
        let basis: Vec<Vec<f64>> = (0..n).map(|i| unit(n, i)).collect();
        let mut out = Vec::with_capacity(count);
        match self {
            ModelChart::Euclidean(_) => {}
            ModelChart::Torus(_) => {
                for s in 0..count {
                    let axis = s % n;
                    let mut p = self.sample_point(rng);
                    p[axis] = 0.0;
                    let mut q = p.clone();
                    q[axis] = 1.0;
                    out.push(IdentifiedPair {
                        p,
                        q,
                        frame_p: basis.clone(),
                        frame_q: basis.clone(),
                        null_p: vec![],
                    });
                }
            }
            ModelChart::CubeS3 => {
                for s in 0..count {
                    let mut p = self.sample_point(rng);
                    let mut q = self.sample_point(rng);
                    p[s % 3] = (s / 3 % 2) as f64;
                    q[(s + 1) % 3] = (s / 6 % 2) as f64;
                    out.push(IdentifiedPair {
                        p,
                        q,
                        frame_p: vec![],
                        frame_q: vec![],
                        null_p: basis.clone(),
                    });
                }
            }
            ModelChart::Sphere2 | ModelChart::Hopf => {
                for s in 0..count {
                    let mut p = self.sample_point(rng);
                    match s % 3 {
                        0 => {
                            let axis = if n == 2 { 1 } else { 1 + (s / 3) % 2 };
                            p[axis] = 0.0;
                            let mut q = p.clone();
                            q[axis] = 2.0 * PI;
                            out.push(IdentifiedPair {
                                p,
                                q,
                                frame_p: basis.clone(),
                                frame_q: basis.clone(),
                                null_p: vec![],
                            });
                        }
                        k => {
                            // eta = 0 collapses the last angle, eta = pi/2 the first one
                            p[0] = if k == 1 { 0.0 } else { PI / 2.0 };
                            let collapsed = if n == 2 || k == 1 { n - 1 } else { 1 };
                            let mut q = p.clone();
                            q[collapsed] = 2.0 * PI * rng.random::<f64>();
                            let kept: Vec<Vec<f64>> =
                                (1..n).filter(|&i| i != collapsed).map(|i| unit(n, i)).collect();
                            out.push(IdentifiedPair {
                                p,
                                q,
                                frame_p: kept.clone(),
                                frame_q: kept,
                                null_p: vec![unit(n, collapsed)],
                            });
                        }
                    }
                }
            }
            ModelChart::PolygonSurface(g) => {
                let vs = Self::polygon_vertices(*g);
                for s in 0..count {
                    let i = s % *g;
                    let t = rng.random::<f64>();
                    let which = (s / *g) % 2; // 0: a_i, 1: b_i
                    let e = 4 * i + which;
                    let (a0, a1) = (vs[e], vs[e + 1]);
                    let (b0, b1) = (vs[(e + 3) % vs.len()], vs[e + 2]);
                    let p = vec![a0[0] + t * (a1[0] - a0[0]), a0[1] + t * (a1[1] - a0[1])];
                    let q = vec![b0[0] + t * (b1[0] - b0[0]), b0[1] + t * (b1[1] - b0[1])];
                    out.push(IdentifiedPair {
                        p,
                        q,
                        frame_p: vec![vec![a1[0] - a0[0], a1[1] - a0[1]]],
                        frame_q: vec![vec![b1[0] - b0[0], b1[1] - b0[1]]],
                        null_p: vec![],
                    });
                }
            }
            ModelChart::Product(a, b) => {
                let na = a.dim();
                let nb = b.dim();
                let pa = a.identified_pairs(count, rng);
                let pb = b.identified_pairs(count, rng);
                let from_a = pa.len();
                let lift_a = |v: &Vec<f64>| {
                    let mut w = v.clone();
                    w.extend(std::iter::repeat_n(0.0, nb));
                    w
                };
                let lift_b = |v: &Vec<f64>| {
                    let mut w = vec![0.0; na];
                    w.extend(v.iter().copied());
                    w
                };
                for (s, pair) in pa.into_iter().chain(pb).enumerate() {
                    let first = s < from_a;
                    let (p, q, fp, fq, np) = if first {
                        let y = b.sample_point(rng);
                        let mut p = pair.p.clone();
                        p.extend(&y);
                        let mut q = pair.q.clone();
                        q.extend(&y);
                        let mut fp: Vec<Vec<f64>> = pair.frame_p.iter().map(lift_a).collect();
                        let mut fq: Vec<Vec<f64>> = pair.frame_q.iter().map(lift_a).collect();
                        for i in 0..nb {
                            fp.push(unit(na + nb, na + i));
                            fq.push(unit(na + nb, na + i));
                        }
                        (p, q, fp, fq, pair.null_p.iter().map(lift_a).collect())
                    } else {
                        let x = a.sample_point(rng);
                        let mut p = x.clone();
                        p.extend(&pair.p);
                        let mut q = x;
                        q.extend(&pair.q);
                        let mut fp: Vec<Vec<f64>> = (0..na).map(|i| unit(na + nb, i)).collect();
                        let mut fq = fp.clone();
                        fp.extend(pair.frame_p.iter().map(lift_b));
                        fq.extend(pair.frame_q.iter().map(lift_b));
                        (p, q, fp, fq, pair.null_p.iter().map(lift_b).collect())
                    };
                    out.push(IdentifiedPair { p, q, frame_p: fp, frame_q: fq, null_p: np });
                }
            }
        }
        out
    }
}

impl ModelChart {
    /// Whether two coordinate points represent the same point of the manifold.
    pub fn same_point(&self, p: &[f64], q: &[f64], tol: f64) -> bool {
        let close = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol);
        let periodic = |d: f64, period: f64| ((d / period) - (d / period).round()).abs() * period <= tol;
        match self {
            ModelChart::Torus(_) => p.iter().zip(q).all(|(a, b)| periodic(a - b, 1.0)),
            ModelChart::Euclidean(_) => close(p, q),
            ModelChart::CubeS3 => {
                let on_boundary = |x: &[f64]| x.iter().any(|v| v.abs() <= tol || (v - 1.0).abs() <= tol);
                close(p, q) || (on_boundary(p) && on_boundary(q))
            }
            ModelChart::Sphere2 | ModelChart::Hopf => {
                if (p[0] - q[0]).abs() > tol {
                    return false;
                }
                let n = p.len();
                (1..n).all(|i| {
                    let collapsed = (p[0].abs() <= tol && i == n - 1)
                        || ((p[0] - PI / 2.0).abs() <= tol && (n == 2 || i == 1));
                    collapsed || periodic(p[i] - q[i], 2.0 * PI)
                })
            }
            ModelChart::PolygonSurface(g) => {
                if close(p, q) {
                    return true;
                }
                let vs = Self::polygon_vertices(*g);
                let is_vertex = |x: &[f64]| vs.iter().any(|v| close(x, v));
                if is_vertex(p) && is_vertex(q) {
                    return true;
                }
                let m = vs.len();
                for i in 0..*g {
                    for which in 0..2 {
                        let e = 4 * i + which;
                        let (a0, a1) = (vs[e], vs[e + 1]);
                        let (b0, b1) = (vs[(e + 3) % m], vs[e + 2]);
                        for (x, y) in [(p, q), (q, p)] {
                            let d = [a1[0] - a0[0], a1[1] - a0[1]];
                            let l2 = d[0] * d[0] + d[1] * d[1];
                            let t = ((x[0] - a0[0]) * d[0] + (x[1] - a0[1]) * d[1]) / l2;
                            let on_edge = [a0[0] + t * d[0], a0[1] + t * d[1]];
                            if (-tol..=1.0 + tol).contains(&t) && close(x, &on_edge) {
                                let image = [b0[0] + t * (b1[0] - b0[0]), b0[1] + t * (b1[1] - b0[1])];
                                if close(y, &image) {
                                    return true;
                                }
                            }
                        }
                    }
                }
                false
            }
            ModelChart::Product(a, b) => {
                let n = a.dim();
                a.same_point(&p[..n], &q[..n], tol) && b.same_point(&p[n..], &q[n..], tol)
            }
        }
    }
}

impl std::fmt::Display for ModelChart {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.name())
    }
}
