use crate::error::{Error, Result};

/// Quadrature and finite-difference settings shared by integration and `d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    order: usize,
    fd_step: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { order: 16, fd_step: 1e-5 }
    }
}

impl QuadratureSpec {
    pub fn new(order: usize, fd_step: f64) -> Result<Self> {
        if order < 2 {
            return Err(Error::InvalidArgument(format!("quadrature order {order} < 2")));
        }
        if !(1e-9..=1e-3).contains(&fd_step) {
            return Err(Error::InvalidArgument(format!("finite-difference step {fd_step} outside [1e-9, 1e-3]")));
        }
        Ok(Self { order, fd_step })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn fd_step(&self) -> f64 {
        self.fd_step
    }

    pub fn with_order(self, order: usize) -> Result<Self> {
        Self::new(order, self.fd_step)
    }
}

/// Gauss-Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = ((i as f64 + 0.75) / (n as f64 + 0.5) * std::f64::consts::PI).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[n - 1 - i] = 0.5 * (x + 1.0);
        weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}
