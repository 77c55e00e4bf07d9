//! Differential forms on model charts: exterior calculus by finite
//! differences and integration over parametrized chains by tensor-product
//! Gauss-Legendre quadrature.

pub mod chain;
pub mod chart;
pub mod exterior;
pub mod field;
pub mod quadrature;

pub use chain::{builtin_chain, builtin_chain_names, cube_chain, fiber_integrate, integrate, integrate_scalar, Cell, CellMap, Chain};
pub use chart::{IdentifiedPair, ModelChart};
pub use exterior::Ext;
pub use field::{BracketMode, Coefficient, Evaluator, FormField, MatrixField, PartialEvaluator, PointMap, ValueKind};
pub use quadrature::{gauss_legendre, QuadratureSpec};

/// `dω` with the given finite-difference settings.
pub fn exterior_derivative(omega: &FormField, q: &QuadratureSpec) -> crate::Result<FormField> {
    omega.exterior_derivative(q)
}

/// `ω₁ ∧ ω₂`.
pub fn wedge(a: &FormField, b: &FormField, mode: BracketMode) -> crate::Result<FormField> {
    a.wedge(b, mode)
}

/// `∂σ`.
pub fn boundary(chain: &Chain) -> Chain {
    chain.boundary()
}
