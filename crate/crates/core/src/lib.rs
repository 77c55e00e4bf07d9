//! Chern-Simons differential characters at desk scale.
//!
//! Transgression forms, the Cartan model of equivariant cohomology,
//! Chern-Simons actions mod Z, flat-connection moduli through surface-group
//! representations, the Atiyah-Bott form and the prequantum lift, all on a
//! small set of model manifolds with evaluable coefficient functions.

pub mod error;
pub mod liealg;
pub mod forms;
pub mod connection;
pub mod chernweil;
pub mod equivariant;
pub mod moduli;
pub mod prequantum;

pub use error::{Error, Result};
