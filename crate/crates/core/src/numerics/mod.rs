//! Deterministic numerical kernels used by the analytic formulas.

mod gamma;
mod quadrature;

pub use gamma::gamma_fn;
pub use quadrature::{integrate_finite, integrate_semi_infinite, QuadratureSpec};
