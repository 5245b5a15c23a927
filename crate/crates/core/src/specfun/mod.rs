//! Special functions and quadrature used by the closed-form analysis.
//!
//! Everything here is a pure function of its arguments.

mod bessel;
mod erlang;
mod gamma;
pub(crate) mod precise;
mod quad;

pub use bessel::{bessel_k, ln_bessel_k, ln_bessel_k_orders};
pub use erlang::{erlang_cdf, erlang_pdf, erlang_sf};
pub use gamma::{ln_binomial, ln_factorial, ln_gamma};
pub use quad::{
    integrate_interval, integrate_semi_infinite, integrate_semi_infinite_scaled, QuadratureSpec,
};

/// Euler–Mascheroni constant.
pub(crate) const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
