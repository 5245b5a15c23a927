//! Secrecy performance of an untrusted full-duplex UAV relay network that
//! protects its uplink with source-based jamming.
//!
//! The crate is split the same way the analysis is:
//!
//! * [`specfun`]: log-gamma, integer-order `K_n`, Erlang distributions and
//!   adaptive quadrature on `(0, ∞)`.
//! * [`channel`]: air-to-ground path loss with elevation-dependent LoS
//!   probability, and the per-UAV average link SNRs ([`LinkBudget`]).
//! * [`secrecy`]: per-realization SINRs, the optimal jamming power split,
//!   secrecy rate and best-UAV selection.
//! * [`analytic`]: closed-form secrecy outage probability, the CDF of the
//!   destination SINR under optimal allocation, average secrecy rate and
//!   the high-SNR bounds.
//! * [`montecarlo`]: a seeded simulator that serves as the independent
//!   oracle for everything in [`analytic`].
//!
//! Rates are in nats throughout.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod channel;
mod error;
pub mod montecarlo;
pub mod secrecy;
pub mod specfun;

pub use analytic::{HighSnrConfig, HighSnrGeometry, SopBounds, SopMode};
pub use channel::{Endpoint, EnvironmentParams, LinkBudget, Scenario, UavNode};
pub use error::{Error, Result};
pub use montecarlo::{
    AntennaSampling, EstimateWithCI, PowerPolicy, SelectionPolicy, SimConfig, SimOutcome,
};
pub use secrecy::{LinkRealization, PowerSplit, Selection, SplitDecision};
pub use specfun::QuadratureSpec;
