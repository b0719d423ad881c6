//! Analytical and Monte-Carlo performance evaluation of multihop relay
//! chains over cascaded Rayleigh fading with MRC diversity.
//!
//! The analytic kernels are generic over the scalar type ([`Real`], either
//! `f32` or `f64`); the Monte-Carlo engine is `f64` only. The aliases below
//! are the `f64` specializations most callers want.

pub mod channel;
pub mod error;
pub mod montecarlo;
pub mod multihop;
pub mod power;
pub mod quad;
pub mod real;
pub mod special;

pub use error::{Error, Result};
pub use real::Real;

/// One relay hop (`f64`).
pub type Hop = channel::HopModel<f64>;
/// Fitted approximating-law parameters of a hop (`f64`).
pub type Severity = channel::SeverityParams<f64>;
/// An N-hop relay chain (`f64`).
pub type Chain = multihop::RelayChain<f64>;
/// A total-power split across hops (`f64`).
pub type Budget = power::PowerBudget<f64>;
/// Power-allocation solver output (`f64`).
pub type PaReport = power::PaSolveReport<f64>;

pub use montecarlo::{Histogram, SimPlan};
pub use multihop::{OutagePoint, Scheme};
