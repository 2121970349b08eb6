//! Outage analysis of a two-hop amplify-and-forward relay network under
//! Rayleigh fading.
//!
//! The crate evaluates closed-form cdfs for the `min(u, v)`,
//! `min(u, v, u v SNR)` and cut-set approximations of the end-to-end fading
//! gain, and checks them against a seeded Monte Carlo simulation of the exact
//! channel.

pub mod analytics;
pub mod channel;
pub mod distributions;
pub mod error;
pub mod montecarlo;
pub mod quadrature;
pub mod rng;
pub mod special;

pub use analytics::OutageQuery;
pub use channel::{FadingDraw, LinkMeans, SystemParams};
pub use distributions::ExpMean;
pub use error::{Error, Result};
pub use montecarlo::{Estimate, GainKind, SimPlan};
pub use quadrature::QuadratureSpec;
pub use special::BesselEvalPolicy;
