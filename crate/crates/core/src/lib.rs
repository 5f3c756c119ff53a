//! Statistics of the optimal uplink SNR for a RIS-aided SIMO link.
//!
//! A single-antenna user transmits to an `M`-antenna base station, assisted
//! by an `N`-element reconfigurable intelligent surface (RIS). The RIS-BS
//! channel is rank-1 LOS; the UE-BS and UE-RIS channels are spatially
//! correlated Ricean. With the SNR-optimal RIS phases and matched-filter
//! combining, the crate computes
//!
//! * the exact closed-form mean SNR,
//! * a closed-form SNR variance (exact for independent fading, a
//!   moment-matched approximation otherwise),
//! * a gamma fit to the SNR distribution,
//! * favourable/unfavourable scenario gains and the optimal RIS size,
//!
//! and validates every closed form against an embedded Monte-Carlo channel
//! simulator. Everything is deterministic for a fixed seed, including the
//! data-parallel simulation paths (enabled by the `parallel` feature).

pub mod acceptance;
pub mod analytic;
pub mod channel;
pub mod error;
pub mod insights;
pub mod montecarlo;
pub mod quad;
pub mod ris;
pub mod scenario;
pub mod specfun;

pub use error::{Error, Result};
pub use scenario::{Scenario, ScenarioConfig};

/// Complex double-precision scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Linear-scale power ratio to decibels.
pub fn to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Decibels to linear-scale power ratio.
pub fn from_db(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}
