//! Optimal RIS phase selection and instantaneous SNR evaluation.
//!
//! With matched filtering at the BS, the SNR-maximizing RIS configuration
//! co-phases every reflected term with the projection of the direct
//! channel onto the RIS-BS steering vector: Φ = ψ diag(e^{j∠a_r})
//! diag(e^{-j∠h_ru}) with ψ = a_bᴴh_d / |a_bᴴh_d|. The resulting global
//! channel collapses to h_d + √(β_br β_ru) ψ Y a_b, where Y is the sum of
//! normalized UE-RIS envelopes.

use nalgebra::DVector;

use crate::channel::ChannelRealization;
use crate::error::{Error, Result};
use crate::C64;

/// Per-element RIS phases in radians (the reflection coefficients are
/// e^{jφ_r}, always unit modulus).
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseConfig {
    pub phases: Vec<f64>,
}

impl PhaseConfig {
    /// Diagonal reflection coefficients e^{jφ}.
    pub fn coefficients(&self) -> DVector<C64> {
        DVector::from_iterator(
            self.phases.len(),
            self.phases.iter().map(|&p| C64::from_polar(1.0, p)),
        )
    }
}

/// Linear-scale SNR together with the τ̄ it was computed at.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrValue {
    pub value: f64,
    pub tau_bar: f64,
}

/// The pieces of the optimal global channel h_d + α a_b.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalChannelParts {
    /// Unit-modulus common phase ψ = a_bᴴh_d / |a_bᴴh_d|.
    pub psi: C64,
    /// Envelope sum Y = Σ |h̃_ru,n|.
    pub y: f64,
    /// α = √(β_br β_ru) ψ Y.
    pub alpha: C64,
}

/// Threshold below which the projection a_bᴴ h_d counts as degenerate.
const DEGENERATE_PROJECTION: f64 = 1e-300;

fn psi(real: &ChannelRealization<'_>) -> Result<C64> {
    let proj = real.a_b.entries.dotc(&real.h_d());
    let mag = proj.norm();
    if mag < DEGENERATE_PROJECTION {
        return Err(Error::DegenerateProjection);
    }
    Ok(proj / mag)
}

/// SNR-optimal RIS phases for one channel realization.
///
/// Errors with [`Error::DegenerateProjection`] when a_bᴴh_d vanishes
/// (probability zero); callers that must not fail substitute ψ = 1 via
/// [`optimal_phi_or_default`].
pub fn optimal_phi(real: &ChannelRealization<'_>) -> Result<PhaseConfig> {
    optimal_phi_with_psi(real, psi(real)?)
}

/// As [`optimal_phi`], but deterministic under the degenerate projection:
/// any unit ψ is then optimal, so ψ = 1 is used.
pub fn optimal_phi_or_default(real: &ChannelRealization<'_>) -> PhaseConfig {
    let psi = psi(real).unwrap_or(C64::new(1.0, 0.0));
    optimal_phi_with_psi(real, psi).expect("dimensions fixed by the realization")
}

fn optimal_phi_with_psi(real: &ChannelRealization<'_>, psi: C64) -> Result<PhaseConfig> {
    let n = real.h_ru_tilde.len();
    if real.a_r.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: real.a_r.len() });
    }
    let psi_arg = psi.arg();
    let phases = (0..n)
        .map(|r| psi_arg + real.a_r.entries[r].arg() - real.h_ru_tilde[r].arg())
        .collect();
    Ok(PhaseConfig { phases })
}

/// Optimal-channel scalars (ψ, Y, α) for one realization.
pub fn optimal_parts(real: &ChannelRealization<'_>) -> Result<OptimalChannelParts> {
    let psi = psi(real)?;
    let y = y_statistic(&real.h_ru_tilde);
    let alpha = psi * (real.beta_br * real.beta_ru).sqrt() * y;
    Ok(OptimalChannelParts { psi, y, alpha })
}

/// Global uplink channel h = h_d + H_br Φ h_ru for an arbitrary phase
/// configuration, using the rank-1 structure of H_br.
pub fn global_channel(
    real: &ChannelRealization<'_>,
    phi: &PhaseConfig,
) -> Result<DVector<C64>> {
    let n = real.h_ru_tilde.len();
    if phi.phases.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: phi.phases.len() });
    }
    // a_rᴴ Φ h_ru = Σ conj(a_r,n) e^{jφ_n} h_ru,n
    let mut s = C64::new(0.0, 0.0);
    for r in 0..n {
        s += real.a_r.entries[r].conj() * C64::from_polar(1.0, phi.phases[r])
            * real.h_ru_tilde[r];
    }
    s *= C64::new((real.beta_br * real.beta_ru).sqrt(), 0.0);
    let root_bd = C64::new(real.beta_d.sqrt(), 0.0);
    let mut h = &real.a_b.entries * s;
    h.zip_apply(&real.h_d_tilde, |hi, di| *hi += root_bd * di);
    Ok(h)
}

/// Matched-filter SNR ‖h‖² τ̄.
pub fn snr(h: &DVector<C64>, tau_bar: f64) -> Result<SnrValue> {
    if !(tau_bar > 0.0) {
        return Err(Error::Domain(format!("tau_bar must be > 0, got {tau_bar}")));
    }
    Ok(SnrValue { value: h.norm_squared() * tau_bar, tau_bar })
}

/// Envelope sum Y = Σ_n |h̃_ru,n| of the normalized UE-RIS channel.
pub fn y_statistic(h_ru_tilde: &DVector<C64>) -> f64 {
    h_ru_tilde.iter().map(|e| e.norm()).sum()
}

/// Optimal SNR of one realization through the full pipeline
/// (phases → global channel → matched filter), with the deterministic
/// ψ = 1 substitution on a degenerate projection.
pub fn optimal_snr(real: &ChannelRealization<'_>, tau_bar: f64) -> Result<SnrValue> {
    let phi = optimal_phi_or_default(real);
    let h = global_channel(real, &phi)?;
    snr(&h, tau_bar)
}
