//! Closed-form SNR statistics: product-moment machinery, mean, variance,
//! and the moment-matched gamma approximation of the SNR distribution.

mod fr;
mod moments;
mod variance;

pub use fr::{
    fr_auto, fr_integral, fr_perfect_corr, fr_rayleigh, fr_series, fr_uncorrelated,
    FrMethod, FrResult,
};
pub use moments::{
    curly_i, ricean_moment, y_moments_deterministic, y_moments_exact_uncorrelated,
    y_moments_gamma_approx, y_moments_printed_uncorrelated,
};
pub use variance::{
    mean_snr, mean_snr_rayleigh_printed, mean_snr_uncorrelated_printed, variance_terms,
    variance_rayleigh_printed, variance_uncorrelated_printed, VarianceTerms,
};

use crate::error::{Error, Result};
use crate::quad::QuadSpec;
use crate::scenario::Scenario;
use crate::specfun::{reg_gamma_p, AccuracySpec};

/// Analytic statistics of the optimal SNR for one scenario.
#[derive(Debug, Clone)]
pub struct SnrStatistics {
    /// Exact mean (linear scale).
    pub mean: f64,
    /// Closed-form variance; exact when `exact_variance`, else the gamma
    /// moment-matched approximation of the Y moments is inside.
    pub variance: f64,
    /// Gamma fit k_γ = mean²/variance.
    pub gamma_shape: f64,
    /// Gamma fit θ_γ = variance/mean.
    pub gamma_scale: f64,
    /// True when the UE-RIS fading is independent, so E{Y³}, E{Y⁴} (the
    /// only approximated quantities) are exact.
    pub exact_variance: bool,
    /// The product-moment sum used, with its provenance.
    pub fr: FrResult,
}

fn is_uncorrelated(r: &crate::channel::CorrelationMatrix) -> bool {
    let n = r.dim();
    for i in 0..n {
        for k in (i + 1)..n {
            if r.coeff(i, k).norm() > 1e-15 {
                return false;
            }
        }
    }
    true
}

/// Mean, variance and the gamma fit for a scenario. F_R is routed
/// automatically; the Y moments are exact under independent UE-RIS
/// fading and gamma moment-matched otherwise (falling back to the
/// deterministic-envelope limit if extreme correlation degenerates the
/// matched variance).
pub fn snr_statistics(sc: &Scenario, acc: &AccuracySpec, quad: &QuadSpec) -> Result<SnrStatistics> {
    let fr = fr_auto(&sc.r_ru, &sc.a_ru, sc.cfg.kappa_ru, acc, quad)?;
    let n = sc.n();
    let ru_uncorrelated = is_uncorrelated(&sc.r_ru);
    let (c1, c2) = if ru_uncorrelated {
        y_moments_exact_uncorrelated(n, sc.cfg.kappa_ru)?
    } else {
        match y_moments_gamma_approx(n, fr.value, sc.cfg.kappa_ru) {
            Ok(v) => v,
            Err(Error::DegenerateYVariance(_)) => {
                y_moments_deterministic(n, sc.cfg.kappa_ru)?
            }
            Err(e) => return Err(e),
        }
    };
    let mean = mean_snr(sc, &fr)?;
    let variance = variance_terms(sc, &fr, c1, c2)?.variance;
    let (gamma_shape, gamma_scale) = gamma_fit(mean, variance)?;
    Ok(SnrStatistics {
        mean,
        variance,
        gamma_shape,
        gamma_scale,
        exact_variance: ru_uncorrelated,
        fr,
    })
}

/// Moment-matched gamma parameters: k_γ = mean²/variance, θ_γ = variance/mean.
pub fn gamma_fit(mean: f64, variance: f64) -> Result<(f64, f64)> {
    if !(mean > 0.0) {
        return Err(Error::Domain(format!("gamma_fit requires mean > 0, got {mean}")));
    }
    if !(variance > 0.0) {
        return Err(Error::Domain(format!(
            "gamma_fit requires variance > 0, got {variance}"
        )));
    }
    Ok((mean * mean / variance, variance / mean))
}

/// CDF of the fitted gamma SNR approximation at linear-scale `x`.
pub fn snr_cdf(x: f64, gamma_shape: f64, gamma_scale: f64) -> Result<f64> {
    if x <= 0.0 {
        return Ok(0.0);
    }
    reg_gamma_p(gamma_shape, x / gamma_scale)
}

/// Inverse CDF of the fitted gamma by bisection on the linear scale to
/// 1e-6 relative.
pub fn snr_percentile(p: f64, gamma_shape: f64, gamma_scale: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&p) {
        return Err(Error::Domain(format!("percentile must be in [0, 1), got {p}")));
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    let mean = gamma_shape * gamma_scale;
    let sd = gamma_shape.sqrt() * gamma_scale;
    let mut hi = mean + 10.0 * sd;
    while snr_cdf(hi, gamma_shape, gamma_scale)? < p {
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::Domain("percentile bracket overflow".into()));
        }
    }
    let mut lo = 0.0f64;
    while hi - lo > 1e-6 * hi {
        let mid = 0.5 * (lo + hi);
        if snr_cdf(mid, gamma_shape, gamma_scale)? < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
