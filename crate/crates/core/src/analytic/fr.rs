//! F_R = Σ_{i≠k} E{|h̃_ru,i||h̃_ru,k|}, the correlated-Ricean product
//! moment sum that drives the N² term of the mean SNR.
//!
//! Four evaluation routes cover the parameter space:
//!
//! * a bivariate-Ricean double series (the general closed form),
//! * a 2-D quadrature of the equivalent integral (cheaper at high
//!   correlation or K-factor, where the series needs very many terms),
//! * the ρ → 1 benchmark integral,
//! * exact closed forms for independent fading and for Rayleigh fading.
//!
//! Each pair value depends only on (|ρ_ik|, cos Δθ_ik) with Δθ the
//! steering phase difference (plus the correlation phase), so values are
//! deduplicated across pairs and summed in a fixed order.

use std::collections::HashMap;

use crate::channel::{CorrelationMatrix, SteeringVector};
use crate::error::{Error, Result};
use crate::quad::{integrate_polar, QuadSpec};
use crate::specfun::{
    hyp1f1, hyp2f1_reg_product, laguerre_nu, ln_gamma, ln_hyp1f1_pos, AccuracySpec,
};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

const SQRT_PI: f64 = 1.772_453_850_905_516;
/// Off-diagonal magnitudes at or above this count as perfect correlation.
const PERFECT_CORR_EPS: f64 = 1e-12;

/// Which evaluation route produced an F_R value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrMethod {
    Series,
    Integral,
    PerfectCorr,
    Uncorrelated,
    Rayleigh,
}

impl std::fmt::Display for FrMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            FrMethod::Series => "series",
            FrMethod::Integral => "integral",
            FrMethod::PerfectCorr => "perfect_corr",
            FrMethod::Uncorrelated => "uncorrelated",
            FrMethod::Rayleigh => "rayleigh",
        };
        f.write_str(s)
    }
}

/// An F_R value with its provenance and a truncation-error estimate.
/// The value always satisfies the Hölder bound 0 ≤ F_R ≤ N(N-1).
#[derive(Debug, Clone, Copy)]
pub struct FrResult {
    pub value: f64,
    pub method: FrMethod,
    pub est_error: f64,
}

/// Pair parameters: envelope correlation magnitude and the cosine of the
/// effective LOS phase difference (steering phase difference plus the
/// phase of the complex correlation coefficient).
#[derive(Debug, Clone, Copy)]
struct PairClass {
    rho: f64,
    cos_dth: f64,
}

/// Collect the (i < k) pair classes with multiplicity 2 each (the product
/// moment is symmetric), deduplicated so grid-structured arrays evaluate
/// each distinct displacement once.
fn pair_classes(
    r_ru: &CorrelationMatrix,
    a_ru: &SteeringVector,
) -> Result<Vec<(PairClass, f64)>> {
    let n = r_ru.dim();
    if a_ru.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: a_ru.len() });
    }
    let phases = a_ru.phases();
    let mut classes: HashMap<(u64, u64), f64> = HashMap::new();
    for i in 0..n {
        for k in (i + 1)..n {
            let c = r_ru.coeff(i, k);
            let rho = c.norm().min(1.0);
            let cos_dth = (phases[i] - phases[k] + c.arg()).cos();
            *classes
                .entry((rho.to_bits(), cos_dth.to_bits()))
                .or_insert(0.0) += 2.0;
        }
    }
    let mut out: Vec<(PairClass, f64)> = classes
        .into_iter()
        .map(|((rb, cb), mult)| {
            (PairClass { rho: f64::from_bits(rb), cos_dth: f64::from_bits(cb) }, mult)
        })
        .collect();
    out.sort_by(|a, b| {
        (a.0.rho, a.0.cos_dth)
            .partial_cmp(&(b.0.rho, b.0.cos_dth))
            .unwrap()
    });
    Ok(out)
}

/// Evaluate every class (in parallel when enabled) and accumulate
/// mult-weighted values with compensated summation in sorted-class order,
/// so results are independent of the worker count.
fn sum_classes<F>(classes: &[(PairClass, f64)], eval: F) -> Result<(f64, f64)>
where
    F: Fn(&PairClass) -> Result<(f64, f64)> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    let vals: Vec<Result<(f64, f64)>> =
        classes.par_iter().map(|(c, _)| eval(c)).collect();
    #[cfg(not(feature = "parallel"))]
    let vals: Vec<Result<(f64, f64)>> = classes.iter().map(|(c, _)| eval(c)).collect();

    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    let mut err = 0.0f64;
    for ((_, mult), val) in classes.iter().zip(vals) {
        let (v, e) = val?;
        err += mult * e;
        let y = mult * v - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    Ok((sum, err))
}

fn clamp_to_holder(mut fr: FrResult, n: usize) -> FrResult {
    let bound = (n * n.saturating_sub(1)) as f64;
    fr.value = fr.value.clamp(0.0, bound);
    fr
}

/// General double-series for one pair: the bivariate Ricean cross moment
///
/// E{r_i r_k} = (1-ρ²)²/(1+κ) e^{-2κ(1-μ_c)/(1-ρ²)}
///   Σ_m Σ_{n≤m} ε_n cos(nφ) ρ^{2m-n} w^n / (m!(m-n)!(n!)²)
///   Γ²(m+3/2) ₁F₁²(m+3/2; n+1; w)
///
/// with w = κ(1+ρ²-2μ_c)/(1-ρ²), μ_c = ρ cos Δθ, μ_s = ρ sin Δθ,
/// φ = arg{(1+ρ²)μ_c κ - 2κρ² + j(1-ρ²)μ_s κ}, ε_0 = 1, ε_n = 2.
/// Terms are assembled in log scale (they reach e⁶⁰⁰ before the ρ^{2m}
/// decay wins at high correlation).
fn pair_series(cls: &PairClass, kappa: f64, acc: &AccuracySpec) -> Result<(f64, f64)> {
    let rho = cls.rho;
    if rho < 1e-15 {
        // independent pair: E{r_i}E{r_k}
        let zeta = (1.0 / (1.0 + kappa)).sqrt();
        let m1 = 0.5 * SQRT_PI * zeta * laguerre_nu(0.5, -kappa)?;
        return Ok((m1 * m1, 0.0));
    }
    if rho >= 1.0 - PERFECT_CORR_EPS {
        return Err(Error::Domain(
            "pair correlation is 1; use the perfect-correlation benchmark".into(),
        ));
    }
    let one_m = 1.0 - rho * rho;
    let mu_c = rho * cls.cos_dth;
    let mu_s = rho * (1.0 - cls.cos_dth * cls.cos_dth).max(0.0).sqrt();
    let w = kappa * (1.0 + rho * rho - 2.0 * mu_c) / one_m;
    let ln_pref = 2.0 * one_m.ln() - (1.0 + kappa).ln() - 2.0 * kappa * (1.0 - mu_c) / one_m;
    let phi = f64::atan2(
        one_m * mu_s * kappa,
        (1.0 + rho * rho) * mu_c * kappa - 2.0 * kappa * rho * rho,
    );
    let ln_rho = rho.ln();
    let ln_w = if w > 0.0 { w.ln() } else { f64::NEG_INFINITY };
    let inner_acc = AccuracySpec { rel_tol: 1e-13, max_terms: 4000 };

    // factorial caches, filled as m grows
    let mut ln_fact: Vec<f64> = vec![0.0];
    let mut ln_gamma_half: Vec<f64> = Vec::new();

    let mut acc_sum = SignedLnSum::new();
    let mut streak = 0usize;
    for m in 0..acc.max_terms {
        if ln_fact.len() <= m + 1 {
            let prev = *ln_fact.last().unwrap();
            ln_fact.push(prev + (ln_fact.len() as f64).ln());
        }
        if ln_gamma_half.len() <= m {
            ln_gamma_half.push(ln_gamma(m as f64 + 1.5));
        }
        let mut block_peak = f64::NEG_INFINITY;
        for nn in 0..=m {
            if nn > 0 && w == 0.0 {
                break;
            }
            let cosn = (nn as f64 * phi).cos();
            if cosn == 0.0 {
                continue;
            }
            let ln_eps = if nn == 0 { 0.0 } else { std::f64::consts::LN_2 };
            let ln_f1 = ln_hyp1f1_pos(m as f64 + 1.5, nn as f64 + 1.0, w, &inner_acc)?;
            let ln_t = ln_eps + cosn.abs().ln() + (2 * m - nn) as f64 * ln_rho
                + nn as f64 * ln_w
                - ln_fact[m]
                - ln_fact[m - nn]
                - 2.0 * ln_fact[nn]
                + 2.0 * ln_gamma_half[m]
                + 2.0 * ln_f1;
            acc_sum.add(ln_t, cosn > 0.0);
            block_peak = block_peak.max(ln_t);
        }
        let ln_total = acc_sum.ln_value();
        if m >= 3 && block_peak < ln_total + acc.rel_tol.ln() {
            streak += 1;
            if streak >= 2 {
                let value = (ln_pref + ln_total).exp();
                let est = (ln_pref + block_peak).exp() * (m + 1) as f64;
                return Ok((value, est));
            }
        } else {
            streak = 0;
        }
    }
    let partial = (ln_pref + acc_sum.ln_value()).exp();
    Err(Error::Accuracy {
        context: "bivariate Ricean product-moment series",
        partial,
        est_error: partial, // no useful bound once the peak was not passed
    })
}

/// Streaming signed log-sum-exp accumulator.
struct SignedLnSum {
    max_ln: f64,
    pos: f64,
    neg: f64,
}

impl SignedLnSum {
    fn new() -> Self {
        Self { max_ln: f64::NEG_INFINITY, pos: 0.0, neg: 0.0 }
    }

    fn add(&mut self, ln_t: f64, positive: bool) {
        if ln_t == f64::NEG_INFINITY {
            return;
        }
        if ln_t > self.max_ln {
            let scale = if self.max_ln == f64::NEG_INFINITY {
                0.0
            } else {
                (self.max_ln - ln_t).exp()
            };
            self.pos *= scale;
            self.neg *= scale;
            self.max_ln = ln_t;
        }
        let v = (ln_t - self.max_ln).exp();
        if positive {
            self.pos += v;
        } else {
            self.neg += v;
        }
    }

    fn ln_value(&self) -> f64 {
        let d = self.pos - self.neg;
        if d <= 0.0 {
            f64::NEG_INFINITY
        } else {
            d.ln() + self.max_ln
        }
    }
}

/// Integrand pieces shared by the quadrature routes: squared distance
/// from -a e^{jθ₀} to the integration point r e^{jθ}.
#[inline]
fn shifted_sq(a: f64, r: f64, cos_t: f64) -> f64 {
    (a * a + r * r + 2.0 * r * a * cos_t).max(0.0)
}

/// One pair by 2-D quadrature of the integral form (valid for ρ < 1):
///
/// E{r_i r_k} = ζ²√(1-ρ²)/(2√π) ∫∫ r e^{-r²}
///   √(|a_i|² + r² + 2r|a_i|cos θ) L_{1/2}(-b(|a_k|² + r² + 2r|a_k|cos(θ-Δ)))
///
/// with |a_i| = √κ, |a_k| = √κ/ρ, b = ρ²/(1-ρ²) and Δ the effective LOS
/// phase difference.
fn pair_integral(cls: &PairClass, kappa: f64, quad: &QuadSpec) -> Result<(f64, f64)> {
    let rho = cls.rho;
    if rho >= 1.0 - PERFECT_CORR_EPS {
        return pair_perfect_corr(cls, kappa, quad);
    }
    if rho < 1e-15 {
        let zeta = (1.0 / (1.0 + kappa)).sqrt();
        let m1 = 0.5 * SQRT_PI * zeta * laguerre_nu(0.5, -kappa)?;
        return Ok((m1 * m1, 0.0));
    }
    let zeta2 = 1.0 / (1.0 + kappa);
    let a_i = kappa.sqrt();
    let a_k = kappa.sqrt() / rho;
    let b = rho * rho / (1.0 - rho * rho);
    let delta = cls.cos_dth.acos(); // sign of Δ does not matter
    let pref = zeta2 * (1.0 - rho * rho).sqrt() / (2.0 * SQRT_PI);
    let acc = AccuracySpec { rel_tol: 1e-12, max_terms: 4000 };
    let l_half = |x: f64| {
        hyp1f1(-0.5, 1.0, -x, &acc).expect("L_{1/2} series converges for x >= 0")
    };
    let (val, err, converged) = integrate_polar(
        |r, th| {
            r * (-r * r).exp()
                * shifted_sq(a_i, r, th.cos()).sqrt()
                * l_half(b * shifted_sq(a_k, r, (th - delta).cos()))
        },
        quad,
    );
    if !converged {
        return Err(Error::Accuracy {
            context: "pair-moment quadrature",
            partial: pref * val,
            est_error: pref * err.abs(),
        });
    }
    Ok((pref * val, pref * err.abs()))
}

/// One pair in the ρ → 1 benchmark:
/// E{r_i r_k} = ζ²/π ∫∫ r e^{-r²} √(a²+r²+2ra cos θ) √(a²+r²+2ra cos(θ-Δ))
/// with a = √κ.
fn pair_perfect_corr(cls: &PairClass, kappa: f64, quad: &QuadSpec) -> Result<(f64, f64)> {
    let zeta2 = 1.0 / (1.0 + kappa);
    let a = kappa.sqrt();
    let delta = cls.cos_dth.acos();
    let pref = zeta2 / std::f64::consts::PI;
    let (val, err, converged) = integrate_polar(
        |r, th| {
            r * (-r * r).exp()
                * shifted_sq(a, r, th.cos()).sqrt()
                * shifted_sq(a, r, (th - delta).cos()).sqrt()
        },
        quad,
    );
    if !converged {
        return Err(Error::Accuracy {
            context: "perfect-correlation quadrature",
            partial: pref * val,
            est_error: pref * err.abs(),
        });
    }
    Ok((pref * val, pref * err.abs()))
}

/// F_R by the general bivariate-Ricean double series. Requires every
/// off-diagonal |ρ_ik| < 1; errors if the series does not converge within
/// `acc.max_terms` (high correlation and K-factor), in which case the
/// integral route should be used.
pub fn fr_series(
    r_ru: &CorrelationMatrix,
    a_ru: &SteeringVector,
    kappa_ru: f64,
    acc: &AccuracySpec,
) -> Result<FrResult> {
    if !(kappa_ru >= 0.0) {
        return Err(Error::Domain(format!("K-factor must be >= 0, got {kappa_ru}")));
    }
    let classes = pair_classes(r_ru, a_ru)?;
    if classes.iter().any(|(c, _)| c.rho >= 1.0 - PERFECT_CORR_EPS) {
        return Err(Error::Domain(
            "series form is indeterminate at |ρ| = 1; use the benchmark path".into(),
        ));
    }
    let (value, est_error) = sum_classes(&classes, |c| pair_series(c, kappa_ru, acc))?;
    Ok(clamp_to_holder(
        FrResult { value, method: FrMethod::Series, est_error },
        r_ru.dim(),
    ))
}

/// F_R by per-pair 2-D quadrature of the integral form. Pairs at |ρ| = 1
/// fall through to the benchmark integrand for continuity.
pub fn fr_integral(
    r_ru: &CorrelationMatrix,
    a_ru: &SteeringVector,
    kappa_ru: f64,
    quad: &QuadSpec,
) -> Result<FrResult> {
    if !(kappa_ru >= 0.0) {
        return Err(Error::Domain(format!("K-factor must be >= 0, got {kappa_ru}")));
    }
    let classes = pair_classes(r_ru, a_ru)?;
    let (value, est_error) = sum_classes(&classes, |c| pair_integral(c, kappa_ru, quad))?;
    Ok(clamp_to_holder(
        FrResult { value, method: FrMethod::Integral, est_error },
        r_ru.dim(),
    ))
}

/// F_R in the perfect-correlation benchmark (|ρ_ik| = 1 for every pair).
pub fn fr_perfect_corr(
    a_ru: &SteeringVector,
    kappa_ru: f64,
    quad: &QuadSpec,
) -> Result<FrResult> {
    if !(kappa_ru >= 0.0) {
        return Err(Error::Domain(format!("K-factor must be >= 0, got {kappa_ru}")));
    }
    let n = a_ru.len();
    let phases = a_ru.phases();
    let mut classes: HashMap<u64, f64> = HashMap::new();
    for i in 0..n {
        for k in (i + 1)..n {
            let cos_dth = (phases[i] - phases[k]).cos();
            *classes.entry(cos_dth.to_bits()).or_insert(0.0) += 2.0;
        }
    }
    let mut sorted: Vec<(PairClass, f64)> = classes
        .into_iter()
        .map(|(cb, mult)| (PairClass { rho: 1.0, cos_dth: f64::from_bits(cb) }, mult))
        .collect();
    sorted.sort_by(|a, b| a.0.cos_dth.partial_cmp(&b.0.cos_dth).unwrap());
    let (value, est_error) =
        sum_classes(&sorted, |c| pair_perfect_corr(c, kappa_ru, quad))?;
    Ok(clamp_to_holder(
        FrResult { value, method: FrMethod::PerfectCorr, est_error },
        n,
    ))
}

/// Exact F_R for independent Ricean fading:
/// πN(N-1)/4 · (ζ L_{1/2}(-κ))².
pub fn fr_uncorrelated(n: usize, kappa_ru: f64) -> Result<FrResult> {
    if n == 0 {
        return Err(Error::Domain("RIS must have at least one element".into()));
    }
    let zeta = (1.0 / (1.0 + kappa_ru)).sqrt();
    let l = zeta * laguerre_nu(0.5, -kappa_ru)?;
    let value = std::f64::consts::PI * (n * (n - 1)) as f64 / 4.0 * l * l;
    Ok(FrResult { value, method: FrMethod::Uncorrelated, est_error: 0.0 })
}

/// Exact F_R for correlated Rayleigh fading:
/// Σ_{i≠k} (π/4)(1-|ρ_ik|²)² ₂F₁(3/2,3/2;1;|ρ_ik|²), with the |ρ| = 1
/// pairs taking their limit value 1.
pub fn fr_rayleigh(r_ru: &CorrelationMatrix) -> Result<FrResult> {
    let n = r_ru.dim();
    let mut classes: HashMap<u64, f64> = HashMap::new();
    for i in 0..n {
        for k in (i + 1)..n {
            let rho = r_ru.coeff(i, k).norm().min(1.0);
            *classes.entry(rho.to_bits()).or_insert(0.0) += 2.0;
        }
    }
    let mut sorted: Vec<(f64, f64)> = classes
        .into_iter()
        .map(|(rb, mult)| (f64::from_bits(rb), mult))
        .collect();
    sorted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut value = 0.0;
    for (rho, mult) in sorted {
        let term = if rho >= 1.0 - PERFECT_CORR_EPS {
            1.0
        } else {
            std::f64::consts::FRAC_PI_4 * hyp2f1_reg_product(rho * rho)?
        };
        value += mult * term;
    }
    Ok(clamp_to_holder(
        FrResult { value, method: FrMethod::Rayleigh, est_error: 0.0 },
        n,
    ))
}

/// Correlation/K-factor region where the double series is preferred; the
/// integral route takes over beyond it (the series needs thousands of
/// terms there).
const SERIES_MAX_RHO: f64 = 0.8;
const SERIES_MAX_KAPPA: f64 = 8.0;

/// Route an F_R evaluation: exact closed forms when available, then the
/// series in its comfortable region (falling back to quadrature if the
/// term budget runs out), quadrature otherwise.
pub fn fr_auto(
    r_ru: &CorrelationMatrix,
    a_ru: &SteeringVector,
    kappa_ru: f64,
    acc: &AccuracySpec,
    quad: &QuadSpec,
) -> Result<FrResult> {
    let n = r_ru.dim();
    let mut max_rho = 0.0f64;
    let mut min_rho = f64::INFINITY;
    for i in 0..n {
        for k in (i + 1)..n {
            let rho = r_ru.coeff(i, k).norm();
            max_rho = max_rho.max(rho);
            min_rho = min_rho.min(rho);
        }
    }
    if n == 1 || max_rho < 1e-15 {
        return fr_uncorrelated(n, kappa_ru);
    }
    if kappa_ru == 0.0 {
        return fr_rayleigh(r_ru);
    }
    if min_rho >= 1.0 - PERFECT_CORR_EPS {
        return fr_perfect_corr(a_ru, kappa_ru, quad);
    }
    if max_rho <= SERIES_MAX_RHO && kappa_ru <= SERIES_MAX_KAPPA {
        match fr_series(r_ru, a_ru, kappa_ru, acc) {
            Ok(fr) => return Ok(fr),
            Err(Error::Accuracy { .. }) => {} // fall through to quadrature
            Err(e) => return Err(e),
        }
    }
    fr_integral(r_ru, a_ru, kappa_ru, quad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{exp_correlation, vura_steering, AngleSet, ArrayGeometry};
    use nalgebra::DMatrix;
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};
    use crate::C64;

    fn rel_err(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    fn ris_setup(rows: usize, cols: usize, rho: f64) -> (CorrelationMatrix, SteeringVector) {
        let geom = ArrayGeometry::new(rows, cols, 0.2).unwrap();
        let r = exp_correlation(rho, &geom).unwrap();
        let a = vura_steering(&geom, &AngleSet::new(80.94, -64.35).unwrap());
        (r, a)
    }

    #[test]
    fn uncorrelated_values() {
        assert_eq!(fr_uncorrelated(1, 3.0).unwrap().value, 0.0);
        let v = fr_uncorrelated(2, 0.0).unwrap().value;
        assert!(rel_err(v, std::f64::consts::FRAC_PI_2) < 1e-14);
        // LOS-dominated limit approaches the Hölder bound N(N-1)
        let v = fr_uncorrelated(2, 1e3).unwrap().value;
        assert!((v - 2.0).abs() < 1e-2 * 2.0, "{v}");
    }

    #[test]
    fn rayleigh_trivials() {
        let (r, _) = ris_setup(2, 2, 0.0);
        let v = fr_rayleigh(&r).unwrap().value;
        assert!(rel_err(v, std::f64::consts::PI * 12.0 / 4.0) < 1e-14);

        let (r1, _) = ris_setup(2, 2, 1.0);
        let v1 = fr_rayleigh(&r1).unwrap().value;
        assert!(rel_err(v1, 12.0) < 1e-9, "{v1}");
    }

    #[test]
    fn series_reduces_to_rayleigh_at_kappa_zero() {
        let (r, a) = ris_setup(2, 2, 0.7);
        let s = fr_series(&r, &a, 0.0, &AccuracySpec::default()).unwrap();
        let ray = fr_rayleigh(&r).unwrap();
        assert!(rel_err(s.value, ray.value) < 1e-8, "{} vs {}", s.value, ray.value);
    }

    #[test]
    fn series_single_element_is_zero() {
        let (r, a) = ris_setup(1, 1, 0.7);
        assert_eq!(fr_series(&r, &a, 1.0, &AccuracySpec::default()).unwrap().value, 0.0);
    }

    #[test]
    fn series_matches_pairwise_mc() {
        // ρ_ru = 0.7, κ_ru = 1, N = 4 (2x2 RIS): Monte-Carlo pair sums
        let (r, a) = ris_setup(2, 2, 0.7);
        let kappa = 1.0f64;
        let fr = fr_series(&r, &a, kappa, &AccuracySpec::default()).unwrap();

        let zeta = (1.0f64 / (1.0 + kappa)).sqrt();
        let eta = (kappa / (1.0 + kappa)).sqrt();
        let sqrt_r = crate::channel::psd_sqrt(&r.r).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xf4);
        let trials = 1_000_000usize;
        let n = 4usize;
        let mut acc_sum = 0.0f64;
        let inv = std::f64::consts::FRAC_1_SQRT_2;
        for _ in 0..trials {
            let u = nalgebra::DVector::<C64>::from_fn(n, |_, _| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                C64::new(re * inv, im * inv)
            });
            let h = &a.entries * C64::new(eta, 0.0) + (&sqrt_r * u) * C64::new(zeta, 0.0);
            let mags: Vec<f64> = h.iter().map(|e| e.norm()).collect();
            for i in 0..n {
                for k in 0..n {
                    if i != k {
                        acc_sum += mags[i] * mags[k];
                    }
                }
            }
        }
        let mc = acc_sum / trials as f64;
        assert!(rel_err(fr.value, mc) < 1e-2, "{} vs {}", fr.value, mc);
    }

    #[test]
    fn integral_agrees_with_series() {
        let (r, a) = ris_setup(2, 2, 0.5);
        let s = fr_series(&r, &a, 1.0, &AccuracySpec::default()).unwrap();
        let q = fr_integral(&r, &a, 1.0, &QuadSpec::default()).unwrap();
        assert!(rel_err(q.value, s.value) < 1e-4, "{} vs {}", q.value, s.value);
    }

    #[test]
    fn integral_rayleigh_identity() {
        // κ = 0 pairs reduce to the Rayleigh closed form
        let (r, a) = ris_setup(2, 2, 0.6);
        let q = fr_integral(&r, &a, 0.0, &QuadSpec::default()).unwrap();
        let ray = fr_rayleigh(&r).unwrap();
        assert!(rel_err(q.value, ray.value) < 1e-6, "{} vs {}", q.value, ray.value);
    }

    #[test]
    fn integral_high_correlation_bounds() {
        let (r, a) = ris_setup(2, 2, 0.95);
        let kappa = 6.0;
        let q = fr_integral(&r, &a, kappa, &QuadSpec::default()).unwrap();
        let n = 4.0f64;
        assert!(q.value <= n * (n - 1.0));
        let ray = fr_rayleigh(&r).unwrap();
        assert!(q.value > ray.value, "{} vs {}", q.value, ray.value);
    }

    #[test]
    fn perfect_corr_limits() {
        let (_, a) = ris_setup(2, 2, 1.0);
        // κ = 0: every pair value is exactly E{r²} = 1
        let v = fr_perfect_corr(&a, 0.0, &QuadSpec::default()).unwrap();
        assert!(rel_err(v.value, 12.0) < 1e-8, "{}", v.value);
        // LOS-dominated: pair values → 1 again (deterministic envelopes)
        let v = fr_perfect_corr(&a, 1e3, &QuadSpec::default()).unwrap();
        assert!((v.value - 12.0).abs() < 1e-3 * 12.0, "{}", v.value);
    }

    #[test]
    fn integral_continuous_into_benchmark() {
        let geom = ArrayGeometry::new(2, 2, 0.2).unwrap();
        let a = vura_steering(&geom, &AngleSet::new(80.94, -64.35).unwrap());
        let n = geom.len();
        let rho_near = 1.0 - 1e-4;
        let r_near = CorrelationMatrix::new(DMatrix::from_fn(n, n, |i, k| {
            if i == k {
                C64::new(1.0, 0.0)
            } else {
                C64::new(rho_near, 0.0)
            }
        }))
        .unwrap();
        let qi = fr_integral(&r_near, &a, 1.0, &QuadSpec::default()).unwrap();
        let qb = fr_perfect_corr(&a, 1.0, &QuadSpec::default()).unwrap();
        assert!(
            (qi.value - qb.value).abs() / qb.value < 1e-3,
            "{} vs {}",
            qi.value,
            qb.value
        );
    }

    #[test]
    fn auto_dispatch_routes() {
        let (r0, a0) = ris_setup(2, 2, 0.0);
        let acc = AccuracySpec::default();
        let quad = QuadSpec::default();
        assert_eq!(
            fr_auto(&r0, &a0, 1.0, &acc, &quad).unwrap().method,
            FrMethod::Uncorrelated
        );
        let (r, a) = ris_setup(2, 2, 0.5);
        assert_eq!(fr_auto(&r, &a, 0.0, &acc, &quad).unwrap().method, FrMethod::Rayleigh);
        assert_eq!(fr_auto(&r, &a, 2.0, &acc, &quad).unwrap().method, FrMethod::Series);
        let (rh, ah) = ris_setup(2, 2, 0.9);
        assert_eq!(
            fr_auto(&rh, &ah, 2.0, &acc, &quad).unwrap().method,
            FrMethod::Integral
        );
        let (r1, a1) = ris_setup(2, 2, 1.0);
        assert_eq!(
            fr_auto(&r1, &a1, 2.0, &acc, &quad).unwrap().method,
            FrMethod::PerfectCorr
        );
    }

    #[test]
    fn series_nonconvergence_suggests_integral() {
        // extreme correlation and K-factor exhaust a small term budget
        let (r, a) = ris_setup(2, 2, 0.8);
        let acc = AccuracySpec { rel_tol: 1e-12, max_terms: 20 };
        assert!(matches!(
            fr_series(&r, &a, 8.0, &acc),
            Err(Error::Accuracy { .. })
        ));
        // the auto route still succeeds by falling back
        let v = fr_auto(&r, &a, 8.0, &acc, &QuadSpec::default()).unwrap();
        assert_eq!(v.method, FrMethod::Integral);
    }

    #[test]
    fn holder_bound_over_parameter_sweep() {
        for rho in [0.0, 0.3, 0.7] {
            let (r, a) = ris_setup(2, 2, rho);
            for kappa in [0.0, 1.0, 4.0] {
                let fr =
                    fr_auto(&r, &a, kappa, &AccuracySpec::default(), &QuadSpec::default())
                        .unwrap();
                assert!(fr.value >= 0.0 && fr.value <= 12.0, "fr = {}", fr.value);
            }
        }
    }
}
