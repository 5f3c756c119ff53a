//! Closed-form mean and variance of the optimal SNR.
//!
//! The mean is exact. The variance is exact given exact third and fourth
//! moments of the envelope sum Y (available in closed form only for
//! independent UE-RIS fading); with the gamma moment-matched Y moments it
//! is a tight approximation. The printed independent-fading and Rayleigh
//! reductions are kept as separate entry points: they are algebraic
//! specializations of the general forms and double as test oracles.

use crate::analytic::fr::FrResult;
use crate::analytic::moments::curly_i;
use crate::error::Result;
use crate::scenario::Scenario;
use crate::specfun::laguerre_nu;
use crate::C64;

const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Exact mean SNR (linear scale):
///
/// E{SNR} = ( (N A ζ_d ζ_ru π √(β_d β_br β_ru)/2)
///            L_{1/2}(-κ_ru) L_{1/2}(-κ_d |a_bᴴa_d|²/A²)
///          + β_d M + β_br β_ru M (N + F_R) ) τ̄
///
/// with A = ‖R_d^{1/2} a_b‖₂.
pub fn mean_snr(sc: &Scenario, fr: &FrResult) -> Result<f64> {
    let m = sc.m() as f64;
    let n = sc.n() as f64;
    let a = sc.a_norm();
    let proj2 = sc.proj_ab_ad().norm_sqr();
    let d = &sc.d_link;
    let ru = &sc.ru_link;
    let l_ru = laguerre_nu(0.5, -ru.kappa)?;
    let l_d = laguerre_nu(0.5, -d.kappa * proj2 / (a * a))?;
    let term1 = 0.5
        * n
        * a
        * d.zeta
        * ru.zeta
        * std::f64::consts::PI
        * (d.beta * sc.beta_br * ru.beta).sqrt()
        * l_ru
        * l_d;
    Ok((term1 + d.beta * m + sc.beta_br * ru.beta * m * (n + fr.value)) * sc.tau_bar)
}

/// Printed independent-fading mean (A = √M, R_d = I); agrees with
/// [`mean_snr`] whenever both correlations vanish.
pub fn mean_snr_uncorrelated_printed(sc: &Scenario, fr: &FrResult) -> Result<f64> {
    let m = sc.m() as f64;
    let n = sc.n() as f64;
    let proj2 = sc.proj_ab_ad().norm_sqr();
    let d = &sc.d_link;
    let ru = &sc.ru_link;
    let l_ru = laguerre_nu(0.5, -ru.kappa)?;
    let l_d = laguerre_nu(0.5, -d.kappa * proj2 / m)?;
    let term1 = 0.5
        * n
        * m.sqrt()
        * d.zeta
        * ru.zeta
        * std::f64::consts::PI
        * (d.beta * sc.beta_br * ru.beta).sqrt()
        * l_ru
        * l_d;
    Ok((term1 + d.beta * m + sc.beta_br * ru.beta * m * (n + fr.value)) * sc.tau_bar)
}

/// Printed Rayleigh-fading mean (κ_d = κ_ru = 0):
/// E{SNR} = (β_d M + NAπ√(β_d β_br β_ru)/2 + β_br β_ru M (N + F)) τ̄.
pub fn mean_snr_rayleigh_printed(sc: &Scenario, fr: &FrResult) -> Result<f64> {
    let m = sc.m() as f64;
    let n = sc.n() as f64;
    let a = sc.a_norm();
    let term1 = 0.5
        * n
        * a
        * std::f64::consts::PI
        * (sc.d_link.beta * sc.beta_br * sc.ru_link.beta).sqrt();
    Ok((sc.d_link.beta * m + term1 + sc.beta_br * sc.ru_link.beta * m * (n + fr.value))
        * sc.tau_bar)
}

/// Every sub-term of the variance, kept for inspection and testing.
#[derive(Debug, Clone, Copy)]
pub struct VarianceTerms {
    /// Second moments of the six pieces of SNR² (before the mean² is
    /// removed), divided by τ̄².
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
    pub t4: f64,
    pub t5: f64,
    pub t6: f64,
    /// Direct-channel mixed-moment sub-terms of t2.
    pub t21: f64,
    pub t22: f64,
    pub t23: f64,
    /// A = ‖R_d^{1/2} a_b‖₂, B = ‖R_d a_b‖₂²/A², C = κ_d|a_dᴴa_b|²/A².
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// L_ru = ζ_ru L_{1/2}(-κ_ru), L_d = ζ_d L_{1/2}(-C).
    pub l_ru: f64,
    pub l_d: f64,
    /// 𝓘 = E{(ζ_d x + η_d a_dᴴa_b/A)|·|}.
    pub curly_i: C64,
    /// Third and fourth Y moments used.
    pub c1: f64,
    pub c2: f64,
    /// Var{SNR} assembled from the grouped closed form.
    pub variance: f64,
}

/// Variance of the optimal SNR, assembled exactly as the closed form
/// groups it. `c1` and `c2` are E{Y³}, E{Y⁴} (exact or approximated by
/// the caller).
pub fn variance_terms(sc: &Scenario, fr: &FrResult, c1: f64, c2: f64) -> Result<VarianceTerms> {
    let m = sc.m() as f64;
    let n = sc.n() as f64;
    let f = fr.value;
    let d = &sc.d_link;
    let ru = &sc.ru_link;
    let bb = sc.beta_br * ru.beta;

    let a = sc.a_norm();
    let proj_bd = sc.proj_ab_ad(); // a_bᴴ a_d
    let proj_db = proj_bd.conj(); // a_dᴴ a_b
    let proj2 = proj_bd.norm_sqr();
    let r_d_ab = &sc.r_d.r * &sc.a_b.entries;
    let b_big = r_d_ab.norm_squared() / (a * a);
    let c_big = d.kappa * proj2 / (a * a);
    let l_ru = ru.zeta * laguerre_nu(0.5, -ru.kappa)?;
    let l_d = d.zeta * laguerre_nu(0.5, -c_big)?;
    let ci = curly_i(d.zeta, proj_db * (d.eta / a))?;

    let t21 = 0.75 * b_big * d.zeta.powi(3) * SQRT_PI * laguerre_nu(1.5, -c_big)?
        - (2.0 * b_big * d.eta / a) * (proj_bd * ci).re
        + 0.5
            * l_d
            * (b_big * d.kappa * proj2 / (a * a * (1.0 + d.kappa))
                + SQRT_PI * (m - b_big) / (1.0 + d.kappa));
    let a_d_r_a_b = sc.a_d.entries.dotc(&r_d_ab); // a_dᴴ R_d a_b
    let t22 = (2.0 * d.eta / a)
        * (a_d_r_a_b * (ci - proj_db * (d.eta * SQRT_PI * l_d / (2.0 * a)))).re;
    let t23 = 0.5 * d.eta * d.eta * m * SQRT_PI * l_d;

    let norm_rhalf_ad = (sc.a_d.entries.dotc(&(&sc.r_d.r * &sc.a_d.entries))).re;
    let tr_r2: f64 = sc.r_d.r.iter().map(|e| e.norm_sqr()).sum();

    // grouped closed form
    let line1 = d.beta * d.beta * d.zeta * d.zeta
        * (2.0 * d.eta * d.eta * norm_rhalf_ad + d.zeta * d.zeta * tr_r2);
    let line2 = d.beta.powf(1.5)
        * bb.sqrt()
        * a
        * n
        * l_ru
        * std::f64::consts::PI
        * ((2.0 / SQRT_PI) * (t21 + t22 + t23) - m * l_d);
    let line3 = d.beta
        * bb
        * (4.0 * (d.eta * d.eta * proj2 + d.zeta * d.zeta * a * a) * (n + f)
            - n * n * a * a * std::f64::consts::PI.powi(2) * l_ru * l_ru * l_d * l_d / 4.0);
    let line4 = d.beta.sqrt()
        * bb.powf(1.5)
        * m
        * a
        * l_d
        * (2.0 * SQRT_PI * c1 - n * (n + f) * std::f64::consts::PI * l_ru);
    let line5 = (m * bb).powi(2) * (c2 - (n + f) * (n + f));
    let variance = (line1 + line2 + line3 + line4 + line5) * sc.tau_bar * sc.tau_bar;

    // the six second-moment pieces (E{SNR²} = Σ tᵢ · τ̄²)
    let t1 = d.beta * d.beta
        * (m * m + 2.0 * d.eta * d.eta * d.zeta * d.zeta * norm_rhalf_ad
            + d.zeta.powi(4) * tr_r2);
    let t2 = 2.0 * n * SQRT_PI * l_ru * d.beta.powf(1.5) * bb.sqrt() * a
        * (t21 + t22 + t23);
    let t3 = 2.0 * m * m * d.beta * bb * (n + f);
    let t4 = 4.0 * d.beta * bb * (n + f)
        * (d.eta * d.eta * proj2 + d.zeta * d.zeta * a * a);
    let t5 = 2.0 * a * m * SQRT_PI * d.beta.sqrt() * bb.powf(1.5) * l_d * c1;
    let t6 = (m * bb).powi(2) * c2;

    Ok(VarianceTerms {
        t1,
        t2,
        t3,
        t4,
        t5,
        t6,
        t21,
        t22,
        t23,
        a,
        b: b_big,
        c: c_big,
        l_ru,
        l_d,
        curly_i: ci,
        c1,
        c2,
        variance,
    })
}

/// Printed independent-fading variance (A = √M, B = 1, tr{R_d²} = M,
/// ‖a_d‖² = M); exact when paired with the exact uncorrelated Y moments.
pub fn variance_uncorrelated_printed(
    sc: &Scenario,
    fr: &FrResult,
    c1u: f64,
    c2u: f64,
) -> Result<f64> {
    let m = sc.m() as f64;
    let n = sc.n() as f64;
    let f = fr.value;
    let d = &sc.d_link;
    let ru = &sc.ru_link;
    let bb = sc.beta_br * ru.beta;
    let rm = m.sqrt();

    let proj_bd = sc.proj_ab_ad();
    let proj_db = proj_bd.conj();
    let proj2 = proj_bd.norm_sqr();
    let b_big = 1.0;
    let c_big = d.kappa * proj2 / m;
    let l_ru = ru.zeta * laguerre_nu(0.5, -ru.kappa)?;
    let l_d = d.zeta * laguerre_nu(0.5, -c_big)?;
    let ci = curly_i(d.zeta, proj_db * (d.eta / rm))?;

    let t21 = 0.75 * b_big * d.zeta.powi(3) * SQRT_PI * laguerre_nu(1.5, -c_big)?
        - (2.0 * b_big * d.eta / rm) * (proj_bd * ci).re
        + 0.5
            * l_d
            * (b_big * d.kappa * proj2 / (m * (1.0 + d.kappa))
                + SQRT_PI * (m - b_big) / (1.0 + d.kappa));
    let t22 = (2.0 * d.eta / rm)
        * (proj_db * (ci - proj_db * (d.eta * SQRT_PI * l_d / (2.0 * rm)))).re;
    let t23 = 0.5 * d.eta * d.eta * m * SQRT_PI * l_d;

    let line1 = d.beta * d.beta * d.zeta * d.zeta
        * (2.0 * d.eta * d.eta * m + d.zeta * d.zeta * m);
    let line2 = d.beta.powf(1.5) * bb.sqrt() * rm * n * l_ru * std::f64::consts::PI
        * ((2.0 / SQRT_PI) * (t21 + t22 + t23) - m * l_d);
    let line3 = d.beta
        * bb
        * (4.0 * (d.eta * d.eta * proj2 + d.zeta * d.zeta * m) * (n + f)
            - n * n * m * std::f64::consts::PI.powi(2) * l_ru * l_ru * l_d * l_d / 4.0);
    let line4 = d.beta.sqrt() * bb.powf(1.5) * m.powf(1.5) * l_d
        * (2.0 * SQRT_PI * c1u - n * (n + f) * std::f64::consts::PI * l_ru);
    let line5 = (m * bb).powi(2) * (c2u - (n + f) * (n + f));
    Ok((line1 + line2 + line3 + line4 + line5) * sc.tau_bar * sc.tau_bar)
}

/// Printed Rayleigh-fading variance (κ_d = κ_ru = 0):
///
/// Var = (β_d² tr{R_d²} + β_d^{3/2}√(β_br β_ru) Nπ (B - MA)
///       + β_d β_br β_ru A² (4(N+F) - N²π²/4)
///       + MA√β_d (β_br β_ru)^{3/2} (2√π C₁ - N(N+F)π)
///       + (Mβ_br β_ru)²(C₂ - (N+F)²)) τ̄²
///
/// with B = MA + a_bᴴR_d²a_b/(2A).
pub fn variance_rayleigh_printed(
    sc: &Scenario,
    fr: &FrResult,
    c1: f64,
    c2: f64,
) -> Result<f64> {
    let m = sc.m() as f64;
    let n = sc.n() as f64;
    let f = fr.value;
    let beta_d = sc.d_link.beta;
    let bb = sc.beta_br * sc.ru_link.beta;
    let a = sc.a_norm();
    let r_d_ab = &sc.r_d.r * &sc.a_b.entries;
    let b_t4 = m * a + r_d_ab.norm_squared() / (2.0 * a);
    let tr_r2: f64 = sc.r_d.r.iter().map(|e| e.norm_sqr()).sum();
    let pi = std::f64::consts::PI;
    Ok((beta_d * beta_d * tr_r2
        + beta_d.powf(1.5) * bb.sqrt() * n * pi * (b_t4 - m * a)
        + beta_d * bb * a * a * (4.0 * (n + f) - n * n * pi * pi / 4.0)
        + m * a * beta_d.sqrt() * bb.powf(1.5) * (2.0 * SQRT_PI * c1 - n * (n + f) * pi)
        + (m * bb).powi(2) * (c2 - (n + f) * (n + f)))
        * sc.tau_bar
        * sc.tau_bar)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::fr::{fr_auto, fr_rayleigh, fr_uncorrelated};
    use crate::analytic::moments::{y_moments_exact_uncorrelated, y_moments_gamma_approx};
    use crate::quad::QuadSpec;
    use crate::scenario::ScenarioConfig;
    use crate::specfun::AccuracySpec;
    use rand::Rng;
    use rand::SeedableRng;

    fn rel_err(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    fn random_config(rng: &mut impl Rng, rho_max: f64, kappa_max: f64) -> ScenarioConfig {
        let mut cfg = ScenarioConfig::baseline();
        cfg.m_y = rng.gen_range(1..=4);
        cfg.m_z = rng.gen_range(1..=4);
        cfg.n_y = rng.gen_range(1..=4);
        cfg.n_z = rng.gen_range(1..=4);
        cfg.rho_d = rng.gen_range(0.0..=rho_max);
        cfg.rho_ru = rng.gen_range(0.0..=rho_max);
        cfg.kappa_d = rng.gen_range(0.0..=kappa_max);
        cfg.kappa_ru = rng.gen_range(0.0..=kappa_max);
        cfg.beta_d = rng.gen_range(0.1..2.0);
        cfg.beta_br = rng.gen_range(0.001..0.1);
        cfg.beta_ru = rng.gen_range(0.1..2.0);
        cfg.tau_bar = rng.gen_range(0.5..2.0);
        cfg.theta_ad_deg = rng.gen_range(30.0..150.0);
        cfg.omega_ad_deg = rng.gen_range(-80.0..80.0);
        cfg.theta_dr_deg = rng.gen_range(30.0..150.0);
        cfg.omega_dr_deg = rng.gen_range(-80.0..80.0);
        cfg
    }

    #[test]
    fn mean_no_ris_path() {
        let mut cfg = ScenarioConfig::baseline();
        cfg.beta_br = 0.0;
        let sc = cfg.build().unwrap();
        let fr = fr_uncorrelated(sc.n(), sc.cfg.kappa_ru).unwrap();
        let mean = mean_snr(&sc, &fr).unwrap();
        assert!(rel_err(mean, sc.d_link.beta * sc.m() as f64 * sc.tau_bar) < 1e-14);
    }

    #[test]
    fn general_mean_reduces_to_rayleigh_printed() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x51);
        for _ in 0..20 {
            let mut cfg = random_config(&mut rng, 0.9, 0.0);
            cfg.kappa_d = 0.0;
            cfg.kappa_ru = 0.0;
            let sc = cfg.build().unwrap();
            let fr = fr_rayleigh(&sc.r_ru).unwrap();
            let general = mean_snr(&sc, &fr).unwrap();
            let printed = mean_snr_rayleigh_printed(&sc, &fr).unwrap();
            assert!(rel_err(general, printed) < 1e-9, "{general} vs {printed}");
        }
    }

    #[test]
    fn general_mean_reduces_to_uncorrelated_printed() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x52);
        for _ in 0..20 {
            let mut cfg = random_config(&mut rng, 0.0, 6.0);
            cfg.rho_d = 0.0;
            cfg.rho_ru = 0.0;
            let sc = cfg.build().unwrap();
            let fr = fr_uncorrelated(sc.n(), sc.cfg.kappa_ru).unwrap();
            let general = mean_snr(&sc, &fr).unwrap();
            let printed = mean_snr_uncorrelated_printed(&sc, &fr).unwrap();
            assert!(rel_err(general, printed) < 1e-9, "{general} vs {printed}");
        }
    }

    #[test]
    fn general_variance_reduces_to_rayleigh_printed() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x53);
        for _ in 0..20 {
            let mut cfg = random_config(&mut rng, 0.9, 0.0);
            cfg.kappa_d = 0.0;
            cfg.kappa_ru = 0.0;
            let sc = cfg.build().unwrap();
            let fr = fr_rayleigh(&sc.r_ru).unwrap();
            let (c1, c2) = match y_moments_gamma_approx(sc.n(), fr.value, 0.0) {
                Ok(v) => v,
                Err(_) => continue,
            };
            let general = variance_terms(&sc, &fr, c1, c2).unwrap().variance;
            let printed = variance_rayleigh_printed(&sc, &fr, c1, c2).unwrap();
            assert!(rel_err(general, printed) < 1e-9, "{general} vs {printed}");
        }
    }

    #[test]
    fn general_variance_reduces_to_uncorrelated_printed() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x54);
        for _ in 0..20 {
            let mut cfg = random_config(&mut rng, 0.0, 6.0);
            cfg.rho_d = 0.0;
            cfg.rho_ru = 0.0;
            let sc = cfg.build().unwrap();
            let fr = fr_uncorrelated(sc.n(), sc.cfg.kappa_ru).unwrap();
            let (c1, c2) = y_moments_exact_uncorrelated(sc.n(), sc.cfg.kappa_ru).unwrap();
            let general = variance_terms(&sc, &fr, c1, c2).unwrap().variance;
            let printed = variance_uncorrelated_printed(&sc, &fr, c1, c2).unwrap();
            assert!(rel_err(general, printed) < 1e-9, "{general} vs {printed}");
        }
    }

    #[test]
    fn grouped_form_equals_moment_assembly() {
        // Var = Σ tᵢ - (E{SNR}/τ̄)² must hold re-assembled from the pieces
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x55);
        for _ in 0..10 {
            let cfg = random_config(&mut rng, 0.7, 4.0);
            let sc = cfg.build().unwrap();
            let fr = fr_auto(
                &sc.r_ru,
                &sc.a_ru,
                sc.cfg.kappa_ru,
                &AccuracySpec::default(),
                &QuadSpec::default(),
            )
            .unwrap();
            let (c1, c2) = match y_moments_gamma_approx(sc.n(), fr.value, sc.cfg.kappa_ru) {
                Ok(v) => v,
                Err(_) => continue,
            };
            let vt = variance_terms(&sc, &fr, c1, c2).unwrap();
            let mean = mean_snr(&sc, &fr).unwrap() / sc.tau_bar;
            let second_moment = vt.t1 + vt.t2 + vt.t3 + vt.t4 + vt.t5 + vt.t6;
            let var_from_moments = (second_moment - mean * mean) * sc.tau_bar * sc.tau_bar;
            assert!(
                rel_err(vt.variance, var_from_moments) < 1e-9,
                "{} vs {}",
                vt.variance,
                var_from_moments
            );
        }
    }
}
