//! Experiment description and the prepared deterministic model.
//!
//! `ScenarioConfig` is the flat, serializable description of one
//! experiment (array sizes, angles, K-factors, correlations, link gains,
//! noise ratio, seed). `Scenario` is the expensive-to-build form:
//! steering vectors, correlation matrices with their square roots, and
//! link parameters, ready for both the closed forms and the simulator.

use crate::channel::{
    exp_correlation, vura_steering, AngleSet, ArrayGeometry, CorrelationMatrix,
    RiceanLinkParams, SteeringVector,
};
use crate::error::Result;
use crate::C64;

/// Full experiment description. Defaults reproduce the baseline setup:
/// a 32-antenna BS (8x4), a 64-element RIS (8x8), moderate correlation
/// ρ_d = ρ_ru = 0.7, K-factors κ_d = κ_ru = 1, link gains
/// β_d = β_ru = 0.69 and β_br = 20⁻² = 0.0025, τ̄ = 1, and one fixed
/// draw of arrival/departure angles.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    /// BS antenna columns (y) and rows (z).
    pub m_y: usize,
    pub m_z: usize,
    /// RIS element columns (y) and rows (z).
    pub n_y: usize,
    pub n_z: usize,
    /// BS antenna spacing in wavelengths.
    pub d_b: f64,
    /// RIS element spacing in wavelengths.
    pub d_r: f64,
    /// Nearest-neighbour correlation at the BS and the RIS.
    pub rho_d: f64,
    pub rho_ru: f64,
    /// Ricean K-factors of the UE-BS and UE-RIS links.
    pub kappa_d: f64,
    pub kappa_ru: f64,
    /// Link gains.
    pub beta_d: f64,
    pub beta_br: f64,
    pub beta_ru: f64,
    /// Transmit power to noise ratio E_s/σ².
    pub tau_bar: f64,
    /// RIS-BS link: arrival at the BS (→ a_b) and departure at the RIS (→ a_r).
    pub theta_a_deg: f64,
    pub omega_a_deg: f64,
    pub theta_d_deg: f64,
    pub omega_d_deg: f64,
    /// UE LOS arrival at the BS (→ a_d).
    pub theta_ad_deg: f64,
    pub omega_ad_deg: f64,
    /// UE LOS departure at the RIS (→ a_ru).
    pub theta_dr_deg: f64,
    pub omega_dr_deg: f64,
    /// Master seed for the simulator.
    pub seed: u64,
}

impl ScenarioConfig {
    pub fn baseline() -> Self {
        Self {
            m_y: 8,
            m_z: 4,
            n_y: 8,
            n_z: 8,
            d_b: 0.5,
            d_r: 0.2,
            rho_d: 0.7,
            rho_ru: 0.7,
            kappa_d: 1.0,
            kappa_ru: 1.0,
            beta_d: 0.69,
            beta_br: 0.0025,
            beta_ru: 0.69,
            tau_bar: 1.0,
            theta_a_deg: 109.9,
            omega_a_deg: -29.9,
            theta_d_deg: 77.1,
            omega_d_deg: 19.95,
            theta_ad_deg: 71.95,
            omega_ad_deg: 25.1,
            theta_dr_deg: 80.94,
            omega_dr_deg: -64.35,
            seed: 1,
        }
    }

    /// Number of BS antennas.
    pub fn m(&self) -> usize {
        self.m_y * self.m_z
    }

    /// Number of RIS elements.
    pub fn n(&self) -> usize {
        self.n_y * self.n_z
    }

    /// Resize the RIS to `n` elements, keeping the panel as square as the
    /// divisors of `n` allow (rows = largest divisor ≤ √n).
    pub fn with_ris_elements(mut self, n: usize) -> Self {
        let mut rows = 1;
        let mut d = 1;
        while d * d <= n {
            if n % d == 0 {
                rows = d;
            }
            d += 1;
        }
        self.n_z = rows;
        self.n_y = n / rows;
        self
    }

    /// Validate and precompute the deterministic model.
    pub fn build(&self) -> Result<Scenario> {
        Scenario::new(self.clone())
    }
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self::baseline()
    }
}

/// Prepared deterministic pieces of a scenario.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub cfg: ScenarioConfig,
    pub bs_geom: ArrayGeometry,
    pub ris_geom: ArrayGeometry,
    /// RIS-BS steering at the BS and at the RIS.
    pub a_b: SteeringVector,
    pub a_r: SteeringVector,
    /// UE LOS steering at the BS and at the RIS.
    pub a_d: SteeringVector,
    pub a_ru: SteeringVector,
    pub r_d: CorrelationMatrix,
    pub r_ru: CorrelationMatrix,
    pub d_link: RiceanLinkParams,
    pub ru_link: RiceanLinkParams,
    pub beta_br: f64,
    pub tau_bar: f64,
}

impl Scenario {
    pub fn new(cfg: ScenarioConfig) -> Result<Self> {
        if !(cfg.beta_br >= 0.0) {
            return Err(crate::Error::Domain(format!(
                "beta_br must be >= 0, got {}",
                cfg.beta_br
            )));
        }
        if !(cfg.tau_bar > 0.0) {
            return Err(crate::Error::Domain(format!(
                "tau_bar must be > 0, got {}",
                cfg.tau_bar
            )));
        }
        let bs_geom = ArrayGeometry::new(cfg.m_z, cfg.m_y, cfg.d_b)?;
        let ris_geom = ArrayGeometry::new(cfg.n_z, cfg.n_y, cfg.d_r)?;
        let a_b = vura_steering(&bs_geom, &AngleSet::new(cfg.theta_a_deg, cfg.omega_a_deg)?);
        let a_r = vura_steering(&ris_geom, &AngleSet::new(cfg.theta_d_deg, cfg.omega_d_deg)?);
        let a_d = vura_steering(&bs_geom, &AngleSet::new(cfg.theta_ad_deg, cfg.omega_ad_deg)?);
        let a_ru =
            vura_steering(&ris_geom, &AngleSet::new(cfg.theta_dr_deg, cfg.omega_dr_deg)?);
        let r_d = exp_correlation(cfg.rho_d, &bs_geom)?;
        let r_ru = exp_correlation(cfg.rho_ru, &ris_geom)?;
        let d_link = RiceanLinkParams::new(cfg.kappa_d, cfg.beta_d)?;
        let ru_link = RiceanLinkParams::new(cfg.kappa_ru, cfg.beta_ru)?;
        Ok(Self {
            beta_br: cfg.beta_br,
            tau_bar: cfg.tau_bar,
            cfg,
            bs_geom,
            ris_geom,
            a_b,
            a_r,
            a_d,
            a_ru,
            r_d,
            r_ru,
            d_link,
            ru_link,
        })
    }

    pub fn m(&self) -> usize {
        self.a_b.len()
    }

    pub fn n(&self) -> usize {
        self.a_r.len()
    }

    /// A = ‖R_d^{1/2} a_b‖₂, the scattered-path alignment of the RIS-BS
    /// steering vector with the direct channel.
    pub fn a_norm(&self) -> f64 {
        (&self.r_d.sqrt * &self.a_b.entries).norm()
    }

    /// a_bᴴ a_d, the LOS alignment of the RIS-BS and direct steering.
    pub fn proj_ab_ad(&self) -> C64 {
        self.a_b.entries.dotc(&self.a_d.entries)
    }
}
