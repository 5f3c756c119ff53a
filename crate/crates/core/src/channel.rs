//! Deterministic array geometry and random channel generation.
//!
//! Steering vectors follow the vertical uniform rectangular array (VURA)
//! model in the y-z plane: the y and z phase ramps are combined with a
//! Kronecker product, `a = a_y ⊗ a_z`, so the z index varies fastest.
//! Spatial correlation uses the exponential-decay model with Euclidean
//! inter-element distance on the same grid, and channels are correlated
//! Ricean: `h̃ = η a + ζ R^{1/2} u` with `u` circular complex standard
//! normal.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::C64;

/// Rectangular array layout. `rows` counts elements along z, `cols` along
/// y, matching the `a_y ⊗ a_z` flattening order; `spacing` is the
/// nearest-neighbour element separation in wavelengths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayGeometry {
    pub rows: usize,
    pub cols: usize,
    pub spacing: f64,
}

impl ArrayGeometry {
    pub fn new(rows: usize, cols: usize, spacing: f64) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Domain("array dimensions must be positive".into()));
        }
        if !(spacing > 0.0) {
            return Err(Error::Domain(format!(
                "element spacing must be > 0, got {spacing}"
            )));
        }
        Ok(Self { rows, cols, spacing })
    }

    /// Total element count.
    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Grid coordinates (y index, z index) of a flattened element.
    fn grid(&self, n: usize) -> (usize, usize) {
        (n / self.rows, n % self.rows)
    }
}

/// Elevation/azimuth pair in degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleSet {
    pub elevation_deg: f64,
    pub azimuth_deg: f64,
}

impl AngleSet {
    pub fn new(elevation_deg: f64, azimuth_deg: f64) -> Result<Self> {
        if !(0.0..=180.0).contains(&elevation_deg) {
            return Err(Error::Domain(format!(
                "elevation must be in [0°, 180°], got {elevation_deg}"
            )));
        }
        if !(-90.0..=90.0).contains(&azimuth_deg) {
            return Err(Error::Domain(format!(
                "azimuth must be in [-90°, 90°], got {azimuth_deg}"
            )));
        }
        Ok(Self { elevation_deg, azimuth_deg })
    }
}

/// Unit-modulus steering vector; first entry is always 1.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringVector {
    pub entries: DVector<C64>,
}

impl SteeringVector {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Per-entry phases in radians.
    pub fn phases(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.arg()).collect()
    }
}

/// VURA steering vector for the given geometry and arrival/departure
/// angles: phase ramp 2π d (p sinθ sinω + q cosθ) over grid indices
/// (p, q) along y and z.
pub fn vura_steering(geom: &ArrayGeometry, angles: &AngleSet) -> SteeringVector {
    let theta = angles.elevation_deg.to_radians();
    let omega = angles.azimuth_deg.to_radians();
    let sy = theta.sin() * omega.sin();
    let sz = theta.cos();
    let step = std::f64::consts::TAU * geom.spacing;
    let entries = DVector::from_fn(geom.len(), |n, _| {
        let (p, q) = geom.grid(n);
        C64::from_polar(1.0, step * (p as f64 * sy + q as f64 * sz))
    });
    SteeringVector { entries }
}

/// Hermitian PSD correlation matrix with unit diagonal, together with its
/// principal square root.
#[derive(Debug, Clone)]
pub struct CorrelationMatrix {
    pub r: DMatrix<C64>,
    pub sqrt: DMatrix<C64>,
}

impl CorrelationMatrix {
    /// Validate and wrap a Hermitian unit-diagonal matrix.
    pub fn new(r: DMatrix<C64>) -> Result<Self> {
        for i in 0..r.nrows() {
            if (r[(i, i)] - C64::new(1.0, 0.0)).norm() > 1e-10 {
                return Err(Error::Domain(format!(
                    "correlation matrix diagonal entry {i} is {} (must be 1)",
                    r[(i, i)]
                )));
            }
        }
        let sqrt = psd_sqrt(&r)?;
        Ok(Self { r, sqrt })
    }

    pub fn dim(&self) -> usize {
        self.r.nrows()
    }

    /// Off-diagonal entry as a complex correlation coefficient.
    pub fn coeff(&self, i: usize, k: usize) -> C64 {
        self.r[(i, k)]
    }
}

/// Exponential-decay correlation on the array grid: entry (i, k) is
/// ρ^{d_{ik}/spacing} with d_{ik} the Euclidean inter-element distance,
/// so adjacent elements see ρ and diagonal neighbours ρ^{√2}.
pub fn exp_correlation(rho: f64, geom: &ArrayGeometry) -> Result<CorrelationMatrix> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::Domain(format!(
            "correlation coefficient must be in [0, 1], got {rho}"
        )));
    }
    let n = geom.len();
    let r = DMatrix::from_fn(n, n, |i, k| {
        if i == k {
            return C64::new(1.0, 0.0);
        }
        let (pi, qi) = geom.grid(i);
        let (pk, qk) = geom.grid(k);
        let dy = pi as f64 - pk as f64;
        let dz = qi as f64 - qk as f64;
        C64::new(rho.powf((dy * dy + dz * dz).sqrt()), 0.0)
    });
    CorrelationMatrix::new(r)
}

/// Relative eigenvalue floor below which a matrix is rejected as
/// indefinite; anything in (-threshold, 0) is clipped to zero.
const PSD_CLIP_REL: f64 = 1e-10;

/// Principal square root of a Hermitian PSD matrix via eigendecomposition.
/// Slightly negative eigenvalues (from rounding at high correlation) are
/// clipped to zero; genuinely negative ones are an error.
pub fn psd_sqrt(r: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    let asym = (r - r.adjoint()).map(|e| e.norm()).max();
    if asym > 1e-10 {
        return Err(Error::NotHermitian(asym));
    }
    let eig = nalgebra::SymmetricEigen::new(r.clone());
    let max_eig = eig.eigenvalues.iter().fold(0.0f64, |a, &b| a.max(b));
    let floor = -PSD_CLIP_REL * max_eig.max(1.0);
    if let Some(&min) = eig
        .eigenvalues
        .iter()
        .min_by(|a, b| a.partial_cmp(b).unwrap())
    {
        if min < floor {
            return Err(Error::PsdViolation(min));
        }
    }
    let sqrt_vals = DVector::<C64>::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues
            .iter()
            .map(|&l| C64::new(l.max(0.0).sqrt(), 0.0)),
    );
    let scaled = &eig.eigenvectors * DMatrix::from_diagonal(&sqrt_vals);
    Ok(&scaled * eig.eigenvectors.adjoint())
}

/// Ricean link parameters at unit power: η² + ζ² = 1 by construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiceanLinkParams {
    /// K-factor (LOS-to-scattered power ratio).
    pub kappa: f64,
    /// Link gain.
    pub beta: f64,
    /// LOS amplitude √(κ/(1+κ)).
    pub eta: f64,
    /// Scattered amplitude √(1/(1+κ)).
    pub zeta: f64,
}

impl RiceanLinkParams {
    pub fn new(kappa: f64, beta: f64) -> Result<Self> {
        if !(kappa >= 0.0) {
            return Err(Error::Domain(format!("K-factor must be >= 0, got {kappa}")));
        }
        if !(beta > 0.0) {
            return Err(Error::Domain(format!("link gain must be > 0, got {beta}")));
        }
        let zeta2 = 1.0 / (1.0 + kappa);
        let eta2 = 1.0 - zeta2;
        Ok(Self { kappa, beta, eta: eta2.sqrt(), zeta: zeta2.sqrt() })
    }
}

/// Rank-1 LOS RIS-BS channel √β_br · a_b a_rᴴ.
pub fn build_h_br(
    beta_br: f64,
    a_b: &SteeringVector,
    a_r: &SteeringVector,
) -> DMatrix<C64> {
    let g = C64::new(beta_br.sqrt(), 0.0);
    let col = &a_b.entries * g;
    &col * a_r.entries.adjoint()
}

/// One draw of the random channels, with the deterministic scenario pieces
/// borrowed from the prepared model.
#[derive(Debug, Clone)]
pub struct ChannelRealization<'a> {
    /// Normalized (unit link gain) UE-BS channel.
    pub h_d_tilde: DVector<C64>,
    /// Normalized UE-RIS channel.
    pub h_ru_tilde: DVector<C64>,
    pub a_b: &'a SteeringVector,
    pub a_r: &'a SteeringVector,
    pub a_d: &'a SteeringVector,
    pub a_ru: &'a SteeringVector,
    pub beta_d: f64,
    pub beta_br: f64,
    pub beta_ru: f64,
}

impl ChannelRealization<'_> {
    /// UE-BS channel h_d = √β_d · h̃_d.
    pub fn h_d(&self) -> DVector<C64> {
        &self.h_d_tilde * C64::new(self.beta_d.sqrt(), 0.0)
    }

    /// UE-RIS channel h_ru = √β_ru · h̃_ru.
    pub fn h_ru(&self) -> DVector<C64> {
        &self.h_ru_tilde * C64::new(self.beta_ru.sqrt(), 0.0)
    }
}

/// Draw a circular complex standard normal vector (unit total variance
/// per entry). Component order is fixed: for each entry, real then
/// imaginary — part of the reproducibility contract.
pub fn complex_standard_normal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DVector<C64> {
    DVector::from_fn(n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

/// Assemble one correlated Ricean realization: h̃ = η a + ζ R^{1/2} u.
/// The UE-BS vector is drawn first, then UE-RIS; deterministic for a
/// fixed RNG stream.
pub fn sample_channels<'a, R: Rng + ?Sized>(
    sc: &'a crate::scenario::Scenario,
    rng: &mut R,
) -> ChannelRealization<'a> {
    let u_d = complex_standard_normal(sc.a_d.len(), rng);
    let u_ru = complex_standard_normal(sc.a_ru.len(), rng);
    let d = &sc.d_link;
    let ru = &sc.ru_link;
    let h_d_tilde =
        &sc.a_d.entries * C64::new(d.eta, 0.0) + (&sc.r_d.sqrt * u_d) * C64::new(d.zeta, 0.0);
    let h_ru_tilde = &sc.a_ru.entries * C64::new(ru.eta, 0.0)
        + (&sc.r_ru.sqrt * u_ru) * C64::new(ru.zeta, 0.0);
    ChannelRealization {
        h_d_tilde,
        h_ru_tilde,
        a_b: &sc.a_b,
        a_r: &sc.a_r,
        a_d: &sc.a_d,
        a_ru: &sc.a_ru,
        beta_d: d.beta,
        beta_br: sc.beta_br,
        beta_ru: ru.beta,
    }
}
