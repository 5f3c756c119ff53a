//! Envelope moments: single-variate Ricean moments, the complex
//! first-signed-absolute moment E{(ax+b)|ax+b|}, and the moments of the
//! envelope sum Y = Σ|h̃_ru,n| (exact under independence, gamma
//! moment-matched otherwise).

use crate::error::{Error, Result};
use crate::specfun::{hyp1f1, laguerre_nu, AccuracySpec};
use crate::C64;

const SQRT_PI: f64 = 1.772_453_850_905_516;

/// p-th moment of a unit-power Ricean envelope (η² + ζ² = 1):
/// E{r} = (ζ√π/2) L_{1/2}(-κ), E{r²} = 1,
/// E{r³} = (3ζ³√π/4) L_{3/2}(-κ), E{r⁴} = 2ζ⁴ + 4ζ²η² + η⁴.
pub fn ricean_moment(p: u32, kappa: f64) -> Result<f64> {
    if !(kappa >= 0.0) {
        return Err(Error::Domain(format!("K-factor must be >= 0, got {kappa}")));
    }
    let zeta2: f64 = 1.0 / (1.0 + kappa);
    let eta2 = 1.0 - zeta2;
    match p {
        1 => Ok(0.5 * SQRT_PI * zeta2.sqrt() * laguerre_nu(0.5, -kappa)?),
        2 => Ok(1.0),
        3 => Ok(0.75 * SQRT_PI * zeta2.powf(1.5) * laguerre_nu(1.5, -kappa)?),
        4 => Ok(2.0 * zeta2 * zeta2 + 4.0 * zeta2 * eta2 + eta2 * eta2),
        _ => Err(Error::Domain(format!("ricean_moment supports p in 1..=4, got {p}"))),
    }
}

/// E{(ax + b)|ax + b|} for x circular complex standard normal, a > 0 real,
/// b complex.
///
/// The closed form is -(3a³√π/(4|b|)) e^{j∠b - |b|²/(2a²)}
/// M_{3/2,1/2}(-|b|²/a²); expanding the Whittaker function cancels the
/// exponentials, leaving (3√π/4) a |b| ₁F₁(-1/2; 2; -|b|²/a²) e^{j∠b},
/// which stays finite for any argument size. The |b| → 0 limit is 0 by
/// circular symmetry.
pub fn curly_i(a: f64, b: C64) -> Result<C64> {
    if !(a > 0.0) {
        return Err(Error::Domain(format!("curly_i requires a > 0, got {a}")));
    }
    let mag_b = b.norm();
    if mag_b < 1e-12 {
        return Ok(C64::new(0.0, 0.0));
    }
    let t = mag_b * mag_b / (a * a);
    let f = hyp1f1(-0.5, 2.0, -t, &AccuracySpec::default())?;
    Ok(C64::from_polar(0.75 * SQRT_PI * a * mag_b * f, b.arg()))
}

/// Exact E{Y³} and E{Y⁴} of Y = Σ_{n=1}^{N} r_n for iid unit-power Ricean
/// envelopes, by the multinomial expansion over single-variate moments
/// (with E{r²} = 1):
///
/// E{Y³} = N m₃ + 3N(N-1) m₁ + N(N-1)(N-2) m₁³
/// E{Y⁴} = N m₄ + 4N(N-1) m₃m₁ + 3N(N-1) + 6N(N-1)(N-2) m₁²
///         + N(N-1)(N-2)(N-3) m₁⁴.
pub fn y_moments_exact_uncorrelated(n: usize, kappa_ru: f64) -> Result<(f64, f64)> {
    let m1 = ricean_moment(1, kappa_ru)?;
    let m3 = ricean_moment(3, kappa_ru)?;
    let m4 = ricean_moment(4, kappa_ru)?;
    let nf = n as f64;
    let f2 = nf * (nf - 1.0);
    let f3 = f2 * (nf - 2.0);
    let f4 = f3 * (nf - 3.0);
    let c1 = nf * m3 + 3.0 * f2 * m1 + f3 * m1.powi(3);
    let c2 = nf * m4 + 4.0 * f2 * m3 * m1 + 3.0 * f2 + 6.0 * f3 * m1 * m1
        + f4 * m1.powi(4);
    Ok((c1, c2))
}

/// Gamma moment-matched approximations of E{Y³} and E{Y⁴} from the exact
/// first two moments E{Y} = (N√π/2) ζ L_{1/2}(-κ) and E{Y²} = N + F_R:
/// shape a = E{Y}²/Var{Y}, scale b = Var{Y}/E{Y}, then
/// E{Y³} ≈ b³ a(a+1)(a+2), E{Y⁴} ≈ b⁴ a(a+1)(a+2)(a+3).
///
/// Errors with [`Error::DegenerateYVariance`] when F_R rounding makes
/// Var{Y} non-positive (extreme correlation); callers fall back to the
/// deterministic limit E{Y³} = E{Y}³, E{Y⁴} = E{Y}⁴.
pub fn y_moments_gamma_approx(n: usize, fr: f64, kappa_ru: f64) -> Result<(f64, f64)> {
    let nf = n as f64;
    let ey = nf * ricean_moment(1, kappa_ru)?;
    let var = nf + fr - ey * ey;
    if !(var > 0.0) {
        return Err(Error::DegenerateYVariance(var));
    }
    let a = ey * ey / var;
    let b = var / ey;
    let c1 = b.powi(3) * a * (a + 1.0) * (a + 2.0);
    let c2 = b.powi(4) * a * (a + 1.0) * (a + 2.0) * (a + 3.0);
    Ok((c1, c2))
}

/// Deterministic-envelope limit of the Y moments (LOS-dominated fading):
/// E{Y³} = E{Y}³, E{Y⁴} = E{Y}⁴.
pub fn y_moments_deterministic(n: usize, kappa_ru: f64) -> Result<(f64, f64)> {
    let ey = n as f64 * ricean_moment(1, kappa_ru)?;
    Ok((ey.powi(3), ey.powi(4)))
}

/// The literature's printed closed forms for the exact uncorrelated Y
/// moments, kept verbatim for comparison only. Their undefined symbol is
/// read as L_ru1 = ζ³ L_{3/2}(-κ), which reproduces the third moment
/// exactly but leaves the fourth moment inconsistent with the multinomial
/// expansion (see the comparison report); the shipped path is
/// [`y_moments_exact_uncorrelated`].
pub fn y_moments_printed_uncorrelated(n: usize, kappa_ru: f64) -> Result<(f64, f64)> {
    let zeta2 = 1.0 / (1.0 + kappa_ru);
    let eta2 = 1.0 - zeta2;
    let zeta = zeta2.sqrt();
    let l_ru = zeta * laguerre_nu(0.5, -kappa_ru)?;
    let l_ru1 = zeta.powi(3) * laguerre_nu(1.5, -kappa_ru)?;
    let nf = n as f64;
    let f2 = nf * (nf - 1.0);
    let f3 = f2 * (nf - 2.0);
    let f4 = f3 * (nf - 3.0);
    let c1u = 0.75 * SQRT_PI * nf * l_ru1
        + SQRT_PI.powi(3) * f3 * l_ru.powi(3) / 8.0
        + 1.5 * SQRT_PI * f2 * l_ru;
    let c2u = nf * (2.0 * zeta2 + eta2 * (4.0 * zeta + eta2))
        + std::f64::consts::PI.powi(2) * f4 * l_ru.powi(4) / 16.0
        + 3.0 * f2 * (1.0 + SQRT_PI * l_ru1)
        + 1.5 * std::f64::consts::PI * f3 * l_ru.powi(2);
    Ok((c1u, c2u))
}
