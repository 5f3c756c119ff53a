//! Scalar special functions used by the closed-form SNR statistics.
//!
//! Everything here is real-valued, double precision and pure. The set is
//! deliberately narrow: the gamma function, the confluent hypergeometric
//! function ₁F₁ (and the half-integer Laguerre functions built on it), one
//! Whittaker M value, the regularized lower incomplete gamma, modified
//! Bessel functions I₀/I₁ for oracle integrands, and the tamed Gauss
//! hypergeometric product that drives the Rayleigh product moment.

use crate::error::{Error, Result};

/// Truncation control for series evaluations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccuracySpec {
    /// Relative tolerance at which a series is considered converged.
    pub rel_tol: f64,
    /// Maximum number of series terms before giving up.
    pub max_terms: usize,
}

impl AccuracySpec {
    pub fn new(rel_tol: f64, max_terms: usize) -> Result<Self> {
        if !(rel_tol > 0.0) {
            return Err(Error::Domain(format!("rel_tol must be > 0, got {rel_tol}")));
        }
        if max_terms == 0 {
            return Err(Error::Domain("max_terms must be >= 1".into()));
        }
        Ok(Self { rel_tol, max_terms })
    }
}

impl Default for AccuracySpec {
    fn default() -> Self {
        Self { rel_tol: 1e-12, max_terms: 500 }
    }
}

/// Lanczos coefficients (g = 7, n = 9), as used by the GNU Scientific Library.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection keeps the Lanczos argument >= 0.5
        return std::f64::consts::PI.ln() - (std::f64::consts::PI * x).sin().ln()
            - ln_gamma(1.0 - x);
    }
    let z = x - 1.0;
    let mut s = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        s += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + s.ln()
}

/// Gamma function for x > 0, evaluated through `ln_gamma` so that moderate
/// arguments cannot overflow intermediates.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain(format!("gamma_fn requires x > 0, got {x}")));
    }
    Ok(ln_gamma(x).exp())
}

/// Raw-series threshold for the alternating ₁F₁(-1/2;b;z), ₁F₁(-3/2;b;z)
/// evaluations. Beyond this the large-|z| expansion is used; the two
/// branches agree to ~1e-13 relative at the seam.
const HYP1F1_ASYMPTOTIC_SWITCH: f64 = 40.0;

fn is_half(a: f64, target: f64) -> bool {
    (a - target).abs() < 1e-12
}

/// Confluent hypergeometric function ₁F₁(a; b; z).
///
/// The raw power series alternates for z < 0 and loses digits to
/// cancellation (about 5e-5 relative by |z| = 40 for the Laguerre cases),
/// so negative arguments with b > a are routed through the Kummer
/// transform ₁F₁(a;b;z) = e^z ₁F₁(b-a;b;-z), whose series has positive
/// terms. For the half-integer degrees a ∈ {-1/2, -3/2} and z < -40 the
/// large-|z| expansion (DLMF 13.7.2, z → -∞ sector) is used instead,
/// which also covers arguments where e^z would underflow.
pub fn hyp1f1(a: f64, b: f64, z: f64, acc: &AccuracySpec) -> Result<f64> {
    if b <= 0.0 && (b - b.round()).abs() < 1e-12 {
        return Err(Error::Domain(format!(
            "hyp1f1 undefined for non-positive integer b = {b}"
        )));
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    // Terminating polynomial when a is a non-positive integer.
    if a <= 0.0 && (a - a.round()).abs() < 1e-12 {
        let k = (-a.round()) as usize;
        let mut term = 1.0f64;
        let mut sum = 1.0f64;
        for n in 0..k {
            let nf = n as f64;
            term *= (a + nf) * z / ((b + nf) * (nf + 1.0));
            sum += term;
        }
        return Ok(sum);
    }
    if z < -HYP1F1_ASYMPTOTIC_SWITCH && (is_half(a, -0.5) || is_half(a, -1.5)) {
        return Ok(hyp1f1_asymptotic_neg(a, b, z));
    }
    if z < 0.0 && b - a >= 0.0 {
        // Kummer transform; combined in log scale so e^z cannot underflow
        // against a large transformed sum.
        let ln = ln_hyp1f1_pos(b - a, b, -z, acc)?;
        return Ok((z + ln).exp());
    }

    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut small_streak = 0;
    for n in 0..acc.max_terms {
        let nf = n as f64;
        term *= (a + nf) * z / ((b + nf) * (nf + 1.0));
        sum += term;
        // two consecutive small terms, in case of alternating-sign runs
        if term.abs() <= acc.rel_tol * sum.abs() {
            small_streak += 1;
            if small_streak >= 2 {
                return Ok(sum);
            }
        } else {
            small_streak = 0;
        }
    }
    Err(Error::Accuracy {
        context: "hyp1f1 series",
        partial: sum,
        est_error: term.abs(),
    })
}

/// ln ₁F₁(a; b; z) for a >= 0, b > 0 and z >= 0, where every series term
/// is positive. Rescales on the fly, so arguments whose sum would
/// overflow f64 are still usable in log space.
pub(crate) fn ln_hyp1f1_pos(a: f64, b: f64, z: f64, acc: &AccuracySpec) -> Result<f64> {
    debug_assert!(a >= 0.0 && b > 0.0 && z >= 0.0);
    if a == 0.0 {
        return Ok(0.0);
    }
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut ln_scale = 0.0f64;
    // generous cap: convergence needs roughly 2√(az) + O(1) terms
    let cap = acc.max_terms.max((2.0 * (a * z).sqrt()) as usize + 60);
    for n in 0..cap {
        let nf = n as f64;
        term *= (a + nf) * z / ((b + nf) * (nf + 1.0));
        sum += term;
        if sum > 1e280 {
            sum *= 1e-280;
            term *= 1e-280;
            ln_scale += 280.0 * std::f64::consts::LN_10;
        }
        if term <= acc.rel_tol * sum {
            return Ok(sum.ln() + ln_scale);
        }
    }
    Err(Error::Accuracy {
        context: "hyp1f1 positive series",
        partial: sum.ln() + ln_scale,
        est_error: term / sum,
    })
}

/// Large-|z| expansion of ₁F₁(a; b; z) for z → -∞:
/// Γ(b)/Γ(b-a) · (-z)^{-a} · Σ_s (a)_s (a-b+1)_s / (s! (-z)^s).
/// Valid here only for the non-terminating negative half-integer a.
fn hyp1f1_asymptotic_neg(a: f64, b: f64, z: f64) -> f64 {
    let x = -z;
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    let mut prev = f64::INFINITY;
    for s in 0..12 {
        let sf = s as f64;
        term *= (a + sf) * (a - b + 1.0 + sf) / ((sf + 1.0) * x);
        // asymptotic series: stop once terms stop shrinking
        if term.abs() >= prev {
            break;
        }
        sum += term;
        prev = term.abs();
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    (ln_gamma(b) - ln_gamma(b - a)).exp() * x.powf(-a) * sum
}

/// Laguerre function of degree ν ∈ {1/2, 3/2}: L_ν(x) = ₁F₁(-ν; 1; x).
///
/// Only non-positive arguments arise (Ricean envelope moments), where the
/// function is >= 1 and increases in -x.
pub fn laguerre_nu(nu: f64, x: f64) -> Result<f64> {
    if !(is_half(nu, 0.5) || is_half(nu, 1.5)) {
        return Err(Error::Domain(format!(
            "laguerre_nu supports degrees 1/2 and 3/2 only, got {nu}"
        )));
    }
    if x > 0.0 {
        return Err(Error::Domain(format!(
            "laguerre_nu expects x <= 0, got {x}"
        )));
    }
    hyp1f1(-nu, 1.0, x, &AccuracySpec::default())
}

/// The tamed product (1-ρ²)² ₂F₁(3/2, 3/2; 1; ρ²) for ρ² ∈ [0, 1).
///
/// Euler's transformation turns the product into ₂F₁(-1/2, -1/2; 1; ρ²),
/// which has positive, O(m⁻³ ρ^{2m}) terms and converges on the whole
/// interval, so the divergence of the raw ₂F₁ against the vanishing
/// prefactor never materializes. The value grows from 1 at ρ² = 0 to
/// 4/π as ρ² → 1.
pub fn hyp2f1_reg_product(rho2: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&rho2) {
        return Err(Error::Domain(format!(
            "hyp2f1_reg_product requires 0 <= rho2 < 1, got {rho2}"
        )));
    }
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    for m in 0..1_000_000usize {
        let mf = m as f64;
        let r = (mf - 0.5) / (mf + 1.0);
        term *= r * r * rho2;
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    Ok(sum)
}

/// Whittaker function M_{3/2,1/2}(z) for z <= 0, by the standard reduction
/// M_{3/2,1/2}(z) = e^{-z/2} · z · ₁F₁(-1/2; 2; z).
///
/// Saturates to -∞ once e^{-z/2} overflows (z below about -1420); the
/// callers that need very large arguments use the exponential-free
/// rearrangement instead.
pub fn whittaker_m_3_2_1_2(z: f64) -> Result<f64> {
    if z > 0.0 {
        return Err(Error::Domain(format!(
            "whittaker_m_3_2_1_2 expects z <= 0, got {z}"
        )));
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    let f = hyp1f1(-0.5, 2.0, z, &AccuracySpec::default())?;
    Ok((-z / 2.0).exp() * z * f)
}

/// Modified Bessel function of the first kind, order 0 or 1, x >= 0.
///
/// Power series with all-positive terms; used only inside oracle
/// integrands, never in the shipped closed forms.
pub fn bessel_i(order: u32, x: f64) -> Result<f64> {
    if order > 1 {
        return Err(Error::Domain(format!(
            "bessel_i supports orders 0 and 1, got {order}"
        )));
    }
    if x < 0.0 {
        return Err(Error::Domain(format!("bessel_i expects x >= 0, got {x}")));
    }
    let h = x / 2.0;
    let q = h * h;
    let mut term = if order == 0 { 1.0 } else { h };
    let mut sum = term;
    for m in 0..600usize {
        let mf = m as f64;
        term *= q / ((mf + 1.0) * (mf + 1.0 + order as f64));
        sum += term;
        if term < 1e-16 * sum {
            break;
        }
    }
    Ok(sum)
}

/// Regularized lower incomplete gamma P(k, x) for k > 0, x >= 0.
///
/// Series representation for x < k + 1, continued fraction (modified Lentz)
/// otherwise; this is the CDF of a unit-scale gamma variate with shape k.
pub fn reg_gamma_p(k: f64, x: f64) -> Result<f64> {
    if !(k > 0.0) {
        return Err(Error::Domain(format!("reg_gamma_p requires k > 0, got {k}")));
    }
    if x < 0.0 {
        return Err(Error::Domain(format!("reg_gamma_p requires x >= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let ln_pref = k * x.ln() - x - ln_gamma(k);
    if x < k + 1.0 {
        // P(k,x) = x^k e^{-x}/Γ(k) · Σ_n x^n / (k (k+1) ... (k+n))
        let mut ap = k;
        let mut del = 1.0 / k;
        let mut sum = del;
        for _ in 0..10_000 {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if del.abs() < sum.abs() * 1e-16 {
                break;
            }
        }
        Ok((ln_pref.exp() * sum).clamp(0.0, 1.0))
    } else {
        // Q(k,x) via continued fraction; P = 1 - Q.
        let tiny = 1e-300;
        let mut b = x + 1.0 - k;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..10_000 {
            let an = -(i as f64) * (i as f64 - k);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                break;
            }
        }
        Ok((1.0 - ln_pref.exp() * h).clamp(0.0, 1.0))
    }
}
