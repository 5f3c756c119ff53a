//! Deterministic tensor quadrature for the product-moment integrals.
//!
//! The integrands are smooth and rapidly decaying in the radial direction
//! (Gaussian weight) and periodic in the angle, so a composite 16-point
//! Gauss-Legendre rule in `r` crossed with the trapezoid rule in `θ`
//! converges quickly. Both directions are refined together by doubling
//! until two successive levels agree to the requested tolerance.

/// 16-point Gauss-Legendre abscissae on [0, 1] folded from the symmetric
/// rule on [-1, 1] (positive half; the weights already count both sides
/// through the mirrored evaluation below).
const GL16_X: [f64; 8] = [
    0.095_012_509_837_637_440_2,
    0.281_603_550_779_258_913_2,
    0.458_016_777_657_227_386_3,
    0.617_876_244_402_643_748_4,
    0.755_404_408_355_003_033_9,
    0.865_631_202_387_831_743_9,
    0.944_575_023_073_232_576_1,
    0.989_400_934_991_649_932_6,
];
const GL16_W: [f64; 8] = [
    0.189_450_610_455_068_496_3,
    0.182_603_415_044_923_588_9,
    0.169_156_519_395_002_538_2,
    0.149_595_988_816_576_732_1,
    0.124_628_971_255_533_872_0,
    0.095_158_511_682_492_784_8,
    0.062_253_523_938_647_892_9,
    0.027_152_459_411_754_094_9,
];

/// Quadrature controls for the pair-moment integrals.
#[derive(Debug, Clone, Copy)]
pub struct QuadSpec {
    /// Stop refining when successive levels differ by less than this,
    /// relative to the current estimate.
    pub rel_tol: f64,
    /// Maximum number of refinement doublings.
    pub max_refinements: u32,
    /// Radial truncation; e^{-r²} underflows the integrand well before
    /// the default of 8.6.
    pub r_max: f64,
}

impl Default for QuadSpec {
    fn default() -> Self {
        Self { rel_tol: 1e-8, max_refinements: 7, r_max: 8.6 }
    }
}

/// Composite Gauss-Legendre integration of `f` over [a, b] with `panels`
/// equal subintervals.
pub fn gl_panels<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * h;
        let half = 0.5 * h;
        let mut s = 0.0;
        for (&x, &w) in GL16_X.iter().zip(GL16_W.iter()) {
            s += w * (f(mid + half * x) + f(mid - half * x));
        }
        total += s * half;
    }
    total
}

/// Adaptive 1-D integral of `f` over [a, b]: panel count doubles until two
/// successive composite rules agree. Returns (value, est_error, converged).
pub fn integrate_1d<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    max_refinements: u32,
) -> (f64, f64, bool) {
    let mut panels = 2usize;
    let mut prev = gl_panels(&f, a, b, panels);
    for _ in 0..max_refinements {
        panels *= 2;
        let cur = gl_panels(&f, a, b, panels);
        let err = (cur - prev).abs();
        if err <= rel_tol * cur.abs().max(1e-300) {
            return (cur, err, true);
        }
        prev = cur;
    }
    let cur = gl_panels(&f, a, b, panels * 2);
    let err = (cur - prev).abs();
    (cur, err, err <= rel_tol * cur.abs().max(1e-300))
}

/// Integral of `f(r, θ)` over r ∈ [0, r_max], θ ∈ [0, 2π): trapezoid in the
/// periodic angle, composite Gauss-Legendre in the radius, refined together.
/// Returns (value, est_error, converged).
pub fn integrate_polar<F: Fn(f64, f64) -> f64>(
    f: F,
    spec: &QuadSpec,
) -> (f64, f64, bool) {
    let eval = |n_theta: usize, panels: usize| -> f64 {
        let dtheta = std::f64::consts::TAU / n_theta as f64;
        let h = spec.r_max / panels as f64;
        let mut total = 0.0;
        for p in 0..panels {
            let mid = (p as f64 + 0.5) * h;
            let half = 0.5 * h;
            for (&x, &w) in GL16_X.iter().zip(GL16_W.iter()) {
                for r in [mid + half * x, mid - half * x] {
                    let mut s = 0.0;
                    for t in 0..n_theta {
                        s += f(r, t as f64 * dtheta);
                    }
                    total += w * half * s * dtheta;
                }
            }
        }
        total
    };

    let mut n_theta = 32usize;
    let mut panels = 4usize;
    let mut prev = eval(n_theta, panels);
    for _ in 0..spec.max_refinements {
        n_theta *= 2;
        panels *= 2;
        let cur = eval(n_theta, panels);
        let err = (cur - prev).abs();
        if err <= spec.rel_tol * cur.abs().max(1e-300) {
            return (cur, err, true);
        }
        prev = cur;
    }
    (prev, f64::NAN, false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_moments_1d() {
        // ∫₀^∞ r e^{-r²} dr = 1/2, ∫₀^∞ r³ e^{-r²} dr = 1/2
        let (v1, _, ok1) = integrate_1d(|r| r * (-r * r).exp(), 0.0, 9.0, 1e-12, 10);
        let (v3, _, ok3) =
            integrate_1d(|r| r * r * r * (-r * r).exp(), 0.0, 9.0, 1e-12, 10);
        assert!(ok1 && ok3);
        assert!((v1 - 0.5).abs() < 1e-12);
        assert!((v3 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn polar_gaussian_area() {
        // ∫∫ r e^{-r²} dθ dr = π
        let (v, _, ok) = integrate_polar(|r, _| r * (-r * r).exp(), &QuadSpec::default());
        assert!(ok);
        assert!((v - std::f64::consts::PI).abs() < 1e-9);
    }

    #[test]
    fn polar_angular_harmonic() {
        // ∫∫ r e^{-r²} (1 + cos θ)² dθ dr = π (1 + 1/2) = 3π/2
        let (v, _, ok) = integrate_polar(
            |r, th| r * (-r * r).exp() * (1.0 + th.cos()).powi(2),
            &QuadSpec::default(),
        );
        assert!(ok);
        assert!((v - 1.5 * std::f64::consts::PI).abs() < 1e-9);
    }
}
