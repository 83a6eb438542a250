use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

pub const DEFAULT_TALBOT_NODES: usize = 64;

// Cotangent contour s(θ) = (M/t)(−σ + μθcot(αθ) + iνθ), θ ∈ (−π, π).
const SIGMA: f64 = 0.6122;
const MU: f64 = 0.5017;
const ALPHA: f64 = 0.6407;
const NU: f64 = 0.2645;

/// Inverse Laplace transform at `t > 0` by midpoint quadrature on a Talbot
/// (cotangent) contour with `m` nodes.
///
/// The contour wraps the negative real axis and crosses the positive real axis
/// at `0.171·m/t`, so `f_hat` must be analytic to the right of it. Conjugate
/// symmetry of real transforms is used to evaluate only the upper half.
pub fn talbot_ilt<F>(f_hat: F, t: f64, m: usize) -> Result<f64>
where
    F: Fn(Complex64) -> Complex64,
{
    if !(t > 0.0 && t.is_finite()) {
        return Err(invalid(format!("Talbot inversion needs t > 0, got {t}")));
    }
    if m < 2 || !m.is_multiple_of(2) {
        return Err(invalid(format!(
            "Talbot node count must be even and >= 2, got {m}"
        )));
    }
    let scale = m as f64 / t;
    let h = 2.0 * PI / m as f64;
    let mut acc = 0.0;
    for k in m / 2..m {
        let theta = -PI + (k as f64 + 0.5) * h;
        let (sin_a, cos_a) = (ALPHA * theta).sin_cos();
        let cot = cos_a / sin_a;
        let z = Complex64::new(scale * (-SIGMA + MU * theta * cot), scale * NU * theta);
        let dz = Complex64::new(
            scale * MU * (cot - ALPHA * theta / (sin_a * sin_a)),
            scale * NU,
        );
        let fz = f_hat(z);
        if !(fz.re.is_finite() && fz.im.is_finite()) {
            return Err(Error::Evaluation(format!(
                "transform is not finite at s = {z}"
            )));
        }
        acc += ((z * t).exp() * fz * dz).im;
    }
    Ok(acc * h / PI)
}
