//! Built-in robustness quantities: the stability margin of a characteristic
//! polynomial and the peak gain of a rational transfer function on a
//! frequency grid.

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

/// Largest supported polynomial degree.
pub const MAX_DEGREE: usize = 64;

/// Normwise relative backward error every returned root must reach.
pub const ROOT_TOLERANCE: f64 = 1e-10;

/// Denominator magnitudes below this make a peak-gain sample undefined.
pub const SINGULAR_DENOMINATOR: f64 = 1e-300;

const POLISH_ITERATIONS: usize = 100;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolyError {
    #[error("leading coefficient is zero")]
    ZeroLeading,
    #[error("polynomial needs degree >= 1")]
    DegreeTooLow,
    #[error("degree {0} exceeds the cap of {MAX_DEGREE}")]
    DegreeTooHigh(usize),
    #[error("coefficients must be finite")]
    NonFinite,
    #[error("root finding did not reach the residual tolerance (backward error {0:e})")]
    NoConvergence(f64),
    #[error("invalid frequency grid: {0}")]
    InvalidGrid(String),
    #[error("denominator vanishes at omega = {0}")]
    SingularDenominator(f64),
}

/// p(z) and p'(z) for real coefficients, highest degree first.
fn horner_with_derivative(coeffs: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(coeffs[0], 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &c in &coeffs[1..] {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

fn horner(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs.iter().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// Normwise backward error |p(z)| / (max|c_k| Σ|z|^k).
///
/// The componentwise form can never be small next to a zero coefficient
/// (an exact root at 0), so the coefficient scale is shared.
fn backward_error(coeffs: &[f64], z: Complex64) -> f64 {
    let r = z.norm();
    let powers = coeffs.iter().fold(0.0, |acc, _| acc * r + 1.0);
    let scale = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs())) * powers;
    let p = horner(coeffs, z).norm();
    if scale == 0.0 {
        p
    } else {
        p / scale
    }
}

fn companion_eigenvalues(monic: &[f64]) -> Vec<Complex64> {
    let d = monic.len() - 1;
    let mut m = DMatrix::<f64>::zeros(d, d);
    for j in 0..d {
        m[(0, j)] = -monic[j + 1];
    }
    for i in 1..d {
        m[(i, i - 1)] = 1.0;
    }
    m.complex_eigenvalues().iter().copied().collect()
}

/// Aberth starting points on a circle whose radius bounds the roots.
fn circle_guesses(monic: &[f64]) -> Vec<Complex64> {
    let d = monic.len() - 1;
    let radius = 1.0 + monic[1..].iter().fold(0.0f64, |m, c| m.max(c.abs()));
    (0..d)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / d as f64;
            Complex64::from_polar(radius, angle)
        })
        .collect()
}

/// Aberth-Ehrlich refinement, keeping the best point seen for each root.
fn aberth_polish(monic: &[f64], mut z: Vec<Complex64>) -> (Vec<Complex64>, f64) {
    let n = z.len();
    let mut best = z.clone();
    let mut best_err: Vec<f64> = z.iter().map(|&r| backward_error(monic, r)).collect();
    for _ in 0..POLISH_ITERATIONS {
        let mut largest_step = 0.0f64;
        for i in 0..n {
            let (p, dp) = horner_with_derivative(monic, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != i && z[j] != z[i])
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if !(step.re.is_finite() && step.im.is_finite()) {
                continue;
            }
            z[i] -= step;
            largest_step = largest_step.max(step.norm() / z[i].norm().max(1.0));
            let err = backward_error(monic, z[i]);
            if err < best_err[i] {
                best_err[i] = err;
                best[i] = z[i];
            }
        }
        if largest_step <= 4.0 * f64::EPSILON {
            break;
        }
    }
    let worst = best_err.iter().fold(0.0f64, |m, &e| m.max(e));
    (best, worst)
}

fn check_coefficients(coeffs: &[f64]) -> Result<(), PolyError> {
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(PolyError::NonFinite);
    }
    if coeffs.len() < 2 {
        return Err(PolyError::DegreeTooLow);
    }
    if coeffs.len() - 1 > MAX_DEGREE {
        return Err(PolyError::DegreeTooHigh(coeffs.len() - 1));
    }
    if coeffs[0] == 0.0 {
        return Err(PolyError::ZeroLeading);
    }
    Ok(())
}

/// All complex roots of a real polynomial, coefficients highest degree first.
///
/// Companion-matrix eigenvalues seed a simultaneous Aberth-Ehrlich
/// iteration; every root is returned with relative backward error at most
/// [`ROOT_TOLERANCE`].
pub fn polynomial_roots(coeffs: &[f64]) -> Result<Vec<Complex64>, PolyError> {
    check_coefficients(coeffs)?;
    let lead = coeffs[0];
    let monic: Vec<f64> = coeffs.iter().map(|c| c / lead).collect();
    if monic.len() == 2 {
        return Ok(vec![Complex64::new(-monic[1], 0.0)]);
    }
    let mut seeds = companion_eigenvalues(&monic);
    if seeds.len() != monic.len() - 1 || seeds.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        seeds = circle_guesses(&monic);
    }
    let (roots, worst) = aberth_polish(&monic, seeds);
    if worst > ROOT_TOLERANCE {
        return Err(PolyError::NoConvergence(worst));
    }
    Ok(roots)
}

/// Largest real part over the roots: the stability margin of a system with
/// this characteristic polynomial (negative means stable).
pub fn max_re_root(coeffs: &[f64]) -> Result<f64, PolyError> {
    let roots = polynomial_roots(coeffs)?;
    Ok(roots.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max))
}

/// max |num(iω)/den(iω)| over `points` log-spaced frequencies in
/// [w_min, w_max], endpoints included.
///
/// A grid maximum never exceeds the true H∞ norm, so this is a lower bound
/// on it that tightens as the grid gets denser.
pub fn peak_gain(num: &[f64], den: &[f64], w_min: f64, w_max: f64, points: usize) -> Result<f64, PolyError> {
    if num.is_empty() || den.is_empty() {
        return Err(PolyError::InvalidGrid("numerator and denominator need coefficients".into()));
    }
    if num.iter().chain(den).any(|c| !c.is_finite()) {
        return Err(PolyError::NonFinite);
    }
    if den.iter().all(|&c| c == 0.0) {
        return Err(PolyError::ZeroLeading);
    }
    if !(w_min > 0.0 && w_min.is_finite()) {
        return Err(PolyError::InvalidGrid(format!("w_min must be positive, got {w_min}")));
    }
    if !(w_max >= w_min && w_max.is_finite()) {
        return Err(PolyError::InvalidGrid(format!("w_max must be at least w_min, got {w_max}")));
    }
    if points < 2 {
        return Err(PolyError::InvalidGrid(format!("need at least 2 points, got {points}")));
    }
    let span = (w_max / w_min).ln();
    let last = points - 1;
    let mut peak = 0.0f64;
    for k in 0..points {
        let w = match k {
            0 => w_min,
            k if k == last => w_max,
            k => w_min * (span * k as f64 / last as f64).exp(),
        };
        let s = Complex64::new(0.0, w);
        let d = horner(den, s);
        if d.norm() < SINGULAR_DENOMINATOR {
            return Err(PolyError::SingularDenominator(w));
        }
        peak = peak.max(horner(num, s).norm() / d.norm());
    }
    Ok(peak)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factored_quadratic() {
        assert!((max_re_root(&[1.0, 3.0, 2.0]).unwrap() + 1.0).abs() < 1e-12);
        assert!(max_re_root(&[1.0, 0.0, 1.0]).unwrap().abs() < 1e-12);
        assert!((max_re_root(&[2.0, -4.0]).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn coefficient_errors() {
        assert_eq!(max_re_root(&[0.0, 1.0, 2.0]), Err(PolyError::ZeroLeading));
        assert_eq!(max_re_root(&[3.0]), Err(PolyError::DegreeTooLow));
        assert_eq!(max_re_root(&vec![1.0; 66]), Err(PolyError::DegreeTooHigh(65)));
        assert_eq!(max_re_root(&[1.0, f64::NAN]), Err(PolyError::NonFinite));
    }

    #[test]
    fn repeated_and_zero_roots() {
        // (s + 1)^3 s^2
        let got = max_re_root(&[1.0, 3.0, 3.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(got.abs() < 1e-7, "{got}");
        // (s + 2)^2
        let got = max_re_root(&[1.0, 4.0, 4.0]).unwrap();
        assert!((got + 2.0).abs() < 1e-7, "{got}");
    }

    #[test]
    fn scale_invariance() {
        let p = [1.0, 2.5, -0.3, 4.0, 1.2];
        let base = max_re_root(&p).unwrap();
        for &c in &[-3.0, 1e-6, 7e5] {
            let scaled: Vec<f64> = p.iter().map(|x| x * c).collect();
            assert!((max_re_root(&scaled).unwrap() - base).abs() < 1e-9);
        }
    }

    #[test]
    fn constant_gain() {
        assert_eq!(peak_gain(&[2.0], &[1.0], 0.1, 10.0, 5).unwrap(), 2.0);
    }

    #[test]
    fn first_order_lowpass() {
        let got = peak_gain(&[1.0], &[1.0, 1.0], 1e-2, 1e2, 400).unwrap();
        let expected = 1.0 / (1.0f64 + 1e-4).sqrt();
        assert!((got - expected).abs() < 1e-15);
        assert!((got - 0.99995).abs() < 1e-6);
    }

    #[test]
    fn grid_errors() {
        assert!(matches!(peak_gain(&[1.0], &[0.0, 0.0], 1.0, 2.0, 3), Err(PolyError::ZeroLeading)));
        assert!(matches!(peak_gain(&[1.0], &[1.0], 0.0, 2.0, 3), Err(PolyError::InvalidGrid(_))));
        assert!(matches!(peak_gain(&[1.0], &[1.0], 3.0, 2.0, 3), Err(PolyError::InvalidGrid(_))));
        assert!(matches!(peak_gain(&[1.0], &[1.0], 1.0, 2.0, 1), Err(PolyError::InvalidGrid(_))));
        // s^2 + 1 vanishes at ω = 1
        assert!(matches!(
            peak_gain(&[1.0], &[1.0, 0.0, 1.0], 1.0, 1.0, 2),
            Err(PolyError::SingularDenominator(_))
        ));
    }
}
