//! Extraction of (sigma, psi) from the oscillatory trajectory tail by an
//! envelope seed plus iterated linear least squares — the measurement side
//! of the connection-formula verification.

use crate::algebra::SQRT3;
use crate::connection::{angular_distance, AsymptoticInfinity};
use crate::error::{Error, Result};
use crate::ode::Trajectory;
use std::f64::consts::PI;

/// Oscillation period of the tail, pi / sqrt(3).
pub const PERIOD: f64 = PI / SQRT3;

/// Amplitude below which the phase is not identifiable.
pub const SIGMA_PHASE_THRESHOLD: f64 = 1e-4;

/// Fit window [x_lo, x_hi] on the dense grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub x_lo: f64,
    pub x_hi: f64,
}

/// Result of the oscillation fit.
#[derive(Debug, Clone, Copy)]
pub struct FitResult {
    pub sigma: f64,
    /// Phase in (-pi, pi].
    pub psi: f64,
    /// X implied by sigma via X = (2/sqrt(3)) sigma^2.
    pub x_exp: f64,
    pub rms_residual: f64,
    pub window: Window,
}

/// Comparison of a fit against the closed-form prediction.
#[derive(Debug, Clone, Copy)]
pub struct FitComparison {
    pub delta_sigma_abs: f64,
    pub delta_sigma_rel: f64,
    /// Angular distance; 0 when the phase is undefined on both sides.
    pub delta_psi: f64,
    pub pass: bool,
}

/// Pass tolerances for `compare_fit_prediction`.
#[derive(Debug, Clone, Copy)]
pub struct FitTolerances {
    /// Bound on |d sigma| / max(sigma_pred, sigma_floor).
    pub sigma_rel: f64,
    /// Floor in the relative-sigma denominator.
    pub sigma_floor: f64,
    /// Bound on the angular phase distance, radians.
    pub psi_abs: f64,
}

impl Default for FitTolerances {
    fn default() -> Self {
        FitTolerances {
            sigma_rel: 0.02,
            sigma_floor: 0.05,
            psi_abs: 0.05,
        }
    }
}

fn window_samples<'a>(traj: &'a Trajectory, window: &Window) -> Result<Vec<&'a crate::ode::Sample>> {
    if window.x_hi - window.x_lo < 10.0 * PERIOD {
        return Err(Error::WindowTooShort(format!(
            "window [{}, {}] spans fewer than 10 periods",
            window.x_lo, window.x_hi
        )));
    }
    let picked: Vec<_> = traj
        .samples
        .iter()
        .filter(|s| s.x >= window.x_lo - 1e-12 && s.x <= window.x_hi + 1e-12)
        .collect();
    if picked.len() < 50 {
        return Err(Error::WindowTooShort(format!(
            "only {} dense samples inside the window",
            picked.len()
        )));
    }
    Ok(picked)
}

/// Mean over the window of E(x) = sqrt(x (w0^2 + (w0')^2 / 12)); exact for
/// the pure model since the leading (w0')^2 term is 12 (sigma^2/x) sin^2.
pub fn envelope_estimate(traj: &Trajectory, window: &Window) -> Result<f64> {
    let pts = window_samples(traj, window)?;
    let sum: f64 = pts
        .iter()
        .map(|s| (s.x * (s.w0 * s.w0 + s.w0_prime * s.w0_prime / 12.0)).sqrt())
        .sum();
    Ok(sum / pts.len() as f64)
}

/// Iterated linear least squares: with sigma fixed, regress sqrt(x) w0 on
/// {cos Theta, sin Theta} with Theta = 2 sqrt(3) x + (2/sqrt(3)) sigma^2 ln x,
/// then update sigma <- sqrt(a^2 + b^2), psi <- atan2(-b, a); repeat until
/// |d sigma| <= 1e-10 (at most 50 iterations).
pub fn fit_sigma_psi(traj: &Trajectory, window: &Window) -> Result<FitResult> {
    let pts = window_samples(traj, window)?;
    let mut sigma = envelope_estimate(traj, window)?;
    if sigma < SIGMA_PHASE_THRESHOLD {
        return Err(Error::AmplitudeTooSmall { sigma });
    }
    let mut psi = 0.0;
    let mut a = 0.0;
    let mut b = 0.0;
    let mut converged = false;
    for _ in 0..50 {
        // 2x2 normal equations for the two regressors
        let (mut cc, mut cs, mut ss, mut yc, mut ys) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for s in &pts {
            let theta = 2.0 * SQRT3 * s.x + 2.0 / SQRT3 * sigma * sigma * s.x.ln();
            let (st, ct) = theta.sin_cos();
            let y = s.x.sqrt() * s.w0;
            cc += ct * ct;
            cs += ct * st;
            ss += st * st;
            yc += y * ct;
            ys += y * st;
        }
        let det = cc * ss - cs * cs;
        a = (yc * ss - ys * cs) / det;
        b = (ys * cc - yc * cs) / det;
        let new_sigma = (a * a + b * b).sqrt();
        psi = f64::atan2(-b, a);
        let delta = (new_sigma - sigma).abs();
        sigma = new_sigma;
        if delta <= 1e-10 {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence { iters: 50 });
    }
    let mut sq = 0.0;
    for s in &pts {
        let theta = 2.0 * SQRT3 * s.x + 2.0 / SQRT3 * sigma * sigma * s.x.ln();
        let resid = s.x.sqrt() * s.w0 - a * theta.cos() - b * theta.sin();
        sq += resid * resid;
    }
    Ok(FitResult {
        sigma,
        psi,
        x_exp: 2.0 / SQRT3 * sigma * sigma,
        rms_residual: (sq / pts.len() as f64).sqrt(),
        window: *window,
    })
}

/// Compares a fit against the closed-form prediction.
pub fn compare_fit_prediction(
    fit: &FitResult,
    inf: &AsymptoticInfinity,
    tol: &FitTolerances,
) -> Result<FitComparison> {
    let fit_phase_defined = fit.sigma >= SIGMA_PHASE_THRESHOLD;
    if fit_phase_defined != inf.phase_defined {
        return Err(Error::PhaseUndefined(format!(
            "fit sigma = {:.3e}, predicted sigma = {:.3e}",
            fit.sigma, inf.sigma
        )));
    }
    let delta_sigma_abs = (fit.sigma - inf.sigma).abs();
    let delta_sigma_rel = delta_sigma_abs / inf.sigma.max(tol.sigma_floor);
    let delta_psi = if inf.phase_defined {
        angular_distance(fit.psi, inf.psi)
    } else {
        0.0
    };
    Ok(FitComparison {
        delta_sigma_abs,
        delta_sigma_rel,
        delta_psi,
        pass: delta_sigma_rel <= tol.sigma_rel && delta_psi <= tol.psi_abs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connection::{infinity_from_zero, w0_model, AsymptoticZero};
    use crate::ode::{integrate_radial_toda, IntegratorConfig, Sample, Trajectory};

    /// Synthetic trajectory sampling the pure asymptotic model.
    fn synthetic(sigma: f64, psi: f64, x_lo: f64, x_hi: f64, step: f64) -> Trajectory {
        let x_exp = 2.0 / SQRT3 * sigma * sigma;
        let inf = AsymptoticInfinity {
            sigma,
            psi,
            x_exponent: x_exp,
            alpha: 0.0,
            phase_defined: sigma > 0.0,
        };
        let n = ((x_hi - x_lo) / step).round() as usize + 1;
        let samples = (0..n)
            .map(|i| {
                let x = x_lo + i as f64 * step;
                let d = 1e-6;
                Sample {
                    x,
                    w0: w0_model(&inf, x),
                    w0_prime: (w0_model(&inf, x + d) - w0_model(&inf, x - d)) / (2.0 * d),
                }
            })
            .collect();
        Trajectory {
            samples,
            gamma: 0.0,
            rho: 0.0,
            steps_taken: 0,
            rejections: 0,
        }
    }

    const WINDOW: Window = Window { x_lo: 100.0, x_hi: 200.0 };

    #[test]
    fn envelope_on_synthetic_models() {
        for (sigma, tol) in [(0.4, 0.005), (0.05, 0.002)] {
            let t = synthetic(sigma, 1.0, 100.0, 200.0, 0.04);
            let e = envelope_estimate(&t, &WINDOW).unwrap();
            assert!((e - sigma).abs() <= tol, "envelope {e} for sigma {sigma}");
        }
        let t = synthetic(0.0, 0.0, 100.0, 200.0, 0.04);
        assert_eq!(envelope_estimate(&t, &WINDOW).unwrap(), 0.0);
    }

    #[test]
    fn fit_recovers_synthetic_model() {
        for sigma in [0.05, 0.2, 0.4, 0.8] {
            let t = synthetic(sigma, 1.0, 100.0, 200.0, 0.04);
            let fit = fit_sigma_psi(&t, &WINDOW).unwrap();
            assert!((fit.sigma - sigma).abs() <= 1e-9, "sigma {} vs {sigma}", fit.sigma);
            assert!(angular_distance(fit.psi, 1.0) <= 1e-9);
        }
    }

    #[test]
    fn trivial_signal_flagged() {
        let t = synthetic(0.0, 0.0, 100.0, 200.0, 0.04);
        assert!(matches!(
            fit_sigma_psi(&t, &WINDOW),
            Err(Error::AmplitudeTooSmall { .. })
        ));
    }

    #[test]
    fn window_too_short() {
        let t = synthetic(0.4, 1.0, 100.0, 200.0, 0.04);
        let short = Window { x_lo: 100.0, x_hi: 105.0 };
        assert!(matches!(
            fit_sigma_psi(&t, &short),
            Err(Error::WindowTooShort(_))
        ));
    }

    #[test]
    fn end_to_end_point_two() {
        let z = AsymptoticZero::new(0.2, 0.1).unwrap();
        let traj = integrate_radial_toda(&z, &IntegratorConfig::default()).unwrap();
        let fit = fit_sigma_psi(&traj, &WINDOW).unwrap();
        let inf = infinity_from_zero(&z).unwrap();
        let cmp = compare_fit_prediction(&fit, &inf, &FitTolerances::default()).unwrap();
        assert!(cmp.pass, "dsigma_rel {} dpsi {}", cmp.delta_sigma_rel, cmp.delta_psi);
    }

    #[test]
    fn comparison_semantics() {
        let t = synthetic(0.4, 1.0, 100.0, 200.0, 0.04);
        let fit = fit_sigma_psi(&t, &WINDOW).unwrap();
        // identical prediction
        let inf = AsymptoticInfinity {
            sigma: fit.sigma,
            psi: fit.psi,
            x_exponent: fit.x_exp,
            alpha: 0.0,
            phase_defined: true,
        };
        let cmp = compare_fit_prediction(&fit, &inf, &FitTolerances::default()).unwrap();
        assert!(cmp.delta_sigma_abs == 0.0 && cmp.delta_psi == 0.0 && cmp.pass);
        // psi shifted by 2 pi is the same angle
        let inf2 = AsymptoticInfinity { psi: fit.psi - 2.0 * PI, ..inf };
        let cmp2 = compare_fit_prediction(&fit, &inf2, &FitTolerances::default()).unwrap();
        assert!(cmp2.delta_psi <= 1e-12);
        // phase-definedness mismatch is an error
        let inf3 = AsymptoticInfinity {
            sigma: 0.0,
            psi: 0.0,
            x_exponent: 0.0,
            alpha: 0.0,
            phase_defined: false,
        };
        assert!(matches!(
            compare_fit_prediction(&fit, &inf3, &FitTolerances::default()),
            Err(Error::PhaseUndefined(_))
        ));
    }

    #[test]
    fn window_shift_stability() {
        let z = AsymptoticZero::new(0.5, 0.0).unwrap();
        let cfg = IntegratorConfig::default();
        let traj = integrate_radial_toda(&z, &cfg).unwrap();
        let w1 = Window { x_lo: 100.0, x_hi: 198.0 };
        let w2 = Window { x_lo: 100.0 + PERIOD, x_hi: 198.0 + PERIOD };
        let f1 = fit_sigma_psi(&traj, &w1).unwrap();
        let f2 = fit_sigma_psi(&traj, &w2).unwrap();
        assert!((f1.sigma - f2.sigma).abs() / f1.sigma <= 0.005);
        assert!(angular_distance(f1.psi, f2.psi) <= 0.02);
    }

    #[test]
    fn wider_window_improves_sigma() {
        let z = AsymptoticZero::new(0.5, 0.0).unwrap();
        let inf = infinity_from_zero(&z).unwrap();
        let cfg200 = IntegratorConfig::default();
        let cfg400 = IntegratorConfig { x_max: 400.0, dense_from: 200.0, ..cfg200 };
        let f200 = fit_sigma_psi(
            &integrate_radial_toda(&z, &cfg200).unwrap(),
            &Window { x_lo: 100.0, x_hi: 200.0 },
        )
        .unwrap();
        let f400 = fit_sigma_psi(
            &integrate_radial_toda(&z, &cfg400).unwrap(),
            &Window { x_lo: 200.0, x_hi: 400.0 },
        )
        .unwrap();
        let e200 = (f200.sigma - inf.sigma).abs();
        let e400 = (f400.sigma - inf.sigma).abs();
        assert!(e400 * 1.3 <= e200, "e200 = {e200}, e400 = {e400}");
    }
}
