//! Steepest-descent support objects: the phase functions phi_1..phi_3 with
//! their stationary points, the diagonal exponent theta(zeta), and the
//! global parametrix product with numerical verification of its jumps
//! across the six unit-circle arcs.

use crate::algebra::{constants, inverse, omega_pow, C64, Mat3, SQRT3};
use crate::error::{Error, Result};
use crate::monodromy::{ldr_decompose, ConnectionParams};
use std::f64::consts::PI;

/// Which of the three phase functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseId {
    Phi1,
    Phi2,
    Phi3,
}

/// The six arc endpoints p_1..p_6 = 1, -conj(omega), omega, -1,
/// conj(omega), -omega, in counterclockwise order (angles 0..300 degrees).
pub fn arc_points() -> [C64; 6] {
    let w = omega_pow(1);
    [
        C64::new(1.0, 0.0),
        -w.conj(),
        w,
        C64::new(-1.0, 0.0),
        w.conj(),
        -w,
    ]
}

fn check_nonzero(zeta: C64) -> Result<()> {
    if zeta.norm() == 0.0 {
        return Err(Error::Domain("phase functions undefined at zeta = 0".into()));
    }
    Ok(())
}

/// phi_1 = sqrt(3)(zeta e^{-i pi/6} - zeta^{-1} e^{i pi/6}),
/// phi_2 = sqrt(3)(zeta e^{i pi/6} - zeta^{-1} e^{-i pi/6}),
/// phi_3 = i sqrt(3)(zeta + zeta^{-1}).
pub fn phase(id: PhaseId, zeta: C64) -> Result<C64> {
    check_nonzero(zeta)?;
    let e = C64::from_polar(1.0, PI / 6.0);
    Ok(match id {
        PhaseId::Phi1 => SQRT3 * (zeta * e.conj() - zeta.inv() * e),
        PhaseId::Phi2 => SQRT3 * (zeta * e - zeta.inv() * e.conj()),
        PhaseId::Phi3 => C64::new(0.0, SQRT3) * (zeta + zeta.inv()),
    })
}

/// Analytic derivative of the phase function.
pub fn phase_derivative(id: PhaseId, zeta: C64) -> Result<C64> {
    check_nonzero(zeta)?;
    let inv_sq = zeta.inv() * zeta.inv();
    let e = C64::from_polar(1.0, PI / 6.0);
    Ok(match id {
        PhaseId::Phi1 => SQRT3 * (e.conj() + inv_sq * e),
        PhaseId::Phi2 => SQRT3 * (e + inv_sq * e.conj()),
        PhaseId::Phi3 => C64::new(0.0, SQRT3) * (C64::new(1.0, 0.0) - inv_sq),
    })
}

/// The two stationary points of each phase function:
/// phi_1: +-e^{-i pi/3}; phi_2: +-e^{i pi/3}; phi_3: +-1.
pub fn stationary_points(id: PhaseId) -> (C64, C64) {
    let p = match id {
        PhaseId::Phi1 => C64::from_polar(1.0, -PI / 3.0),
        PhaseId::Phi2 => C64::from_polar(1.0, PI / 3.0),
        PhaseId::Phi3 => C64::new(1.0, 0.0),
    };
    (p, -p)
}

/// theta(zeta) = -zeta d3 + zeta^{-1} d3^{-1} (diagonal, traceless).
pub fn theta(zeta: C64) -> Result<Mat3> {
    check_nonzero(zeta)?;
    let k = constants();
    let d3_inv = Mat3::diag(C64::new(1.0, 0.0), omega_pow(2), omega_pow(1));
    Ok(k.d3.scale(-zeta) + d3_inv.scale(zeta.inv()))
}

/// ln|z| + i A(z) with the argument branch A in (-7 pi/6, 5 pi/6]
/// (cut along arg z = 5 pi/6).
fn log_branch_5pi6(z: C64) -> C64 {
    let mut a = z.arg();
    if a > 5.0 * PI / 6.0 + 1e-15 {
        a -= 2.0 * PI;
    }
    C64::new(z.norm().ln(), a)
}

/// Diagonal entries of D_k (real, positive) from the printed decompositions.
fn d_factors(p: &ConnectionParams) -> Result<[[f64; 3]; 6]> {
    let factors = ldr_decompose(p)?;
    let mut out = [[0.0; 3]; 6];
    for (k, f) in factors.iter().enumerate() {
        for (j, v) in out[k].iter_mut().enumerate() {
            *v = f.d[(j, j)].re;
        }
    }
    Ok(out)
}

/// The global parametrix Y^D(zeta) = f_1 ... f_6 with
/// f_k(zeta) = exp{-(ln D_k / 2 pi i) L_{5pi/6}((zeta - p_k)/(zeta - p_{k+1}))}.
/// Each f_k is diagonal; the only discontinuity of f_k is across the arc
/// C_k from p_k to p_{k+1}, which the Moebius ratio maps onto the cut ray.
pub fn global_parametrix(zeta: C64, p: &ConnectionParams) -> Result<Mat3> {
    if (zeta.norm() - 1.0).abs() < 1e-10 {
        return Err(Error::OnContour(zeta.norm() - 1.0));
    }
    let ds = d_factors(p)?;
    let pts = arc_points();
    let mut diag = [C64::new(1.0, 0.0); 3];
    for k in 0..6 {
        let lg = log_branch_5pi6((zeta - pts[k]) / (zeta - pts[(k + 1) % 6]));
        // exp(-(ln d)/(2 pi i) L) with ln d real
        let factor = lg * C64::new(0.0, 1.0 / (2.0 * PI));
        for (j, d) in diag.iter_mut().enumerate() {
            *d *= (factor * ds[k][j].ln()).exp();
        }
    }
    Ok(Mat3::diag(diag[0], diag[1], diag[2]))
}

/// Maximum over sampled interior arc points of the jump-condition residual
/// || Y^D((1+h) zeta)^{-1} Y^D((1-h) zeta) - D_k ||, Richardson-extrapolated
/// from the two-sided radial limits at h = 1e-6 and h/2.
pub fn jump_residual(p: &ConnectionParams, samples_per_arc: usize) -> Result<f64> {
    if samples_per_arc < 3 {
        return Err(Error::Domain("need at least 3 samples per arc".into()));
    }
    let ds = d_factors(p)?;
    let h = 1e-6;
    let mut max_resid: f64 = 0.0;
    for (k, d) in ds.iter().enumerate() {
        let dk = Mat3::diag(
            C64::new(d[0], 0.0),
            C64::new(d[1], 0.0),
            C64::new(d[2], 0.0),
        );
        for j in 0..samples_per_arc {
            // interior angles only: endpoints carry power-law singularities
            let frac = (j as f64 + 1.0) / (samples_per_arc as f64 + 1.0);
            let ang = (k as f64 + frac) * PI / 3.0;
            let zeta = C64::from_polar(1.0, ang);
            let ratio = |hh: f64| -> Result<Mat3> {
                let inner = global_parametrix(zeta * (1.0 - hh), p)?;
                let outer = global_parametrix(zeta * (1.0 + hh), p)?;
                Ok(inverse(&outer)? * inner)
            };
            let m1 = ratio(h)?;
            let m2 = ratio(h / 2.0)?;
            let extrap = m2.scale(C64::new(2.0, 0.0)) - m1;
            max_resid = max_resid.max((extrap - dk).max_abs());
        }
    }
    Ok(max_resid)
}

/// Local conformal coordinate near the stationary point zeta = 1:
/// z(zeta) = sqrt(2x) e^{i pi/2} sqrt(phi_3(zeta) - 2 sqrt(3) i), branch
/// fixed by z ~ sqrt(2x) e^{3 pi i/4} 3^{1/4} (zeta - 1).
pub fn local_scaling(zeta: C64, x: f64) -> Result<C64> {
    if (zeta - 1.0).norm() >= 0.5 {
        return Err(Error::Domain(format!(
            "local scaling defined for |zeta - 1| < 0.5, got {}",
            (zeta - 1.0).norm()
        )));
    }
    if x <= 0.0 {
        return Err(Error::Domain(format!("x must be positive, got {x}")));
    }
    let w = phase(PhaseId::Phi3, zeta)? - C64::new(0.0, 2.0 * SQRT3);
    let mut root = w.sqrt();
    // pick the square-root sign matching the linearization
    let target = C64::from_polar(3f64.powf(0.25), PI / 4.0) * (zeta - 1.0);
    if (root - target).norm() > (root + target).norm() {
        root = -root;
    }
    Ok((2.0 * x).sqrt() * C64::new(0.0, 1.0) * root)
}

/// nu = -(1/2 pi i) ln(3A) = i X, computed with the real logarithm so it
/// is purely imaginary by construction.
pub fn nu_exponent(p: &ConnectionParams) -> C64 {
    C64::new(0.0, (3.0 * p.a_r).ln() / (2.0 * PI))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{determinant, mat_close, mat_residual};
    use crate::monodromy::{params_from_sy, MonodromyData};

    fn sample_params() -> ConnectionParams {
        params_from_sy(MonodromyData::new(-1.0, 0.3).unwrap()).unwrap()
    }

    #[test]
    fn phase_values_and_stationary_points() {
        let i2s3 = C64::new(0.0, 2.0 * SQRT3);
        assert!((phase(PhaseId::Phi3, C64::new(1.0, 0.0)).unwrap() - i2s3).norm() < 1e-14);
        assert!((phase(PhaseId::Phi3, C64::new(-1.0, 0.0)).unwrap() + i2s3).norm() < 1e-14);
        let (p1, m1) = stationary_points(PhaseId::Phi1);
        assert!((phase(PhaseId::Phi1, p1).unwrap() + i2s3).norm() < 1e-14);
        assert!((phase(PhaseId::Phi1, m1).unwrap() - i2s3).norm() < 1e-14);
        let (p2, _) = stationary_points(PhaseId::Phi2);
        assert!((phase(PhaseId::Phi2, p2).unwrap() - i2s3).norm() < 1e-14);
        for id in [PhaseId::Phi1, PhaseId::Phi2, PhaseId::Phi3] {
            let (a, b) = stationary_points(id);
            assert!(phase_derivative(id, a).unwrap().norm() <= 1e-14);
            assert!(phase_derivative(id, b).unwrap().norm() <= 1e-14);
        }
    }

    #[test]
    fn phi3_second_derivative_at_stationary_points() {
        // finite-difference second derivative at +-1 equals +-2 sqrt(3) i
        let d = 1e-5;
        for sign in [1.0, -1.0] {
            let z0 = C64::new(sign, 0.0);
            let f = |z: C64| phase(PhaseId::Phi3, z).unwrap();
            let dd = (f(z0 + d) - 2.0 * f(z0) + f(z0 - d)) / (d * d);
            assert!((dd - C64::new(0.0, sign * 2.0 * SQRT3)).norm() < 1e-5);
        }
    }

    #[test]
    fn phi3_imaginary_on_circle_and_sign_regions() {
        for k in 0..12 {
            let z = C64::from_polar(1.0, 0.37 + k as f64 * PI / 6.0);
            assert!(phase(PhaseId::Phi3, z).unwrap().re.abs() < 1e-13);
        }
        // Re phi_3 > 0 inside the disk's upper half, < 0 outside; mirrored below
        for k in 0..20 {
            let ang = 0.05 + (PI - 0.1) * k as f64 / 19.0;
            let inside_up = C64::from_polar(0.6, ang);
            let outside_up = C64::from_polar(1.7, ang);
            assert!(phase(PhaseId::Phi3, inside_up).unwrap().re > 0.0);
            assert!(phase(PhaseId::Phi3, outside_up).unwrap().re < 0.0);
            assert!(phase(PhaseId::Phi3, inside_up.conj()).unwrap().re < 0.0);
            assert!(phase(PhaseId::Phi3, outside_up.conj()).unwrap().re > 0.0);
        }
    }

    #[test]
    fn theta_structure() {
        let t = theta(C64::new(1.0, 0.0)).unwrap();
        assert!(t[(0, 0)].norm() < 1e-15);
        assert!((t[(1, 1)] - C64::new(0.0, -SQRT3)).norm() < 1e-14);
        assert!((t[(2, 2)] - C64::new(0.0, SQRT3)).norm() < 1e-14);
        // theta_11 - theta_22 = -phi_1, trace = 0
        let z = C64::new(0.3, -1.2);
        let t = theta(z).unwrap();
        let diff = t[(0, 0)] - t[(1, 1)];
        assert!((diff + phase(PhaseId::Phi1, z).unwrap()).norm() < 1e-13);
        assert!((t[(0, 0)] + t[(1, 1)] + t[(2, 2)]).norm() < 1e-13);
    }

    #[test]
    fn parametrix_normalization() {
        let p = sample_params();
        let y0 = global_parametrix(C64::new(0.0, 0.0), &p).unwrap();
        assert!(mat_close(&y0, &Mat3::identity(), 1e-12));
        let yinf = global_parametrix(C64::new(1e8, 0.3), &p).unwrap();
        assert!((yinf - Mat3::identity()).max_abs() <= 1e-7);
        // unit determinant off the contour
        for z in [C64::new(0.4, 0.1), C64::new(-2.0, 1.0), C64::new(0.0, -3.0)] {
            let y = global_parametrix(z, &p).unwrap();
            assert!((determinant(&y) - C64::new(1.0, 0.0)).norm() < 1e-12);
        }
        // trivial parameters give the identity everywhere
        let p0 = params_from_sy(MonodromyData::new(0.0, 0.0).unwrap()).unwrap();
        let y = global_parametrix(C64::new(0.3, 0.7), &p0).unwrap();
        assert!(mat_close(&y, &Mat3::identity(), 1e-14));
    }

    #[test]
    fn parametrix_rejects_contour() {
        let p = sample_params();
        assert!(matches!(
            global_parametrix(C64::from_polar(1.0, 0.5), &p),
            Err(Error::OnContour(_))
        ));
    }

    #[test]
    fn parametrix_continuous_across_cut_ray() {
        let p = sample_params();
        let eps = 1e-7;
        for r in [0.5, 2.0] {
            let a = global_parametrix(C64::from_polar(r, 5.0 * PI / 6.0 - eps), &p).unwrap();
            let b = global_parametrix(C64::from_polar(r, 5.0 * PI / 6.0 + eps), &p).unwrap();
            assert!(mat_residual(&a, &b) < 1e-5, "jump across the ray at r = {r}");
        }
    }

    #[test]
    fn jump_residual_small_and_first_order_in_h() {
        let p = sample_params();
        let r = jump_residual(&p, 16).unwrap();
        assert!(r <= 1e-6, "jump residual {r}");
        let p0 = params_from_sy(MonodromyData::new(0.0, 0.0).unwrap()).unwrap();
        assert!(jump_residual(&p0, 4).unwrap() < 1e-14);
        // raw (non-extrapolated) one-sided error scales ~ h: probe directly
        let zeta = C64::from_polar(1.0, PI / 6.0);
        let raw = |h: f64| {
            let inner = global_parametrix(zeta * (1.0 - h), &p).unwrap();
            let outer = global_parametrix(zeta * (1.0 + h), &p).unwrap();
            let ds = d_factors(&p).unwrap();
            let dk = Mat3::diag(
                C64::new(ds[0][0], 0.0),
                C64::new(ds[0][1], 0.0),
                C64::new(ds[0][2], 0.0),
            );
            (inverse(&outer).unwrap() * inner - dk).max_abs()
        };
        let r1 = raw(1e-5);
        let r2 = raw(0.5e-5);
        let ratio = r1 / r2;
        assert!((1.6..2.4).contains(&ratio), "h-scaling ratio {ratio}");
    }

    #[test]
    fn local_scaling_behavior() {
        assert_eq!(local_scaling(C64::new(1.0, 0.0), 2.0).unwrap(), C64::new(0.0, 0.0));
        // quadratic expansion of phi_3 near 1
        let d = 1e-3;
        let v = phase(PhaseId::Phi3, C64::new(1.0 + d, 0.0)).unwrap() - C64::new(0.0, 2.0 * SQRT3);
        let lead = C64::new(0.0, SQRT3) * d * d;
        assert!((v - lead).norm() / lead.norm() <= 2e-3);
        // arg z -> 3 pi / 4 along the real axis from the right; d is kept
        // moderate because phi_3(1 + d) - 2 sqrt(3) i cancels ~d^2 digits
        let x = 7.0;
        let z = local_scaling(C64::new(1.0 + d, 0.0), x).unwrap();
        assert!((z.arg() - 3.0 * PI / 4.0).abs() < 2e-3);
        // linearization magnitude sqrt(2x) 3^{1/4} |zeta - 1|
        let expect = (2.0 * x).sqrt() * 3f64.powf(0.25) * d;
        assert!(
            (z.norm() - expect).abs() / expect < 5e-3,
            "|z| = {:e}, expected {expect:e}",
            z.norm()
        );
        assert!(local_scaling(C64::new(1.9, 0.0), 1.0).is_err());
    }

    #[test]
    fn nu_is_purely_imaginary_and_matches_x() {
        let p = sample_params();
        let nu = nu_exponent(&p);
        assert_eq!(nu.re, 0.0);
        let inf = crate::connection::infinity_from_params(&p).unwrap();
        assert!((nu.im - inf.x_exponent).abs() < 1e-14);
    }
}
