//! Complex log-gamma (principal branch, cut along (-inf, 0]) and the
//! gamma-ratio factor entering the q coordinate of the connection formulae.

use crate::algebra::C64;
use crate::error::{Error, Result};
use std::f64::consts::PI;

// Lanczos coefficients, g = 7, 9 terms (GNU Scientific Library table).
const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)] // published table digits kept verbatim
const LANCZOS_P: [f64; 9] = [
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

/// Principal-branch ln Gamma(z).
///
/// Poles (nonpositive integers) and points on the cut (-inf, 0] are
/// rejected rather than assigned a side.
pub fn log_gamma(z: C64) -> Result<C64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain("non-finite argument to log_gamma".into()));
    }
    if z.im == 0.0 && z.re <= 0.0 {
        // Covers both the poles and the branch cut.
        return Err(Error::Pole { re: z.re, im: z.im });
    }
    if z.im.abs() < 1e-12 && z.re < 0.5 {
        let nearest = z.re.round();
        if nearest <= 0.0 && (z.re - nearest).abs() < 1e-12 {
            return Err(Error::Pole { re: z.re, im: z.im });
        }
    }
    Ok(log_gamma_unchecked(z))
}

fn log_gamma_unchecked(z: C64) -> C64 {
    if z.re < 0.5 {
        // Reflection: ln Gamma(z) = ln pi - ln sin(pi z) - ln Gamma(1 - z).
        let ln_pi = C64::new(PI.ln(), 0.0);
        return ln_pi - (PI * z).sin().ln() - log_gamma_unchecked(C64::new(1.0, 0.0) - z);
    }
    let zm1 = z - 1.0;
    let mut acc = C64::new(LANCZOS_P[0], 0.0);
    for (i, p) in LANCZOS_P.iter().enumerate().skip(1) {
        acc += *p / (zm1 + i as f64);
    }
    let t = zm1 + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt().ln() + (zm1 + 0.5) * t.ln() - t + acc.ln()
}

/// arg Gamma(i y) = Im ln Gamma(i y), continuous on each half-line y > 0, y < 0.
pub fn arg_gamma_imag(y: f64) -> Result<f64> {
    if y == 0.0 {
        return Err(Error::Pole { re: 0.0, im: 0.0 });
    }
    Ok(log_gamma(C64::new(0.0, y))?.im)
}

/// The rho-independent factor of the q coordinate:
/// G(gamma) = 2 (gamma-1)^2 3^{2(gamma-1)}
///            * Gamma((gamma-1)/3) Gamma((2 gamma-2)/3)
///            / ( Gamma((2-2 gamma)/3) Gamma((1-gamma)/3) ).
///
/// The negative-argument gammas are rewritten by reflection so every
/// evaluation happens at strictly positive real arguments:
/// with t = (1-gamma)/3 in (0, 1/2),
///   Gamma(-t)  = -pi / (sin(pi t)  Gamma(1+t)),
///   Gamma(-2t) = -pi / (sin(2pi t) Gamma(1+2t)),
/// and the two minus signs cancel, so G(gamma) > 0 on the whole domain.
pub fn q_gamma_factor(gamma: f64) -> Result<f64> {
    if !(-0.5..1.0).contains(&gamma) || gamma == -0.5 {
        return Err(Error::Domain(format!(
            "gamma = {gamma} outside (-1/2, 1) for q_gamma_factor"
        )));
    }
    let t = (1.0 - gamma) / 3.0;
    let real_ln_gamma = |x: f64| log_gamma_unchecked(C64::new(x, 0.0)).re;
    let ln_g = 2f64.ln()
        + 2.0 * (gamma - 1.0).abs().ln()
        + 2.0 * (gamma - 1.0) * 3f64.ln()
        + (PI.ln() - (PI * t).sin().ln() - real_ln_gamma(1.0 + t))
        + (PI.ln() - (2.0 * PI * t).sin().ln() - real_ln_gamma(1.0 + 2.0 * t))
        - real_ln_gamma(2.0 * t)
        - real_ln_gamma(t);
    Ok(ln_g.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn known_real_values() {
        // Gamma(5) = 24
        let v = log_gamma(C64::new(5.0, 0.0)).unwrap();
        assert!((v.re - 24f64.ln()).abs() < 1e-13 && v.im.abs() < 1e-13);
        // Gamma(1/3) Gamma(2/3) = 2 pi / sqrt(3)
        let s = log_gamma(C64::new(1.0 / 3.0, 0.0)).unwrap()
            + log_gamma(C64::new(2.0 / 3.0, 0.0)).unwrap();
        assert!((s.re - (2.0 * PI / 3f64.sqrt()).ln()).abs() < 1e-13);
    }

    #[test]
    fn gamma_of_i_modulus() {
        // |Gamma(i)|^2 = pi / sinh(pi)
        let v = log_gamma(C64::new(0.0, 1.0)).unwrap();
        let modulus_sq = (2.0 * v.re).exp();
        assert!((modulus_sq - PI / PI.sinh()).abs() < 1e-14);
        // frozen value of Im ln Gamma(i) (high-precision oracle)
        assert!((v.im - -1.872_436_647_262_429_8).abs() < 1e-13);
    }

    #[test]
    fn poles_and_cut_rejected() {
        assert!(matches!(log_gamma(C64::new(0.0, 0.0)), Err(Error::Pole { .. })));
        assert!(matches!(log_gamma(C64::new(-3.0, 0.0)), Err(Error::Pole { .. })));
        assert!(matches!(log_gamma(C64::new(-0.7, 0.0)), Err(Error::Pole { .. })));
        assert!(matches!(arg_gamma_imag(0.0), Err(Error::Pole { .. })));
    }

    #[test]
    fn arg_gamma_small_y_and_antisymmetry() {
        let a = arg_gamma_imag(0.001).unwrap();
        assert!(a > -PI / 2.0 - 0.001 && a < -PI / 2.0 + 0.0006);
        for y in [0.05, 0.3, 1.0, 4.0] {
            let p = arg_gamma_imag(y).unwrap();
            let n = arg_gamma_imag(-y).unwrap();
            assert!((p + n).abs() < 1e-13);
        }
    }

    #[test]
    fn reflection_and_recurrence_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let wrap = |x: f64| {
            // distance of x from the nearest multiple of 2 pi
            let m = x / (2.0 * PI);
            (m - m.round()).abs() * 2.0 * PI
        };
        for _ in 0..200 {
            let z = C64::new(
                rng.gen_range(-5.0..5.0),
                rng.gen_range(0.1..5.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 },
            );
            let refl = log_gamma(z).unwrap() + log_gamma(C64::new(1.0, 0.0) - z).unwrap()
                - (PI / (PI * z).sin()).ln();
            assert!(refl.re.abs() < 1e-12, "reflection re at {z}");
            assert!(wrap(refl.im) < 1e-12, "reflection im at {z}");

            let rec = log_gamma(z + 1.0).unwrap() - log_gamma(z).unwrap() - z.ln();
            assert!(rec.re.abs() < 1e-12 && wrap(rec.im) < 1e-12, "recurrence at {z}");
        }
    }

    #[test]
    fn q_gamma_factor_values() {
        assert!((q_gamma_factor(0.0).unwrap() - 1.0).abs() < 1e-13);
        // frozen oracle value
        assert!((q_gamma_factor(0.5).unwrap() - 0.307_509_933_909_916_79).abs() < 1e-13);
        // continuity probe near the upper endpoint
        let d = (q_gamma_factor(0.999).unwrap() - q_gamma_factor(0.998).unwrap()).abs();
        assert!(d < 1e-2);
    }

    #[test]
    fn q_gamma_factor_positive_on_grid() {
        for i in 0..100 {
            let gamma = -0.49 + (0.99 + 0.49) * i as f64 / 99.0;
            assert!(q_gamma_factor(gamma).unwrap() > 0.0);
        }
    }

    #[test]
    fn q_gamma_factor_domain() {
        assert!(q_gamma_factor(1.0).is_err());
        assert!(q_gamma_factor(-0.5).is_err());
    }
}
