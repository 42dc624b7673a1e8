//! Closed-form connection maps between the three coordinate systems:
//! asymptotic data (gamma, rho) at x -> 0, monodromy data (s, y), and
//! asymptotic data (sigma, psi, X, alpha) at x -> infinity; plus the
//! residue matrices at the origin of the small-norm expansion and the
//! Kitaev g-parameter correspondence.

use crate::algebra::{omega_pow, C64, Mat3, SQRT3};
use crate::error::{Error, Result};
use crate::monodromy::{ConnectionParams, MonodromyData};
use crate::specfun::{arg_gamma_imag, log_gamma, q_gamma_factor};
use std::f64::consts::PI;

/// Below this X the orbit is treated as trivial: sigma = 0 and the phase
/// is undefined (the alpha formula degenerates to arg(0) there).
const X_TRIVIAL: f64 = 1e-14;

/// Asymptotic data at x -> 0: w0(x) = gamma ln x + rho + o(1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticZero {
    pub gamma: f64,
    pub rho: f64,
}

impl AsymptoticZero {
    pub fn new(gamma: f64, rho: f64) -> Result<Self> {
        if !(gamma > -0.5 && gamma < 1.0) || !rho.is_finite() {
            return Err(Error::Domain(format!(
                "asymptotic zero data requires gamma in (-1/2, 1) and finite rho, got ({gamma}, {rho})"
            )));
        }
        Ok(AsymptoticZero { gamma, rho })
    }
}

/// Asymptotic data at x -> infinity:
/// w0(x) = (sigma/sqrt(x)) cos(2 sqrt(3) x + X ln x + psi) + O(1/x).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticInfinity {
    pub sigma: f64,
    /// Phase, reduced to (-pi, pi]. Meaningless when `phase_defined` is false.
    pub psi: f64,
    /// The logarithmic-phase exponent X = (2/sqrt(3)) sigma^2.
    pub x_exponent: f64,
    /// The auxiliary angle alpha of the phase formula.
    pub alpha: f64,
    pub phase_defined: bool,
}

/// Kitaev parameter correspondence variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KitaevVariant {
    DirectSign,
    AlternateSign,
}

/// Kitaev g-parameters with their defining constraints.
#[derive(Debug, Clone, Copy)]
pub struct KitaevG {
    pub g1: C64,
    pub g2: C64,
    pub g3: C64,
    pub s: f64,
    pub variant: KitaevVariant,
}

impl KitaevG {
    /// Residuals of g1+g2+g3 = 1 and g1 g2 + g2 g3 + g1 g3 (1+s) = 0.
    /// Scale-relative residuals of g1+g2+g3 = 1 and
    /// g1 g2 + g2 g3 + g1 g3 (1+s) = 0.
    pub fn constraint_residuals(&self) -> (f64, f64) {
        let lin_scale = 1.0 + self.g1.norm() + self.g2.norm() + self.g3.norm();
        let quad_scale = 1.0
            + (self.g1 * self.g2).norm()
            + (self.g2 * self.g3).norm()
            + (self.g1 * self.g3 * (1.0 + self.s)).norm();
        let sum = (self.g1 + self.g2 + self.g3 - 1.0).norm() / lin_scale;
        let quad = (self.g1 * self.g2 + self.g2 * self.g3 + self.g1 * self.g3 * (1.0 + self.s))
            .norm()
            / quad_scale;
        (sum, quad)
    }
}

fn lam01(gamma: f64) -> (f64, f64) {
    let gt = PI * (1.0 - gamma) / 3.0;
    (4.0 / 3.0 * gt.sin().powi(2), 2.0 * gt.cos())
}

/// Reduce an angle to (-pi, pi].
pub fn reduce_angle(x: f64) -> f64 {
    let mut a = x.rem_euclid(2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    }
    a
}

/// Angular distance min(|d|, 2 pi - |d|).
pub fn angular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

/// q = e^{2 rho} G(gamma).
pub fn q_from_zero(z: &AsymptoticZero) -> Result<f64> {
    Ok((2.0 * z.rho).exp() * q_gamma_factor(z.gamma)?)
}

/// Forward map (gamma, rho) -> (s, y).
pub fn sy_from_zero(z: &AsymptoticZero) -> Result<MonodromyData> {
    let q = q_from_zero(z)?;
    let two_gt = 2.0 * PI * (1.0 - z.gamma) / 3.0;
    let s = -2.0 * two_gt.cos() - 1.0;
    let (lam0, lam1) = lam01(z.gamma);
    let y = (q - 1.0 / q) * two_gt.sin() / (9.0 * lam0 * lam1);
    MonodromyData::new(s, y)
}

/// Inverse map (s, y) -> (gamma, rho).
pub fn zero_from_sy(m: &MonodromyData) -> Result<AsymptoticZero> {
    let gamma = 1.0 - 3.0 / (2.0 * PI) * (-(1.0 + m.s) / 2.0).acos();
    let (lam0, lam1) = lam01(gamma);
    let two_gt = 2.0 * PI * (1.0 - gamma) / 3.0;
    // q - 1/q = b with q > 0
    let b = 9.0 * lam0 * lam1 * m.y / two_gt.sin();
    let q = (b + (b * b + 4.0).sqrt()) / 2.0;
    let rho = 0.5 * (q / q_gamma_factor(gamma)?).ln();
    AsymptoticZero::new(gamma, rho)
}

fn infinity_from_x_psi(x_exp: f64, psi_unreduced: f64, alpha: f64) -> AsymptoticInfinity {
    if x_exp <= X_TRIVIAL {
        return AsymptoticInfinity {
            sigma: 0.0,
            psi: 0.0,
            x_exponent: 0.0,
            alpha: 0.0,
            phase_defined: false,
        };
    }
    AsymptoticInfinity {
        sigma: (SQRT3 / 2.0 * x_exp).sqrt(),
        psi: reduce_angle(psi_unreduced),
        x_exponent: x_exp,
        alpha,
        phase_defined: true,
    }
}

/// Map (gamma, rho) -> (sigma, psi) via the explicit q/gamma formulas.
pub fn infinity_from_zero(z: &AsymptoticZero) -> Result<AsymptoticInfinity> {
    let q = q_from_zero(z)?;
    let gt = PI * (1.0 - z.gamma) / 3.0;
    let two_gt = 2.0 * gt;
    let bracket = (q + 1.0 / q) / (8.0 * gt.cos() * gt.sin().powi(2))
        + 1.0 / (4.0 * gt.sin().powi(2));
    debug_assert!(bracket >= 1.0 - 1e-12, "phase-exponent bracket below 1");
    let x_exp = (bracket.ln() / (2.0 * PI)).max(0.0);
    if x_exp <= X_TRIVIAL {
        return Ok(infinity_from_x_psi(0.0, 0.0, 0.0));
    }
    let alpha = f64::atan2(
        (q - 1.0 / q) * two_gt.sin(),
        (q + 1.0 / q) * two_gt.cos() + 2.0 * gt.cos(),
    );
    let psi = x_exp * (24.0 * SQRT3).ln() + 3.0 * PI / 4.0 + alpha - arg_gamma_imag(x_exp)?;
    Ok(infinity_from_x_psi(x_exp, psi, alpha))
}

/// s1 = omega^2 B / A, the reflection coefficient of the model problem.
pub fn s1_coefficient(p: &ConnectionParams) -> C64 {
    omega_pow(2) * p.b / p.a_r
}

/// Map (A, B, s) -> (sigma, psi) via the s1/nu route. Both routes agree;
/// their agreement is a standing internal-consistency test.
pub fn infinity_from_params(p: &ConnectionParams) -> Result<AsymptoticInfinity> {
    let p = ConnectionParams::new(p.a_r, p.b, p.s)?;
    let s1 = s1_coefficient(&p);
    let one_minus = 1.0 - s1.norm_sqr();
    if one_minus <= 0.0 {
        return Err(Error::InvalidParams(format!(
            "|s1| = {} must be < 1",
            s1.norm()
        )));
    }
    // X = -(1/2pi) ln(1-|s1|^2) = (1/2pi) ln(3A)
    let x_exp = -(one_minus.ln()) / (2.0 * PI);
    if x_exp <= X_TRIVIAL {
        return Ok(infinity_from_x_psi(0.0, 0.0, 0.0));
    }
    let psi = x_exp * (24.0 * SQRT3).ln() + PI / 12.0 + s1.arg() - arg_gamma_imag(x_exp)?;
    // alpha = arg(omega B) = arg s1 - 2 pi / 3 (mod 2 pi)
    let alpha = reduce_angle(s1.arg() - 2.0 * PI / 3.0);
    Ok(infinity_from_x_psi(x_exp, psi, alpha))
}

/// Residue data (alpha_hat, beta_hat) and the circulant residue matrix R(0)
/// of the small-norm expansion, at deformation parameter x.
pub fn residue_r0(p: &ConnectionParams, x: f64) -> Result<(C64, C64, Mat3)> {
    let p = ConnectionParams::new(p.a_r, p.b, p.s)?;
    if x <= 0.0 {
        return Err(Error::Domain(format!("x must be positive, got {x}")));
    }
    let s1 = s1_coefficient(&p);
    if s1.norm() <= 1e-14 {
        return Err(Error::Degenerate("s1 = 0: residue data undefined".into()));
    }
    // nu = (1/2pi i) ln(1-|s1|^2) = i X, purely imaginary by construction
    let nu = C64::new(0.0, -(1.0 - s1.norm_sqr()).ln() / (2.0 * PI));
    let i = C64::new(0.0, 1.0);
    let alpha = -(i / (s1 * (i * 2.0 * SQRT3 * x).exp()))
        * (2.0 * PI).sqrt()
        * (2.0 * PI * i * nu).exp()
        / log_gamma(-nu)?.exp();
    let ln_scale = (24.0 * SQRT3 * x).ln();
    let pref = 3f64.powf(-0.25) / (2.0 * x).sqrt();
    let alpha_hat =
        alpha * pref * (-nu * ln_scale).exp() * (-i * 3.0 * PI / 4.0 - i * 1.5 * PI * nu).exp();
    let beta_hat = -(nu / alpha)
        * pref
        * (nu * ln_scale).exp()
        * (-i * 3.0 * PI / 4.0 + i * 1.5 * PI * nu).exp();
    let u = alpha_hat - omega_pow(1) * beta_hat;
    let v = beta_hat - omega_pow(2) * alpha_hat;
    let one = C64::new(1.0, 0.0);
    let r0 = Mat3::new([[one, u, v], [v, one, u], [u, v, one]]);
    Ok((alpha_hat, beta_hat, r0))
}

/// The leading asymptotic model (sigma/sqrt(x)) cos(2 sqrt(3) x + X ln x + psi).
pub fn w0_model(inf: &AsymptoticInfinity, x: f64) -> f64 {
    if inf.sigma == 0.0 {
        return 0.0;
    }
    inf.sigma / x.sqrt() * (2.0 * SQRT3 * x + inf.x_exponent * x.ln() + inf.psi).cos()
}

/// Kitaev g-parameter correspondence, both published variants.
pub fn kitaev_g(p: &ConnectionParams, variant: KitaevVariant) -> Result<KitaevG> {
    let p = ConnectionParams::new(p.a_r, p.b, p.s)?;
    let w2bb = omega_pow(2) * p.b.conj() * 3.0;
    let g3 = C64::new(3.0 * p.a_r, 0.0);
    let g = match variant {
        KitaevVariant::DirectSign => KitaevG {
            g1: w2bb,
            g2: omega_pow(1) * p.b * 3.0 + 3.0 * p.a_r * p.s,
            g3,
            s: -p.s,
            variant,
        },
        KitaevVariant::AlternateSign => KitaevG {
            g1: -w2bb,
            g2: C64::new(1.0, 0.0) + w2bb - g3,
            g3,
            s: 2.0 + p.s - 2.0 / (3.0 * p.a_r),
            variant,
        },
    };
    Ok(g)
}

/// Change of variables to Painleve III (D7): s = (4x/3)^{3/2},
/// w~ = s^{1/3} e^{-2 w0}.
pub fn toda_to_painleve(x: f64, w0: f64) -> Result<(f64, f64)> {
    if x <= 0.0 {
        return Err(Error::Domain(format!("x must be positive, got {x}")));
    }
    let s = (4.0 * x / 3.0).powf(1.5);
    Ok((s, s.cbrt() * (-2.0 * w0).exp()))
}

/// The Painleve III (D7) tail:
/// w~(s) = s^{1/3} - (4/sqrt(3)) sigma cos((3 sqrt(3)/2) s^{2/3} + X ln((3/4) s^{2/3}) + psi).
pub fn corollary_asymptote(inf: &AsymptoticInfinity, s: f64) -> f64 {
    let s13 = s.cbrt();
    if inf.sigma == 0.0 {
        return s13;
    }
    let s23 = s13 * s13;
    s13 - 4.0 / SQRT3
        * inf.sigma
        * (1.5 * SQRT3 * s23 + inf.x_exponent * (0.75 * s23).ln() + inf.psi).cos()
}
