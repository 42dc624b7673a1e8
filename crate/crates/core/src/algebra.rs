//! Fixed-size complex 3x3 linear algebra and the constant matrices
//! (omega, d3, Omega, C, Delta, Pi) that every other module builds on.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

/// Complex double-precision scalar used everywhere in the crate.
pub type C64 = Complex64;

/// sqrt(3), kept in one place.
pub const SQRT3: f64 = 1.732_050_807_568_877_2;

/// omega = e^{2 pi i / 3}, stored once to full precision.
pub const OMEGA: C64 = C64::new(-0.5, 0.866_025_403_784_438_6);

/// omega^k by table lookup (k may be any integer); repeated multiplication
/// is never used, so long identity chains accumulate no phase drift.
pub fn omega_pow(k: i64) -> C64 {
    const TABLE: [C64; 3] = [
        C64::new(1.0, 0.0),
        OMEGA,
        C64::new(-0.5, -0.866_025_403_784_438_6),
    ];
    TABLE[k.rem_euclid(3) as usize]
}

/// Dense 3x3 complex matrix with value semantics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat3 {
    pub e: [[C64; 3]; 3],
}

impl Index<(usize, usize)> for Mat3 {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.e[i][j]
    }
}

impl IndexMut<(usize, usize)> for Mat3 {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.e[i][j]
    }
}

impl Mat3 {
    pub const fn new(e: [[C64; 3]; 3]) -> Self {
        Mat3 { e }
    }

    pub fn zero() -> Self {
        Mat3::new([[C64::new(0.0, 0.0); 3]; 3])
    }

    pub fn identity() -> Self {
        let mut m = Mat3::zero();
        for i in 0..3 {
            m.e[i][i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn diag(a: C64, b: C64, c: C64) -> Self {
        let mut m = Mat3::zero();
        m.e[0][0] = a;
        m.e[1][1] = b;
        m.e[2][2] = c;
        m
    }

    /// Identity plus a single off-diagonal entry: I + v * e_{ij} (1-based i, j).
    pub fn identity_plus(i: usize, j: usize, v: C64) -> Self {
        let mut m = Mat3::identity();
        m.e[i - 1][j - 1] += v;
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = Mat3::zero();
        for i in 0..3 {
            for j in 0..3 {
                m.e[i][j] = self.e[j][i];
            }
        }
        m
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        let mut m = *self;
        for row in m.e.iter_mut() {
            for v in row.iter_mut() {
                *v = v.conj();
            }
        }
        m
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        self.conj().transpose()
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut m = *self;
        for row in m.e.iter_mut() {
            for v in row.iter_mut() {
                *v *= s;
            }
        }
        m
    }

    /// Largest entry magnitude (max norm).
    pub fn max_abs(&self) -> f64 {
        self.e
            .iter()
            .flatten()
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.e.iter().flatten().all(|v| v.re.is_finite() && v.im.is_finite())
    }
}

impl Mul for Mat3 {
    type Output = Mat3;
    fn mul(self, rhs: Mat3) -> Mat3 {
        let mut m = Mat3::zero();
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..3 {
                    acc += self.e[i][k] * rhs.e[k][j];
                }
                m.e[i][j] = acc;
            }
        }
        m
    }
}

impl Add for Mat3 {
    type Output = Mat3;
    fn add(self, rhs: Mat3) -> Mat3 {
        let mut m = self;
        for i in 0..3 {
            for j in 0..3 {
                m.e[i][j] += rhs.e[i][j];
            }
        }
        m
    }
}

impl Sub for Mat3 {
    type Output = Mat3;
    fn sub(self, rhs: Mat3) -> Mat3 {
        let mut m = self;
        for i in 0..3 {
            for j in 0..3 {
                m.e[i][j] -= rhs.e[i][j];
            }
        }
        m
    }
}

impl Neg for Mat3 {
    type Output = Mat3;
    fn neg(self) -> Mat3 {
        self.scale(C64::new(-1.0, 0.0))
    }
}

/// Constant matrices of the rank-3 Toda system.
#[derive(Debug, Clone, Copy)]
pub struct TodaConstants {
    /// omega = e^{2 pi i/3}.
    pub omega: C64,
    /// d3 = diag(1, omega, omega^2).
    pub d3: Mat3,
    /// The 3x3 Vandermonde-type matrix Omega with Omega^2 = 3C.
    pub big_omega: Mat3,
    /// Involutive permutation swapping rows 2 and 3.
    pub c: Mat3,
    /// Anti-diagonal involution.
    pub delta: Mat3,
    /// Cyclic shift with Pi^3 = I and d3^{-1} Pi d3 = omega Pi.
    pub pi: Mat3,
}

/// Builds the constant bundle.
pub fn constants() -> TodaConstants {
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let w = omega_pow(1);
    let w2 = omega_pow(2);
    TodaConstants {
        omega: w,
        d3: Mat3::diag(one, w, w2),
        big_omega: Mat3::new([[one, one, one], [one, w, w2], [one, w2, w]]),
        c: Mat3::new([[one, zero, zero], [zero, zero, one], [zero, one, zero]]),
        delta: Mat3::new([[zero, zero, one], [zero, one, zero], [one, zero, zero]]),
        pi: Mat3::new([[zero, one, zero], [zero, zero, one], [one, zero, zero]]),
    }
}

/// Exact cofactor-expansion determinant.
pub fn determinant(m: &Mat3) -> C64 {
    let e = &m.e;
    e[0][0] * (e[1][1] * e[2][2] - e[1][2] * e[2][1])
        - e[0][1] * (e[1][0] * e[2][2] - e[1][2] * e[2][0])
        + e[0][2] * (e[1][0] * e[2][1] - e[1][1] * e[2][0])
}

/// Transpose of the cofactor matrix, so m * adjugate(m) = det(m) I.
pub fn adjugate(m: &Mat3) -> Mat3 {
    let e = &m.e;
    let cof = |i1: usize, i2: usize, j1: usize, j2: usize| {
        e[i1][j1] * e[i2][j2] - e[i1][j2] * e[i2][j1]
    };
    Mat3::new([
        [cof(1, 2, 1, 2), -cof(0, 2, 1, 2), cof(0, 1, 1, 2)],
        [-cof(1, 2, 0, 2), cof(0, 2, 0, 2), -cof(0, 1, 0, 2)],
        [cof(1, 2, 0, 1), -cof(0, 2, 0, 1), cof(0, 1, 0, 1)],
    ])
}

/// Closed-form adjugate inverse. Fails with `SingularMatrix` when
/// |det| <= 1e3 * eps * ||m||^3.
pub fn inverse(m: &Mat3) -> Result<Mat3> {
    let det = determinant(m);
    let scale = m.max_abs();
    let threshold = 1e3 * f64::EPSILON * scale.powi(3).max(f64::MIN_POSITIVE);
    if det.norm() <= threshold {
        return Err(Error::SingularMatrix { det_abs: det.norm() });
    }
    Ok(adjugate(m).scale(det.inv()))
}

/// Inverse with the determinant supplied exactly, avoiding the roundoff of
/// the cofactor-expansion determinant when it is known analytically
/// (unipotent Stokes factors, det E = -1/27 connection matrices).
pub fn inverse_with_det(m: &Mat3, det: C64) -> Mat3 {
    adjugate(m).scale(det.inv())
}

/// Scaled residual between two matrices:
/// max entrywise |a - b| / (1 + max entry magnitude).
pub fn mat_residual(a: &Mat3, b: &Mat3) -> f64 {
    let scale = 1.0 + a.max_abs().max(b.max_abs());
    (*a - *b).max_abs() / scale
}

/// Matrix equality as used in tests: scaled residual at most `tol`
/// (default policy tol = 1e-12).
pub fn mat_close(a: &Mat3, b: &Mat3, tol: f64) -> bool {
    mat_residual(a, b) <= tol
}
