//! Stokes, jump, and connection matrices built from the monodromy
//! coordinates (s, y), together with the full symmetry-identity and
//! factorization test surface.

use crate::algebra::{
    constants, determinant, inverse, inverse_with_det, mat_residual, omega_pow, C64, Mat3,
};
use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Coordinates (s, y) on the monodromy manifold, s in (-3, 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonodromyData {
    pub s: f64,
    pub y: f64,
}

impl MonodromyData {
    pub fn new(s: f64, y: f64) -> Result<Self> {
        if !(s > -3.0 && s < 1.0) || !y.is_finite() {
            return Err(Error::Domain(format!(
                "monodromy data requires -3 < s < 1 and finite y, got s = {s}, y = {y}"
            )));
        }
        Ok(MonodromyData { s, y })
    }
}

/// The (A, B, s) parametrization of the connection matrix E1:
/// A real with A >= 1/3, B complex, s the monodromy coordinate, subject to
///   A^2 - A/3 = |B|^2   and   (1+s) A + omega B + omega^2 conj(B) = 1/3.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConnectionParams {
    pub a_r: f64,
    pub b: C64,
    pub s: f64,
}

impl ConnectionParams {
    /// Validates both algebraic constraints to 1e-9.
    pub fn new(a_r: f64, b: C64, s: f64) -> Result<Self> {
        let p = ConnectionParams { a_r, b, s };
        let (r1, r2) = p.constraint_residuals();
        if r1 > 1e-9 || r2 > 1e-9 {
            return Err(Error::InvalidParams(format!(
                "constraint residuals {r1:.3e}, {r2:.3e} exceed 1e-9"
            )));
        }
        if a_r < 1.0 / 3.0 - 1e-9 {
            return Err(Error::InvalidParams(format!("A = {a_r} < 1/3")));
        }
        Ok(p)
    }

    /// Scale-relative residuals of the two defining constraints.
    pub fn constraint_residuals(&self) -> (f64, f64) {
        let s1 = 1.0 + self.a_r * self.a_r + self.a_r.abs() / 3.0 + self.b.norm_sqr();
        let r1 = (self.a_r * self.a_r - self.a_r / 3.0 - self.b.norm_sqr()).abs() / s1;
        let s2 = 1.0 + (1.0 + self.s.abs()) * self.a_r.abs() + 2.0 * self.b.norm();
        let r2 = ((1.0 + self.s) * self.a_r
            + (omega_pow(1) * self.b + omega_pow(2) * self.b.conj()).re
            - 1.0 / 3.0)
            .abs()
            / s2;
        (r1, r2)
    }

    /// The Stokes parameter a = omega^2 s.
    pub fn stokes_a(&self) -> C64 {
        omega_pow(2) * self.s
    }
}

/// The four Stokes matrices.
#[derive(Debug, Clone, Copy)]
pub struct StokesSet {
    pub s1_inf: Mat3,
    pub s2_inf: Mat3,
    pub s1_zero: Mat3,
    pub s2_zero: Mat3,
}

/// The twelve Q jump matrices, indexed by n in {1, 4/3, 5/3, 2, 7/3, 8/3}
/// encoded as integer thirds 3n in {3, 4, 5, 6, 7, 8}.
#[derive(Debug, Clone, Copy)]
pub struct QSet {
    q_inf: [Mat3; 6],
    q_zero: [Mat3; 6],
}

impl QSet {
    /// Q_n at infinity, keyed by thirds = 3n.
    pub fn inf(&self, thirds: usize) -> &Mat3 {
        assert!((3..=8).contains(&thirds), "Q index 3n must be in 3..=8");
        &self.q_inf[thirds - 3]
    }

    /// Q_n at zero, keyed by thirds = 3n.
    pub fn zero(&self, thirds: usize) -> &Mat3 {
        assert!((3..=8).contains(&thirds), "Q index 3n must be in 3..=8");
        &self.q_zero[thirds - 3]
    }
}

/// One factor of the six lower-diagonal-upper decompositions.
#[derive(Debug, Clone, Copy)]
pub struct LDRFactors {
    pub l: Mat3,
    pub d: Mat3,
    pub r: Mat3,
    /// 1-based decomposition index k in 1..=6.
    pub index: usize,
}

/// Maximum residuals of the symmetry-identity corpus, one entry per
/// identity group. All entries are scaled residuals
/// (max |diff| / (1 + matrix scale)).
#[derive(Debug, Clone, Copy)]
pub struct IdentityReport {
    /// (i) the two closed forms of E2 agree.
    pub e2_two_routes: f64,
    /// (ii) S2^0 E1 S1^inf = (1/9) d3 E1^{T-1} d3 and = (1/9) d3 E1^{-1} d3.
    pub inversion_relation: f64,
    /// (iii) cyclic relation of E1.
    pub cyclic_e1: f64,
    /// (iv) reality of E1 and of the Stokes matrices.
    pub reality: f64,
    /// (v) transpose-inverse / zero-vs-infinity Stokes symmetries.
    pub stokes_symmetry: f64,
    /// (vi) no-formal-monodromy product equals the identity.
    pub no_formal_monodromy: f64,
    /// E1 = E1^T and det E1 = -1/27.
    pub e1_structure: f64,
    /// S_n = Q_n Q_{n+1/3} Q_{n+2/3} at both singular points.
    pub q_products: f64,
    /// Q_n = Pi^{-1} Q_{n+2/3} Pi and Q_{n+1}^inf = d3^{-1} Q_n^0 d3.
    pub q_symmetry: f64,
}

impl IdentityReport {
    pub fn max_residual(&self) -> f64 {
        [
            self.e2_two_routes,
            self.inversion_relation,
            self.cyclic_e1,
            self.reality,
            self.stokes_symmetry,
            self.no_formal_monodromy,
            self.e1_structure,
            self.q_products,
            self.q_symmetry,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Builds (A, B) from (s, y); the principal (positive) square root of the
/// radical is taken and A > 1/3 holds strictly away from the trivial point.
pub fn params_from_sy(m: MonodromyData) -> Result<ConnectionParams> {
    let MonodromyData { s, y } = m;
    let radical = (1.0 / 36.0 + (3.0 + s) / (1.0 - s) * (1.0 / 36.0 + y * y)).sqrt();
    let a_r = 1.0 / (3.0 * (3.0 + s)) + 2.0 / (3.0 + s) * radical;
    debug_assert!(a_r > 0.0);
    let b = omega_pow(2)
        * C64::new(
            1.0 / (3.0 * (3.0 + s)) - (1.0 + s) / (3.0 + s) * radical,
            y,
        );
    ConnectionParams::new(a_r, b, s)
}

fn check_s_range(s: f64) -> Result<()> {
    if s > -3.0 && s < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("Stokes parameter requires s in (-3, 1), got {s}")))
    }
}

/// The four Stokes matrices in terms of a = omega^2 s.
pub fn stokes_matrices(s: f64) -> Result<StokesSet> {
    check_s_range(s)?;
    let zero = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let w = omega_pow(1);
    let w2 = omega_pow(2);
    let a = w2 * s;
    Ok(StokesSet {
        s1_inf: Mat3::new([[one, a, zero], [zero, one, zero], [a, -a * w2, one]]),
        s2_inf: Mat3::new([
            [one, zero, -a * w2],
            [-a * w2, one, a * a * w + a],
            [zero, zero, one],
        ]),
        s1_zero: Mat3::new([
            [one, zero, -a],
            [-a, one, a * a + a * w2],
            [zero, zero, one],
        ]),
        s2_zero: Mat3::new([[one, a * w2, zero], [zero, one, zero], [a * w2, -a, one]]),
    })
}

/// The twelve elementary jump matrices Q_n.
pub fn q_matrices(s: f64) -> Result<QSet> {
    check_s_range(s)?;
    let w2 = omega_pow(2);
    let a = w2 * s;
    let q_inf = [
        Mat3::identity_plus(1, 2, a),       // n = 1
        Mat3::identity_plus(3, 2, -a * w2), // n = 4/3
        Mat3::identity_plus(3, 1, a),       // n = 5/3
        Mat3::identity_plus(2, 1, -a * w2), // n = 2
        Mat3::identity_plus(2, 3, a),       // n = 7/3
        Mat3::identity_plus(1, 3, -a * w2), // n = 8/3
    ];
    let q_zero = [
        Mat3::identity_plus(2, 1, -a),     // n = 1
        Mat3::identity_plus(2, 3, a * w2), // n = 4/3
        Mat3::identity_plus(1, 3, -a),     // n = 5/3
        Mat3::identity_plus(1, 2, a * w2), // n = 2
        Mat3::identity_plus(3, 2, -a),     // n = 7/3
        Mat3::identity_plus(3, 1, a * w2), // n = 8/3
    ];
    Ok(QSet { q_inf, q_zero })
}

/// E1 in the (A, B, s) parametrization.
pub fn e1_matrix(p: &ConnectionParams) -> Mat3 {
    let a = C64::new(p.a_r, 0.0);
    let b = p.b;
    let bb = p.b.conj();
    let s = C64::new(p.s, 0.0);
    let w = omega_pow(1);
    let w2 = omega_pow(2);
    Mat3::new([
        [a, b, bb],
        [b, w * s * a - w2 * s * b + bb, a],
        [bb, a, w2 * s * a + b - w * s * bb],
    ])
}

/// The connection matrices (E1, E2) with E2 = S2^0 E1 S1^inf.
pub fn connection_matrices(p: &ConnectionParams) -> Result<(Mat3, Mat3)> {
    let p = ConnectionParams::new(p.a_r, p.b, p.s)?;
    connection_matrices_unchecked(&p)
}

fn connection_matrices_unchecked(p: &ConnectionParams) -> Result<(Mat3, Mat3)> {
    let e1 = e1_matrix(p);
    let st = stokes_matrices(p.s)?;
    let e2 = st.s2_zero * e1 * st.s1_inf;
    Ok((e1, e2))
}

/// Runs the whole identity corpus and reports per-group maximum residuals.
/// Constraint violations in `p` are not rejected here: they surface as
/// large residuals, which is what the sensitivity checks rely on.
///
/// Each residual is the max-norm difference divided by (1 + scale), where
/// the scale is the product of the magnitudes of the factors entering the
/// identity — the natural bound on roundoff amplification in the products.
pub fn identity_suite(p: &ConnectionParams) -> Result<IdentityReport> {
    let k = constants();
    let (e1, e2) = connection_matrices_unchecked(p)?;
    let st = stokes_matrices(p.s)?;
    let q = q_matrices(p.s)?;
    let d3 = k.d3;
    let d3_inv = inverse(&d3)?;
    let det_e = C64::new(-1.0 / 27.0, 0.0);
    let e1_inv = inverse_with_det(&e1, det_e);
    let ninth = C64::new(1.0 / 9.0, 0.0);

    let res = |lhs: &Mat3, rhs: &Mat3, factors: &[&Mat3]| -> f64 {
        let scale = factors
            .iter()
            .fold(1.0_f64, |acc, m| acc * m.max_abs().max(1.0));
        (*lhs - *rhs).max_abs() / (1.0 + scale)
    };

    // (i) E2 = S1^{0,-1} E1 S2^{inf,-1} agrees with S2^0 E1 S1^inf.
    let one = C64::new(1.0, 0.0);
    let s1_zero_inv = inverse_with_det(&st.s1_zero, one);
    let s2_inf_inv = inverse_with_det(&st.s2_inf, one);
    let e2_alt = s1_zero_inv * e1 * s2_inf_inv;
    let e2_two_routes = res(&e2, &e2_alt, &[&s1_zero_inv, &e1, &s2_inf_inv]);

    // (ii) S2^0 E1 S1^inf = (1/9) d3 E1^{T-1} d3 = (1/9) d3 E1^{-1} d3.
    let via_t = (d3 * inverse_with_det(&e1.transpose(), det_e) * d3).scale(ninth);
    let via_inv = (d3 * e1_inv * d3).scale(ninth);
    let inv_scale: &[&Mat3] = &[&st.s2_zero, &e1, &st.s1_inf, &e1_inv];
    let inversion_relation = res(&e2, &via_t, inv_scale).max(res(&e2, &via_inv, inv_scale));

    // (iii) d3^{-1} E1 = omega (Q2 Q_{7/3} Pi) d3^{-1} E1 (Q1 Q_{4/3} Pi), all at infinity.
    let lhs = d3_inv * e1;
    let rhs = ((*q.inf(6) * *q.inf(7) * k.pi) * d3_inv * e1 * (*q.inf(3) * *q.inf(4) * k.pi))
        .scale(k.omega);
    let cyclic_e1 = res(&lhs, &rhs, &[q.inf(6), q.inf(7), &e1, q.inf(3), q.inf(4)]);

    // (iv) E1 = C conj(E1) C and conj(S1^inf) = C (S2^inf)^{-1} C.
    let reality = res(&e1, &(k.c * e1.conj() * k.c), &[&e1])
        .max(res(&st.s1_inf.conj(), &(k.c * s2_inf_inv * k.c), &[&s2_inf_inv]));

    // (v) S2^inf = d3^{-1} (S1^inf)^{T-1} d3; S1^0 = d3 S2^inf d3^{-1};
    //     S2^0 = d3 (S1^0)^{T-1} d3^{-1}.
    let s1_inf_tinv = inverse_with_det(&st.s1_inf.transpose(), one);
    let s1_zero_tinv = inverse_with_det(&st.s1_zero.transpose(), one);
    let stokes_symmetry = res(&st.s2_inf, &(d3_inv * s1_inf_tinv * d3), &[&s1_inf_tinv])
        .max(res(&st.s1_zero, &(d3 * st.s2_inf * d3_inv), &[&st.s2_inf]))
        .max(res(&st.s2_zero, &(d3 * s1_zero_tinv * d3_inv), &[&s1_zero_tinv]));

    // (vi) E2^{-1} S2^0 E1 S1^inf = I, with E2 from the route-(i) formula.
    let e2_alt_inv = inverse_with_det(&e2_alt, det_e);
    let no_formal_monodromy = res(
        &(e2_alt_inv * st.s2_zero * e1 * st.s1_inf),
        &Mat3::identity(),
        &[&e2_alt_inv, &st.s2_zero, &e1, &st.s1_inf],
    );

    // E1 symmetry and determinant (det scale ~ entry magnitude cubed).
    let e1_mag = e1.max_abs().max(1.0);
    let det_resid = (determinant(&e1) - C64::new(-1.0 / 27.0, 0.0)).norm()
        / (1.0 + e1_mag * e1_mag * e1_mag);
    let e1_structure = res(&e1, &e1.transpose(), &[&e1]).max(det_resid);

    // S_n = Q_n Q_{n+1/3} Q_{n+2/3} at both points.
    let q_products = res(&st.s1_inf, &(*q.inf(3) * *q.inf(4) * *q.inf(5)), &[q.inf(3), q.inf(4), q.inf(5)])
        .max(res(&st.s2_inf, &(*q.inf(6) * *q.inf(7) * *q.inf(8)), &[q.inf(6), q.inf(7), q.inf(8)]))
        .max(res(&st.s1_zero, &(*q.zero(3) * *q.zero(4) * *q.zero(5)), &[q.zero(3), q.zero(4), q.zero(5)]))
        .max(res(&st.s2_zero, &(*q.zero(6) * *q.zero(7) * *q.zero(8)), &[q.zero(6), q.zero(7), q.zero(8)]));

    // Q_n = Pi^{-1} Q_{n+2/3} Pi and Q_{n+1}^inf = d3^{-1} Q_n^0 d3.
    let pi_inv = inverse(&k.pi)?;
    let mut q_symmetry: f64 = 0.0;
    for n3 in 3..=6 {
        q_symmetry = q_symmetry
            .max(res(q.inf(n3), &(pi_inv * *q.inf(n3 + 2) * k.pi), &[q.inf(n3 + 2)]))
            .max(res(q.zero(n3), &(pi_inv * *q.zero(n3 + 2) * k.pi), &[q.zero(n3 + 2)]));
    }
    for n3 in 3..=5 {
        q_symmetry = q_symmetry
            .max(res(q.inf(n3 + 3), &(d3_inv * *q.zero(n3) * d3), &[q.zero(n3)]));
    }

    Ok(IdentityReport {
        e2_two_routes,
        inversion_relation,
        cyclic_e1,
        reality,
        stokes_symmetry,
        no_formal_monodromy,
        e1_structure,
        q_products,
        q_symmetry,
    })
}

// Entry shorthands shared by the six printed L/D/R parametrizations.
struct LdrEntries {
    ba: C64,  // B / A
    bba: C64, // conj(B) / A
    m: C64,   // |B|^2 / A^2
    s: C64,   // s as complex
    d_lo: C64,
    d_hi: C64,
}

impl LdrEntries {
    fn new(p: &ConnectionParams) -> Self {
        let a = p.a_r;
        LdrEntries {
            ba: p.b / a,
            bba: p.b.conj() / a,
            m: C64::new(p.b.norm_sqr() / (a * a), 0.0),
            s: C64::new(p.s, 0.0),
            d_lo: C64::new(1.0 / (3.0 * a), 0.0),
            d_hi: C64::new(3.0 * a, 0.0),
        }
    }
}

/// The six L_k D_k R_k factorizations from the printed parametrizations.
/// At the degenerate point B = 0 (hence s = 0, A = 1/3) every factor
/// reduces to the identity, which is the analytic-continuation limit.
pub fn ldr_decompose(p: &ConnectionParams) -> Result<Vec<LDRFactors>> {
    let p = ConnectionParams::new(p.a_r, p.b, p.s)?;
    let t = LdrEntries::new(&p);
    let (ba, bba, m, s) = (t.ba, t.bba, t.m, t.s);
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let w = omega_pow(1);
    let w2 = omega_pow(2);
    let (lo, hi) = (t.d_lo, t.d_hi);

    let l1 = Mat3::new([
        [one, -ba - w2 * m, -bba],
        [zero, one, zero],
        [zero, w2 * ba, one],
    ]);
    let d1 = Mat3::diag(lo, hi, one);
    let r1 = Mat3::new([
        [one, zero, zero],
        [-bba - w * m, one, w * bba],
        [-ba, zero, one],
    ]);

    let l2 = Mat3::new([
        [one, w * bba, zero],
        [zero, one, zero],
        [-ba, -w * m - w * s - bba, one],
    ]);
    let d2 = Mat3::diag(one, hi, lo);
    let r2 = Mat3::new([
        [one, zero, -bba],
        [w2 * ba, one, -w2 * m - w2 * s - ba],
        [zero, zero, one],
    ]);

    let l3 = Mat3::new([
        [one, zero, zero],
        [w2 * ba, one, zero],
        [-w2 * m - ba, -bba, one],
    ]);
    let d3 = Mat3::diag(hi, one, lo);
    let r3 = Mat3::new([
        [one, w * bba, -w * m - bba],
        [zero, one, -ba],
        [zero, zero, one],
    ]);

    let l4 = Mat3::new([
        [one, zero, zero],
        [-w * m - w * s - bba, one, -ba],
        [w * bba, zero, one],
    ]);
    let d4 = Mat3::diag(hi, lo, one);
    let r4 = Mat3::new([
        [one, -w2 * m - w2 * s - ba, w2 * ba],
        [zero, one, zero],
        [zero, -bba, one],
    ]);

    let l5 = Mat3::new([
        [one, zero, w2 * ba],
        [-bba, one, -w2 * m - ba],
        [zero, zero, one],
    ]);
    let d5 = Mat3::diag(one, lo, hi);
    let r5 = Mat3::new([
        [one, -ba, zero],
        [zero, one, zero],
        [w * bba, -w * m - bba, one],
    ]);

    let l6 = Mat3::new([
        [one, -ba, -w * m - w * s - bba],
        [zero, one, w * bba],
        [zero, zero, one],
    ]);
    let d6 = Mat3::diag(lo, one, hi);
    let r6 = Mat3::new([
        [one, zero, zero],
        [-bba, one, zero],
        [-w2 * m - w2 * s - ba, w2 * ba, one],
    ]);

    Ok([
        (l1, d1, r1),
        (l2, d2, r2),
        (l3, d3, r3),
        (l4, d4, r4),
        (l5, d5, r5),
        (l6, d6, r6),
    ]
    .into_iter()
    .enumerate()
    .map(|(i, (l, d, r))| LDRFactors { l, d, r, index: i + 1 })
    .collect())
}

/// The six target matrices reproduced by the LDR factors, built from
/// E~1^{-1} = (1/3) E1^{-1} C, E~2^{-1} = (1/3) E2^{-1} C and the
/// Q-conjugations at infinity.
pub fn ldr_targets(p: &ConnectionParams) -> Result<Vec<Mat3>> {
    let k = constants();
    let (e1, e2) = connection_matrices(p)?;
    let q = q_matrices(p.s)?;
    let third = C64::new(1.0 / 3.0, 0.0);
    let det_e = C64::new(-1.0 / 27.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let et1 = (inverse_with_det(&e1, det_e) * k.c).scale(third);
    let et2 = (inverse_with_det(&e2, det_e) * k.c).scale(third);
    Ok(vec![
        et1,
        inverse_with_det(q.inf(3), one) * et1 * *q.inf(6),
        *q.inf(5) * et2 * inverse_with_det(q.inf(8), one),
        et2,
        inverse_with_det(q.inf(6), one) * et2 * *q.inf(3),
        *q.inf(8) * et1 * inverse_with_det(q.inf(5), one),
    ])
}

/// Maximum residual of the K/Lambda factorization
/// (S1^0)* C E1^{-1} S1^0 = (1/lambda0) K* diag(1/(lambda1 q), 1, q/lambda1) K,
/// where K is built from omega^gamma = e^{2 pi i gamma / 3}.
pub fn e1_factorization_residual(p: &ConnectionParams, gamma: f64, q: f64) -> Result<f64> {
    if !(gamma > -0.5 && gamma < 1.0) {
        return Err(Error::Domain(format!("gamma = {gamma} outside (-1/2, 1)")));
    }
    if q <= 0.0 {
        return Err(Error::Domain(format!("q must be positive, got {q}")));
    }
    let p = ConnectionParams::new(p.a_r, p.b, p.s)?;
    let st = stokes_matrices(p.s)?;
    let k = constants();
    let e1 = e1_matrix(&p);
    let lhs = st.s1_zero.dagger()
        * k.c
        * inverse_with_det(&e1, C64::new(-1.0 / 27.0, 0.0))
        * st.s1_zero;

    let gt = PI * (1.0 - gamma) / 3.0;
    let lam0 = 4.0 / 3.0 * gt.sin().powi(2);
    let lam1 = 2.0 * gt.cos();
    let wg = C64::from_polar(1.0, 2.0 * PI * gamma / 3.0); // omega^gamma
    let w = omega_pow(1);
    let one = C64::new(1.0, 0.0);
    let kmat = Mat3::new([
        [one, wg, wg.inv()],
        [one, w, w.inv()],
        [one, omega_pow(2) / wg, wg / omega_pow(2)],
    ]);
    let mid = Mat3::diag(
        C64::new(1.0 / (lam1 * q), 0.0),
        one,
        C64::new(q / lam1, 0.0),
    );
    let rhs = (kmat.dagger() * mid * kmat).scale(C64::new(1.0 / lam0, 0.0));
    Ok(mat_residual(&lhs, &rhs))
}
