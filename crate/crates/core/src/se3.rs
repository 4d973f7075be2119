//! Rigid-body math: SO(3)/SE(3) types, exponential/logarithm maps, uniform
//! sampling, rotation averaging, and error metrics.
//!
//! Rotations are stored as 3x3 matrices and poses as rotation + position,
//! because the conjugation generator and the normalization bound are both
//! matrix-native. All angles are in radians.

use nalgebra::{Matrix3, Matrix4, Vector3};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Frobenius tolerance for the orthogonality and determinant invariants.
pub const ROTATION_TOL: f64 = 1e-9;

/// Width of the excluded band around the log branch cut at pi.
pub const LOG_BRANCH_MARGIN: f64 = 1e-6;

/// Rotation matrix in SO(3).
///
/// The inner matrix is only reachable through validated constructors, so a
/// `Rotation` always satisfies `R^T R = I` and `det R = +1` within
/// [`ROTATION_TOL`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation(Matrix3<f64>);

impl Rotation {
    pub fn identity() -> Self {
        Rotation(Matrix3::identity())
    }

    /// Validating constructor; rejects matrices outside the invariant band.
    pub fn from_matrix(m: Matrix3<f64>) -> Result<Self> {
        if !m.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("Rotation::from_matrix"));
        }
        let residual = (m.transpose() * m - Matrix3::identity()).norm();
        if residual > 1e-6 {
            return Err(Error::InvalidRotation(format!(
                "orthogonality residual {residual:.3e} exceeds 1e-6"
            )));
        }
        let det = m.determinant();
        if (det - 1.0).abs() > 1e-6 {
            return Err(Error::InvalidRotation(format!(
                "determinant {det:.9} is not +1"
            )));
        }
        Ok(Rotation(m))
    }

    /// Constructor for matrices already known to be orthonormal (products of
    /// validated rotations, closed-form exponentials).
    pub(crate) fn from_matrix_unchecked(m: Matrix3<f64>) -> Self {
        Rotation(m)
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn transpose(&self) -> Rotation {
        Rotation(self.0.transpose())
    }

    /// Frobenius norm of `R^T R - I`; diagnostic for drift measurements.
    pub fn orthogonality_residual(&self) -> f64 {
        (self.0.transpose() * self.0 - Matrix3::identity()).norm()
    }

    /// Rotation angle in [0, pi], extracted via atan2 so it is well defined
    /// at both branch ends.
    pub fn angle(&self) -> f64 {
        let skew_part = vee(&(self.0 - self.0.transpose())) / 2.0;
        let cos = ((self.0.trace() - 1.0) / 2.0).clamp(-1.0, 1.0);
        skew_part.norm().atan2(cos)
    }
}

impl std::ops::Mul for Rotation {
    type Output = Rotation;
    fn mul(self, rhs: Rotation) -> Rotation {
        Rotation(self.0 * rhs.0)
    }
}

impl std::ops::Mul<Vector3<f64>> for Rotation {
    type Output = Vector3<f64>;
    fn mul(self, rhs: Vector3<f64>) -> Vector3<f64> {
        self.0 * rhs
    }
}

/// Rigid transform in SE(3): rotation plus position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub rotation: Rotation,
    pub position: Vector3<f64>,
}

impl Pose {
    pub fn identity() -> Self {
        Pose {
            rotation: Rotation::identity(),
            position: Vector3::zeros(),
        }
    }

    pub fn new(rotation: Rotation, position: Vector3<f64>) -> Self {
        Pose { rotation, position }
    }

    pub fn inverse(&self) -> Pose {
        let rt = self.rotation.transpose();
        Pose {
            rotation: rt,
            position: -(rt * self.position),
        }
    }

    /// Homogeneous 4x4 matrix, row-major semantics `[R p; 0 1]`.
    pub fn to_homogeneous(&self) -> Matrix4<f64> {
        let mut h = Matrix4::identity();
        h.fixed_view_mut::<3, 3>(0, 0).copy_from(self.rotation.matrix());
        h.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.position);
        h
    }

    /// Validating inverse of [`to_homogeneous`](Self::to_homogeneous).
    pub fn from_homogeneous(h: &Matrix4<f64>) -> Result<Pose> {
        let bottom = h.row(3);
        let bottom_residual = (bottom[0].abs())
            .max(bottom[1].abs())
            .max(bottom[2].abs())
            .max((bottom[3] - 1.0).abs());
        if bottom_residual > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "homogeneous bottom row deviates from [0 0 0 1] by {bottom_residual:.3e}"
            )));
        }
        let rotation = Rotation::from_matrix(h.fixed_view::<3, 3>(0, 0).into_owned())?;
        Ok(Pose {
            rotation,
            position: h.fixed_view::<3, 1>(0, 3).into_owned(),
        })
    }

    /// Mixed-coordinate logarithm: SO(3) log of the rotation, position copied.
    pub fn log(&self) -> Result<Twist> {
        Ok(Twist {
            w: so3_log(&self.rotation)?,
            v: self.position,
        })
    }
}

impl std::ops::Mul for Pose {
    type Output = Pose;
    fn mul(self, rhs: Pose) -> Pose {
        Pose {
            rotation: self.rotation * rhs.rotation,
            position: self.rotation * rhs.position + self.position,
        }
    }
}

/// Local coordinates of a pose: rotation vector `w` (radians) and
/// translation `v` (length units).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Twist {
    pub w: Vector3<f64>,
    pub v: Vector3<f64>,
}

impl Twist {
    /// Mixed-coordinate exponential; inverse of [`Pose::log`].
    pub fn exp(&self) -> Result<Pose> {
        Ok(Pose {
            rotation: so3_exp(&self.w)?,
            position: self.v,
        })
    }
}

/// Skew-symmetric matrix `[w]` such that `[w] x = w × x`.
pub fn skew(w: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(
        0.0, -w.z, w.y, //
        w.z, 0.0, -w.x, //
        -w.y, w.x, 0.0,
    )
}

/// Inverse of [`skew`]; extracts the vector from a skew-symmetric matrix.
pub fn vee(m: &Matrix3<f64>) -> Vector3<f64> {
    Vector3::new(m[(2, 1)], m[(0, 2)], m[(1, 0)])
}

/// Rodrigues closed form of the SO(3) exponential map.
pub fn so3_exp(w: &Vector3<f64>) -> Result<Rotation> {
    if !w.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("so3_exp"));
    }
    let theta2 = w.norm_squared();
    let k = skew(w);
    // sin(t)/t and (1-cos(t))/t^2 with Taylor fallbacks below t ~ 1e-4,
    // where the closed forms start losing bits.
    let (a, b) = if theta2 < 1e-8 {
        (1.0 - theta2 / 6.0, 0.5 - theta2 / 24.0)
    } else {
        let theta = theta2.sqrt();
        (theta.sin() / theta, (1.0 - theta.cos()) / theta2)
    };
    Ok(Rotation(Matrix3::identity() + a * k + b * (k * k)))
}

/// Principal branch of the SO(3) logarithm.
///
/// Fails inside the band `angle >= pi - LOG_BRANCH_MARGIN` where the branch
/// is ill-conditioned; callers that may meet half turns must perturb first.
pub fn so3_log(r: &Rotation) -> Result<Vector3<f64>> {
    let theta = r.angle();
    if theta >= std::f64::consts::PI - LOG_BRANCH_MARGIN {
        return Err(Error::LogNearPi { angle: theta });
    }
    let half_vee = vee(&(r.0 - r.0.transpose())) / 2.0; // sin(theta) * axis
    if theta < 1e-9 {
        return Ok(half_vee);
    }
    Ok(half_vee * (theta / theta.sin()))
}

/// Haar-uniform rotation, built by normalizing a 4-d isotropic Gaussian to a
/// unit quaternion.
pub fn sample_uniform_rotation<R: Rng + ?Sized>(rng: &mut R) -> Rotation {
    loop {
        let q = [
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
        ];
        let n = (q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]).sqrt();
        if n < 1e-12 {
            continue;
        }
        let (w, x, y, z) = (q[0] / n, q[1] / n, q[2] / n, q[3] / n);
        let (xx, yy, zz) = (x * x, y * y, z * z);
        let (xy, xz, yz) = (x * y, x * z, y * z);
        let (wx, wy, wz) = (w * x, w * y, w * z);
        return Rotation(Matrix3::new(
            1.0 - 2.0 * (yy + zz),
            2.0 * (xy - wz),
            2.0 * (xz + wy),
            2.0 * (xy + wz),
            1.0 - 2.0 * (xx + zz),
            2.0 * (yz - wx),
            2.0 * (xz - wy),
            2.0 * (yz + wx),
            1.0 - 2.0 * (xx + yy),
        ));
    }
}

/// Uniform direction on the 2-sphere (normalized isotropic Gaussian).
pub fn sample_unit_vector<R: Rng + ?Sized>(rng: &mut R) -> Vector3<f64> {
    loop {
        let v = Vector3::new(
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
        );
        let n = v.norm();
        if n >= 1e-12 {
            return v / n;
        }
    }
}

/// Angular displacement between two rotations, in radians in [0, pi].
pub fn rotation_error(est: &Rotation, truth: &Rotation) -> f64 {
    (truth.transpose() * *est).angle()
}

/// Euclidean distance between the positions of two poses.
pub fn translation_error(est: &Pose, truth: &Pose) -> f64 {
    (est.position - truth.position).norm()
}

/// Chordal rotation mean: arithmetic matrix mean projected back onto SO(3)
/// by the orthogonal polar factor with determinant correction.
pub fn rotation_mean_chordal(rs: &[Rotation]) -> Result<Rotation> {
    if rs.is_empty() {
        return Err(Error::Empty("rotation_mean_chordal input"));
    }
    let mut sum = Matrix3::zeros();
    for r in rs {
        sum += r.matrix();
    }
    let mean = sum / rs.len() as f64;
    project_to_so3(&mean)
}

/// Nearest rotation to an arbitrary 3x3 matrix (polar projection).
pub fn project_to_so3(m: &Matrix3<f64>) -> Result<Rotation> {
    let svd = m.svd(true, true);
    let sigma_min = svd.singular_values.min();
    if sigma_min < 1e-12 {
        return Err(Error::DegenerateMean { sigma_min });
    }
    let u = svd.u.expect("svd with u");
    let v_t = svd.v_t.expect("svd with v_t");
    let det = (u * v_t).determinant();
    let correction = Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, det.signum()));
    Ok(Rotation(u * correction * v_t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    // Independent log oracle: quaternion extraction (Shepperd-style), a
    // different computational route than the atan2/vee implementation.
    fn log_via_quaternion(r: &Rotation) -> Vector3<f64> {
        let m = r.matrix();
        let tr = m.trace();
        let (w, x, y, z);
        if tr > 0.0 {
            let s = (tr + 1.0).sqrt() * 2.0;
            w = 0.25 * s;
            x = (m[(2, 1)] - m[(1, 2)]) / s;
            y = (m[(0, 2)] - m[(2, 0)]) / s;
            z = (m[(1, 0)] - m[(0, 1)]) / s;
        } else if m[(0, 0)] > m[(1, 1)] && m[(0, 0)] > m[(2, 2)] {
            let s = (1.0 + m[(0, 0)] - m[(1, 1)] - m[(2, 2)]).sqrt() * 2.0;
            w = (m[(2, 1)] - m[(1, 2)]) / s;
            x = 0.25 * s;
            y = (m[(0, 1)] + m[(1, 0)]) / s;
            z = (m[(0, 2)] + m[(2, 0)]) / s;
        } else if m[(1, 1)] > m[(2, 2)] {
            let s = (1.0 + m[(1, 1)] - m[(0, 0)] - m[(2, 2)]).sqrt() * 2.0;
            w = (m[(0, 2)] - m[(2, 0)]) / s;
            x = (m[(0, 1)] + m[(1, 0)]) / s;
            y = 0.25 * s;
            z = (m[(1, 2)] + m[(2, 1)]) / s;
        } else {
            let s = (1.0 + m[(2, 2)] - m[(0, 0)] - m[(1, 1)]).sqrt() * 2.0;
            w = (m[(1, 0)] - m[(0, 1)]) / s;
            x = (m[(0, 2)] + m[(2, 0)]) / s;
            y = (m[(1, 2)] + m[(2, 1)]) / s;
            z = 0.25 * s;
        }
        // Principal branch: flip to w >= 0, then angle = 2 atan2(|q_v|, w).
        let sign = if w < 0.0 { -1.0 } else { 1.0 };
        let (w, qv) = (w * sign, Vector3::new(x, y, z) * sign);
        let qv_norm = qv.norm();
        if qv_norm < 1e-15 {
            return Vector3::zeros();
        }
        qv / qv_norm * (2.0 * qv_norm.atan2(w))
    }

    fn random_rotation(seed: u64) -> Rotation {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        sample_uniform_rotation(&mut rng)
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let r = so3_exp(&Vector3::zeros()).unwrap();
        assert_eq!(r.matrix(), Rotation::identity().matrix());
    }

    #[test]
    fn exp_of_half_turn_about_x() {
        let r = so3_exp(&Vector3::new(PI, 0.0, 0.0)).unwrap();
        let expected = Matrix3::from_diagonal(&Vector3::new(1.0, -1.0, -1.0));
        assert!((r.matrix() - expected).norm() < 1e-12);
    }

    #[test]
    fn exp_rejects_non_finite() {
        assert!(matches!(
            so3_exp(&Vector3::new(f64::NAN, 0.0, 0.0)),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn log_of_identity_is_zero() {
        assert_eq!(so3_log(&Rotation::identity()).unwrap(), Vector3::zeros());
    }

    #[test]
    fn log_of_z_rotation_is_axis_angle() {
        let r = so3_exp(&Vector3::new(0.0, 0.0, 0.3)).unwrap();
        let w = so3_log(&r).unwrap();
        assert_relative_eq!(w.x, 0.0, epsilon = 1e-12);
        assert_relative_eq!(w.y, 0.0, epsilon = 1e-12);
        assert_relative_eq!(w.z, 0.3, epsilon = 1e-12);
    }

    #[test]
    fn log_rejects_half_turn() {
        let r = so3_exp(&Vector3::new(PI - 1e-9, 0.0, 0.0)).unwrap();
        assert!(matches!(so3_log(&r), Err(Error::LogNearPi { .. })));
    }

    #[test]
    fn exp_log_roundtrip_matches_quaternion_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let axis = sample_unit_vector(&mut rng);
            let angle = rng.random_range(1e-6..PI - 1e-3);
            let w = axis * angle;
            let r = so3_exp(&w).unwrap();
            let back = so3_log(&r).unwrap();
            assert!((back - w).norm() < 1e-9, "roundtrip failed at angle {angle}");
            let oracle = log_via_quaternion(&r);
            assert!(
                (oracle - w).norm() < 1e-9,
                "quaternion oracle disagrees at angle {angle}: {oracle:?} vs {w:?}"
            );
        }
    }

    #[test]
    fn log_at_large_angle() {
        let w = Vector3::new(2.9, 0.0, 0.0);
        let r = so3_exp(&w).unwrap();
        assert!((so3_log(&r).unwrap() - w).norm() < 1e-9);
    }

    #[test]
    fn compose_with_identity_and_inverse() {
        let a = Pose::new(random_rotation(1), Vector3::new(1.0, -2.0, 3.0));
        let ai = a * Pose::identity();
        assert_eq!(ai, a);
        let inv_id = Pose::identity().inverse();
        assert_eq!(inv_id, Pose::identity());

        // Oracle: direct 4x4 homogeneous inversion.
        let h = a.to_homogeneous();
        let h_inv = h.try_inverse().unwrap();
        let diff = (a.inverse().to_homogeneous() - h_inv).norm();
        assert!(diff < 1e-12);
        let closure = (a.inverse() * a).to_homogeneous() - Matrix4::identity();
        assert!(closure.norm() < 1e-12);
    }

    #[test]
    fn pose_exp_log_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let p = Pose::new(
                sample_uniform_rotation(&mut rng),
                Vector3::new(
                    rng.random_range(-10.0..10.0),
                    rng.random_range(-10.0..10.0),
                    rng.random_range(-10.0..10.0),
                ),
            );
            if p.rotation.angle() >= PI - 1e-3 {
                continue;
            }
            let back = p.log().unwrap().exp().unwrap();
            assert!((back.to_homogeneous() - p.to_homogeneous()).norm() < 1e-9);
        }
    }

    #[test]
    fn haar_rotation_mean_is_zero_matrix() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut sum = Matrix3::zeros();
        let n = 100_000;
        for _ in 0..n {
            sum += sample_uniform_rotation(&mut rng).matrix();
        }
        let mean = sum / n as f64;
        for v in mean.iter() {
            assert!(v.abs() < 0.02, "entry {v} too far from 0");
        }
    }

    #[test]
    fn haar_angle_distribution_matches_density() {
        // Haar angle density is (1 - cos t)/pi on [0, pi]; its CDF is
        // (t - sin t)/pi. Kolmogorov-Smirnov against the empirical CDF.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 100_000;
        let mut angles: Vec<f64> = (0..n)
            .map(|_| sample_uniform_rotation(&mut rng).angle())
            .collect();
        angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut ks: f64 = 0.0;
        for (i, t) in angles.iter().enumerate() {
            let cdf = (t - t.sin()) / PI;
            let emp_hi = (i + 1) as f64 / n as f64;
            let emp_lo = i as f64 / n as f64;
            ks = ks.max((emp_hi - cdf).abs()).max((emp_lo - cdf).abs());
        }
        assert!(ks < 0.01, "KS statistic {ks} too large");
    }

    #[test]
    fn different_seeds_give_different_rotations() {
        let a = random_rotation(1);
        let b = random_rotation(2);
        assert!(rotation_error(&a, &b) > 1e-6);
    }

    #[test]
    fn unit_vector_is_unit_and_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 100_000;
        let mut mean = Vector3::zeros();
        let mut z2: f64 = 0.0;
        for _ in 0..n {
            let v = sample_unit_vector(&mut rng);
            assert!((v.norm() - 1.0).abs() < 1e-12);
            mean += v;
            z2 += v.z * v.z;
        }
        mean /= n as f64;
        z2 /= n as f64;
        for c in mean.iter() {
            assert!(c.abs() < 0.02);
        }
        assert!((z2 - 1.0 / 3.0).abs() < 0.01, "E[v_z^2] = {z2}");
    }

    #[test]
    fn rotation_error_basics() {
        let r = random_rotation(5);
        assert_eq!(rotation_error(&r, &r), 0.0);
        let shifted = so3_exp(&Vector3::new(0.1, 0.0, 0.0)).unwrap() * r;
        assert_relative_eq!(rotation_error(&shifted, &r), 0.1, epsilon = 1e-9);
    }

    #[test]
    fn rotation_error_matches_trace_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let a = sample_uniform_rotation(&mut rng);
            let b = sample_uniform_rotation(&mut rng);
            let m = b.transpose() * a;
            let oracle = ((m.matrix().trace() - 1.0) / 2.0).clamp(-1.0, 1.0).acos();
            assert!((rotation_error(&a, &b) - oracle).abs() < 1e-9);
        }
    }

    #[test]
    fn translation_error_basics() {
        let x = Pose::new(random_rotation(8), Vector3::new(0.5, 1.5, -2.0));
        assert_eq!(translation_error(&x, &x), 0.0);
        let mut y = x;
        y.position += Vector3::new(3.0, 4.0, 0.0);
        assert_relative_eq!(translation_error(&y, &x), 5.0, epsilon = 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let a = Pose::new(sample_uniform_rotation(&mut rng), sample_unit_vector(&mut rng) * 3.0);
        let b = Pose::new(sample_uniform_rotation(&mut rng), sample_unit_vector(&mut rng) * 7.0);
        let direct = ((a.position.x - b.position.x).powi(2)
            + (a.position.y - b.position.y).powi(2)
            + (a.position.z - b.position.z).powi(2))
        .sqrt();
        assert_relative_eq!(translation_error(&a, &b), direct, epsilon = 1e-12);
    }

    #[test]
    fn chordal_mean_trivial_cases() {
        let r = random_rotation(13);
        let single = rotation_mean_chordal(&[r]).unwrap();
        assert!((single.matrix() - r.matrix()).norm() < 1e-12);
        let triple = rotation_mean_chordal(&[r, r, r]).unwrap();
        assert!((triple.matrix() - r.matrix()).norm() < 1e-12);
        assert!(matches!(
            rotation_mean_chordal(&[]),
            Err(Error::Empty(_))
        ));
    }

    #[test]
    fn chordal_mean_contracts_clusters() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..50 {
            let center = sample_uniform_rotation(&mut rng);
            let cluster: Vec<Rotation> = (0..32)
                .map(|_| {
                    let w = sample_unit_vector(&mut rng) * rng.random_range(0.0..0.05);
                    center * so3_exp(&w).unwrap()
                })
                .collect();
            let mean = rotation_mean_chordal(&cluster).unwrap();
            assert!(rotation_error(&mean, &center) < 0.05);
        }
    }

    #[test]
    fn degenerate_mean_is_rejected() {
        // Two opposite half-turns average to a rank-1 matrix.
        let a = so3_exp(&Vector3::new(PI - 1e-12, 0.0, 0.0)).unwrap();
        let b = so3_exp(&Vector3::new(0.0, PI - 1e-12, 0.0)).unwrap();
        let c = so3_exp(&Vector3::new(0.0, 0.0, PI - 1e-12)).unwrap();
        let result = rotation_mean_chordal(&[a, b, c, Rotation::identity()]);
        assert!(matches!(result, Err(Error::DegenerateMean { .. })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn exp_satisfies_rotation_invariants(
            wx in -10.0f64..10.0, wy in -10.0f64..10.0, wz in -10.0f64..10.0
        ) {
            let r = so3_exp(&Vector3::new(wx, wy, wz)).unwrap();
            prop_assert!(r.orthogonality_residual() < ROTATION_TOL);
            prop_assert!((r.matrix().determinant() - 1.0).abs() < ROTATION_TOL);
        }

        #[test]
        fn log_exp_roundtrip(
            ux in -1.0f64..1.0, uy in -1.0f64..1.0, uz in -1.0f64..1.0,
            angle in 1e-12f64..(PI - 1e-3)
        ) {
            let u = Vector3::new(ux, uy, uz);
            prop_assume!(u.norm() > 1e-3);
            let w = u / u.norm() * angle;
            let back = so3_log(&so3_exp(&w).unwrap()).unwrap();
            prop_assert!((back - w).norm() < 1e-8);
        }

        #[test]
        fn compose_is_associative(seed in 0u64..1u64 << 48) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut pose = || Pose::new(
                sample_uniform_rotation(&mut rng),
                Vector3::new(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)),
            );
            let (a, b, c) = (pose(), pose(), pose());
            let left = (a * b) * c;
            let right = a * (b * c);
            prop_assert!((left.to_homogeneous() - right.to_homogeneous()).norm() < 1e-12);
        }

        #[test]
        fn rotation_error_is_left_invariant(seed in 0u64..1u64 << 48) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let r = sample_uniform_rotation(&mut rng);
            let q1 = sample_uniform_rotation(&mut rng);
            let q2 = sample_uniform_rotation(&mut rng);
            let direct = rotation_error(&q1, &q2);
            let shifted = rotation_error(&(r * q1), &(r * q2));
            prop_assert!((direct - shifted).abs() < 1e-9);
        }
    }
}
