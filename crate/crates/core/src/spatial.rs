//! Minimal 3-D rigid-body algebra: rotations, homogeneous transforms, twists,
//! and the pose-to-spatial-displacement map used by position-based servoing.

use nalgebra::{Matrix3, Vector3, Vector6};

/// A rigid transform: orthonormal rotation (det +1) plus translation in metres.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pose3 {
    pub rotation: Matrix3<f64>,
    pub translation: Vector3<f64>,
}

/// A spatial velocity or displacement, stored (vx, vy, vz, wx, wy, wz).
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Twist {
    pub linear: Vector3<f64>,
    pub angular: Vector3<f64>,
}

impl Default for Pose3 {
    fn default() -> Self {
        Self::identity()
    }
}

impl Pose3 {
    pub fn identity() -> Self {
        Self {
            rotation: Matrix3::identity(),
            translation: Vector3::zeros(),
        }
    }

    pub fn from_parts(rotation: Matrix3<f64>, translation: Vector3<f64>) -> Self {
        Self {
            rotation,
            translation,
        }
    }

    pub fn from_translation(x: f64, y: f64, z: f64) -> Self {
        Self {
            rotation: Matrix3::identity(),
            translation: Vector3::new(x, y, z),
        }
    }

    pub fn rot_x(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self::from_parts(
            Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c),
            Vector3::zeros(),
        )
    }

    pub fn rot_y(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self::from_parts(
            Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c),
            Vector3::zeros(),
        )
    }

    pub fn rot_z(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self::from_parts(
            Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0),
            Vector3::zeros(),
        )
    }

    /// Rodrigues rotation about a unit axis.
    pub fn from_axis_angle(axis: Vector3<f64>, angle: f64) -> Self {
        Self::from_parts(rotation_exp(axis * angle), Vector3::zeros())
    }

    /// Planar pose (x, y, heading) embedded in 3-D, rotation about z.
    pub fn from_planar(x: f64, y: f64, theta: f64) -> Self {
        let mut p = Self::rot_z(theta);
        p.translation = Vector3::new(x, y, 0.0);
        p
    }

    /// Rotation angle of the orientation part, in [0, pi].
    pub fn rotation_angle(&self) -> f64 {
        let c = ((self.rotation.trace() - 1.0) / 2.0).clamp(-1.0, 1.0);
        c.acos()
    }

    /// Max elementwise deviation of R^T R from the identity.
    pub fn orthonormality_drift(&self) -> f64 {
        let e = self.rotation.transpose() * self.rotation - Matrix3::identity();
        e.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Re-project the rotation onto SO(3) when accumulated drift exceeds 1e-7.
    pub fn orthonormalized(&self) -> Self {
        if self.orthonormality_drift() <= 1e-7 {
            return *self;
        }
        let svd = self.rotation.svd(true, true);
        let u = svd.u.expect("svd of 3x3");
        let vt = svd.v_t.expect("svd of 3x3");
        let mut r = u * vt;
        if r.determinant() < 0.0 {
            let mut u = u;
            u.column_mut(2).neg_mut();
            r = u * vt;
        }
        Self::from_parts(r, self.translation)
    }
}

/// Homogeneous-matrix product a * b.
pub fn compose(a: &Pose3, b: &Pose3) -> Pose3 {
    Pose3 {
        rotation: a.rotation * b.rotation,
        translation: a.translation + a.rotation * b.translation,
    }
}

/// Rigid inverse (R^T, -R^T t).
pub fn inverse(a: &Pose3) -> Pose3 {
    let rt = a.rotation.transpose();
    Pose3 {
        rotation: rt,
        translation: -(rt * a.translation),
    }
}

impl std::ops::Mul for Pose3 {
    type Output = Pose3;
    fn mul(self, rhs: Pose3) -> Pose3 {
        compose(&self, &rhs)
    }
}

impl std::ops::Mul for &Pose3 {
    type Output = Pose3;
    fn mul(self, rhs: &Pose3) -> Pose3 {
        compose(self, rhs)
    }
}

/// Spatial displacement of a transform: translation plus the angle-axis
/// logarithm of the rotation block.
///
/// At a rotation angle of exactly pi the axis sign is ambiguous; the axis is
/// chosen deterministically with its largest-magnitude component positive.
pub fn psi(t: &Pose3) -> Twist {
    Twist {
        linear: t.translation,
        angular: rotation_log(&t.rotation),
    }
}

/// Angle-axis vector (axis * angle) of an orthonormal rotation matrix.
pub fn rotation_log(r: &Matrix3<f64>) -> Vector3<f64> {
    let cos_theta = ((r.trace() - 1.0) / 2.0).clamp(-1.0, 1.0);
    let theta = cos_theta.acos();
    // vee((R - R^T)/2) = sin(theta) * axis
    let w = Vector3::new(
        (r[(2, 1)] - r[(1, 2)]) / 2.0,
        (r[(0, 2)] - r[(2, 0)]) / 2.0,
        (r[(1, 0)] - r[(0, 1)]) / 2.0,
    );
    if theta <= 1e-7 {
        // First-order: axis*theta ~ vee term itself.
        return w;
    }
    if theta < 3.0 * std::f64::consts::FRAC_PI_4 {
        return w * (theta / theta.sin());
    }
    // Near pi the sin-based form loses precision; recover the axis from the
    // symmetric part: (S - cos*I)/(1 - cos) = a a^T.
    let s = (r + r.transpose()) / 2.0;
    let aat = (s - Matrix3::identity() * cos_theta) / (1.0 - cos_theta);
    let mut imax = 0;
    for i in 1..3 {
        if aat[(i, i)] > aat[(imax, imax)] {
            imax = i;
        }
    }
    let ai = aat[(imax, imax)].max(0.0).sqrt();
    let mut axis = Vector3::new(aat[(0, imax)], aat[(1, imax)], aat[(2, imax)]) / ai;
    axis.normalize_mut();
    if w.norm() > 1e-7 {
        if axis.dot(&w) < 0.0 {
            axis = -axis;
        }
    } else {
        // angle == pi: make the largest-magnitude component positive
        let mut jmax = 0;
        for j in 1..3 {
            if axis[j].abs() > axis[jmax].abs() {
                jmax = j;
            }
        }
        if axis[jmax] < 0.0 {
            axis = -axis;
        }
    }
    axis * theta
}

/// Rodrigues exponential of an angle-axis vector.
pub fn rotation_exp(omega: Vector3<f64>) -> Matrix3<f64> {
    let theta = omega.norm();
    if theta < 1e-12 {
        return Matrix3::identity();
    }
    let a = omega / theta;
    let k = Matrix3::new(0.0, -a.z, a.y, a.z, 0.0, -a.x, -a.y, a.x, 0.0);
    Matrix3::identity() + k * theta.sin() + (k * k) * (1.0 - theta.cos())
}

impl Twist {
    pub fn new(linear: Vector3<f64>, angular: Vector3<f64>) -> Self {
        Self { linear, angular }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_vector(v: &Vector6<f64>) -> Self {
        Self {
            linear: Vector3::new(v[0], v[1], v[2]),
            angular: Vector3::new(v[3], v[4], v[5]),
        }
    }

    pub fn to_vector(&self) -> Vector6<f64> {
        Vector6::new(
            self.linear.x,
            self.linear.y,
            self.linear.z,
            self.angular.x,
            self.angular.y,
            self.angular.z,
        )
    }

    pub fn norm(&self) -> f64 {
        self.to_vector().norm()
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self {
            linear: self.linear * k,
            angular: self.angular * k,
        }
    }

    /// Rotate both components into another frame.
    pub fn rotated(&self, r: &Matrix3<f64>) -> Self {
        Self {
            linear: r * self.linear,
            angular: r * self.angular,
        }
    }
}
