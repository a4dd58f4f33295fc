//! Geometric Jacobians of the augmented (virtual-joint) chain, their joint
//! derivatives, and the manipulability measure and gradient.

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};

use super::{Configuration, Element, KinematicModel, ModelError};
use crate::spatial::{compose, Pose3};

/// Frame in which a Jacobian (or twist) is expressed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Frame {
    World,
    Base,
    EndEffector,
}

/// Manipulability-Jacobian variants used by the controller ablations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JmVariant {
    /// Gradient of the arm-only manipulability; zero block on base joints.
    ArmOnly,
    /// Gradient of the whole-platform manipulability.
    WholePlatform,
    /// Disabled: all-zero vector.
    Zero,
}

/// Per-joint axis/origin data recorded during a chain walk, all in one frame.
#[derive(Clone, Debug)]
pub struct ChainSnapshot {
    rotational: Vec<bool>,
    axes: Vec<Vector3<f64>>,
    origins: Vec<Vector3<f64>>,
    ee_position: Vector3<f64>,
}

impl ChainSnapshot {
    pub fn joint_count(&self) -> usize {
        self.rotational.len()
    }

    /// Geometric Jacobian column for joint `j`: revolute `[z x (pe - p); z]`,
    /// prismatic `[z; 0]`. Rows ordered linear then angular.
    fn column(&self, j: usize) -> (Vector3<f64>, Vector3<f64>) {
        if self.rotational[j] {
            let z = self.axes[j];
            (z.cross(&(self.ee_position - self.origins[j])), z)
        } else {
            (self.axes[j], Vector3::zeros())
        }
    }

    pub fn jacobian(&self) -> DMatrix<f64> {
        let n = self.joint_count();
        let mut jac = DMatrix::zeros(6, n);
        for j in 0..n {
            let (lin, ang) = self.column(j);
            for r in 0..3 {
                jac[(r, j)] = lin[r];
                jac[(r + 3, j)] = ang[r];
            }
        }
        jac
    }

    /// Derivative of every Jacobian column with respect to joint `i`.
    ///
    /// Rotating joint i sweeps the axes and origins of all later joints and
    /// the end-effector point; a prismatic joint i translates them rigidly.
    pub fn jacobian_derivative(&self, i: usize) -> DMatrix<f64> {
        let n = self.joint_count();
        let mut d = DMatrix::zeros(6, n);
        let zi = self.axes[i];
        let pe = self.ee_position;
        for j in 0..n {
            let (dlin, dang) = if self.rotational[i] {
                let pi = self.origins[i];
                if self.rotational[j] {
                    if i < j {
                        let zj = self.axes[j];
                        let pj = self.origins[j];
                        let dz = zi.cross(&zj);
                        (
                            dz.cross(&(pe - pj)) + zj.cross(&zi.cross(&(pe - pj))),
                            dz,
                        )
                    } else {
                        let zj = self.axes[j];
                        (zj.cross(&zi.cross(&(pe - pi))), Vector3::zeros())
                    }
                } else if i < j {
                    (zi.cross(&self.axes[j]), Vector3::zeros())
                } else {
                    (Vector3::zeros(), Vector3::zeros())
                }
            } else {
                // prismatic i: only the end-effector point moves relative to
                // joints at or before i
                if self.rotational[j] && i >= j {
                    (self.axes[j].cross(&zi), Vector3::zeros())
                } else {
                    (Vector3::zeros(), Vector3::zeros())
                }
            };
            for r in 0..3 {
                d[(r, j)] = dlin[r];
                d[(r + 3, j)] = dang[r];
            }
        }
        d
    }
}

fn rotate_snapshot(snap: &mut ChainSnapshot, r: &Matrix3<f64>) {
    for a in &mut snap.axes {
        *a = r * *a;
    }
    for p in &mut snap.origins {
        *p = r * *p;
    }
    snap.ee_position = r * snap.ee_position;
}

/// Walk the full chain (virtual joints at zero, then arm) in the world frame.
fn snapshot_full(model: &KinematicModel, cfg: &Configuration) -> ChainSnapshot {
    let mut snap = ChainSnapshot {
        rotational: Vec::with_capacity(model.joint_count()),
        axes: Vec::with_capacity(model.joint_count()),
        origins: Vec::with_capacity(model.joint_count()),
        ee_position: Vector3::zeros(),
    };
    let mut t = cfg.base.to_pose3();
    for vj in model.virtual_joints() {
        snap.rotational.push(vj.kind.is_rotational());
        snap.axes.push(t.rotation * vj.axis);
        snap.origins.push(t.translation);
        // virtual value is zero: transform is the identity
    }
    walk_elements(model, &cfg.q_a, &mut t, &mut snap);
    snap
}

/// Walk the arm chain only, in the arm base frame.
fn snapshot_arm(model: &KinematicModel, q_a: &DVector<f64>) -> ChainSnapshot {
    let mut snap = ChainSnapshot {
        rotational: Vec::with_capacity(model.arm_joint_count()),
        axes: Vec::with_capacity(model.arm_joint_count()),
        origins: Vec::with_capacity(model.arm_joint_count()),
        ee_position: Vector3::zeros(),
    };
    let mut t = Pose3::identity();
    walk_elements(model, q_a, &mut t, &mut snap);
    snap
}

fn walk_elements(
    model: &KinematicModel,
    q_a: &DVector<f64>,
    t: &mut Pose3,
    snap: &mut ChainSnapshot,
) {
    let mut qi = 0;
    for e in model.elements() {
        match e {
            Element::Fixed(f) => *t = compose(t, f),
            Element::Joint(j) => {
                snap.rotational.push(j.kind.is_rotational());
                snap.axes.push(t.rotation * j.axis);
                snap.origins.push(t.translation);
                *t = compose(t, &j.transform(q_a[qi]));
                qi += 1;
            }
        }
    }
    *t = compose(t, &model.tool);
    snap.ee_position = t.translation;
}

/// Geometric Jacobian of the augmented chain (columns: virtual base joints
/// first, then arm joints) expressed in the requested frame.
pub fn jacobian(
    model: &KinematicModel,
    cfg: &Configuration,
    frame: Frame,
) -> Result<DMatrix<f64>, ModelError> {
    if cfg.q_a.len() != model.arm_joint_count() {
        return Err(ModelError::DimensionMismatch {
            expected: model.arm_joint_count(),
            got: cfg.q_a.len(),
        });
    }
    let mut snap = snapshot_full(model, cfg);
    match frame {
        Frame::World => {}
        Frame::Base => {
            let rt = cfg.base.to_pose3().rotation.transpose();
            rotate_snapshot(&mut snap, &rt);
        }
        Frame::EndEffector => {
            let te = super::fkine(model, cfg)?;
            rotate_snapshot(&mut snap, &te.rotation.transpose());
        }
    }
    Ok(snap.jacobian())
}

/// Arm-only geometric Jacobian in the arm base frame.
pub fn jacobian_arm(model: &KinematicModel, q_a: &DVector<f64>) -> Result<DMatrix<f64>, ModelError> {
    if q_a.len() != model.arm_joint_count() {
        return Err(ModelError::DimensionMismatch {
            expected: model.arm_joint_count(),
            got: q_a.len(),
        });
    }
    Ok(snapshot_arm(model, q_a).jacobian())
}

/// Yoshikawa manipulability m = sqrt(det(J J^T)); zero at singularities.
/// Round-off can push the determinant slightly negative, which clamps to 0.
pub fn manipulability(jac: &DMatrix<f64>) -> f64 {
    let jjt = jac * jac.transpose();
    jjt.determinant().max(0.0).sqrt()
}

fn manipulability_gradient(snap: &ChainSnapshot, indices: &[usize]) -> Vec<f64> {
    let jac = snap.jacobian();
    let jjt = &jac * jac.transpose();
    let m = jjt.determinant().max(0.0).sqrt();
    let Some(jjt_inv) = jjt.try_inverse() else {
        return vec![0.0; indices.len()];
    };
    if m < 1e-12 {
        return vec![0.0; indices.len()];
    }
    let jt = jac.transpose();
    indices
        .iter()
        .map(|&i| {
            let dj = snap.jacobian_derivative(i);
            m * (&jjt_inv * (dj * &jt)).trace()
        })
        .collect()
}

/// Gradient of manipulability with respect to the joint coordinates, laid out
/// over all joints (base first). The arm-only variant carries exact zeros on
/// the base block; the whole-platform variant's base entries are also exactly
/// zero because rigid base motion leaves the platform Jacobian's Gram matrix
/// unchanged.
pub fn manipulability_jacobian(
    model: &KinematicModel,
    cfg: &Configuration,
    variant: JmVariant,
) -> Result<DVector<f64>, ModelError> {
    if cfg.q_a.len() != model.arm_joint_count() {
        return Err(ModelError::DimensionMismatch {
            expected: model.arm_joint_count(),
            got: cfg.q_a.len(),
        });
    }
    let n_b = model.base_joint_count();
    let n = model.joint_count();
    let mut out = DVector::zeros(n);
    match variant {
        JmVariant::Zero => {}
        JmVariant::ArmOnly => {
            let snap = snapshot_arm(model, &cfg.q_a);
            let idx: Vec<usize> = (0..model.arm_joint_count()).collect();
            let grad = manipulability_gradient(&snap, &idx);
            for (k, g) in grad.into_iter().enumerate() {
                out[n_b + k] = g;
            }
        }
        JmVariant::WholePlatform => {
            let snap = snapshot_full(model, cfg);
            let idx: Vec<usize> = (n_b..n).collect();
            let grad = manipulability_gradient(&snap, &idx);
            for (k, g) in grad.into_iter().enumerate() {
                out[n_b + k] = g;
            }
        }
    }
    Ok(out)
}
