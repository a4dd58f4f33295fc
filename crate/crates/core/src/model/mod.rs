//! Kinematic models of mobile manipulators.
//!
//! A model is the serial chain of a planar mobile base, two or three virtual
//! base joints exposing instantaneous base motion, a fixed base-to-arm mount,
//! the arm joints, and a tool transform. Virtual joints are always evaluated
//! at zero; base motion is integrated by the simulator, never as joint state.

mod jacobian;
mod parse;

pub use jacobian::{
    jacobian, jacobian_arm, manipulability, manipulability_jacobian, ChainSnapshot, Frame,
    JmVariant,
};
pub use parse::parse_model;

use nalgebra::{DVector, Vector3};
use thiserror::Error;

use crate::spatial::{compose, Pose3};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid model: {0}")]
    Validation(String),
    #[error("dimension mismatch: model has {expected} arm joints, configuration has {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Joint archetypes. Virtual kinds exist only as the implicit base joints.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JointKind {
    Revolute,
    Prismatic,
    VirtualBaseRotation,
    VirtualBaseTranslation,
}

impl JointKind {
    /// Rotational joints contribute an angular Jacobian component.
    pub fn is_rotational(self) -> bool {
        matches!(self, JointKind::Revolute | JointKind::VirtualBaseRotation)
    }
}

#[derive(Clone, Debug)]
pub struct JointDesc {
    pub kind: JointKind,
    /// Unit axis in the local frame at the joint.
    pub axis: Vector3<f64>,
    pub q_min: f64,
    pub q_max: f64,
    pub qd_max: f64,
}

impl JointDesc {
    fn virtual_rotation() -> Self {
        Self {
            kind: JointKind::VirtualBaseRotation,
            axis: Vector3::z(),
            q_min: f64::NEG_INFINITY,
            q_max: f64::INFINITY,
            qd_max: f64::INFINITY,
        }
    }

    fn virtual_translation(axis: Vector3<f64>) -> Self {
        Self {
            kind: JointKind::VirtualBaseTranslation,
            axis,
            q_min: f64::NEG_INFINITY,
            q_max: f64::INFINITY,
            qd_max: f64::INFINITY,
        }
    }

    /// Local transform for a joint displaced by `q`.
    pub fn transform(&self, q: f64) -> Pose3 {
        if self.kind.is_rotational() {
            Pose3::from_axis_angle(self.axis, q)
        } else {
            Pose3::from_parts(nalgebra::Matrix3::identity(), self.axis * q)
        }
    }
}

/// One entry of the arm chain.
#[derive(Clone, Debug)]
pub enum Element {
    Fixed(Pose3),
    Joint(JointDesc),
}

/// Mobile-base style, which fixes the set of virtual joints.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BaseKind {
    /// Two-wheel differential drive; virtual joints are heading rotation
    /// followed by forward translation.
    Nonholonomic {
        wheel_radius: f64,
        wheel_separation: f64,
    },
    /// Planar translation in x and y plus rotation.
    Omnidirectional,
}

/// Planar base pose (x, y, heading).
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct PlanarPose {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

impl PlanarPose {
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        Self { x, y, theta }
    }

    pub fn to_pose3(self) -> Pose3 {
        Pose3::from_planar(self.x, self.y, self.theta)
    }
}

/// Immutable kinematic description of a mobile manipulator.
#[derive(Clone, Debug)]
pub struct KinematicModel {
    pub base_kind: BaseKind,
    elements: Vec<Element>,
    pub tool: Pose3,
    /// Documented default arm configuration ("ready" pose).
    ready: DVector<f64>,
    arm_joint_count: usize,
}

/// Instantaneous configuration: planar base pose plus arm joint vector.
/// Virtual joint values are identically zero whenever Jacobians are evaluated.
#[derive(Clone, Debug, PartialEq)]
pub struct Configuration {
    pub base: PlanarPose,
    pub q_a: DVector<f64>,
}

impl Configuration {
    pub fn new(base: PlanarPose, q_a: DVector<f64>) -> Self {
        Self { base, q_a }
    }
}

impl KinematicModel {
    pub(crate) fn from_parts(
        base_kind: BaseKind,
        elements: Vec<Element>,
        tool: Pose3,
        ready: Option<DVector<f64>>,
    ) -> Result<Self, ModelError> {
        let arm_joint_count = elements
            .iter()
            .filter(|e| matches!(e, Element::Joint(_)))
            .count();
        if arm_joint_count == 0 {
            return Err(ModelError::Validation("model has no arm joints".into()));
        }
        for e in &elements {
            if let Element::Joint(j) = e {
                if !(j.q_min < j.q_max) {
                    return Err(ModelError::Validation(format!(
                        "joint limits must satisfy qmin < qmax (got {} >= {})",
                        j.q_min, j.q_max
                    )));
                }
                if !(j.qd_max > 0.0) {
                    return Err(ModelError::Validation(format!(
                        "qdmax must be positive (got {})",
                        j.qd_max
                    )));
                }
            }
        }
        if let BaseKind::Nonholonomic {
            wheel_radius,
            wheel_separation,
        } = base_kind
        {
            if wheel_radius <= 0.0 || wheel_separation <= 0.0 {
                return Err(ModelError::Validation(
                    "wheel radius and separation must be positive".into(),
                ));
            }
        }
        let ready = match ready {
            Some(r) => {
                if r.len() != arm_joint_count {
                    return Err(ModelError::Validation(format!(
                        "ready pose has {} values for {} arm joints",
                        r.len(),
                        arm_joint_count
                    )));
                }
                r
            }
            None => DVector::zeros(arm_joint_count),
        };
        Ok(Self {
            base_kind,
            elements,
            tool,
            ready,
            arm_joint_count,
        })
    }

    /// The bundled Frankie model: differential-drive base with a 7-dof arm
    /// built from the manufacturer's published kinematic chain.
    pub fn frankie() -> Self {
        parse_model(include_str!("../../models/frankie.model"))
            .expect("bundled frankie model must parse")
    }

    pub fn base_joint_count(&self) -> usize {
        match self.base_kind {
            BaseKind::Nonholonomic { .. } => 2,
            BaseKind::Omnidirectional => 3,
        }
    }

    pub fn arm_joint_count(&self) -> usize {
        self.arm_joint_count
    }

    /// Total joint count: virtual base joints plus arm joints.
    pub fn joint_count(&self) -> usize {
        self.base_joint_count() + self.arm_joint_count
    }

    /// Virtual base joints in chain order.
    pub fn virtual_joints(&self) -> Vec<JointDesc> {
        match self.base_kind {
            BaseKind::Nonholonomic { .. } => vec![
                JointDesc::virtual_rotation(),
                JointDesc::virtual_translation(Vector3::x()),
            ],
            BaseKind::Omnidirectional => vec![
                JointDesc::virtual_translation(Vector3::x()),
                JointDesc::virtual_translation(Vector3::y()),
                JointDesc::virtual_rotation(),
            ],
        }
    }

    /// Index (within all joints) of the virtual joint that rotates the base.
    pub fn base_rotation_index(&self) -> usize {
        match self.base_kind {
            BaseKind::Nonholonomic { .. } => 0,
            BaseKind::Omnidirectional => 2,
        }
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    /// Arm joint descriptions in chain order.
    pub fn arm_joints(&self) -> impl Iterator<Item = &JointDesc> {
        self.elements.iter().filter_map(|e| match e {
            Element::Joint(j) => Some(j),
            Element::Fixed(_) => None,
        })
    }

    pub fn ready_arm_configuration(&self) -> DVector<f64> {
        self.ready.clone()
    }

    pub fn ready_configuration(&self) -> Configuration {
        Configuration::new(PlanarPose::default(), self.ready.clone())
    }

    fn check_dims(&self, cfg: &Configuration) -> Result<(), ModelError> {
        if cfg.q_a.len() != self.arm_joint_count {
            return Err(ModelError::DimensionMismatch {
                expected: self.arm_joint_count,
                got: cfg.q_a.len(),
            });
        }
        Ok(())
    }
}

/// World-frame end-effector pose with the virtual joints at zero.
pub fn fkine(model: &KinematicModel, cfg: &Configuration) -> Result<Pose3, ModelError> {
    fkine_virtual(model, cfg, None)
}

/// World-frame end-effector pose with explicit virtual-joint displacements
/// (used to probe the differential kinematics; `None` means all zero).
pub fn fkine_virtual(
    model: &KinematicModel,
    cfg: &Configuration,
    virtual_q: Option<&[f64]>,
) -> Result<Pose3, ModelError> {
    model.check_dims(cfg)?;
    let mut t = cfg.base.to_pose3();
    for (i, vj) in model.virtual_joints().iter().enumerate() {
        let q = virtual_q.map_or(0.0, |v| v[i]);
        if q != 0.0 {
            t = compose(&t, &vj.transform(q));
        }
    }
    t = compose(&t, &arm_transform(model, &cfg.q_a));
    Ok(t.orthonormalized())
}

/// Arm-only forward kinematics in the arm base frame (mount through tool).
pub fn fkine_arm(model: &KinematicModel, q_a: &DVector<f64>) -> Result<Pose3, ModelError> {
    if q_a.len() != model.arm_joint_count() {
        return Err(ModelError::DimensionMismatch {
            expected: model.arm_joint_count(),
            got: q_a.len(),
        });
    }
    Ok(arm_transform(model, q_a).orthonormalized())
}

fn arm_transform(model: &KinematicModel, q_a: &DVector<f64>) -> Pose3 {
    let mut t = Pose3::identity();
    let mut qi = 0;
    for e in &model.elements {
        match e {
            Element::Fixed(f) => t = compose(&t, f),
            Element::Joint(j) => {
                t = compose(&t, &j.transform(q_a[qi]));
                qi += 1;
            }
        }
    }
    compose(&t, &model.tool)
}

/// Virtual-joint rates (heading rate, forward speed) from wheel speeds.
pub fn inverse_wheel_map(
    wheel_left: f64,
    wheel_right: f64,
    radius: f64,
    separation: f64,
) -> (f64, f64) {
    (
        (radius / separation) * (wheel_right - wheel_left),
        (radius / 2.0) * (wheel_right + wheel_left),
    )
}

/// Wheel speeds (left, right) realising the given heading rate and forward
/// speed; exact inverse of [`inverse_wheel_map`].
pub fn wheel_map(theta_dot: f64, d_dot: f64, radius: f64, separation: f64) -> (f64, f64) {
    let half_track = separation / (2.0 * radius);
    (
        d_dot / radius - theta_dot * half_track,
        d_dot / radius + theta_dot * half_track,
    )
}
