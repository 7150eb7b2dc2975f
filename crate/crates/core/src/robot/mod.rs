//! Kinematic chain of the 7-DOF arm, its sphere-based collision geometry,
//! and end-effector pose computation.

mod cover;
pub mod description;
mod ik;

pub use description::RobotDescription;
pub use ik::{inverse_kinematics, IkParams, IkResult};

use nalgebra::{Isometry3, Point3, SVector, Unit, UnitQuaternion, Vector3};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::TriMesh;
use crate::scalar::Scalar;

/// Number of actuated joints in the chain.
pub const NUM_JOINTS: usize = 7;

/// A 7-vector of joint quantities (angles, velocities, deltas).
pub type JointVector<S> = SVector<S, NUM_JOINTS>;

#[derive(Debug, Error)]
pub enum RobotError {
    #[error("joint {joint} value {value} outside limits [{lower}, {upper}]")]
    JointLimit { joint: usize, value: f64, lower: f64, upper: f64 },
    #[error("sphere references link {link}, chain has {NUM_JOINTS} links")]
    BadSphereLink { link: usize },
}

/// Joint angles in radians; the unit of planning.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointConfig<S: Scalar>(pub JointVector<S>);

impl<S: Scalar> JointConfig<S> {
    pub fn new(q: [S; NUM_JOINTS]) -> Self {
        Self(JointVector::from(q))
    }

    pub fn zeros() -> Self {
        Self(JointVector::zeros())
    }

    pub fn as_vector(&self) -> &JointVector<S> {
        &self.0
    }

    /// Largest per-joint absolute difference to `other`.
    pub fn max_norm_distance(&self, other: &Self) -> S {
        (self.0 - other.0).amax()
    }

    /// Euclidean joint-space distance to `other`.
    pub fn distance(&self, other: &Self) -> S {
        (self.0 - other.0).norm()
    }

    /// Linear interpolation `self + t * (other - self)`; the endpoints are
    /// returned bit-exactly (plain evaluation can overshoot a limit-tight
    /// endpoint by an ulp).
    pub fn lerp(&self, other: &Self, t: S) -> Self {
        if t == S::zero() {
            *self
        } else if t == S::one() {
            *other
        } else {
            Self(self.0 + (other.0 - self.0) * t)
        }
    }
}

impl<S: Scalar> std::ops::Index<usize> for JointConfig<S> {
    type Output = S;
    fn index(&self, i: usize) -> &S {
        &self.0[i]
    }
}

/// One revolute joint: fixed transform from the parent frame, then a
/// rotation about `axis` by the joint angle.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Link<S: Scalar> {
    pub origin: Isometry3<S>,
    pub axis: Unit<Vector3<S>>,
}

/// The 7-joint serial chain plus its limits and end-effector offset.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KinematicChain<S: Scalar> {
    pub base: Isometry3<S>,
    pub links: Vec<Link<S>>,
    pub lower: JointVector<S>,
    pub upper: JointVector<S>,
    pub velocity_limit: JointVector<S>,
    pub acceleration_limit: JointVector<S>,
    pub ee_offset: Isometry3<S>,
}

impl<S: Scalar> KinematicChain<S> {
    pub fn new(
        base: Isometry3<S>,
        links: Vec<Link<S>>,
        lower: JointVector<S>,
        upper: JointVector<S>,
        velocity_limit: JointVector<S>,
        acceleration_limit: JointVector<S>,
        ee_offset: Isometry3<S>,
    ) -> Self {
        assert_eq!(links.len(), NUM_JOINTS, "chain must have exactly {NUM_JOINTS} joints");
        assert!(
            lower.iter().zip(upper.iter()).all(|(l, u)| l < u),
            "every joint needs lower < upper"
        );
        Self { base, links, lower, upper, velocity_limit, acceleration_limit, ee_offset }
    }

    /// World pose of the first link frame at zero joint angle.
    pub fn base_transform(&self) -> Isometry3<S> {
        self.base * self.links[0].origin
    }

    pub fn check_limits(&self, q: &JointConfig<S>) -> Result<(), RobotError> {
        for i in 0..NUM_JOINTS {
            if q[i] < self.lower[i] || q[i] > self.upper[i] {
                return Err(RobotError::JointLimit {
                    joint: i,
                    value: q[i].to_config(),
                    lower: self.lower[i].to_config(),
                    upper: self.upper[i].to_config(),
                });
            }
        }
        Ok(())
    }

    pub fn within_limits(&self, q: &JointConfig<S>) -> bool {
        self.check_limits(q).is_ok()
    }

    /// Clamp each joint into its limit interval.
    pub fn clamp(&self, q: &JointConfig<S>) -> JointConfig<S> {
        let mut out = q.0;
        for i in 0..NUM_JOINTS {
            out[i] = out[i].clamp(self.lower[i], self.upper[i]);
        }
        JointConfig(out)
    }

    /// Mid-range configuration, always within limits.
    pub fn midpoint(&self) -> JointConfig<S> {
        JointConfig((self.lower + self.upper) * S::from_config(0.5))
    }

    /// Uniform sample inside the joint limits.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> JointConfig<S> {
        let mut q = JointVector::zeros();
        for i in 0..NUM_JOINTS {
            q[i] = rng.random_range(self.lower[i]..=self.upper[i]);
        }
        JointConfig(q)
    }
}

/// End-effector pose: position plus unit quaternion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EePose<S: Scalar> {
    pub position: Point3<S>,
    pub orientation: UnitQuaternion<S>,
}

impl<S: Scalar> EePose<S> {
    pub fn new(position: Point3<S>, orientation: UnitQuaternion<S>) -> Self {
        Self { position, orientation: UnitQuaternion::new_normalize(*orientation.quaternion()) }
    }

    pub fn from_isometry(iso: &Isometry3<S>) -> Self {
        Self::new(Point3::from(iso.translation.vector), iso.rotation)
    }

    pub fn to_isometry(&self) -> Isometry3<S> {
        Isometry3::from_parts(self.position.coords.into(), self.orientation)
    }

    /// Position distance and geodesic rotation angle (radians) to `other`.
    pub fn errors_to(&self, other: &Self) -> (S, S) {
        let pos = (self.position - other.position).norm();
        let rot = self.orientation.angle_to(&other.orientation);
        (pos, rot)
    }
}

/// Sphere attached to a chain link, expressed in that link's frame.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SphereSpec<S: Scalar> {
    pub link: usize,
    pub offset: Vector3<S>,
    pub radius: S,
}

/// Sphere decomposition of the robot body.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SphereModel<S: Scalar> {
    pub spheres: Vec<SphereSpec<S>>,
}

impl<S: Scalar> SphereModel<S> {
    pub fn new(spheres: Vec<SphereSpec<S>>) -> Result<Self, RobotError> {
        for s in &spheres {
            if s.link >= NUM_JOINTS {
                return Err(RobotError::BadSphereLink { link: s.link });
            }
        }
        Ok(Self { spheres })
    }

    pub fn len(&self) -> usize {
        self.spheres.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spheres.is_empty()
    }
}

/// Which link pairs are exempt from self-collision checking.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SelfCollisionPairs {
    pub excluded_link_pairs: Vec<(usize, usize)>,
}

impl SelfCollisionPairs {
    /// True when the sphere pair on links `a` and `b` must be checked.
    pub fn should_check(&self, a: usize, b: usize) -> bool {
        if a == b {
            return false;
        }
        let key = (a.min(b), a.max(b));
        !self.excluded_link_pairs.iter().any(|&(x, y)| (x.min(y), x.max(y)) == key)
    }
}

/// Shape carried in the gripper.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum AttachedShape<S: Scalar> {
    Box { half_extents: Vector3<S> },
    Cylinder { radius: S, half_height: S },
    Sphere { radius: S },
    Mesh(TriMesh<S>),
}

impl<S: Scalar> AttachedShape<S> {
    /// Size along the longest dimension, in meters.
    pub fn longest_dimension(&self) -> S {
        let two = S::from_config(2.0);
        match self {
            AttachedShape::Box { half_extents } => two * half_extents.amax(),
            AttachedShape::Cylinder { radius, half_height } => {
                (two * *radius).max(two * *half_height)
            }
            AttachedShape::Sphere { radius } => two * *radius,
            AttachedShape::Mesh(mesh) => mesh.longest_extent(),
        }
    }
}

#[derive(Debug, Error)]
pub enum AttachError {
    #[error("attached object longest dimension {0} m outside [0.03, 0.30] m")]
    BadSize(f64),
    #[error("grasp offset translation {0} m exceeds the 5 cm cube around the gripper midpoint")]
    BadGraspOffset(f64),
}

/// Object held in the gripper, with a precomputed conservative sphere cover
/// expressed in the end-effector frame. For collision checking and
/// observations the object counts as part of the robot.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AttachedObject<S: Scalar> {
    pub shape: AttachedShape<S>,
    pub grasp_offset: Isometry3<S>,
    cover: Vec<(Point3<S>, S)>,
}

impl<S: Scalar> AttachedObject<S> {
    pub fn new(shape: AttachedShape<S>, grasp_offset: Isometry3<S>) -> Result<Self, AttachError> {
        let dim = shape.longest_dimension().to_config();
        if !(0.03..=0.30 + 1e-12).contains(&dim) {
            return Err(AttachError::BadSize(dim));
        }
        let t = grasp_offset.translation.vector;
        let worst = t.amax().to_config();
        if worst > 0.05 + 1e-12 {
            return Err(AttachError::BadGraspOffset(worst));
        }
        let cover = cover::sphere_cover(&shape)
            .into_iter()
            .map(|(c, r)| (grasp_offset.transform_point(&c), r))
            .collect();
        Ok(Self { shape, grasp_offset, cover })
    }

    /// Cover spheres in the end-effector frame.
    pub fn cover_spheres(&self) -> &[(Point3<S>, S)] {
        &self.cover
    }
}

/// World transform of every link frame, composed root to tip.
pub fn forward_kinematics<S: Scalar>(
    chain: &KinematicChain<S>,
    q: &JointConfig<S>,
) -> Result<Vec<Isometry3<S>>, RobotError> {
    chain.check_limits(q)?;
    let mut out = Vec::with_capacity(NUM_JOINTS);
    let mut t = chain.base;
    for (link, qi) in chain.links.iter().zip(q.0.iter()) {
        let joint = UnitQuaternion::from_axis_angle(&link.axis, *qi);
        t *= link.origin * Isometry3::from_parts(nalgebra::Translation3::identity(), joint);
        out.push(t);
    }
    Ok(out)
}

/// End-effector pose at `q`: last link frame composed with the EE offset.
pub fn ee_pose<S: Scalar>(
    chain: &KinematicChain<S>,
    q: &JointConfig<S>,
) -> Result<EePose<S>, RobotError> {
    let frames = forward_kinematics(chain, q)?;
    Ok(EePose::from_isometry(&(frames[NUM_JOINTS - 1] * chain.ee_offset)))
}

/// World center and radius of every model sphere at `q`, plus the cover
/// spheres of an attached object when present.
pub fn sphere_centers<S: Scalar>(
    chain: &KinematicChain<S>,
    model: &SphereModel<S>,
    q: &JointConfig<S>,
    attached: Option<&AttachedObject<S>>,
) -> Result<Vec<(Point3<S>, S)>, RobotError> {
    let frames = forward_kinematics(chain, q)?;
    Ok(sphere_centers_with_frames(chain, model, &frames, attached))
}

/// Same as [`sphere_centers`] but reusing an FK result.
pub fn sphere_centers_with_frames<S: Scalar>(
    chain: &KinematicChain<S>,
    model: &SphereModel<S>,
    frames: &[Isometry3<S>],
    attached: Option<&AttachedObject<S>>,
) -> Vec<(Point3<S>, S)> {
    let extra = attached.map_or(0, |a| a.cover_spheres().len());
    let mut out = Vec::with_capacity(model.len() + extra);
    for s in &model.spheres {
        out.push((frames[s.link].transform_point(&Point3::from(s.offset)), s.radius));
    }
    if let Some(att) = attached {
        let ee = frames[NUM_JOINTS - 1] * chain.ee_offset;
        for (c, r) in att.cover_spheres() {
            out.push((ee.transform_point(c), *r));
        }
    }
    out
}

/// Link index of each output sphere, attachment spheres mapped to the wrist.
pub fn sphere_links<S: Scalar>(
    model: &SphereModel<S>,
    attached: Option<&AttachedObject<S>>,
) -> Vec<usize> {
    let mut out: Vec<usize> = model.spheres.iter().map(|s| s.link).collect();
    if let Some(att) = attached {
        out.extend(std::iter::repeat(NUM_JOINTS - 1).take(att.cover_spheres().len()));
    }
    out
}

#[cfg(test)]
pub(crate) mod tests;
