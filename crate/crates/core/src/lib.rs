//! Motion-planning toolkit for a 7-DOF manipulator.
//!
//! The pipeline: procedurally generate cluttered tabletop scenes, plan
//! expert collision-free trajectories with a sampling-based planner, build
//! segmented point-cloud observations, and deploy trajectory proposers
//! through SDF-scored test-time optimization.
//!
//! The geometry, kinematics, and collision core is generic over the scalar
//! type ([`scalar::Scalar`], `f32` or `f64`); the pipeline layers and all
//! file formats use the [`Real`] = `f64` aliases below so artifacts are
//! bit-reproducible.

pub mod cloudsim;
pub mod collision;
pub mod planner;
pub mod scenegen;
pub mod geom;
pub mod robot;
pub mod scalar;

#[cfg(test)]
pub(crate) mod testkit;

pub use scalar::Scalar;

/// Scalar used by the pipeline layers and serialized artifacts.
pub type Real = f64;

pub type Vec3 = nalgebra::Vector3<Real>;
pub type Point3 = nalgebra::Point3<Real>;
pub type Iso3 = nalgebra::Isometry3<Real>;
pub type UnitQuat = nalgebra::UnitQuaternion<Real>;

pub type Aabb = geom::Aabb<Real>;
pub type Cuboid = geom::Cuboid<Real>;
pub type Triangle = geom::Triangle<Real>;
pub type TriMesh = geom::TriMesh<Real>;

pub type CollisionWorld = collision::CollisionWorld<Real>;
pub type RobotGeometry = collision::RobotGeometry<Real>;

pub type JointConfig = robot::JointConfig<Real>;
pub type JointVector = robot::JointVector<Real>;
pub type KinematicChain = robot::KinematicChain<Real>;
pub type SphereModel = robot::SphereModel<Real>;
pub type EePose = robot::EePose<Real>;
pub type AttachedObject = robot::AttachedObject<Real>;
pub type AttachedShape = robot::AttachedShape<Real>;

pub use planner::{Path, PlanResult, PlanStatus, Trajectory};
pub use scenegen::{PlanningProblem, Scene};
