//! Start/goal sampling: free-space configurations by rejection, tight-space
//! configurations by sampling an end-effector pose inside an asset interior
//! and solving IK.

use nalgebra::{Quaternion, UnitQuaternion};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{ConfigClass, PlanningProblem, Scene, SceneError};
use crate::collision::{config_in_collision, CollisionWorld, RobotGeometry};
use crate::robot::{inverse_kinematics, IkParams, IkResult};
use crate::scenegen::MeshLibrary;
use crate::{AttachedObject, AttachedShape, EePose, Iso3, JointConfig, Real, Vec3};

#[derive(Debug, Clone)]
pub struct SamplerParams {
    /// Attempt budget before reporting a sampling failure.
    pub max_attempts: usize,
    /// Free-space configs keep the EE at least this far from every asset.
    pub free_clearance: Real,
    /// Probability that an endpoint is tight-space.
    pub tight_ratio: Real,
    /// Probability that a problem carries an in-hand object.
    pub in_hand_ratio: Real,
    /// Longest straight-line joint move (max-norm) a problem may span; a
    /// 50-waypoint, 0.1-rad trajectory cannot represent more than 4.9.
    pub max_joint_span: Real,
    pub ik: IkParams<Real>,
}

impl Default for SamplerParams {
    fn default() -> Self {
        Self {
            max_attempts: 200,
            free_clearance: 0.15,
            tight_ratio: 0.5,
            in_hand_ratio: 0.5,
            max_joint_span: 4.5,
            ik: IkParams { max_restarts: 4, tol_pos: 1e-3, tol_rot: 5e-2, ..IkParams::default() },
        }
    }
}

fn uniform_quaternion(rng: &mut ChaCha8Rng) -> UnitQuaternion<Real> {
    // Normalized 4-vector of standard normals is uniform on SO(3).
    let mut q = [0.0; 4];
    for v in &mut q {
        *v = rng.sample::<Real, _>(rand_distr::StandardNormal);
    }
    UnitQuaternion::new_normalize(Quaternion::new(q[0], q[1], q[2], q[3]))
}

/// Samples a collision-free configuration of the requested class.
///
/// Free: uniform in the joint limits, accepted when collision-free and the
/// EE clears every asset bounding box. Tight: an EE pose inside a random
/// asset interior region, reached through IK, accepted when collision-free.
pub fn sample_config(
    scene: &Scene,
    class: ConfigClass,
    rng: &mut ChaCha8Rng,
    world: &CollisionWorld<Real>,
    robot: &RobotGeometry<Real>,
    attached: Option<&AttachedObject>,
    params: &SamplerParams,
) -> Result<JointConfig, SceneError> {
    match class {
        ConfigClass::Free => sample_free(scene, rng, world, robot, attached, params),
        ConfigClass::Tight => sample_tight(scene, rng, world, robot, attached, params),
    }
}

fn sample_free(
    scene: &Scene,
    rng: &mut ChaCha8Rng,
    world: &CollisionWorld<Real>,
    robot: &RobotGeometry<Real>,
    attached: Option<&AttachedObject>,
    params: &SamplerParams,
) -> Result<JointConfig, SceneError> {
    let asset_aabbs: Vec<crate::Aabb> =
        scene.assets.iter().map(|a| a.asset.world_aabb()).collect();
    for _ in 0..params.max_attempts {
        let q = robot.chain.sample_uniform(rng);
        let ee = crate::robot::ee_pose(&robot.chain, &q).expect("sampled within limits");
        if asset_aabbs.iter().any(|b| b.distance_to_point(&ee.position) <= params.free_clearance) {
            continue;
        }
        if !config_in_collision(robot, &q, attached, world)? {
            return Ok(q);
        }
    }
    Err(SceneError::SamplingFailure {
        what: "free-space configuration".into(),
        attempts: params.max_attempts,
    })
}

fn sample_tight(
    scene: &Scene,
    rng: &mut ChaCha8Rng,
    world: &CollisionWorld<Real>,
    robot: &RobotGeometry<Real>,
    attached: Option<&AttachedObject>,
    params: &SamplerParams,
) -> Result<JointConfig, SceneError> {
    let candidates: Vec<usize> = scene
        .assets
        .iter()
        .enumerate()
        .filter_map(|(i, a)| (!a.asset.regions.is_empty()).then_some(i))
        .collect();
    if candidates.is_empty() {
        return Err(SceneError::SamplingFailure {
            what: "tight-space configuration (no asset interiors)".into(),
            attempts: 0,
        });
    }
    for _ in 0..params.max_attempts {
        let asset = &scene.assets[candidates[rng.random_range(0..candidates.len())]].asset;
        let region = &asset.regions[rng.random_range(0..asset.regions.len())];
        let local = crate::Point3::new(
            rng.random_range(region.aabb.min.x..=region.aabb.max.x),
            rng.random_range(region.aabb.min.y..=region.aabb.max.y),
            rng.random_range(region.aabb.min.z..=region.aabb.max.z),
        );
        let target = EePose::new(asset.pose.transform_point(&local), uniform_quaternion(rng));
        let seed = robot.chain.sample_uniform(rng);
        let IkResult::Solved(q) = inverse_kinematics(&robot.chain, &target, &seed, &params.ik, rng)
        else {
            continue;
        };
        if !config_in_collision(robot, &q, attached, world)? {
            return Ok(q);
        }
    }
    Err(SceneError::SamplingFailure {
        what: "tight-space configuration".into(),
        attempts: params.max_attempts,
    })
}

/// Random in-hand object: primitive or scaled library mesh, sized 3-30 cm
/// along its longest dimension, grasped within the 5 cm cube around the
/// gripper midpoint.
pub fn sample_attached_object(
    rng: &mut ChaCha8Rng,
    library: Option<&MeshLibrary>,
) -> AttachedObject {
    let grasp = Iso3::from_parts(
        nalgebra::Translation3::new(
            rng.random_range(-0.05..=0.05),
            rng.random_range(-0.05..=0.05),
            rng.random_range(0.0..=0.05),
        ),
        uniform_quaternion(rng),
    );
    let n_kinds = if library.is_some_and(|l| !l.is_empty()) { 4 } else { 3 };
    let shape = match rng.random_range(0..n_kinds) {
        0 => AttachedShape::Box {
            half_extents: Vec3::new(
                rng.random_range(0.015..=0.15),
                rng.random_range(0.015..=0.15),
                rng.random_range(0.015..=0.15),
            ),
        },
        1 => AttachedShape::Cylinder {
            radius: rng.random_range(0.015..=0.15),
            half_height: rng.random_range(0.015..=0.15),
        },
        2 => AttachedShape::Sphere { radius: rng.random_range(0.015..=0.15) },
        _ => {
            let lib = library.expect("mesh kind only drawn with a library");
            let entry = &lib.entries()[rng.random_range(0..lib.len())];
            let target = rng.random_range(0.03..=0.30);
            let scale = target / entry.mesh.longest_extent();
            let mut mesh = entry.mesh.clone();
            for v in &mut mesh.vertices {
                v.coords *= scale;
            }
            AttachedShape::Mesh(mesh)
        }
    };
    AttachedObject::new(shape, grasp).expect("sampled shape is within the documented bounds")
}

/// Endpoint classes and in-hand presence for one problem: each endpoint is
/// tight with probability `tight_ratio` (when the scene has interiors),
/// and an object is held with probability `in_hand_ratio`.
pub fn draw_problem_layout(
    rng: &mut ChaCha8Rng,
    params: &SamplerParams,
    has_regions: bool,
) -> (ConfigClass, ConfigClass, bool) {
    let draw_class = |rng: &mut ChaCha8Rng| {
        if rng.random_range(0.0..1.0) < params.tight_ratio && has_regions {
            ConfigClass::Tight
        } else {
            ConfigClass::Free
        }
    };
    let q0_class = draw_class(rng);
    let goal_class = draw_class(rng);
    let in_hand = rng.random_range(0.0..1.0) < params.in_hand_ratio;
    (q0_class, goal_class, in_hand)
}

/// Samples a complete planning problem: endpoint classes drawn tight with
/// probability `tight_ratio` (independently), an in-hand object with
/// probability `in_hand_ratio`, start distinct from goal.
pub fn sample_problem(
    scene: &Scene,
    rng: &mut ChaCha8Rng,
    world: &CollisionWorld<Real>,
    robot: &RobotGeometry<Real>,
    library: Option<&MeshLibrary>,
    params: &SamplerParams,
) -> Result<PlanningProblem, SceneError> {
    let has_regions = scene.assets.iter().any(|a| !a.asset.regions.is_empty());
    let (q0_class, goal_class, in_hand) = draw_problem_layout(rng, params, has_regions);
    let attached = in_hand.then(|| sample_attached_object(rng, library));

    let q0 = sample_config(scene, q0_class, rng, world, robot, attached.as_ref(), params)?;
    for _ in 0..params.max_attempts {
        let goal = sample_config(scene, goal_class, rng, world, robot, attached.as_ref(), params)?;
        let span = q0.max_norm_distance(&goal);
        if span > 1e-9 && span <= params.max_joint_span {
            return Ok(PlanningProblem {
                scene_seed: scene.seed,
                q0,
                goal,
                attached,
                q0_class,
                goal_class,
            });
        }
    }
    Err(SceneError::SamplingFailure {
        what: "goal distinct from start within the joint-span bound".into(),
        attempts: params.max_attempts,
    })
}
