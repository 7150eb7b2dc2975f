//! Synthetic segmented point-cloud observations: surface sampling of scene
//! geometry, robot/goal clouds from the sphere model via forward
//! kinematics, and assembly into the policy observation.

use nalgebra::Isometry3;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::collision::{segment_robot_points, CollisionWorld, RobotGeometry};
use crate::robot::{forward_kinematics, RobotError, NUM_JOINTS};
use crate::{AttachedObject, JointConfig, Point3, Real, Vec3};

/// Observation sizing and noise knobs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CloudParams {
    /// Points in the current-robot and goal-robot segments.
    pub robot_points: usize,
    /// Points in the obstacle segment (padded or subsampled to this).
    pub obstacle_points: usize,
    /// Robot-segmentation threshold in meters.
    pub segmentation_eps: Real,
    /// Zero-mean Gaussian sensor noise applied to the scene cloud before
    /// segmentation; 0 disables it.
    pub noise_std: Real,
}

impl Default for CloudParams {
    fn default() -> Self {
        Self { robot_points: 2048, obstacle_points: 4096, segmentation_eps: 0.01, noise_std: 0.0 }
    }
}

/// The policy observation: labeled point segments of fixed sizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentedCloud {
    pub robot_points: Vec<Point3>,
    pub goal_points: Vec<Point3>,
    pub obstacle_points: Vec<Point3>,
    /// Set when the obstacle segment was padded by resampling.
    pub padded: bool,
}

/// Scene-surface sample; `empty_world` flags a request against a world with
/// no geometry.
#[derive(Debug, Clone)]
pub struct SurfaceSample {
    pub points: Vec<Point3>,
    pub empty_world: bool,
}

/// Draws `n` points area-proportionally from cuboid faces and mesh
/// triangles (independent categorical draws per point).
pub fn sample_world_surface(
    world: &CollisionWorld<Real>,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> SurfaceSample {
    if world.is_empty() {
        return SurfaceSample { points: Vec::new(), empty_world: n > 0 };
    }

    // Face table: 6 faces per cuboid, then one entry per triangle.
    let mut weights: Vec<Real> = Vec::new();
    for c in world.cuboids() {
        let areas = c.face_areas();
        for axis in 0..3 {
            weights.push(areas[axis]);
            weights.push(areas[axis]);
        }
    }
    for t in world.triangles() {
        weights.push(t.area());
    }
    let total: Real = weights.iter().sum();
    let mut cumulative = Vec::with_capacity(weights.len());
    let mut acc = 0.0;
    for w in &weights {
        acc += w;
        cumulative.push(acc);
    }

    let n_box_faces = world.cuboids().len() * 6;
    let mut points = Vec::with_capacity(n);
    for _ in 0..n {
        let x = rng.random_range(0.0..total);
        let idx = cumulative.partition_point(|&c| c <= x).min(weights.len() - 1);
        if idx < n_box_faces {
            let cuboid = &world.cuboids()[idx / 6];
            let face = idx % 6;
            let axis = face / 2;
            let side = if face % 2 == 0 { 1.0 } else { -1.0 };
            let (u, v) = ((axis + 1) % 3, (axis + 2) % 3);
            let h = cuboid.half_extents;
            let mut local = Vec3::zeros();
            local[axis] = side * h[axis];
            local[u] = rng.random_range(-h[u]..=h[u]);
            local[v] = rng.random_range(-h[v]..=h[v]);
            points.push(cuboid.pose.transform_point(&Point3::from(local)));
        } else {
            let tri = &world.triangles()[idx - n_box_faces];
            // Uniform barycentric via the square-root trick.
            let r1: Real = rng.random_range(0.0..1.0f64).sqrt();
            let r2: Real = rng.random_range(0.0..1.0);
            let a = 1.0 - r1;
            let b = r1 * (1.0 - r2);
            let c = r1 * r2;
            points.push(Point3::from(tri.a.coords * a + tri.b.coords * b + tri.c.coords * c));
        }
    }
    SurfaceSample { points, empty_world: false }
}

/// Sphere index, frame, local center, and radius for every sphere the robot
/// presents (body plus attachment cover).
fn sphere_frames(
    robot: &RobotGeometry<Real>,
    q: &JointConfig,
    attached: Option<&AttachedObject>,
) -> Result<Vec<(Isometry3<Real>, Point3, Real)>, RobotError> {
    let frames = forward_kinematics(&robot.chain, q)?;
    let mut out = Vec::with_capacity(robot.spheres.len());
    for s in &robot.spheres.spheres {
        out.push((frames[s.link], Point3::from(s.offset), s.radius));
    }
    if let Some(att) = attached {
        let ee = frames[NUM_JOINTS - 1] * robot.chain.ee_offset;
        for (c, r) in att.cover_spheres() {
            out.push((ee, *c, *r));
        }
    }
    Ok(out)
}

/// Samples `n` points from the union surface of the robot spheres at `q`,
/// area-proportionally over spheres, directions drawn in each sphere's link
/// frame (so identical RNG streams at two configurations differ by the
/// per-link rigid motions). Points strictly inside another sphere are
/// rejected and redrawn.
pub fn robot_cloud(
    robot: &RobotGeometry<Real>,
    q: &JointConfig,
    attached: Option<&AttachedObject>,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Point3>, RobotError> {
    let spheres = sphere_frames(robot, q, attached)?;
    let world: Vec<(Point3, Real)> =
        spheres.iter().map(|(f, c, r)| (f.transform_point(c), *r)).collect();

    let mut cumulative = Vec::with_capacity(spheres.len());
    let mut acc = 0.0;
    for (_, _, r) in &spheres {
        acc += r * r;
        cumulative.push(acc);
    }
    let total = acc;

    let mut points = Vec::with_capacity(n);
    'point: for _ in 0..n {
        let mut last = None;
        for _ in 0..64 {
            let x = rng.random_range(0.0..total);
            let idx = cumulative.partition_point(|&c| c <= x).min(spheres.len() - 1);
            let (frame, center, radius) = &spheres[idx];
            let dir: [Real; 3] = rng.sample(rand_distr::UnitSphere);
            let local = center + Vec3::new(dir[0], dir[1], dir[2]) * *radius;
            let p = frame.transform_point(&local);
            let inside_other = world
                .iter()
                .enumerate()
                .any(|(j, (c, r))| j != idx && (p - c).norm_squared() < (r - 1e-12) * (r - 1e-12));
            if !inside_other {
                points.push(p);
                continue 'point;
            }
            last = Some(p);
        }
        // Pathological overlap; keep the final draw rather than spin.
        points.push(last.expect("at least one draw happened"));
    }
    Ok(points)
}

/// Builds the full observation at `q_t` with goal `g`: the scene cloud is
/// noised (optionally), robot-segmented, and padded or subsampled to the
/// obstacle budget; robot and goal segments are sphere-surface clouds.
pub fn assemble_observation(
    scene_cloud: &[Point3],
    robot: &RobotGeometry<Real>,
    q_t: &JointConfig,
    goal: &JointConfig,
    attached: Option<&AttachedObject>,
    params: &CloudParams,
    rng: &mut ChaCha8Rng,
) -> Result<SegmentedCloud, RobotError> {
    let noisy: Vec<Point3> = if params.noise_std > 0.0 {
        scene_cloud
            .iter()
            .map(|p| {
                let dx: Real = rng.sample(rand_distr::StandardNormal);
                let dy: Real = rng.sample(rand_distr::StandardNormal);
                let dz: Real = rng.sample(rand_distr::StandardNormal);
                p + Vec3::new(dx, dy, dz) * params.noise_std
            })
            .collect()
    } else {
        scene_cloud.to_vec()
    };

    let segmented = segment_robot_points(&noisy, robot, q_t, attached, params.segmentation_eps)?;
    let (obstacle_points, padded) = fit_to_budget(segmented, params.obstacle_points, rng);

    Ok(SegmentedCloud {
        robot_points: robot_cloud(robot, q_t, attached, params.robot_points, rng)?,
        goal_points: robot_cloud(robot, goal, attached, params.robot_points, rng)?,
        obstacle_points,
        padded,
    })
}

/// Uniform subsample without replacement above the budget; pad by
/// resampling with replacement below it (empty stays empty).
fn fit_to_budget(
    mut points: Vec<Point3>,
    budget: usize,
    rng: &mut ChaCha8Rng,
) -> (Vec<Point3>, bool) {
    use std::cmp::Ordering;
    match points.len().cmp(&budget) {
        Ordering::Greater => {
            let keep = rand::seq::index::sample(rng, points.len(), budget);
            (keep.iter().map(|i| points[i]).collect(), false)
        }
        Ordering::Equal => (points, false),
        Ordering::Less => {
            if points.is_empty() {
                return (points, false);
            }
            let missing = budget - points.len();
            for _ in 0..missing {
                let i = rng.random_range(0..points.len());
                points.push(points[i]);
            }
            (points, true)
        }
    }
}

/// Per-step observation update of the open-loop rollout: the current-robot
/// segment is resampled at `q_new`; obstacle and goal segments are carried
/// over untouched (static-obstacle linear model).
pub fn update_observation(
    obs: &SegmentedCloud,
    robot: &RobotGeometry<Real>,
    q_new: &JointConfig,
    attached: Option<&AttachedObject>,
    params: &CloudParams,
    rng: &mut ChaCha8Rng,
) -> Result<SegmentedCloud, RobotError> {
    Ok(SegmentedCloud {
        robot_points: robot_cloud(robot, q_new, attached, params.robot_points, rng)?,
        goal_points: obs.goal_points.clone(),
        obstacle_points: obs.obstacle_points.clone(),
        padded: obs.padded,
    })
}

/// ASCII PLY with a per-point segment label: 0 = current robot, 1 = goal
/// robot, 2 = obstacle.
pub fn save_ply(cloud: &SegmentedCloud) -> String {
    let total = cloud.robot_points.len() + cloud.goal_points.len() + cloud.obstacle_points.len();
    let mut out = String::new();
    out.push_str("ply\nformat ascii 1.0\n");
    out.push_str(&format!("element vertex {total}\n"));
    out.push_str("property double x\nproperty double y\nproperty double z\n");
    out.push_str("property uchar segment\nend_header\n");
    for (label, points) in
        [(0u8, &cloud.robot_points), (1u8, &cloud.goal_points), (2u8, &cloud.obstacle_points)]
    {
        for p in points {
            out.push_str(&format!("{} {} {} {}\n", p.x, p.y, p.z, label));
        }
    }
    out
}

#[cfg(test)]
mod tests;
