//! Signed-distance queries, the BVH-accelerated collision world, robot
//! configuration and motion checking, and point-cloud segmentation.

mod bvh;

pub use bvh::Bvh;

use nalgebra::Point3;

use crate::geom::{Aabb, Cuboid, Triangle};
use crate::robot::{
    forward_kinematics, sphere_centers_with_frames, sphere_links, AttachedObject, JointConfig,
    KinematicChain, RobotError, SelfCollisionPairs, SphereModel,
};
use crate::scalar::Scalar;

/// Robot data needed for collision queries, kept together so every caller
/// agrees on chain, spheres, and self-collision exemptions.
#[derive(Debug, Clone)]
pub struct RobotGeometry<S: Scalar> {
    pub chain: KinematicChain<S>,
    pub spheres: SphereModel<S>,
    pub self_pairs: SelfCollisionPairs,
}

impl<S: Scalar> RobotGeometry<S> {
    pub fn from_description(desc: &crate::robot::RobotDescription) -> Self {
        Self {
            chain: desc.chain(),
            spheres: desc.sphere_model(),
            self_pairs: desc.self_collision_pairs(),
        }
    }

    /// World spheres at `q` (body plus attachment cover).
    pub fn spheres_at(
        &self,
        q: &JointConfig<S>,
        attached: Option<&AttachedObject<S>>,
    ) -> Result<Vec<(Point3<S>, S)>, RobotError> {
        let frames = forward_kinematics(&self.chain, q)?;
        Ok(sphere_centers_with_frames(&self.chain, &self.spheres, &frames, attached))
    }
}

/// Signed distance from `x` to a sphere surface: `|x - center| - radius`.
pub fn sdf_point_sphere<S: Scalar>(x: &Point3<S>, center: &Point3<S>, radius: S) -> S {
    assert!(radius > S::zero());
    (x - center).norm() - radius
}

/// Exact signed distance from `x` to an oriented box; negative inside.
pub fn sdf_point_box<S: Scalar>(x: &Point3<S>, cuboid: &Cuboid<S>) -> S {
    cuboid.sdf(x)
}

#[derive(Debug, Clone, Copy)]
enum Prim {
    Box(u32),
    Tri(u32),
}

/// Immutable collision geometry of a scene: flattened cuboids (articulations
/// already resolved), flattened mesh triangles, and a BVH over both.
#[derive(Debug, Clone)]
pub struct CollisionWorld<S: Scalar> {
    cuboids: Vec<Cuboid<S>>,
    triangles: Vec<Triangle<S>>,
    prims: Vec<Prim>,
    bvh: Bvh<S>,
    margin: S,
}

impl<S: Scalar> CollisionWorld<S> {
    pub fn new(cuboids: Vec<Cuboid<S>>, triangles: Vec<Triangle<S>>, margin: S) -> Self {
        assert!(margin > S::zero(), "collision margin must be positive");
        let mut prims = Vec::with_capacity(cuboids.len() + triangles.len());
        let mut bounds = Vec::with_capacity(prims.capacity());
        let mut inradii = Vec::with_capacity(prims.capacity());
        for (i, c) in cuboids.iter().enumerate() {
            prims.push(Prim::Box(i as u32));
            bounds.push(c.aabb());
            inradii.push(c.half_extents.amin());
        }
        for (i, t) in triangles.iter().enumerate() {
            prims.push(Prim::Tri(i as u32));
            bounds.push(t.aabb());
            inradii.push(S::zero());
        }
        let bvh = Bvh::build(&bounds, &inradii);
        Self { cuboids, triangles, prims, bvh, margin }
    }

    pub fn empty(margin: S) -> Self {
        Self::new(Vec::new(), Vec::new(), margin)
    }

    pub fn margin(&self) -> S {
        self.margin
    }

    pub fn cuboids(&self) -> &[Cuboid<S>] {
        &self.cuboids
    }

    pub fn triangles(&self) -> &[Triangle<S>] {
        &self.triangles
    }

    pub fn is_empty(&self) -> bool {
        self.prims.is_empty()
    }

    fn prim_signed_distance(&self, prim: usize, p: &Point3<S>) -> S {
        match self.prims[prim] {
            Prim::Box(i) => self.cuboids[i as usize].sdf(p),
            Prim::Tri(i) => self.triangles[i as usize].distance_to_point(p),
        }
    }

    /// Exact signed distance from a point to the nearest primitive;
    /// `+infinity` for an empty world.
    pub fn signed_distance(&self, p: &Point3<S>) -> S {
        self.bvh
            .min_signed_distance(p, |i| self.prim_signed_distance(i, p))
            .unwrap_or_else(|| S::max_value().unwrap())
    }

    /// True iff some primitive's signed distance to `p` is below `threshold`.
    pub fn any_within(&self, p: &Point3<S>, threshold: S) -> bool {
        self.bvh.any_below(p, threshold, |i| self.prim_signed_distance(i, p))
    }
}

/// Minimum signed clearance between a sphere and the world geometry;
/// `+infinity` sentinel for an empty world.
pub fn min_distance_sphere_world<S: Scalar>(
    center: &Point3<S>,
    radius: S,
    world: &CollisionWorld<S>,
) -> S {
    if world.is_empty() {
        return S::max_value().unwrap();
    }
    world.signed_distance(center) - radius
}

/// True iff any robot or attachment sphere clears the world by less than
/// the margin (strict `<`), or a checked sphere pair self-collides.
pub fn config_in_collision<S: Scalar>(
    robot: &RobotGeometry<S>,
    q: &JointConfig<S>,
    attached: Option<&AttachedObject<S>>,
    world: &CollisionWorld<S>,
) -> Result<bool, RobotError> {
    let spheres = robot.spheres_at(q, attached)?;
    for (c, r) in &spheres {
        if world.any_within(c, *r + world.margin()) {
            return Ok(true);
        }
    }
    let links = sphere_links(&robot.spheres, attached);
    for i in 0..spheres.len() {
        for j in (i + 1)..spheres.len() {
            if !robot.self_pairs.should_check(links[i], links[j]) {
                continue;
            }
            let (ci, ri) = spheres[i];
            let (cj, rj) = spheres[j];
            let reach = ri + rj;
            if (ci - cj).norm_squared() < reach * reach {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Checks the straight joint-space segment from `q_a` to `q_b` at steps of
/// at most `resolution` (max-norm radians), endpoints included.
pub fn motion_in_collision<S: Scalar>(
    robot: &RobotGeometry<S>,
    q_a: &JointConfig<S>,
    q_b: &JointConfig<S>,
    attached: Option<&AttachedObject<S>>,
    world: &CollisionWorld<S>,
    resolution: S,
) -> Result<bool, RobotError> {
    assert!(resolution > S::zero());
    let span = q_a.max_norm_distance(q_b);
    let steps = (span / resolution).to_config().ceil().max(1.0) as usize;
    for k in 0..=steps {
        let t = S::from_config(k as f64 / steps as f64);
        if config_in_collision(robot, &q_a.lerp(q_b, t), attached, world)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Number of interpolated configurations along `waypoints` that are in
/// collision, sampling each segment at `resolution` without double-counting
/// shared endpoints. Ground-truth re-validation for committed trajectories.
pub fn count_trajectory_collisions<S: Scalar>(
    robot: &RobotGeometry<S>,
    waypoints: &[JointConfig<S>],
    attached: Option<&AttachedObject<S>>,
    world: &CollisionWorld<S>,
    resolution: S,
) -> Result<usize, RobotError> {
    assert!(resolution > S::zero());
    if waypoints.is_empty() {
        return Ok(0);
    }
    let mut count = usize::from(config_in_collision(robot, &waypoints[0], attached, world)?);
    for w in waypoints.windows(2) {
        let span = w[0].max_norm_distance(&w[1]);
        let steps = (span / resolution).to_config().ceil().max(1.0) as usize;
        for k in 1..=steps {
            let t = S::from_config(k as f64 / steps as f64);
            if config_in_collision(robot, &w[0].lerp(&w[1], t), attached, world)? {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// Bounding box of the robot spheres inflated by `eps`; points outside it
/// are at least `eps` away from every sphere.
fn spheres_aabb<S: Scalar>(spheres: &[(Point3<S>, S)], eps: S) -> Option<Aabb<S>> {
    let (first_c, first_r) = *spheres.first()?;
    let mut aabb = Aabb::new(first_c, first_c).inflated(first_r);
    for (c, r) in &spheres[1..] {
        aabb = aabb.union(&Aabb::new(*c, *c).inflated(*r));
    }
    Some(aabb.inflated(eps))
}

fn min_sphere_sdf_below<S: Scalar>(p: &Point3<S>, spheres: &[(Point3<S>, S)], eps: S) -> bool {
    for (c, r) in spheres {
        let reach = *r + eps;
        if (p - c).norm_squared() < reach * reach {
            return true;
        }
    }
    false
}

/// Removes points whose minimum sphere SDF at `q` is below `eps`,
/// preserving order: the robot self-filter that leaves only obstacle points.
pub fn segment_robot_points<S: Scalar>(
    cloud: &[Point3<S>],
    robot: &RobotGeometry<S>,
    q: &JointConfig<S>,
    attached: Option<&AttachedObject<S>>,
    eps: S,
) -> Result<Vec<Point3<S>>, RobotError> {
    assert!(eps > S::zero());
    let spheres = robot.spheres_at(q, attached)?;
    let Some(aabb) = spheres_aabb(&spheres, eps) else {
        return Ok(cloud.to_vec());
    };
    Ok(cloud
        .iter()
        .filter(|p| !aabb.contains(p) || !min_sphere_sdf_below(p, &spheres, eps))
        .copied()
        .collect())
}

/// Number of cloud points whose minimum sphere SDF at `q` is strictly
/// below `eps`: the per-configuration term of the trajectory score.
pub fn cloud_collision_count<S: Scalar>(
    robot: &RobotGeometry<S>,
    q: &JointConfig<S>,
    attached: Option<&AttachedObject<S>>,
    cloud: &[Point3<S>],
    eps: S,
) -> Result<usize, RobotError> {
    assert!(eps > S::zero());
    let spheres = robot.spheres_at(q, attached)?;
    Ok(cloud_collision_count_with_spheres(&spheres, cloud, eps))
}

/// Counting core shared with trajectory scoring, which reuses FK results.
pub fn cloud_collision_count_with_spheres<S: Scalar>(
    spheres: &[(Point3<S>, S)],
    cloud: &[Point3<S>],
    eps: S,
) -> usize {
    let Some(aabb) = spheres_aabb(spheres, eps) else {
        return 0;
    };
    cloud
        .iter()
        .filter(|p| aabb.contains(p) && min_sphere_sdf_below(p, spheres, eps))
        .count()
}

#[cfg(test)]
mod tests;
