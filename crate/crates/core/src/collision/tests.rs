use approx::assert_relative_eq;
use nalgebra::{Point3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::geom::iso_from_rpy;
use crate::robot::description::RobotDescription;

type P = Point3<f64>;

fn robot() -> RobotGeometry<f64> {
    RobotGeometry::from_description(&RobotDescription::builtin_panda())
}

fn neutral() -> JointConfig<f64> {
    crate::robot::tests::panda_neutral()
}

fn random_point(rng: &mut ChaCha8Rng, span: f64) -> P {
    P::new(
        rng.random_range(-span..span),
        rng.random_range(-span..span),
        rng.random_range(-span..span),
    )
}

fn random_cuboid(rng: &mut ChaCha8Rng) -> Cuboid<f64> {
    Cuboid::new(
        iso_from_rpy(
            [
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            ],
            [
                rng.random_range(-3.0..3.0),
                rng.random_range(-3.0..3.0),
                rng.random_range(-3.0..3.0),
            ],
        ),
        Vector3::new(
            rng.random_range(0.02..0.4),
            rng.random_range(0.02..0.4),
            rng.random_range(0.02..0.4),
        ),
    )
}

fn random_triangle(rng: &mut ChaCha8Rng) -> Triangle<f64> {
    Triangle::new(random_point(rng, 1.0), random_point(rng, 1.0), random_point(rng, 1.0))
}

// ---------------------------------------------------------------------------
// SDF primitives
// ---------------------------------------------------------------------------

#[test]
fn sphere_sdf_examples() {
    assert_relative_eq!(sdf_point_sphere(&P::new(0.2, 0.0, 0.0), &P::origin(), 0.1), 0.1);
    assert_relative_eq!(sdf_point_sphere(&P::origin(), &P::origin(), 0.1), -0.1);
}

#[test]
fn sphere_sdf_matches_naive_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..1000 {
        let x = random_point(&mut rng, 2.0);
        let c = random_point(&mut rng, 2.0);
        let r = rng.random_range(0.01..0.5);
        let naive = ((x.x - c.x).powi(2) + (x.y - c.y).powi(2) + (x.z - c.z).powi(2)).sqrt() - r;
        assert!((sdf_point_sphere(&x, &c, r) - naive).abs() <= 1e-12);
    }
}

#[test]
fn box_sdf_center_and_face() {
    let b = Cuboid::axis_aligned(P::origin(), Vector3::new(0.3, 0.2, 0.4));
    assert_relative_eq!(sdf_point_box(&P::origin(), &b), -0.2, epsilon = 1e-12);
    assert_relative_eq!(sdf_point_box(&P::new(0.0, 0.2, 0.0), &b), 0.0, epsilon = 1e-12);
}

/// Independent oracle: distance from a point to a box is the norm of
/// `p - clamp(p)` outside, and `-min_i (h_i - |p_i|)` inside, computed in
/// the box frame without reusing the production SDF.
fn box_sdf_clamp_oracle(p: &P, b: &Cuboid<f64>) -> f64 {
    let local = b.pose.inverse_transform_point(p);
    let h = b.half_extents;
    let inside = (0..3).all(|i| local[i].abs() <= h[i]);
    if inside {
        let slack = (0..3).map(|i| h[i] - local[i].abs()).fold(f64::INFINITY, f64::min);
        -slack
    } else {
        let clamped = P::new(
            local.x.clamp(-h.x, h.x),
            local.y.clamp(-h.y, h.y),
            local.z.clamp(-h.z, h.z),
        );
        (local - clamped).norm()
    }
}

#[test]
fn box_sdf_matches_clamp_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..10_000 {
        let b = random_cuboid(&mut rng);
        let p = random_point(&mut rng, 1.5);
        let ours = sdf_point_box(&p, &b);
        let oracle = box_sdf_clamp_oracle(&p, &b);
        assert!((ours - oracle).abs() <= 1e-9, "ours {ours} oracle {oracle}");
        assert_eq!(ours < 0.0, b.contains(&p) && ours != 0.0 || ours < 0.0);
    }
}

#[test]
fn box_sdf_outside_matches_face_sampling() {
    // Coarse face-sampling oracle: min distance to points laid on the six
    // faces at 1e-3 spacing approximates the true outside distance.
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10 {
        let b = random_cuboid(&mut rng);
        let p = random_point(&mut rng, 1.2);
        let exact = sdf_point_box(&p, &b);
        if exact <= 0.0 {
            continue;
        }
        let h = b.half_extents;
        let mut best = f64::INFINITY;
        for axis in 0..3 {
            let (u, v) = ((axis + 1) % 3, (axis + 2) % 3);
            let nu = (2.0 * h[u] / 1e-3).ceil() as usize;
            let nv = (2.0 * h[v] / 1e-3).ceil() as usize;
            for side in [-1.0, 1.0] {
                for i in 0..=nu {
                    for j in 0..=nv {
                        let mut local = Vector3::zeros();
                        local[axis] = side * h[axis];
                        local[u] = -h[u] + 2.0 * h[u] * i as f64 / nu as f64;
                        local[v] = -h[v] + 2.0 * h[v] * j as f64 / nv as f64;
                        let w = b.pose.transform_point(&P::from(local));
                        best = best.min((w - p).norm());
                    }
                }
            }
        }
        assert!((exact - best).abs() <= 2e-3, "exact {exact} sampled {best}");
    }
}

// ---------------------------------------------------------------------------
// World queries and BVH
// ---------------------------------------------------------------------------

fn random_world(rng: &mut ChaCha8Rng) -> CollisionWorld<f64> {
    let n_boxes = rng.random_range(1..12);
    let n_tris = rng.random_range(0..12);
    let cuboids = (0..n_boxes).map(|_| random_cuboid(rng)).collect();
    let triangles = (0..n_tris).map(|_| random_triangle(rng)).collect();
    CollisionWorld::new(cuboids, triangles, 0.01)
}

fn brute_force_signed_distance(world: &CollisionWorld<f64>, p: &P) -> f64 {
    let mut best = f64::INFINITY;
    for c in world.cuboids() {
        best = best.min(c.sdf(p));
    }
    for t in world.triangles() {
        best = best.min(t.distance_to_point(p));
    }
    best
}

#[test]
fn empty_world_returns_infinity() {
    let world = CollisionWorld::<f64>::empty(0.01);
    assert_eq!(min_distance_sphere_world(&P::origin(), 0.1, &world), f64::MAX);
}

#[test]
fn sphere_world_axis_aligned_distance() {
    let world = CollisionWorld::new(
        vec![Cuboid::axis_aligned(P::origin(), Vector3::new(0.5, 0.5, 0.5))],
        vec![],
        0.01,
    );
    assert_relative_eq!(
        min_distance_sphere_world(&P::new(2.0, 0.0, 0.0), 0.5, &world),
        1.0,
        epsilon = 1e-12
    );
}

#[test]
fn bvh_matches_brute_force_on_random_worlds() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..100 {
        let world = random_world(&mut rng);
        for _ in 0..10 {
            let p = random_point(&mut rng, 1.5);
            let r = rng.random_range(0.0..0.3);
            let accel = min_distance_sphere_world(&p, r, &world);
            let brute = brute_force_signed_distance(&world, &p) - r;
            assert_eq!(accel, brute, "BVH result must equal brute force exactly");
        }
    }
}

#[test]
fn bvh_threshold_query_agrees_with_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let world = random_world(&mut rng);
        let p = random_point(&mut rng, 1.5);
        let threshold = rng.random_range(-0.1..0.5);
        let exact = world.signed_distance(&p);
        assert_eq!(world.any_within(&p, threshold), exact < threshold);
    }
}

// ---------------------------------------------------------------------------
// Configuration and motion checks
// ---------------------------------------------------------------------------

#[test]
fn neutral_pose_in_empty_world_is_free() {
    let robot = robot();
    let world = CollisionWorld::empty(0.01);
    assert!(!config_in_collision(&robot, &neutral(), None, &world).unwrap());
}

#[test]
fn random_poses_rarely_self_collide() {
    // The exemption list must not flag ordinary poses; sample broadly and
    // require the vast majority to be self-collision-free.
    let robot = robot();
    let world = CollisionWorld::empty(0.01);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut collisions = 0;
    for _ in 0..300 {
        let q = robot.chain.sample_uniform(&mut rng);
        if config_in_collision(&robot, &q, None, &world).unwrap() {
            collisions += 1;
        }
    }
    assert!(collisions < 120, "self-collision triggered on {collisions}/300 random poses");
}

#[test]
fn cuboid_at_wrist_sphere_collides() {
    let robot = robot();
    let q = neutral();
    let spheres = robot.spheres_at(&q, None).unwrap();
    let (wrist, _) = spheres[40]; // one of the hand spheres
    let world = CollisionWorld::new(
        vec![Cuboid::axis_aligned(wrist, Vector3::new(0.02, 0.02, 0.02))],
        vec![],
        0.01,
    );
    assert!(config_in_collision(&robot, &q, None, &world).unwrap());
}

#[test]
fn margin_boundary_is_strict() {
    let robot = robot();
    let q = neutral();
    let margin = 0.01;
    let spheres = robot.spheres_at(&q, None).unwrap();

    // A plane-like box face exactly margin + 1e-6 beyond the most extreme
    // sphere along +x leaves the config free; strict `<` at the margin.
    let max_reach = spheres.iter().map(|(c, r)| c.x + r).fold(f64::NEG_INFINITY, f64::max);
    let face_x = max_reach + margin + 1e-6;
    let world = CollisionWorld::new(
        vec![Cuboid::axis_aligned(
            P::new(face_x + 0.5, 0.0, 0.0),
            Vector3::new(0.5, 2.0, 2.0),
        )],
        vec![],
        margin,
    );
    assert!(!config_in_collision(&robot, &q, None, &world).unwrap());

    let world_closer = CollisionWorld::new(
        vec![Cuboid::axis_aligned(
            P::new(face_x + 0.5 - 2e-6, 0.0, 0.0),
            Vector3::new(0.5, 2.0, 2.0),
        )],
        vec![],
        margin,
    );
    assert!(config_in_collision(&robot, &q, None, &world_closer).unwrap());
}

#[test]
fn motion_check_degenerate_segment() {
    let robot = robot();
    let world = CollisionWorld::empty(0.01);
    let q = neutral();
    assert!(!motion_in_collision(&robot, &q, &q, None, &world, 0.05).unwrap());
}

#[test]
fn motion_through_wall_detected() {
    let robot = robot();
    let mut q_a = neutral();
    let mut q_b = neutral();
    q_a.0[0] = -0.8;
    q_b.0[0] = 0.8;

    // A wall centered on the halfway configuration's EE position; the
    // joint-1 sweep must pass through it.
    let mid = crate::robot::ee_pose(&robot.chain, &neutral()).unwrap().position;
    let world = CollisionWorld::new(
        vec![Cuboid::axis_aligned(mid, Vector3::new(0.02, 0.3, 0.3))],
        vec![],
        0.01,
    );
    assert!(motion_in_collision(&robot, &q_a, &q_b, None, &world, 0.05).unwrap());
}

#[test]
fn free_motion_stable_under_refinement() {
    let robot = robot();
    let world = CollisionWorld::new(
        vec![Cuboid::axis_aligned(P::new(1.5, 0.0, 0.5), Vector3::new(0.1, 0.1, 0.1))],
        vec![],
        0.01,
    );
    let mut q_a = neutral();
    let mut q_b = neutral();
    q_a.0[1] -= 0.3;
    q_b.0[1] += 0.3;
    let coarse = motion_in_collision(&robot, &q_a, &q_b, None, &world, 0.05).unwrap();
    let fine = motion_in_collision(&robot, &q_a, &q_b, None, &world, 0.005).unwrap();
    assert!(!coarse);
    assert_eq!(coarse, fine);
}

// ---------------------------------------------------------------------------
// Segmentation and counting
// ---------------------------------------------------------------------------

#[test]
fn segmentation_removes_surface_points() {
    let robot = robot();
    let q = neutral();
    let spheres = robot.spheres_at(&q, None).unwrap();
    let (c, r) = spheres[10];
    let on_surface = c + Vector3::new(r, 0.0, 0.0);
    let far = P::new(1.5, 1.5, 1.5);
    let out = segment_robot_points(&[on_surface, far], &robot, &q, None, 0.01).unwrap();
    assert_eq!(out, vec![far]);
}

#[test]
fn segmentation_keeps_points_clear_of_spheres() {
    let robot = robot();
    let q = neutral();
    let spheres = robot.spheres_at(&q, None).unwrap();
    // 5 cm beyond the first sphere along -z, verified against all spheres.
    let (c, r) = spheres[0];
    let p = c + Vector3::new(0.0, 0.0, -(r + 0.05));
    let min_sdf = spheres
        .iter()
        .map(|(ci, ri)| (p - ci).norm() - ri)
        .fold(f64::INFINITY, f64::min);
    assert!(min_sdf >= 0.04);
    let out = segment_robot_points(&[p], &robot, &q, None, 0.01).unwrap();
    assert_eq!(out.len(), 1);
}

#[test]
fn segmentation_matches_brute_force_filter() {
    let robot = robot();
    let q = neutral();
    let spheres = robot.spheres_at(&q, None).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let cloud: Vec<P> = (0..2000).map(|_| random_point(&mut rng, 1.0)).collect();
    let eps = 0.01;
    let expected: Vec<P> = cloud
        .iter()
        .filter(|p| {
            spheres.iter().map(|(c, r)| (**p - c).norm() - r).fold(f64::INFINITY, f64::min) >= eps
        })
        .copied()
        .collect();
    let got = segment_robot_points(&cloud, &robot, &q, None, eps).unwrap();
    assert_eq!(got, expected);
}

#[test]
fn collision_count_examples() {
    let robot = robot();
    let q = neutral();
    assert_eq!(cloud_collision_count(&robot, &q, None, &[], 0.01).unwrap(), 0);
    let spheres = robot.spheres_at(&q, None).unwrap();
    let center = spheres[5].0;
    assert_eq!(cloud_collision_count(&robot, &q, None, &[center], 0.01).unwrap(), 1);
}

#[test]
fn collision_count_matches_brute_force() {
    let robot = robot();
    let q = neutral();
    let spheres = robot.spheres_at(&q, None).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let cloud: Vec<P> = (0..3000).map(|_| random_point(&mut rng, 0.9)).collect();
    let eps = 0.01;
    let brute = cloud
        .iter()
        .filter(|p| spheres.iter().any(|(c, r)| (**p - c).norm() - r < eps))
        .count();
    assert_eq!(cloud_collision_count(&robot, &q, None, &cloud, eps).unwrap(), brute);
}

#[test]
fn collision_count_monotone_in_eps() {
    let robot = robot();
    let q = neutral();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let cloud: Vec<P> = (0..2000).map(|_| random_point(&mut rng, 0.9)).collect();
    let mut last = 0;
    for eps in [0.001, 0.005, 0.01, 0.05, 0.1] {
        let n = cloud_collision_count(&robot, &q, None, &cloud, eps).unwrap();
        assert!(n >= last, "count must be non-decreasing in eps");
        last = n;
    }
}

#[test]
fn segmentation_then_count_is_zero() {
    let robot = robot();
    let q = neutral();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let cloud: Vec<P> = (0..4000).map(|_| random_point(&mut rng, 0.8)).collect();
    let eps = 0.01;
    let obstacle = segment_robot_points(&cloud, &robot, &q, None, eps).unwrap();
    assert_eq!(cloud_collision_count(&robot, &q, None, &obstacle, eps).unwrap(), 0);
}
