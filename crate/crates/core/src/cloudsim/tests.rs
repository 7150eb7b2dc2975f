use nalgebra::{Isometry3, Translation3, Unit, UnitQuaternion, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::collision::sdf_point_box;
use crate::robot::{JointVector, KinematicChain, Link, SphereModel, SphereSpec};
use crate::robot::SelfCollisionPairs;
use crate::testkit;
use crate::{CollisionWorld, Cuboid};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[test]
fn unit_cube_faces_sampled_area_proportionally() {
    let cube = Cuboid::axis_aligned(Point3::new(0.3, -0.2, 0.5), Vec3::new(0.5, 0.5, 0.5));
    let world = CollisionWorld::new(vec![cube.clone()], vec![], 0.01);
    let sample = sample_world_surface(&world, 6000, &mut rng(1));
    assert!(!sample.empty_world);
    assert_eq!(sample.points.len(), 6000);

    // Identify the face of each point, then compare against the
    // multinomial expectation: 1000 per face, 3 sigma = 87.
    let mut counts = [0usize; 6];
    for p in &sample.points {
        let local = cube.pose.inverse_transform_point(p);
        let mut face = None;
        for axis in 0..3 {
            if (local[axis].abs() - 0.5).abs() < 1e-9 {
                face = Some(axis * 2 + usize::from(local[axis] < 0.0));
            }
        }
        counts[face.expect("point must lie on a face")] += 1;
    }
    for (i, c) in counts.iter().enumerate() {
        let dev = (*c as f64 - 1000.0).abs();
        assert!(dev <= 87.0, "face {i} count {c} deviates beyond 3 sigma");
    }
}

#[test]
fn zero_points_requested() {
    let world = CollisionWorld::new(
        vec![Cuboid::axis_aligned(Point3::origin(), Vec3::new(0.1, 0.1, 0.1))],
        vec![],
        0.01,
    );
    let sample = sample_world_surface(&world, 0, &mut rng(2));
    assert!(sample.points.is_empty());
    assert!(!sample.empty_world);
}

#[test]
fn empty_world_sets_warning_flag() {
    let world = CollisionWorld::empty(0.01);
    let sample = sample_world_surface(&world, 10, &mut rng(3));
    assert!(sample.points.is_empty());
    assert!(sample.empty_world);
}

#[test]
fn surface_points_lie_on_their_cuboid() {
    let cube = Cuboid::new(
        crate::geom::iso_from_rpy([0.4, 0.1, 0.2], [0.3, -0.2, 1.1]),
        Vec3::new(0.2, 0.3, 0.15),
    );
    let world = CollisionWorld::new(vec![cube.clone()], vec![], 0.01);
    let sample = sample_world_surface(&world, 500, &mut rng(4));
    for p in &sample.points {
        assert!(sdf_point_box(p, &cube).abs() <= 1e-9);
    }
}

#[test]
fn robot_cloud_has_n_on_surface_points() {
    let robot = testkit::panda_robot();
    let q = testkit::neutral();
    let cloud = robot_cloud(&robot, &q, None, 2048, &mut rng(5)).unwrap();
    assert_eq!(cloud.len(), 2048);
    let spheres = robot.spheres_at(&q, None).unwrap();
    for p in &cloud {
        let min_sdf =
            spheres.iter().map(|(c, r)| (p - c).norm() - r).fold(f64::INFINITY, f64::min);
        assert!(min_sdf.abs() <= 1e-9, "point off the union surface: {min_sdf}");
    }
}

/// Fixture with one sphere per link and no overlaps: the rejection loop
/// never triggers, so the same RNG stream at two configurations yields
/// per-link rigidly transformed points.
fn sparse_chain() -> (KinematicChain<f64>, SphereModel<f64>) {
    let links = (0..7)
        .map(|i| Link {
            origin: Isometry3::from_parts(
                Translation3::new(0.0, 0.0, 0.3),
                UnitQuaternion::identity(),
            ),
            axis: Unit::new_normalize(if i % 2 == 0 { Vector3::z() } else { Vector3::y() }),
        })
        .collect();
    let chain = KinematicChain::new(
        Isometry3::identity(),
        links,
        JointVector::repeat(-3.0),
        JointVector::repeat(3.0),
        JointVector::repeat(2.0),
        JointVector::repeat(10.0),
        Isometry3::identity(),
    );
    let spheres = (0..7)
        .map(|i| SphereSpec { link: i, offset: Vector3::new(0.05, 0.0, 0.0), radius: 0.04 })
        .collect();
    (chain, SphereModel::new(spheres).unwrap())
}

#[test]
fn clouds_transform_rigidly_per_link() {
    let (chain, spheres) = sparse_chain();
    let robot = crate::collision::RobotGeometry {
        chain: chain.clone(),
        spheres,
        self_pairs: SelfCollisionPairs::default(),
    };
    let q_a = crate::JointConfig::new([0.1, -0.2, 0.3, 0.4, -0.5, 0.2, 0.0]);
    let q_b = crate::JointConfig::new([-0.6, 0.3, -0.1, 0.8, 0.2, -0.4, 0.5]);

    let cloud_a = robot_cloud(&robot, &q_a, None, 700, &mut rng(6)).unwrap();
    let cloud_b = robot_cloud(&robot, &q_b, None, 700, &mut rng(6)).unwrap();

    let frames_a = crate::robot::forward_kinematics(&chain, &q_a).unwrap();
    let frames_b = crate::robot::forward_kinematics(&chain, &q_b).unwrap();
    let centers_a: Vec<Point3> = robot
        .spheres_at(&q_a, None)
        .unwrap()
        .iter()
        .map(|(c, _)| *c)
        .collect();

    for (pa, pb) in cloud_a.iter().zip(&cloud_b) {
        // Recover the link by nearest sphere center (unambiguous fixture).
        let link = centers_a
            .iter()
            .enumerate()
            .min_by(|(_, x), (_, y)| {
                (pa - *x).norm().partial_cmp(&(pa - *y).norm()).unwrap()
            })
            .unwrap()
            .0;
        let expected = frames_b[link] * frames_a[link].inverse() * pa;
        assert!((expected - pb).norm() <= 1e-9, "link {link} motion mismatch");
    }
}

#[test]
fn observation_segments_have_contract_sizes() {
    let robot = testkit::panda_robot();
    let scene = testkit::shelf_scene();
    let world = testkit::shelf_world(&scene);
    let params = CloudParams::default();
    let scene_cloud = sample_world_surface(&world, 8192, &mut rng(7)).points;
    let q = testkit::neutral();
    let mut goal = q;
    goal.0[0] += 0.7;
    let obs =
        assemble_observation(&scene_cloud, &robot, &q, &goal, None, &params, &mut rng(8)).unwrap();
    assert_eq!(obs.robot_points.len(), 2048);
    assert_eq!(obs.goal_points.len(), 2048);
    assert_eq!(obs.obstacle_points.len(), 4096);
}

#[test]
fn empty_scene_cloud_keeps_robot_segments_full() {
    let robot = testkit::panda_robot();
    let params = CloudParams::default();
    let q = testkit::neutral();
    let obs = assemble_observation(&[], &robot, &q, &q, None, &params, &mut rng(9)).unwrap();
    assert!(obs.obstacle_points.is_empty());
    assert!(!obs.padded);
    assert_eq!(obs.robot_points.len(), 2048);
    assert_eq!(obs.goal_points.len(), 2048);
}

#[test]
fn on_robot_points_never_reach_the_obstacle_segment() {
    let robot = testkit::panda_robot();
    let params = CloudParams::default();
    let q = testkit::neutral();
    let mut goal = q;
    goal.0[1] += 0.4;

    // Scene cloud seeded with points on the robot surface plus distant ones.
    let mut scene_cloud = robot_cloud(&robot, &q, None, 512, &mut rng(10)).unwrap();
    let far: Vec<Point3> =
        (0..512).map(|i| Point3::new(2.0 + (i % 7) as f64 * 0.1, 1.5, 1.0)).collect();
    scene_cloud.extend(far.iter().copied());

    let obs =
        assemble_observation(&scene_cloud, &robot, &q, &goal, None, &params, &mut rng(11)).unwrap();
    let spheres = robot.spheres_at(&q, None).unwrap();
    for p in &obs.obstacle_points {
        let min_sdf =
            spheres.iter().map(|(c, r)| (p - c).norm() - r).fold(f64::INFINITY, f64::min);
        assert!(min_sdf >= params.segmentation_eps, "robot point leaked into obstacles");
    }
    assert!(obs.padded, "512 survivors must be padded to 4096");
}

#[test]
fn same_seed_gives_bit_identical_observation() {
    let robot = testkit::panda_robot();
    let scene = testkit::shelf_scene();
    let world = testkit::shelf_world(&scene);
    let scene_cloud = sample_world_surface(&world, 4096, &mut rng(12)).points;
    let q = testkit::neutral();
    let mut goal = q;
    goal.0[2] -= 0.5;
    let params = CloudParams::default();
    let a = assemble_observation(&scene_cloud, &robot, &q, &goal, None, &params, &mut rng(13))
        .unwrap();
    let b = assemble_observation(&scene_cloud, &robot, &q, &goal, None, &params, &mut rng(13))
        .unwrap();
    assert_eq!(a, b);
}

#[test]
fn update_keeps_static_segments_bit_identical() {
    let robot = testkit::panda_robot();
    let scene = testkit::shelf_scene();
    let world = testkit::shelf_world(&scene);
    let scene_cloud = sample_world_surface(&world, 4096, &mut rng(14)).points;
    let mut q = testkit::neutral();
    let goal = {
        let mut g = q;
        g.0[0] += 0.6;
        g
    };
    let params = CloudParams::default();
    let obs0 =
        assemble_observation(&scene_cloud, &robot, &q, &goal, None, &params, &mut rng(15)).unwrap();

    let mut obs = obs0.clone();
    let mut r = rng(16);
    for _ in 0..50 {
        q.0[0] += 0.012;
        obs = update_observation(&obs, &robot, &q, None, &params, &mut r).unwrap();
        assert_eq!(obs.obstacle_points, obs0.obstacle_points);
        assert_eq!(obs.goal_points, obs0.goal_points);
        assert_eq!(obs.robot_points.len(), params.robot_points);
    }
}

#[test]
fn noise_is_applied_before_segmentation() {
    let robot = testkit::panda_robot();
    let q = testkit::neutral();
    let params = CloudParams { noise_std: 0.05, ..CloudParams::default() };
    // Points sitting just outside the segmentation shell: noise can push
    // them inside, and segmentation must still strip everything below eps.
    let spheres = robot.spheres_at(&q, None).unwrap();
    let shell: Vec<Point3> = spheres
        .iter()
        .map(|(c, r)| c + Vec3::new(r + 0.012, 0.0, 0.0))
        .collect();
    let obs = assemble_observation(&shell, &robot, &q, &q, None, &params, &mut rng(17)).unwrap();
    for p in &obs.obstacle_points {
        let min_sdf =
            spheres.iter().map(|(c, r)| (p - c).norm() - r).fold(f64::INFINITY, f64::min);
        assert!(min_sdf >= params.segmentation_eps);
    }
}

#[test]
fn ply_export_counts_and_labels() {
    let cloud = SegmentedCloud {
        robot_points: vec![Point3::new(0.0, 0.0, 0.0)],
        goal_points: vec![Point3::new(1.0, 0.0, 0.0), Point3::new(0.0, 1.0, 0.0)],
        obstacle_points: vec![Point3::new(0.0, 0.0, 1.0)],
        padded: false,
    };
    let ply = save_ply(&cloud);
    assert!(ply.contains("element vertex 4"));
    assert!(ply.contains("property uchar segment"));
    let labels: Vec<&str> = ply
        .lines()
        .skip_while(|l| *l != "end_header")
        .skip(1)
        .map(|l| l.rsplit(' ').next().unwrap())
        .collect();
    assert_eq!(labels, vec!["0", "1", "1", "2"]);
}
