use approx::assert_relative_eq;
use nalgebra::{Isometry3, Point3, Translation3, Unit, UnitQuaternion, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::robot::description::RobotDescription;

/// Synthetic 7R chain with symmetric limits, so the zero configuration is
/// valid (the shipped arm's joint 4 excludes zero).
fn test_chain() -> KinematicChain<f64> {
    let axes = [
        Vector3::z(),
        Vector3::y(),
        Vector3::z(),
        Vector3::y(),
        Vector3::x(),
        Vector3::y(),
        Vector3::z(),
    ];
    let offsets = [
        [0.0, 0.0, 0.30],
        [0.0, 0.05, 0.10],
        [0.0, 0.0, 0.25],
        [0.04, 0.0, 0.15],
        [0.0, 0.0, 0.20],
        [0.0, -0.03, 0.12],
        [0.06, 0.0, 0.10],
    ];
    let links = (0..NUM_JOINTS)
        .map(|i| Link {
            origin: Isometry3::from_parts(
                Translation3::new(offsets[i][0], offsets[i][1], offsets[i][2]),
                UnitQuaternion::identity(),
            ),
            axis: Unit::new_normalize(axes[i]),
        })
        .collect();
    KinematicChain::new(
        Isometry3::translation(0.0, 0.0, 0.1),
        links,
        JointVector::repeat(-std::f64::consts::PI),
        JointVector::repeat(std::f64::consts::PI),
        JointVector::repeat(2.0),
        JointVector::repeat(10.0),
        Isometry3::translation(0.0, 0.0, 0.15),
    )
}

fn panda() -> (KinematicChain<f64>, SphereModel<f64>) {
    let desc = RobotDescription::builtin_panda();
    (desc.chain(), desc.sphere_model())
}

pub(crate) fn panda_neutral() -> JointConfig<f64> {
    JointConfig::new([
        0.0,
        -std::f64::consts::FRAC_PI_4,
        0.0,
        -3.0 * std::f64::consts::FRAC_PI_4 - 0.3,
        0.0,
        std::f64::consts::FRAC_PI_2,
        std::f64::consts::FRAC_PI_4,
    ])
}

// ---------------------------------------------------------------------------
// Independent matrix-chain oracle: plain 4x4 products, no nalgebra types.
// ---------------------------------------------------------------------------

type Mat4 = [[f64; 4]; 4];

fn mat4_identity() -> Mat4 {
    let mut m = [[0.0; 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    m
}

fn mat4_mul(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

fn mat4_from_axis_angle(axis: [f64; 3], angle: f64) -> Mat4 {
    let norm = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    let (x, y, z) = (axis[0] / norm, axis[1] / norm, axis[2] / norm);
    let (s, c) = angle.sin_cos();
    let t = 1.0 - c;
    let mut m = mat4_identity();
    m[0][0] = t * x * x + c;
    m[0][1] = t * x * y - s * z;
    m[0][2] = t * x * z + s * y;
    m[1][0] = t * x * y + s * z;
    m[1][1] = t * y * y + c;
    m[1][2] = t * y * z - s * x;
    m[2][0] = t * x * z - s * y;
    m[2][1] = t * y * z + s * x;
    m[2][2] = t * z * z + c;
    m
}

fn mat4_from_xyz_rpy(xyz: [f64; 3], rpy: [f64; 3]) -> Mat4 {
    // yaw about z, then pitch about y, then roll about x.
    let rx = mat4_from_axis_angle([1.0, 0.0, 0.0], rpy[0]);
    let ry = mat4_from_axis_angle([0.0, 1.0, 0.0], rpy[1]);
    let rz = mat4_from_axis_angle([0.0, 0.0, 1.0], rpy[2]);
    let mut m = mat4_mul(&mat4_mul(&rz, &ry), &rx);
    m[0][3] = xyz[0];
    m[1][3] = xyz[1];
    m[2][3] = xyz[2];
    m
}

/// End-effector transform computed straight off the description's raw
/// numbers with homogeneous matrix products.
fn oracle_ee_matrix(desc: &RobotDescription, q: &[f64; 7]) -> Mat4 {
    let mut t = mat4_from_xyz_rpy(desc.base.xyz, desc.base.rpy);
    for (i, link) in desc.links.iter().enumerate() {
        t = mat4_mul(&t, &mat4_from_xyz_rpy(link.xyz, link.rpy));
        t = mat4_mul(&t, &mat4_from_axis_angle(link.axis, q[i]));
    }
    mat4_mul(&t, &mat4_from_xyz_rpy(desc.end_effector.xyz, desc.end_effector.rpy))
}

// ---------------------------------------------------------------------------

#[test]
fn fk_zero_config_matches_base_transform() {
    let chain = test_chain();
    let frames = forward_kinematics(&chain, &JointConfig::zeros()).unwrap();
    let expected = chain.base_transform();
    assert_relative_eq!(
        (frames[0].translation.vector - expected.translation.vector).norm(),
        0.0,
        epsilon = 1e-15
    );
    assert!(frames[0].rotation.angle_to(&expected.rotation) < 1e-15);
}

#[test]
fn fk_joint0_rotation_spins_link1_in_place() {
    let chain = test_chain();
    let mut q = JointConfig::zeros();
    let frames_zero = forward_kinematics(&chain, &q).unwrap();
    q.0[0] = std::f64::consts::PI;
    let frames_pi = forward_kinematics(&chain, &q).unwrap();

    // Link 1 sits on the joint-0 axis in this fixture, so its origin is
    // unchanged while its orientation differs by pi about that axis.
    let o0 = frames_zero[1].translation.vector;
    let o1 = frames_pi[1].translation.vector;
    // offset of link 1 from joint 0 axis is (0, 0.05, 0.1); rotating by pi
    // about z flips the y component.
    assert_relative_eq!(o1.x, -o0.x, epsilon = 1e-12);
    assert_relative_eq!(o1.y, -o0.y + 2.0 * frames_zero[0].translation.vector.y, epsilon = 1e-12);
    assert_relative_eq!(o1.z, o0.z, epsilon = 1e-12);

    let rel = frames_pi[1].rotation * frames_zero[1].rotation.inverse();
    assert_relative_eq!(rel.angle(), std::f64::consts::PI, epsilon = 1e-9);
    let axis = rel.axis().unwrap();
    assert_relative_eq!(axis.z.abs(), 1.0, epsilon = 1e-9);
}

#[test]
fn fk_matches_matrix_chain_oracle_at_midrange() {
    let desc = RobotDescription::builtin_panda();
    let chain: KinematicChain<f64> = desc.chain();
    let mid = chain.midpoint();
    let pose = ee_pose(&chain, &mid).unwrap();

    let mut q = [0.0; 7];
    for i in 0..7 {
        q[i] = mid[i];
    }
    let m = oracle_ee_matrix(&desc, &q);
    assert_relative_eq!(pose.position.x, m[0][3], epsilon = 1e-9);
    assert_relative_eq!(pose.position.y, m[1][3], epsilon = 1e-9);
    assert_relative_eq!(pose.position.z, m[2][3], epsilon = 1e-9);

    let ours = pose.orientation.to_rotation_matrix();
    for i in 0..3 {
        for j in 0..3 {
            assert_relative_eq!(ours[(i, j)], m[i][j], epsilon = 1e-9);
        }
    }
}

#[test]
fn ee_pose_zero_config_matches_oracle() {
    let desc = RobotDescription::builtin_panda();
    let chain: KinematicChain<f64> = desc.chain();
    // "Zero" here means a valid in-limit reference config.
    let q = panda_neutral();
    let pose = ee_pose(&chain, &q).unwrap();
    let mut angles = [0.0; 7];
    for i in 0..7 {
        angles[i] = q[i];
    }
    let m = oracle_ee_matrix(&desc, &angles);
    assert_relative_eq!(pose.position.x, m[0][3], epsilon = 1e-9);
    assert_relative_eq!(pose.position.y, m[1][3], epsilon = 1e-9);
    assert_relative_eq!(pose.position.z, m[2][3], epsilon = 1e-9);
}

#[test]
fn ee_position_invariant_under_last_joint() {
    // The shipped EE offset lies on the joint-7 axis, so spinning the last
    // joint leaves the EE position fixed.
    let (chain, _) = panda();
    let mut a = panda_neutral();
    let mut b = a;
    a.0[6] = 0.3;
    b.0[6] = 1.9;
    let pa = ee_pose(&chain, &a).unwrap();
    let pb = ee_pose(&chain, &b).unwrap();
    assert_relative_eq!((pa.position - pb.position).norm(), 0.0, epsilon = 1e-12);
}

#[test]
fn ee_pose_quaternion_is_normalized() {
    let (chain, _) = panda();
    let pose = ee_pose(&chain, &panda_neutral()).unwrap();
    assert!((pose.orientation.quaternion().norm() - 1.0).abs() <= 1e-9);
}

#[test]
fn fk_rejects_out_of_limit_config() {
    let (chain, _) = panda();
    // Joint 4's upper limit is negative, so all-zeros violates the limits.
    let err = forward_kinematics(&chain, &JointConfig::zeros()).unwrap_err();
    match err {
        RobotError::JointLimit { joint, .. } => assert_eq!(joint, 3),
        other => panic!("unexpected error {other:?}"),
    }
}

#[test]
fn fk_is_deterministic() {
    let (chain, _) = panda();
    let q = panda_neutral();
    let a = forward_kinematics(&chain, &q).unwrap();
    let b = forward_kinematics(&chain, &q).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.translation.vector, y.translation.vector);
        assert_eq!(x.rotation.quaternion().coords, y.rotation.quaternion().coords);
    }
}

#[test]
fn fk_works_in_single_precision() {
    let desc = RobotDescription::builtin_panda();
    let chain: KinematicChain<f32> = desc.chain();
    let q = JointConfig::<f32>::new([0.0, -0.785, 0.0, -2.356, 0.0, 1.571, 0.785]);
    let pose = ee_pose(&chain, &q).unwrap();
    let chain64: KinematicChain<f64> = desc.chain();
    let q64 = JointConfig::<f64>::new([0.0, -0.785, 0.0, -2.356, 0.0, 1.571, 0.785]);
    let pose64 = ee_pose(&chain64, &q64).unwrap();
    assert!((pose.position.x as f64 - pose64.position.x).abs() < 1e-5);
}

#[test]
fn default_model_has_56_spheres() {
    let (chain, model) = panda();
    assert_eq!(model.len(), 56);
    let centers = sphere_centers(&chain, &model, &panda_neutral(), None).unwrap();
    assert_eq!(centers.len(), 56);
    for (_, r) in &centers {
        assert!((0.02..=0.10).contains(r));
    }
}

#[test]
fn zero_offset_sphere_lands_on_link_origin() {
    let chain = test_chain();
    let model = SphereModel::new(vec![SphereSpec {
        link: 0,
        offset: Vector3::zeros(),
        radius: 0.05,
    }])
    .unwrap();
    let centers = sphere_centers(&chain, &model, &JointConfig::zeros(), None).unwrap();
    let frames = forward_kinematics(&chain, &JointConfig::zeros()).unwrap();
    assert_relative_eq!(
        (centers[0].0.coords - frames[0].translation.vector).norm(),
        0.0,
        epsilon = 1e-15
    );
}

#[test]
fn attached_box_cover_encloses_corners() {
    let (chain, model) = panda();
    let half = Vector3::new(0.03, 0.03, 0.03);
    let attached = AttachedObject::new(
        AttachedShape::Box { half_extents: half },
        Isometry3::translation(0.01, -0.02, 0.03),
    )
    .unwrap();
    let q = panda_neutral();
    let centers = sphere_centers(&chain, &model, &q, Some(&attached)).unwrap();
    assert_eq!(centers.len(), 56 + attached.cover_spheres().len());

    // Every transformed box corner must be inside some cover sphere.
    let frames = forward_kinematics(&chain, &q).unwrap();
    let grasp = frames[NUM_JOINTS - 1] * chain.ee_offset * attached.grasp_offset;
    let cover = &centers[56..];
    for k in 0..8 {
        let corner = Point3::new(
            if k & 1 == 0 { -half.x } else { half.x },
            if k & 2 == 0 { -half.y } else { half.y },
            if k & 4 == 0 { -half.z } else { half.z },
        );
        let world = grasp.transform_point(&corner);
        let inside = cover.iter().any(|(c, r)| (world - c).norm() <= *r + 1e-12);
        assert!(inside, "corner {k} escaped the cover");
    }
}

#[test]
fn attached_object_validates_size_and_grasp() {
    let too_big = AttachedObject::<f64>::new(
        AttachedShape::Box { half_extents: Vector3::new(0.2, 0.2, 0.2) },
        Isometry3::identity(),
    );
    assert!(matches!(too_big, Err(AttachError::BadSize(_))));

    let bad_grasp = AttachedObject::<f64>::new(
        AttachedShape::Sphere { radius: 0.05 },
        Isometry3::translation(0.1, 0.0, 0.0),
    );
    assert!(matches!(bad_grasp, Err(AttachError::BadGraspOffset(_))));
}

#[test]
fn ik_fixed_point_returns_seed() {
    let (chain, _) = panda();
    let q_star = panda_neutral();
    let target = ee_pose(&chain, &q_star).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let result = inverse_kinematics(&chain, &target, &q_star, &IkParams::default(), &mut rng);
    let solved = result.solved().expect("fixed point solves immediately");
    assert_eq!(solved.0, q_star.0, "already-converged seed must pass through unchanged");
}

#[test]
fn ik_converges_from_perturbed_seed() {
    let (chain, _) = panda();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let params = IkParams { tol_pos: 1e-4, ..IkParams::default() };
    let mut failures = 0;
    for _ in 0..100 {
        let q_star = chain.sample_uniform(&mut rng);
        let target = ee_pose(&chain, &q_star).unwrap();
        let mut seed = q_star;
        for i in 0..NUM_JOINTS {
            seed.0[i] += rng.random_range(-0.05..0.05);
        }
        let seed = chain.clamp(&seed);
        match inverse_kinematics(&chain, &target, &seed, &params, &mut rng) {
            IkResult::Solved(q) => {
                let reached = ee_pose(&chain, &q).unwrap();
                let (pos, _) = reached.errors_to(&target);
                assert!(pos <= 1e-4, "solution outside tolerance: {pos}");
            }
            IkResult::Failed { .. } => failures += 1,
        }
    }
    assert_eq!(failures, 0, "perturbed-seed round trips must all converge");
}

#[test]
fn ik_round_trip_success_rate() {
    let (chain, _) = panda();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let params = IkParams { tol_pos: 1e-3, tol_rot: 1e-2, ..IkParams::default() };
    let mut solved = 0;
    const TRIALS: usize = 1000;
    for _ in 0..TRIALS {
        let q_star = chain.sample_uniform(&mut rng);
        let target = ee_pose(&chain, &q_star).unwrap();
        let seed = chain.sample_uniform(&mut rng);
        if let IkResult::Solved(q) = inverse_kinematics(&chain, &target, &seed, &params, &mut rng)
        {
            let (pos, _) = ee_pose(&chain, &q).unwrap().errors_to(&target);
            assert!(pos <= params.tol_pos);
            solved += 1;
        }
    }
    assert!(
        solved as f64 >= 0.95 * TRIALS as f64,
        "IK round-trip succeeded only {solved}/{TRIALS} times"
    );
}

#[test]
fn ik_unreachable_target_fails_cleanly() {
    let (chain, _) = panda();
    let target = EePose::new(Point3::new(5.0, 0.0, 0.0), UnitQuaternion::identity());
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let params = IkParams { max_restarts: 3, ..IkParams::default() };
    let result = inverse_kinematics(&chain, &target, &panda_neutral(), &params, &mut rng);
    match result {
        IkResult::Failed { residual_pos, .. } => assert!(residual_pos > 3.0),
        IkResult::Solved(_) => panic!("a 5 m target cannot be reachable"),
    }
}

#[test]
fn description_rejects_bad_schema() {
    let mut desc = RobotDescription::builtin_panda();
    desc.schema_version = 99;
    let text = toml::to_string(&desc).unwrap();
    assert!(RobotDescription::from_toml_str(&text).is_err());
}

#[test]
fn self_collision_pairs_filtering() {
    let desc = RobotDescription::builtin_panda();
    let pairs = desc.self_collision_pairs();
    assert!(!pairs.should_check(0, 1));
    assert!(!pairs.should_check(1, 0));
    assert!(!pairs.should_check(3, 3));
    assert!(pairs.should_check(0, 6));
}
