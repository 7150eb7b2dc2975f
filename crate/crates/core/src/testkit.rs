//! Shared fixtures for unit tests.

use crate::collision::RobotGeometry;
use crate::robot::description::RobotDescription;
use crate::scenegen::{
    build_asset, build_collision_world, compose_scene, AssetParams, ComposeParams, MeshLibrary,
    PlacedAsset, Scene, ShelfParams,
};
use crate::{CollisionWorld, JointConfig, Real};

pub fn panda_robot() -> RobotGeometry<Real> {
    RobotGeometry::from_description(&RobotDescription::builtin_panda())
}

pub fn neutral() -> JointConfig {
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

/// A reachable shelf straight ahead with roomy rungs, on a slightly low
/// table.
pub fn shelf_scene() -> Scene {
    let shelf_params = AssetParams::Shelf(ShelfParams {
        width: 0.9,
        depth: 0.4,
        height: 1.0,
        num_boards: 3,
        board_thickness: 0.02,
        backboard_thickness: 0.0,
        num_vertical_boards: 0,
        num_side_columns: 4,
        column_thickness: 0.03,
        position: [0.55, 0.0],
        z_rotation: 0.0,
    });
    let params = ComposeParams { max_assets: 1, ..ComposeParams::default() };
    let mut scene = compose_scene(424242, &params);
    scene.assets.clear();
    scene.mesh_objects.clear();
    scene.table_z = -0.1;
    scene.table.asset.pose.translation.z = -0.1;
    let shelf = build_asset(&shelf_params, scene.table_z);
    scene.assets.push(PlacedAsset { params: shelf_params, asset: shelf });
    scene
}

pub fn shelf_world(scene: &Scene) -> CollisionWorld {
    build_collision_world(scene, &MeshLibrary::empty(), 0.01).unwrap()
}
