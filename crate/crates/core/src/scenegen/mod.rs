//! Procedural generation of parametric assets, composition into
//! non-penetrating tabletop scenes via collision-normal shifting, mesh
//! placement, and motion-planning problem sampling.
//!
//! World convention: the robot base frame is the world frame, x forward,
//! z up. The tabletop surface height is sampled per scene; parametric
//! assets stand on (or float above) that surface.

mod compose;
mod generators;
mod meshlib;
mod params;
mod sampling;

pub use compose::{build_collision_world, compose_scene, place_mesh_objects, ComposeParams};
pub use generators::{build_asset, constraint_check, generate_asset, generate_table, sample_params};
pub use meshlib::{content_hash, load_obj, save_obj, MeshEntry, MeshLibrary};
pub use params::*;
pub use sampling::{
    draw_problem_layout, sample_attached_object, sample_config, sample_problem, SamplerParams,
};

use nalgebra::Unit;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::robot::RobotError;
use crate::{Aabb, Cuboid, Iso3, JointConfig, Point3, Real, Vec3};

/// Name of the counter-based PRNG every artifact is generated with.
pub const RNG_NAME: &str = "chacha8";
pub const SCENE_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("sampling failed after {attempts} attempts: {what}")]
    SamplingFailure { what: String, attempts: usize },
    #[error("mesh library is empty")]
    EmptyMeshLibrary,
    #[error("scene references unknown mesh {hash}")]
    UnknownMesh { hash: String },
    #[error("scene file schema {found} unsupported (expected {SCENE_SCHEMA_VERSION})")]
    SchemaVersion { found: u32 },
    #[error("scene file declares RNG {found:?}, this build generates {RNG_NAME:?}")]
    RngMismatch { found: String },
    #[error(transparent)]
    Robot(#[from] RobotError),
    #[error("scene io: {0}")]
    Io(#[from] std::io::Error),
    #[error("scene encoding: {0}")]
    Json(#[from] serde_json::Error),
    #[error("mesh file: {0}")]
    MeshFormat(String),
}

/// The six parametric obstacle categories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AssetCategory {
    Shelf,
    Cubby,
    Microwave,
    Dishwasher,
    OpenBox,
    Cabinet,
}

impl AssetCategory {
    pub const ALL: [AssetCategory; 6] = [
        AssetCategory::Shelf,
        AssetCategory::Cubby,
        AssetCategory::Microwave,
        AssetCategory::Dishwasher,
        AssetCategory::OpenBox,
        AssetCategory::Cabinet,
    ];
}

/// What an asset is: the table every scene stands on, or a parametric
/// obstacle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AssetKind {
    Table,
    Parametric(AssetCategory),
}

/// Structural role of one cuboid inside an asset; constraint checking is
/// phrased over roles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CuboidRole {
    TableTop,
    TableLeg,
    Board,
    VerticalBoard,
    Backboard,
    Column,
    WallBottom,
    WallTop,
    WallBack,
    WallLeft,
    WallRight,
    WallFront,
    Panel,
    Door,
    Shelf,
    DrawerPart,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ArticulationJoint {
    Hinge,
    Prismatic,
}

/// Joint moving a subset of an asset's cuboids, expressed in the asset
/// frame. Hinges rotate about the axis line through `origin`; prismatic
/// joints translate along `axis`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Articulation {
    pub cuboids: Vec<usize>,
    pub joint: ArticulationJoint,
    pub origin: Point3,
    pub axis: Vec3,
    pub range: (Real, Real),
    pub value: Real,
}

impl Articulation {
    /// Transform applied to the member cuboids at the current value.
    pub fn transform(&self) -> Iso3 {
        match self.joint {
            ArticulationJoint::Hinge => crate::geom::rotation_about_line(
                &self.origin,
                &Unit::new_normalize(self.axis),
                self.value,
            ),
            ArticulationJoint::Prismatic => Iso3::translation(
                self.axis.x * self.value,
                self.axis.y * self.value,
                self.axis.z * self.value,
            ),
        }
    }

    pub fn value_in_range(&self) -> bool {
        (self.range.0 - 1e-9..=self.range.1 + 1e-9).contains(&self.value)
    }
}

/// Named interior volume (asset frame) used for tight-space sampling and
/// mesh placement.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Region {
    pub name: String,
    pub aabb: Aabb,
}

/// A compound of cuboids with optional articulations and interior regions.
/// Cuboids are stored in the asset frame; `pose` places the asset in the
/// world.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Asset {
    pub kind: AssetKind,
    pub pose: Iso3,
    pub cuboids: Vec<Cuboid>,
    pub roles: Vec<CuboidRole>,
    pub articulations: Vec<Articulation>,
    pub regions: Vec<Region>,
}

impl Asset {
    /// Cuboids in the asset frame with articulation values applied.
    pub fn articulated_cuboids(&self) -> Vec<Cuboid> {
        let mut out = self.cuboids.clone();
        for art in &self.articulations {
            let t = art.transform();
            for &i in &art.cuboids {
                out[i].pose = t * out[i].pose;
            }
        }
        out
    }

    /// Cuboids in world coordinates at the current articulation values.
    pub fn world_cuboids(&self) -> Vec<Cuboid> {
        let mut out = self.articulated_cuboids();
        for c in &mut out {
            c.pose = self.pose * c.pose;
        }
        out
    }

    pub fn world_aabb(&self) -> Aabb {
        let cuboids = self.world_cuboids();
        let mut aabb = cuboids[0].aabb();
        for c in &cuboids[1..] {
            aabb = aabb.union(&c.aabb());
        }
        aabb
    }

    /// Move the asset in the world (the Alg-1 shift step).
    pub fn translate(&mut self, delta: Vec3) {
        self.pose.translation.vector += delta;
    }

    pub fn role_indices(&self, role: CuboidRole) -> Vec<usize> {
        self.roles
            .iter()
            .enumerate()
            .filter_map(|(i, r)| (*r == role).then_some(i))
            .collect()
    }
}

/// An asset together with the parameters it was generated from. The params
/// record the values as drawn; the asset pose carries any Alg-1 shifts.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlacedAsset {
    pub params: AssetParams,
    pub asset: Asset,
}

/// Mesh object instance: library reference by content hash, plus placement.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeshObject {
    pub name: String,
    pub content_hash: String,
    pub pose: Iso3,
    pub scale: Real,
}

/// A fully generated scene; serializable and bit-reproducible from `seed`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Scene {
    pub schema_version: u32,
    pub seed: u64,
    pub rng: String,
    /// ChaCha word position after composition; lets a later stage resume
    /// the stream without replaying.
    pub rng_word_pos: u64,
    /// Tabletop surface height in the robot base frame.
    pub table_z: Real,
    pub table: PlacedAsset,
    pub assets: Vec<PlacedAsset>,
    pub mesh_objects: Vec<MeshObject>,
}

impl Scene {
    pub fn to_json(&self) -> Result<String, SceneError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self, SceneError> {
        let scene: Scene = serde_json::from_str(text)?;
        if scene.schema_version != SCENE_SCHEMA_VERSION {
            return Err(SceneError::SchemaVersion { found: scene.schema_version });
        }
        if scene.rng != RNG_NAME {
            return Err(SceneError::RngMismatch { found: scene.rng });
        }
        Ok(scene)
    }

    pub fn save(&self, path: &std::path::Path) -> Result<(), SceneError> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Self, SceneError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// All scene cuboids in world coordinates (table plus assets).
    pub fn all_world_cuboids(&self) -> Vec<Cuboid> {
        let mut out = self.table.asset.world_cuboids();
        for a in &self.assets {
            out.extend(a.asset.world_cuboids());
        }
        out
    }
}

/// Whether an endpoint was drawn as free-space or tight-space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConfigClass {
    Free,
    Tight,
}

/// A start/goal pair in a scene, with an optional in-hand object.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlanningProblem {
    pub scene_seed: u64,
    pub q0: JointConfig,
    pub goal: JointConfig,
    pub attached: Option<crate::AttachedObject>,
    pub q0_class: ConfigClass,
    pub goal_class: ConfigClass,
}
