//! Scene composition: assets are added one at a time and pushed out of
//! collision along the summed collision normals of whatever they overlap.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::generators::{build_asset, generate_table, sample_params};
use super::meshlib::MeshLibrary;
use super::{
    Asset, AssetCategory, MeshObject, PlacedAsset, Scene, SceneError, RNG_NAME,
    SCENE_SCHEMA_VERSION,
};
use crate::collision::CollisionWorld;
use crate::geom::cuboid_penetration;
use crate::{Aabb, Cuboid, Iso3, Point3, Real, Vec3};

#[derive(Debug, Clone)]
pub struct ComposeParams {
    /// Largest number of obstacle assets per scene (`k ~ U[1..=max]`).
    pub max_assets: usize,
    /// Shift iterations before a colliding asset is discarded.
    pub max_shift_iters: usize,
    /// Overlaps at or below this depth count as contact, not penetration.
    pub contact_tol: Real,
    /// Extra distance added to each shift so progress is strict.
    pub shift_slack: Real,
    /// Tabletop surface height range in the robot base frame.
    pub table_z_range: (Real, Real),
    /// Per-category scene caps (shelf, cubby, microwave, dishwasher,
    /// open box, cabinet).
    pub category_caps: [usize; 6],
    /// Mesh objects per asset interior and on the table.
    pub meshes_per_asset: (usize, usize),
    pub meshes_on_table: (usize, usize),
    /// Mesh scale factor range.
    pub mesh_scale: (Real, Real),
    /// Table-placement ranges for mesh objects (world x, then y).
    pub mesh_table_x: (Real, Real),
    pub mesh_table_y: (Real, Real),
}

impl Default for ComposeParams {
    fn default() -> Self {
        Self {
            max_assets: 5,
            max_shift_iters: 50,
            contact_tol: 1e-4,
            shift_slack: 0.01,
            table_z_range: (-0.3, 0.3),
            category_caps: [3, 1, 3, 3, 3, 3],
            meshes_per_asset: (0, 3),
            meshes_on_table: (0, 5),
            mesh_scale: (0.2, 0.4),
            mesh_table_x: (0.2, 0.4),
            mesh_table_y: (-0.4, 0.4),
        }
    }
}

fn cap_of(params: &ComposeParams, cat: AssetCategory) -> usize {
    let i = match cat {
        AssetCategory::Shelf => 0,
        AssetCategory::Cubby => 1,
        AssetCategory::Microwave => 2,
        AssetCategory::Dishwasher => 3,
        AssetCategory::OpenBox => 4,
        AssetCategory::Cabinet => 5,
    };
    params.category_caps[i]
}

/// Keep-out volume around the robot's mount column; scenes never build
/// into the space the robot body permanently occupies.
pub(crate) fn base_keepout() -> Cuboid {
    Cuboid::axis_aligned(Point3::new(0.0, 0.0, 0.15), Vec3::new(0.18, 0.18, 0.55))
}

/// Deepest penetration between two cuboid sets; the normal points from
/// `fixed` toward `moving`.
fn deepest_penetration(
    moving: &[Cuboid],
    fixed: &[Cuboid],
    tol: Real,
) -> Option<(Real, Vec3)> {
    let mut best: Option<(Real, Vec3)> = None;
    for f in fixed {
        for m in moving {
            if let Some(p) = cuboid_penetration(f, m) {
                if p.depth > tol && best.as_ref().is_none_or(|(d, _)| p.depth > *d) {
                    best = Some((p.depth, p.normal.into_inner()));
                }
            }
        }
    }
    best
}

/// 1-D extent overlap of two boxes along `dir` (0 when separated on it).
fn overlap_along(a: &Cuboid, b: &Cuboid, dir: &Vec3) -> Real {
    let proj = |c: &Cuboid| -> Real {
        let rot = c.pose.rotation.to_rotation_matrix();
        (0..3).map(|i| c.half_extents[i] * rot.matrix().column(i).dot(dir).abs()).sum()
    };
    let dist = (b.center() - a.center()).dot(dir).abs();
    (proj(a) + proj(b) - dist).max(0.0)
}

/// Shift `asset` along the summed collision normals until it no longer
/// penetrates anything in `existing`; `None` when the iteration budget runs
/// out and the asset is discarded.
pub(crate) fn resolve_asset(
    mut asset: Asset,
    existing: &[&Asset],
    params: &ComposeParams,
    rng: &mut ChaCha8Rng,
) -> Option<Asset> {
    let mut fixed: Vec<Vec<Cuboid>> = existing.iter().map(|a| a.world_cuboids()).collect();
    fixed.push(vec![base_keepout()]);
    for _ in 0..params.max_shift_iters {
        let moving = asset.world_cuboids();

        // One normal per colliding neighbor (deepest pair's MTV direction),
        // summed into the effective shift direction.
        let mut normal_sum = Vec3::zeros();
        let mut colliding = false;
        for f in &fixed {
            if let Some((_, normal)) = deepest_penetration(&moving, f, params.contact_tol) {
                normal_sum += normal;
                colliding = true;
            }
        }
        if !colliding {
            return Some(asset);
        }

        let norm = normal_sum.norm();
        let dir = if norm > 1e-9 {
            normal_sum / norm
        } else {
            // Opposing normals cancelled; pick a random horizontal escape.
            let a = rng.random_range(0.0..std::f64::consts::TAU);
            Vec3::new(a.cos(), a.sin(), 0.0)
        };

        // Shift far enough that every currently penetrating pair separates
        // along the effective normal.
        let mut needed: Real = 0.0;
        for f in &fixed {
            for c in f {
                for m in &moving {
                    if cuboid_penetration(c, m).is_some_and(|p| p.depth > params.contact_tol) {
                        needed = needed.max(overlap_along(c, m, &dir));
                    }
                }
            }
        }
        asset.translate(dir * (needed + params.shift_slack));
    }
    None
}

/// Builds one scene from a 64-bit seed: bit-identical across runs for the
/// same seed and parameters.
pub fn compose_scene(seed: u64, params: &ComposeParams) -> Scene {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let table_z = rng.random_range(params.table_z_range.0..=params.table_z_range.1);

    let (table_params, mut table) = generate_table(&mut rng);
    // generate_table builds at z = 0; lift to the sampled surface height,
    // then push it off the robot's mount column if it was sampled there.
    table.translate(Vec3::new(0.0, 0.0, table_z));
    let table = resolve_asset(table, &[], params, &mut rng)
        .expect("a lone table always shifts clear of the base keep-out");

    let k = rng.random_range(1..=params.max_assets.max(1));
    let mut assets: Vec<PlacedAsset> = Vec::new();
    let mut counts = std::collections::HashMap::new();

    for _ in 0..k {
        let category = {
            let mut cat = AssetCategory::ALL[rng.random_range(0..AssetCategory::ALL.len())];
            for _ in 0..16 {
                if *counts.get(&cat).unwrap_or(&0) < cap_of(params, cat) {
                    break;
                }
                cat = AssetCategory::ALL[rng.random_range(0..AssetCategory::ALL.len())];
            }
            cat
        };
        if *counts.get(&category).unwrap_or(&0) >= cap_of(params, category) {
            continue;
        }
        let asset_params = sample_params(category, &mut rng);
        let asset = build_asset(&asset_params, table_z);

        let existing: Vec<&Asset> =
            std::iter::once(&table).chain(assets.iter().map(|p| &p.asset)).collect();
        if let Some(resolved) = resolve_asset(asset, &existing, params, &mut rng) {
            *counts.entry(category).or_insert(0) += 1;
            assets.push(PlacedAsset { params: asset_params, asset: resolved });
        }
    }

    let word_pos = rng.get_word_pos() as u64;
    Scene {
        schema_version: SCENE_SCHEMA_VERSION,
        seed,
        rng: RNG_NAME.to_string(),
        rng_word_pos: word_pos,
        table_z,
        table: PlacedAsset { params: table_params, asset: table },
        assets,
        mesh_objects: Vec::new(),
    }
}

/// World-space proxy box for a mesh instance (translation-only placement).
fn mesh_proxy(local: &Aabb, translation: Vec3, scale: Real) -> Cuboid {
    let half = local.half_extents() * scale;
    let center = local.center().coords * scale + translation;
    Cuboid::axis_aligned(Point3::from(center), half)
}

/// Translation placing the scaled mesh with its footprint center at
/// `(x, y)` and its lowest point at `z_floor`.
fn mesh_translation(local: &Aabb, scale: Real, x: Real, y: Real, z_floor: Real) -> Vec3 {
    let c = local.center();
    Vec3::new(x - scale * c.x, y - scale * c.y, z_floor - scale * local.min.z)
}

/// Places 0-3 mesh objects inside each asset's interior regions and 0-5 on
/// the table, re-shifting penetrating placements along collision normals
/// and discarding placements that never resolve.
pub fn place_mesh_objects(
    scene: &mut Scene,
    library: &MeshLibrary,
    rng: &mut ChaCha8Rng,
    params: &ComposeParams,
) -> Result<(), SceneError> {
    if library.is_empty() {
        return Err(SceneError::EmptyMeshLibrary);
    }
    let mut scene_cuboids = scene.all_world_cuboids();
    scene_cuboids.push(base_keepout());
    let mut placed: Vec<MeshObject> = Vec::new();

    let asset_targets: Vec<usize> = (0..scene.assets.len()).collect();
    for &asset_idx in &asset_targets {
        let n = rng.random_range(params.meshes_per_asset.0..=params.meshes_per_asset.1);
        for _ in 0..n {
            let entry = &library.entries()[rng.random_range(0..library.len())];
            let scale = rng.random_range(params.mesh_scale.0..=params.mesh_scale.1);
            let local = entry.mesh.aabb();
            let asset = &scene.assets[asset_idx].asset;
            if asset.regions.is_empty() {
                continue;
            }
            let region = &asset.regions[rng.random_range(0..asset.regions.len())];

            // Sample a footprint center keeping the proxy inside the region
            // (conservatively, by the proxy's horizontal circumradius).
            let half = local.half_extents() * scale;
            let shrink = (half.x * half.x + half.y * half.y).sqrt();
            let lo_x = region.aabb.min.x + shrink;
            let hi_x = region.aabb.max.x - shrink;
            let lo_y = region.aabb.min.y + shrink;
            let hi_y = region.aabb.max.y - shrink;
            if lo_x >= hi_x || lo_y >= hi_y || 2.0 * half.z >= region.aabb.max.z - region.aabb.min.z
            {
                continue; // object cannot fit this region
            }
            let p_local = Point3::new(
                rng.random_range(lo_x..=hi_x),
                rng.random_range(lo_y..=hi_y),
                region.aabb.min.z,
            );
            let p_world = asset.pose.transform_point(&p_local);
            let t = mesh_translation(&local, scale, p_world.x, p_world.y, p_world.z);
            if let Some(obj) =
                resolve_mesh(entry, scale, t, &scene_cuboids, params, rng)
            {
                scene_cuboids.push(mesh_proxy(&local, obj.pose.translation.vector, scale));
                placed.push(obj);
            }
        }
    }

    let n_table = rng.random_range(params.meshes_on_table.0..=params.meshes_on_table.1);
    for _ in 0..n_table {
        let entry = &library.entries()[rng.random_range(0..library.len())];
        let scale = rng.random_range(params.mesh_scale.0..=params.mesh_scale.1);
        let local = entry.mesh.aabb();
        let x = rng.random_range(params.mesh_table_x.0..=params.mesh_table_x.1);
        let y = rng.random_range(params.mesh_table_y.0..=params.mesh_table_y.1);
        let t = mesh_translation(&local, scale, x, y, scene.table_z);
        if let Some(obj) = resolve_mesh(entry, scale, t, &scene_cuboids, params, rng) {
            scene_cuboids.push(mesh_proxy(&local, obj.pose.translation.vector, scale));
            placed.push(obj);
        }
    }

    scene.mesh_objects.extend(placed);
    Ok(())
}

fn resolve_mesh(
    entry: &super::MeshEntry,
    scale: Real,
    mut translation: Vec3,
    scene_cuboids: &[Cuboid],
    params: &ComposeParams,
    rng: &mut ChaCha8Rng,
) -> Option<MeshObject> {
    let local = entry.mesh.aabb();
    for _ in 0..params.max_shift_iters {
        let proxy = mesh_proxy(&local, translation, scale);
        match deepest_penetration(&[proxy], scene_cuboids, params.contact_tol) {
            None => {
                return Some(MeshObject {
                    name: entry.name.clone(),
                    content_hash: entry.hash.clone(),
                    pose: Iso3::translation(translation.x, translation.y, translation.z),
                    scale,
                });
            }
            Some((depth, normal)) => {
                let dir = if normal.norm() > 1e-9 {
                    normal.normalize()
                } else {
                    let a = rng.random_range(0.0..std::f64::consts::TAU);
                    Vec3::new(a.cos(), a.sin(), 0.0)
                };
                translation += dir * (depth + params.shift_slack);
            }
        }
    }
    None
}

/// Flattens a scene into collision geometry: every asset cuboid at its
/// articulated pose plus every placed mesh's triangles.
pub fn build_collision_world(
    scene: &Scene,
    library: &MeshLibrary,
    margin: Real,
) -> Result<CollisionWorld<Real>, SceneError> {
    let cuboids = scene.all_world_cuboids();
    let mut triangles = Vec::new();
    for obj in &scene.mesh_objects {
        let entry = library
            .by_hash(&obj.content_hash)
            .ok_or_else(|| SceneError::UnknownMesh { hash: obj.content_hash.clone() })?;
        for tri in entry.mesh.triangles() {
            triangles.push(crate::Triangle::new(
                obj.pose.transform_point(&Point3::from(tri.a.coords * obj.scale)),
                obj.pose.transform_point(&Point3::from(tri.b.coords * obj.scale)),
                obj.pose.transform_point(&Point3::from(tri.c.coords * obj.scale)),
            ));
        }
    }
    Ok(CollisionWorld::new(cuboids, triangles, margin))
}
