//! Builders for the table and the six parametric asset categories, plus the
//! category constraint predicate.
//!
//! Local frames: the table's origin is the center of its top surface (legs
//! extend down); every other category has its origin at the bottom center.
//! Openings face +x, except the cubby which opens toward the robot (-x).

use nalgebra::{Translation3, UnitQuaternion};
use rand_chacha::ChaCha8Rng;

use super::params::*;
use super::{
    Articulation, ArticulationJoint, Asset, AssetCategory, AssetKind, CuboidRole, Region,
};
use crate::{Aabb, Cuboid, Iso3, Point3, Real, Vec3};

/// Drawer height as a fraction of cabinet height.
const DRAWER_FRACTION: Real = 0.18;
/// Drawer wall thickness.
const DRAWER_WALL: Real = 0.012;
/// Backboards thinner than this are omitted (a zero-thickness cuboid is
/// not representable).
const MIN_BACKBOARD: Real = 0.005;
/// Drawer regions are only emitted when the drawer is open enough to
/// reach into.
const MIN_DRAWER_REACH: Real = 0.1;

struct Builder {
    cuboids: Vec<Cuboid>,
    roles: Vec<CuboidRole>,
    articulations: Vec<Articulation>,
    regions: Vec<Region>,
}

impl Builder {
    fn new() -> Self {
        Self { cuboids: Vec::new(), roles: Vec::new(), articulations: Vec::new(), regions: Vec::new() }
    }

    fn push(&mut self, center: [Real; 3], half: [Real; 3], role: CuboidRole) -> usize {
        self.cuboids.push(Cuboid::axis_aligned(
            Point3::new(center[0], center[1], center[2]),
            Vec3::new(half[0], half[1], half[2]),
        ));
        self.roles.push(role);
        self.cuboids.len() - 1
    }

    fn region(&mut self, name: String, min: [Real; 3], max: [Real; 3]) {
        if min.iter().zip(&max).all(|(a, b)| a < b) {
            self.regions.push(Region {
                name,
                aabb: Aabb::new(Point3::new(min[0], min[1], min[2]), Point3::new(max[0], max[1], max[2])),
            });
        }
    }

    fn finish(self, kind: AssetKind, pose: Iso3) -> Asset {
        Asset {
            kind,
            pose,
            cuboids: self.cuboids,
            roles: self.roles,
            articulations: self.articulations,
            regions: self.regions,
        }
    }
}

fn pose_xy_yaw(x: Real, y: Real, z: Real, yaw: Real) -> Iso3 {
    Iso3::from_parts(Translation3::new(x, y, z), UnitQuaternion::from_axis_angle(&Vec3::z_axis(), yaw))
}

/// Placement pose for the distance-parameterized categories: the external
/// rotation sweeps the asset around the robot (offset so the sector sits in
/// front), and the asset is turned to face the robot plus internal jitter.
fn polar_pose(distance: Real, external: Real, internal: Real, z: Real) -> Iso3 {
    let azimuth = external + std::f64::consts::FRAC_PI_2;
    let x = distance * azimuth.cos();
    let y = distance * azimuth.sin();
    let yaw = azimuth + std::f64::consts::PI + internal;
    pose_xy_yaw(x, y, z, yaw)
}

fn draw_all(rng: &mut ChaCha8Rng, ranges: &[ParamRange]) -> Vec<f64> {
    ranges.iter().map(|r| draw(rng, r)).collect()
}

/// Uniform parameter draw for one category, in range-table order.
pub fn sample_params(category: AssetCategory, rng: &mut ChaCha8Rng) -> AssetParams {
    match category {
        AssetCategory::Shelf => {
            let v = draw_all(rng, SHELF_RANGES);
            AssetParams::Shelf(ShelfParams {
                width: v[0],
                depth: v[1],
                height: v[2],
                num_boards: v[3] as u32,
                board_thickness: v[4],
                backboard_thickness: v[5],
                num_vertical_boards: v[6] as u32,
                num_side_columns: v[7] as u32,
                column_thickness: v[8],
                position: [v[9], v[10]],
                z_rotation: v[11],
            })
        }
        AssetCategory::OpenBox => {
            let v = draw_all(rng, OPEN_BOX_RANGES);
            AssetParams::OpenBox(OpenBoxParams {
                width: v[0],
                depth: v[1],
                height: v[2],
                thickness: v[3],
                front_scale: v[4],
                position: [v[5], v[6]],
                z_rotation: v[7],
            })
        }
        AssetCategory::Cubby => {
            let v = draw_all(rng, CUBBY_RANGES);
            AssetParams::Cubby(CubbyParams {
                left: v[0],
                right: v[1],
                top: v[2],
                bottom: v[3],
                front: v[4],
                width: v[5],
                h_board_shift: v[6],
                v_board_shift: v[7],
                board_thickness: v[8],
                external_rotation: v[9],
                internal_rotation: v[10],
                num_shelves: v[11] as u32,
            })
        }
        AssetCategory::Microwave => {
            let v = draw_all(rng, MICROWAVE_RANGES);
            AssetParams::Microwave(MicrowaveParams {
                width: v[0],
                depth: v[1],
                height: v[2],
                thickness: v[3],
                display_panel_width: v[4],
                distance: v[5],
                external_rotation: v[6],
                internal_rotation: v[7],
                opening_angle: v[8],
            })
        }
        AssetCategory::Dishwasher => {
            let v = draw_all(rng, DISHWASHER_RANGES);
            AssetParams::Dishwasher(DishwasherParams {
                width: v[0],
                depth: v[1],
                height: v[2],
                control_panel_height: v[3],
                foot_panel_height: v[4],
                wall_thickness: v[5],
                opening_angle: v[6],
                distance: v[7],
                external_rotation: v[8],
                internal_rotation: v[9],
            })
        }
        AssetCategory::Cabinet => {
            let v = draw_all(rng, CABINET_RANGES);
            AssetParams::Cabinet(CabinetParams {
                width: v[0],
                depth: v[1],
                height: v[2],
                wall_thickness: v[3],
                left_opening_angle: v[4],
                right_opening_angle: v[5],
                distance: v[6],
                external_rotation: v[7],
                internal_rotation: v[8],
                drawer_opening: v[9],
            })
        }
    }
}

pub fn sample_table_params(rng: &mut ChaCha8Rng) -> AssetParams {
    let v = draw_all(rng, TABLE_RANGES);
    AssetParams::Table(TableParams {
        width: v[0],
        depth: v[1],
        height: v[2],
        thickness: v[3],
        leg_thickness: v[4],
        leg_margin: v[5],
        position: [v[6], v[7]],
        z_rotation: v[8],
    })
}

/// Sample one obstacle asset; constraint-valid by construction.
pub fn generate_asset(category: AssetCategory, rng: &mut ChaCha8Rng) -> (AssetParams, Asset) {
    let params = sample_params(category, rng);
    let asset = build_asset(&params, 0.0);
    debug_assert!(constraint_check(&asset));
    (params, asset)
}

/// Sample the table every scene stands on.
pub fn generate_table(rng: &mut ChaCha8Rng) -> (AssetParams, Asset) {
    let params = sample_table_params(rng);
    let asset = build_asset(&params, 0.0);
    debug_assert!(constraint_check(&asset));
    (params, asset)
}

/// Deterministic geometry construction; `table_z` is the tabletop height
/// the asset stands on.
pub fn build_asset(params: &AssetParams, table_z: Real) -> Asset {
    match params {
        AssetParams::Table(p) => build_table(p, table_z),
        AssetParams::Shelf(p) => build_shelf(p, table_z),
        AssetParams::OpenBox(p) => build_open_box(p, table_z),
        AssetParams::Cubby(p) => build_cubby(p, table_z),
        AssetParams::Microwave(p) => build_microwave(p, table_z),
        AssetParams::Dishwasher(p) => build_dishwasher(p, table_z),
        AssetParams::Cabinet(p) => build_cabinet(p, table_z),
    }
}

fn build_table(p: &TableParams, table_z: Real) -> Asset {
    let mut b = Builder::new();
    let (w, d, th) = (p.width, p.depth, p.thickness);
    b.push([0.0, 0.0, -th / 2.0], [d / 2.0, w / 2.0, th / 2.0], CuboidRole::TableTop);
    let leg_h = (p.height - th).max(0.05);
    let lx = d / 2.0 - p.leg_margin - p.leg_thickness / 2.0;
    let ly = w / 2.0 - p.leg_margin - p.leg_thickness / 2.0;
    for sx in [-1.0, 1.0] {
        for sy in [-1.0, 1.0] {
            b.push(
                [sx * lx, sy * ly, -th - leg_h / 2.0],
                [p.leg_thickness / 2.0, p.leg_thickness / 2.0, leg_h / 2.0],
                CuboidRole::TableLeg,
            );
        }
    }
    b.finish(AssetKind::Table, pose_xy_yaw(p.position[0], p.position[1], table_z, p.z_rotation))
}

fn build_shelf(p: &ShelfParams, table_z: Real) -> Asset {
    let mut b = Builder::new();
    let (w, d, h, t) = (p.width, p.depth, p.height, p.board_thickness);
    let nb = p.num_boards.max(2) as usize;

    let mut board_z = Vec::with_capacity(nb);
    for i in 0..nb {
        let z = t / 2.0 + i as Real * (h - t) / (nb - 1) as Real;
        board_z.push(z);
        b.push([0.0, 0.0, z], [d / 2.0, w / 2.0, t / 2.0], CuboidRole::Board);
    }

    if p.backboard_thickness >= MIN_BACKBOARD {
        let bt = p.backboard_thickness;
        b.push([-(d / 2.0 + bt / 2.0), 0.0, h / 2.0], [bt / 2.0, w / 2.0, h / 2.0], CuboidRole::Backboard);
    }

    let nv = p.num_vertical_boards as usize;
    let mut divider_y = Vec::with_capacity(nv);
    for j in 1..=nv {
        let y = -w / 2.0 + j as Real * w / (nv + 1) as Real;
        divider_y.push(y);
        b.push([0.0, y, h / 2.0], [d / 2.0, t / 2.0, h / 2.0], CuboidRole::VerticalBoard);
    }

    let ct = p.column_thickness;
    let corners = [(-1.0, -1.0), (-1.0, 1.0), (1.0, -1.0), (1.0, 1.0)];
    for &(sx, sy) in corners.iter().take(p.num_side_columns as usize) {
        b.push(
            [sx * (d / 2.0 - ct / 2.0), sy * (w / 2.0 - ct / 2.0), h / 2.0],
            [ct / 2.0, ct / 2.0, h / 2.0],
            CuboidRole::Column,
        );
    }

    // Rung gaps between consecutive boards, one region per divider cell.
    let mut ys = vec![-w / 2.0];
    ys.extend(divider_y.iter().copied());
    ys.push(w / 2.0);
    for gap in 0..nb.saturating_sub(1) {
        let z_lo = board_z[gap] + t / 2.0;
        let z_hi = board_z[gap + 1] - t / 2.0;
        for cell in 0..ys.len() - 1 {
            b.region(
                format!("rung_{gap}_{cell}"),
                [-d / 2.0, ys[cell] + t / 2.0, z_lo],
                [d / 2.0, ys[cell + 1] - t / 2.0, z_hi],
            );
        }
    }

    b.finish(
        AssetKind::Parametric(AssetCategory::Shelf),
        pose_xy_yaw(p.position[0], p.position[1], table_z, p.z_rotation),
    )
}

fn build_open_box(p: &OpenBoxParams, table_z: Real) -> Asset {
    let mut b = Builder::new();
    let (w, d, h, t) = (p.width, p.depth, p.height, p.thickness);
    b.push([0.0, 0.0, t / 2.0], [d / 2.0, w / 2.0, t / 2.0], CuboidRole::WallBottom);
    b.push([-(d / 2.0 - t / 2.0), 0.0, h / 2.0], [t / 2.0, w / 2.0, h / 2.0], CuboidRole::WallBack);
    let fh = h * p.front_scale;
    b.push([d / 2.0 - t / 2.0, 0.0, fh / 2.0], [t / 2.0, w / 2.0, fh / 2.0], CuboidRole::WallFront);
    b.push([0.0, -(w / 2.0 - t / 2.0), h / 2.0], [d / 2.0, t / 2.0, h / 2.0], CuboidRole::WallRight);
    b.push([0.0, w / 2.0 - t / 2.0, h / 2.0], [d / 2.0, t / 2.0, h / 2.0], CuboidRole::WallLeft);
    b.region(
        "interior".into(),
        [-d / 2.0 + t, -w / 2.0 + t, t],
        [d / 2.0 - t, w / 2.0 - t, h],
    );
    b.finish(
        AssetKind::Parametric(AssetCategory::OpenBox),
        pose_xy_yaw(p.position[0], p.position[1], table_z, p.z_rotation),
    )
}

fn build_cubby(p: &CubbyParams, table_z: Real) -> Asset {
    let mut b = Builder::new();
    let t = p.board_thickness;
    let span_y = p.left - p.right;
    let span_z = p.top - p.bottom;
    let w = p.width;

    b.push([0.0, 0.0, t / 2.0], [w / 2.0, span_y / 2.0, t / 2.0], CuboidRole::WallBottom);
    b.push([0.0, 0.0, span_z - t / 2.0], [w / 2.0, span_y / 2.0, t / 2.0], CuboidRole::WallTop);
    b.push([0.0, span_y / 2.0 - t / 2.0, span_z / 2.0], [w / 2.0, t / 2.0, span_z / 2.0], CuboidRole::WallLeft);
    b.push([0.0, -(span_y / 2.0 - t / 2.0), span_z / 2.0], [w / 2.0, t / 2.0, span_z / 2.0], CuboidRole::WallRight);
    // Opening faces -x (toward the robot); the back closes the +x side.
    b.push([w / 2.0 - t / 2.0, 0.0, span_z / 2.0], [t / 2.0, span_y / 2.0, span_z / 2.0], CuboidRole::WallBack);

    // Interior horizontal boards, evenly spaced, with the middle one moved
    // to the sampled shift (height above the cubby floor).
    let ns = p.num_shelves as usize;
    let mut zs: Vec<Real> =
        (1..=ns).map(|i| t + i as Real * (span_z - 2.0 * t) / (ns + 1) as Real).collect();
    let mid = ns / 2;
    zs[mid] = p.h_board_shift.clamp(2.0 * t, span_z - 2.0 * t);
    zs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for &z in &zs {
        b.push([0.0, 0.0, z], [w / 2.0, span_y / 2.0 - t, t / 2.0], CuboidRole::Board);
    }

    let vy = p.v_board_shift.clamp(-(span_y / 2.0 - 2.0 * t), span_y / 2.0 - 2.0 * t);
    b.push([0.0, vy, span_z / 2.0], [w / 2.0, t / 2.0, span_z / 2.0 - t], CuboidRole::VerticalBoard);

    // Cells: consecutive horizontal levels crossed with the two sides of
    // the vertical board.
    let mut levels = vec![t];
    levels.extend(zs.iter().copied().flat_map(|z| [z - t / 2.0, z + t / 2.0]));
    levels.push(span_z - t);
    let y_cells = [(-(span_y / 2.0 - t), vy - t / 2.0), (vy + t / 2.0, span_y / 2.0 - t)];
    let mut cell = 0;
    for pair in levels.chunks(2) {
        if pair.len() < 2 {
            continue;
        }
        let (z_lo, z_hi) = (pair[0], pair[1]);
        for (y_lo, y_hi) in y_cells {
            b.region(format!("cell_{cell}"), [-w / 2.0, y_lo, z_lo], [w / 2.0 - t, y_hi, z_hi]);
            cell += 1;
        }
    }

    let cy = (p.left + p.right) / 2.0;
    let cx = p.front + w / 2.0;
    let z = table_z + p.bottom.max(0.0);
    let yaw = p.external_rotation + p.internal_rotation;
    b.finish(AssetKind::Parametric(AssetCategory::Cubby), pose_xy_yaw(cx, cy, z, yaw))
}

fn build_microwave(p: &MicrowaveParams, table_z: Real) -> Asset {
    let mut b = Builder::new();
    let (w, d, h, t) = (p.width, p.depth, p.height, p.thickness);
    b.push([0.0, 0.0, t / 2.0], [d / 2.0, w / 2.0, t / 2.0], CuboidRole::WallBottom);
    b.push([0.0, 0.0, h - t / 2.0], [d / 2.0, w / 2.0, t / 2.0], CuboidRole::WallTop);
    b.push([-(d / 2.0 - t / 2.0), 0.0, h / 2.0], [t / 2.0, w / 2.0, h / 2.0], CuboidRole::WallBack);
    b.push([0.0, w / 2.0 - t / 2.0, h / 2.0], [d / 2.0, t / 2.0, h / 2.0], CuboidRole::WallLeft);
    b.push([0.0, -(w / 2.0 - t / 2.0), h / 2.0], [d / 2.0, t / 2.0, h / 2.0], CuboidRole::WallRight);

    let pw = p.display_panel_width;
    b.push(
        [d / 2.0 - t / 2.0, -(w / 2.0 - pw / 2.0), h / 2.0],
        [t / 2.0, pw / 2.0, h / 2.0],
        CuboidRole::Panel,
    );

    // Hinge door covering the rest of the front, hinged on the +y edge and
    // swinging outward (+x).
    let dw = w - pw;
    let door = b.push([d / 2.0 - t / 2.0, pw / 2.0, h / 2.0], [t / 2.0, dw / 2.0, h / 2.0], CuboidRole::Door);
    b.articulations.push(Articulation {
        cuboids: vec![door],
        joint: ArticulationJoint::Hinge,
        origin: Point3::new(d / 2.0 - t / 2.0, w / 2.0, 0.0),
        axis: Vec3::z(),
        range: (0.0, std::f64::consts::PI),
        value: p.opening_angle,
    });

    b.region(
        "cavity".into(),
        [-d / 2.0 + t, -w / 2.0 + t, t],
        [d / 2.0 - t, w / 2.0 - t, h - t],
    );
    b.finish(
        AssetKind::Parametric(AssetCategory::Microwave),
        polar_pose(p.distance, p.external_rotation, p.internal_rotation, table_z),
    )
}

fn build_dishwasher(p: &DishwasherParams, table_z: Real) -> Asset {
    let mut b = Builder::new();
    let (w, d, h, t) = (p.width, p.depth, p.height, p.wall_thickness);
    b.push([0.0, 0.0, t / 2.0], [d / 2.0, w / 2.0, t / 2.0], CuboidRole::WallBottom);
    b.push([0.0, 0.0, h - t / 2.0], [d / 2.0, w / 2.0, t / 2.0], CuboidRole::WallTop);
    b.push([-(d / 2.0 - t / 2.0), 0.0, h / 2.0], [t / 2.0, w / 2.0, h / 2.0], CuboidRole::WallBack);
    b.push([0.0, w / 2.0 - t / 2.0, h / 2.0], [d / 2.0, t / 2.0, h / 2.0], CuboidRole::WallLeft);
    b.push([0.0, -(w / 2.0 - t / 2.0), h / 2.0], [d / 2.0, t / 2.0, h / 2.0], CuboidRole::WallRight);

    let cp = p.control_panel_height;
    let fp = p.foot_panel_height;
    b.push([d / 2.0 - t / 2.0, 0.0, h - cp / 2.0], [t / 2.0, w / 2.0, cp / 2.0], CuboidRole::Panel);
    b.push([d / 2.0 - t / 2.0, 0.0, fp / 2.0], [t / 2.0, w / 2.0, fp / 2.0], CuboidRole::Panel);

    // Door folds down and outward about the horizontal hinge at its base.
    let dh = h - cp - fp;
    let door = b.push([d / 2.0 - t / 2.0, 0.0, fp + dh / 2.0], [t / 2.0, w / 2.0, dh / 2.0], CuboidRole::Door);
    b.articulations.push(Articulation {
        cuboids: vec![door],
        joint: ArticulationJoint::Hinge,
        origin: Point3::new(d / 2.0 - t / 2.0, 0.0, fp),
        axis: Vec3::y(),
        range: (0.0, 1.57),
        value: p.opening_angle.min(1.57),
    });

    b.region(
        "cavity".into(),
        [-d / 2.0 + t, -w / 2.0 + t, t.max(fp * 0.5)],
        [d / 2.0 - t, w / 2.0 - t, h - t],
    );
    b.finish(
        AssetKind::Parametric(AssetCategory::Dishwasher),
        polar_pose(p.distance, p.external_rotation, p.internal_rotation, table_z),
    )
}

fn build_cabinet(p: &CabinetParams, table_z: Real) -> Asset {
    let mut b = Builder::new();
    let (w, d, h, t) = (p.width, p.depth, p.height, p.wall_thickness);
    b.push([0.0, 0.0, t / 2.0], [d / 2.0, w / 2.0, t / 2.0], CuboidRole::WallBottom);
    b.push([0.0, 0.0, h - t / 2.0], [d / 2.0, w / 2.0, t / 2.0], CuboidRole::WallTop);
    b.push([-(d / 2.0 - t / 2.0), 0.0, h / 2.0], [t / 2.0, w / 2.0, h / 2.0], CuboidRole::WallBack);
    b.push([0.0, w / 2.0 - t / 2.0, h / 2.0], [d / 2.0, t / 2.0, h / 2.0], CuboidRole::WallLeft);
    b.push([0.0, -(w / 2.0 - t / 2.0), h / 2.0], [d / 2.0, t / 2.0, h / 2.0], CuboidRole::WallRight);

    // Top drawer section.
    let hd = DRAWER_FRACTION * h;
    let z_div = h - t - hd - t; // top of the lower section
    b.push([0.0, 0.0, z_div + t / 2.0], [d / 2.0, w / 2.0 - t, t / 2.0], CuboidRole::Shelf);

    let tw = DRAWER_WALL;
    let wi = w - 2.0 * t - 0.01;
    let di = d - t - 0.01;
    let xd = t / 2.0;
    let zb = z_div + t;
    let hw = hd - 0.02;
    let opening = p.drawer_opening.min(d - 0.05).max(0.0);
    let mut drawer_parts = vec![b.push([xd, 0.0, zb + tw / 2.0], [di / 2.0, wi / 2.0, tw / 2.0], CuboidRole::DrawerPart)];
    drawer_parts.push(b.push(
        [xd + di / 2.0 - tw / 2.0, 0.0, zb + hw / 2.0],
        [tw / 2.0, wi / 2.0, hw / 2.0],
        CuboidRole::DrawerPart,
    ));
    drawer_parts.push(b.push(
        [xd - di / 2.0 + tw / 2.0, 0.0, zb + hw / 2.0],
        [tw / 2.0, wi / 2.0, hw / 2.0],
        CuboidRole::DrawerPart,
    ));
    drawer_parts.push(b.push(
        [xd, wi / 2.0 - tw / 2.0, zb + hw / 2.0],
        [di / 2.0, tw / 2.0, hw / 2.0],
        CuboidRole::DrawerPart,
    ));
    drawer_parts.push(b.push(
        [xd, -(wi / 2.0 - tw / 2.0), zb + hw / 2.0],
        [di / 2.0, tw / 2.0, hw / 2.0],
        CuboidRole::DrawerPart,
    ));
    b.articulations.push(Articulation {
        cuboids: drawer_parts,
        joint: ArticulationJoint::Prismatic,
        origin: Point3::new(xd, 0.0, zb),
        axis: Vec3::x(),
        range: (0.0, 0.3),
        value: opening,
    });

    // Lower section: center divider, middle shelf, and two hinged doors.
    let lower_lo = t;
    let lower_hi = z_div;
    let lower_mid = (lower_lo + lower_hi) / 2.0;
    b.push(
        [0.0, 0.0, (lower_lo + lower_hi) / 2.0],
        [(d - 2.0 * t) / 2.0, t / 2.0, (lower_hi - lower_lo) / 2.0],
        CuboidRole::VerticalBoard,
    );
    b.push([0.0, 0.0, lower_mid], [(d - 2.0 * t) / 2.0, w / 2.0 - t, t / 2.0], CuboidRole::Shelf);

    let dh2 = (lower_hi - lower_lo) / 2.0;
    let left_door = b.push(
        [d / 2.0 - t / 2.0, w / 4.0, lower_lo + dh2],
        [t / 2.0, w / 4.0, dh2],
        CuboidRole::Door,
    );
    b.articulations.push(Articulation {
        cuboids: vec![left_door],
        joint: ArticulationJoint::Hinge,
        origin: Point3::new(d / 2.0 - t / 2.0, w / 2.0, 0.0),
        axis: Vec3::z(),
        range: (0.0, std::f64::consts::PI),
        value: p.left_opening_angle,
    });
    let right_door = b.push(
        [d / 2.0 - t / 2.0, -w / 4.0, lower_lo + dh2],
        [t / 2.0, w / 4.0, dh2],
        CuboidRole::Door,
    );
    b.articulations.push(Articulation {
        cuboids: vec![right_door],
        joint: ArticulationJoint::Hinge,
        origin: Point3::new(d / 2.0 - t / 2.0, -w / 2.0, 0.0),
        axis: -Vec3::z(),
        range: (0.0, std::f64::consts::PI),
        value: p.right_opening_angle,
    });

    // Four lower cells around the divider and middle shelf.
    let mut cell = 0;
    for (z_lo, z_hi) in [(lower_lo, lower_mid - t / 2.0), (lower_mid + t / 2.0, lower_hi)] {
        for (y_lo, y_hi) in [(-(w / 2.0 - t), -t / 2.0), (t / 2.0, w / 2.0 - t)] {
            b.region(format!("cubby_{cell}"), [-d / 2.0 + t, y_lo, z_lo], [d / 2.0, y_hi, z_hi]);
            cell += 1;
        }
    }
    // Drawer interior at its (open) position, when reachable.
    if opening >= MIN_DRAWER_REACH {
        b.region(
            "drawer".into(),
            [xd - di / 2.0 + tw + opening, -(wi / 2.0 - tw), zb + tw],
            [xd + di / 2.0 - tw + opening, wi / 2.0 - tw, zb + hw],
        );
    }

    b.finish(
        AssetKind::Parametric(AssetCategory::Cabinet),
        polar_pose(p.distance, p.external_rotation, p.internal_rotation, table_z),
    )
}

// ---------------------------------------------------------------------------
// Constraint predicate
// ---------------------------------------------------------------------------

fn approx(a: Real, b: Real) -> bool {
    (a - b).abs() <= 1e-9
}

fn equal_half_heights(asset: &Asset, roles: &[CuboidRole]) -> bool {
    let mut heights = asset
        .roles
        .iter()
        .zip(&asset.cuboids)
        .filter(|(r, _)| roles.contains(r))
        .map(|(_, c)| c.half_extents.z);
    let Some(first) = heights.next() else { return false };
    heights.all(|h| approx(h, first))
}

fn has_hinge_door(asset: &Asset) -> bool {
    asset.articulations.iter().any(|a| {
        a.joint == ArticulationJoint::Hinge
            && !a.cuboids.is_empty()
            && a.cuboids.iter().all(|&i| asset.roles[i] == CuboidRole::Door)
            && a.cuboids.iter().all(|&i| {
                // The closed door must touch its hinge line.
                let aabb = asset.cuboids[i].aabb().inflated(0.02);
                let o = a.origin;
                aabb.min.x <= o.x && o.x <= aabb.max.x && aabb.min.y <= o.y && o.y <= aabb.max.y
            })
    })
}

fn boards_aligned(asset: &Asset) -> bool {
    let boards: Vec<&Cuboid> = asset
        .roles
        .iter()
        .zip(&asset.cuboids)
        .filter(|(r, _)| **r == CuboidRole::Board)
        .map(|(_, c)| c)
        .collect();
    let Some(first) = boards.first() else { return false };
    let height = asset.world_aabb().max.z - asset.world_aabb().min.z;
    boards.iter().all(|b| {
        approx(b.half_extents.x, first.half_extents.x)
            && approx(b.half_extents.y, first.half_extents.y)
            && approx(b.half_extents.z, first.half_extents.z)
            && approx(b.center().x, first.center().x)
            && approx(b.center().y, first.center().y)
            && b.center().z >= 0.0
            && b.center().z <= height + 1e-9
    })
}

/// Category-specific structural predicate: wall-height equalities, board
/// alignment and containment, doors attached at their hinge edges, and
/// articulation values inside their ranges.
pub fn constraint_check(asset: &Asset) -> bool {
    if !asset.articulations.iter().all(Articulation::value_in_range) {
        return false;
    }
    if asset.cuboids.len() != asset.roles.len() {
        return false;
    }
    match asset.kind {
        AssetKind::Table => {
            let tops = asset.role_indices(CuboidRole::TableTop);
            let legs = asset.role_indices(CuboidRole::TableLeg);
            tops.len() == 1
                && legs.len() == 4
                && legs.iter().all(|&i| {
                    let leg = &asset.cuboids[i];
                    let top = &asset.cuboids[tops[0]];
                    let below = leg.center().z + leg.half_extents.z
                        <= top.center().z - top.half_extents.z + 1e-9;
                    let inside = leg.center().x.abs() + leg.half_extents.x
                        <= top.half_extents.x + 1e-9
                        && leg.center().y.abs() + leg.half_extents.y <= top.half_extents.y + 1e-9;
                    below && inside
                })
        }
        AssetKind::Parametric(AssetCategory::Shelf) => {
            asset.role_indices(CuboidRole::Board).len() >= 3 && boards_aligned(asset)
        }
        AssetKind::Parametric(AssetCategory::OpenBox) => {
            let walls = [CuboidRole::WallBack, CuboidRole::WallLeft, CuboidRole::WallRight];
            let heights_ok = equal_half_heights(asset, &walls);
            let front = asset.role_indices(CuboidRole::WallFront);
            let back = asset.role_indices(CuboidRole::WallBack);
            asset.cuboids.len() == 5
                && heights_ok
                && front.len() == 1
                && asset.cuboids[front[0]].half_extents.z
                    <= asset.cuboids[back[0]].half_extents.z + 1e-9
        }
        AssetKind::Parametric(AssetCategory::Cubby) => {
            let shell = [CuboidRole::WallLeft, CuboidRole::WallRight, CuboidRole::WallBack];
            let boards = asset.role_indices(CuboidRole::Board);
            let left = asset.role_indices(CuboidRole::WallLeft);
            let right = asset.role_indices(CuboidRole::WallRight);
            if boards.is_empty() || left.len() != 1 || right.len() != 1 {
                return false;
            }
            let y_hi = asset.cuboids[left[0]].center().y;
            let y_lo = asset.cuboids[right[0]].center().y;
            equal_half_heights(asset, &shell)
                && boards.iter().all(|&i| {
                    let c = &asset.cuboids[i];
                    c.center().y - c.half_extents.y >= y_lo - 1e-9
                        && c.center().y + c.half_extents.y <= y_hi + 1e-9
                })
        }
        AssetKind::Parametric(AssetCategory::Microwave) => {
            let walls = [CuboidRole::WallLeft, CuboidRole::WallRight, CuboidRole::WallBack];
            equal_half_heights(asset, &walls)
                && has_hinge_door(asset)
                && asset.role_indices(CuboidRole::Panel).len() == 1
        }
        AssetKind::Parametric(AssetCategory::Dishwasher) => {
            let walls = [CuboidRole::WallLeft, CuboidRole::WallRight, CuboidRole::WallBack];
            equal_half_heights(asset, &walls)
                && has_hinge_door(asset)
                && asset.role_indices(CuboidRole::Panel).len() == 2
        }
        AssetKind::Parametric(AssetCategory::Cabinet) => {
            let walls = [CuboidRole::WallLeft, CuboidRole::WallRight, CuboidRole::WallBack];
            let hinges = asset
                .articulations
                .iter()
                .filter(|a| a.joint == ArticulationJoint::Hinge)
                .count();
            let prismatic: Vec<&Articulation> = asset
                .articulations
                .iter()
                .filter(|a| a.joint == ArticulationJoint::Prismatic)
                .collect();
            let drawer_parts = asset.role_indices(CuboidRole::DrawerPart);
            equal_half_heights(asset, &walls)
                && hinges == 2
                && prismatic.len() == 1
                && {
                    let mut moved = prismatic[0].cuboids.clone();
                    moved.sort_unstable();
                    moved == drawer_parts
                }
        }
    }
}
