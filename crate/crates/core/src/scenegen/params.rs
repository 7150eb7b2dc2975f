//! Per-category generation parameters, their sampling ranges, and range
//! validation.
//!
//! Ranges are listed as `[lo, hi]`. The cubby block's published pairs are
//! (center, half-range) — e.g. `left (0.4, 0.1)` means the value is drawn
//! from `[0.3, 0.5]` — except the shelf count, which is an integer min/max.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{AssetCategory, AssetKind};
use crate::Real;

/// One named scalar range. Integer-valued parameters use whole-number
/// bounds and are drawn with inclusive integer sampling.
#[derive(Debug, Clone, Copy)]
pub struct ParamRange {
    pub name: &'static str,
    pub lo: f64,
    pub hi: f64,
    pub integer: bool,
}

const fn range(name: &'static str, lo: f64, hi: f64) -> ParamRange {
    ParamRange { name, lo, hi, integer: false }
}

const fn int_range(name: &'static str, lo: f64, hi: f64) -> ParamRange {
    ParamRange { name, lo, hi, integer: true }
}

pub const TABLE_RANGES: &[ParamRange] = &[
    range("width", 0.8, 1.2),
    range("depth", 0.4, 0.6),
    range("height", 0.35, 0.5),
    range("thickness", 0.03, 0.07),
    range("leg_thickness", 0.03, 0.07),
    range("leg_margin", 0.05, 0.15),
    range("position_x", 0.0, 0.8),
    range("position_y", -0.6, 0.6),
    range("z_rotation", 0.0, 3.14),
];

pub const SHELF_RANGES: &[ParamRange] = &[
    range("width", 0.5, 1.0),
    range("depth", 0.2, 0.5),
    range("height", 0.5, 1.2),
    int_range("num_boards", 3.0, 5.0),
    range("board_thickness", 0.02, 0.05),
    range("backboard_thickness", 0.0, 0.05),
    int_range("num_vertical_boards", 0.0, 3.0),
    int_range("num_side_columns", 0.0, 4.0),
    range("column_thickness", 0.02, 0.05),
    range("position_x", 0.0, 0.8),
    range("position_y", -0.6, 0.6),
    range("z_rotation", -1.57, 0.0),
];

pub const OPEN_BOX_RANGES: &[ParamRange] = &[
    range("width", 0.2, 0.7),
    range("depth", 0.2, 0.7),
    range("height", 0.3, 0.5),
    range("thickness", 0.02, 0.06),
    range("front_scale", 0.6, 1.0),
    range("position_x", 0.0, 0.8),
    range("position_y", -0.6, 0.6),
    range("z_rotation", -1.57, 0.0),
];

// Cubby pairs expanded from (center, half-range) to [lo, hi].
pub const CUBBY_RANGES: &[ParamRange] = &[
    range("left", 0.3, 0.5),
    range("right", -0.5, -0.3),
    range("top", 0.5, 1.2),
    range("bottom", -0.1, 0.1),
    range("front", 0.7, 0.9),
    range("width", 0.15, 0.55),
    range("h_board_shift", 0.35, 0.55),
    range("v_board_shift", -0.1, 0.1),
    range("board_thickness", 0.01, 0.03),
    range("external_rotation", -1.57, 1.57),
    range("internal_rotation", -0.5, 0.5),
    int_range("num_shelves", 3.0, 5.0),
];

// The microwave block has no published door-opening range; it is sampled
// like the dishwasher's so the cavity is reachable.
pub const MICROWAVE_RANGES: &[ParamRange] = &[
    range("width", 0.3, 0.6),
    range("depth", 0.3, 0.6),
    range("height", 0.3, 0.6),
    range("thickness", 0.01, 0.02),
    range("display_panel_width", 0.05, 0.15),
    range("distance", 0.5, 0.8),
    range("external_rotation", -2.36, -0.79),
    range("internal_rotation", -0.15, 0.15),
    range("opening_angle", 0.5, 1.57),
];

pub const DISHWASHER_RANGES: &[ParamRange] = &[
    range("width", 0.4, 0.6),
    range("depth", 0.3, 0.4),
    range("height", 0.5, 0.7),
    range("control_panel_height", 0.1, 0.2),
    range("foot_panel_height", 0.1, 0.2),
    range("wall_thickness", 0.01, 0.02),
    range("opening_angle", 0.5, 1.57),
    range("distance", 0.6, 1.0),
    range("external_rotation", -2.36, -0.79),
    range("internal_rotation", -0.15, 0.15),
];

// Drawer travel is capped at 0.30 m; the sampled value is additionally
// clamped below the cabinet depth when the geometry is built.
pub const CABINET_RANGES: &[ParamRange] = &[
    range("width", 0.5, 0.8),
    range("depth", 0.25, 0.4),
    range("height", 0.6, 1.0),
    range("wall_thickness", 0.01, 0.02),
    range("left_opening_angle", 0.7, 1.57),
    range("right_opening_angle", 0.7, 1.57),
    range("distance", 0.6, 1.0),
    range("external_rotation", -2.36, -0.79),
    range("internal_rotation", -0.15, 0.15),
    range("drawer_opening", 0.0, 0.3),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableParams {
    pub width: Real,
    pub depth: Real,
    pub height: Real,
    pub thickness: Real,
    pub leg_thickness: Real,
    pub leg_margin: Real,
    pub position: [Real; 2],
    pub z_rotation: Real,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShelfParams {
    pub width: Real,
    pub depth: Real,
    pub height: Real,
    pub num_boards: u32,
    pub board_thickness: Real,
    pub backboard_thickness: Real,
    pub num_vertical_boards: u32,
    pub num_side_columns: u32,
    pub column_thickness: Real,
    pub position: [Real; 2],
    pub z_rotation: Real,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpenBoxParams {
    pub width: Real,
    pub depth: Real,
    pub height: Real,
    pub thickness: Real,
    pub front_scale: Real,
    pub position: [Real; 2],
    pub z_rotation: Real,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubbyParams {
    pub left: Real,
    pub right: Real,
    pub top: Real,
    pub bottom: Real,
    pub front: Real,
    pub width: Real,
    pub h_board_shift: Real,
    pub v_board_shift: Real,
    pub board_thickness: Real,
    pub external_rotation: Real,
    pub internal_rotation: Real,
    pub num_shelves: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MicrowaveParams {
    pub width: Real,
    pub depth: Real,
    pub height: Real,
    pub thickness: Real,
    pub display_panel_width: Real,
    pub distance: Real,
    pub external_rotation: Real,
    pub internal_rotation: Real,
    pub opening_angle: Real,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DishwasherParams {
    pub width: Real,
    pub depth: Real,
    pub height: Real,
    pub control_panel_height: Real,
    pub foot_panel_height: Real,
    pub wall_thickness: Real,
    pub opening_angle: Real,
    pub distance: Real,
    pub external_rotation: Real,
    pub internal_rotation: Real,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CabinetParams {
    pub width: Real,
    pub depth: Real,
    pub height: Real,
    pub wall_thickness: Real,
    pub left_opening_angle: Real,
    pub right_opening_angle: Real,
    pub distance: Real,
    pub external_rotation: Real,
    pub internal_rotation: Real,
    pub drawer_opening: Real,
}

/// Category-tagged parameter record; field order matches the range tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "category")]
pub enum AssetParams {
    Table(TableParams),
    Shelf(ShelfParams),
    OpenBox(OpenBoxParams),
    Cubby(CubbyParams),
    Microwave(MicrowaveParams),
    Dishwasher(DishwasherParams),
    Cabinet(CabinetParams),
}

impl AssetParams {
    pub fn kind(&self) -> AssetKind {
        match self {
            AssetParams::Table(_) => AssetKind::Table,
            AssetParams::Shelf(_) => AssetKind::Parametric(AssetCategory::Shelf),
            AssetParams::OpenBox(_) => AssetKind::Parametric(AssetCategory::OpenBox),
            AssetParams::Cubby(_) => AssetKind::Parametric(AssetCategory::Cubby),
            AssetParams::Microwave(_) => AssetKind::Parametric(AssetCategory::Microwave),
            AssetParams::Dishwasher(_) => AssetKind::Parametric(AssetCategory::Dishwasher),
            AssetParams::Cabinet(_) => AssetKind::Parametric(AssetCategory::Cabinet),
        }
    }

    pub fn ranges(&self) -> &'static [ParamRange] {
        match self {
            AssetParams::Table(_) => TABLE_RANGES,
            AssetParams::Shelf(_) => SHELF_RANGES,
            AssetParams::OpenBox(_) => OPEN_BOX_RANGES,
            AssetParams::Cubby(_) => CUBBY_RANGES,
            AssetParams::Microwave(_) => MICROWAVE_RANGES,
            AssetParams::Dishwasher(_) => DISHWASHER_RANGES,
            AssetParams::Cabinet(_) => CABINET_RANGES,
        }
    }

    /// Values in the order of [`Self::ranges`], for range validation.
    pub fn named_values(&self) -> Vec<(&'static str, f64)> {
        match self {
            AssetParams::Table(p) => vec![
                ("width", p.width),
                ("depth", p.depth),
                ("height", p.height),
                ("thickness", p.thickness),
                ("leg_thickness", p.leg_thickness),
                ("leg_margin", p.leg_margin),
                ("position_x", p.position[0]),
                ("position_y", p.position[1]),
                ("z_rotation", p.z_rotation),
            ],
            AssetParams::Shelf(p) => vec![
                ("width", p.width),
                ("depth", p.depth),
                ("height", p.height),
                ("num_boards", p.num_boards as f64),
                ("board_thickness", p.board_thickness),
                ("backboard_thickness", p.backboard_thickness),
                ("num_vertical_boards", p.num_vertical_boards as f64),
                ("num_side_columns", p.num_side_columns as f64),
                ("column_thickness", p.column_thickness),
                ("position_x", p.position[0]),
                ("position_y", p.position[1]),
                ("z_rotation", p.z_rotation),
            ],
            AssetParams::OpenBox(p) => vec![
                ("width", p.width),
                ("depth", p.depth),
                ("height", p.height),
                ("thickness", p.thickness),
                ("front_scale", p.front_scale),
                ("position_x", p.position[0]),
                ("position_y", p.position[1]),
                ("z_rotation", p.z_rotation),
            ],
            AssetParams::Cubby(p) => vec![
                ("left", p.left),
                ("right", p.right),
                ("top", p.top),
                ("bottom", p.bottom),
                ("front", p.front),
                ("width", p.width),
                ("h_board_shift", p.h_board_shift),
                ("v_board_shift", p.v_board_shift),
                ("board_thickness", p.board_thickness),
                ("external_rotation", p.external_rotation),
                ("internal_rotation", p.internal_rotation),
                ("num_shelves", p.num_shelves as f64),
            ],
            AssetParams::Microwave(p) => vec![
                ("width", p.width),
                ("depth", p.depth),
                ("height", p.height),
                ("thickness", p.thickness),
                ("display_panel_width", p.display_panel_width),
                ("distance", p.distance),
                ("external_rotation", p.external_rotation),
                ("internal_rotation", p.internal_rotation),
                ("opening_angle", p.opening_angle),
            ],
            AssetParams::Dishwasher(p) => vec![
                ("width", p.width),
                ("depth", p.depth),
                ("height", p.height),
                ("control_panel_height", p.control_panel_height),
                ("foot_panel_height", p.foot_panel_height),
                ("wall_thickness", p.wall_thickness),
                ("opening_angle", p.opening_angle),
                ("distance", p.distance),
                ("external_rotation", p.external_rotation),
                ("internal_rotation", p.internal_rotation),
            ],
            AssetParams::Cabinet(p) => vec![
                ("width", p.width),
                ("depth", p.depth),
                ("height", p.height),
                ("wall_thickness", p.wall_thickness),
                ("left_opening_angle", p.left_opening_angle),
                ("right_opening_angle", p.right_opening_angle),
                ("distance", p.distance),
                ("external_rotation", p.external_rotation),
                ("internal_rotation", p.internal_rotation),
                ("drawer_opening", p.drawer_opening),
            ],
        }
    }

    /// Every value inside its published range (1e-9 slack for rounding).
    pub fn validate_ranges(&self) -> Result<(), String> {
        let ranges = self.ranges();
        let values = self.named_values();
        debug_assert_eq!(ranges.len(), values.len());
        for (r, (name, v)) in ranges.iter().zip(&values) {
            debug_assert_eq!(r.name, *name);
            if !(r.lo - 1e-9..=r.hi + 1e-9).contains(v) {
                return Err(format!("{name} = {v} outside [{}, {}]", r.lo, r.hi));
            }
        }
        Ok(())
    }
}

pub(crate) fn draw(rng: &mut ChaCha8Rng, r: &ParamRange) -> f64 {
    if r.integer {
        rng.random_range(r.lo as i64..=r.hi as i64) as f64
    } else {
        rng.random_range(r.lo..=r.hi)
    }
}
