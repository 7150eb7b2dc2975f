//! Separating-axis penetration test between oriented boxes.

use nalgebra::{Unit, Vector3};

use super::Cuboid;
use crate::scalar::Scalar;

/// Result of an intersecting separating-axis query.
#[derive(Debug, Clone, Copy)]
pub struct Penetration<S: Scalar> {
    /// Minimum translation depth in meters.
    pub depth: S,
    /// Unit direction pointing from the first box toward the second; moving
    /// the second box by `depth * normal` resolves the overlap.
    pub normal: Unit<Vector3<S>>,
}

/// Tests two oriented boxes over the 15 candidate separating axes.
///
/// Returns `None` when a separating axis exists (overlap on some axis is
/// `<= 0`), otherwise the minimum-overlap axis and depth. Touching boxes
/// (zero overlap) count as separated.
pub fn cuboid_penetration<S: Scalar>(a: &Cuboid<S>, b: &Cuboid<S>) -> Option<Penetration<S>> {
    let ra = a.pose.rotation.to_rotation_matrix();
    let rb = b.pose.rotation.to_rotation_matrix();
    let axes_a: Vec<Vector3<S>> = (0..3).map(|i| ra.matrix().column(i).into_owned()).collect();
    let axes_b: Vec<Vector3<S>> = (0..3).map(|i| rb.matrix().column(i).into_owned()).collect();
    let delta = b.center() - a.center();

    let mut candidates: Vec<Vector3<S>> = Vec::with_capacity(15);
    candidates.extend(axes_a.iter().copied());
    candidates.extend(axes_b.iter().copied());
    for ax_a in &axes_a {
        for ax_b in &axes_b {
            candidates.push(ax_a.cross(ax_b));
        }
    }

    let eps = S::from_config(1e-9);
    let mut best: Option<Penetration<S>> = None;
    for axis in candidates {
        let len = axis.norm();
        if len < eps {
            continue; // parallel edge pair, axis already covered
        }
        let axis = axis / len;
        let proj_a: S = (0..3).map(|i| a.half_extents[i] * axes_a[i].dot(&axis).abs()).fold(
            S::zero(),
            |acc, x| acc + x,
        );
        let proj_b: S = (0..3).map(|i| b.half_extents[i] * axes_b[i].dot(&axis).abs()).fold(
            S::zero(),
            |acc, x| acc + x,
        );
        let dist = delta.dot(&axis);
        let overlap = proj_a + proj_b - dist.abs();
        if overlap <= S::zero() {
            return None;
        }
        let oriented = if dist >= S::zero() { axis } else { -axis };
        if best.map_or(true, |p| overlap < p.depth) {
            best = Some(Penetration { depth: overlap, normal: Unit::new_unchecked(oriented) });
        }
    }
    best
}
