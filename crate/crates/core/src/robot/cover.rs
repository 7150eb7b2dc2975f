//! Conservative sphere covers for objects carried in the gripper.
//!
//! The cover encloses a deterministic sampling of the shape surface with
//! spheres of radius at most 10 cm, so the held object can be checked and
//! observed through the same sphere machinery as the robot body.

use nalgebra::{Point3, Vector3};

use super::AttachedShape;
use crate::scalar::Scalar;

/// Target cell radius; final radii get 2 mm of slack and stay within
/// the model's [0.02, 0.10] m band.
const TARGET_RADIUS: f64 = 0.085;
const RADIUS_SLACK: f64 = 0.002;

/// Grid cover of the shape's sampled surface, in the shape's local frame.
pub fn sphere_cover<S: Scalar>(shape: &AttachedShape<S>) -> Vec<(Point3<S>, S)> {
    let points = surface_points(shape);
    cover_points(&points)
}

/// Deterministic (RNG-free) surface sampling; includes all extremal
/// features such as box corners so the cover provably encloses them.
pub fn surface_points<S: Scalar>(shape: &AttachedShape<S>) -> Vec<Point3<S>> {
    let mut pts = Vec::new();
    match shape {
        AttachedShape::Box { half_extents } => {
            box_surface(half_extents, &mut pts);
        }
        AttachedShape::Cylinder { radius, half_height } => {
            cylinder_surface(*radius, *half_height, &mut pts);
        }
        AttachedShape::Sphere { radius } => {
            fibonacci_sphere(*radius, 96, &mut pts);
        }
        AttachedShape::Mesh(mesh) => {
            for tri in mesh.triangles() {
                let half = S::from_config(0.5);
                let third = S::from_config(1.0 / 3.0);
                pts.push(tri.a);
                pts.push(tri.b);
                pts.push(tri.c);
                pts.push(Point3::from((tri.a.coords + tri.b.coords) * half));
                pts.push(Point3::from((tri.b.coords + tri.c.coords) * half));
                pts.push(Point3::from((tri.a.coords + tri.c.coords) * half));
                pts.push(Point3::from((tri.a.coords + tri.b.coords + tri.c.coords) * third));
            }
        }
    }
    pts
}

fn box_surface<S: Scalar>(h: &Vector3<S>, out: &mut Vec<Point3<S>>) {
    const N: usize = 5;
    for axis in 0..3 {
        let (u, v) = ((axis + 1) % 3, (axis + 2) % 3);
        for side in [-1.0, 1.0] {
            for i in 0..=N {
                for j in 0..=N {
                    let fu = S::from_config(2.0 * i as f64 / N as f64 - 1.0);
                    let fv = S::from_config(2.0 * j as f64 / N as f64 - 1.0);
                    let mut p = Vector3::zeros();
                    p[axis] = S::from_config(side) * h[axis];
                    p[u] = fu * h[u];
                    p[v] = fv * h[v];
                    out.push(Point3::from(p));
                }
            }
        }
    }
}

fn cylinder_surface<S: Scalar>(radius: S, half_height: S, out: &mut Vec<Point3<S>>) {
    const RINGS: usize = 7;
    const SEGS: usize = 20;
    for ring in 0..RINGS {
        let z = S::from_config(2.0 * ring as f64 / (RINGS - 1) as f64 - 1.0) * half_height;
        for seg in 0..SEGS {
            let a = 2.0 * std::f64::consts::PI * seg as f64 / SEGS as f64;
            out.push(Point3::new(
                radius * S::from_config(a.cos()),
                radius * S::from_config(a.sin()),
                z,
            ));
        }
    }
    // Cap interiors.
    for side in [-1.0, 1.0] {
        let z = S::from_config(side) * half_height;
        out.push(Point3::new(S::zero(), S::zero(), z));
        for seg in 0..SEGS {
            let a = 2.0 * std::f64::consts::PI * seg as f64 / SEGS as f64;
            let r = radius * S::from_config(0.5);
            out.push(Point3::new(r * S::from_config(a.cos()), r * S::from_config(a.sin()), z));
        }
    }
}

fn fibonacci_sphere<S: Scalar>(radius: S, n: usize, out: &mut Vec<Point3<S>>) {
    let golden = std::f64::consts::PI * (3.0 - 5.0_f64.sqrt());
    for i in 0..n {
        let y = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
        let r = (1.0 - y * y).sqrt();
        let theta = golden * i as f64;
        out.push(Point3::new(
            radius * S::from_config(r * theta.cos()),
            radius * S::from_config(y),
            radius * S::from_config(r * theta.sin()),
        ));
    }
}

/// Covers `points` with spheres placed on a regular grid over their
/// bounding box; every input point ends up inside some sphere.
fn cover_points<S: Scalar>(points: &[Point3<S>]) -> Vec<(Point3<S>, S)> {
    assert!(!points.is_empty());
    let aabb = crate::geom::Aabb::from_points(points.iter().copied());
    let extent = aabb.max - aabb.min;

    let mut counts = [1usize; 3];
    let cell_limit = 2.0 * TARGET_RADIUS / 3.0_f64.sqrt();
    for i in 0..3 {
        counts[i] = (extent[i].to_config() / cell_limit).ceil().max(1.0) as usize;
    }
    let cell = Vector3::new(
        extent.x / S::from_config(counts[0] as f64),
        extent.y / S::from_config(counts[1] as f64),
        extent.z / S::from_config(counts[2] as f64),
    );
    let half_diag = cell.norm() * S::from_config(0.5);
    let radius = (half_diag + S::from_config(RADIUS_SLACK))
        .clamp(S::from_config(0.02), S::from_config(0.10));

    let mut occupied = vec![false; counts[0] * counts[1] * counts[2]];
    let index_of = |p: &Point3<S>| -> usize {
        let mut idx = [0usize; 3];
        for i in 0..3 {
            let rel = ((p[i] - aabb.min[i]) / cell[i]).to_config().floor();
            idx[i] = (rel.max(0.0) as usize).min(counts[i] - 1);
        }
        (idx[2] * counts[1] + idx[1]) * counts[0] + idx[0]
    };
    for p in points {
        occupied[index_of(p)] = true;
    }

    let mut out = Vec::new();
    for iz in 0..counts[2] {
        for iy in 0..counts[1] {
            for ix in 0..counts[0] {
                if occupied[(iz * counts[1] + iy) * counts[0] + ix] {
                    let center = Point3::new(
                        aabb.min.x + cell.x * S::from_config(ix as f64 + 0.5),
                        aabb.min.y + cell.y * S::from_config(iy as f64 + 0.5),
                        aabb.min.z + cell.z * S::from_config(iz as f64 + 0.5),
                    );
                    out.push((center, radius));
                }
            }
        }
    }
    out
}
