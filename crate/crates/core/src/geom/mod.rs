//! Geometric primitives shared by scene generation and collision checking.

mod sat;

pub use sat::{cuboid_penetration, Penetration};

use nalgebra::{Isometry3, Point3, Translation3, Unit, UnitQuaternion, Vector3};
use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aabb<S: Scalar> {
    pub min: Point3<S>,
    pub max: Point3<S>,
}

impl<S: Scalar> Aabb<S> {
    pub fn new(min: Point3<S>, max: Point3<S>) -> Self {
        Self { min, max }
    }

    /// Smallest box containing all `points`. Panics on an empty iterator.
    pub fn from_points<I: IntoIterator<Item = Point3<S>>>(points: I) -> Self {
        let mut it = points.into_iter();
        let first = it.next().expect("at least one point");
        let mut aabb = Self::new(first, first);
        for p in it {
            aabb.insert(&p);
        }
        aabb
    }

    pub fn insert(&mut self, p: &Point3<S>) {
        for i in 0..3 {
            self.min[i] = self.min[i].min(p[i]);
            self.max[i] = self.max[i].max(p[i]);
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut out = *self;
        out.insert(&other.min);
        out.insert(&other.max);
        out
    }

    pub fn center(&self) -> Point3<S> {
        nalgebra::center(&self.min, &self.max)
    }

    pub fn half_extents(&self) -> Vector3<S> {
        (self.max - self.min) * S::from_config(0.5)
    }

    pub fn contains(&self, p: &Point3<S>) -> bool {
        (0..3).all(|i| p[i] >= self.min[i] && p[i] <= self.max[i])
    }

    /// Grow symmetrically by `amount` on every side.
    pub fn inflated(&self, amount: S) -> Self {
        let d = Vector3::repeat(amount);
        Self::new(self.min - d, self.max + d)
    }

    /// Euclidean distance from `p` to the box (zero inside).
    pub fn distance_to_point(&self, p: &Point3<S>) -> S {
        let mut acc = S::zero();
        for i in 0..3 {
            let d = (self.min[i] - p[i]).max(S::zero()).max(p[i] - self.max[i]);
            acc += d * d;
        }
        acc.sqrt()
    }

    /// Extent along the widest axis.
    pub fn longest_extent(&self) -> S {
        let d = self.max - self.min;
        d.x.max(d.y).max(d.z)
    }
}

/// Oriented box: a rigid pose plus half extents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cuboid<S: Scalar> {
    pub pose: Isometry3<S>,
    pub half_extents: Vector3<S>,
}

impl<S: Scalar> Cuboid<S> {
    /// Builds a cuboid, validating strictly positive half extents.
    pub fn new(pose: Isometry3<S>, half_extents: Vector3<S>) -> Self {
        assert!(
            half_extents.iter().all(|&h| h > S::zero()),
            "cuboid half extents must be strictly positive"
        );
        Self { pose, half_extents }
    }

    /// Axis-aligned cuboid centered at `center`.
    pub fn axis_aligned(center: Point3<S>, half_extents: Vector3<S>) -> Self {
        Self::new(
            Isometry3::from_parts(Translation3::from(center.coords), UnitQuaternion::identity()),
            half_extents,
        )
    }

    pub fn center(&self) -> Point3<S> {
        Point3::from(self.pose.translation.vector)
    }

    /// Exact signed distance from a world-space point; negative inside.
    pub fn sdf(&self, p: &Point3<S>) -> S {
        let local = self.pose.inverse_transform_point(p);
        let q = local.coords.abs() - self.half_extents;
        let outside = q.map(|c| c.max(S::zero())).norm();
        let inside = q.x.max(q.y).max(q.z).min(S::zero());
        outside + inside
    }

    pub fn contains(&self, p: &Point3<S>) -> bool {
        let local = self.pose.inverse_transform_point(p);
        (0..3).all(|i| local[i].abs() <= self.half_extents[i])
    }

    /// The eight corners in world coordinates.
    pub fn corners(&self) -> [Point3<S>; 8] {
        let h = self.half_extents;
        let mut out = [Point3::origin(); 8];
        for (k, corner) in out.iter_mut().enumerate() {
            let sx = if k & 1 == 0 { -h.x } else { h.x };
            let sy = if k & 2 == 0 { -h.y } else { h.y };
            let sz = if k & 4 == 0 { -h.z } else { h.z };
            *corner = self.pose.transform_point(&Point3::new(sx, sy, sz));
        }
        out
    }

    pub fn aabb(&self) -> Aabb<S> {
        Aabb::from_points(self.corners())
    }

    /// Face areas in local axis order (+x/-x, +y/-y, +z/-z share an area).
    pub fn face_areas(&self) -> [S; 3] {
        let h = self.half_extents;
        let four = S::from_config(4.0);
        [four * h.y * h.z, four * h.x * h.z, four * h.x * h.y]
    }

    pub fn volume(&self) -> S {
        let h = self.half_extents;
        S::from_config(8.0) * h.x * h.y * h.z
    }
}

/// Triangle with vertices in world coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Triangle<S: Scalar> {
    pub a: Point3<S>,
    pub b: Point3<S>,
    pub c: Point3<S>,
}

impl<S: Scalar> Triangle<S> {
    pub fn new(a: Point3<S>, b: Point3<S>, c: Point3<S>) -> Self {
        Self { a, b, c }
    }

    pub fn area(&self) -> S {
        (self.b - self.a).cross(&(self.c - self.a)).norm() * S::from_config(0.5)
    }

    pub fn aabb(&self) -> Aabb<S> {
        Aabb::from_points([self.a, self.b, self.c])
    }

    /// Closest point on the triangle to `p` (Ericson, Real-Time Collision
    /// Detection, 5.1.5).
    pub fn closest_point(&self, p: &Point3<S>) -> Point3<S> {
        let ab = self.b - self.a;
        let ac = self.c - self.a;
        let ap = p - self.a;

        let d1 = ab.dot(&ap);
        let d2 = ac.dot(&ap);
        if d1 <= S::zero() && d2 <= S::zero() {
            return self.a;
        }

        let bp = p - self.b;
        let d3 = ab.dot(&bp);
        let d4 = ac.dot(&bp);
        if d3 >= S::zero() && d4 <= d3 {
            return self.b;
        }

        let vc = d1 * d4 - d3 * d2;
        if vc <= S::zero() && d1 >= S::zero() && d3 <= S::zero() {
            let v = d1 / (d1 - d3);
            return self.a + ab * v;
        }

        let cp = p - self.c;
        let d5 = ab.dot(&cp);
        let d6 = ac.dot(&cp);
        if d6 >= S::zero() && d5 <= d6 {
            return self.c;
        }

        let vb = d5 * d2 - d1 * d6;
        if vb <= S::zero() && d2 >= S::zero() && d6 <= S::zero() {
            let w = d2 / (d2 - d6);
            return self.a + ac * w;
        }

        let va = d3 * d6 - d5 * d4;
        if va <= S::zero() && (d4 - d3) >= S::zero() && (d5 - d6) >= S::zero() {
            let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
            return self.b + (self.c - self.b) * w;
        }

        let denom = S::one() / (va + vb + vc);
        let v = vb * denom;
        let w = vc * denom;
        self.a + ab * v + ac * w
    }

    pub fn distance_to_point(&self, p: &Point3<S>) -> S {
        (self.closest_point(p) - p).norm()
    }
}

/// Indexed triangle mesh.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriMesh<S: Scalar> {
    pub vertices: Vec<Point3<S>>,
    pub faces: Vec<[u32; 3]>,
}

impl<S: Scalar> TriMesh<S> {
    pub fn triangle(&self, face: usize) -> Triangle<S> {
        let [i, j, k] = self.faces[face];
        Triangle::new(
            self.vertices[i as usize],
            self.vertices[j as usize],
            self.vertices[k as usize],
        )
    }

    pub fn triangles(&self) -> impl Iterator<Item = Triangle<S>> + '_ {
        (0..self.faces.len()).map(|f| self.triangle(f))
    }

    pub fn aabb(&self) -> Aabb<S> {
        Aabb::from_points(self.vertices.iter().copied())
    }

    /// Extent along the widest axis of the local bounding box.
    pub fn longest_extent(&self) -> S {
        self.aabb().longest_extent()
    }
}

/// Isometry from a translation and roll/pitch/yaw Euler angles.
pub fn iso_from_rpy<S: Scalar>(xyz: [S; 3], rpy: [S; 3]) -> Isometry3<S> {
    Isometry3::from_parts(
        Translation3::new(xyz[0], xyz[1], xyz[2]),
        UnitQuaternion::from_euler_angles(rpy[0], rpy[1], rpy[2]),
    )
}

/// Rotation of `angle` about a line through `origin` along `axis`.
pub fn rotation_about_line<S: Scalar>(
    origin: &Point3<S>,
    axis: &Unit<Vector3<S>>,
    angle: S,
) -> Isometry3<S> {
    let rot = UnitQuaternion::from_axis_angle(axis, angle);
    let shift = origin.coords - rot * origin.coords;
    Isometry3::from_parts(Translation3::from(shift), rot)
}
