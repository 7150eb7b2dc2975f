//! Binary AABB tree over collision primitives: median split, leaf size 4.
//!
//! Queries are exact. Nodes carry the largest inradius of their primitives
//! so signed (possibly negative) distances can still be bounded from below
//! by `dist(p, node aabb) - max_inradius`.

use nalgebra::Point3;

use crate::geom::Aabb;
use crate::scalar::Scalar;

pub const LEAF_SIZE: usize = 4;

#[derive(Debug, Clone)]
struct Node<S: Scalar> {
    aabb: Aabb<S>,
    max_inradius: S,
    /// Leaf: range into `order`. Inner: `count == 0`, children in `left`/`right`.
    left: u32,
    right: u32,
    start: u32,
    count: u32,
}

#[derive(Debug, Clone, Default)]
pub struct Bvh<S: Scalar> {
    nodes: Vec<Node<S>>,
    order: Vec<u32>,
}

impl<S: Scalar> Bvh<S> {
    /// Builds over primitive bounds; `inradii[i]` bounds how far inside
    /// primitive `i` a point can be (0 for surfaces like triangles).
    pub fn build(bounds: &[Aabb<S>], inradii: &[S]) -> Self {
        assert_eq!(bounds.len(), inradii.len());
        if bounds.is_empty() {
            return Self::default();
        }
        let mut order: Vec<u32> = (0..bounds.len() as u32).collect();
        let centroids: Vec<Point3<S>> = bounds.iter().map(|b| b.center()).collect();
        let mut nodes = Vec::with_capacity(2 * bounds.len());
        build_recursive(&mut nodes, &mut order, 0, bounds.len(), bounds, inradii, &centroids);
        Self { nodes, order }
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Every primitive index, grouped so leaves are contiguous.
    pub fn primitive_order(&self) -> &[u32] {
        &self.order
    }

    /// Exact minimum of `signed_distance` over all primitives; `None` when
    /// the tree is empty.
    pub fn min_signed_distance<F>(&self, p: &Point3<S>, signed_distance: F) -> Option<S>
    where
        F: Fn(usize) -> S,
    {
        if self.is_empty() {
            return None;
        }
        let mut best = S::max_value().unwrap();
        let mut stack = vec![0usize];
        while let Some(idx) = stack.pop() {
            let node = &self.nodes[idx];
            if node.aabb.distance_to_point(p) - node.max_inradius >= best {
                continue;
            }
            if node.count > 0 {
                for k in node.start..node.start + node.count {
                    let d = signed_distance(self.order[k as usize] as usize);
                    if d < best {
                        best = d;
                    }
                }
            } else {
                // Descend into the closer child first to tighten the bound.
                let (l, r) = (node.left as usize, node.right as usize);
                let dl = self.nodes[l].aabb.distance_to_point(p);
                let dr = self.nodes[r].aabb.distance_to_point(p);
                if dl <= dr {
                    stack.push(r);
                    stack.push(l);
                } else {
                    stack.push(l);
                    stack.push(r);
                }
            }
        }
        Some(best)
    }

    /// True when some primitive's signed distance to `p` is strictly below
    /// `threshold`. Same pruning as the exact query, but exits early.
    pub fn any_below<F>(&self, p: &Point3<S>, threshold: S, signed_distance: F) -> bool
    where
        F: Fn(usize) -> S,
    {
        if self.is_empty() {
            return false;
        }
        let mut stack = vec![0usize];
        while let Some(idx) = stack.pop() {
            let node = &self.nodes[idx];
            if node.aabb.distance_to_point(p) - node.max_inradius >= threshold {
                continue;
            }
            if node.count > 0 {
                for k in node.start..node.start + node.count {
                    if signed_distance(self.order[k as usize] as usize) < threshold {
                        return true;
                    }
                }
            } else {
                stack.push(node.left as usize);
                stack.push(node.right as usize);
            }
        }
        false
    }
}

fn build_recursive<S: Scalar>(
    nodes: &mut Vec<Node<S>>,
    order: &mut [u32],
    start: usize,
    count: usize,
    bounds: &[Aabb<S>],
    inradii: &[S],
    centroids: &[Point3<S>],
) -> u32 {
    let slice = &order[start..start + count];
    let mut aabb = bounds[slice[0] as usize];
    let mut max_inradius = inradii[slice[0] as usize];
    for &i in &slice[1..] {
        aabb = aabb.union(&bounds[i as usize]);
        max_inradius = max_inradius.max(inradii[i as usize]);
    }

    let idx = nodes.len() as u32;
    nodes.push(Node { aabb, max_inradius, left: 0, right: 0, start: start as u32, count: 0 });

    if count <= LEAF_SIZE {
        nodes[idx as usize].count = count as u32;
        return idx;
    }

    let extent = aabb.max - aabb.min;
    let axis = if extent.x >= extent.y && extent.x >= extent.z {
        0
    } else if extent.y >= extent.z {
        1
    } else {
        2
    };
    let mid = count / 2;
    order[start..start + count].select_nth_unstable_by(mid, |&a, &b| {
        centroids[a as usize][axis]
            .partial_cmp(&centroids[b as usize][axis])
            .unwrap_or(std::cmp::Ordering::Equal)
    });

    let left = build_recursive(nodes, order, start, mid, bounds, inradii, centroids);
    let right = build_recursive(nodes, order, start + mid, count - mid, bounds, inradii, centroids);
    nodes[idx as usize].left = left;
    nodes[idx as usize].right = right;
    idx
}
