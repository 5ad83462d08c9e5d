//! Bounding volume hierarchy over scene triangles.

use glam::DVec3;

use super::scene::{Aabb, Triangle};

const LEAF_SIZE: usize = 4;

#[derive(Debug, Clone)]
struct Node {
    bounds: Aabb,
    /// Leaf: first index into `order`. Interior: index of the left child
    /// (the right child follows the left subtree).
    start: usize,
    count: usize,
    right: usize,
}

#[derive(Debug, Clone, Default)]
pub(crate) struct Bvh {
    nodes: Vec<Node>,
    order: Vec<usize>,
}

/// Closest hit found so far; ties in `t` go to the lower triangle index so
/// traversal order never changes the answer.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Closest {
    pub t: f64,
    pub index: usize,
}

impl Closest {
    pub fn none(t_max: f64) -> Self {
        Self {
            t: t_max,
            index: usize::MAX,
        }
    }

    #[inline]
    pub fn offer(&mut self, t: f64, index: usize) {
        if t < self.t || (t == self.t && index < self.index) {
            self.t = t;
            self.index = index;
        }
    }
}

impl Bvh {
    pub fn build(triangles: &[Triangle]) -> Self {
        let mut bvh = Bvh {
            nodes: Vec::new(),
            order: (0..triangles.len()).collect(),
        };
        if !triangles.is_empty() {
            let centroids: Vec<DVec3> = triangles.iter().map(Triangle::centroid).collect();
            bvh.split(triangles, &centroids, 0, triangles.len());
        }
        bvh
    }

    fn split(&mut self, tris: &[Triangle], centroids: &[DVec3], start: usize, end: usize) -> usize {
        let mut bounds = Aabb::EMPTY;
        let mut cbounds = Aabb::EMPTY;
        for &i in &self.order[start..end] {
            bounds = bounds.union(&tris[i].bounds());
            cbounds.grow(centroids[i]);
        }
        let id = self.nodes.len();
        self.nodes.push(Node {
            bounds: bounds.padded(),
            start,
            count: end - start,
            right: 0,
        });
        let extent = cbounds.max - cbounds.min;
        if end - start <= LEAF_SIZE || extent.max_element() <= 0.0 {
            return id;
        }
        let axis = if extent.x >= extent.y && extent.x >= extent.z {
            0
        } else if extent.y >= extent.z {
            1
        } else {
            2
        };
        let mid = (start + end) / 2;
        self.order[start..end].select_nth_unstable_by(mid - start, |a, b| {
            centroids[*a][axis].total_cmp(&centroids[*b][axis]).then(a.cmp(b))
        });
        self.split(tris, centroids, start, mid);
        let right = self.split(tris, centroids, mid, end);
        let node = &mut self.nodes[id];
        node.count = 0;
        node.right = right;
        id
    }

    pub fn closest(&self, tris: &[Triangle], origin: DVec3, dir: DVec3, t_max: f64) -> Closest {
        let mut best = Closest::none(t_max);
        if self.nodes.is_empty() {
            return best;
        }
        let inv = dir.recip();
        let mut stack = Vec::with_capacity(64);
        stack.push(0usize);
        while let Some(id) = stack.pop() {
            let node = &self.nodes[id];
            match node.bounds.hit(origin, inv, best.t) {
                Some(_) => {}
                None => continue,
            }
            if node.count > 0 {
                for &i in &self.order[node.start..node.start + node.count] {
                    if let Some(t) = tris[i].intersect(origin, dir) {
                        best.offer(t, i);
                    }
                }
                continue;
            }
            let (left, right) = (id + 1, node.right);
            let tl = self.nodes[left].bounds.hit(origin, inv, best.t);
            let tr = self.nodes[right].bounds.hit(origin, inv, best.t);
            // Push the farther child first so the nearer one is visited first.
            match (tl, tr) {
                (Some(a), Some(b)) if a <= b => {
                    stack.push(right);
                    stack.push(left);
                }
                (Some(_), Some(_)) => {
                    stack.push(left);
                    stack.push(right);
                }
                (Some(_), None) => stack.push(left),
                (None, Some(_)) => stack.push(right),
                (None, None) => {}
            }
        }
        best
    }
}
