//! Minimal 3D kd-tree for nearest-neighbor queries.

use super::Vec3;

/// Balanced kd-tree over a fixed point set. Build is O(n log n) by median
/// partitioning; queries prune by splitting-plane distance.
pub struct KdTree3 {
    points: Vec<Vec3>,
    // node i splits `order[lo..hi]` at its median along `axis = depth % 3`
    order: Vec<u32>,
}

impl KdTree3 {
    pub fn build(points: &[Vec3]) -> KdTree3 {
        let mut order: Vec<u32> = (0..points.len() as u32).collect();
        let mut tree = KdTree3 {
            points: points.to_vec(),
            order,
        };
        order = std::mem::take(&mut tree.order);
        let n = order.len();
        if n > 0 {
            build_rec(&tree.points, &mut order, 0, n, 0);
        }
        tree.order = order;
        tree
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Index of the nearest stored point and its Euclidean distance.
    pub fn nearest(&self, query: &Vec3) -> Option<(usize, f64)> {
        if self.order.is_empty() {
            return None;
        }
        let mut best = (usize::MAX, f64::INFINITY);
        self.nearest_rec(query, 0, self.order.len(), 0, &mut best);
        Some((best.0, best.1.sqrt()))
    }

    fn nearest_rec(
        &self,
        query: &Vec3,
        lo: usize,
        hi: usize,
        depth: usize,
        best: &mut (usize, f64),
    ) {
        if lo >= hi {
            return;
        }
        let mid = lo + (hi - lo) / 2;
        let idx = self.order[mid] as usize;
        let p = &self.points[idx];
        let d2 = (p - query).norm_squared();
        if d2 < best.1 || (d2 == best.1 && idx < best.0) {
            *best = (idx, d2);
        }
        let axis = depth % 3;
        let delta = query[axis] - p[axis];
        let (near, far) = if delta < 0.0 {
            ((lo, mid), (mid + 1, hi))
        } else {
            ((mid + 1, hi), (lo, mid))
        };
        self.nearest_rec(query, near.0, near.1, depth + 1, best);
        if delta * delta < best.1 {
            self.nearest_rec(query, far.0, far.1, depth + 1, best);
        }
    }
}

fn build_rec(points: &[Vec3], order: &mut [u32], lo: usize, hi: usize, depth: usize) {
    if hi - lo <= 1 {
        return;
    }
    let axis = depth % 3;
    let mid = lo + (hi - lo) / 2;
    order[lo..hi].select_nth_unstable_by(mid - lo, |&a, &b| {
        points[a as usize][axis]
            .partial_cmp(&points[b as usize][axis])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    build_rec(points, order, lo, mid, depth + 1);
    build_rec(points, order, mid + 1, hi, depth + 1);
}
