//! Area-uniform surface sampling of triangle meshes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{TriMesh, Vec3};

/// Samples `n` points uniformly by surface area. Deterministic given `seed`.
pub fn sample_surface(mesh: &TriMesh, n: usize, seed: u64) -> Vec<Vec3> {
    sample_surface_detailed(mesh, n, seed).0
}

/// As [`sample_surface`], also returning the source triangle of each point.
pub fn sample_surface_detailed(mesh: &TriMesh, n: usize, seed: u64) -> (Vec<Vec3>, Vec<usize>) {
    let areas = mesh.face_areas();
    let mut cumulative = Vec::with_capacity(areas.len());
    let mut total = 0.0;
    for a in &areas {
        total += a;
        cumulative.push(total);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(n);
    let mut tris = Vec::with_capacity(n);
    for _ in 0..n {
        let r = rng.gen_range(0.0..total);
        let idx = cumulative.partition_point(|&c| c <= r).min(areas.len() - 1);
        let [a, b, c] = mesh.face_vertices(idx);
        // square-root trick for uniform barycentric coordinates
        let su = rng.gen_range(0.0f64..1.0).sqrt();
        let v = rng.gen_range(0.0f64..1.0);
        points.push(a * (1.0 - su) + b * (su * (1.0 - v)) + c * (su * v));
        tris.push(idx);
    }
    (points, tris)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit_square() -> TriMesh {
        TriMesh::new(
            vec![
                Vec3::new(0.0, 0.0, 0.0),
                Vec3::new(1.0, 0.0, 0.0),
                Vec3::new(1.0, 1.0, 0.0),
                Vec3::new(0.0, 1.0, 0.0),
            ],
            vec![[0, 1, 2], [0, 2, 3]],
        )
        .unwrap()
    }

    #[test]
    fn empirical_mean_on_unit_square() {
        let pts = sample_surface(&unit_square(), 10_000, 42);
        let mean: Vec3 = pts.iter().sum::<Vec3>() / pts.len() as f64;
        assert!((mean - Vec3::new(0.5, 0.5, 0.0)).norm() < 0.02, "mean {mean}");
    }

    #[test]
    fn single_point_is_on_surface() {
        let pts = sample_surface(&unit_square(), 1, 0);
        assert_eq!(pts.len(), 1);
        let p = pts[0];
        assert!((0.0..=1.0).contains(&p.x) && (0.0..=1.0).contains(&p.y));
        assert_relative_eq!(p.z, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let a = sample_surface(&unit_square(), 100, 7);
        let b = sample_surface(&unit_square(), 100, 7);
        assert_eq!(a, b);
        let c = sample_surface(&unit_square(), 100, 8);
        assert_ne!(a, c);
    }

    #[test]
    fn points_satisfy_barycentric_containment() {
        let mesh = unit_square();
        let (pts, tris) = sample_surface_detailed(&mesh, 500, 13);
        for (p, &t) in pts.iter().zip(&tris) {
            let [a, b, c] = mesh.face_vertices(t);
            // solve p = a + u*(b-a) + v*(c-a) in the triangle plane
            let e0 = b - a;
            let e1 = c - a;
            let d = p - a;
            let d00 = e0.dot(&e0);
            let d01 = e0.dot(&e1);
            let d11 = e1.dot(&e1);
            let d20 = d.dot(&e0);
            let d21 = d.dot(&e1);
            let denom = d00 * d11 - d01 * d01;
            let u = (d11 * d20 - d01 * d21) / denom;
            let v = (d00 * d21 - d01 * d20) / denom;
            assert!(u >= -1e-9 && v >= -1e-9 && u + v <= 1.0 + 1e-9, "u {u} v {v}");
            // and the point lies in the plane
            let normal = e0.cross(&e1);
            assert!(d.dot(&normal).abs() < 1e-9 * normal.norm());
        }
    }
}
