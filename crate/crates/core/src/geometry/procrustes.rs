//! Closed-form Procrustes / similarity alignment between paired point sets.

use nalgebra::Matrix3;

use super::{GeometryError, Result, RotMatrix, Vec3};

/// A similarity transform `p -> scale * rotation * p + translation`.
#[derive(Debug, Clone, Copy)]
pub struct Alignment {
    pub rotation: RotMatrix,
    pub translation: Vec3,
    pub scale: f64,
}

impl Alignment {
    pub fn apply(&self, p: &Vec3) -> Vec3 {
        self.scale * self.rotation.rotate(p) + self.translation
    }

    pub fn apply_all(&self, pts: &[Vec3]) -> Vec<Vec3> {
        pts.iter().map(|p| self.apply(p)).collect()
    }
}

/// Finds `(R, t, s)` minimizing `sum ||s*R*p + t - q||^2` over paired points,
/// solved in closed form via SVD of the cross-covariance with determinant
/// sign correction. `with_scale = false` fixes `s = 1`.
pub fn procrustes_align(source: &[Vec3], target: &[Vec3], with_scale: bool) -> Result<Alignment> {
    if source.len() != target.len() {
        return Err(GeometryError::DegenerateInput(format!(
            "point counts differ: {} vs {}",
            source.len(),
            target.len()
        )));
    }
    let n = source.len();
    if n < 3 {
        return Err(GeometryError::DegenerateInput(format!(
            "need at least 3 point pairs, got {n}"
        )));
    }
    let inv_n = 1.0 / n as f64;
    let mean_src: Vec3 = source.iter().sum::<Vec3>() * inv_n;
    let mean_tgt: Vec3 = target.iter().sum::<Vec3>() * inv_n;

    let mut cov = Matrix3::<f64>::zeros();
    let mut var_src = 0.0;
    for (p, q) in source.iter().zip(target) {
        let x = p - mean_src;
        let y = q - mean_tgt;
        cov += y * x.transpose();
        var_src += x.norm_squared();
    }
    cov *= inv_n;
    var_src *= inv_n;

    let svd = cov.svd(true, true);
    let u = svd
        .u
        .ok_or_else(|| GeometryError::DegenerateInput("svd failed".into()))?;
    let v_t = svd
        .v_t
        .ok_or_else(|| GeometryError::DegenerateInput("svd failed".into()))?;
    let d = svd.singular_values;

    // Rank < 2 (all points collinear or coincident) leaves the rotation
    // undetermined about the common axis.
    if d[1] <= 1e-9 * d[0].max(1e-30) || d[0] <= 1e-15 {
        return Err(GeometryError::DegenerateInput(
            "rank-deficient cross-covariance (collinear or coincident points)".into(),
        ));
    }

    let mut sign = Matrix3::identity();
    if (u.determinant() * v_t.determinant()) < 0.0 {
        sign[(2, 2)] = -1.0;
    }
    let rotation = RotMatrix::try_new(u * sign * v_t)?;

    let scale = if with_scale {
        (d[0] + d[1] + sign[(2, 2)] * d[2]) / var_src
    } else {
        1.0
    };
    let translation = mean_tgt - scale * rotation.rotate(&mean_src);
    Ok(Alignment {
        rotation,
        translation,
        scale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cloud(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec3> {
        (0..n)
            .map(|_| {
                Vec3::new(
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                )
            })
            .collect()
    }

    #[test]
    fn identity_alignment() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pts = cloud(&mut rng, 20);
        let a = procrustes_align(&pts, &pts, true).unwrap();
        assert_relative_eq!(*a.rotation.as_matrix(), Matrix3::identity(), epsilon = 1e-9);
        assert_relative_eq!(a.translation, Vec3::zeros(), epsilon = 1e-9);
        assert_relative_eq!(a.scale, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn recovers_known_similarity() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let pts = cloud(&mut rng, 15);
            let rot = RotMatrix::from_axis_angle(
                &Vec3::new(
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                ),
                rng.gen_range(-3.0..3.0),
            );
            let t = Vec3::new(
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
            );
            let s = rng.gen_range(0.5..2.0);
            let target: Vec<Vec3> = pts.iter().map(|p| s * rot.rotate(p) + t).collect();
            let a = procrustes_align(&pts, &target, true).unwrap();
            assert!(a.rotation.angle_to(&rot) < 1e-8);
            assert_relative_eq!(a.translation, t, epsilon = 1e-8);
            assert_relative_eq!(a.scale, s, epsilon = 1e-8);
        }
    }

    #[test]
    fn rigid_mode_recovers_rigid_transform() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let pts = cloud(&mut rng, 12);
            let rot = RotMatrix::from_axis_angle(&Vec3::new(0.2, 0.9, -0.4), rng.gen_range(-3.0..3.0));
            let t = Vec3::new(0.3, -0.6, 1.2);
            let target: Vec<Vec3> = pts.iter().map(|p| rot.rotate(p) + t).collect();
            let a = procrustes_align(&pts, &target, false).unwrap();
            assert_eq!(a.scale, 1.0);
            assert!(a.rotation.angle_to(&rot) < 1e-8);
            assert_relative_eq!(a.translation, t, epsilon = 1e-8);
        }
    }

    #[test]
    fn collinear_points_are_degenerate() {
        let pts: Vec<Vec3> = (0..10).map(|i| Vec3::new(i as f64, 0.0, 0.0)).collect();
        let target: Vec<Vec3> = pts.iter().map(|p| p + Vec3::new(0.0, 1.0, 0.0)).collect();
        assert!(matches!(
            procrustes_align(&pts, &target, true),
            Err(GeometryError::DegenerateInput(_))
        ));
    }

    #[test]
    fn too_few_points_rejected() {
        let pts = vec![Vec3::zeros(), Vec3::x()];
        assert!(procrustes_align(&pts, &pts, true).is_err());
    }
}

