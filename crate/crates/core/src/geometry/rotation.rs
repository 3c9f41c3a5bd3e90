//! 6D rotation representation and validated rotation matrices.
//!
//! The 6D form is the first two columns of a rotation matrix; it is recovered
//! to SO(3) by Gram-Schmidt plus a cross product. Solvers parameterize
//! rotations in 6D and re-orthonormalize at every evaluation, so the mapping
//! also exposes its Jacobian for analytic gradients.

use nalgebra::SMatrix;
use serde::{Deserialize, Serialize};

use super::{GeometryError, Mat3, Result, Vec3};

/// Orthonormality / determinant tolerance for [`RotMatrix`] validation.
pub const ROT_TOL: f64 = 1e-9;

/// Six scalar components: the first two columns of a rotation matrix,
/// column-major (`[c0x, c0y, c0z, c1x, c1y, c1z]`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rot6D(pub [f64; 6]);

impl Rot6D {
    pub const IDENTITY: Rot6D = Rot6D([1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);

    pub fn col_a(&self) -> Vec3 {
        Vec3::new(self.0[0], self.0[1], self.0[2])
    }

    pub fn col_b(&self) -> Vec3 {
        Vec3::new(self.0[3], self.0[4], self.0[5])
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    /// Gram-Schmidt of the two columns, third column by cross product.
    ///
    /// Scale and mild non-orthogonality are absorbed by the normalization;
    /// parallel or near-zero columns are rejected.
    pub fn to_matrix(&self) -> Result<RotMatrix> {
        let (m, _) = self.to_matrix_with_jacobian()?;
        Ok(m)
    }

    /// Same as [`Rot6D::to_matrix`] but also returns the 9x6 Jacobian of the
    /// column-stacked matrix `[b0; b1; b2]` with respect to the six inputs.
    pub fn to_matrix_with_jacobian(&self) -> Result<(RotMatrix, SMatrix<f64, 9, 6>)> {
        if !self.is_finite() {
            return Err(GeometryError::DegenerateInput(
                "non-finite 6D rotation".into(),
            ));
        }
        let a0 = self.col_a();
        let a1 = self.col_b();

        let n0 = a0.norm();
        if n0 < 1e-12 {
            return Err(GeometryError::DegenerateInput(
                "first 6D column has near-zero norm".into(),
            ));
        }
        let b0 = a0 / n0;
        // d b0 / d a0 = (I - b0 b0^T) / n0
        let db0_da0 = (Mat3::identity() - b0 * b0.transpose()) / n0;

        let dot = b0.dot(&a1);
        let t = a1 - dot * b0;
        let nt = t.norm();
        if nt < 1e-12 {
            return Err(GeometryError::DegenerateInput(
                "6D columns are parallel or second column near zero".into(),
            ));
        }
        let b1 = t / nt;
        // t = a1 - (b0 . a1) b0
        let dt_da1 = Mat3::identity() - b0 * b0.transpose();
        let dt_db0 = -(b0 * a1.transpose() + dot * Mat3::identity());
        let dt_da0 = dt_db0 * db0_da0;
        let db1_dt = (Mat3::identity() - b1 * b1.transpose()) / nt;
        let db1_da0 = db1_dt * dt_da0;
        let db1_da1 = db1_dt * dt_da1;

        let b2 = b0.cross(&b1);
        // d(b0 x b1) = -[b1]x db0 + [b0]x db1
        let skew0 = skew(&b0);
        let skew1 = skew(&b1);
        let db2_da0 = -skew1 * db0_da0 + skew0 * db1_da0;
        let db2_da1 = skew0 * db1_da1;

        let m = Mat3::from_columns(&[b0, b1, b2]);
        let mut jac = SMatrix::<f64, 9, 6>::zeros();
        for r in 0..3 {
            for c in 0..3 {
                jac[(r, c)] = db0_da0[(r, c)];
                jac[(3 + r, c)] = db1_da0[(r, c)];
                jac[(3 + r, 3 + c)] = db1_da1[(r, c)];
                jac[(6 + r, c)] = db2_da0[(r, c)];
                jac[(6 + r, 3 + c)] = db2_da1[(r, c)];
            }
        }
        Ok((RotMatrix(m), jac))
    }
}

fn skew(v: &Vec3) -> Mat3 {
    Mat3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// A validated member of SO(3): orthonormal columns, determinant +1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotMatrix(Mat3);

impl RotMatrix {
    pub const IDENTITY: RotMatrix = RotMatrix(Mat3::new(
        1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0,
    ));

    /// Validates orthonormality and determinant within [`ROT_TOL`].
    pub fn try_new(m: Mat3) -> Result<RotMatrix> {
        let gram = m.transpose() * m;
        let ortho_err = (gram - Mat3::identity()).abs().max();
        let det_err = (m.determinant() - 1.0).abs();
        if !m.iter().all(|v| v.is_finite()) || ortho_err > ROT_TOL || det_err > ROT_TOL {
            return Err(GeometryError::DegenerateInput(format!(
                "not a rotation matrix (orthonormality error {ortho_err:.2e}, det error {det_err:.2e})"
            )));
        }
        Ok(RotMatrix(m))
    }

    /// Projects an arbitrary matrix to the nearest rotation via SVD with
    /// determinant sign correction.
    pub fn project(m: &Mat3) -> Result<RotMatrix> {
        let svd = m.svd(true, true);
        let u = svd
            .u
            .ok_or_else(|| GeometryError::DegenerateInput("svd failed".into()))?;
        let v_t = svd
            .v_t
            .ok_or_else(|| GeometryError::DegenerateInput("svd failed".into()))?;
        let mut r = u * v_t;
        if r.determinant() < 0.0 {
            let mut u = u;
            u.column_mut(2).neg_mut();
            r = u * v_t;
        }
        // Re-orthonormalize exactly; SVD leaves ~1e-15 residue which is fine,
        // but the constructor tolerance is strict.
        RotMatrix::try_new(r)
    }

    pub fn from_axis_angle(axis: &Vec3, angle: f64) -> RotMatrix {
        let r = nalgebra::Rotation3::from_axis_angle(
            &nalgebra::Unit::new_normalize(*axis),
            angle,
        );
        RotMatrix(*r.matrix())
    }

    pub fn as_matrix(&self) -> &Mat3 {
        &self.0
    }

    pub fn transpose(&self) -> RotMatrix {
        RotMatrix(self.0.transpose())
    }

    pub fn rotate(&self, v: &Vec3) -> Vec3 {
        self.0 * v
    }

    /// First two columns, column-major.
    pub fn to_rot6d(&self) -> Rot6D {
        Rot6D([
            self.0[(0, 0)],
            self.0[(1, 0)],
            self.0[(2, 0)],
            self.0[(0, 1)],
            self.0[(1, 1)],
            self.0[(2, 1)],
        ])
    }

    /// Geodesic angle (radians) between two rotations.
    ///
    /// Uses atan2 of the skew and trace parts, which keeps full precision
    /// near identity where acos(trace) bottoms out around 1e-8.
    pub fn angle_to(&self, other: &RotMatrix) -> f64 {
        let rel = self.0.transpose() * other.0;
        let s = 0.5
            * Vec3::new(
                rel[(2, 1)] - rel[(1, 2)],
                rel[(0, 2)] - rel[(2, 0)],
                rel[(1, 0)] - rel[(0, 1)],
            )
            .norm();
        let c = (rel.trace() - 1.0) * 0.5;
        s.atan2(c)
    }

    /// Row-major flattening, the on-disk layout for all JSON files.
    pub fn to_row_major(&self) -> [f64; 9] {
        let m = &self.0;
        [
            m[(0, 0)],
            m[(0, 1)],
            m[(0, 2)],
            m[(1, 0)],
            m[(1, 1)],
            m[(1, 2)],
            m[(2, 0)],
            m[(2, 1)],
            m[(2, 2)],
        ]
    }

    pub fn from_row_major(v: &[f64; 9]) -> Result<RotMatrix> {
        RotMatrix::try_new(Mat3::new(
            v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8],
        ))
    }
}

impl std::ops::Mul for RotMatrix {
    type Output = RotMatrix;

    fn mul(self, rhs: RotMatrix) -> RotMatrix {
        // Products of valid rotations drift below ROT_TOL; no re-validation.
        RotMatrix(self.0 * rhs.0)
    }
}

impl std::ops::Mul<Vec3> for RotMatrix {
    type Output = Vec3;

    fn mul(self, rhs: Vec3) -> Vec3 {
        self.0 * rhs
    }
}
