//! Differentiable soft-silhouette rasterization and silhouette-based losses.
//!
//! A posed mesh is projected through a pinhole camera and each pixel gets the
//! occupancy `1 - prod_faces (1 - sigmoid(d_j / sigma))`, where `d_j` is the
//! signed 2D distance of the pixel center to projected triangle `j` (positive
//! inside). There is no z-buffering or inter-face occlusion: silhouettes are
//! unions of projections. Both losses return analytic gradients with respect
//! to the 6D rotation and translation that posed the mesh; a finite
//! difference check is part of the permanent test suite.

use std::path::Path;

use nalgebra::SVector;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{GeometryError, Mat3, RigidPose, Rot6D, RotMatrix, TriMesh, Vec3};

/// Occupancy accumulator saturation: once `sum softplus(d/sigma)` exceeds
/// this, the pixel is within 1e-13 of full occupancy and remaining faces are
/// skipped.
const SATURATION: f64 = 30.0;

/// Face cull margin in units of sigma. A face is skipped for pixels beyond
/// this signed distance; the per-face softplus contribution is shifted so it
/// reaches exactly zero at the cutoff, keeping the loss continuous there
/// (only its derivative jumps, by sigmoid(-margin) ~ 6e-6).
pub const DEFAULT_CULL_MARGIN_SIGMAS: f64 = 12.0;

/// Camera-frame depth below which a vertex counts as behind the camera.
const Z_EPS: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("no face of the posed mesh is in front of the camera")]
    BehindCamera,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid camera: {0}")]
    InvalidCamera(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("png: {0}")]
    Png(#[from] image::ImageError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, RenderError>;

/// Pinhole camera: intrinsics plus a world-to-camera rigid transform.
#[derive(Debug, Clone)]
pub struct Camera {
    intrinsics: Mat3,
    extrinsics: RigidPose,
    width: usize,
    height: usize,
}

impl Camera {
    pub fn new(intrinsics: Mat3, extrinsics: RigidPose, width: usize, height: usize) -> Result<Camera> {
        let (fx, fy) = (intrinsics[(0, 0)], intrinsics[(1, 1)]);
        let (cx, cy) = (intrinsics[(0, 2)], intrinsics[(1, 2)]);
        if fx <= 0.0 || fy <= 0.0 {
            return Err(RenderError::InvalidCamera(format!(
                "focal lengths must be positive, got fx={fx}, fy={fy}"
            )));
        }
        if !(0.0 < cx && cx < width as f64) || !(0.0 < cy && cy < height as f64) {
            return Err(RenderError::InvalidCamera(format!(
                "principal point ({cx}, {cy}) outside {width}x{height} image"
            )));
        }
        Ok(Camera {
            intrinsics,
            extrinsics,
            width,
            height,
        })
    }

    /// Simple frontal camera looking down +z from the world origin.
    pub fn simple(fx: f64, width: usize, height: usize) -> Camera {
        let k = Mat3::new(
            fx,
            0.0,
            width as f64 / 2.0,
            0.0,
            fx,
            height as f64 / 2.0,
            0.0,
            0.0,
            1.0,
        );
        Camera::new(k, RigidPose::IDENTITY, width, height).expect("valid by construction")
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn intrinsics(&self) -> &Mat3 {
        &self.intrinsics
    }

    pub fn extrinsics(&self) -> &RigidPose {
        &self.extrinsics
    }

    pub fn save_json(&self, path: impl AsRef<Path>) -> Result<()> {
        let doc = CameraJson::from(self);
        Ok(std::fs::write(path, serde_json::to_string_pretty(&doc)?)?)
    }

    pub fn load_json(path: impl AsRef<Path>) -> Result<Camera> {
        let doc: CameraJson = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        doc.try_into()
    }
}

/// On-disk camera layout: explicit intrinsics matrix, world-to-camera
/// rotation (row-major) and translation.
#[derive(Debug, Serialize, Deserialize)]
struct CameraJson {
    intrinsics: [f64; 9],
    rotation: [f64; 9],
    translation: [f64; 3],
    width: usize,
    height: usize,
}

impl From<&Camera> for CameraJson {
    fn from(cam: &Camera) -> CameraJson {
        let k = cam.intrinsics;
        CameraJson {
            intrinsics: [
                k[(0, 0)],
                k[(0, 1)],
                k[(0, 2)],
                k[(1, 0)],
                k[(1, 1)],
                k[(1, 2)],
                k[(2, 0)],
                k[(2, 1)],
                k[(2, 2)],
            ],
            rotation: cam.extrinsics.rotation.to_row_major(),
            translation: cam.extrinsics.translation.into(),
            width: cam.width,
            height: cam.height,
        }
    }
}

impl TryFrom<CameraJson> for Camera {
    type Error = RenderError;

    fn try_from(doc: CameraJson) -> Result<Camera> {
        let k = doc.intrinsics;
        let intrinsics = Mat3::new(k[0], k[1], k[2], k[3], k[4], k[5], k[6], k[7], k[8]);
        let rotation = RotMatrix::from_row_major(&doc.rotation)?;
        let translation = Vec3::from(doc.translation);
        Camera::new(
            intrinsics,
            RigidPose::new(rotation, translation),
            doc.width,
            doc.height,
        )
    }
}

/// A soft occupancy grid with values in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SilhouetteMask {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl SilhouetteMask {
    pub fn zeros(width: usize, height: usize) -> SilhouetteMask {
        SilhouetteMask {
            width,
            height,
            values: vec![0.0; width * height],
        }
    }

    pub fn from_values(width: usize, height: usize, values: Vec<f64>) -> Result<SilhouetteMask> {
        if values.len() != width * height {
            return Err(RenderError::ShapeMismatch(format!(
                "{} values for {width}x{height} mask",
                values.len()
            )));
        }
        if values.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(RenderError::ShapeMismatch(
                "mask values must lie in [0, 1]".into(),
            ));
        }
        Ok(SilhouetteMask {
            width,
            height,
            values,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.values[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, v: f64) {
        self.values[y * self.width + x] = v.clamp(0.0, 1.0);
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Total soft occupancy (soft-pixel area).
    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// 8-bit single-channel PNG, 0-255 mapped linearly to [0, 1].
    pub fn save_png(&self, path: impl AsRef<Path>) -> Result<()> {
        let buf: Vec<u8> = self
            .values
            .iter()
            .map(|v| (v * 255.0).round().clamp(0.0, 255.0) as u8)
            .collect();
        let img = image::GrayImage::from_raw(self.width as u32, self.height as u32, buf)
            .expect("sized buffer");
        img.save(path)?;
        Ok(())
    }

    pub fn load_png(path: impl AsRef<Path>) -> Result<SilhouetteMask> {
        let img = image::open(path)?.into_luma8();
        let (w, h) = (img.width() as usize, img.height() as usize);
        let values = img.into_raw().iter().map(|&b| b as f64 / 255.0).collect();
        SilhouetteMask::from_values(w, h, values)
    }
}

/// Pose parameterized the way the optimizers see it: 6D rotation plus
/// translation. Losses differentiate with respect to these nine scalars.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose6 {
    pub rotation: Rot6D,
    pub translation: Vec3,
}

impl Pose6 {
    pub fn from_pose(pose: &RigidPose) -> Pose6 {
        Pose6 {
            rotation: pose.rotation.to_rot6d(),
            translation: pose.translation,
        }
    }

    pub fn to_pose(&self) -> crate::geometry::Result<RigidPose> {
        Ok(RigidPose::new(self.rotation.to_matrix()?, self.translation))
    }
}

/// A scalar objective with its gradient in pose parameters.
#[derive(Debug, Clone, Copy)]
pub struct LossWithGrad {
    pub value: f64,
    pub rot6d_grad: SVector<f64, 6>,
    pub translation_grad: Vec3,
}

impl LossWithGrad {
    pub fn zero() -> LossWithGrad {
        LossWithGrad {
            value: 0.0,
            rot6d_grad: SVector::zeros(),
            translation_grad: Vec3::zeros(),
        }
    }
}

/// Renders the soft silhouette of `mesh` posed by `pose` under `cam`.
pub fn render_soft_silhouette(
    mesh: &TriMesh,
    pose: &RigidPose,
    cam: &Camera,
    sigma: f64,
) -> Result<SilhouetteMask> {
    let scene = ProjectedScene::build(mesh, pose, cam, sigma, DEFAULT_CULL_MARGIN_SIGMAS)?;
    let mut mask = SilhouetteMask::zeros(cam.width, cam.height);
    scene.for_each_pixel(|x, y, occupancy, _| {
        mask.values[y * cam.width + x] = occupancy;
        0.0
    });
    Ok(mask)
}

/// Sum of squared pixel differences between the rendered silhouette and
/// `target`, with gradients for the pose parameters.
pub fn silhouette_loss(
    mesh: &TriMesh,
    pose: &Pose6,
    cam: &Camera,
    sigma: f64,
    target: &SilhouetteMask,
) -> Result<LossWithGrad> {
    if target.width != cam.width || target.height != cam.height {
        return Err(RenderError::ShapeMismatch(format!(
            "target mask {}x{} vs camera {}x{}",
            target.width, target.height, cam.width, cam.height
        )));
    }
    let rigid = pose
        .to_pose()
        .map_err(RenderError::Geometry)?;
    let mut scene = ProjectedScene::build(mesh, &rigid, cam, sigma, DEFAULT_CULL_MARGIN_SIGMAS)?;
    let mut loss = 0.0;
    scene.accumulate(|x, y, occupancy| {
        let diff = occupancy - target.get(x, y);
        loss += diff * diff;
        2.0 * diff
    });
    // Pixels never touched by any candidate face render as occupancy zero but
    // still contribute (0 - S)^2; their occupancy gradient is zero.
    loss += scene.untouched_target_sq(target);
    Ok(scene.into_pose_gradient(mesh, pose, loss))
}

/// Squared difference between total rendered occupancy and total target
/// occupancy (soft-pixel areas), with gradients for the pose parameters.
pub fn area_loss(
    mesh: &TriMesh,
    pose: &Pose6,
    cam: &Camera,
    sigma: f64,
    target: &SilhouetteMask,
) -> Result<LossWithGrad> {
    if target.width != cam.width || target.height != cam.height {
        return Err(RenderError::ShapeMismatch(format!(
            "target mask {}x{} vs camera {}x{}",
            target.width, target.height, cam.width, cam.height
        )));
    }
    let rigid = pose
        .to_pose()
        .map_err(RenderError::Geometry)?;
    let mut scene = ProjectedScene::build(mesh, &rigid, cam, sigma, DEFAULT_CULL_MARGIN_SIGMAS)?;
    let mut rendered_area = 0.0;
    scene.accumulate(|_, _, occupancy| {
        rendered_area += occupancy;
        1.0
    });
    let diff = rendered_area - target.sum();
    let loss = diff * diff;
    // d loss / d occupancy_p = 2 diff for every pixel; the accumulated
    // per-vertex gradient used weight 1, so scale it now.
    scene.scale_vertex_grads(2.0 * diff);
    Ok(scene.into_pose_gradient(mesh, pose, loss))
}

// ---------------------------------------------------------------------------
// rasterization core
// ---------------------------------------------------------------------------

struct ProjectedScene {
    width: usize,
    height: usize,
    sigma: f64,
    margin: f64,
    /// camera-frame vertex positions
    cam_pts: Vec<Vec3>,
    /// projected pixel coordinates per vertex (valid only where z > eps)
    proj: Vec<[f64; 2]>,
    /// faces with all three vertices in front of the camera
    faces: Vec<[usize; 3]>,
    /// per-face pixel bounding box expanded by the margin: (x0, x1, y0, y1)
    bboxes: Vec<(usize, usize, usize, usize)>,
    /// face indices bucketed per image row
    rows: Vec<Vec<u32>>,
    /// pixels that had at least one candidate face
    touched: Vec<bool>,
    /// d objective / d projected vertex, accumulated by `accumulate`
    vert_grad: Vec<[f64; 2]>,
    cam_rot: RotMatrix,
    fx: f64,
    fy: f64,
    /// softplus value at the cull cutoff, subtracted per contribution
    cutoff: f64,
}

impl ProjectedScene {
    fn build(
        mesh: &TriMesh,
        pose: &RigidPose,
        cam: &Camera,
        sigma: f64,
        margin_sigmas: f64,
    ) -> Result<ProjectedScene> {
        assert!(sigma > 0.0, "sigma must be positive");
        let k = cam.intrinsics;
        let (fx, fy, cx, cy) = (k[(0, 0)], k[(1, 1)], k[(0, 2)], k[(1, 2)]);
        let nv = mesh.vertices().len();
        let mut cam_pts = Vec::with_capacity(nv);
        let mut proj = vec![[0.0, 0.0]; nv];
        for (i, v) in mesh.vertices().iter().enumerate() {
            let world = pose.apply(v);
            let c = cam.extrinsics.apply(&world);
            if c.z > Z_EPS {
                proj[i] = [fx * c.x / c.z + cx, fy * c.y / c.z + cy];
            }
            cam_pts.push(c);
        }
        let margin = margin_sigmas * sigma;
        let mut faces = Vec::new();
        let mut bboxes = Vec::new();
        let mut rows: Vec<Vec<u32>> = vec![Vec::new(); cam.height];
        for f in mesh.faces() {
            if f.iter().any(|&i| cam_pts[i].z <= Z_EPS) {
                continue;
            }
            let pts = [proj[f[0]], proj[f[1]], proj[f[2]]];
            let min_x = pts.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min) - margin;
            let max_x = pts.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max) + margin;
            let min_y = pts.iter().map(|p| p[1]).fold(f64::INFINITY, f64::min) - margin;
            let max_y = pts.iter().map(|p| p[1]).fold(f64::NEG_INFINITY, f64::max) + margin;
            if max_x < 0.0 || max_y < 0.0 || min_x >= cam.width as f64 || min_y >= cam.height as f64
            {
                // entirely off-screen (incl. margin): no pixel sees it
                continue;
            }
            let x0 = min_x.max(0.0) as usize;
            let x1 = (max_x.ceil() as usize).min(cam.width - 1);
            let y0 = min_y.max(0.0) as usize;
            let y1 = (max_y.ceil() as usize).min(cam.height - 1);
            let idx = faces.len() as u32;
            faces.push(*f);
            bboxes.push((x0, x1, y0, y1));
            for row in rows.iter_mut().take(y1 + 1).skip(y0) {
                row.push(idx);
            }
        }
        if faces.is_empty() {
            return Err(RenderError::BehindCamera);
        }
        Ok(ProjectedScene {
            width: cam.width,
            height: cam.height,
            sigma,
            margin,
            cam_pts,
            proj,
            faces,
            bboxes,
            rows,
            touched: vec![false; cam.width * cam.height],
            vert_grad: vec![[0.0, 0.0]; nv],
            cam_rot: cam.extrinsics.rotation,
            fx,
            fy,
            cutoff: softplus(-margin / sigma),
        })
    }

    /// Forward pass only: `visit(x, y, occupancy, touched)`, return ignored
    /// gradient weight.
    fn for_each_pixel(&self, mut visit: impl FnMut(usize, usize, f64, bool) -> f64) {
        let mut scratch: Vec<(u32, f64)> = Vec::new();
        for y in 0..self.height {
            for x in 0..self.width {
                let (occ, _, touched) = self.pixel_occupancy(x, y, &mut scratch);
                visit(x, y, occ, touched);
            }
        }
    }

    /// Forward + gradient pass. `adjoint(x, y, occupancy)` returns
    /// d objective / d occupancy for that pixel; the per-vertex projected
    /// gradient is accumulated into `self.vert_grad`.
    fn accumulate(&mut self, mut adjoint: impl FnMut(usize, usize, f64) -> f64) {
        let mut scratch: Vec<(u32, f64)> = Vec::new();
        for y in 0..self.height {
            if self.rows[y].is_empty() {
                continue;
            }
            for x in 0..self.width {
                let (occ, softplus_sum, touched) = self.pixel_occupancy(x, y, &mut scratch);
                if !touched {
                    continue;
                }
                self.touched[y * self.width + x] = true;
                let w = adjoint(x, y, occ);
                if w == 0.0 {
                    continue;
                }
                let survival = (-softplus_sum).exp(); // prod (1 - s_j)
                if survival < 1e-14 {
                    continue; // saturated pixel: all gradients negligible
                }
                let px = x as f64 + 0.5;
                let py = y as f64 + 0.5;
                for &(fi, d) in scratch.iter() {
                    let s = sigmoid(d / self.sigma);
                    let dd_weight = w * survival * s / self.sigma;
                    if dd_weight.abs() < 1e-16 {
                        continue;
                    }
                    let f = self.faces[fi as usize];
                    let tri = [self.proj[f[0]], self.proj[f[1]], self.proj[f[2]]];
                    let grads = signed_distance_gradient(px, py, &tri);
                    for (vi, g) in f.iter().zip(grads) {
                        self.vert_grad[*vi][0] += dd_weight * g[0];
                        self.vert_grad[*vi][1] += dd_weight * g[1];
                    }
                }
            }
        }
    }

    /// Occupancy of one pixel; also fills `scratch` with (face, signed
    /// distance) pairs for the gradient pass and reports whether any
    /// candidate face covered the pixel.
    fn pixel_occupancy(&self, x: usize, y: usize, scratch: &mut Vec<(u32, f64)>) -> (f64, f64, bool) {
        scratch.clear();
        let px = x as f64 + 0.5;
        let py = y as f64 + 0.5;
        let mut acc = 0.0;
        let mut touched = false;
        for &fi in &self.rows[y] {
            let (x0, x1, _, _) = self.bboxes[fi as usize];
            if x < x0 || x > x1 {
                continue;
            }
            touched = true;
            let f = self.faces[fi as usize];
            let tri = [self.proj[f[0]], self.proj[f[1]], self.proj[f[2]]];
            let d = signed_distance(px, py, &tri);
            let contribution = softplus(d / self.sigma) - self.cutoff;
            if contribution <= 0.0 {
                continue;
            }
            scratch.push((fi, d));
            acc += contribution;
            if acc > SATURATION {
                break;
            }
        }
        (-(-acc).exp_m1(), acc, touched)
    }

    /// Squared target values over pixels no candidate face reached (their
    /// rendered occupancy is exactly zero).
    fn untouched_target_sq(&self, target: &SilhouetteMask) -> f64 {
        let mut sum = 0.0;
        for (i, &t) in self.touched.iter().zip(target.values.iter()) {
            if !i {
                sum += t * t;
            }
        }
        sum
    }

    fn scale_vertex_grads(&mut self, factor: f64) {
        for g in &mut self.vert_grad {
            g[0] *= factor;
            g[1] *= factor;
        }
    }

    /// Chains the accumulated projected-vertex gradients through the
    /// projection and the rigid pose into 6D-rotation and translation space.
    fn into_pose_gradient(self, mesh: &TriMesh, pose: &Pose6, loss: f64) -> LossWithGrad {
        let k_fx = self.fx;
        let k_fy = self.fy;
        let mut trans_grad = Vec3::zeros();
        let mut rot_mat_grad = Mat3::zeros();
        let cam_rot_t = self.cam_rot.transpose();
        for (i, g) in self.vert_grad.iter().enumerate() {
            if g[0] == 0.0 && g[1] == 0.0 {
                continue;
            }
            let c = self.cam_pts[i];
            if c.z <= Z_EPS {
                continue;
            }
            let gu = g[0];
            let gv = g[1];
            let gcam = Vec3::new(
                gu * k_fx / c.z,
                gv * k_fy / c.z,
                -(gu * k_fx * c.x + gv * k_fy * c.y) / (c.z * c.z),
            );
            let gworld = cam_rot_t.rotate(&gcam);
            trans_grad += gworld;
            rot_mat_grad += gworld * mesh.vertices()[i].transpose();
        }
        // d vec_cm(R) / d rot6d, evaluated at the current parameters
        let (_, jac) = pose
            .rotation
            .to_matrix_with_jacobian()
            .expect("pose validated earlier");
        let mut rot6_grad = SVector::<f64, 6>::zeros();
        for p in 0..6 {
            let mut acc = 0.0;
            for col in 0..3 {
                for row in 0..3 {
                    acc += rot_mat_grad[(row, col)] * jac[(3 * col + row, p)];
                }
            }
            rot6_grad[p] = acc;
        }
        LossWithGrad {
            value: loss,
            rot6d_grad: rot6_grad,
            translation_grad: trans_grad,
        }
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Signed distance of point `(px, py)` to a 2D triangle: positive inside,
/// negative outside, magnitude = distance to the boundary.
fn signed_distance(px: f64, py: f64, tri: &[[f64; 2]; 3]) -> f64 {
    let mut min_d2 = f64::INFINITY;
    for e in 0..3 {
        let a = tri[e];
        let b = tri[(e + 1) % 3];
        let (d2, _) = point_segment_distance2(px, py, a, b);
        if d2 < min_d2 {
            min_d2 = d2;
        }
    }
    let dist = min_d2.sqrt();
    if point_in_triangle(px, py, tri) {
        dist
    } else {
        -dist
    }
}

/// As [`signed_distance`] but returns d(signed distance)/d(vertex) for the
/// three triangle vertices. Only the two endpoints of the nearest edge get
/// non-zero gradients.
fn signed_distance_gradient(px: f64, py: f64, tri: &[[f64; 2]; 3]) -> [[f64; 2]; 3] {
    let mut min_d2 = f64::INFINITY;
    let mut active = 0;
    let mut active_h = 0.0;
    for e in 0..3 {
        let a = tri[e];
        let b = tri[(e + 1) % 3];
        let (d2, h) = point_segment_distance2(px, py, a, b);
        if d2 < min_d2 {
            min_d2 = d2;
            active = e;
            active_h = h;
        }
    }
    let dist = min_d2.sqrt();
    let mut grads = [[0.0, 0.0]; 3];
    if dist < 1e-12 {
        return grads; // on the boundary: subgradient zero
    }
    let sign = if point_in_triangle(px, py, tri) {
        1.0
    } else {
        -1.0
    };
    let a = tri[active];
    let b = tri[(active + 1) % 3];
    let qx = a[0] + active_h * (b[0] - a[0]);
    let qy = a[1] + active_h * (b[1] - a[1]);
    let nx = (px - qx) / dist;
    let ny = (py - qy) / dist;
    // dist = |p - q(a, b)|, envelope over the clamped parameter h
    grads[active] = [-sign * (1.0 - active_h) * nx, -sign * (1.0 - active_h) * ny];
    grads[(active + 1) % 3] = [-sign * active_h * nx, -sign * active_h * ny];
    grads
}

fn point_in_triangle(px: f64, py: f64, tri: &[[f64; 2]; 3]) -> bool {
    let cross = |o: [f64; 2], a: [f64; 2]| (a[0] - o[0]) * (py - o[1]) - (a[1] - o[1]) * (px - o[0]);
    let e0 = cross(tri[0], tri[1]);
    let e1 = cross(tri[1], tri[2]);
    let e2 = cross(tri[2], tri[0]);
    (e0 >= 0.0 && e1 >= 0.0 && e2 >= 0.0) || (e0 <= 0.0 && e1 <= 0.0 && e2 <= 0.0)
}

/// Squared distance of a point to segment [a, b] plus the clamped parameter
/// of the closest point.
fn point_segment_distance2(px: f64, py: f64, a: [f64; 2], b: [f64; 2]) -> (f64, f64) {
    let ex = b[0] - a[0];
    let ey = b[1] - a[1];
    let len2 = ex * ex + ey * ey;
    let h = if len2 > 0.0 {
        (((px - a[0]) * ex + (py - a[1]) * ey) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let dx = px - (a[0] + h * ex);
    let dy = py - (a[1] + h * ey);
    (dx * dx + dy * dy, h)
}
