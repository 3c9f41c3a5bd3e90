//! Synthetic scene generation: ground-truth object trajectories, scripted
//! skeleton motion with the object rigidly attached to a joint, hard-
//! rasterized target masks with controllable occlusion and boundary noise,
//! and simulated IMU streams. This is the test harness feeding every
//! downstream module, so everything is deterministic under a fixed seed.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{
    GeometryError, PoseSequence, RigidPose, Rot6D, RotMatrix, TriMesh, Vec3,
};
use crate::imu::{simulate_imu_with, ImuError, ImuNoise, ImuStream};
use crate::render::{Camera, RenderError, SilhouetteMask};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("config error: {field}: {msg}")]
    Config { field: String, msg: String },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Imu(#[from] ImuError),
    #[error(transparent)]
    Render(#[from] RenderError),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, SimError>;

fn config_err(field: &str, msg: impl Into<String>) -> SimError {
    SimError::Config {
        field: field.to_string(),
        msg: msg.into(),
    }
}

// ---------------------------------------------------------------------------
// skeleton
// ---------------------------------------------------------------------------

/// A rigid kinematic tree. Joint 0 is the root; parents must precede their
/// children, which also guarantees the tree is acyclic.
#[derive(Debug, Clone, PartialEq)]
pub struct SkeletonModel {
    parents: Vec<Option<usize>>,
    offsets: Vec<Vec3>,
}

/// Number of joints of the default body-plus-hands skeleton.
pub const DEFAULT_JOINT_COUNT: usize = 52;
/// Joints `0..BODY_JOINT_COUNT` are body joints, the rest are hand joints.
pub const BODY_JOINT_COUNT: usize = 22;
/// Left wrist joint index in the default skeleton.
pub const LEFT_WRIST: usize = 20;
/// Right wrist joint index in the default skeleton.
pub const RIGHT_WRIST: usize = 21;

impl SkeletonModel {
    pub fn new(parents: Vec<Option<usize>>, offsets: Vec<Vec3>) -> Result<SkeletonModel> {
        if parents.is_empty() || parents.len() != offsets.len() {
            return Err(config_err(
                "skeleton",
                format!(
                    "{} parents vs {} offsets",
                    parents.len(),
                    offsets.len()
                ),
            ));
        }
        if parents[0].is_some() {
            return Err(config_err("skeleton.parents", "joint 0 must be the root"));
        }
        for (j, p) in parents.iter().enumerate().skip(1) {
            match p {
                Some(pi) if *pi < j => {}
                Some(pi) => {
                    return Err(config_err(
                        "skeleton.parents",
                        format!("joint {j} has parent {pi}, parents must precede children"),
                    ))
                }
                None => {
                    return Err(config_err(
                        "skeleton.parents",
                        format!("joint {j} has no parent; only joint 0 is a root"),
                    ))
                }
            }
        }
        if offsets.iter().any(|o| !o.iter().all(|v| v.is_finite())) {
            return Err(config_err("skeleton.offsets", "non-finite offset"));
        }
        Ok(SkeletonModel { parents, offsets })
    }

    pub fn joint_count(&self) -> usize {
        self.parents.len()
    }

    pub fn parent(&self, joint: usize) -> Option<usize> {
        self.parents[joint]
    }

    pub fn offsets(&self) -> &[Vec3] {
        &self.offsets
    }

    /// The default 52-joint tree: 22 body joints plus 15 joints per hand,
    /// with rest offsets forming an upright figure (z up, x to its left).
    pub fn default_52() -> SkeletonModel {
        let mut parents: Vec<Option<usize>> = vec![None];
        let mut offsets = vec![Vec3::zeros()];
        let push = |parent: usize, offset: [f64; 3], parents: &mut Vec<Option<usize>>, offsets: &mut Vec<Vec3>| {
            parents.push(Some(parent));
            offsets.push(Vec3::new(offset[0], offset[1], offset[2]));
            parents.len() - 1
        };
        // body
        let l_hip = push(0, [0.09, 0.0, -0.06], &mut parents, &mut offsets);
        let r_hip = push(0, [-0.09, 0.0, -0.06], &mut parents, &mut offsets);
        let spine1 = push(0, [0.0, 0.0, 0.11], &mut parents, &mut offsets);
        let l_knee = push(l_hip, [0.0, 0.0, -0.38], &mut parents, &mut offsets);
        let r_knee = push(r_hip, [0.0, 0.0, -0.38], &mut parents, &mut offsets);
        let spine2 = push(spine1, [0.0, 0.0, 0.12], &mut parents, &mut offsets);
        let l_ankle = push(l_knee, [0.0, 0.0, -0.40], &mut parents, &mut offsets);
        let r_ankle = push(r_knee, [0.0, 0.0, -0.40], &mut parents, &mut offsets);
        let spine3 = push(spine2, [0.0, 0.0, 0.13], &mut parents, &mut offsets);
        let _l_foot = push(l_ankle, [0.0, 0.12, -0.06], &mut parents, &mut offsets);
        let _r_foot = push(r_ankle, [0.0, 0.12, -0.06], &mut parents, &mut offsets);
        let neck = push(spine3, [0.0, 0.0, 0.10], &mut parents, &mut offsets);
        let l_collar = push(spine3, [0.07, 0.0, 0.09], &mut parents, &mut offsets);
        let r_collar = push(spine3, [-0.07, 0.0, 0.09], &mut parents, &mut offsets);
        let _head = push(neck, [0.0, 0.0, 0.12], &mut parents, &mut offsets);
        let l_shoulder = push(l_collar, [0.10, 0.0, 0.02], &mut parents, &mut offsets);
        let r_shoulder = push(r_collar, [-0.10, 0.0, 0.02], &mut parents, &mut offsets);
        let l_elbow = push(l_shoulder, [0.26, 0.0, 0.0], &mut parents, &mut offsets);
        let r_elbow = push(r_shoulder, [-0.26, 0.0, 0.0], &mut parents, &mut offsets);
        let l_wrist = push(l_elbow, [0.25, 0.0, 0.0], &mut parents, &mut offsets);
        let r_wrist = push(r_elbow, [-0.25, 0.0, 0.0], &mut parents, &mut offsets);
        debug_assert_eq!(l_wrist, LEFT_WRIST);
        debug_assert_eq!(r_wrist, RIGHT_WRIST);
        debug_assert_eq!(parents.len(), BODY_JOINT_COUNT);
        // fingers: index, middle, pinky, ring, thumb; three segments each
        let fingers: [[f64; 3]; 5] = [
            [0.090, 0.025, 0.0],
            [0.095, 0.008, 0.0],
            [0.080, -0.028, 0.0],
            [0.090, -0.010, 0.0],
            [0.030, 0.035, -0.010],
        ];
        for (wrist, side) in [(l_wrist, 1.0), (r_wrist, -1.0)] {
            for base in fingers {
                let b = push(
                    wrist,
                    [side * base[0], base[1], base[2]],
                    &mut parents,
                    &mut offsets,
                );
                let m = push(b, [side * 0.032, 0.0, 0.0], &mut parents, &mut offsets);
                let _tip = push(m, [side * 0.026, 0.0, 0.0], &mut parents, &mut offsets);
            }
        }
        debug_assert_eq!(parents.len(), DEFAULT_JOINT_COUNT);
        SkeletonModel::new(parents, offsets).expect("default skeleton is valid")
    }

    pub fn save_json(&self, path: impl AsRef<Path>) -> Result<()> {
        let doc = SkeletonJson {
            parents: self
                .parents
                .iter()
                .map(|p| p.map(|v| v as i64).unwrap_or(-1))
                .collect(),
            offsets: self.offsets.iter().map(|o| [o.x, o.y, o.z]).collect(),
        };
        std::fs::write(path, serde_json::to_string_pretty(&doc)?)?;
        Ok(())
    }

    pub fn load_json(path: impl AsRef<Path>) -> Result<SkeletonModel> {
        let doc: SkeletonJson = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        let parents = doc
            .parents
            .iter()
            .map(|&p| if p < 0 { None } else { Some(p as usize) })
            .collect();
        let offsets = doc.offsets.iter().map(|o| Vec3::from(*o)).collect();
        SkeletonModel::new(parents, offsets)
    }
}

#[derive(Serialize, Deserialize)]
struct SkeletonJson {
    parents: Vec<i64>,
    offsets: Vec<[f64; 3]>,
}

/// Global joint positions of the chain: each joint's transform is its
/// parent's transform composed with (local rotation, rest offset); the root
/// pose acts as the parent of joint 0.
pub fn forward_kinematics(
    skel: &SkeletonModel,
    root_pose: &RigidPose,
    rotations: &[RotMatrix],
) -> Result<Vec<Vec3>> {
    Ok(fk_transforms(skel, root_pose, rotations)?
        .iter()
        .map(|t| t.translation)
        .collect())
}

/// As [`forward_kinematics`] but returning full per-joint transforms.
pub fn fk_transforms(
    skel: &SkeletonModel,
    root_pose: &RigidPose,
    rotations: &[RotMatrix],
) -> Result<Vec<RigidPose>> {
    if rotations.len() != skel.joint_count() {
        return Err(SimError::ShapeMismatch(format!(
            "{} rotations for {} joints",
            rotations.len(),
            skel.joint_count()
        )));
    }
    let mut transforms = Vec::with_capacity(skel.joint_count());
    for j in 0..skel.joint_count() {
        let parent: &RigidPose = match skel.parents[j] {
            None => root_pose,
            Some(p) => &transforms[p],
        };
        let local = RigidPose::new(rotations[j], skel.offsets[j]);
        // parent ∘ (translate by offset, then rotate locally)
        let global = RigidPose::new(
            parent.rotation * local.rotation,
            parent.apply(&skel.offsets[j]),
        );
        let _ = local;
        transforms.push(global);
    }
    Ok(transforms)
}

// ---------------------------------------------------------------------------
// meshes
// ---------------------------------------------------------------------------

/// An axis-aligned box of the given half-extents, each face subdivided into
/// an `n x n` grid (`6 * n^2 * 2` triangles).
pub fn box_mesh(half_extents: Vec3, subdivisions: usize) -> TriMesh {
    let n = subdivisions.max(1);
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    // each cube face: origin corner, two edge vectors
    let h = half_extents;
    let sides: [(Vec3, Vec3, Vec3); 6] = [
        (Vec3::new(-h.x, -h.y, h.z), Vec3::new(2.0 * h.x, 0.0, 0.0), Vec3::new(0.0, 2.0 * h.y, 0.0)), // +z
        (Vec3::new(-h.x, h.y, -h.z), Vec3::new(2.0 * h.x, 0.0, 0.0), Vec3::new(0.0, -2.0 * h.y, 0.0)), // -z
        (Vec3::new(-h.x, -h.y, -h.z), Vec3::new(2.0 * h.x, 0.0, 0.0), Vec3::new(0.0, 0.0, 2.0 * h.z)), // -y
        (Vec3::new(h.x, h.y, -h.z), Vec3::new(-2.0 * h.x, 0.0, 0.0), Vec3::new(0.0, 0.0, 2.0 * h.z)), // +y
        (Vec3::new(h.x, -h.y, -h.z), Vec3::new(0.0, 2.0 * h.y, 0.0), Vec3::new(0.0, 0.0, 2.0 * h.z)), // +x
        (Vec3::new(-h.x, h.y, -h.z), Vec3::new(0.0, -2.0 * h.y, 0.0), Vec3::new(0.0, 0.0, 2.0 * h.z)), // -x
    ];
    for (origin, eu, ev) in sides {
        let base = vertices.len();
        for i in 0..=n {
            for j in 0..=n {
                let u = i as f64 / n as f64;
                let v = j as f64 / n as f64;
                vertices.push(origin + eu * u + ev * v);
            }
        }
        let idx = |i: usize, j: usize| base + i * (n + 1) + j;
        for i in 0..n {
            for j in 0..n {
                faces.push([idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)]);
                faces.push([idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)]);
            }
        }
    }
    TriMesh::new(vertices, faces).expect("box mesh is valid")
}

// ---------------------------------------------------------------------------
// trajectories
// ---------------------------------------------------------------------------

/// Object trajectory families. All but `Scripted` admit exact analytic
/// accelerations, which the scene generator feeds to the IMU simulator.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TrajectoryKind {
    Static {
        center: [f64; 3],
    },
    Linear {
        center: [f64; 3],
        velocity: [f64; 3],
        #[serde(default)]
        acceleration: [f64; 3],
        #[serde(default)]
        spin_rate: f64,
    },
    Circular {
        center: [f64; 3],
        radius: f64,
        angular_rate: f64,
        #[serde(default)]
        phase: f64,
    },
    Tumbling {
        center: [f64; 3],
        amplitude: [f64; 3],
        frequency: [f64; 3],
        rot_rates: [f64; 2],
    },
    Scripted {
        keyframes: Vec<Keyframe>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Keyframe {
    pub time: f64,
    pub rotation: [f64; 9],
    pub translation: [f64; 3],
}

impl TrajectoryKind {
    pub fn pose_at(&self, t: f64) -> Result<RigidPose> {
        Ok(match self {
            TrajectoryKind::Static { center } => {
                RigidPose::new(RotMatrix::IDENTITY, Vec3::from(*center))
            }
            TrajectoryKind::Linear {
                center,
                velocity,
                acceleration,
                spin_rate,
            } => {
                let rot = if *spin_rate != 0.0 {
                    RotMatrix::from_axis_angle(&Vec3::z(), spin_rate * t)
                } else {
                    RotMatrix::IDENTITY
                };
                RigidPose::new(
                    rot,
                    Vec3::from(*center)
                        + Vec3::from(*velocity) * t
                        + 0.5 * Vec3::from(*acceleration) * t * t,
                )
            }
            TrajectoryKind::Circular {
                center,
                radius,
                angular_rate,
                phase,
            } => {
                let a = angular_rate * t + phase;
                RigidPose::new(
                    RotMatrix::from_axis_angle(&Vec3::z(), a),
                    Vec3::from(*center) + *radius * Vec3::new(a.cos(), a.sin(), 0.0),
                )
            }
            TrajectoryKind::Tumbling {
                center,
                amplitude,
                frequency,
                rot_rates,
            } => {
                let p = Vec3::new(
                    amplitude[0] * (frequency[0] * t).sin(),
                    amplitude[1] * (frequency[1] * t + 0.7).sin(),
                    amplitude[2] * (frequency[2] * t + 1.4).sin(),
                );
                let rot = RotMatrix::from_axis_angle(&Vec3::z(), rot_rates[0] * t)
                    * RotMatrix::from_axis_angle(&Vec3::x(), rot_rates[1] * t);
                RigidPose::new(rot, Vec3::from(*center) + p)
            }
            TrajectoryKind::Scripted { keyframes } => scripted_pose(keyframes, t)?,
        })
    }

    /// Exact second derivative of translation, when available.
    pub fn analytic_acceleration(&self, t: f64) -> Option<Vec3> {
        match self {
            TrajectoryKind::Static { .. } => Some(Vec3::zeros()),
            TrajectoryKind::Linear { acceleration, .. } => Some(Vec3::from(*acceleration)),
            TrajectoryKind::Circular {
                radius,
                angular_rate,
                phase,
                ..
            } => {
                let a = angular_rate * t + phase;
                Some(-radius * angular_rate * angular_rate * Vec3::new(a.cos(), a.sin(), 0.0))
            }
            TrajectoryKind::Tumbling {
                amplitude,
                frequency,
                ..
            } => Some(Vec3::new(
                -amplitude[0] * frequency[0] * frequency[0] * (frequency[0] * t).sin(),
                -amplitude[1] * frequency[1] * frequency[1] * (frequency[1] * t + 0.7).sin(),
                -amplitude[2] * frequency[2] * frequency[2] * (frequency[2] * t + 1.4).sin(),
            )),
            TrajectoryKind::Scripted { .. } => None,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            TrajectoryKind::Circular { radius, .. } if *radius <= 0.0 => Err(config_err(
                "scene.trajectory.radius",
                "must be positive",
            )),
            TrajectoryKind::Scripted { keyframes } => {
                if keyframes.len() < 2 {
                    return Err(config_err(
                        "scene.trajectory.keyframes",
                        "need at least 2 keyframes",
                    ));
                }
                for pair in keyframes.windows(2) {
                    if pair[1].time <= pair[0].time {
                        return Err(config_err(
                            "scene.trajectory.keyframes",
                            "keyframe times must be strictly increasing",
                        ));
                    }
                }
                for k in keyframes {
                    RotMatrix::from_row_major(&k.rotation)?;
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

fn scripted_pose(keyframes: &[Keyframe], t: f64) -> Result<RigidPose> {
    let pose_of = |k: &Keyframe| -> Result<RigidPose> {
        Ok(RigidPose::new(
            RotMatrix::from_row_major(&k.rotation)?,
            Vec3::from(k.translation),
        ))
    };
    if t <= keyframes[0].time {
        return pose_of(&keyframes[0]);
    }
    if t >= keyframes[keyframes.len() - 1].time {
        return pose_of(&keyframes[keyframes.len() - 1]);
    }
    let hi = keyframes.partition_point(|k| k.time <= t);
    let (a, b) = (&keyframes[hi - 1], &keyframes[hi]);
    let s = (t - a.time) / (b.time - a.time);
    let pa = pose_of(a)?;
    let pb = pose_of(b)?;
    let rel = pa.rotation.transpose() * pb.rotation;
    let axis_angle = crate::imu::log_rotation(&rel);
    let rot = if axis_angle.norm() > 1e-12 {
        pa.rotation * RotMatrix::from_axis_angle(&axis_angle.normalize(), axis_angle.norm() * s)
    } else {
        pa.rotation
    };
    Ok(RigidPose::new(
        rot,
        pa.translation * (1.0 - s) + pb.translation * s,
    ))
}

// ---------------------------------------------------------------------------
// scene configuration
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SceneConfig {
    pub seed: u64,
    pub scene: SceneSection,
    pub camera: CameraSection,
    #[serde(default)]
    pub imu: ImuSection,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SceneSection {
    /// Path to the object template OBJ.
    pub mesh: String,
    pub duration_s: f64,
    pub fps: f64,
    pub trajectory: TrajectoryKind,
    /// Frame windows `[start, end)` whose target masks are blanked.
    #[serde(default)]
    pub occlusion: Vec<OcclusionWindow>,
    #[serde(default)]
    pub noise: NoiseSection,
    #[serde(default)]
    pub attachment: AttachmentSection,
    /// Optional skeleton JSON path; the built-in 52-joint tree by default.
    #[serde(default)]
    pub skeleton: Option<String>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct OcclusionWindow {
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseSection {
    /// Width of the mask boundary band subject to random flips, pixels.
    pub mask_boundary_px: usize,
    /// Flip probability inside the boundary band.
    pub mask_flip_prob: f64,
    pub imu_rotation_deg: f64,
    pub imu_acceleration_sigma: f64,
}

impl Default for NoiseSection {
    fn default() -> NoiseSection {
        NoiseSection {
            mask_boundary_px: 0,
            mask_flip_prob: 0.3,
            imu_rotation_deg: 0.0,
            imu_acceleration_sigma: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct AttachmentSection {
    /// Joint the object is rigidly attached to.
    pub joint: usize,
    /// World-frame offset from the joint to the object center.
    pub offset: [f64; 3],
}

impl Default for AttachmentSection {
    fn default() -> AttachmentSection {
        AttachmentSection {
            joint: RIGHT_WRIST,
            offset: [0.0, 0.0, -0.05],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CameraSection {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: usize,
    pub height: usize,
    /// World-to-camera rotation, row-major.
    pub rotation: [f64; 9],
    pub translation: [f64; 3],
}

impl CameraSection {
    pub fn to_camera(&self) -> Result<Camera> {
        let k = crate::geometry::Mat3::new(
            self.fx, 0.0, self.cx, 0.0, self.fy, self.cy, 0.0, 0.0, 1.0,
        );
        let pose = RigidPose::new(
            RotMatrix::from_row_major(&self.rotation)?,
            Vec3::from(self.translation),
        );
        Ok(Camera::new(k, pose, self.width, self.height)?)
    }

    /// A camera at the world origin looking straight down +z.
    pub fn frontal(fx: f64, width: usize, height: usize) -> CameraSection {
        CameraSection {
            fx,
            fy: fx,
            cx: width as f64 / 2.0,
            cy: height as f64 / 2.0,
            width,
            height,
            rotation: [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
            translation: [0.0, 0.0, 0.0],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct ImuSection {
    /// Smoothing factor of the second-difference acceleration.
    pub smoothing: usize,
    /// Optional inertial-to-world rotation of the simulated sensor frame,
    /// row-major. Identity means the IMU already reports in world axes.
    pub frame_rotation: Option<[f64; 9]>,
}

impl Default for ImuSection {
    fn default() -> ImuSection {
        ImuSection {
            smoothing: 4,
            frame_rotation: None,
        }
    }
}

// ---------------------------------------------------------------------------
// skeleton motion
// ---------------------------------------------------------------------------

/// Per-frame skeleton state: root pose plus per-joint local rotations
/// (joint 0's entry composes the global orientation).
#[derive(Debug, Clone, PartialEq)]
pub struct SkeletonMotion {
    pub frame_interval: f64,
    pub root: Vec<RigidPose>,
    /// `[frame][joint]`
    pub rotations: Vec<Vec<Rot6D>>,
}

impl SkeletonMotion {
    pub fn len(&self) -> usize {
        self.root.len()
    }

    pub fn is_empty(&self) -> bool {
        self.root.is_empty()
    }

    /// Global joint positions per frame via forward kinematics.
    pub fn joint_positions(&self, skel: &SkeletonModel) -> Result<Vec<Vec<Vec3>>> {
        self.root
            .iter()
            .zip(&self.rotations)
            .map(|(root, rots)| {
                let mats: crate::geometry::Result<Vec<RotMatrix>> =
                    rots.iter().map(|r| r.to_matrix()).collect();
                forward_kinematics(skel, root, &mats?)
            })
            .collect()
    }

    pub fn save_json(&self, path: impl AsRef<Path>) -> Result<()> {
        let doc = SkeletonMotionJson {
            fps: 1.0 / self.frame_interval,
            joint_count: self.rotations.first().map(|r| r.len()).unwrap_or(0),
            frames: self
                .root
                .iter()
                .zip(&self.rotations)
                .map(|(root, rots)| SkeletonFrameJson {
                    root_rotation: root.rotation.to_row_major(),
                    root_translation: root.translation.into(),
                    rotations: rots.iter().map(|r| r.0).collect(),
                })
                .collect(),
        };
        std::fs::write(path, serde_json::to_string(&doc)?)?;
        Ok(())
    }

    pub fn load_json(path: impl AsRef<Path>) -> Result<SkeletonMotion> {
        let doc: SkeletonMotionJson = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        if doc.frames.is_empty() || doc.fps <= 0.0 {
            return Err(SimError::ShapeMismatch(
                "skeleton motion needs at least one frame and positive fps".into(),
            ));
        }
        let mut root = Vec::with_capacity(doc.frames.len());
        let mut rotations = Vec::with_capacity(doc.frames.len());
        for f in &doc.frames {
            if f.rotations.len() != doc.joint_count {
                return Err(SimError::ShapeMismatch(format!(
                    "frame with {} joints, header says {}",
                    f.rotations.len(),
                    doc.joint_count
                )));
            }
            root.push(RigidPose::new(
                RotMatrix::from_row_major(&f.root_rotation)?,
                Vec3::from(f.root_translation),
            ));
            rotations.push(f.rotations.iter().map(|r| Rot6D(*r)).collect());
        }
        Ok(SkeletonMotion {
            frame_interval: 1.0 / doc.fps,
            root,
            rotations,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct SkeletonMotionJson {
    fps: f64,
    joint_count: usize,
    frames: Vec<SkeletonFrameJson>,
}

#[derive(Serialize, Deserialize)]
struct SkeletonFrameJson {
    root_rotation: [f64; 9],
    root_translation: [f64; 3],
    rotations: Vec<[f64; 6]>,
}

// ---------------------------------------------------------------------------
// trajectory JSON (shared schema for ground truth and tracker output)
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct TrajectoryJson {
    fps: f64,
    frames: Vec<TrajectoryFrameJson>,
}

#[derive(Serialize, Deserialize)]
struct TrajectoryFrameJson {
    rotation: [f64; 9],
    translation: [f64; 3],
}

pub fn save_trajectory(path: impl AsRef<Path>, seq: &PoseSequence) -> Result<()> {
    let doc = TrajectoryJson {
        fps: 1.0 / seq.frame_interval(),
        frames: seq
            .iter()
            .map(|p| TrajectoryFrameJson {
                rotation: p.rotation.to_row_major(),
                translation: p.translation.into(),
            })
            .collect(),
    };
    std::fs::write(path, serde_json::to_string(&doc)?)?;
    Ok(())
}

pub fn load_trajectory(path: impl AsRef<Path>) -> Result<PoseSequence> {
    let doc: TrajectoryJson = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    let frames = doc
        .frames
        .iter()
        .map(|f| {
            Ok(RigidPose::new(
                RotMatrix::from_row_major(&f.rotation)?,
                Vec3::from(f.translation),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PoseSequence::new(frames, 1.0 / doc.fps)?)
}

// ---------------------------------------------------------------------------
// scene generation
// ---------------------------------------------------------------------------

/// Everything a synthetic capture produces.
#[derive(Debug, Clone)]
pub struct SceneData {
    pub trajectory: PoseSequence,
    pub imu: ImuStream,
    pub masks: Vec<SilhouetteMask>,
    pub skeleton_motion: SkeletonMotion,
    pub skeleton: SkeletonModel,
    pub camera: Camera,
    pub mesh: TriMesh,
}

/// Hard-rasterizes the posed mesh: binary pixel-center-in-triangle union.
pub fn hard_rasterize(mesh: &TriMesh, pose: &RigidPose, cam: &Camera) -> SilhouetteMask {
    let k = cam.intrinsics();
    let (fx, fy, cx, cy) = (k[(0, 0)], k[(1, 1)], k[(0, 2)], k[(1, 2)]);
    let (w, h) = (cam.width(), cam.height());
    let mut values = vec![0.0; w * h];
    let proj: Vec<Option<[f64; 2]>> = mesh
        .vertices()
        .iter()
        .map(|v| {
            let c = cam.extrinsics().apply(&pose.apply(v));
            (c.z > 1e-6).then(|| [fx * c.x / c.z + cx, fy * c.y / c.z + cy])
        })
        .collect();
    for f in mesh.faces() {
        let (Some(a), Some(b), Some(c)) = (proj[f[0]], proj[f[1]], proj[f[2]]) else {
            continue;
        };
        let min_x = a[0].min(b[0]).min(c[0]).floor().max(0.0) as usize;
        let max_x = (a[0].max(b[0]).max(c[0]).ceil() as usize).min(w.saturating_sub(1));
        let min_y = a[1].min(b[1]).min(c[1]).floor().max(0.0) as usize;
        let max_y = (a[1].max(b[1]).max(c[1]).ceil() as usize).min(h.saturating_sub(1));
        if min_x > max_x || min_y > max_y {
            continue;
        }
        for y in min_y..=max_y {
            for x in min_x..=max_x {
                if values[y * w + x] == 1.0 {
                    continue;
                }
                let (px, py) = (x as f64 + 0.5, y as f64 + 0.5);
                let cross =
                    |o: [f64; 2], e: [f64; 2]| (e[0] - o[0]) * (py - o[1]) - (e[1] - o[1]) * (px - o[0]);
                let e0 = cross(a, b);
                let e1 = cross(b, c);
                let e2 = cross(c, a);
                if (e0 >= 0.0 && e1 >= 0.0 && e2 >= 0.0) || (e0 <= 0.0 && e1 <= 0.0 && e2 <= 0.0) {
                    values[y * w + x] = 1.0;
                }
            }
        }
    }
    SilhouetteMask::from_values(w, h, values).expect("values in range")
}

/// Generates the full synthetic capture for `cfg`. Fully deterministic:
/// identical configs (including seed) produce identical outputs.
pub fn generate_scene(cfg: &SceneConfig) -> Result<SceneData> {
    if cfg.scene.fps <= 0.0 || !cfg.scene.fps.is_finite() {
        return Err(config_err("scene.fps", "must be positive"));
    }
    if cfg.scene.duration_s <= 0.0 || !cfg.scene.duration_s.is_finite() {
        return Err(config_err("scene.duration_s", "must be positive"));
    }
    cfg.scene.trajectory.validate()?;
    let frames = (cfg.scene.duration_s * cfg.scene.fps).round() as usize;
    if frames < 2 {
        return Err(config_err(
            "scene.duration_s",
            "duration times fps must give at least 2 frames",
        ));
    }
    for w in &cfg.scene.occlusion {
        if w.start >= w.end || w.end > frames {
            return Err(config_err(
                "scene.occlusion",
                format!("window [{}, {}) outside 0..{frames}", w.start, w.end),
            ));
        }
    }
    if !(0.0..=1.0).contains(&cfg.scene.noise.mask_flip_prob) {
        return Err(config_err(
            "scene.noise.mask_flip_prob",
            "must lie in [0, 1]",
        ));
    }
    let mesh = TriMesh::load_obj(&cfg.scene.mesh)
        .map_err(|e| config_err("scene.mesh", format!("{}: {e}", cfg.scene.mesh)))?;
    let skeleton = match &cfg.scene.skeleton {
        Some(path) => SkeletonModel::load_json(path)?,
        None => SkeletonModel::default_52(),
    };
    if cfg.scene.attachment.joint >= skeleton.joint_count() {
        return Err(config_err(
            "scene.attachment.joint",
            format!(
                "joint {} out of range for {}-joint skeleton",
                cfg.scene.attachment.joint,
                skeleton.joint_count()
            ),
        ));
    }
    let camera = cfg.camera.to_camera()?;

    let tau = 1.0 / cfg.scene.fps;
    let poses: Vec<RigidPose> = (0..frames)
        .map(|k| cfg.scene.trajectory.pose_at(k as f64 * tau))
        .collect::<Result<_>>()?;
    let trajectory = PoseSequence::new(poses, tau)?;

    // IMU stream, with exact analytic acceleration when the kind admits it
    let analytic: Option<Vec<Vec3>> = (0..frames)
        .map(|k| cfg.scene.trajectory.analytic_acceleration(k as f64 * tau))
        .collect();
    let imu_noise = ImuNoise {
        rotation_deg: cfg.scene.noise.imu_rotation_deg,
        acceleration_sigma: cfg.scene.noise.imu_acceleration_sigma,
    };
    let mut imu = simulate_imu_with(
        &trajectory,
        cfg.imu.smoothing,
        &imu_noise,
        cfg.seed ^ 0x1331,
        analytic.as_deref(),
    )?;
    if let Some(rot) = &cfg.imu.frame_rotation {
        // store orientations in the sensor's own inertial frame
        let t_iw = RotMatrix::from_row_major(rot)?;
        imu = imu.aligned(&t_iw.transpose());
    }

    // target masks: hard rasterization, occlusion blanking, boundary noise
    let mut masks: Vec<SilhouetteMask> = trajectory
        .iter()
        .map(|pose| hard_rasterize(&mesh, pose, &camera))
        .collect();
    for w in &cfg.scene.occlusion {
        for mask in masks.iter_mut().take(w.end).skip(w.start) {
            *mask = SilhouetteMask::zeros(camera.width(), camera.height());
        }
    }
    if cfg.scene.noise.mask_boundary_px > 0 && cfg.scene.noise.mask_flip_prob > 0.0 {
        for (idx, mask) in masks.iter_mut().enumerate() {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ (0x9e37 + idx as u64));
            flip_boundary_pixels(
                mask,
                cfg.scene.noise.mask_boundary_px,
                cfg.scene.noise.mask_flip_prob,
                &mut rng,
            );
        }
    }

    let skeleton_motion = scripted_skeleton_motion(
        &skeleton,
        &trajectory,
        cfg.scene.attachment.joint,
        Vec3::from(cfg.scene.attachment.offset),
        cfg.seed ^ 0x5ce1,
    )?;

    Ok(SceneData {
        trajectory,
        imu,
        masks,
        skeleton_motion,
        skeleton,
        camera,
        mesh,
    })
}

/// Scripted sinusoidal joint-angle curves with the root translation solved
/// so the attachment joint rigidly tracks the object.
fn scripted_skeleton_motion(
    skel: &SkeletonModel,
    trajectory: &PoseSequence,
    attach_joint: usize,
    attach_offset: Vec3,
    seed: u64,
) -> Result<SkeletonMotion> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nj = skel.joint_count();
    struct Curve {
        axis: Vec3,
        amplitude: f64,
        frequency: f64,
        phase: f64,
    }
    let curves: Vec<Curve> = (0..nj)
        .map(|j| {
            let axis = loop {
                let v = Vec3::new(
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                );
                if v.norm() > 1e-3 {
                    break v.normalize();
                }
            };
            Curve {
                axis,
                amplitude: if j < BODY_JOINT_COUNT { 0.15 } else { 0.25 },
                frequency: rng.gen_range(0.2..0.8) * std::f64::consts::TAU,
                phase: rng.gen_range(0.0..std::f64::consts::TAU),
            }
        })
        .collect();

    let tau = trajectory.frame_interval();
    let mut root = Vec::with_capacity(trajectory.len());
    let mut rotations = Vec::with_capacity(trajectory.len());
    for k in 0..trajectory.len() {
        let t = k as f64 * tau;
        let rots: Vec<RotMatrix> = curves
            .iter()
            .map(|c| {
                RotMatrix::from_axis_angle(&c.axis, c.amplitude * (c.frequency * t + c.phase).sin())
            })
            .collect();
        let root_rotation = RotMatrix::from_axis_angle(
            &Vec3::z(),
            0.1 * (std::f64::consts::TAU * 0.1 * t).sin(),
        );
        // place the root so the attachment joint lands on the object
        let probe = RigidPose::new(root_rotation, Vec3::zeros());
        let positions = forward_kinematics(skel, &probe, &rots)?;
        let target = trajectory.frame(k).translation - attach_offset;
        let root_translation = target - positions[attach_joint];
        root.push(RigidPose::new(root_rotation, root_translation));
        rotations.push(rots.iter().map(|r| r.to_rot6d()).collect());
    }
    Ok(SkeletonMotion {
        frame_interval: tau,
        root,
        rotations,
    })
}

/// Flips pixels within `band` pixels (Chebyshev) of the mask boundary with
/// probability `prob`, mimicking segmentation error.
fn flip_boundary_pixels(
    mask: &mut SilhouetteMask,
    band: usize,
    prob: f64,
    rng: &mut ChaCha8Rng,
) {
    let (w, h) = (mask.width(), mask.height());
    let orig: Vec<bool> = mask.values().iter().map(|&v| v > 0.5).collect();
    let in_band = |x: usize, y: usize| -> bool {
        let v = orig[y * w + x];
        let b = band as i64;
        for dy in -b..=b {
            for dx in -b..=b {
                let nx = x as i64 + dx;
                let ny = y as i64 + dy;
                if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                    continue;
                }
                if orig[ny as usize * w + nx as usize] != v {
                    return true;
                }
            }
        }
        false
    };
    for y in 0..h {
        for x in 0..w {
            if in_band(x, y) && rng.gen_range(0.0..1.0) < prob {
                let v = mask.get(x, y);
                mask.set(x, y, 1.0 - v);
            }
        }
    }
}

/// Writes a scene's artifacts into `dir`: `trajectory.json`, `imu.csv`,
/// `camera.json`, `skeleton.json` (model), `skeleton_motion.json`, and
/// numbered mask PNGs under `masks/`.
pub fn write_scene(dir: impl AsRef<Path>, data: &SceneData) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir.join("masks"))?;
    save_trajectory(dir.join("trajectory.json"), &data.trajectory)?;
    data.imu.save_csv(dir.join("imu.csv"))?;
    data.camera.save_json(dir.join("camera.json"))?;
    data.skeleton.save_json(dir.join("skeleton.json"))?;
    data.skeleton_motion
        .save_json(dir.join("skeleton_motion.json"))?;
    for (k, mask) in data.masks.iter().enumerate() {
        mask.save_png(dir.join("masks").join(format!("{k:06}.png")))?;
    }
    data.mesh.save_obj(dir.join("object.obj"))?;
    Ok(())
}
