//! Shared mathematical substrate: rotations, rigid transforms, triangle
//! meshes, surface sampling, Procrustes alignment, and Chamfer distance.
//!
//! Everything works in meters internally. Chamfer distances are reported in
//! centimeters because that is the unit of the evaluation boundary; nothing
//! else converts units.

mod chamfer;
mod kdtree;
mod mesh;
mod pose;
mod procrustes;
mod rotation;
mod sampling;

pub use chamfer::chamfer_distance;
pub use kdtree::KdTree3;
pub use mesh::TriMesh;
pub use pose::{PoseSequence, RigidPose};
pub use procrustes::{procrustes_align, Alignment};
pub use rotation::{Rot6D, RotMatrix};
pub use sampling::{sample_surface, sample_surface_detailed};

use thiserror::Error;

/// Errors from geometric operations.
#[derive(Debug, Error)]
pub enum GeometryError {
    /// Input does not span enough dimensions for the operation.
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    /// A point set was empty where at least one point is required.
    #[error("empty point set")]
    EmptySet,
    /// Mesh failed load-time validation.
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    /// Wavefront OBJ syntax error.
    #[error("obj parse error at line {line}: {msg}")]
    ObjParse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, GeometryError>;

/// Shared 3-vector alias; all positions and translations are meters.
pub type Vec3 = nalgebra::Vector3<f64>;
/// Shared 3x3 matrix alias.
pub type Mat3 = nalgebra::Matrix3<f64>;
