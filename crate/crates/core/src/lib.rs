//! Visual-inertial rigid-object motion capture toolkit.
//!
//! The crate is organized as a pipeline over synthetic captures with known
//! ground truth:
//!
//! - [`geometry`]: rotation representations, rigid transforms, meshes,
//!   Procrustes alignment, Chamfer distance.
//! - [`imu`]: inertial streams, free-acceleration conversion, temporal
//!   synchronization, hand-eye spatial calibration, lever-arm normalization,
//!   and synthetic IMU simulation.
//! - [`render`]: differentiable soft-silhouette rasterization and the
//!   silhouette / area losses with analytic pose gradients.
//! - [`simulate`]: synthetic scene generation (trajectories, masks, IMU,
//!   skeleton motion) and forward kinematics.
//! - [`optimize`]: silhouette+inertia energy minimization recovering an
//!   object pose sequence from masks and IMU measurements.
//! - [`diffusion`]: the over-parameterized interaction representation,
//!   forward noising, x0-prediction reverse process, regularized training,
//!   and refinement of tracked motion.
//! - [`eval`]: per-frame and sliding-window Chamfer metrics under holistic
//!   Procrustes alignment, plus report generation.

pub mod diffusion;
pub mod eval;
pub mod geometry;
pub mod imu;
pub mod optimize;
pub mod render;
pub mod simulate;
