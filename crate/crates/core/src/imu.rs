//! Inertial measurement streams and the math that prepares them:
//! free-acceleration conversion, lever-arm normalization, temporal
//! synchronization, hand-eye spatial calibration, and synthetic IMU
//! simulation from ground-truth trajectories.

use std::io::{Read, Write};
use std::path::Path;

use nalgebra::{DMatrix, Matrix3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::geometry::{GeometryError, Mat3, PoseSequence, RotMatrix, Vec3};

/// Standard gravity in the global frame, m/s^2.
pub const GRAVITY: Vec3 = Vec3::new(0.0, 0.0, 9.81);

/// Raw-acceleration threshold (fraction of |g|) below which a sample is
/// treated as free fall during sync-event detection.
pub const FREE_FALL_FRACTION: f64 = 0.15;

#[derive(Debug, Error)]
pub enum ImuError {
    #[error("stream has no angular velocity but the operation requires it")]
    MissingAngularVelocity,
    #[error("too short: need at least {needed} samples, got {got}")]
    TooShort { needed: usize, got: usize },
    #[error("degenerate motion: rotation excitation insufficient to determine the frame transform")]
    DegenerateMotion,
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("invalid stream: {0}")]
    InvalidStream(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, ImuError>;

/// One inertial sample: orientation (sensor-to-global), raw sensor-frame
/// acceleration, and optional sensor-frame angular velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImuSample {
    pub timestamp: f64,
    pub rotation: RotMatrix,
    pub acceleration_raw: Vec3,
    pub angular_velocity: Option<Vec3>,
}

/// A time-ordered inertial stream.
#[derive(Debug, Clone, PartialEq)]
pub struct ImuStream {
    samples: Vec<ImuSample>,
    rate: f64,
}

impl ImuStream {
    pub fn new(samples: Vec<ImuSample>, rate: f64) -> Result<ImuStream> {
        if !(rate > 0.0) || !rate.is_finite() {
            return Err(ImuError::InvalidStream(format!(
                "rate must be positive, got {rate}"
            )));
        }
        for pair in samples.windows(2) {
            if pair[1].timestamp <= pair[0].timestamp {
                return Err(ImuError::InvalidStream(format!(
                    "timestamps not strictly increasing: {} then {}",
                    pair[0].timestamp, pair[1].timestamp
                )));
            }
        }
        for s in &samples {
            if !s.acceleration_raw.iter().all(|v| v.is_finite())
                || s
                    .angular_velocity
                    .is_some_and(|w| !w.iter().all(|v| v.is_finite()))
            {
                return Err(ImuError::InvalidStream("non-finite sample".into()));
            }
        }
        Ok(ImuStream { samples, rate })
    }

    pub fn samples(&self) -> &[ImuSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn rotations(&self) -> Vec<RotMatrix> {
        self.samples.iter().map(|s| s.rotation).collect()
    }

    /// Per-sample free acceleration under the default gravity constant.
    pub fn free_accelerations(&self) -> Vec<Vec3> {
        self.samples
            .iter()
            .map(|s| free_acceleration(s, &GRAVITY))
            .collect()
    }

    /// Applies a spatial calibration: every orientation becomes
    /// `transform * rotation`, mapping the IMU inertial frame into the world.
    pub fn aligned(&self, transform: &RotMatrix) -> ImuStream {
        let samples = self
            .samples
            .iter()
            .map(|s| ImuSample {
                rotation: *transform * s.rotation,
                ..*s
            })
            .collect();
        ImuStream {
            samples,
            rate: self.rate,
        }
    }

    /// CSV with header `t,r00,..,r22,ax,ay,az,wx,wy,wz` (rotation row-major);
    /// the three angular-velocity columns may be absent.
    pub fn write_csv(&self, writer: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["t".to_string()];
        for r in 0..3 {
            for c in 0..3 {
                header.push(format!("r{r}{c}"));
            }
        }
        let has_omega = self.samples.iter().any(|s| s.angular_velocity.is_some());
        header.extend(["ax", "ay", "az"].map(str::to_string));
        if has_omega {
            header.extend(["wx", "wy", "wz"].map(str::to_string));
        }
        w.write_record(&header)?;
        for s in &self.samples {
            let mut rec = vec![s.timestamp.to_string()];
            rec.extend(s.rotation.to_row_major().iter().map(f64::to_string));
            rec.extend(s.acceleration_raw.iter().map(f64::to_string));
            if has_omega {
                let omega = s.angular_velocity.unwrap_or_else(Vec3::zeros);
                rec.extend(omega.iter().map(f64::to_string));
            }
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }

    pub fn read_csv(reader: impl Read) -> Result<ImuStream> {
        let mut r = csv::Reader::from_reader(reader);
        let headers = r.headers()?.clone();
        let ncols = headers.len();
        if ncols != 13 && ncols != 16 {
            return Err(ImuError::InvalidStream(format!(
                "expected 13 or 16 columns, got {ncols}"
            )));
        }
        let mut samples = Vec::new();
        for record in r.records() {
            let record = record?;
            let f = |i: usize| -> Result<f64> {
                record
                    .get(i)
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| {
                        ImuError::InvalidStream(format!("bad field {i} in row {record:?}"))
                    })
            };
            let mut rot = [0.0; 9];
            for (i, v) in rot.iter_mut().enumerate() {
                *v = f(1 + i)?;
            }
            let rotation = RotMatrix::from_row_major(&rot)?;
            let acceleration_raw = Vec3::new(f(10)?, f(11)?, f(12)?);
            let angular_velocity = if ncols == 16 {
                Some(Vec3::new(f(13)?, f(14)?, f(15)?))
            } else {
                None
            };
            samples.push(ImuSample {
                timestamp: f(0)?,
                rotation,
                acceleration_raw,
                angular_velocity,
            });
        }
        if samples.len() < 2 {
            return Err(ImuError::TooShort {
                needed: 2,
                got: samples.len(),
            });
        }
        let span = samples.last().unwrap().timestamp - samples[0].timestamp;
        let rate = (samples.len() - 1) as f64 / span;
        ImuStream::new(samples, rate)
    }

    pub fn load_csv(path: impl AsRef<Path>) -> Result<ImuStream> {
        Self::read_csv(std::fs::File::open(path)?)
    }
}

/// Result of hand-eye spatial calibration between the IMU inertial frame and
/// the world frame, plus the temporal offset found by sync detection (zero
/// when only spatial calibration ran).
#[derive(Debug, Clone)]
pub struct CalibrationResult {
    pub transform: RotMatrix,
    /// Mean rotation-consistency error, radians.
    pub residual: f64,
    pub frame_offset: i64,
}

/// Global-frame free acceleration: `R_s * a_raw - g`.
pub fn free_acceleration(sample: &ImuSample, gravity: &Vec3) -> Vec3 {
    sample.rotation.rotate(&sample.acceleration_raw) - gravity
}

/// Removes the extra linear acceleration induced by a sensor mounted at
/// offset `r` from the body center: the rotational velocity of the mount
/// point is `w x r`; its finite-difference derivative, taken in the global
/// frame, is subtracted from the measurements. The first sample reuses the
/// second's backward difference.
pub fn normalize_lever_arm(stream: &ImuStream, offset: &Vec3) -> Result<ImuStream> {
    if stream.len() < 2 {
        return Err(ImuError::TooShort {
            needed: 2,
            got: stream.len(),
        });
    }
    let samples = stream.samples();
    let mut mount_velocity = Vec::with_capacity(samples.len());
    for s in samples {
        let omega = s.angular_velocity.ok_or(ImuError::MissingAngularVelocity)?;
        mount_velocity.push(s.rotation.rotate(&omega.cross(offset)));
    }
    let mut corrected = samples.to_vec();
    for t in 0..samples.len() {
        let (hi, lo) = if t == 0 { (1, 0) } else { (t, t - 1) };
        let dt = samples[hi].timestamp - samples[lo].timestamp;
        let delta_global = (mount_velocity[hi] - mount_velocity[lo]) / dt;
        let delta_sensor = samples[t].rotation.transpose().rotate(&delta_global);
        corrected[t].acceleration_raw -= delta_sensor;
    }
    ImuStream::new(corrected, stream.rate())
}

/// Outcome of temporal sync-event detection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SyncEvent {
    /// Sample index of the detected landing event.
    pub index: usize,
    /// False when no free-fall interval preceded the jerk maximum.
    pub confident: bool,
}

/// Finds the landing event after a takeoff move: the jerk maximum of free
/// acceleration following the longest interval of near-free-fall raw
/// magnitudes (`|a_raw| < 0.15 |g|`). Without any free-fall interval the
/// global jerk maximum is returned with `confident = false`.
pub fn detect_sync_event(stream: &ImuStream) -> Result<SyncEvent> {
    if stream.len() < 3 {
        return Err(ImuError::TooShort {
            needed: 3,
            got: stream.len(),
        });
    }
    let samples = stream.samples();
    let free = stream.free_accelerations();
    let mut jerk = vec![0.0; samples.len()];
    for t in 1..samples.len() {
        let dt = samples[t].timestamp - samples[t - 1].timestamp;
        jerk[t] = (free[t] - free[t - 1]).norm() / dt;
    }

    let threshold = FREE_FALL_FRACTION * GRAVITY.norm();
    let mut best_run: Option<(usize, usize)> = None; // [start, end] inclusive
    let mut run_start = None;
    for (i, s) in samples.iter().enumerate() {
        if s.acceleration_raw.norm() < threshold {
            run_start.get_or_insert(i);
        } else if let Some(start) = run_start.take() {
            let run = (start, i - 1);
            if best_run.is_none_or(|(bs, be)| run.1 - run.0 > be - bs) {
                best_run = Some(run);
            }
        }
    }
    if let Some(start) = run_start {
        let run = (start, samples.len() - 1);
        if best_run.is_none_or(|(bs, be)| run.1 - run.0 > be - bs) {
            best_run = Some(run);
        }
    }

    let argmax = |range: std::ops::Range<usize>| -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for t in range {
            if best.is_none_or(|(_, bj)| jerk[t] > bj) {
                best = Some((t, jerk[t]));
            }
        }
        best.map(|(t, _)| t)
    };

    if let Some((_, end)) = best_run {
        if let Some(index) = argmax(end + 1..samples.len()) {
            return Ok(SyncEvent {
                index,
                confident: true,
            });
        }
    }
    Ok(SyncEvent {
        index: argmax(0..samples.len()).expect("non-empty"),
        confident: false,
    })
}

/// Solves for the fixed rotation between the IMU inertial frame and the
/// world frame from paired orientation streams.
///
/// Relative motions over `stride` frames give, per t,
/// `A_t T + T B_t = 0` with `A_t = -R_t^W (R_{t+s}^W)^-1` and
/// `B_t = R_t^I (R_{t+s}^I)^-1`, a homogeneous Sylvester equation. The
/// stacked linear system `(I (x) A_t + B_t^T (x) I) vec(T) = 0` is solved by
/// SVD: the right singular vector of the smallest singular value, reshaped
/// and projected to SO(3) with determinant sign correction (which also
/// resolves the homogeneous scale ambiguity).
pub fn calibrate_spatial(
    world_rots: &[RotMatrix],
    imu_rots: &[RotMatrix],
    stride: usize,
) -> Result<CalibrationResult> {
    if world_rots.len() != imu_rots.len() {
        return Err(ImuError::LengthMismatch(world_rots.len(), imu_rots.len()));
    }
    let n = world_rots.len();
    if stride == 0 || n < stride + 2 {
        return Err(ImuError::TooShort {
            needed: stride + 2,
            got: n,
        });
    }
    let pairs = n - stride;
    let mut system = DMatrix::<f64>::zeros(9 * pairs, 9);
    let eye = Matrix3::<f64>::identity();
    let mut rel_world = Vec::with_capacity(pairs);
    let mut rel_imu = Vec::with_capacity(pairs);
    for t in 0..pairs {
        let rw = world_rots[t] * world_rots[t + stride].transpose();
        let ri = imu_rots[t] * imu_rots[t + stride].transpose();
        let a = -rw.as_matrix();
        let b = *ri.as_matrix();
        let block = eye.kronecker(&a) + b.transpose().kronecker(&eye);
        system.view_mut((9 * t, 0), (9, 9)).copy_from(&block);
        rel_world.push(rw);
        rel_imu.push(ri);
    }

    let svd = system.svd(false, true);
    let v_t = svd
        .v_t
        .ok_or_else(|| ImuError::InvalidStream("svd failed".into()))?;
    let sv = &svd.singular_values;
    if sv[7] < 1e-6 * sv[0] {
        return Err(ImuError::DegenerateMotion);
    }
    // column-major reshape of the null vector
    let null = v_t.row(8).transpose();
    let mut m = Mat3::from_column_slice(null.as_slice());
    if m.determinant() < 0.0 {
        m = -m;
    }
    let transform = RotMatrix::project(&m)?;

    let residual = rel_world
        .iter()
        .zip(&rel_imu)
        .map(|(rw, ri)| (transform * *ri * transform.transpose()).angle_to(rw))
        .sum::<f64>()
        / pairs as f64;

    Ok(CalibrationResult {
        transform,
        residual,
        frame_offset: 0,
    })
}

/// Noise configuration for [`simulate_imu`].
#[derive(Debug, Clone, Copy, Default, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ImuNoise {
    /// Std-dev of the per-sample orientation perturbation, degrees.
    pub rotation_deg: f64,
    /// Std-dev of additive sensor-frame acceleration noise, m/s^2.
    pub acceleration_sigma: f64,
}

impl ImuNoise {
    pub fn none() -> ImuNoise {
        ImuNoise::default()
    }

    pub fn is_none(&self) -> bool {
        self.rotation_deg == 0.0 && self.acceleration_sigma == 0.0
    }
}

/// Simulates an object-mounted IMU from a ground-truth trajectory.
///
/// Accelerations come from the smoothed second difference
/// `a_t = (T_{t-n} + T_{t+n} - 2 T_t) / (n tau)^2`; the first and last `n`
/// frames replicate the nearest interior value. Reported orientations copy
/// the trajectory (optionally perturbed), while raw accelerations are formed
/// in the *true* sensor frame so orientation noise degrades downstream
/// free-acceleration recovery the way a real sensor would. Angular velocity
/// is populated from forward rotation differences.
pub fn simulate_imu(
    traj: &PoseSequence,
    smoothing: usize,
    noise: &ImuNoise,
    seed: u64,
) -> Result<ImuStream> {
    simulate_imu_with(traj, smoothing, noise, seed, None)
}

/// As [`simulate_imu`] but allowing exact analytic accelerations (global
/// frame, gravity-free) to replace the finite-difference approximation when
/// the trajectory kind admits them.
pub fn simulate_imu_with(
    traj: &PoseSequence,
    smoothing: usize,
    noise: &ImuNoise,
    seed: u64,
    analytic_accel: Option<&[Vec3]>,
) -> Result<ImuStream> {
    let frames = traj.len();
    let n = smoothing;
    if n == 0 || frames <= 2 * n {
        return Err(ImuError::TooShort {
            needed: 2 * n + 1,
            got: frames,
        });
    }
    if let Some(acc) = analytic_accel {
        if acc.len() != frames {
            return Err(ImuError::LengthMismatch(acc.len(), frames));
        }
    }
    let tau = traj.frame_interval();
    let denom = (n as f64 * tau) * (n as f64 * tau);

    let free_acc: Vec<Vec3> = match analytic_accel {
        Some(acc) => acc.to_vec(),
        None => (0..frames)
            .map(|t| {
                let tc = t.clamp(n, frames - 1 - n);
                (traj.frame(tc - n).translation + traj.frame(tc + n).translation
                    - 2.0 * traj.frame(tc).translation)
                    / denom
            })
            .collect(),
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = Vec::with_capacity(frames);
    for t in 0..frames {
        let true_rot = traj.frame(t).rotation;
        let reported_rot = if noise.rotation_deg > 0.0 {
            let axis = random_unit(&mut rng);
            let angle: f64 = <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng)
                * noise.rotation_deg.to_radians();
            RotMatrix::from_axis_angle(&axis, angle) * true_rot
        } else {
            true_rot
        };
        let mut raw = true_rot.transpose().rotate(&(free_acc[t] + GRAVITY));
        if noise.acceleration_sigma > 0.0 {
            for i in 0..3 {
                let e: f64 =
                    <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng);
                raw[i] += e * noise.acceleration_sigma;
            }
        }
        let omega_t = if t + 1 < frames { t } else { frames - 2 };
        let rel = traj.frame(omega_t).rotation.transpose() * traj.frame(omega_t + 1).rotation;
        let omega = log_rotation(&rel) / tau;
        samples.push(ImuSample {
            timestamp: t as f64 * tau,
            rotation: reported_rot,
            acceleration_raw: raw,
            angular_velocity: Some(omega),
        });
    }
    ImuStream::new(samples, 1.0 / tau)
}

/// Axis-angle vector of a rotation (so(3) logarithm).
pub fn log_rotation(r: &RotMatrix) -> Vec3 {
    let q = nalgebra::UnitQuaternion::from_rotation_matrix(
        &nalgebra::Rotation3::from_matrix_unchecked(*r.as_matrix()),
    );
    match q.axis_angle() {
        Some((axis, angle)) => axis.into_inner() * angle,
        None => Vec3::zeros(),
    }
}

fn random_unit(rng: &mut ChaCha8Rng) -> Vec3 {
    loop {
        let v = Vec3::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let n = v.norm();
        if n > 1e-3 && n <= 1.0 {
            return v / n;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::RigidPose;
    use approx::assert_relative_eq;

    #[test]
    fn rest_cancels_gravity() {
        let s = ImuSample {
            timestamp: 0.0,
            rotation: RotMatrix::IDENTITY,
            acceleration_raw: Vec3::new(0.0, 0.0, 9.81),
            angular_velocity: None,
        };
        assert_relative_eq!(free_acceleration(&s, &GRAVITY), Vec3::zeros(), epsilon = 1e-12);
    }

    #[test]
    fn free_fall_reads_minus_g() {
        let s = ImuSample {
            timestamp: 0.0,
            rotation: RotMatrix::IDENTITY,
            acceleration_raw: Vec3::zeros(),
            angular_velocity: None,
        };
        assert_relative_eq!(
            free_acceleration(&s, &GRAVITY),
            Vec3::new(0.0, 0.0, -9.81),
            epsilon = 1e-12
        );
    }

    #[test]
    fn tilted_sensor_matches_matrix_multiply() {
        let rot = RotMatrix::from_axis_angle(&Vec3::x(), std::f64::consts::FRAC_PI_2);
        let raw = Vec3::new(0.0, 9.81, 0.0);
        let s = ImuSample {
            timestamp: 0.0,
            rotation: rot,
            acceleration_raw: raw,
            angular_velocity: None,
        };
        let expected = rot.as_matrix() * raw - GRAVITY;
        assert_relative_eq!(free_acceleration(&s, &GRAVITY), expected, epsilon = 1e-12);
        assert_relative_eq!(expected, Vec3::zeros(), epsilon = 1e-12);
    }

    #[test]
    fn stationary_sensor_is_zero_for_any_orientation() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let rot = RotMatrix::from_axis_angle(&random_unit(&mut rng), rng.gen_range(-3.0..3.0));
            let s = ImuSample {
                timestamp: 0.0,
                rotation: rot,
                acceleration_raw: rot.transpose().rotate(&GRAVITY),
                angular_velocity: None,
            };
            assert!(free_acceleration(&s, &GRAVITY).norm() < 1e-9);
        }
    }

    /// Exact circular kinematics of a body spinning in place about its
    /// center, sensor mounted at `r` in the body frame.
    fn spinning_stream(omega: f64, r: Vec3, fps: f64, frames: usize) -> ImuStream {
        let omega_body = Vec3::new(0.0, 0.0, omega);
        let samples = (0..frames)
            .map(|k| {
                let t = k as f64 / fps;
                let rot = RotMatrix::from_axis_angle(&Vec3::z(), omega * t);
                // mount-point proper acceleration w x (w x r), global frame
                let a_global = rot.rotate(&omega_body.cross(&omega_body.cross(&r)));
                ImuSample {
                    timestamp: t,
                    rotation: rot,
                    acceleration_raw: rot.transpose().rotate(&(a_global + GRAVITY)),
                    angular_velocity: Some(omega_body),
                }
            })
            .collect();
        ImuStream::new(samples, fps).unwrap()
    }

    #[test]
    fn zero_lever_arm_is_identity() {
        let stream = spinning_stream(4.0, Vec3::new(0.3, 0.0, 0.0), 60.0, 50);
        let corrected = normalize_lever_arm(&stream, &Vec3::zeros()).unwrap();
        assert_eq!(stream, corrected);
    }

    #[test]
    fn spinning_body_center_acceleration_vanishes() {
        let omega = 4.0;
        let rho = 0.3;
        let r = Vec3::new(rho, 0.0, 0.0);
        let stream = spinning_stream(omega, r, 60.0, 120);
        let corrected = normalize_lever_arm(&stream, &r).unwrap();
        let centripetal = omega * omega * rho;
        for s in corrected.samples() {
            let residual = free_acceleration(s, &GRAVITY).norm();
            assert!(
                residual < 0.05 * centripetal,
                "residual {residual} vs bound {}",
                0.05 * centripetal
            );
        }
    }

    #[test]
    fn residual_shrinks_with_finer_timestep() {
        let omega = 4.0;
        let r = Vec3::new(0.25, 0.0, 0.0);
        let res = |fps: f64| -> f64 {
            let stream = spinning_stream(omega, r, fps, (fps / 2.0) as usize);
            let corrected = normalize_lever_arm(&stream, &r).unwrap();
            corrected
                .samples()
                .iter()
                .map(|s| free_acceleration(s, &GRAVITY).norm())
                .fold(0.0, f64::max)
        };
        let coarse = res(60.0);
        let fine = res(240.0);
        assert!(fine < coarse, "fine {fine} vs coarse {coarse}");
    }

    #[test]
    fn lever_arm_correction_is_linear_in_offset() {
        let stream = spinning_stream(3.0, Vec3::zeros(), 60.0, 40);
        let r1 = Vec3::new(0.1, -0.05, 0.2);
        let r2 = Vec3::new(-0.03, 0.12, 0.01);
        let c1 = normalize_lever_arm(&stream, &r1).unwrap();
        let c2 = normalize_lever_arm(&stream, &r2).unwrap();
        let c12 = normalize_lever_arm(&stream, &(r1 + r2)).unwrap();
        for t in 0..stream.len() {
            let d1 = c1.samples()[t].acceleration_raw - stream.samples()[t].acceleration_raw;
            let d2 = c2.samples()[t].acceleration_raw - stream.samples()[t].acceleration_raw;
            let d12 = c12.samples()[t].acceleration_raw - stream.samples()[t].acceleration_raw;
            assert_relative_eq!(d12, d1 + d2, epsilon = 1e-9);
        }
    }

    #[test]
    fn missing_angular_velocity_is_an_error() {
        let samples = (0..5)
            .map(|k| ImuSample {
                timestamp: k as f64 * 0.01,
                rotation: RotMatrix::IDENTITY,
                acceleration_raw: Vec3::zeros(),
                angular_velocity: None,
            })
            .collect();
        let stream = ImuStream::new(samples, 100.0).unwrap();
        assert!(matches!(
            normalize_lever_arm(&stream, &Vec3::x()),
            Err(ImuError::MissingAngularVelocity)
        ));
    }

    #[test]
    fn sync_event_on_synthetic_drop() {
        // 0.3 s of free fall at 100 Hz, then a 5 g landing spike.
        let fps = 100.0;
        let spike_at = 30;
        let samples: Vec<ImuSample> = (0..60)
            .map(|k| {
                let raw = if k < spike_at {
                    Vec3::zeros()
                } else if k == spike_at {
                    Vec3::new(0.0, 0.0, 5.0 * 9.81)
                } else {
                    Vec3::new(0.0, 0.0, 9.81)
                };
                ImuSample {
                    timestamp: k as f64 / fps,
                    rotation: RotMatrix::IDENTITY,
                    acceleration_raw: raw,
                    angular_velocity: None,
                }
            })
            .collect();
        let stream = ImuStream::new(samples, fps).unwrap();
        let event = detect_sync_event(&stream).unwrap();
        assert_eq!(event.index, spike_at);
        assert!(event.confident);
    }

    #[test]
    fn constant_stream_is_low_confidence_index_zero() {
        let samples: Vec<ImuSample> = (0..10)
            .map(|k| ImuSample {
                timestamp: k as f64 * 0.01,
                rotation: RotMatrix::IDENTITY,
                acceleration_raw: Vec3::new(0.0, 0.0, 9.81),
                angular_velocity: None,
            })
            .collect();
        let stream = ImuStream::new(samples, 100.0).unwrap();
        let event = detect_sync_event(&stream).unwrap();
        assert_eq!(event.index, 0);
        assert!(!event.confident);
    }

    #[test]
    fn spike_in_smooth_walk_is_found() {
        let fps = 60.0;
        let samples: Vec<ImuSample> = (0..60)
            .map(|k| {
                let t = k as f64 / fps;
                let mut raw = Vec3::new(
                    0.4 * (2.0 * t).sin(),
                    0.3 * (1.3 * t).cos(),
                    9.81 + 0.5 * (3.1 * t).sin(),
                );
                if k == 17 {
                    raw += Vec3::new(30.0, 0.0, 0.0);
                }
                ImuSample {
                    timestamp: t,
                    rotation: RotMatrix::IDENTITY,
                    acceleration_raw: raw,
                    angular_velocity: None,
                }
            })
            .collect();
        let stream = ImuStream::new(samples, fps).unwrap();
        let event = detect_sync_event(&stream).unwrap();
        assert_eq!(event.index, 17);
    }

    #[test]
    fn too_short_stream_is_rejected() {
        let samples: Vec<ImuSample> = (0..2)
            .map(|k| ImuSample {
                timestamp: k as f64,
                rotation: RotMatrix::IDENTITY,
                acceleration_raw: Vec3::zeros(),
                angular_velocity: None,
            })
            .collect();
        let stream = ImuStream::new(samples, 1.0).unwrap();
        assert!(matches!(
            detect_sync_event(&stream),
            Err(ImuError::TooShort { .. })
        ));
    }

    /// Excited world rotations: a random walk visiting many axes.
    fn excited_rotations(rng: &mut ChaCha8Rng, n: usize) -> Vec<RotMatrix> {
        let mut rots = Vec::with_capacity(n);
        let mut current = RotMatrix::IDENTITY;
        for _ in 0..n {
            let axis = random_unit(rng);
            let angle = rng.gen_range(0.02..0.12);
            current = RotMatrix::from_axis_angle(&axis, angle) * current;
            rots.push(current);
        }
        rots
    }

    #[test]
    fn calibration_recovers_noiseless_transform() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let truth = RotMatrix::from_axis_angle(&random_unit(&mut rng), 1.234);
        let world = excited_rotations(&mut rng, 600);
        let imu: Vec<RotMatrix> = world.iter().map(|r| truth.transpose() * *r).collect();
        let calib = calibrate_spatial(&world, &imu, 5).unwrap();
        let err = calib.transform.angle_to(&truth);
        assert!(err < 1e-6, "geodesic error {err}");
        assert!(calib.residual < 1e-6);
    }

    #[test]
    fn single_axis_motion_is_degenerate() {
        let world: Vec<RotMatrix> = (0..100)
            .map(|k| RotMatrix::from_axis_angle(&Vec3::z(), 0.05 * k as f64))
            .collect();
        let truth = RotMatrix::from_axis_angle(&Vec3::new(1.0, 1.0, 0.0), 0.8);
        let imu: Vec<RotMatrix> = world.iter().map(|r| truth.transpose() * *r).collect();
        assert!(matches!(
            calibrate_spatial(&world, &imu, 5),
            Err(ImuError::DegenerateMotion)
        ));
    }

    #[test]
    fn calibration_tolerates_half_degree_noise() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let truth = RotMatrix::from_axis_angle(&random_unit(&mut rng), -0.9);
        let world = excited_rotations(&mut rng, 600);
        let imu: Vec<RotMatrix> = world
            .iter()
            .map(|r| {
                let axis = random_unit(&mut rng);
                let angle: f64 =
                    <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng)
                        * 0.5f64.to_radians();
                RotMatrix::from_axis_angle(&axis, angle) * (truth.transpose() * *r)
            })
            .collect();
        let calib = calibrate_spatial(&world, &imu, 5).unwrap();
        let err = calib.transform.angle_to(&truth).to_degrees();
        assert!(err < 1.0, "error {err} deg");
    }

    #[test]
    fn calibration_residual_is_locally_optimal() {
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        let truth = RotMatrix::from_axis_angle(&random_unit(&mut rng), 0.6);
        let world = excited_rotations(&mut rng, 200);
        let imu: Vec<RotMatrix> = world
            .iter()
            .map(|r| {
                let axis = random_unit(&mut rng);
                RotMatrix::from_axis_angle(&axis, 0.01) * (truth.transpose() * *r)
            })
            .collect();
        let calib = calibrate_spatial(&world, &imu, 5).unwrap();
        let residual_of = |t: &RotMatrix| -> f64 {
            (0..world.len() - 5)
                .map(|k| {
                    let rw = world[k] * world[k + 5].transpose();
                    let ri = imu[k] * imu[k + 5].transpose();
                    (*t * ri * t.transpose()).angle_to(&rw)
                })
                .sum::<f64>()
                / (world.len() - 5) as f64
        };
        let own = residual_of(&calib.transform);
        for _ in 0..100 {
            let alt = RotMatrix::from_axis_angle(&random_unit(&mut rng), rng.gen_range(-3.0..3.0));
            assert!(residual_of(&alt) >= own);
        }
    }

    fn quadratic_trajectory(accel: Vec3, frames: usize, tau: f64) -> PoseSequence {
        let poses = (0..frames)
            .map(|k| {
                let t = k as f64 * tau;
                RigidPose::new(RotMatrix::IDENTITY, 0.5 * accel * t * t)
            })
            .collect();
        PoseSequence::new(poses, tau).unwrap()
    }

    #[test]
    fn constant_acceleration_is_recovered_exactly() {
        let accel = Vec3::new(0.3, -1.2, 0.7);
        let traj = quadratic_trajectory(accel, 40, 1.0 / 60.0);
        let stream = simulate_imu(&traj, 4, &ImuNoise::none(), 0).unwrap();
        for s in stream.samples() {
            assert_relative_eq!(free_acceleration(s, &GRAVITY), accel, epsilon = 1e-8);
        }
    }

    #[test]
    fn static_trajectory_has_zero_acceleration() {
        let poses = vec![RigidPose::IDENTITY; 30];
        let traj = PoseSequence::new(poses, 1.0 / 30.0).unwrap();
        let stream = simulate_imu(&traj, 4, &ImuNoise::none(), 0).unwrap();
        for s in stream.samples() {
            assert!(free_acceleration(s, &GRAVITY).norm() < 1e-9);
        }
    }

    #[test]
    fn smoothing_reduces_quantization_error_on_sinusoid() {
        let fps = 60.0;
        let tau = 1.0 / fps;
        let frames = 240;
        let freq = 2.0;
        let amp = 0.4;
        // quantized positions mimic mocap round-off
        let quantum = 5e-4;
        let poses: Vec<RigidPose> = (0..frames)
            .map(|k| {
                let t = k as f64 * tau;
                let x = amp * (freq * t).sin();
                let q = (x / quantum).round() * quantum;
                RigidPose::new(RotMatrix::IDENTITY, Vec3::new(q, 0.0, 0.0))
            })
            .collect();
        let traj = PoseSequence::new(poses, tau).unwrap();
        let err = |n: usize| -> f64 {
            let stream = simulate_imu(&traj, n, &ImuNoise::none(), 0).unwrap();
            stream
                .samples()
                .iter()
                .enumerate()
                .skip(8)
                .take(frames - 16)
                .map(|(k, s)| {
                    let t = k as f64 * tau;
                    let analytic = -amp * freq * freq * (freq * t).sin();
                    (free_acceleration(s, &GRAVITY).x - analytic).abs()
                })
                .fold(0.0, f64::max)
        };
        assert!(err(4) <= err(1), "n=4 err {} vs n=1 err {}", err(4), err(1));
    }

    #[test]
    fn double_integration_reproduces_quadratic() {
        let accel = Vec3::new(0.2, 0.05, -0.4);
        let tau = 1.0 / 30.0;
        let traj = quadratic_trajectory(accel, 50, tau);
        let stream = simulate_imu(&traj, 1, &ImuNoise::none(), 0).unwrap();
        let acc: Vec<Vec3> = stream.free_accelerations();
        let mut pos = traj.frame(0).translation;
        let mut vel = Vec3::zeros(); // true initial velocity
        for t in 0..traj.len() - 1 {
            pos += vel * tau + 0.5 * acc[t] * tau * tau;
            vel += acc[t] * tau;
            assert_relative_eq!(pos, traj.frame(t + 1).translation, epsilon = 1e-9);
        }
    }

    #[test]
    fn simulation_is_deterministic() {
        let traj = quadratic_trajectory(Vec3::x(), 30, 1.0 / 60.0);
        let noise = ImuNoise {
            rotation_deg: 1.0,
            acceleration_sigma: 0.05,
        };
        let a = simulate_imu(&traj, 4, &noise, 9).unwrap();
        let b = simulate_imu(&traj, 4, &noise, 9).unwrap();
        assert_eq!(a, b);
        let c = simulate_imu(&traj, 4, &noise, 10).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn too_short_trajectory_is_rejected() {
        let traj = quadratic_trajectory(Vec3::x(), 8, 1.0 / 60.0);
        assert!(matches!(
            simulate_imu(&traj, 4, &ImuNoise::none(), 0),
            Err(ImuError::TooShort { .. })
        ));
    }

    #[test]
    fn csv_round_trip_with_and_without_omega() {
        let traj = quadratic_trajectory(Vec3::new(0.1, 0.2, 0.3), 20, 1.0 / 60.0);
        let stream = simulate_imu(&traj, 2, &ImuNoise::none(), 0).unwrap();
        let mut buf = Vec::new();
        stream.write_csv(&mut buf).unwrap();
        let back = ImuStream::read_csv(buf.as_slice()).unwrap();
        assert_eq!(stream.len(), back.len());
        for (a, b) in stream.samples().iter().zip(back.samples()) {
            assert_eq!(a.timestamp, b.timestamp);
            assert_eq!(a.acceleration_raw, b.acceleration_raw);
            assert_eq!(a.angular_velocity, b.angular_velocity);
            assert_eq!(a.rotation.to_row_major(), b.rotation.to_row_major());
        }

        // stripped angular velocity still parses
        let no_omega: Vec<ImuSample> = stream
            .samples()
            .iter()
            .map(|s| ImuSample {
                angular_velocity: None,
                ..*s
            })
            .collect();
        let stream2 = ImuStream::new(no_omega, stream.rate()).unwrap();
        let mut buf2 = Vec::new();
        stream2.write_csv(&mut buf2).unwrap();
        let back2 = ImuStream::read_csv(buf2.as_slice()).unwrap();
        assert!(back2.samples().iter().all(|s| s.angular_velocity.is_none()));
    }
}
