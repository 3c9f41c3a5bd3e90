//! Rigid poses and timed pose sequences.

use super::{GeometryError, Result, RotMatrix, Vec3};

/// A rigid transform: rotation followed by translation (meters).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidPose {
    pub rotation: RotMatrix,
    pub translation: Vec3,
}

impl RigidPose {
    pub const IDENTITY: RigidPose = RigidPose {
        rotation: RotMatrix::IDENTITY,
        translation: Vec3::new(0.0, 0.0, 0.0),
    };

    pub fn new(rotation: RotMatrix, translation: Vec3) -> RigidPose {
        RigidPose {
            rotation,
            translation,
        }
    }

    pub fn apply(&self, p: &Vec3) -> Vec3 {
        self.rotation.rotate(p) + self.translation
    }

    /// `self ∘ other`: applies `other` first.
    pub fn compose(&self, other: &RigidPose) -> RigidPose {
        RigidPose {
            rotation: self.rotation * other.rotation,
            translation: self.rotation.rotate(&other.translation) + self.translation,
        }
    }

    pub fn inverse(&self) -> RigidPose {
        let rt = self.rotation.transpose();
        RigidPose {
            rotation: rt,
            translation: -rt.rotate(&self.translation),
        }
    }
}

/// An ordered list of per-frame rigid poses with a fixed frame interval.
#[derive(Debug, Clone, PartialEq)]
pub struct PoseSequence {
    frames: Vec<RigidPose>,
    frame_interval: f64,
}

impl PoseSequence {
    pub fn new(frames: Vec<RigidPose>, frame_interval: f64) -> Result<PoseSequence> {
        if frames.is_empty() {
            return Err(GeometryError::DegenerateInput(
                "pose sequence needs at least one frame".into(),
            ));
        }
        if !(frame_interval > 0.0) || !frame_interval.is_finite() {
            return Err(GeometryError::DegenerateInput(format!(
                "frame interval must be positive and finite, got {frame_interval}"
            )));
        }
        Ok(PoseSequence {
            frames,
            frame_interval,
        })
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        false // by construction
    }

    /// Seconds between consecutive frames.
    pub fn frame_interval(&self) -> f64 {
        self.frame_interval
    }

    pub fn frame(&self, idx: usize) -> &RigidPose {
        &self.frames[idx]
    }

    pub fn frames(&self) -> &[RigidPose] {
        &self.frames
    }

    pub fn iter(&self) -> std::slice::Iter<'_, RigidPose> {
        self.frames.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn compose_then_inverse_is_identity() {
        let a = RigidPose::new(
            RotMatrix::from_axis_angle(&Vec3::new(1.0, 2.0, -0.5), 0.7),
            Vec3::new(0.1, -0.2, 0.3),
        );
        let p = Vec3::new(0.4, 0.5, 0.6);
        let q = a.inverse().apply(&a.apply(&p));
        assert_relative_eq!(q, p, epsilon = 1e-12);

        let b = RigidPose::new(RotMatrix::from_axis_angle(&Vec3::y(), -1.1), Vec3::x());
        let comp = a.compose(&b);
        assert_relative_eq!(comp.apply(&p), a.apply(&b.apply(&p)), epsilon = 1e-12);
    }

    #[test]
    fn sequence_rejects_bad_inputs() {
        assert!(PoseSequence::new(vec![], 1.0 / 30.0).is_err());
        assert!(PoseSequence::new(vec![RigidPose::IDENTITY], 0.0).is_err());
        assert!(PoseSequence::new(vec![RigidPose::IDENTITY], f64::NAN).is_err());
        assert!(PoseSequence::new(vec![RigidPose::IDENTITY], 1.0 / 60.0).is_ok());
    }
}
