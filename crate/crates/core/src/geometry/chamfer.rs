//! Symmetric Chamfer distance between point sets.

use super::{GeometryError, KdTree3, Result, Vec3};

/// Symmetric mean nearest-neighbor distance between two point sets,
/// reported in centimeters (inputs are meters):
/// `0.5 * (mean_a min_b |a-b| + mean_b min_a |b-a|) * 100`.
pub fn chamfer_distance(a: &[Vec3], b: &[Vec3]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(GeometryError::EmptySet);
    }
    let tree_b = KdTree3::build(b);
    let tree_a = KdTree3::build(a);
    let mean_ab: f64 = a
        .iter()
        .map(|p| tree_b.nearest(p).expect("non-empty").1)
        .sum::<f64>()
        / a.len() as f64;
    let mean_ba: f64 = b
        .iter()
        .map(|p| tree_a.nearest(p).expect("non-empty").1)
        .sum::<f64>()
        / b.len() as f64;
    Ok(0.5 * (mean_ab + mean_ba) * 100.0)
}
