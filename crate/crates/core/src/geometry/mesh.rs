//! Triangle meshes with Wavefront OBJ load/save.

use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use super::{GeometryError, Result, RigidPose, Vec3};

/// Minimum triangle area accepted at load time (square meters).
const MIN_FACE_AREA: f64 = 1e-14;

/// An indexed triangle mesh. Vertices are meters.
#[derive(Debug, Clone, PartialEq)]
pub struct TriMesh {
    vertices: Vec<Vec3>,
    faces: Vec<[usize; 3]>,
}

impl TriMesh {
    /// Validates indices, face count, and that no face is degenerate.
    pub fn new(vertices: Vec<Vec3>, faces: Vec<[usize; 3]>) -> Result<TriMesh> {
        if faces.is_empty() {
            return Err(GeometryError::InvalidMesh("mesh has no faces".into()));
        }
        if let Some(v) = vertices.iter().find(|v| !v.iter().all(|c| c.is_finite())) {
            return Err(GeometryError::InvalidMesh(format!(
                "non-finite vertex {v:?}"
            )));
        }
        for (i, f) in faces.iter().enumerate() {
            for &idx in f {
                if idx >= vertices.len() {
                    return Err(GeometryError::InvalidMesh(format!(
                        "face {i} references vertex {idx} but mesh has {}",
                        vertices.len()
                    )));
                }
            }
            let area = triangle_area(&vertices[f[0]], &vertices[f[1]], &vertices[f[2]]);
            if area < MIN_FACE_AREA {
                return Err(GeometryError::InvalidMesh(format!(
                    "face {i} is degenerate (area {area:.3e})"
                )));
            }
        }
        Ok(TriMesh { vertices, faces })
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn face_vertices(&self, face: usize) -> [Vec3; 3] {
        let f = self.faces[face];
        [self.vertices[f[0]], self.vertices[f[1]], self.vertices[f[2]]]
    }

    pub fn face_areas(&self) -> Vec<f64> {
        self.faces
            .iter()
            .map(|f| triangle_area(&self.vertices[f[0]], &self.vertices[f[1]], &self.vertices[f[2]]))
            .collect()
    }

    pub fn surface_area(&self) -> f64 {
        self.face_areas().iter().sum()
    }

    /// The mesh with every vertex transformed by `pose`.
    pub fn transformed(&self, pose: &RigidPose) -> TriMesh {
        TriMesh {
            vertices: self.vertices.iter().map(|v| pose.apply(v)).collect(),
            faces: self.faces.clone(),
        }
    }

    pub fn centroid(&self) -> Vec3 {
        let sum: Vec3 = self.vertices.iter().sum();
        sum / self.vertices.len() as f64
    }

    /// Loads `v`/`f` records from a Wavefront OBJ; normals and UVs are
    /// ignored, polygons are fan-triangulated, indices are 1-based.
    pub fn load_obj(path: impl AsRef<Path>) -> Result<TriMesh> {
        let file = std::fs::File::open(path)?;
        Self::read_obj(BufReader::new(file))
    }

    pub fn read_obj(reader: impl BufRead) -> Result<TriMesh> {
        let mut vertices = Vec::new();
        let mut faces = Vec::new();
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            let mut parts = line.split_whitespace();
            match parts.next() {
                Some("v") => {
                    let mut coords = [0.0; 3];
                    for c in &mut coords {
                        let tok = parts.next().ok_or_else(|| GeometryError::ObjParse {
                            line: lineno + 1,
                            msg: "vertex needs 3 coordinates".into(),
                        })?;
                        *c = tok.parse().map_err(|_| GeometryError::ObjParse {
                            line: lineno + 1,
                            msg: format!("bad coordinate {tok:?}"),
                        })?;
                    }
                    vertices.push(Vec3::new(coords[0], coords[1], coords[2]));
                }
                Some("f") => {
                    let idx: Vec<usize> = parts
                        .map(|tok| {
                            let first = tok.split('/').next().unwrap_or("");
                            let v: i64 = first.parse().map_err(|_| GeometryError::ObjParse {
                                line: lineno + 1,
                                msg: format!("bad face index {tok:?}"),
                            })?;
                            if v < 1 {
                                return Err(GeometryError::ObjParse {
                                    line: lineno + 1,
                                    msg: format!("face index must be positive, got {v}"),
                                });
                            }
                            Ok(v as usize - 1)
                        })
                        .collect::<Result<_>>()?;
                    if idx.len() < 3 {
                        return Err(GeometryError::ObjParse {
                            line: lineno + 1,
                            msg: "face needs at least 3 vertices".into(),
                        });
                    }
                    for i in 1..idx.len() - 1 {
                        faces.push([idx[0], idx[i], idx[i + 1]]);
                    }
                }
                _ => {} // comments, normals, groups, materials
            }
        }
        TriMesh::new(vertices, faces)
    }

    pub fn save_obj(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        for v in &self.vertices {
            writeln!(out, "v {} {} {}", v.x, v.y, v.z)?;
        }
        for f in &self.faces {
            writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1)?;
        }
        Ok(())
    }
}

pub(crate) fn triangle_area(a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    0.5 * (b - a).cross(&(c - a)).norm()
}
