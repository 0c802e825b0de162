//! Indexed meshes and deterministic Wavefront OBJ export.

use crate::geom::{fit_plane, Vec3};
use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("mesh face {face} references vertex {index} out of {count}")]
    IndexOutOfRange {
        face: usize,
        index: usize,
        count: usize,
    },
    #[error("face {face} is non-planar (residual {residual:.3e})")]
    NonPlanarFace { face: usize, residual: f64 },
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("malformed OBJ line {line}: {text}")]
    Parse { line: usize, text: String },
}

#[derive(Clone, Debug, Default)]
pub struct Mesh {
    pub vertices: Vec<Vec3>,
    pub faces: Vec<Vec<usize>>,
}

impl Mesh {
    pub fn new() -> Self {
        Mesh::default()
    }

    pub fn push_vertex(&mut self, v: Vec3) -> usize {
        self.vertices.push(v);
        self.vertices.len() - 1
    }

    pub fn push_face(&mut self, face: Vec<usize>) {
        self.faces.push(face);
    }

    /// Validate indices and per-face planarity (quads and larger).
    pub fn validate(&self, planarity_tol: f64) -> Result<(), MeshError> {
        for (fi, face) in self.faces.iter().enumerate() {
            for &ix in face {
                if ix >= self.vertices.len() {
                    return Err(MeshError::IndexOutOfRange {
                        face: fi,
                        index: ix,
                        count: self.vertices.len(),
                    });
                }
            }
            if face.len() > 3 {
                let pts: Vec<Vec3> = face.iter().map(|&i| self.vertices[i]).collect();
                let (_, residual) = fit_plane(&pts);
                if residual > planarity_tol {
                    return Err(MeshError::NonPlanarFace {
                        face: fi,
                        residual,
                    });
                }
            }
        }
        Ok(())
    }

    /// Serialize to the OBJ v/f subset. 17 significant digits so vertices
    /// round-trip bit-exactly; output is byte-deterministic.
    pub fn to_obj_string(&self) -> String {
        let mut out = String::new();
        for v in &self.vertices {
            writeln!(out, "v {:.16e} {:.16e} {:.16e}", v.x, v.y, v.z).unwrap();
        }
        for face in &self.faces {
            out.push('f');
            for &ix in face {
                write!(out, " {}", ix + 1).unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn write_obj(&self, path: &Path) -> Result<(), MeshError> {
        std::fs::write(path, self.to_obj_string()).map_err(|source| MeshError::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn parse_obj(text: &str) -> Result<Mesh, MeshError> {
        let mut mesh = Mesh::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            match parts.next() {
                Some("v") => {
                    let coord = |p: Option<&str>| -> Result<f64, MeshError> {
                        p.and_then(|s| s.parse().ok()).ok_or(MeshError::Parse {
                            line: ln + 1,
                            text: line.to_string(),
                        })
                    };
                    let x = coord(parts.next())?;
                    let y = coord(parts.next())?;
                    let z = coord(parts.next())?;
                    mesh.push_vertex(Vec3::new(x, y, z));
                }
                Some("f") => {
                    let mut face = Vec::new();
                    for p in parts {
                        let ix: usize =
                            p.split('/').next().and_then(|s| s.parse().ok()).ok_or(
                                MeshError::Parse {
                                    line: ln + 1,
                                    text: line.to_string(),
                                },
                            )?;
                        if ix == 0 {
                            return Err(MeshError::Parse {
                                line: ln + 1,
                                text: line.to_string(),
                            });
                        }
                        face.push(ix - 1);
                    }
                    mesh.push_face(face);
                }
                _ => {}
            }
        }
        Ok(mesh)
    }
}

/// Write a numbered OBJ sequence: frame_000.obj, frame_001.obj, ...
pub fn write_obj_sequence(meshes: &[Mesh], dir: &Path, stem: &str) -> Result<Vec<PathBuf>, MeshError> {
    let mut paths = Vec::with_capacity(meshes.len());
    for (i, m) in meshes.iter().enumerate() {
        let path = dir.join(format!("{stem}_{i:03}.obj"));
        m.write_obj(&path)?;
        paths.push(path);
    }
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_triangle_obj_shape() {
        let mut m = Mesh::new();
        m.push_vertex(Vec3::new(0.0, 0.0, 0.0));
        m.push_vertex(Vec3::new(1.0, 0.0, 0.0));
        m.push_vertex(Vec3::new(0.0, 1.0, 0.0));
        m.push_face(vec![0, 1, 2]);
        let text = m.to_obj_string();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[0].starts_with("v "));
        assert_eq!(lines[3], "f 1 2 3");
    }

    #[test]
    fn obj_round_trip_is_bit_exact() {
        let mut m = Mesh::new();
        m.push_vertex(Vec3::new(0.1 + 0.2, -1.0 / 3.0, 6.02e23));
        m.push_vertex(Vec3::new(f64::MIN_POSITIVE, -0.0, 1.0000000000000002));
        m.push_vertex(Vec3::new(3.14159, 2.0, -7.5e-12));
        m.push_face(vec![0, 1, 2]);
        let parsed = Mesh::parse_obj(&m.to_obj_string()).unwrap();
        for (a, b) in m.vertices.iter().zip(&parsed.vertices) {
            assert_eq!(a.x.to_bits(), b.x.to_bits());
            assert_eq!(a.y.to_bits(), b.y.to_bits());
            assert_eq!(a.z.to_bits(), b.z.to_bits());
        }
        assert_eq!(m.faces, parsed.faces);
    }

    #[test]
    fn validation_flags_bad_faces() {
        let mut m = Mesh::new();
        m.push_vertex(Vec3::ZERO);
        m.push_face(vec![0, 1]);
        assert!(matches!(
            m.validate(1e-9),
            Err(MeshError::IndexOutOfRange { .. })
        ));
        let mut m2 = Mesh::new();
        m2.push_vertex(Vec3::new(0.0, 0.0, 0.0));
        m2.push_vertex(Vec3::new(1.0, 0.0, 0.0));
        m2.push_vertex(Vec3::new(1.0, 1.0, 0.3));
        m2.push_vertex(Vec3::new(0.0, 1.0, 0.0));
        m2.push_face(vec![0, 1, 2, 3]);
        assert!(matches!(
            m2.validate(1e-9),
            Err(MeshError::NonPlanarFace { .. })
        ));
    }
}
