//! Triangle-mesh object library: a bundled set of procedurally built
//! everyday-object meshes (stand-ins for a downloaded 3D dataset), OBJ
//! import/export, and content-hash references for scene files.

use std::path::Path;

use sha2::{Digest, Sha256};

use super::SceneError;
use crate::{Point3, Real, TriMesh};

/// One library entry, addressable by its content hash.
#[derive(Debug, Clone)]
pub struct MeshEntry {
    pub name: String,
    pub mesh: TriMesh,
    pub hash: String,
}

#[derive(Debug, Clone, Default)]
pub struct MeshLibrary {
    entries: Vec<MeshEntry>,
}

impl MeshLibrary {
    pub fn empty() -> Self {
        Self::default()
    }

    /// The bundled procedural object set (~20 everyday shapes).
    pub fn builtin() -> Self {
        let mut lib = Self::default();
        for (name, mesh) in builtin_meshes() {
            lib.insert(name, mesh);
        }
        lib
    }

    /// Loads every `.obj` file in a directory (sorted by file name).
    pub fn from_dir(dir: &Path) -> Result<Self, SceneError> {
        let mut files: Vec<_> = std::fs::read_dir(dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|e| e.eq_ignore_ascii_case("obj")))
            .collect();
        files.sort();
        let mut lib = Self::default();
        for path in files {
            let name = path.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
            let mesh = load_obj(&std::fs::read_to_string(&path)?)?;
            lib.insert(name, mesh);
        }
        Ok(lib)
    }

    pub fn insert(&mut self, name: impl Into<String>, mesh: TriMesh) {
        let hash = content_hash(&mesh);
        self.entries.push(MeshEntry { name: name.into(), mesh, hash });
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[MeshEntry] {
        &self.entries
    }

    pub fn by_hash(&self, hash: &str) -> Option<&MeshEntry> {
        self.entries.iter().find(|e| e.hash == hash)
    }
}

/// SHA-256 over the canonical little-endian vertex and face bytes.
pub fn content_hash(mesh: &TriMesh) -> String {
    let mut hasher = Sha256::new();
    for v in &mesh.vertices {
        for i in 0..3 {
            hasher.update(v[i].to_le_bytes());
        }
    }
    for f in &mesh.faces {
        for idx in f {
            hasher.update(idx.to_le_bytes());
        }
    }
    let digest = hasher.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

/// Minimal OBJ reader: `v` and `f` records, faces fan-triangulated,
/// `v/vt/vn` index syntax accepted.
pub fn load_obj(text: &str) -> Result<TriMesh, SceneError> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let mut it = line.split_whitespace();
        match it.next() {
            Some("v") => {
                let mut coords = [0.0f64; 3];
                for c in &mut coords {
                    *c = it
                        .next()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| SceneError::MeshFormat(format!("bad vertex at line {}", lineno + 1)))?;
                }
                vertices.push(Point3::new(coords[0], coords[1], coords[2]));
            }
            Some("f") => {
                let idx: Result<Vec<u32>, _> = it
                    .map(|t| {
                        t.split('/')
                            .next()
                            .and_then(|s| s.parse::<i64>().ok())
                            .filter(|&i| i > 0)
                            .map(|i| (i - 1) as u32)
                            .ok_or_else(|| {
                                SceneError::MeshFormat(format!("bad face at line {}", lineno + 1))
                            })
                    })
                    .collect();
                let idx = idx?;
                if idx.len() < 3 {
                    return Err(SceneError::MeshFormat(format!("face with <3 vertices at line {}", lineno + 1)));
                }
                for k in 1..idx.len() - 1 {
                    faces.push([idx[0], idx[k], idx[k + 1]]);
                }
            }
            _ => {}
        }
    }
    if vertices.is_empty() || faces.is_empty() {
        return Err(SceneError::MeshFormat("mesh has no geometry".into()));
    }
    let n = vertices.len() as u32;
    if faces.iter().flatten().any(|&i| i >= n) {
        return Err(SceneError::MeshFormat("face index out of bounds".into()));
    }
    Ok(TriMesh { vertices, faces })
}

pub fn save_obj(mesh: &TriMesh) -> String {
    let mut out = String::new();
    for v in &mesh.vertices {
        out.push_str(&format!("v {} {} {}\n", v.x, v.y, v.z));
    }
    for f in &mesh.faces {
        out.push_str(&format!("f {} {} {}\n", f[0] + 1, f[1] + 1, f[2] + 1));
    }
    out
}

// ---------------------------------------------------------------------------
// Procedural builders
// ---------------------------------------------------------------------------

fn box_mesh(hx: Real, hy: Real, hz: Real) -> TriMesh {
    let vertices = (0..8)
        .map(|k| {
            Point3::new(
                if k & 1 == 0 { -hx } else { hx },
                if k & 2 == 0 { -hy } else { hy },
                if k & 4 == 0 { -hz } else { hz },
            )
        })
        .collect();
    let faces = vec![
        [0, 2, 3],
        [0, 3, 1],
        [4, 5, 7],
        [4, 7, 6],
        [0, 1, 5],
        [0, 5, 4],
        [2, 6, 7],
        [2, 7, 3],
        [0, 4, 6],
        [0, 6, 2],
        [1, 3, 7],
        [1, 7, 5],
    ];
    TriMesh { vertices, faces }
}

/// Surface of revolution about z from a profile of (radius, z) pairs.
/// Zero-radius profile points become poles.
fn lathe(profile: &[(Real, Real)], segments: usize) -> TriMesh {
    let mut vertices: Vec<Point3> = Vec::new();
    let mut rings: Vec<Option<(usize, usize)>> = Vec::new(); // (start, len) per profile row
    let mut poles: Vec<Option<usize>> = Vec::new();

    for &(r, z) in profile {
        if r <= 1e-9 {
            poles.push(Some(vertices.len()));
            rings.push(None);
            vertices.push(Point3::new(0.0, 0.0, z));
        } else {
            let start = vertices.len();
            for s in 0..segments {
                let a = 2.0 * std::f64::consts::PI * s as Real / segments as Real;
                vertices.push(Point3::new(r * a.cos(), r * a.sin(), z));
            }
            rings.push(Some((start, segments)));
            poles.push(None);
        }
    }

    let mut faces = Vec::new();
    for row in 0..profile.len() - 1 {
        match (rings[row], rings[row + 1]) {
            (Some((a, n)), Some((b, _))) => {
                for s in 0..n {
                    let s1 = (s + 1) % n;
                    let (a0, a1) = ((a + s) as u32, (a + s1) as u32);
                    let (b0, b1) = ((b + s) as u32, (b + s1) as u32);
                    faces.push([a0, b0, b1]);
                    faces.push([a0, b1, a1]);
                }
            }
            (Some((a, n)), None) => {
                let pole = poles[row + 1].unwrap() as u32;
                for s in 0..n {
                    faces.push([(a + s) as u32, pole, (a + (s + 1) % n) as u32]);
                }
            }
            (None, Some((b, n))) => {
                let pole = poles[row].unwrap() as u32;
                for s in 0..n {
                    faces.push([pole, (b + s) as u32, (b + (s + 1) % n) as u32]);
                }
            }
            (None, None) => {}
        }
    }
    TriMesh { vertices, faces }
}

fn icosphere(radius: Real) -> TriMesh {
    let phi = (1.0 + 5.0_f64.sqrt()) / 2.0;
    let raw = [
        (-1.0, phi, 0.0),
        (1.0, phi, 0.0),
        (-1.0, -phi, 0.0),
        (1.0, -phi, 0.0),
        (0.0, -1.0, phi),
        (0.0, 1.0, phi),
        (0.0, -1.0, -phi),
        (0.0, 1.0, -phi),
        (phi, 0.0, -1.0),
        (phi, 0.0, 1.0),
        (-phi, 0.0, -1.0),
        (-phi, 0.0, 1.0),
    ];
    let vertices: Vec<Point3> = raw
        .iter()
        .map(|&(x, y, z)| {
            let n = (x * x + y * y + z * z).sqrt();
            Point3::new(radius * x / n, radius * y / n, radius * z / n)
        })
        .collect();
    let faces = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    TriMesh { vertices, faces }
}

fn torus(major: Real, minor: Real, seg_major: usize, seg_minor: usize) -> TriMesh {
    let mut vertices = Vec::with_capacity(seg_major * seg_minor);
    for i in 0..seg_major {
        let u = 2.0 * std::f64::consts::PI * i as Real / seg_major as Real;
        for j in 0..seg_minor {
            let v = 2.0 * std::f64::consts::PI * j as Real / seg_minor as Real;
            let r = major + minor * v.cos();
            vertices.push(Point3::new(r * u.cos(), r * u.sin(), minor * v.sin()));
        }
    }
    let mut faces = Vec::new();
    for i in 0..seg_major {
        for j in 0..seg_minor {
            let a = (i * seg_minor + j) as u32;
            let b = (((i + 1) % seg_major) * seg_minor + j) as u32;
            let c = (((i + 1) % seg_major) * seg_minor + (j + 1) % seg_minor) as u32;
            let d = (i * seg_minor + (j + 1) % seg_minor) as u32;
            faces.push([a, b, c]);
            faces.push([a, c, d]);
        }
    }
    TriMesh { vertices, faces }
}

/// The bundled object set. Dimensions are in meters before the per-scene
/// scale factor (0.2-0.4) is applied.
fn builtin_meshes() -> Vec<(&'static str, TriMesh)> {
    const SEG: usize = 16;
    vec![
        ("bowl", lathe(&[(0.0, 0.0), (0.25, 0.0), (0.42, 0.12), (0.45, 0.3), (0.38, 0.3), (0.33, 0.14), (0.2, 0.06), (0.0, 0.06)], SEG)),
        ("plate", lathe(&[(0.0, 0.0), (0.3, 0.0), (0.5, 0.06), (0.45, 0.08), (0.28, 0.03), (0.0, 0.03)], SEG)),
        ("cup", lathe(&[(0.0, 0.0), (0.18, 0.0), (0.23, 0.35), (0.19, 0.35), (0.15, 0.04), (0.0, 0.04)], SEG)),
        ("mug", lathe(&[(0.0, 0.0), (0.22, 0.0), (0.22, 0.32), (0.18, 0.32), (0.18, 0.04), (0.0, 0.04)], SEG)),
        ("bottle", lathe(&[(0.0, 0.0), (0.14, 0.0), (0.15, 0.35), (0.06, 0.48), (0.055, 0.62), (0.0, 0.62)], SEG)),
        ("jar", lathe(&[(0.0, 0.0), (0.2, 0.0), (0.22, 0.3), (0.16, 0.35), (0.17, 0.4), (0.0, 0.4)], SEG)),
        ("vase", lathe(&[(0.0, 0.0), (0.16, 0.0), (0.26, 0.14), (0.1, 0.38), (0.16, 0.55), (0.0, 0.55)], SEG)),
        ("pot", lathe(&[(0.0, 0.0), (0.3, 0.0), (0.32, 0.25), (0.36, 0.26), (0.3, 0.26), (0.28, 0.04), (0.0, 0.04)], SEG)),
        ("can", lathe(&[(0.0, 0.0), (0.12, 0.0), (0.12, 0.3), (0.0, 0.3)], SEG)),
        ("tumbler", lathe(&[(0.0, 0.0), (0.13, 0.0), (0.17, 0.4), (0.14, 0.4), (0.11, 0.04), (0.0, 0.04)], SEG)),
        ("pitcher", lathe(&[(0.0, 0.0), (0.2, 0.0), (0.26, 0.2), (0.14, 0.45), (0.17, 0.5), (0.0, 0.5)], SEG)),
        ("ball", icosphere(0.22)),
        ("block", box_mesh(0.15, 0.2, 0.25)),
        ("book", box_mesh(0.22, 0.15, 0.035)),
        ("tray", box_mesh(0.35, 0.25, 0.03)),
        ("pan", lathe(&[(0.0, 0.0), (0.34, 0.0), (0.38, 0.12), (0.34, 0.12), (0.31, 0.03), (0.0, 0.03)], SEG)),
        ("dome", lathe(&[(0.35, 0.0), (0.32, 0.15), (0.2, 0.28), (0.0, 0.33)], SEG)),
        ("ring", torus(0.28, 0.07, SEG, 10)),
        ("cone", lathe(&[(0.0, 0.0), (0.26, 0.0), (0.0, 0.5)], SEG)),
        ("bin", lathe(&[(0.0, 0.0), (0.26, 0.0), (0.32, 0.45), (0.28, 0.45), (0.23, 0.04), (0.0, 0.04)], SEG)),
    ]
}
