//! Closed oriented triangle meshes in ℂP² and the flow's initial surfaces.
//!
//! Vertices are unit spinors (points of ℂP²); resolution r maps to an
//! icosphere subdivision level L = round(log2(r)) − 2, so halving/doubling r
//! halves/doubles the mesh spacing — the refinement studies rely on that.

use super::cp2::{normalize, AmbientCp2, Spinor, C64};
use std::collections::HashMap;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("resolution must be at least 8, got {0}")]
    ResolutionTooSmall(usize),
    #[error("mesh is not closed/oriented: edge ({0}, {1}) seen {2} times")]
    NotClosed(usize, usize, usize),
    #[error("perturbation amplitude {amplitude} loses the symplectic property: measured min cos α = {min_cos:.4}")]
    NotSymplectic { amplitude: f64, min_cos: f64 },
    #[error("torus moment parameters must be positive with s1 + s2 < 1, got ({0}, {1})")]
    BadTorusParams(f64, f64),
    #[error("snapshot parse error at line {line}: {what}")]
    SnapshotParse { line: usize, what: String },
    #[error("snapshot projector at vertex {0} violates the rank-1 constraint by {1:.3e}")]
    SnapshotProjector(usize, f64),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Cp2(#[from] super::cp2::Cp2Error),
}

/// Triangulated closed oriented surface with spinor vertices.
#[derive(Debug, Clone)]
pub struct SurfaceMesh {
    pub spinors: Vec<Spinor>,
    pub triangles: Vec<[usize; 3]>,
}

/// Static adjacency, built once per mesh topology.
#[derive(Debug, Clone)]
pub struct MeshTopology {
    pub vertex_tris: Vec<Vec<usize>>,
    pub one_ring: Vec<Vec<usize>>,
    pub two_ring: Vec<Vec<usize>>,
}

impl SurfaceMesh {
    pub fn vertex_count(&self) -> usize {
        self.spinors.len()
    }

    /// Check closedness and consistent orientation: every undirected edge in
    /// exactly two triangles, with opposite directions.
    pub fn validate_closed_oriented(&self) -> Result<(), MeshError> {
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for t in &self.triangles {
            for e in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                *directed.entry(e).or_insert(0) += 1;
            }
        }
        for (&(a, b), &n) in &directed {
            let m = directed.get(&(b, a)).copied().unwrap_or(0);
            if n != 1 || m != 1 {
                return Err(MeshError::NotClosed(a, b, n + m));
            }
        }
        Ok(())
    }

    pub fn topology(&self) -> MeshTopology {
        let nv = self.vertex_count();
        let mut vertex_tris = vec![Vec::new(); nv];
        let mut one_ring_sets: Vec<Vec<usize>> = vec![Vec::new(); nv];
        for (ti, t) in self.triangles.iter().enumerate() {
            for (a, b, c) in [(t[0], t[1], t[2]), (t[1], t[2], t[0]), (t[2], t[0], t[1])] {
                vertex_tris[a].push(ti);
                for n in [b, c] {
                    if !one_ring_sets[a].contains(&n) {
                        one_ring_sets[a].push(n);
                    }
                }
            }
        }
        let mut two_ring = vec![Vec::new(); nv];
        for v in 0..nv {
            let mut acc = one_ring_sets[v].clone();
            for &n in &one_ring_sets[v] {
                for &nn in &one_ring_sets[n] {
                    if nn != v && !acc.contains(&nn) {
                        acc.push(nn);
                    }
                }
            }
            acc.sort_unstable();
            two_ring[v] = acc;
        }
        for r in one_ring_sets.iter_mut() {
            r.sort_unstable();
        }
        MeshTopology {
            vertex_tris,
            one_ring: one_ring_sets,
            two_ring,
        }
    }

    /// Plain-text snapshot: projector entries row-major (re im pairs), then
    /// triangle index triples.
    pub fn write_snapshot(&self, ambient: &AmbientCp2) -> String {
        let mut out = String::new();
        out.push_str("kahler-mcf mesh v1\n");
        let _ = writeln!(out, "k {:.17e}", ambient.k);
        let _ = writeln!(out, "vertices {}", self.spinors.len());
        for z in &self.spinors {
            let p = ambient.projector(z);
            let mut first = true;
            for row in 0..3 {
                for col in 0..3 {
                    let e = p[(row, col)];
                    if !first {
                        out.push(' ');
                    }
                    let _ = write!(out, "{:.17e} {:.17e}", e.re, e.im);
                    first = false;
                }
            }
            out.push('\n');
        }
        let _ = writeln!(out, "triangles {}", self.triangles.len());
        for t in &self.triangles {
            let _ = writeln!(out, "{} {} {}", t[0], t[1], t[2]);
        }
        out
    }

    pub fn read_snapshot(text: &str) -> Result<(Self, AmbientCp2), MeshError> {
        let mut lines = text.lines().enumerate();
        let mut expect = |what: &str| -> Result<(usize, String), MeshError> {
            lines
                .next()
                .map(|(i, l)| (i + 1, l.to_string()))
                .ok_or_else(|| MeshError::SnapshotParse {
                    line: 0,
                    what: format!("unexpected end of file, wanted {what}"),
                })
        };
        let (line, header) = expect("header")?;
        if header.trim() != "kahler-mcf mesh v1" {
            return Err(MeshError::SnapshotParse {
                line,
                what: format!("bad header {header:?}"),
            });
        }
        let parse_kv = |line: usize, text: &str, key: &str| -> Result<f64, MeshError> {
            let mut it = text.split_whitespace();
            match (it.next(), it.next()) {
                (Some(k), Some(v)) if k == key => {
                    v.parse().map_err(|e| MeshError::SnapshotParse {
                        line,
                        what: format!("bad {key} value: {e}"),
                    })
                }
                _ => Err(MeshError::SnapshotParse {
                    line,
                    what: format!("expected `{key} <value>`"),
                }),
            }
        };
        let (line, ktext) = expect("k")?;
        let k = parse_kv(line, &ktext, "k")?;
        let ambient = AmbientCp2::new(k)?;
        let (line, vtext) = expect("vertices")?;
        let nv = parse_kv(line, &vtext, "vertices")? as usize;
        let mut spinors = Vec::with_capacity(nv);
        for vi in 0..nv {
            let (line, row) = expect("vertex row")?;
            let vals: Result<Vec<f64>, _> = row.split_whitespace().map(str::parse).collect();
            let vals = vals.map_err(|e| MeshError::SnapshotParse {
                line,
                what: format!("bad float: {e}"),
            })?;
            if vals.len() != 18 {
                return Err(MeshError::SnapshotParse {
                    line,
                    what: format!("expected 18 floats, got {}", vals.len()),
                });
            }
            let mut p = super::cp2::Herm::zeros();
            for row in 0..3 {
                for col in 0..3 {
                    let base = 2 * (3 * row + col);
                    p[(row, col)] = C64::new(vals[base], vals[base + 1]);
                }
            }
            let guess = Spinor::new(C64::new(1.0, 0.0), C64::new(0.5, 0.2), C64::new(0.1, 0.4));
            let z = ambient.retract(&p, &guess)?;
            let residual = {
                let diff = ambient.projector(&z) - p;
                let mut worst: f64 = 0.0;
                for i in 0..3 {
                    for jx in 0..3 {
                        worst = worst.max(diff[(i, jx)].norm());
                    }
                }
                worst
            };
            if residual > 1e-8 {
                return Err(MeshError::SnapshotProjector(vi, residual));
            }
            spinors.push(z);
        }
        let (line, ttext) = expect("triangles")?;
        let nt = parse_kv(line, &ttext, "triangles")? as usize;
        let mut triangles = Vec::with_capacity(nt);
        for _ in 0..nt {
            let (line, row) = expect("triangle row")?;
            let idx: Result<Vec<usize>, _> = row.split_whitespace().map(str::parse).collect();
            let idx = idx.map_err(|e| MeshError::SnapshotParse {
                line,
                what: format!("bad index: {e}"),
            })?;
            if idx.len() != 3 {
                return Err(MeshError::SnapshotParse {
                    line,
                    what: "expected 3 indices".into(),
                });
            }
            triangles.push([idx[0], idx[1], idx[2]]);
        }
        Ok((Self { spinors, triangles }, ambient))
    }
}

/// Icosphere on the unit 2-sphere: positions and outward-oriented faces.
fn icosphere(subdivisions: usize) -> (Vec<[f64; 3]>, Vec<[usize; 3]>) {
    let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
    let mut verts: Vec<[f64; 3]> = vec![
        [-1.0, phi, 0.0],
        [1.0, phi, 0.0],
        [-1.0, -phi, 0.0],
        [1.0, -phi, 0.0],
        [0.0, -1.0, phi],
        [0.0, 1.0, phi],
        [0.0, -1.0, -phi],
        [0.0, 1.0, -phi],
        [phi, 0.0, -1.0],
        [phi, 0.0, 1.0],
        [-phi, 0.0, -1.0],
        [-phi, 0.0, 1.0],
    ];
    for v in verts.iter_mut() {
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        *v = [v[0] / n, v[1] / n, v[2] / n];
    }
    let mut faces: Vec<[usize; 3]> = vec![
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
    for _ in 0..subdivisions {
        let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
        let mut new_faces = Vec::with_capacity(faces.len() * 4);
        for f in &faces {
            let mut mid = [0usize; 3];
            for e in 0..3 {
                let (a, b) = (f[e], f[(e + 1) % 3]);
                let key = (a.min(b), a.max(b));
                mid[e] = *midpoint.entry(key).or_insert_with(|| {
                    let va = verts[a];
                    let vb = verts[b];
                    let mut m = [
                        (va[0] + vb[0]) / 2.0,
                        (va[1] + vb[1]) / 2.0,
                        (va[2] + vb[2]) / 2.0,
                    ];
                    let n = (m[0] * m[0] + m[1] * m[1] + m[2] * m[2]).sqrt();
                    m = [m[0] / n, m[1] / n, m[2] / n];
                    verts.push(m);
                    verts.len() - 1
                });
            }
            new_faces.push([f[0], mid[0], mid[2]]);
            new_faces.push([f[1], mid[1], mid[0]]);
            new_faces.push([f[2], mid[2], mid[1]]);
            new_faces.push([mid[0], mid[1], mid[2]]);
        }
        faces = new_faces;
    }
    (verts, faces)
}

fn subdivision_level(resolution: usize) -> Result<usize, MeshError> {
    if resolution < 8 {
        return Err(MeshError::ResolutionTooSmall(resolution));
    }
    let level = (resolution as f64).log2().round() as i64 - 2;
    Ok(level.max(1) as usize)
}

/// Map a unit vector on S² to the projective line {\[z₀ : z₁ : 0\]}.
fn line_spinor(p: [f64; 3]) -> Spinor {
    let theta = p[2].clamp(-1.0, 1.0).acos();
    let phi = p[1].atan2(p[0]);
    Spinor::new(
        C64::new((theta / 2.0).cos(), 0.0),
        C64::from_polar((theta / 2.0).sin(), phi),
        C64::zero(),
    )
}

/// Geodesic mesh of the holomorphic line {\[z₀ : z₁ : 0\]}.
///
/// The spinor map is an isometry from the round sphere onto the line (up to
/// the 1/√k scale), so icosphere mesh quality carries over.
pub fn holomorphic_line(resolution: usize) -> Result<SurfaceMesh, MeshError> {
    let level = subdivision_level(resolution)?;
    let (verts, faces) = icosphere(level);
    let spinors = verts.into_iter().map(line_spinor).collect();
    let mesh = SurfaceMesh {
        spinors,
        triangles: faces,
    };
    mesh.validate_closed_oriented()?;
    Ok(mesh)
}

/// Transversal displacement field used by the perturbed fixture: two fixed
/// low-order harmonics on the parametrizing sphere.
fn perturbation_profile(p: [f64; 3]) -> C64 {
    let f1 = 0.8 * p[0] + 1.2 * p[1] * p[2];
    let f2 = 0.8 * p[1] + 1.2 * p[2] * p[0];
    C64::new(f1, f2)
}

/// Holomorphic line displaced transversally (towards the third coordinate
/// axis) by `amplitude`; amplitude 0 reproduces [`holomorphic_line`]
/// exactly. The measured minimum of cos α is the caller's responsibility to
/// check against its own threshold; construction only requires it stays
/// clearly symplectic.
pub fn perturbed_line(resolution: usize, amplitude: f64) -> Result<SurfaceMesh, MeshError> {
    let level = subdivision_level(resolution)?;
    let (verts, faces) = icosphere(level);
    let spinors = verts
        .iter()
        .map(|&p| {
            let base = line_spinor(p);
            let w = perturbation_profile(p) * C64::new(amplitude, 0.0);
            normalize(Spinor::new(base[0], base[1], w))
        })
        .collect();
    let mesh = SurfaceMesh {
        spinors,
        triangles: faces,
    };
    mesh.validate_closed_oriented()?;
    Ok(mesh)
}

/// Moment-map orbit torus {\[√s₁·e^{iu} : √s₂·e^{iv} : √(1−s₁−s₂)\]}.
///
/// These orbit tori are Lagrangian (cos α ≈ 0), so they exercise the mesh
/// and geometry machinery rather than the symplectic flow claims.
pub fn graph_torus(resolution: usize, s1: f64, s2: f64) -> Result<SurfaceMesh, MeshError> {
    if resolution < 8 {
        return Err(MeshError::ResolutionTooSmall(resolution));
    }
    if !(s1 > 0.0 && s2 > 0.0 && s1 + s2 < 1.0) {
        return Err(MeshError::BadTorusParams(s1, s2));
    }
    let n = resolution;
    let c3 = (1.0 - s1 - s2).sqrt();
    let mut spinors = Vec::with_capacity(n * n);
    for i in 0..n {
        let u = std::f64::consts::TAU * i as f64 / n as f64;
        for jx in 0..n {
            let v = std::f64::consts::TAU * jx as f64 / n as f64;
            spinors.push(Spinor::new(
                C64::from_polar(s1.sqrt(), u),
                C64::from_polar(s2.sqrt(), v),
                C64::new(c3, 0.0),
            ));
        }
    }
    let idx = |i: usize, jx: usize| (i % n) * n + (jx % n);
    let mut triangles = Vec::with_capacity(2 * n * n);
    for i in 0..n {
        for jx in 0..n {
            triangles.push([idx(i, jx), idx(i + 1, jx), idx(i + 1, jx + 1)]);
            triangles.push([idx(i, jx), idx(i + 1, jx + 1), idx(i, jx + 1)]);
        }
    }
    let mesh = SurfaceMesh { spinors, triangles };
    mesh.validate_closed_oriented()?;
    Ok(mesh)
}

/// Initial-surface kinds understood by the harness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialSurface {
    HolomorphicLine,
    PerturbedLine { amplitude: f64 },
    GraphTorus { s1: f64, s2: f64 },
}

pub fn make_initial_surface(
    kind: InitialSurface,
    resolution: usize,
) -> Result<SurfaceMesh, MeshError> {
    match kind {
        InitialSurface::HolomorphicLine => holomorphic_line(resolution),
        InitialSurface::PerturbedLine { amplitude } => perturbed_line(resolution, amplitude),
        InitialSurface::GraphTorus { s1, s2 } => graph_torus(resolution, s1, s2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn icosphere_counts() {
        let (v, f) = icosphere(0);
        assert_eq!((v.len(), f.len()), (12, 20));
        let (v, f) = icosphere(2);
        assert_eq!((v.len(), f.len()), (162, 320));
    }

    #[test]
    fn resolution_mapping() {
        assert_eq!(subdivision_level(32).unwrap(), 3);
        assert_eq!(subdivision_level(64).unwrap(), 4);
        assert_eq!(subdivision_level(128).unwrap(), 5);
        assert!(subdivision_level(4).is_err());
    }

    #[test]
    fn line_mesh_is_closed_and_on_the_line() {
        let mesh = holomorphic_line(32).unwrap();
        assert_eq!(mesh.vertex_count(), 642);
        mesh.validate_closed_oriented().unwrap();
        for z in &mesh.spinors {
            assert!(z[2].norm() < 1e-15);
            assert!((z.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn perturbed_zero_amplitude_is_identical() {
        let a = holomorphic_line(32).unwrap();
        let b = perturbed_line(32, 0.0).unwrap();
        for (za, zb) in a.spinors.iter().zip(&b.spinors) {
            assert_eq!(za, zb);
        }
    }

    #[test]
    fn torus_is_closed() {
        let mesh = graph_torus(16, 1.0 / 3.0, 1.0 / 3.0).unwrap();
        assert_eq!(mesh.vertex_count(), 256);
        mesh.validate_closed_oriented().unwrap();
        assert!(graph_torus(16, 0.6, 0.6).is_err());
    }

    #[test]
    fn snapshot_round_trip() {
        let ambient = AmbientCp2::new(4.0).unwrap();
        let mesh = perturbed_line(16, 0.05).unwrap();
        let text = mesh.write_snapshot(&ambient);
        let (back, amb2) = SurfaceMesh::read_snapshot(&text).unwrap();
        assert_eq!(amb2.k, ambient.k);
        assert_eq!(back.triangles, mesh.triangles);
        for (za, zb) in mesh.spinors.iter().zip(&back.spinors) {
            // spinors match up to phase: compare projectors through distance
            assert!(ambient.distance(za, zb) < 1e-7);
        }
    }

    #[test]
    fn snapshot_rejects_garbage() {
        assert!(SurfaceMesh::read_snapshot("not a mesh").is_err());
        let ambient = AmbientCp2::new(4.0).unwrap();
        let mesh = holomorphic_line(16).unwrap();
        let text = mesh.write_snapshot(&ambient);
        let broken = text.replace("vertices 162", "vertices 163");
        assert!(SurfaceMesh::read_snapshot(&broken).is_err());
    }

    #[test]
    fn one_and_two_rings_are_reasonable() {
        let mesh = holomorphic_line(16).unwrap();
        let topo = mesh.topology();
        for v in 0..mesh.vertex_count() {
            let ring = &topo.one_ring[v];
            assert!(ring.len() == 5 || ring.len() == 6);
            assert!(topo.two_ring[v].len() > ring.len());
            assert!(!topo.two_ring[v].contains(&v));
        }
    }
}
