//! Per-vertex discrete geometry: cotangent Laplacian with mixed Voronoi
//! areas, tangent-plane estimation, adapted frames, Kähler angle, and the
//! second fundamental form by quadric fitting over the 2-ring.
//!
//! All lengths are geodesic distances in ℂP²; each triangle is laid out
//! isometrically in the plane from its edge lengths, which is exact to the
//! order the rest of the discretization carries.

use super::cp2::{AmbientCp2, Herm, C64};
use super::mesh::{MeshTopology, SurfaceMesh};
use crate::frame::{nabla_j_functionals, AdaptedFrame, SecondFundamentalForm};
use crate::tensor::{ComplexStructure, Vec4};
use nalgebra::{Matrix4, Matrix6, SymmetricEigen, Vector2, Vector6};
use rayon::prelude::*;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("degenerate triangle {triangle} (area {area:.3e}) at vertex {vertex}")]
    DegenerateTriangle {
        triangle: usize,
        vertex: usize,
        area: f64,
    },
    #[error("tangent plane estimation failed at vertex {0}")]
    PlaneEstimation(usize),
    #[error(transparent)]
    Frame(#[from] crate::frame::FrameError),
}

/// Everything the flow needs at one vertex.
#[derive(Debug, Clone)]
pub struct VertexGeometry {
    /// Mixed Voronoi area (length²).
    pub area: f64,
    pub cos_alpha: f64,
    /// Adapted frame in the coordinates of the J-adapted ambient tangent
    /// basis at this vertex (z = 0 normal gauge).
    pub frame: AdaptedFrame,
    /// The same frame as ambient Hermitian matrices, e₁..e₄.
    pub frame_ambient: [Herm; 4],
    pub h: SecondFundamentalForm,
    /// Mean curvature vector: ℂP²-tangent, surface-normal part of the
    /// embedding Laplacian.
    pub hvec: Herm,
    /// |Hvec|² from the Laplacian route (the flow speed).
    pub hvec_norm_sq: f64,
    /// |A|², |H|², |∇̄J|² from the quadric-fit h.
    pub asq: f64,
    pub hsq: f64,
    pub nabla_j_sq: f64,
    /// |∇cos α|² of the linear FEM interpolant, area-averaged.
    pub grad_cos_sq: f64,
    /// Cotangent Laplacian of the cos α field at this vertex.
    pub laplace_cos: f64,
}

#[derive(Debug, Clone)]
pub struct MeshGeometry {
    pub verts: Vec<VertexGeometry>,
    /// Cotangent weights per vertex: (neighbor, w_ij).
    pub weights: Vec<Vec<(usize, f64)>>,
    pub triangle_areas: Vec<f64>,
    pub total_area: f64,
}

impl MeshGeometry {
    pub fn min_cos_alpha(&self) -> f64 {
        self.verts.iter().map(|v| v.cos_alpha).fold(f64::INFINITY, f64::min)
    }

    pub fn max_cos_alpha(&self) -> f64 {
        self.verts
            .iter()
            .map(|v| v.cos_alpha)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Area-weighted integral of a per-vertex quantity.
    pub fn integrate(&self, f: impl Fn(&VertexGeometry) -> f64) -> f64 {
        self.verts.iter().map(|v| v.area * f(v)).sum()
    }
}

/// Intrinsic triangle data from its three geodesic edge lengths.
struct TriangleShape {
    /// Corner cotangents, indexed like the corners.
    cot: [f64; 3],
    area: f64,
    /// 2D layout: corner 0 at origin, corner 1 on the x-axis.
    layout: [[f64; 2]; 3],
}

fn triangle_shape(l01: f64, l12: f64, l20: f64) -> Option<TriangleShape> {
    let (c, a, b) = (l01, l12, l20);
    let x2 = (b * b + c * c - a * a) / (2.0 * c);
    let y2sq = b * b - x2 * x2;
    if y2sq <= 0.0 {
        return None;
    }
    let y2 = y2sq.sqrt();
    let area = 0.5 * c * y2;
    let layout = [[0.0, 0.0], [c, 0.0], [x2, y2]];
    let cot_at = |p: [f64; 2], q: [f64; 2], r: [f64; 2]| {
        // cotangent of the corner at p between edges pq and pr
        let u = [q[0] - p[0], q[1] - p[1]];
        let v = [r[0] - p[0], r[1] - p[1]];
        let dot = u[0] * v[0] + u[1] * v[1];
        let cross = (u[0] * v[1] - u[1] * v[0]).abs();
        dot / cross.max(1e-300)
    };
    Some(TriangleShape {
        cot: [
            cot_at(layout[0], layout[1], layout[2]),
            cot_at(layout[1], layout[2], layout[0]),
            cot_at(layout[2], layout[0], layout[1]),
        ],
        area,
        layout,
    })
}

/// Meyer mixed-Voronoi area contribution of one triangle to its corner `at`.
fn mixed_area_contribution(shape: &TriangleShape, lengths: [f64; 3], at: usize) -> f64 {
    // lengths[e] is the edge opposite corner e: l12, l20, l01
    let obtuse = shape.cot.iter().position(|&ct| ct < 0.0);
    match obtuse {
        None => {
            // Voronoi-exact: (1/8)(|e_prev|² cot_prev_corner + |e_next|² cot_next)
            let next = (at + 1) % 3;
            let prev = (at + 2) % 3;
            // edges incident to `at`: opposite corners `next` and `prev`
            (lengths[next] * lengths[next] * shape.cot[next]
                + lengths[prev] * lengths[prev] * shape.cot[prev])
                / 8.0
        }
        Some(corner) if corner == at => shape.area / 2.0,
        Some(_) => shape.area / 4.0,
    }
}

/// Full geometry pass over the mesh.
pub fn vertex_geometry(
    mesh: &SurfaceMesh,
    topo: &MeshTopology,
    ambient: &AmbientCp2,
) -> Result<MeshGeometry, GeometryError> {
    let nv = mesh.vertex_count();
    let j0 = ComplexStructure::standard();

    // phase A: intrinsic triangle quantities, cot weights, areas
    let mut shapes = Vec::with_capacity(mesh.triangles.len());
    let mut areas = vec![0.0f64; nv];
    let mut weight_map: HashMap<(usize, usize), f64> = HashMap::new();
    let mut triangle_areas = Vec::with_capacity(mesh.triangles.len());
    for (ti, t) in mesh.triangles.iter().enumerate() {
        let l01 = ambient.distance(&mesh.spinors[t[0]], &mesh.spinors[t[1]]);
        let l12 = ambient.distance(&mesh.spinors[t[1]], &mesh.spinors[t[2]]);
        let l20 = ambient.distance(&mesh.spinors[t[2]], &mesh.spinors[t[0]]);
        let shape = triangle_shape(l01, l12, l20).ok_or(GeometryError::DegenerateTriangle {
            triangle: ti,
            vertex: t[0],
            area: 0.0,
        })?;
        if shape.area < 1e-14 {
            return Err(GeometryError::DegenerateTriangle {
                triangle: ti,
                vertex: t[0],
                area: shape.area,
            });
        }
        // edge opposite corner e
        let lengths = [l12, l20, l01];
        for corner in 0..3 {
            areas[t[corner]] += mixed_area_contribution(&shape, lengths, corner);
            // cot weight: corner `corner` is opposite edge (next, prev)
            let a = t[(corner + 1) % 3];
            let b = t[(corner + 2) % 3];
            let key = (a.min(b), a.max(b));
            *weight_map.entry(key).or_insert(0.0) += 0.5 * shape.cot[corner];
        }
        triangle_areas.push(shape.area);
        shapes.push(shape);
    }
    let total_area: f64 = triangle_areas.iter().sum();

    let mut weights: Vec<Vec<(usize, f64)>> = vec![Vec::new(); nv];
    for (&(a, b), &w) in &weight_map {
        weights[a].push((b, w));
        weights[b].push((a, w));
    }
    for w in weights.iter_mut() {
        w.sort_unstable_by_key(|&(n, _)| n);
    }

    // phase B: per-vertex frames, Kähler angle, H, quadric h
    let partial: Result<Vec<_>, GeometryError> = (0..nv)
        .into_par_iter()
        .map(|v| {
            let z = &mesh.spinors[v];
            let p = ambient.projector(z);
            let basis = ambient.tangent_frame(z);

            // log coordinates of the 2-ring
            let ring = &topo.two_ring[v];
            let mut coords: HashMap<usize, Vec4> = HashMap::with_capacity(ring.len());
            for &n in ring {
                let l = ambient.log(z, &mesh.spinors[n]);
                coords.insert(n, ambient.coords_in_frame(&basis, &l));
            }

            // tangent plane: area-weighted average of triangle-span
            // projectors, top-2 eigenvectors
            let mut plane = Matrix4::<f64>::zeros();
            for &ti in &topo.vertex_tris[v] {
                let t = mesh.triangles[ti];
                let pos = t.iter().position(|&x| x == v).unwrap();
                let a = coords[&t[(pos + 1) % 3]];
                let b = coords[&t[(pos + 2) % 3]];
                // orthonormalize the edge pair
                let q1 = a / a.norm();
                let mut q2 = b - q1.dot(&b) * q1;
                let n2 = q2.norm();
                if n2 < 1e-14 {
                    return Err(GeometryError::DegenerateTriangle {
                        triangle: ti,
                        vertex: v,
                        area: triangle_areas[ti],
                    });
                }
                q2 /= n2;
                let w = triangle_areas[ti];
                plane += w * (q1 * q1.transpose() + q2 * q2.transpose());
            }
            let eig = SymmetricEigen::new(plane);
            let mut order: Vec<usize> = (0..4).collect();
            order.sort_by(|&i, &jx| {
                eig.eigenvalues[jx]
                    .partial_cmp(&eig.eigenvalues[i])
                    .unwrap()
            });
            let t1: Vec4 = eig.eigenvectors.column(order[0]).into();
            let mut t2: Vec4 = eig.eigenvectors.column(order[1]).into();
            if eig.eigenvalues[order[1]].abs() < 1e-12 {
                return Err(GeometryError::PlaneEstimation(v));
            }

            // orient (t1, t2) with the mesh
            let mut orient = 0.0;
            for &ti in &topo.vertex_tris[v] {
                let t = mesh.triangles[ti];
                let pos = t.iter().position(|&x| x == v).unwrap();
                let a = coords[&t[(pos + 1) % 3]];
                let b = coords[&t[(pos + 2) % 3]];
                orient += triangle_areas[ti]
                    * (a.dot(&t1) * b.dot(&t2) - a.dot(&t2) * b.dot(&t1));
            }
            if orient < 0.0 {
                t2 = -t2;
            }
            let frame = AdaptedFrame::from_plane(&t1, &t2, &j0)?;

            // embedding Laplacian, projected to the ambient tangent space
            let mut lap = Herm::zeros();
            for &(n, w) in &weights[v] {
                let diff = ambient.projector(&mesh.spinors[n]) - p;
                lap += diff * C64::new(w, 0.0);
            }
            lap /= C64::new(areas[v], 0.0);
            let lap_tangent = ambient.tangent_project(&p, &lap);
            let delta = ambient.coords_in_frame(&basis, &lap_tangent);
            let n3 = delta.dot(&frame.e[2]);
            let n4 = delta.dot(&frame.e[3]);
            let hcoords = n3 * frame.e[2] + n4 * frame.e[3];
            let hvec = ambient.from_coords(&basis, &hcoords);
            let hvec_norm_sq = n3 * n3 + n4 * n4;

            // quadric fit of the two normal graph functions over the 2-ring
            let scale = (ring.iter().map(|n| coords[n].norm()).sum::<f64>()
                / ring.len() as f64)
                .max(1e-14);
            let mut ata = Matrix6::<f64>::zeros();
            let mut atb3 = Vector6::<f64>::zeros();
            let mut atb4 = Vector6::<f64>::zeros();
            for &n in ring {
                let xi = coords[&n] / scale;
                let u = xi.dot(&frame.e[0]);
                let vv = xi.dot(&frame.e[1]);
                let p3 = xi.dot(&frame.e[2]);
                let p4 = xi.dot(&frame.e[3]);
                let row = Vector6::new(1.0, u, vv, 0.5 * u * u, u * vv, 0.5 * vv * vv);
                ata += row * row.transpose();
                atb3 += row * p3;
                atb4 += row * p4;
            }
            let chol = ata
                .cholesky()
                .ok_or(GeometryError::PlaneEstimation(v))?;
            let c3 = chol.solve(&atb3);
            let c4 = chol.solve(&atb4);
            // the fit is in coordinates scaled by 1/s, so the Hessian scales
            // back by 1/s
            let h = SecondFundamentalForm::new(
                [[c3[3] / scale, c3[4] / scale], [c3[4] / scale, c3[5] / scale]],
                [[c4[3] / scale, c4[4] / scale], [c4[4] / scale, c4[5] / scale]],
            );
            let (nabla_j_sq, hsq, asq) = nabla_j_functionals(&h);

            let frame_ambient = [
                ambient.from_coords(&basis, &frame.e[0]),
                ambient.from_coords(&basis, &frame.e[1]),
                ambient.from_coords(&basis, &frame.e[2]),
                ambient.from_coords(&basis, &frame.e[3]),
            ];

            Ok(VertexGeometry {
                area: areas[v],
                cos_alpha: frame.cos_alpha,
                frame,
                frame_ambient,
                h,
                hvec,
                hvec_norm_sq,
                asq,
                hsq,
                nabla_j_sq,
                grad_cos_sq: 0.0,
                laplace_cos: 0.0,
            })
        })
        .collect();
    let mut verts = partial?;

    // phase C: FEM gradient and cotangent Laplacian of the cos α field
    let cos: Vec<f64> = verts.iter().map(|v| v.cos_alpha).collect();
    let mut grad_acc = vec![0.0f64; nv];
    let mut grad_area = vec![0.0f64; nv];
    for (ti, t) in mesh.triangles.iter().enumerate() {
        let shape = &shapes[ti];
        let pts = shape.layout;
        let area = shape.area;
        // gradient of the linear interpolant: Σ f_i ∇λ_i with
        // ∇λ_i = rot90(p_{i+2} − p_{i+1}) / (2A)
        let mut g = Vector2::zeros();
        for corner in 0..3 {
            let pn = pts[(corner + 1) % 3];
            let pp = pts[(corner + 2) % 3];
            let edge = Vector2::new(pp[0] - pn[0], pp[1] - pn[1]);
            let rot = Vector2::new(-edge[1], edge[0]);
            g += cos[t[corner]] / (2.0 * area) * rot;
        }
        let gsq = g.norm_squared();
        for &vtx in t {
            grad_acc[vtx] += area * gsq;
            grad_area[vtx] += area;
        }
    }
    for v in 0..nv {
        verts[v].grad_cos_sq = if grad_area[v] > 0.0 {
            grad_acc[v] / grad_area[v]
        } else {
            0.0
        };
        let mut lap = 0.0;
        for &(n, w) in &weights[v] {
            lap += w * (cos[n] - cos[v]);
        }
        verts[v].laplace_cos = lap / areas[v];
    }

    Ok(MeshGeometry {
        verts,
        weights,
        triangle_areas,
        total_area,
    })
}
