//! ℂP² as the manifold of rank-1 Hermitian 3×3 projectors.
//!
//! A point is P = z·z^H for a unit spinor z ∈ ℂ³. The ambient real vector
//! space is the 9-dimensional space of Hermitian matrices with inner product
//! g(A, B) = (2/k)·tr(AB), scaled so the induced metric has holomorphic
//! sectional curvature exactly k. The complex structure acts on tangent
//! vectors by H ↦ i(PH − HP), there are no coordinate charts, and curvature
//! comes out of the Gauss equation of the embedding:
//!
//!   II(X, Y) = XY + YX − 2·tr(XY)·P
//!   R(X,Y,Z,W) = g(II(X,Z), II(Y,W)) − g(II(X,W), II(Y,Z))
//!
//! which is verified against the constant-curvature model at startup.

use crate::tensor::{constant_hsc_tensor, ComplexStructure, Vec4};
use nalgebra::{Matrix3, Vector3};
use num_complex::Complex;
use thiserror::Error;

pub type C64 = Complex<f64>;
pub type Spinor = Vector3<C64>;
pub type Herm = Matrix3<C64>;

#[derive(Debug, Error)]
pub enum Cp2Error {
    #[error("holomorphic sectional curvature must be positive, got {0}")]
    NonPositiveCurvature(f64),
    #[error("curvature self-check failed: max deviation {0:.3e} from the constant model")]
    CurvatureCheckFailed(f64),
    #[error("power iteration failed to isolate a dominant eigenvector")]
    RetractionFailed,
}

/// Ambient ℂP² with holomorphic sectional curvature k.
#[derive(Debug, Clone, Copy)]
pub struct AmbientCp2 {
    pub k: f64,
}

impl AmbientCp2 {
    /// Construct and verify the metric scale: the Gauss-equation curvature
    /// at a sample point must reproduce the constant model entrywise.
    pub fn new(k: f64) -> Result<Self, Cp2Error> {
        if !(k > 0.0) {
            return Err(Cp2Error::NonPositiveCurvature(k));
        }
        let ambient = Self { k };
        let z = normalize(Spinor::new(
            C64::new(0.31, -0.44),
            C64::new(0.81, 0.12),
            C64::new(-0.2, 0.33),
        ));
        let defect = ambient.curvature_check(&z);
        if defect > 1e-10 * k.max(1.0) * k.max(1.0) {
            return Err(Cp2Error::CurvatureCheckFailed(defect));
        }
        Ok(ambient)
    }

    pub fn projector(&self, z: &Spinor) -> Herm {
        z * z.adjoint()
    }

    /// Ambient inner product g(A, B) = (2/k)·tr(AB); real for Hermitian A, B.
    pub fn metric(&self, a: &Herm, b: &Herm) -> f64 {
        (2.0 / self.k) * (a * b).trace().re
    }

    pub fn norm(&self, a: &Herm) -> f64 {
        self.metric(a, a).max(0.0).sqrt()
    }

    /// Orthogonal projection of an ambient Hermitian matrix onto T_P ℂP².
    pub fn tangent_project(&self, p: &Herm, m: &Herm) -> Herm {
        p * m + m * p - 2.0 * (p * m * p)
    }

    /// Complex structure on T_P: H ↦ i(PH − HP).
    pub fn j_apply(&self, p: &Herm, h: &Herm) -> Herm {
        (p * h - h * p) * C64::i()
    }

    /// Geodesic distance (2/√k)·arccos|⟨z1, z2⟩|.
    pub fn distance(&self, z1: &Spinor, z2: &Spinor) -> f64 {
        let c = z1.dotc(z2).norm().clamp(0.0, 1.0);
        2.0 / self.k.sqrt() * c.acos()
    }

    /// Inverse exponential map: the tangent vector at base pointing at
    /// target with |log| = geodesic distance.
    pub fn log(&self, base: &Spinor, target: &Spinor) -> Herm {
        let overlap = base.dotc(target); // ⟨base, target⟩ = base^H target
        let a = overlap.norm().clamp(0.0, 1.0);
        if 1.0 - a < 1e-15 {
            return Herm::zeros();
        }
        // rotate the target phase so the overlap is real positive
        let phase = overlap / overlap.norm();
        let aligned = target * phase.conj();
        let u = normalize(aligned - base * C64::new(a, 0.0));
        let theta = a.acos();
        let h = u * base.adjoint() + base * u.adjoint();
        h * C64::new(theta, 0.0)
    }

    /// Nearest rank-1 projector to `m`, as its dominant eigenvector; `guess`
    /// seeds the power iteration (the previous position during a flow step).
    pub fn retract(&self, m: &Herm, guess: &Spinor) -> Result<Spinor, Cp2Error> {
        let mut v = *guess;
        if v.norm() < 1e-14 {
            v = Spinor::new(C64::new(1.0, 0.0), C64::zero(), C64::zero());
        }
        // shift keeps the dominant eigenvalue well separated even if m has
        // negative entries of comparable size
        let shifted = m + Herm::identity();
        let mut last = C64::zero();
        for it in 0..256 {
            let w = shifted * v;
            let n = w.norm();
            if n < 1e-300 {
                return Err(Cp2Error::RetractionFailed);
            }
            v = w / C64::new(n, 0.0);
            let ray = v.dotc(&(shifted * v));
            if it > 2 && (ray - last).norm() < 1e-15 * ray.norm().max(1.0) {
                break;
            }
            last = ray;
        }
        Ok(normalize(v))
    }

    /// J-adapted orthonormal tangent basis (E₁..E₄) at P = z z^H with
    /// J E₁ = E₂ and J E₃ = E₄ in the stored order.
    pub fn tangent_frame(&self, z: &Spinor) -> [Herm; 4] {
        let (u1, u2) = complete_basis(z);
        let c = C64::new(self.k.sqrt() / 2.0, 0.0);
        let mk = |v: Spinor| -> Herm { v * z.adjoint() + z * v.adjoint() };
        [
            mk(u1 * c),
            mk(u1 * (-C64::i() * c)),
            mk(u2 * c),
            mk(u2 * (-C64::i() * c)),
        ]
    }

    /// Second fundamental form of the projector embedding.
    pub fn embedding_ii(&self, p: &Herm, x: &Herm, y: &Herm) -> Herm {
        let xy = x * y;
        let yx = y * x;
        let tr = (xy).trace().re;
        xy + yx - 2.0 * tr * p
    }

    /// Curvature via the Gauss equation (the ambient Hermitian space is flat).
    pub fn curvature(&self, p: &Herm, x: &Herm, y: &Herm, z: &Herm, w: &Herm) -> f64 {
        let ixz = self.embedding_ii(p, x, z);
        let iyw = self.embedding_ii(p, y, w);
        let ixw = self.embedding_ii(p, x, w);
        let iyz = self.embedding_ii(p, y, z);
        self.metric(&ixz, &iyw) - self.metric(&ixw, &iyz)
    }

    /// Max deviation of the Gauss-equation curvature in a J-adapted frame
    /// from the constant model with the same k.
    pub fn curvature_check(&self, z: &Spinor) -> f64 {
        let p = self.projector(z);
        let frame = self.tangent_frame(z);
        let model = constant_hsc_tensor(self.k).expect("k > 0 checked");
        let mut worst: f64 = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        let got =
                            self.curvature(&p, &frame[a], &frame[b], &frame[c], &frame[d]);
                        worst = worst.max((got - model.component(a, b, c, d)).abs());
                    }
                }
            }
        }
        worst
    }

    /// Express a tangent vector in coordinates of a J-adapted frame. In
    /// these coordinates the frame's complex structure is the standard J₀
    /// of the tensor layer.
    pub fn coords_in_frame(&self, frame: &[Herm; 4], h: &Herm) -> Vec4 {
        Vec4::new(
            self.metric(&frame[0], h),
            self.metric(&frame[1], h),
            self.metric(&frame[2], h),
            self.metric(&frame[3], h),
        )
    }

    pub fn from_coords(&self, frame: &[Herm; 4], v: &Vec4) -> Herm {
        let mut out = Herm::zeros();
        for (i, e) in frame.iter().enumerate() {
            out += e * C64::new(v[i], 0.0);
        }
        out
    }

    /// Largest projector-constraint violation of P = z z^H built from a unit
    /// spinor: ‖P² − P‖_∞ and |tr P − 1|.
    pub fn projector_defect(&self, z: &Spinor) -> f64 {
        let p = self.projector(z);
        let sq = p * p - p;
        let mut worst = (p.trace().re - 1.0).abs().max(p.trace().im.abs());
        for i in 0..3 {
            for jx in 0..3 {
                worst = worst.max(sq[(i, jx)].norm());
            }
        }
        worst
    }
}

pub fn normalize(v: Spinor) -> Spinor {
    v / C64::new(v.norm(), 0.0)
}

/// Complete z to a unitary basis (z, u1, u2) of ℂ³.
fn complete_basis(z: &Spinor) -> (Spinor, Spinor) {
    let mut best = 0;
    let mut best_overlap = f64::INFINITY;
    for i in 0..3 {
        let o = z[i].norm();
        if o < best_overlap {
            best_overlap = o;
            best = i;
        }
    }
    let mut e = Spinor::zeros();
    e[best] = C64::new(1.0, 0.0);
    let u1 = normalize(e - z * z.dotc(&e));
    // u2 = conj(z) × conj(u1): orthogonal to both under the Hermitian product
    let zc = z.map(|c| c.conj());
    let uc = u1.map(|c| c.conj());
    let u2 = normalize(zc.cross(&uc));
    (u1, u2)
}

/// Standard J₀ of the tensor layer, shared by frame-coordinate consumers.
pub fn standard_j() -> ComplexStructure {
    ComplexStructure::standard()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_spinor(rng: &mut impl Rng) -> Spinor {
        normalize(Spinor::new(
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
        ))
    }

    #[test]
    fn startup_curvature_check_passes() {
        for k in [1.0, 2.0, 4.0] {
            let ambient = AmbientCp2::new(k).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(2);
            for _ in 0..5 {
                let z = random_spinor(&mut rng);
                assert!(
                    ambient.curvature_check(&z) < 1e-10 * k * k,
                    "curvature mismatch at k = {k}"
                );
            }
        }
        assert!(AmbientCp2::new(0.0).is_err());
    }

    #[test]
    fn tangent_frame_is_orthonormal_and_j_adapted() {
        let ambient = AmbientCp2::new(4.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let z = random_spinor(&mut rng);
            let p = ambient.projector(&z);
            let f = ambient.tangent_frame(&z);
            for a in 0..4 {
                for b in 0..4 {
                    let want = if a == b { 1.0 } else { 0.0 };
                    assert_relative_eq!(
                        ambient.metric(&f[a], &f[b]),
                        want,
                        epsilon = 1e-12
                    );
                }
                // frame vectors are tangent
                let proj = ambient.tangent_project(&p, &f[a]);
                assert!(ambient.norm(&(proj - f[a])) < 1e-12);
            }
            // J E1 = E2, J E3 = E4
            assert!(ambient.norm(&(ambient.j_apply(&p, &f[0]) - f[1])) < 1e-12);
            assert!(ambient.norm(&(ambient.j_apply(&p, &f[2]) - f[3])) < 1e-12);
        }
    }

    #[test]
    fn log_inverts_geodesic_distance() {
        let ambient = AmbientCp2::new(4.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let z1 = random_spinor(&mut rng);
            let z2 = random_spinor(&mut rng);
            let l = ambient.log(&z1, &z2);
            let d = ambient.distance(&z1, &z2);
            assert_relative_eq!(ambient.norm(&l), d, epsilon = 1e-10);
            // log lands in the tangent space
            let p = ambient.projector(&z1);
            assert!(ambient.norm(&(ambient.tangent_project(&p, &l) - l)) < 1e-10);
        }
    }

    #[test]
    fn log_of_self_is_zero() {
        let ambient = AmbientCp2::new(4.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let z = random_spinor(&mut rng);
        assert!(ambient.norm(&ambient.log(&z, &z)) < 1e-12);
        // phase changes are the same projective point
        let zp = z * C64::from_polar(1.0, 1.3);
        assert!(ambient.norm(&ambient.log(&z, &zp)) < 1e-12);
        assert!(ambient.distance(&z, &zp) < 1e-7);
    }

    #[test]
    fn retraction_recovers_nearby_point() {
        let ambient = AmbientCp2::new(4.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let z = random_spinor(&mut rng);
            let p = ambient.projector(&z);
            let f = ambient.tangent_frame(&z);
            let h = &f[0] * C64::new(1e-3, 0.0) + &f[2] * C64::new(-2e-3, 0.0);
            let moved = p + h * C64::new(1.0, 0.0);
            let znew = ambient.retract(&moved, &z).unwrap();
            assert!(ambient.projector_defect(&znew) < 1e-12);
            // stays within O(|h|) of the base point
            assert!(ambient.distance(&z, &znew) < 5e-3);
        }
    }

    #[test]
    fn metric_scale_matches_hsc() {
        // K(X) = R(X, JX, X, JX) / |X|⁴ must equal k for unit tangent X
        for k in [1.0, 4.0] {
            let ambient = AmbientCp2::new(k).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(13);
            let z = random_spinor(&mut rng);
            let p = ambient.projector(&z);
            let f = ambient.tangent_frame(&z);
            let x = &f[0];
            let jx = ambient.j_apply(&p, x);
            let kx = ambient.curvature(&p, x, &jx, x, &jx);
            assert_relative_eq!(kx, k, epsilon = 1e-10 * k);
        }
    }
}
