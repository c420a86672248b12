//! Curvature tensors on ℝ⁴ with the standard compatible complex structure.
//!
//! All tensors live on a fixed 4-dimensional Euclidean space carrying the
//! block complex structure J₀ (J₀e₁ = e₂, J₀e₃ = e₄).  The stored sign
//! convention makes the constant model positively curved: for
//! [`constant_hsc_tensor`]`(k)` with k > 0 every holomorphic sectional
//! curvature equals k and every sectional curvature lies in [k/4, k].

use nalgebra::{Matrix4, Vector4};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

pub type Vec4 = Vector4<f64>;

/// Relative tolerance for the tensor symmetry invariants.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Relative tolerance for identity residuals (polarization checks).
pub const IDENTITY_TOL: f64 = 1e-9;
/// Relative accuracy target of [`hsc_extrema`].
pub const HSC_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum TensorError {
    #[error("curvature scale must be positive, got {0}")]
    NonPositiveScale(f64),
    #[error("degenerate span: |X∧Y| = {0:.3e} below 1e-12")]
    DegenerateSpan(f64),
    #[error("could not sample a positively curved model after {retries} retries (last k1 = {last_k1:.6e})")]
    PositivityFailed { retries: usize, last_k1: f64 },
}

/// The fixed compatible complex structure J₀ on ℝ⁴.
///
/// J₀e₁ = e₂, J₀e₂ = −e₁, J₀e₃ = e₄, J₀e₄ = −e₃; J₀² = −I and J₀ is
/// orthogonal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexStructure {
    mat: Matrix4<f64>,
}

impl Default for ComplexStructure {
    fn default() -> Self {
        Self::standard()
    }
}

impl ComplexStructure {
    pub fn standard() -> Self {
        #[rustfmt::skip]
        let mat = Matrix4::new(
            0.0, -1.0, 0.0, 0.0,
            1.0,  0.0, 0.0, 0.0,
            0.0,  0.0, 0.0, -1.0,
            0.0,  0.0, 1.0,  0.0,
        );
        Self { mat }
    }

    pub fn apply(&self, v: &Vec4) -> Vec4 {
        self.mat * v
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.mat
    }

    /// Largest violation of J² = −I and ⟨JX, JY⟩ = ⟨X, Y⟩ over the basis.
    pub fn invariant_defect(&self) -> f64 {
        let sq = self.mat * self.mat + Matrix4::identity();
        let orth = self.mat.transpose() * self.mat - Matrix4::identity();
        sq.abs().max().max(orth.abs().max())
    }
}

/// Riemann curvature tensor R_{ABCD} on ℝ⁴ (indices 0..4).
///
/// Stored with the orientation in which the constant model has positive
/// sectional curvatures; consumers read components as `component(a,b,c,d)`
/// meaning R(e_a, e_b, e_c, e_d).
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureTensor {
    r: [[[[f64; 4]; 4]; 4]; 4],
}

impl CurvatureTensor {
    pub fn zeros() -> Self {
        Self {
            r: [[[[0.0; 4]; 4]; 4]; 4],
        }
    }

    pub fn component(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        self.r[a][b][c][d]
    }

    pub fn set_component(&mut self, a: usize, b: usize, c: usize, d: usize, v: f64) {
        self.r[a][b][c][d] = v;
    }

    /// Full contraction R(X, Y, Z, W).
    pub fn eval(&self, x: &Vec4, y: &Vec4, z: &Vec4, w: &Vec4) -> f64 {
        let mut acc = 0.0;
        for a in 0..4 {
            if x[a] == 0.0 {
                continue;
            }
            for b in 0..4 {
                let xy = x[a] * y[b];
                if xy == 0.0 {
                    continue;
                }
                for c in 0..4 {
                    let xyz = xy * z[c];
                    for d in 0..4 {
                        acc += self.r[a][b][c][d] * xyz * w[d];
                    }
                }
            }
        }
        acc
    }

    /// Biquadratic R(X, Y) = R(X, Y, X, Y).
    pub fn biquadratic(&self, x: &Vec4, y: &Vec4) -> f64 {
        self.eval(x, y, x, y)
    }

    /// Holomorphic biquadratic R(X) = R(X, JX, X, JX).
    pub fn holomorphic_biquadratic(&self, x: &Vec4, j: &ComplexStructure) -> f64 {
        let jx = j.apply(x);
        self.eval(x, &jx, x, &jx)
    }

    /// Holomorphic sectional curvature K(X) = R(X, JX, X, JX)/|X|⁴.
    pub fn holomorphic_sectional(&self, x: &Vec4, j: &ComplexStructure) -> f64 {
        let n2 = x.norm_squared();
        self.holomorphic_biquadratic(x, j) / (n2 * n2)
    }

    /// max(1, max |R_{ABCD}|); used to scale relative tolerances.
    pub fn scale(&self) -> f64 {
        self.max_abs().max(1.0)
    }

    pub fn max_abs(&self) -> f64 {
        let mut m: f64 = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        m = m.max(self.r[a][b][c][d].abs());
                    }
                }
            }
        }
        m
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        let mut out = Self::zeros();
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        out.r[a][b][c][d] = f(self.r[a][b][c][d]);
                    }
                }
            }
        }
        out
    }

    pub fn scaled(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = Self::zeros();
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        out.r[a][b][c][d] = self.r[a][b][c][d] + other.r[a][b][c][d];
                    }
                }
            }
        }
        out
    }

    /// Largest violation among: antisymmetry in (A,B) and (C,D), pair
    /// symmetry, first Bianchi identity, and Kähler invariance
    /// R(JX,JY,Z,W) = R(X,Y,Z,W).
    pub fn symmetry_defect(&self, j: &ComplexStructure) -> f64 {
        let mut worst: f64 = 0.0;
        let jm = j.matrix();
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        let v = self.r[a][b][c][d];
                        worst = worst.max((v + self.r[b][a][c][d]).abs());
                        worst = worst.max((v + self.r[a][b][d][c]).abs());
                        worst = worst.max((v - self.r[c][d][a][b]).abs());
                        let bianchi = v + self.r[a][c][d][b] + self.r[a][d][b][c];
                        worst = worst.max(bianchi.abs());
                        // (j R)_{abcd} = R(J e_a, J e_b, e_c, e_d)
                        let mut jr = 0.0;
                        for p in 0..4 {
                            if jm[(p, a)] == 0.0 {
                                continue;
                            }
                            for q in 0..4 {
                                jr += jm[(p, a)] * jm[(q, b)] * self.r[p][q][c][d];
                            }
                        }
                        worst = worst.max((v - jr).abs());
                    }
                }
            }
        }
        worst
    }

    pub fn is_kahler_curvature(&self, j: &ComplexStructure, tol: f64) -> bool {
        self.symmetry_defect(j) <= tol * self.scale()
    }

    /// Orthogonal projection onto the linear space of Kähler curvature
    /// tensors (antisymmetry pairs, pair swap, first Bianchi, J-invariance).
    ///
    /// Alternating projections: each constraint family is an orthogonal
    /// projection; iterating converges to the projection onto the
    /// intersection. The loop exits once the update stalls at roundoff, so
    /// projecting an already-projected tensor returns it unchanged to within
    /// 1e-15.
    pub fn project_to_kahler_symmetries(&self, j: &ComplexStructure) -> Self {
        let mut cur = self.clone();
        let scale = self.scale();
        for _ in 0..500 {
            let next = cur
                .project_pair_symmetries()
                .project_j_invariance(j)
                .project_bianchi();
            let mut diff: f64 = 0.0;
            for a in 0..4 {
                for b in 0..4 {
                    for c in 0..4 {
                        for d in 0..4 {
                            diff = diff.max((next.r[a][b][c][d] - cur.r[a][b][c][d]).abs());
                        }
                    }
                }
            }
            cur = next;
            if diff <= 1e-17 * scale {
                break;
            }
        }
        cur
    }

    /// Average over the order-8 group generated by the two antisymmetries
    /// and the pair swap.
    fn project_pair_symmetries(&self) -> Self {
        let mut out = Self::zeros();
        let r = &self.r;
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        let s = r[a][b][c][d] - r[b][a][c][d] - r[a][b][d][c] + r[b][a][d][c]
                            + r[c][d][a][b]
                            - r[d][c][a][b]
                            - r[c][d][b][a]
                            + r[d][c][b][a];
                        out.r[a][b][c][d] = s / 8.0;
                    }
                }
            }
        }
        out
    }

    /// Average with the pullback by J on the first two slots.
    fn project_j_invariance(&self, j: &ComplexStructure) -> Self {
        let jm = j.matrix();
        let mut out = Self::zeros();
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        let mut jr = 0.0;
                        for p in 0..4 {
                            if jm[(p, a)] == 0.0 {
                                continue;
                            }
                            for q in 0..4 {
                                if jm[(q, b)] == 0.0 {
                                    continue;
                                }
                                jr += jm[(p, a)] * jm[(q, b)] * self.r[p][q][c][d];
                            }
                        }
                        out.r[a][b][c][d] = 0.5 * (self.r[a][b][c][d] + jr);
                    }
                }
            }
        }
        out
    }

    /// Within pair-symmetric tensors the first Bianchi identity fails exactly
    /// along the 4-form direction ε; subtract that component.
    fn project_bianchi(&self) -> Self {
        let eps = levi_civita();
        let mut inner = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        inner += self.r[a][b][c][d] * eps[a][b][c][d];
                    }
                }
            }
        }
        // ⟨ε, ε⟩ = 4! = 24
        let coef = inner / 24.0;
        let mut out = self.clone();
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        out.r[a][b][c][d] -= coef * eps[a][b][c][d];
                    }
                }
            }
        }
        out
    }
}

fn levi_civita() -> [[[[f64; 4]; 4]; 4]; 4] {
    let mut eps = [[[[0.0; 4]; 4]; 4]; 4];
    let perms: [([usize; 4], f64); 24] = {
        let mut out = [([0usize; 4], 0.0f64); 24];
        let mut n = 0;
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        if a != b && a != c && a != d && b != c && b != d && c != d {
                            let p = [a, b, c, d];
                            let mut sign = 1.0;
                            let mut v = p;
                            // bubble sort parity
                            for i in 0..4 {
                                for jx in 0..3 - i.min(3) {
                                    if v[jx] > v[jx + 1] {
                                        v.swap(jx, jx + 1);
                                        sign = -sign;
                                    }
                                }
                            }
                            out[n] = (p, sign);
                            n += 1;
                        }
                    }
                }
            }
        }
        out
    };
    for (p, sign) in perms {
        eps[p[0]][p[1]][p[2]][p[3]] = sign;
    }
    eps
}

/// Curvature tensor of the complex space form with holomorphic sectional
/// curvature k:
///
/// R(X,Y,Z,W) = (k/4)\[⟨X,Z⟩⟨Y,W⟩ − ⟨X,W⟩⟨Y,Z⟩ + ⟨JX,Z⟩⟨JY,W⟩ − ⟨JX,W⟩⟨JY,Z⟩
///              + 2⟨JX,Y⟩⟨JZ,W⟩\]
pub fn constant_hsc_tensor(k: f64) -> Result<CurvatureTensor, TensorError> {
    if !(k > 0.0) {
        return Err(TensorError::NonPositiveScale(k));
    }
    let j = ComplexStructure::standard();
    let basis: [Vec4; 4] = [
        Vec4::new(1.0, 0.0, 0.0, 0.0),
        Vec4::new(0.0, 1.0, 0.0, 0.0),
        Vec4::new(0.0, 0.0, 1.0, 0.0),
        Vec4::new(0.0, 0.0, 0.0, 1.0),
    ];
    let jb: Vec<Vec4> = basis.iter().map(|e| j.apply(e)).collect();
    let mut out = CurvatureTensor::zeros();
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let g = |u: &Vec4, v: &Vec4| u.dot(v);
                    let v = g(&basis[a], &basis[c]) * g(&basis[b], &basis[d])
                        - g(&basis[a], &basis[d]) * g(&basis[b], &basis[c])
                        + g(&jb[a], &basis[c]) * g(&jb[b], &basis[d])
                        - g(&jb[a], &basis[d]) * g(&jb[b], &basis[c])
                        + 2.0 * g(&jb[a], &basis[b]) * g(&jb[c], &basis[d]);
                    out.r[a][b][c][d] = 0.25 * k * v;
                }
            }
        }
    }
    Ok(out)
}

/// A curvature model with certified holomorphic-sectional-curvature range.
#[derive(Debug, Clone)]
pub struct KahlerCurvatureModel {
    pub tensor: CurvatureTensor,
    /// Minimum holomorphic sectional curvature (positive by construction).
    pub k1: f64,
    /// Maximum holomorphic sectional curvature.
    pub k2: f64,
    /// Ratio k2/k1.
    pub lambda: f64,
}

impl KahlerCurvatureModel {
    pub fn from_tensor(tensor: CurvatureTensor, j: &ComplexStructure) -> Self {
        let (k1, k2) = hsc_extrema(&tensor, j);
        Self {
            tensor,
            k1,
            k2,
            lambda: k2 / k1,
        }
    }
}

/// Draw a random tensor with all Kähler curvature symmetries: uniform noise
/// in [−eps, eps] per entry, projected onto the symmetry subspace, added to
/// the constant model. No positivity check; see [`sample_kahler_tensor`].
pub fn sample_projected_tensor(
    rng: &mut impl Rng,
    k: f64,
    eps: f64,
    j: &ComplexStructure,
) -> Result<CurvatureTensor, TensorError> {
    let base = constant_hsc_tensor(k)?;
    if eps == 0.0 {
        return Ok(base);
    }
    let mut noise = CurvatureTensor::zeros();
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    noise.r[a][b][c][d] = rng.gen_range(-eps..=eps);
                }
            }
        }
    }
    Ok(base.add(&noise.project_to_kahler_symmetries(j)))
}

/// Deterministic sampler of perturbed Kähler curvature models.
///
/// Retries with fresh noise (same stream) until the minimum holomorphic
/// sectional curvature stays positive; fails after a bounded number of
/// retries.
pub fn sample_kahler_tensor(
    seed: u64,
    k: f64,
    eps: f64,
    j: &ComplexStructure,
) -> Result<KahlerCurvatureModel, TensorError> {
    if !(k > 0.0) {
        return Err(TensorError::NonPositiveScale(k));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    const MAX_RETRIES: usize = 16;
    let mut last_k1 = f64::NAN;
    for _ in 0..MAX_RETRIES {
        let tensor = sample_projected_tensor(&mut rng, k, eps, j)?;
        let model = KahlerCurvatureModel::from_tensor(tensor, j);
        if model.k1 > 1e-9 * k {
            return Ok(model);
        }
        last_k1 = model.k1;
    }
    Err(TensorError::PositivityFailed {
        retries: MAX_RETRIES,
        last_k1,
    })
}

/// Quartic form G with K(X) = w(X)ᵀ G w(X) for w = X⊗X, precomputed from R.
struct HscForm {
    g: [[f64; 16]; 16],
}

impl HscForm {
    fn new(r: &CurvatureTensor, j: &ComplexStructure) -> Self {
        let jm = j.matrix();
        let mut g = [[0.0; 16]; 16];
        for a in 0..4 {
            for p in 0..4 {
                for c in 0..4 {
                    for q in 0..4 {
                        let mut acc = 0.0;
                        for b in 0..4 {
                            if jm[(b, p)] == 0.0 {
                                continue;
                            }
                            for d in 0..4 {
                                acc += r.r[a][b][c][d] * jm[(b, p)] * jm[(d, q)];
                            }
                        }
                        g[4 * a + p][4 * c + q] = acc;
                    }
                }
            }
        }
        Self { g }
    }

    #[inline]
    fn eval_unit(&self, x: &[f64; 4]) -> f64 {
        let mut w = [0.0; 16];
        for a in 0..4 {
            for p in 0..4 {
                w[4 * a + p] = x[a] * x[p];
            }
        }
        let mut acc = 0.0;
        for i in 0..16 {
            if w[i] == 0.0 {
                continue;
            }
            let gi = &self.g[i];
            let mut row = 0.0;
            for (jx, wj) in w.iter().enumerate() {
                row += gi[jx] * wj;
            }
            acc += w[i] * row;
        }
        acc
    }
}

#[inline]
fn hopf_point(theta: f64, phi: f64, psi: f64) -> [f64; 4] {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let (ss, cs) = psi.sin_cos();
    [ct * cp, ct * sp, st * cs, st * ss]
}

/// Extrema of the holomorphic sectional curvature K(X) over unit X.
///
/// Coarse 64×64×64 Hopf-angle grid over the unit 3-sphere followed by
/// shrinking coordinate-descent refinement; K is a smooth quartic form, so
/// the grid resolves its basins and the refinement reaches well below the
/// 1e-6 relative target.
pub fn hsc_extrema(r: &CurvatureTensor, j: &ComplexStructure) -> (f64, f64) {
    let form = HscForm::new(r, j);
    const N: usize = 64;
    let step = std::f64::consts::FRAC_PI_2 / N as f64;
    let full = std::f64::consts::TAU / N as f64;

    // Grid pass, parallel over theta slices; (value, slice, linear index)
    // ordering keeps the reduction associative and deterministic.
    let per_slice: Vec<(f64, usize, f64, usize)> = (0..N)
        .into_par_iter()
        .map(|it| {
            let theta = (it as f64 + 0.5) * step;
            let mut lo = f64::INFINITY;
            let mut lo_idx = 0usize;
            let mut hi = f64::NEG_INFINITY;
            let mut hi_idx = 0usize;
            for ip in 0..N {
                let phi = ip as f64 * full;
                for is in 0..N {
                    let psi = is as f64 * full;
                    let v = form.eval_unit(&hopf_point(theta, phi, psi));
                    let idx = ip * N + is;
                    if v < lo || (v == lo && idx < lo_idx) {
                        lo = v;
                        lo_idx = idx;
                    }
                    if v > hi || (v == hi && idx < hi_idx) {
                        hi = v;
                        hi_idx = idx;
                    }
                }
            }
            (lo, lo_idx, hi, hi_idx)
        })
        .collect();

    let mut best_lo = (f64::INFINITY, 0usize, 0usize);
    let mut best_hi = (f64::NEG_INFINITY, 0usize, 0usize);
    for (it, &(lo, lo_idx, hi, hi_idx)) in per_slice.iter().enumerate() {
        if lo < best_lo.0 {
            best_lo = (lo, it, lo_idx);
        }
        if hi > best_hi.0 {
            best_hi = (hi, it, hi_idx);
        }
    }

    let refine = |value: f64, it: usize, idx: usize, minimize: bool| -> f64 {
        let mut angles = [
            (it as f64 + 0.5) * step,
            (idx / N) as f64 * full,
            (idx % N) as f64 * full,
        ];
        let mut best = value;
        let mut h = [step, full, full];
        for _ in 0..48 {
            for ax in 0..3 {
                for dir in [-1.0, 1.0] {
                    let mut trial = angles;
                    trial[ax] += dir * h[ax];
                    let v = form.eval_unit(&hopf_point(trial[0], trial[1], trial[2]));
                    let better = if minimize { v < best } else { v > best };
                    if better {
                        best = v;
                        angles = trial;
                    }
                }
            }
            for hx in h.iter_mut() {
                *hx *= 0.6;
            }
        }
        best
    };

    let k1 = refine(best_lo.0, best_lo.1, best_lo.2, true);
    let k2 = refine(best_hi.0, best_hi.1, best_hi.2, false);
    (k1, k2)
}

/// Unnormalized biquadratic R(X,Y) and the sectional curvature of span{X,Y}.
///
/// The normalized value is `None` when the span is degenerate
/// (|X|²|Y|² − ⟨X,Y⟩² below 1e-12).
pub fn sectional_and_hsc(r: &CurvatureTensor, x: &Vec4, y: &Vec4) -> (f64, Option<f64>) {
    let biquad = r.biquadratic(x, y);
    let gram = x.norm_squared() * y.norm_squared() - x.dot(y) * x.dot(y);
    if gram < 1e-12 {
        (biquad, None)
    } else {
        (biquad, Some(biquad / gram))
    }
}

/// Residuals of the two polarization identities that express a Kähler
/// curvature tensor through holomorphic sectional curvatures:
///
/// * sectional: R(X,Y) = (1/32)\[3R(X+JY) + 3R(X−JY) − R(X+Y) − R(X−Y)
///   − 4R(X) − 4R(Y)\] with R(V) = R(V, JV, V, JV);
/// * mixed: R(X,Y,X,Z) = (1/4)(R(X, Y+Z) − R(X, Y−Z)) with
///   R(X,W) = R(X,W,X,W).
pub fn verify_polarization_identities(
    r: &CurvatureTensor,
    j: &ComplexStructure,
    x: &Vec4,
    y: &Vec4,
    z: &Vec4,
) -> (f64, f64) {
    let hq = |v: &Vec4| r.holomorphic_biquadratic(v, j);
    let lhs_sec = r.biquadratic(x, y);
    let rhs_sec = (3.0 * hq(&(x + j.apply(y))) + 3.0 * hq(&(x - j.apply(y)))
        - hq(&(x + y))
        - hq(&(x - y))
        - 4.0 * hq(x)
        - 4.0 * hq(y))
        / 32.0;
    let residual_sectional = (lhs_sec - rhs_sec).abs();

    let lhs_mix = r.eval(x, y, x, z);
    let rhs_mix = 0.25 * (r.biquadratic(x, &(y + z)) - r.biquadratic(x, &(y - z)));
    let residual_mixed = (lhs_mix - rhs_mix).abs();

    (residual_sectional, residual_mixed)
}

/// Draw a random vector with Gaussian components.
pub fn random_vector(rng: &mut impl Rng) -> Vec4 {
    // Box-Muller keeps us off rand_distr for one distribution.
    let mut next = || {
        let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
        let u2: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        (-2.0 * u1.ln()).sqrt() * u2.cos()
    };
    Vec4::new(next(), next(), next(), next())
}

/// Random unit vector.
pub fn random_unit_vector(rng: &mut impl Rng) -> Vec4 {
    loop {
        let v = random_vector(rng);
        let n = v.norm();
        if n > 1e-6 {
            return v / n;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn j() -> ComplexStructure {
        ComplexStructure::standard()
    }

    #[test]
    fn complex_structure_is_valid() {
        assert!(j().invariant_defect() < 1e-15);
    }

    #[test]
    fn constant_model_has_constant_hsc() {
        let r = constant_hsc_tensor(1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let x = random_unit_vector(&mut rng);
            assert_relative_eq!(r.holomorphic_sectional(&x, &j()), 1.0, epsilon = 1e-12);
        }
        let r2 = constant_hsc_tensor(2.0).unwrap();
        let (k1, k2) = hsc_extrema(&r2, &j());
        assert_relative_eq!(k1, 2.0, epsilon = 1e-9);
        assert_relative_eq!(k2, 2.0, epsilon = 1e-9);
    }

    #[test]
    fn constant_model_orthogonal_plane_value() {
        // orthonormal X, Y with ⟨JX, Y⟩ = 0 gives R(X,Y) = k/4
        let r = constant_hsc_tensor(1.0).unwrap();
        let x = Vec4::new(1.0, 0.0, 0.0, 0.0);
        let y = Vec4::new(0.0, 0.0, 1.0, 0.0);
        let (biquad, sec) = sectional_and_hsc(&r, &x, &y);
        assert_relative_eq!(biquad, 0.25, epsilon = 1e-14);
        assert_relative_eq!(sec.unwrap(), 0.25, epsilon = 1e-14);
    }

    #[test]
    fn constant_model_adapted_plane_value() {
        // e1, e2 with ⟨Je1, e2⟩ = c gives R(e1, e2) = (1 + 3c²)/4
        let r = constant_hsc_tensor(1.0).unwrap();
        for &c in &[0.0_f64, 0.3, 0.7, 1.0] {
            let s = (1.0 - c * c).sqrt();
            let e1 = Vec4::new(1.0, 0.0, 0.0, 0.0);
            // Je1 = e2-axis; mix e2 towards e3 to set the Kähler angle.
            let e2 = Vec4::new(0.0, c, s, 0.0);
            assert_relative_eq!(j().apply(&e1).dot(&e2), c, epsilon = 1e-15);
            let (biquad, _) = sectional_and_hsc(&r, &e1, &e2);
            assert_relative_eq!(biquad, (1.0 + 3.0 * c * c) / 4.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn constant_model_holomorphic_plane() {
        let k = 1.7;
        let r = constant_hsc_tensor(k).unwrap();
        let x = Vec4::new(1.0, 0.0, 0.0, 0.0);
        let y = j().apply(&x);
        let (biquad, sec) = sectional_and_hsc(&r, &x, &y);
        assert_relative_eq!(biquad, k, epsilon = 1e-12);
        assert_relative_eq!(sec.unwrap(), k, epsilon = 1e-12);
    }

    #[test]
    fn sectional_rejects_degenerate_span() {
        let r = constant_hsc_tensor(1.0).unwrap();
        let x = Vec4::new(1.0, 0.0, 0.0, 0.0);
        let (_, sec) = sectional_and_hsc(&r, &x, &(2.0 * x));
        assert!(sec.is_none());
    }

    #[test]
    fn tensor_scaling_homogeneity() {
        let r = constant_hsc_tensor(1.0).unwrap();
        let rs = r.scaled(3.0);
        let x = Vec4::new(0.2, -0.4, 0.7, 0.1).normalize();
        let y = Vec4::new(0.9, 0.1, -0.3, 0.5).normalize();
        assert_relative_eq!(rs.biquadratic(&x, &y), 3.0 * r.biquadratic(&x, &y));
        // scaling X -> 2X multiplies R(X,Y) by 4 and leaves K unchanged
        let (b1, s1) = sectional_and_hsc(&r, &x, &y);
        let (b2, s2) = sectional_and_hsc(&r, &(2.0 * x), &y);
        assert_relative_eq!(b2, 4.0 * b1, epsilon = 1e-12);
        assert_relative_eq!(s2.unwrap(), s1.unwrap(), epsilon = 1e-12);
    }

    #[test]
    fn constant_model_invariants_hold() {
        let r = constant_hsc_tensor(2.5).unwrap();
        assert!(r.symmetry_defect(&j()) < 1e-12 * r.scale());
    }

    #[test]
    fn projection_produces_invariants_and_is_idempotent() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut noise = CurvatureTensor::zeros();
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        noise.set_component(a, b, c, d, rng.gen_range(-1.0..1.0));
                    }
                }
            }
        }
        let p1 = noise.project_to_kahler_symmetries(&j());
        assert!(p1.symmetry_defect(&j()) < 1e-12 * p1.scale().max(1.0));
        let p2 = p1.project_to_kahler_symmetries(&j());
        let mut diff: f64 = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        diff = diff
                            .max((p1.component(a, b, c, d) - p2.component(a, b, c, d)).abs());
                    }
                }
            }
        }
        assert!(diff < 1e-15, "projection not idempotent: {diff:e}");
    }

    #[test]
    fn sampler_is_deterministic() {
        let a = sample_kahler_tensor(7, 1.0, 0.05, &j()).unwrap();
        let b = sample_kahler_tensor(7, 1.0, 0.05, &j()).unwrap();
        assert_eq!(a.tensor, b.tensor);
        assert_eq!(a.k1.to_bits(), b.k1.to_bits());
        assert_eq!(a.k2.to_bits(), b.k2.to_bits());
    }

    #[test]
    fn sampler_zero_eps_is_constant_model() {
        let m = sample_kahler_tensor(3, 2.0, 0.0, &j()).unwrap();
        assert_relative_eq!(m.k1, 2.0, epsilon = 1e-9);
        assert_relative_eq!(m.k2, 2.0, epsilon = 1e-9);
        assert_relative_eq!(m.lambda, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn sampled_model_invariants_and_containment() {
        let m = sample_kahler_tensor(7, 1.0, 0.05, &j()).unwrap();
        assert!(m.tensor.symmetry_defect(&j()) < 1e-12 * m.tensor.scale());
        assert!(m.lambda >= 1.0 && m.lambda < 2.0, "lambda = {}", m.lambda);
        // Monte Carlo containment: k1 <= K(X) <= k2 for random unit vectors
        let mut rng = ChaCha8Rng::seed_from_u64(100);
        let slack = 1e-9 * m.tensor.scale();
        for _ in 0..1000 {
            let x = random_unit_vector(&mut rng);
            let kx = m.tensor.holomorphic_sectional(&x, &j());
            assert!(kx >= m.k1 - slack && kx <= m.k2 + slack);
        }
    }

    #[test]
    fn hsc_extrema_brackets_grid_samples() {
        // independent oracle: dense random sampling must stay within the
        // certified extrema
        let m = sample_kahler_tensor(11, 1.0, 0.05, &j()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for _ in 0..20000 {
            let x = random_unit_vector(&mut rng);
            let v = m.tensor.holomorphic_sectional(&x, &j());
            lo = lo.min(v);
            hi = hi.max(v);
        }
        assert!(m.k1 <= lo + 1e-9);
        assert!(m.k2 >= hi - 1e-9);
        // and the extrema are attained values, not loose bounds
        assert!((lo - m.k1).abs() < 5e-3 * m.k1.abs().max(1.0));
        assert!((hi - m.k2).abs() < 5e-3 * m.k2.abs().max(1.0));
    }

    #[test]
    fn polarization_identities_on_constant_model() {
        let r = constant_hsc_tensor(1.0).unwrap();
        let x = Vec4::new(1.0, 0.0, 0.0, 0.0);
        let y = Vec4::new(0.0, 1.0, 0.0, 0.0);
        let z = Vec4::new(0.0, 0.0, 1.0, 0.0);
        let (rs, rm) = verify_polarization_identities(&r, &j(), &x, &y, &z);
        assert!(rs < 1e-10 && rm < 1e-10, "residuals {rs:e} {rm:e}");
    }

    #[test]
    fn polarization_mixed_z_equals_y() {
        let r = sample_kahler_tensor(13, 1.0, 0.05, &j()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let x = random_unit_vector(&mut rng);
        let y = random_unit_vector(&mut rng);
        let (_, rm) = verify_polarization_identities(&r.tensor, &j(), &x, &y, &y);
        assert!(rm < 1e-12 * r.tensor.scale());
    }

    #[test]
    fn polarization_monte_carlo_audit() {
        let m = sample_kahler_tensor(19, 1.0, 0.05, &j()).unwrap();
        let tol = 1e-9 * m.tensor.scale();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..1000 {
            let x = random_unit_vector(&mut rng);
            let y = random_unit_vector(&mut rng);
            let z = random_unit_vector(&mut rng);
            let (rs, rm) = verify_polarization_identities(&m.tensor, &j(), &x, &y, &z);
            assert!(rs < tol && rm < tol, "residuals {rs:e} {rm:e}");
        }
    }

    #[test]
    fn constant_model_sectional_range() {
        // complex space form: sectional curvature in [k/4, k]
        let k = 2.0;
        let r = constant_hsc_tensor(k).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..2000 {
            let x = random_unit_vector(&mut rng);
            let y = random_unit_vector(&mut rng);
            if let (_, Some(sec)) = sectional_and_hsc(&r, &x, &y) {
                assert!(sec >= k / 4.0 - 1e-9 && sec <= k + 1e-9, "sec = {sec}");
            }
        }
    }

    #[test]
    fn rejects_nonpositive_scale() {
        assert!(constant_hsc_tensor(0.0).is_err());
        assert!(constant_hsc_tensor(-1.0).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn homogeneity_under_tensor_scaling(seed in 0u64..1000, c in 0.1f64..10.0) {
            let m = sample_kahler_tensor(seed, 1.0, 0.03, &j()).unwrap();
            let scaled = KahlerCurvatureModel::from_tensor(m.tensor.scaled(c), &j());
            prop_assert!((scaled.k1 - c * m.k1).abs() < 1e-6 * c * m.k1.abs().max(1.0));
            prop_assert!((scaled.k2 - c * m.k2).abs() < 1e-6 * c * m.k2.abs().max(1.0));
            prop_assert!((scaled.lambda - m.lambda).abs() < 1e-6);
        }

        #[test]
        fn projected_tensors_satisfy_polarization(seed in 0u64..2000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = sample_projected_tensor(&mut rng, 1.0, 0.05, &j()).unwrap();
            let tol = 1e-9 * t.scale();
            let x = random_unit_vector(&mut rng);
            let y = random_unit_vector(&mut rng);
            let z = random_unit_vector(&mut rng);
            let (rs, rm) = verify_polarization_identities(&t, &j(), &x, &y, &z);
            prop_assert!(rs < tol && rm < tol);
        }
    }
}
