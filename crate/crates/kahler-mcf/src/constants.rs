//! Closed-form thresholds, pinching constants and sign certificates of the
//! angle-pinching theory, with grid certification over the hypothesis
//! ranges.
//!
//! Everything here is exact closed-form evaluation; the audits certify sign
//! conditions and dominance claims on dense parameter grids rather than
//! symbolically.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConstantsError {
    #[error("lambda must lie in [1, 2), got {0}")]
    LambdaOutOfRange(f64),
    #[error("lambda = {lambda} outside [1, {max}) required here")]
    LambdaOutOfMode { lambda: f64, max: f64 },
    #[error("sigma = {sigma} outside ({lo}, 2/3]")]
    SigmaOutOfRange { sigma: f64, lo: f64 },
    #[error("K = {kk} violates 0 < K ≤ min(2, 2·k1) = {max}")]
    KOutOfRange { kk: f64, max: f64 },
    #[error("k1 must be positive, got {0}")]
    NonPositiveK1(f64),
    #[error("negative discriminant a2² + 4·a1·a3 = {0:.6e}: t0 has no real root (f < 0 everywhere); hypothesis violation per the stated formulas")]
    NegativeDiscriminant(f64),
    #[error("x = {x} outside [1, 1/sqrt(delta)] = [1, {hi}]")]
    XOutOfRange { x: f64, hi: f64 },
    #[error("frame data violates cos²α + y² + z² = 1 (got {0})")]
    BadFrameData(f64),
    #[error("lambda = {0} exceeds the 1 + 1/100 range of the |w|² bound")]
    LambdaBeyondWBound(f64),
}

/// Hypothesis set of the pinching theorem being certified.
///
/// `lambda` ∈ \[1, 1 + 1/200) with
/// `sigma` ∈ (1/2 + 24(λ−1)/(1 − 34(λ−1)), 2/3\] and 0 < K ≤ min(2, 2k1).
#[derive(Debug, Clone, Copy)]
pub struct PinchingParams {
    pub lambda: f64,
    pub sigma: f64,
    /// Scale constant bounding |∇̄Rm| ≤ K·k1·(λ−1).
    pub kk: f64,
    pub k1: f64,
}

pub const LAMBDA_MAX_PINCHING: f64 = 1.0 + 1.0 / 200.0;
pub const LAMBDA_MAX_W_BOUND: f64 = 1.0 + 1.0 / 100.0;

/// Lower edge of the admissible sigma interval at the given lambda.
pub fn sigma_min(lambda: f64) -> f64 {
    let x = lambda - 1.0;
    0.5 + 24.0 * x / (1.0 - 34.0 * x)
}

impl PinchingParams {
    pub fn new(lambda: f64, sigma: f64, kk: f64, k1: f64) -> Result<Self, ConstantsError> {
        if !(k1 > 0.0) {
            return Err(ConstantsError::NonPositiveK1(k1));
        }
        if !(1.0..LAMBDA_MAX_PINCHING).contains(&lambda) {
            return Err(ConstantsError::LambdaOutOfMode {
                lambda,
                max: LAMBDA_MAX_PINCHING,
            });
        }
        let lo = sigma_min(lambda);
        if !(sigma > lo && sigma <= 2.0 / 3.0) {
            return Err(ConstantsError::SigmaOutOfRange { sigma, lo });
        }
        let kmax = 2.0f64.min(2.0 * k1);
        if !(kk > 0.0 && kk <= kmax) {
            return Err(ConstantsError::KOutOfRange { kk, max: kmax });
        }
        Ok(Self {
            lambda,
            sigma,
            kk,
            k1,
        })
    }
}

/// Derived constants (b, a1, a2, a3, t0, delta) of the pinching theorem.
#[derive(Debug, Clone, Copy)]
pub struct PinchingConstants {
    pub b: f64,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub t0: f64,
    pub delta: f64,
}

/// b = (2σ−1)/σ·(8−7λ) − 4K(λ−1).
pub fn b_constant(lambda: f64, sigma: f64, kk: f64) -> f64 {
    (2.0 * sigma - 1.0) / sigma * (8.0 - 7.0 * lambda) - 4.0 * kk * (lambda - 1.0)
}

/// Coefficients of f(t) = −a1·t² + a2·t + a3.
pub fn f_coefficients(lambda: f64, sigma: f64, b: f64) -> (f64, f64, f64) {
    let s2 = 2.0 * sigma - 1.0;
    let s34 = 3.0 - 4.0 * sigma;
    let a1 = 9.0 * (lambda + 1.0) * (lambda + 1.0);
    let a2 = a1 - 12.0 * s34 / s2 * b;
    let a3 = (350.0 - 444.0 * sigma) / s2 * (lambda - 1.0)
        + 8.0 * s34 / s2 * (23.0 * lambda - 20.5) * b
        - 8.0 * s34 * (sigma + 1.0) / (s2 * s2) * b * b;
    (a1, a2, a3)
}

pub fn f_quadratic(a1: f64, a2: f64, a3: f64, t: f64) -> f64 {
    -a1 * t * t + a2 * t + a3
}

/// Exact closed-form constants; the discriminant is checked before the
/// square root and a negative value is reported, never clamped.
pub fn pinching_constants(p: &PinchingParams) -> Result<PinchingConstants, ConstantsError> {
    let b = b_constant(p.lambda, p.sigma, p.kk);
    let (a1, a2, a3) = f_coefficients(p.lambda, p.sigma, b);
    let disc = a2 * a2 + 4.0 * a1 * a3;
    if disc < 0.0 {
        return Err(ConstantsError::NegativeDiscriminant(disc));
    }
    let t0 = (a2 + disc.sqrt()) / (2.0 * a1);
    let floor = (13.0 * p.lambda - 10.0) / (3.0 * (p.lambda + 2.0));
    let delta = t0.max(floor);
    Ok(PinchingConstants {
        b,
        a1,
        a2,
        a3,
        t0,
        delta,
    })
}

/// The four closed-form angle thresholds as functions of λ ∈ [1, 2).
#[derive(Debug, Clone, Copy)]
pub struct AngleThresholds {
    /// 29(λ−1)/√((48−24λ)² + (29λ−29)²)
    pub delta_new: f64,
    /// 53(λ−1)/√((53λ−53)² + (48−24λ)²)
    pub delta_ly_a: f64,
    /// (8λ−5)/√((8λ−5)² + (12−6λ)²)
    pub delta_ly_b: f64,
    /// 58(λ−1)/√((48−24λ)² + (58λ−58)²); with `strict_literal` the first
    /// square is the literal (48−24)² = 576 instead.
    pub delta_thm42: f64,
}

pub fn angle_thresholds(lambda: f64, strict_literal: bool) -> Result<AngleThresholds, ConstantsError> {
    if !(1.0..2.0).contains(&lambda) {
        return Err(ConstantsError::LambdaOutOfRange(lambda));
    }
    let d = lambda - 1.0;
    let delta_new = 29.0 * d / ((48.0 - 24.0 * lambda).powi(2) + (29.0 * d).powi(2)).sqrt();
    let delta_ly_a = 53.0 * d / ((53.0 * d).powi(2) + (48.0 - 24.0 * lambda).powi(2)).sqrt();
    let delta_ly_b =
        (8.0 * lambda - 5.0) / ((8.0 * lambda - 5.0).powi(2) + (12.0 - 6.0 * lambda).powi(2)).sqrt();
    let first_sq = if strict_literal {
        (48.0f64 - 24.0).powi(2)
    } else {
        (48.0 - 24.0 * lambda).powi(2)
    };
    let delta_thm42 = 58.0 * d / (first_sq + (58.0 * d).powi(2)).sqrt();
    Ok(AngleThresholds {
        delta_new,
        delta_ly_a,
        delta_ly_b,
        delta_thm42,
    })
}

/// One grid point of a certification sweep.
#[derive(Debug, Clone)]
pub struct GridViolation {
    pub parameter: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub what: &'static str,
}

/// Result of the dominance / consistency sweeps.
#[derive(Debug, Clone, Default)]
pub struct RemarkReport {
    pub violations: Vec<GridViolation>,
    /// σ grid points at λ = 1 where the discriminant is negative so t0 does
    /// not exist (f < 0 everywhere; the comparison is vacuous there).
    pub vacuous_t0_points: usize,
    pub checked_lambda: usize,
    pub checked_sigma: usize,
}

impl RemarkReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Certify the threshold-dominance claim δ_new ≤ min(δ_LY).
/// and the λ = 1 closed form t0 ≤ (7σ−3)/(3σ) on the given grids.
pub fn remark_checks(grid_lambda: &[f64], grid_sigma: &[f64]) -> Result<RemarkReport, ConstantsError> {
    let mut report = RemarkReport::default();
    for &lambda in grid_lambda {
        let th = angle_thresholds(lambda, false)?;
        let min_ly = th.delta_ly_a.min(th.delta_ly_b);
        report.checked_lambda += 1;
        if th.delta_new > min_ly + 1e-12 {
            report.violations.push(GridViolation {
                parameter: lambda,
                lhs: th.delta_new,
                rhs: min_ly,
                what: "delta_new <= min(delta_LY)",
            });
        }
    }
    for &sigma in grid_sigma {
        if !(sigma > 0.5 && sigma <= 2.0 / 3.0) {
            return Err(ConstantsError::SigmaOutOfRange { sigma, lo: 0.5 });
        }
        report.checked_sigma += 1;
        // λ = 1 closed form: (7σ−3 + √((7σ−3)² + 4(3−4σ)(3σ−2)))/(6σ)
        let disc = (7.0 * sigma - 3.0).powi(2) + 4.0 * (3.0 - 4.0 * sigma) * (3.0 * sigma - 2.0);
        if disc < 0.0 {
            report.vacuous_t0_points += 1;
            continue;
        }
        let t0 = (7.0 * sigma - 3.0 + disc.sqrt()) / (6.0 * sigma);
        let bound = (7.0 * sigma - 3.0) / (3.0 * sigma);
        if t0 > bound + 1e-12 {
            report.violations.push(GridViolation {
                parameter: sigma,
                lhs: t0,
                rhs: bound,
                what: "t0(1, sigma) <= (7sigma-3)/(3sigma)",
            });
        }
    }
    Ok(report)
}

/// Margins of the sign certificates at one parameter point.
#[derive(Debug, Clone)]
pub struct SignCertificates {
    /// Closed-form upper bound for C₁ (must be ≤ 0):
    /// \[32(λ−1) − 4λ + 16σK(λ−1)/(2σ−1) + 4σb/(2σ−1)\]·k₁.
    pub c1_upper: f64,
    /// f(1) (must be < 0).
    pub f_at_1: f64,
    /// max над the cos²α grid of C₂'s upper envelope (2σ−1)k₁²/(8(3−4σ))·f(t)
    /// (must be ≤ 0 on t ≥ t0).
    pub c2_upper_max: f64,
    /// max over the grid of C̃₂ = C₁bk₁ + C₂ + (3σ−2)/(2σ−1)·b²k₁²
    /// (must be ≤ 0 wherever the prerequisites hold).
    pub c_tilde2_max: f64,
    pub ok: bool,
}

/// Audit the §-estimate sign chain over a cos²α grid in [delta, 1].
pub fn c1_c2_sign_audit(
    p: &PinchingParams,
    grid_cos2: &[f64],
) -> Result<SignCertificates, ConstantsError> {
    let consts = pinching_constants(p)?;
    let s2 = 2.0 * p.sigma - 1.0;
    let s34 = 3.0 - 4.0 * p.sigma;
    let c1_upper = (32.0 * (p.lambda - 1.0) - 4.0 * p.lambda
        + 16.0 * p.sigma * p.kk * (p.lambda - 1.0) / s2
        + 4.0 * p.sigma * consts.b / s2)
        * p.k1;
    let f1 = f_quadratic(consts.a1, consts.a2, consts.a3, 1.0);

    let envelope = s2 * p.k1 * p.k1 / (8.0 * s34);
    let mut c2_max = f64::NEG_INFINITY;
    let mut ct2_max = f64::NEG_INFINITY;
    for &t in grid_cos2 {
        if t < consts.delta - 1e-12 || t > 1.0 + 1e-12 {
            continue;
        }
        let c2 = envelope * f_quadratic(consts.a1, consts.a2, consts.a3, t);
        let ct2 = c1_upper * consts.b * p.k1 + c2 + (3.0 * p.sigma - 2.0) / s2 * consts.b
            * consts.b
            * p.k1
            * p.k1;
        c2_max = c2_max.max(c2);
        ct2_max = ct2_max.max(ct2);
    }
    let slack = 1e-9 * p.k1 * p.k1.max(1.0);
    let ok = c1_upper <= slack && f1 < 0.0 && c2_max <= slack && ct2_max <= slack;
    Ok(SignCertificates {
        c1_upper,
        f_at_1: f1,
        c2_upper_max: c2_max,
        c_tilde2_max: ct2_max,
        ok,
    })
}

/// Closed-form bound (k₁²/32)·\[34(λ−1) + 9·sin²α·cos²α·(λ+1)²\] for |w|²;
/// valid for λ ≤ 1 + 1/100.
pub fn w_norm_bound(
    lambda: f64,
    cos_alpha: f64,
    y: f64,
    z: f64,
    k1: f64,
) -> Result<f64, ConstantsError> {
    let unit = cos_alpha * cos_alpha + y * y + z * z;
    if (unit - 1.0).abs() > 1e-10 {
        return Err(ConstantsError::BadFrameData(unit));
    }
    if lambda > LAMBDA_MAX_W_BOUND + 1e-12 {
        return Err(ConstantsError::LambdaBeyondWBound(lambda));
    }
    let sin2 = y * y + z * z;
    let cos2 = cos_alpha * cos_alpha;
    Ok(k1 * k1 / 32.0
        * (34.0 * (lambda - 1.0) + 9.0 * sin2 * cos2 * (lambda + 1.0) * (lambda + 1.0)))
}

/// Values of the auxiliary test functions at one x.
#[derive(Debug, Clone, Copy)]
pub struct TestFunctions {
    pub f: f64,
    pub g: f64,
    /// |−4g′ + 8g/x − 2|; vanishes identically for the chosen g.
    pub ode_residual: f64,
    /// 1 ≤ f ≤ 1/(2σ√δ − (2σ−1))² and x/g ≥ 4σ.
    pub range_ok: bool,
}

/// g(x) = x/2 − (1/2 − 1/(4σ))x² and f(x) = x²/(2σ − (2σ−1)x)² on
/// x ∈ [1, 1/√δ].
pub fn test_functions_fg(sigma: f64, delta: f64, x: f64) -> Result<TestFunctions, ConstantsError> {
    let hi = 1.0 / delta.sqrt();
    if !(1.0 - 1e-12..=hi + 1e-12).contains(&x) {
        return Err(ConstantsError::XOutOfRange { x, hi });
    }
    let a = 0.5 - 1.0 / (4.0 * sigma);
    let g = 0.5 * x - a * x * x;
    let gp = 0.5 - 2.0 * a * x;
    let ode_residual = (-4.0 * gp + 8.0 * g / x - 2.0).abs();
    let denom = 2.0 * sigma - (2.0 * sigma - 1.0) * x;
    let f = x * x / (denom * denom);
    let fmax_denom = 2.0 * sigma * delta.sqrt() - (2.0 * sigma - 1.0);
    let fmax = 1.0 / (fmax_denom * fmax_denom);
    let range_ok = f >= 1.0 - 1e-12 && f <= fmax + 1e-12 && x / g >= 4.0 * sigma - 1e-12;
    Ok(TestFunctions {
        f,
        g,
        ode_residual,
        range_ok,
    })
}

/// ε₁ ≤ π²·ε₀²·r₀⁶·(1 − e^{−(3/8)(2−λ)k₁})² / (4·Area(Σ₀)).
pub fn epsilon1_bound(
    area0: f64,
    r0: f64,
    eps0: f64,
    lambda: f64,
    k1: f64,
) -> Result<f64, ConstantsError> {
    if !(lambda < 2.0) {
        return Err(ConstantsError::LambdaOutOfRange(lambda));
    }
    let pi = std::f64::consts::PI;
    let decay = 1.0 - (-(3.0 / 8.0) * (2.0 - lambda) * k1).exp();
    Ok(pi * pi * eps0 * eps0 * r0.powi(6) * decay * decay / (4.0 * area0))
}

/// Reference decay slopes: ((3/4)(2−λ)k₁, (4/9)k₁).
pub fn decay_rates(lambda: f64, k1: f64) -> (f64, f64) {
    ((3.0 / 4.0) * (2.0 - lambda) * k1, 4.0 / 9.0 * k1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn thresholds_spot_values() {
        let th = angle_thresholds(1.0, false).unwrap();
        assert_eq!(th.delta_new, 0.0);
        assert_eq!(th.delta_ly_a, 0.0);
        // frozen against an independent high-precision evaluation
        let th = angle_thresholds(1.5, false).unwrap();
        assert_relative_eq!(th.delta_new, 0.770394321124689683, epsilon = 1e-15);
        assert_relative_eq!(th.delta_ly_a, 0.910954180221931322, epsilon = 1e-15);
        assert_relative_eq!(th.delta_ly_b, 0.919145030018057897, epsilon = 1e-15);
        assert_relative_eq!(th.delta_thm42, 0.924016832421890879, epsilon = 1e-15);
        let lit = angle_thresholds(1.5, true).unwrap();
        assert_relative_eq!(lit.delta_thm42, 0.770394321124689683, epsilon = 1e-15);
        // λ → 2⁻ forces the ratio to 1
        let th = angle_thresholds(2.0 - 1e-6, false).unwrap();
        assert!((th.delta_new - 1.0).abs() < 1e-12);
    }

    #[test]
    fn thresholds_reject_out_of_range() {
        assert!(angle_thresholds(0.99, false).is_err());
        assert!(angle_thresholds(2.0, false).is_err());
    }

    #[test]
    fn delta_new_strictly_increasing() {
        let mut prev = angle_thresholds(1.0, false).unwrap().delta_new;
        for i in 1..10_000 {
            let lambda = 1.0 + 0.9999 * i as f64 / 10_000.0;
            let v = angle_thresholds(lambda, false).unwrap().delta_new;
            assert!(v > prev, "not increasing at λ = {lambda}");
            prev = v;
        }
    }

    #[test]
    fn pinching_constants_hand_values() {
        // λ=1, σ=2/3: b = 1/2, a1 = 36, a2 = 30, a3 = 0, t0 = δ = 5/6
        let p = PinchingParams::new(1.0, 2.0 / 3.0, 1.0, 1.0).unwrap();
        let c = pinching_constants(&p).unwrap();
        assert_relative_eq!(c.b, 0.5, epsilon = 1e-14);
        assert_relative_eq!(c.a1, 36.0, epsilon = 1e-12);
        assert_relative_eq!(c.a2, 30.0, epsilon = 1e-12);
        assert!(c.a3.abs() < 1e-12);
        assert_relative_eq!(c.t0, 5.0 / 6.0, epsilon = 1e-12);
        assert_relative_eq!(c.delta, 5.0 / 6.0, epsilon = 1e-12);
        // λ=1: angle floor (13λ−10)/(3(λ+2)) = 1/3
        let floor = (13.0 - 10.0) / (3.0 * 3.0);
        assert_relative_eq!(floor, 1.0 / 3.0, epsilon = 1e-15);
        assert!(c.delta < 1.0);
    }

    #[test]
    fn pinching_matches_lambda1_closed_form() {
        // independent route: the λ=1 form (7σ−3+√((7σ−3)²+4(3−4σ)(3σ−2)))/(6σ)
        for i in 0..2000 {
            let sigma = 0.5647 + (2.0 / 3.0 - 0.5647) * i as f64 / 1999.0;
            let p = PinchingParams::new(1.0, sigma, 1.0, 1.0).unwrap();
            let c = pinching_constants(&p).unwrap();
            let disc = (7.0 * sigma - 3.0).powi(2)
                + 4.0 * (3.0 - 4.0 * sigma) * (3.0 * sigma - 2.0);
            let t0 = (7.0 * sigma - 3.0 + disc.sqrt()) / (6.0 * sigma);
            assert_relative_eq!(c.t0, t0, epsilon = 1e-12, max_relative = 1e-12);
        }
    }

    #[test]
    fn negative_discriminant_reported() {
        // at λ = 1, σ = 0.55 the quadratic has no real root
        let p = PinchingParams::new(1.0, 0.55, 1.0, 1.0).unwrap();
        assert!(matches!(
            pinching_constants(&p),
            Err(ConstantsError::NegativeDiscriminant(_))
        ));
    }

    #[test]
    fn params_validate_hypotheses() {
        assert!(PinchingParams::new(1.01, 0.6, 1.0, 1.0).is_err()); // λ too big
        assert!(PinchingParams::new(1.0, 0.7, 1.0, 1.0).is_err()); // σ too big
        assert!(PinchingParams::new(1.0, 0.5, 1.0, 1.0).is_err()); // σ at open edge
        assert!(PinchingParams::new(1.0, 0.6, 3.0, 1.0).is_err()); // K > 2
        assert!(PinchingParams::new(1.0, 0.6, 1.5, 0.5).is_err()); // K > 2k1
        assert!(PinchingParams::new(1.004, 0.6, 1.0, 1.0).is_err()); // σ below floor
        assert!(PinchingParams::new(1.0, 0.6, 1.0, 1.0).is_ok());
    }

    #[test]
    fn remark_grids_certify() {
        let grid_lambda: Vec<f64> = (0..10_000)
            .map(|i| 1.0 + 0.9999 * i as f64 / 9999.0)
            .collect();
        let grid_sigma: Vec<f64> = (0..10_000)
            .map(|i| 0.5 + 1e-9 + (2.0 / 3.0 - 0.5 - 1e-9) * i as f64 / 9999.0)
            .collect();
        let rep = remark_checks(&grid_lambda, &grid_sigma).unwrap();
        assert!(rep.ok(), "violations: {:?}", rep.violations.first());
        assert!(rep.vacuous_t0_points > 0); // σ below ~0.5647 has no real t0
        // equality case at σ = 2/3: t0 = (7σ−3)/(3σ) = 5/6
        let bound = (7.0 * (2.0 / 3.0) - 3.0) / (3.0 * (2.0 / 3.0));
        assert_relative_eq!(bound, 5.0 / 6.0, epsilon = 1e-14);
    }

    #[test]
    fn sign_certificates_hand_values() {
        // λ=1, σ=2/3: C1 upper = (−4+4)k1 = 0, f(1) = −36+30+0 = −6
        let p = PinchingParams::new(1.0, 2.0 / 3.0, 1.0, 1.0).unwrap();
        let grid: Vec<f64> = (0..100).map(|i| 5.0 / 6.0 + (1.0 / 6.0) * i as f64 / 99.0).collect();
        let cert = c1_c2_sign_audit(&p, &grid).unwrap();
        assert!(cert.c1_upper.abs() < 1e-12);
        assert_relative_eq!(cert.f_at_1, -6.0, epsilon = 1e-10);
        assert!(cert.ok);
        // f(t0) = 0 at the admissible boundary
        let c = pinching_constants(&p).unwrap();
        assert!(f_quadratic(c.a1, c.a2, c.a3, c.t0).abs() < 1e-10);
    }

    #[test]
    fn sign_certificates_over_hypothesis_grid() {
        let mut worst_f1 = f64::NEG_INFINITY;
        for i in 0..200 {
            let lambda = 1.0 + (LAMBDA_MAX_PINCHING - 1.0 - 1e-9) * i as f64 / 199.0;
            let lo = sigma_min(lambda);
            for jx in 0..200 {
                let sigma = lo + (2.0 / 3.0 - lo) * (jx + 1) as f64 / 200.0;
                let p = PinchingParams::new(lambda, sigma, 2.0, 1.0).unwrap();
                let consts = match pinching_constants(&p) {
                    Ok(c) => c,
                    Err(ConstantsError::NegativeDiscriminant(_)) => continue,
                    Err(e) => panic!("{e}"),
                };
                let grid: Vec<f64> = (0..32)
                    .map(|t| consts.delta + (1.0 - consts.delta) * t as f64 / 31.0)
                    .collect();
                let cert = c1_c2_sign_audit(&p, &grid).unwrap();
                assert!(cert.ok, "certificate failed at λ={lambda}, σ={sigma}: {cert:?}");
                worst_f1 = worst_f1.max(cert.f_at_1);
            }
        }
        assert!(worst_f1 < 0.0);
    }

    #[test]
    fn w_bound_values() {
        // α = 0, λ = 1: both terms vanish
        assert_eq!(w_norm_bound(1.0, 1.0, 0.0, 0.0, 3.0).unwrap(), 0.0);
        // λ=1, sin²α·cos²α = 1/4: bound = 9k²/32
        let c = (0.5f64).sqrt();
        let v = w_norm_bound(1.0, c, c, 0.0, 2.0).unwrap();
        assert_relative_eq!(v, 9.0 * 4.0 / 32.0 * 0.25 * 4.0, epsilon = 1e-12);
        // λ=1.005, α=π/4, k1=1 (frozen independent evaluation)
        let v = w_norm_bound(1.005, c, c, 0.0, 1.0).unwrap();
        assert_relative_eq!(
            v,
            (34.0 * 0.005 + 9.0 * 0.25 * 2.005 * 2.005) / 32.0,
            epsilon = 1e-14
        );
        assert!(w_norm_bound(1.02, c, c, 0.0, 1.0).is_err());
        assert!(w_norm_bound(1.0, 0.5, 0.5, 0.0, 1.0).is_err()); // not on unit sphere
    }

    #[test]
    fn test_functions_spot_values() {
        // f(1) = 1 for any σ
        for sigma in [0.55, 0.6, 2.0 / 3.0] {
            let tf = test_functions_fg(sigma, 0.5, 1.0).unwrap();
            assert_relative_eq!(tf.f, 1.0, epsilon = 1e-13);
            assert!(tf.ode_residual < 1e-12);
            assert!(tf.range_ok);
        }
        // σ=2/3, x=1: g = 3/8 and the ODE balances by hand
        let tf = test_functions_fg(2.0 / 3.0, 5.0 / 6.0, 1.0).unwrap();
        assert_relative_eq!(tf.g, 3.0 / 8.0, epsilon = 1e-14);
    }

    #[test]
    fn test_functions_dense_grid() {
        for sigma in [0.55, 0.58, 0.6, 0.63, 2.0 / 3.0] {
            let delta: f64 = 0.4;
            let hi = 1.0 / delta.sqrt();
            for i in 0..2000 {
                let x = 1.0 + (hi - 1.0) * i as f64 / 1999.0;
                let tf = test_functions_fg(sigma, delta, x).unwrap();
                assert!(tf.ode_residual < 1e-12, "residual {:e}", tf.ode_residual);
                assert!(tf.range_ok, "range failed at σ={sigma}, x={x}");
            }
        }
    }

    #[test]
    fn test_functions_reject_out_of_interval() {
        assert!(test_functions_fg(0.6, 0.5, 0.5).is_err());
        assert!(test_functions_fg(0.6, 0.5, 2.0).is_err());
    }

    #[test]
    fn epsilon1_values() {
        // frozen independent evaluation: area0=4π, r0=0.1, eps0=0.01, λ=1, k1=4
        let v = epsilon1_bound(4.0 * std::f64::consts::PI, 0.1, 0.01, 1.0, 4.0).unwrap();
        assert_relative_eq!(v, 1.185021998740503e-11, epsilon = 1e-24, max_relative = 1e-12);
        // r0 → 2r0 multiplies by 64
        let v2 = epsilon1_bound(4.0 * std::f64::consts::PI, 0.2, 0.01, 1.0, 4.0).unwrap();
        assert_relative_eq!(v2, 64.0 * v, epsilon = 1e-20, max_relative = 1e-12);
        // λ → 2⁻ collapses the bound
        let v3 = epsilon1_bound(1.0, 0.1, 0.01, 2.0 - 1e-9, 4.0).unwrap();
        assert!(v3 < 1e-20);
        assert!(epsilon1_bound(1.0, 0.1, 0.01, 2.0, 4.0).is_err());
    }

    #[test]
    fn decay_rate_values() {
        let (p41, half) = decay_rates(1.0, 4.0);
        assert_relative_eq!(p41, 3.0, epsilon = 1e-15);
        assert_relative_eq!(half, 16.0 / 9.0, epsilon = 1e-15);
        let (p41, _) = decay_rates(2.0 - 1e-12, 4.0);
        assert!(p41 < 1e-11);
        // linear in k1
        let (a, b) = decay_rates(1.3, 2.0);
        let (a2, b2) = decay_rates(1.3, 4.0);
        assert_relative_eq!(a2, 2.0 * a, epsilon = 1e-15);
        assert_relative_eq!(b2, 2.0 * b, epsilon = 1e-15);
    }
}
