//! Numerical laboratory for symplectic mean curvature flow in Kähler surfaces
//! with positive holomorphic sectional curvature.
//!
//! The crate has four layers:
//!
//! * [`tensor`] — multilinear algebra on ℝ⁴ with a fixed compatible complex
//!   structure: Kähler curvature tensors, holomorphic sectional curvature,
//!   polarization identities, and sampling of perturbed curvature models.
//! * [`frame`] — adapted frames along a surface, the Kähler angle, second
//!   fundamental form functionals, and pointwise curvature-inequality
//!   auditors (sectional-curvature bounds, the 16 frame-component estimates,
//!   the Ricci lower bound, a Kato-type gradient inequality).
//! * [`constants`] — every closed-form threshold, pinching constant and sign
//!   certificate of the angle-pinching theory, with grid certification.
//! * [`flow`] — mean curvature flow of a triangulated closed surface in ℂP²
//!   (rank-1 projector model), with per-vertex Kähler-angle diagnostics,
//!   monotonicity/decay checks and Gaussian density sampling.
//!
//! The [`harness`] module wires the above into the `verify`, `constants` and
//! `flow` verification suites used by the CLI binary; each suite writes a
//! plain-text report and CSV tables into a chosen output directory.
//!
//! Everything is deterministic for a fixed seed: random streams come from
//! ChaCha8 seeded per task.

pub mod config;
pub mod constants;
pub mod flow;
pub mod frame;
pub mod harness;
pub mod report;
pub mod tensor;

