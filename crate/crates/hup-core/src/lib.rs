//! Numerical laboratory for Fourier uniqueness questions on the parabola.
//!
//! A measure `dμ = g(t) dt` carried by the curve `(t, t²)` has the Fourier
//! extension `μ̂(ξ,η) = ∫ g(t) e^{-2πi(ξt + ηt²)} dt`, a solution of the free
//! Schrödinger equation in the (ξ, η) plane. This crate evaluates μ̂ by
//! independent routes, implements the exponent arithmetic that decides when
//! power-sequence node sets on straight lines force μ ≡ 0, realizes the
//! Galilean and pseudo-conformal symmetries that move those lines around, and
//! constructs the explicit two-line configuration where uniqueness fails.
//!
//! Modules:
//! - [`density`]: 1-D densities, transforms, weighted moments.
//! - [`extension`]: μ̂ by oscillatory quadrature, the Gaussian closed form,
//!   the f_y factorization, and the Schrödinger residual.
//! - [`uniqueness`]: admissible exponent region, decay bootstrap, Λ node
//!   generation, vanishing checks, gap-criterion margins.
//! - [`symmetry`]: Galilean shifts, quadratic modulation, pseudo-conformal
//!   point/value maps.
//! - [`counterexample`]: the H-transform, the odd-bump non-uniqueness
//!   construction, and the three-line rigidity defect.

pub mod density;
pub mod error;
pub mod extension;
pub mod quad;
pub mod symmetry;
pub mod uniqueness;

pub mod counterexample;

pub use density::{Density, DensityKind, Estimate, InterpOrder, MomentReport, SampleTable};
pub use error::{Error, Result};
pub use extension::{
    extension_gaussian_closed_form, extension_quadrature, extension_via_fy, schrodinger_residual,
    schrodinger_residual_field, EvalPoint, ParabolaMeasure,
};
pub use uniqueness::{
    bootstrap, c_lemma, c_three_lines, decay_slope_fit, lambda_points, ns_margin, power_admissible,
    power_witness, region_a_contains, region_a_supremum, region_a_supremum_detailed,
    vanishing_check, BootstrapTrajectory, ExponentPair, LambdaBranch, LambdaSpec, Line,
    VanishingReport,
};
