//! The H-transform linking the extension's restriction to a through-origin
//! line with a one-dimensional Fourier transform, the two-line non-uniqueness
//! construction from an odd bump, and the double-oddness rigidity defect that
//! shows why a third line pins the measure down.

use crate::density::{Density, Estimate, MomentReport};
use crate::error::{Error, Result};
use crate::extension::{extension_quadrature, materialize_transform, EvalPoint, ParabolaMeasure};
use crate::uniqueness::{LambdaBranch, LambdaSpec, Line};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Pushforward of `ψ(t) = ĝ(t) e^{-πit/a}` under `t ↦ t²`:
/// `H(s) = (ĝ(√s) e^{-πi√s/a} + ĝ(-√s) e^{πi√s/a}) / (2√s)` for s > 0 and
/// exactly 0 for s ≤ 0. Its 1-D transform gives μ̂ along the line y = ax.
///
/// The e^{-πit/a} phase is the one the e^{-2πi} extension convention forces;
/// an even ĝ cannot tell the two orientations apart, an asymmetric one can.
#[derive(Debug, Clone)]
pub struct HTransform {
    pub source: ParabolaMeasure,
    pub slope: f64,
}

impl HTransform {
    pub fn new(source: ParabolaMeasure, slope: f64) -> Result<Self> {
        if slope == 0.0 {
            return Err(Error::Domain("H-transform slope must be nonzero".into()));
        }
        Ok(Self { source, slope })
    }
}

/// Evaluate H(s). Uses the measure's cached/exact ĝ when available, falling
/// back to two direct 1-D transforms at the given tolerance.
pub fn h_value(h: &HTransform, s: f64, tol: f64) -> Result<Complex64> {
    if s <= 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let rt = s.sqrt();
    let (gp, gm) = match h.source.ghat_density() {
        Ok((ghat, _)) => (ghat.evaluate(rt), ghat.evaluate(-rt)),
        Err(_) => (
            h.source.density.fourier_transform_1d(rt, tol)?.value,
            h.source.density.fourier_transform_1d(-rt, tol)?.value,
        ),
    };
    let ph = Complex64::from_polar(1.0, -PI * rt / h.slope);
    Ok((gp * ph + gm * ph.conj()) / (2.0 * rt))
}

/// Outcome of the line-restriction identity check
/// `μ̂(x, ax) = (2iax)^{-1/2} e^{iπx/(2a)} Ĥ(-1/(4ax))`.
#[derive(Debug, Clone, Copy)]
pub struct HIdentityCheck {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub discrepancy: f64,
    /// Twice the combined error estimates of the two routes.
    pub allowance: f64,
}

/// Compare the direct quadrature of μ̂(x, ax) against the H-transform route.
///
/// The singularity 1/(2√s) in Ĥ is removed by the substitution s = t², which
/// folds Ĥ(u) into `∫ ĝ(t) e^{-πit/a} e^{-2πiut²} dt` — an extension-type
/// integral of ĝ handled by the same panel engine.
pub fn verify_h_identity(m: &ParabolaMeasure, a: f64, x: f64, tol: f64) -> Result<HIdentityCheck> {
    if a == 0.0 {
        return Err(Error::Domain("line slope a must be nonzero".into()));
    }
    if x == 0.0 {
        return Err(Error::DegenerateEta { eta: 0.0 });
    }
    let lhs = extension_quadrature(m, EvalPoint::new(x, a * x), tol)?;
    let (ghat, ghat_err) = m.ghat_density()?;
    let u = -1.0 / (4.0 * a * x);
    // e^{-πit/a} = e^{-2πi(1/(2a))t}
    let h_hat = ghat.transform_by_quadrature(1.0 / (2.0 * a), u, tol)?;
    let prefactor = Complex64::new(0.0, 2.0 * a * x).powf(-0.5)
        * Complex64::from_polar(1.0, PI * x / (2.0 * a));
    let rhs = prefactor * h_hat.value;
    let rhs_err = prefactor.norm() * (h_hat.est_error + ghat_err);
    Ok(HIdentityCheck {
        lhs: lhs.value,
        rhs,
        discrepancy: (lhs.value - rhs).norm(),
        allowance: 2.0 * (lhs.est_error + rhs_err),
    })
}

// ---------------------------------------------------------------------------
// The two-line counterexample
// ---------------------------------------------------------------------------

/// Frontier threshold when materializing g from its compactly supported ĝ.
const G_TABLE_FRONTIER: f64 = 2e-12;
/// Cap on the materialized half-width of g.
const G_TABLE_MAX_RADIUS: f64 = 320.0;

/// Result of the counterexample construction.
#[derive(Debug, Clone)]
pub struct CounterexampleBuild {
    /// The measure with the materialized density g; its exact ĝ is preseeded
    /// as the transform cache.
    pub measure: ParabolaMeasure,
    /// The odd profile ψ with ĝ(x) = e^{-πix/a} ψ(x).
    pub psi: Density,
    /// Bound on `∫ |g_table - g|`; every extension value of the measure sits
    /// within this of the ideal construction.
    pub table_l1_error: f64,
    /// Half-width of the materialized grid for g.
    pub table_half_width: f64,
    /// I₀ of the materialized density: positivity is the non-nullity witness.
    pub mass: MomentReport,
}

/// Build the nonzero measure whose extension vanishes on the whole line
/// `y = ax` and at every horizontal sample `(±c₂ n^{β/2}, 0)`, n ∈ ℕ:
/// take ψ an odd bump of radius `r < c₂`, set `ĝ(x) = e^{πix/a} ψ(x)` (so the
/// pushforward profile `ĝ(x) e^{-πix/a}` is odd) and recover g by the inverse
/// transform.
pub fn build_counterexample(r: f64, a: f64, c2: f64) -> Result<CounterexampleBuild> {
    if r <= 0.0 {
        return Err(Error::Spec(format!("support radius {r} must be positive")));
    }
    build_counterexample_from_psi(&Density::odd_bump(r), a, c2)
}

/// Same construction from a caller-supplied odd profile ψ.
pub fn build_counterexample_from_psi(
    psi: &Density,
    a: f64,
    c2: f64,
) -> Result<CounterexampleBuild> {
    if a == 0.0 {
        return Err(Error::Spec("slope a must be nonzero".into()));
    }
    let Some(r) = psi.support_radius() else {
        return Err(Error::Spec("ψ must be compactly supported".into()));
    };
    if r >= c2 {
        return Err(Error::Spec(format!(
            "support radius {r} must stay below the first horizontal sample c2 = {c2}"
        )));
    }
    // ĝ(x) = e^{πix/a} ψ(x) = ψ(x) e^{2πi(1/(2a))x}
    let ghat = psi.clone().modulated(1.0 / (2.0 * a), 0.0);
    // g(t) = ∫ ĝ(x) e^{+2πitx} dx, materialized on a uniform grid.
    let (table, info) = materialize_transform(&ghat, 1.0, G_TABLE_FRONTIER, G_TABLE_MAX_RADIUS)?;
    let density = Density::sample_table(table);
    let mass = density.moment(0, 1e-8);
    let measure = ParabolaMeasure::new(density, format!("odd-bump counterexample r={r} a={a}"))
        .with_cached_ghat(ghat, info.l1_error);
    Ok(CounterexampleBuild {
        measure,
        psi: psi.clone(),
        table_l1_error: info.l1_error,
        table_half_width: info.half_width,
        mass,
    })
}

/// The two-line node set Λ₁ the construction defeats:
/// `{±(c₁ n^{-α}, a c₁ n^{-α}): n ≥ 1} ∪ {±(c₂ n^{β/2}, 0): n ≥ 0}`.
pub fn counterexample_lambda(c1: f64, alpha: f64, a: f64, c2: f64, beta: f64) -> LambdaSpec {
    LambdaSpec::new(vec![
        LambdaBranch {
            line: Line::ThroughOrigin { slope: a },
            c: c1,
            exponent: -alpha,
            start_index: 1,
        },
        LambdaBranch {
            line: Line::Horizontal { height: 0.0 },
            c: c2,
            exponent: beta / 2.0,
            start_index: 0,
        },
    ])
}

/// Maximum of |μ̂| over `n_points` samples of a second through-origin line
/// `y = dx` (x = 0.1, 0.2, ...). For the counterexample this does NOT vanish
/// when d differs from the defeated slope.
pub fn second_line_max(m: &ParabolaMeasure, d: f64, n_points: usize, tol: f64) -> Result<f64> {
    if d == 0.0 {
        return Err(Error::Domain("second line slope must be nonzero".into()));
    }
    let mut max = 0.0f64;
    for k in 1..=n_points {
        let x = 0.1 * k as f64;
        let Estimate { value, .. } = extension_quadrature(m, EvalPoint::new(x, d * x), tol)?;
        max = max.max(value.norm());
    }
    Ok(max)
}

// ---------------------------------------------------------------------------
// Three-line rigidity
// ---------------------------------------------------------------------------

/// Violation of the second oddness constraint at one point, for ψ already odd:
/// `|e^{iπρx} ψ(x) + e^{-iπρx} ψ(-x)| = 2|sin(πρx)||ψ(x)|`.
pub fn rigidity_defect(psi: &Density, rho: f64, x: f64) -> f64 {
    let ph = Complex64::from_polar(1.0, PI * rho * x);
    (ph * psi.evaluate(x) + ph.conj() * psi.evaluate(-x)).norm()
}

/// Maximum double-oddness defect over the grid, with ρ = 1/d - 1/a. A nonzero
/// odd ψ violates the two constraints together everywhere off the zero set of
/// sin(πρx); only ψ ≡ 0 survives both, which is why two concurrent non-
/// horizontal lines cannot be defeated the way one can.
pub fn three_line_rigidity(psi: &Density, a: f64, d: f64, grid: &[f64]) -> Result<f64> {
    if a == 0.0 || d == 0.0 {
        return Err(Error::Domain("slopes must be nonzero".into()));
    }
    if a == d {
        return Err(Error::Spec(
            "the two through-origin slopes must differ".into(),
        ));
    }
    let rho = 1.0 / d - 1.0 / a;
    Ok(grid
        .iter()
        .map(|&x| rigidity_defect(psi, rho, x))
        .fold(0.0, f64::max))
}
