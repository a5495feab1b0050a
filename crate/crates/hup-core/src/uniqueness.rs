//! Exponent-region arithmetic for power-sequence node sets, the
//! self-improving decay bootstrap, Λ generation, and vanishing checks.

use crate::density::Estimate;
use crate::error::{Error, Result};
use crate::extension::{extension_quadrature, EvalPoint, ParabolaMeasure};
use serde::{Deserialize, Serialize};

/// An exponent pair (α, β) classifying power-node sequences.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentPair {
    pub alpha: f64,
    pub beta: f64,
}

impl ExponentPair {
    pub fn new(alpha: f64, beta: f64) -> Self {
        Self { alpha, beta }
    }

    pub fn swapped(self) -> Self {
        Self {
            alpha: self.beta,
            beta: self.alpha,
        }
    }
}

/// The boundary curve of the admissible region: `α < (1-β)²/(2-β)`.
pub fn region_a_boundary(beta: f64) -> f64 {
    (1.0 - beta) * (1.0 - beta) / (2.0 - beta)
}

/// Membership in the open region A: both exponents in (0,1) and at least one
/// of the two strict boundary inequalities holds. Boundary points are out.
pub fn region_a_contains(p: ExponentPair) -> bool {
    let (a, b) = (p.alpha, p.beta);
    let open_square = a > 0.0 && a < 1.0 && b > 0.0 && b < 1.0;
    open_square && (a < region_a_boundary(b) || b < region_a_boundary(a))
}

/// `C(α,β) = 1 + ⌊2·min(α,β)/(1-α-β)⌋`, defined for positive exponents with
/// α+β < 1.
pub fn c_lemma(p: ExponentPair) -> Result<u32> {
    let (a, b) = (p.alpha, p.beta);
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::Domain(format!(
            "exponents must be positive, got ({a}, {b})"
        )));
    }
    if a + b >= 1.0 {
        return Err(Error::Domain(format!(
            "need alpha + beta < 1, got {}",
            a + b
        )));
    }
    Ok(1 + (2.0 * a.min(b) / (1.0 - a - b)).floor() as u32)
}

/// The three-line constant `2·max(2, 1+3⌈γ/(1-γ)⌉, 1+3⌈α/(1-α)⌉)` for
/// exponents in (0,1).
pub fn c_three_lines(alpha: f64, gamma: f64) -> Result<f64> {
    for (name, v) in [("alpha", alpha), ("gamma", gamma)] {
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::Domain(format!("{name} = {v} must lie in (0,1)")));
        }
    }
    let slot = |v: f64| 1.0 + 3.0 * (v / (1.0 - v)).ceil();
    Ok(2.0 * 2.0f64.max(slot(gamma)).max(slot(alpha)))
}

// ---------------------------------------------------------------------------
// Bootstrap
// ---------------------------------------------------------------------------

/// One rung of the alternating improvement: the current decay index `j` and
/// the moment index `k` it buys.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BootstrapStep {
    pub j: i64,
    pub k: i64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BootstrapTrajectory {
    pub steps: Vec<BootstrapStep>,
    pub diverged: bool,
    pub stall_reason: Option<String>,
}

/// Divergence cap: once the driver index passes this the estimates improve
/// without bound.
pub const BOOTSTRAP_CAP: i64 = 1_000_000;

/// Iterate the self-improving estimates starting from `j = ⌊C⌋`:
/// `k ← ⌊j(1-β)/β - 1 - ε⌋` then `j ← ⌊k(1-α)/α - 1 - ε⌋`.
///
/// The estimate pair is symmetric under swapping the function with its
/// transform, which swaps (α, j) with (β, k); the iteration therefore starts
/// on the side of the smaller exponent, where the improvement factor is
/// largest. For α < β the recorded (j, k) live in that mirrored orientation.
pub fn bootstrap(p: ExponentPair, epsilon: f64, c: f64, max_iter: usize) -> BootstrapTrajectory {
    assert!(p.alpha > 0.0 && p.beta > 0.0, "exponents must be positive");
    assert!(epsilon > 0.0, "epsilon must be positive");
    assert!(c >= 0.0, "C must be nonnegative");

    let q = if p.alpha < p.beta { p.swapped() } else { p };
    let (a, b) = (q.alpha, q.beta);

    let stall = |steps: Vec<BootstrapStep>, reason: String| BootstrapTrajectory {
        steps,
        diverged: false,
        stall_reason: Some(reason),
    };

    let mut j = c.floor() as i64;
    if j < 1 {
        return stall(Vec::new(), "no starting estimate (C < 1)".into());
    }
    let mut steps = Vec::new();
    for _ in 0..max_iter {
        let k = (j as f64 * (1.0 - b) / b - 1.0 - epsilon).floor() as i64;
        steps.push(BootstrapStep { j, k });
        if k < 1 {
            return stall(steps, format!("moment index fell to k = {k}"));
        }
        let j_next = (k as f64 * (1.0 - a) / a - 1.0 - epsilon).floor() as i64;
        if j_next <= j {
            return stall(
                steps,
                format!("decay index stopped improving at j = {j_next}"),
            );
        }
        j = j_next;
        if j > BOOTSTRAP_CAP {
            return BootstrapTrajectory {
                steps,
                diverged: true,
                stall_reason: None,
            };
        }
    }
    // Strict increase sustained through the whole iteration budget.
    BootstrapTrajectory {
        steps,
        diverged: true,
        stall_reason: None,
    }
}

// ---------------------------------------------------------------------------
// Region supremum
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SupremumSearch {
    pub value: f64,
    pub argmax: ExponentPair,
}

/// Grid search of `min(α,β)/(1-α-β)` over A followed by local refinement.
pub fn region_a_supremum(grid_n: usize) -> f64 {
    region_a_supremum_detailed(grid_n).value
}

pub fn region_a_supremum_detailed(grid_n: usize) -> SupremumSearch {
    region_a_supremum_constrained(grid_n, |_, _| true)
}

/// Same search restricted to the sub-region where `constraint(α,β)` holds.
pub fn region_a_supremum_constrained<F>(grid_n: usize, constraint: F) -> SupremumSearch
where
    F: Fn(f64, f64) -> bool,
{
    assert!(grid_n >= 100, "grid_n must be at least 100");
    let quotient = |a: f64, b: f64| a.min(b) / (1.0 - a - b);
    let admissible = |a: f64, b: f64| {
        region_a_contains(ExponentPair::new(a, b)) && a + b < 1.0 && constraint(a, b)
    };

    let mut best = f64::NEG_INFINITY;
    let mut arg = (0.25, 0.25);
    for i in 0..grid_n {
        let a = (i as f64 + 0.5) / grid_n as f64;
        for j in 0..grid_n {
            let b = (j as f64 + 0.5) / grid_n as f64;
            if admissible(a, b) {
                let q = quotient(a, b);
                if q > best {
                    best = q;
                    arg = (a, b);
                }
            }
        }
    }

    // Shrinking-window refinement around the best grid cell.
    let mut w = 1.0 / grid_n as f64;
    for _ in 0..12 {
        let (a0, b0) = arg;
        for i in -16i32..=16 {
            let a = a0 + i as f64 * w / 16.0;
            for j in -16i32..=16 {
                let b = b0 + j as f64 * w / 16.0;
                if admissible(a, b) {
                    let q = quotient(a, b);
                    if q > best {
                        best = q;
                        arg = (a, b);
                    }
                }
            }
        }
        w /= 8.0;
    }
    SupremumSearch {
        value: best,
        argmax: ExponentPair::new(arg.0, arg.1),
    }
}

// ---------------------------------------------------------------------------
// Λ specifications
// ---------------------------------------------------------------------------

/// A line carrying one sign-symmetric power sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Line {
    /// Points `(±c·nᵉ, height)`: the sign flips the abscissa only.
    Horizontal { height: f64 },
    /// Points `±(c·nᵉ, slope·c·nᵉ)`: the sign flips the whole vector.
    ThroughOrigin { slope: f64 },
    /// Points `(abscissa, ±c·nᵉ)`: the sign flips the ordinate only. This is
    /// the symmetry Moebius images of through-origin branches actually carry
    /// (both sign families of `±(t, st)` land on one vertical line with
    /// mirrored ordinates).
    Vertical { abscissa: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaBranch {
    pub line: Line,
    pub c: f64,
    pub exponent: f64,
    pub start_index: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct LambdaSpec {
    pub branches: Vec<LambdaBranch>,
}

impl LambdaSpec {
    pub fn new(branches: Vec<LambdaBranch>) -> Self {
        Self { branches }
    }

    /// The two-parallel-lines node set `{(±c₁nᵅ, 0)} ∪ {(±c₂nᵝ, 1)}`.
    pub fn two_lines(c1: f64, alpha: f64, c2: f64, beta: f64) -> Self {
        Self::new(vec![
            LambdaBranch {
                line: Line::Horizontal { height: 0.0 },
                c: c1,
                exponent: alpha,
                start_index: 0,
            },
            LambdaBranch {
                line: Line::Horizontal { height: 1.0 },
                c: c2,
                exponent: beta,
                start_index: 0,
            },
        ])
    }

    pub fn validate(&self) -> Result<()> {
        for (i, br) in self.branches.iter().enumerate() {
            if br.c <= 0.0 {
                return Err(Error::Spec(format!(
                    "branch {i}: coefficient must be positive"
                )));
            }
            if br.start_index > 1 {
                return Err(Error::Spec(format!(
                    "branch {i}: start_index must be 0 or 1"
                )));
            }
            if br.exponent < 0.0 && br.start_index == 0 {
                return Err(Error::Spec(format!(
                    "branch {i}: negative exponent requires start_index 1"
                )));
            }
            if let Line::ThroughOrigin { slope } = br.line {
                if slope == 0.0 {
                    return Err(Error::Spec(format!("branch {i}: slope must be nonzero")));
                }
            }
        }
        // Slopes of distinct through-origin branches must differ.
        let slopes: Vec<f64> = self
            .branches
            .iter()
            .filter_map(|b| match b.line {
                Line::ThroughOrigin { slope } => Some(slope),
                _ => None,
            })
            .collect();
        for i in 0..slopes.len() {
            for j in i + 1..slopes.len() {
                if slopes[i] == slopes[j] {
                    return Err(Error::Spec(format!(
                        "through-origin branches {i} and {j} share slope {}",
                        slopes[i]
                    )));
                }
            }
        }
        Ok(())
    }
}

/// All branch points with index ≤ `n_max`, deduplicated.
pub fn lambda_points(spec: &LambdaSpec, n_max: u32) -> Result<Vec<EvalPoint>> {
    assert!(n_max >= 1, "n_max must be at least 1");
    spec.validate()?;
    let mut pts: Vec<(f64, f64)> = Vec::new();
    for br in &spec.branches {
        for n in br.start_index..=n_max {
            let t = br.c * (n as f64).powf(br.exponent);
            let (p, q) = match br.line {
                Line::Horizontal { height } => ((t, height), (-t, height)),
                Line::ThroughOrigin { slope } => ((t, slope * t), (-t, -slope * t)),
                Line::Vertical { abscissa } => ((abscissa, t), (abscissa, -t)),
            };
            pts.push(p);
            pts.push(q);
        }
    }
    // Exact dedup; +0.0 normalizes the sign of zero.
    for p in &mut pts {
        p.0 += 0.0;
        p.1 += 0.0;
    }
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    Ok(pts.into_iter().map(|(x, y)| EvalPoint::new(x, y)).collect())
}

// ---------------------------------------------------------------------------
// Vanishing check
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, Serialize)]
pub struct VanishingReport {
    pub points_checked: usize,
    pub max_abs: f64,
    pub worst_point: EvalPoint,
    /// Quadrature error estimate at the worst point.
    pub worst_est_error: f64,
}

/// Evaluate `μ̂` on the truncated Λ and report the largest modulus seen.
pub fn vanishing_check(
    m: &ParabolaMeasure,
    spec: &LambdaSpec,
    n_max: u32,
    tol: f64,
) -> Result<VanishingReport> {
    let pts = lambda_points(spec, n_max)?;
    let mut worst = (0.0f64, EvalPoint::new(0.0, 0.0), 0.0f64);
    for pt in &pts {
        let Estimate { value, est_error } = extension_quadrature(m, *pt, tol)?;
        let a = value.norm();
        if a >= worst.0 {
            worst = (a, *pt, est_error);
        }
    }
    Ok(VanishingReport {
        points_checked: pts.len(),
        max_abs: worst.0,
        worst_point: worst.1,
        worst_est_error: worst.2,
    })
}

// ---------------------------------------------------------------------------
// Nazarov–Sodin margin and power admissibility
// ---------------------------------------------------------------------------

/// Finite surrogate for `limsup |u_j|^{p-1}(u_{j+1}-u_j)`: the maximum over
/// the last `tail` indices of a prefix of length `100·tail`.
pub fn ns_margin<U>(u: U, p: f64, tail: usize) -> f64
where
    U: Fn(u64) -> f64,
{
    assert!(tail >= 10, "tail must be at least 10");
    assert!(p > 1.0, "p must exceed 1");
    let prefix = 100 * tail as u64;
    let mut max = f64::NEG_INFINITY;
    for j in (prefix - tail as u64)..prefix {
        let uj = u(j);
        let gap = u(j + 1) - uj;
        max = max.max(uj.abs().powf(p - 1.0) * gap);
    }
    max
}

/// The power-node reduction of the gap criterion: admissible iff α + β < 1.
pub fn power_admissible(p: ExponentPair) -> bool {
    assert!(p.alpha > 0.0 && p.beta > 0.0);
    p.alpha + p.beta < 1.0
}

/// Explicit witness search: an exponent p with `αp < 1` and `βp/(p-1) < 1`.
/// The admissible p form the open interval (1/(1-β), 1/α).
pub fn power_witness(pair: ExponentPair) -> Option<f64> {
    let lo = 1.0 / (1.0 - pair.beta);
    let hi = 1.0 / pair.alpha;
    if lo.is_nan() || hi.is_nan() || lo >= hi {
        return None;
    }
    let p = 0.5 * (lo + hi);
    let ok = p > 1.0 && pair.alpha * p < 1.0 && pair.beta * p / (p - 1.0) < 1.0;
    ok.then_some(p)
}

// ---------------------------------------------------------------------------
// Decay slope fit
// ---------------------------------------------------------------------------

/// Least-squares slope of log(magnitude) against log(x); the testable part of
/// a power-law decay estimate.
pub fn decay_slope_fit(samples: &[(f64, f64)]) -> Result<f64> {
    let n = samples.len();
    if n > 0 && samples.iter().all(|&(x, _)| x == samples[0].0) {
        return Err(Error::DegenerateFit);
    }
    if n < 8 {
        return Err(Error::Domain(format!("need at least 8 samples, got {n}")));
    }
    let mut x_min = f64::INFINITY;
    let mut x_max = 0.0f64;
    for &(x, m) in samples {
        if x <= 0.0 || x.is_nan() {
            return Err(Error::Domain(format!("abscissa {x} must be positive")));
        }
        if m <= 0.0 || m.is_nan() {
            return Err(Error::Domain(format!("magnitude {m} must be positive")));
        }
        x_min = x_min.min(x);
        x_max = x_max.max(x);
    }
    if x_max / x_min < 4.0 {
        return Err(Error::Domain(
            "samples must span at least two dyadic octaves".into(),
        ));
    }
    let logs: Vec<(f64, f64)> = samples.iter().map(|&(x, m)| (x.ln(), m.ln())).collect();
    let n_f = n as f64;
    let sx: f64 = logs.iter().map(|l| l.0).sum();
    let sy: f64 = logs.iter().map(|l| l.1).sum();
    let sxx: f64 = logs.iter().map(|l| l.0 * l.0).sum();
    let sxy: f64 = logs.iter().map(|l| l.0 * l.1).sum();
    let denom = n_f * sxx - sx * sx;
    Ok((n_f * sxy - sx * sy) / denom)
}
