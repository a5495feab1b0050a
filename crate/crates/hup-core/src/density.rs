//! One-dimensional densities g, their Fourier transforms and weighted moments.
//!
//! Everything downstream (extensions, symmetry maps, the counterexample) is
//! built on the closed-form kinds here plus [`SampleTable`] for materialized
//! data. The Fourier convention is `ĝ(ξ) = ∫ g(t) e^{-2πiξt} dt`.

use crate::error::{Error, Result};
use crate::quad::{self, PhaseSpec};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Highest moment order the moment integrator accepts.
pub const MAX_MOMENT_ORDER: u32 = 64;

/// A value together with the integrator's error estimate.
#[derive(Debug, Clone, Copy)]
pub struct Estimate {
    pub value: Complex64,
    pub est_error: f64,
}

/// Weighted-moment report: `value ≈ ∫ |x|^k |g(x)| dx`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MomentReport {
    pub order: u32,
    pub value: f64,
    pub converged: bool,
    pub est_error: f64,
}

/// Support of a density on the line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Support {
    Interval(f64, f64),
    Unbounded,
}

// ---------------------------------------------------------------------------
// Sample tables
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InterpOrder {
    Linear,
    Cubic,
}

/// Tabulated complex samples on a strictly increasing grid; evaluation outside
/// the grid returns 0. `bandwidth_hint` (cycles per unit) tells the quadrature
/// panelizer how fast the tabulated data itself can oscillate.
#[derive(Debug, Clone)]
pub struct SampleTable {
    grid: Vec<f64>,
    values: Vec<Complex64>,
    order: InterpOrder,
    uniform_step: Option<f64>,
    bandwidth_hint: Option<f64>,
}

impl SampleTable {
    pub fn new(grid: Vec<f64>, values: Vec<Complex64>, order: InterpOrder) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::InvalidInput(format!(
                "grid has {} entries but values has {}",
                grid.len(),
                values.len()
            )));
        }
        if grid.len() < 2 {
            return Err(Error::InvalidInput(
                "table needs at least two samples".into(),
            ));
        }
        if !grid.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidInput(
                "grid must be strictly increasing".into(),
            ));
        }
        let step = (grid[grid.len() - 1] - grid[0]) / (grid.len() - 1) as f64;
        let uniform = grid
            .iter()
            .enumerate()
            .all(|(i, &x)| (x - (grid[0] + step * i as f64)).abs() <= 1e-9 * step.max(1.0));
        Ok(Self {
            grid,
            values,
            order,
            uniform_step: uniform.then_some(step),
            bandwidth_hint: None,
        })
    }

    pub fn from_uniform(
        start: f64,
        step: f64,
        values: Vec<Complex64>,
        order: InterpOrder,
    ) -> Result<Self> {
        if step <= 0.0 {
            return Err(Error::InvalidInput("step must be positive".into()));
        }
        let grid = (0..values.len()).map(|i| start + step * i as f64).collect();
        Self::new(grid, values, order)
    }

    pub fn with_bandwidth_hint(mut self, cycles_per_unit: f64) -> Self {
        self.bandwidth_hint = Some(cycles_per_unit);
        self
    }

    /// Parse a two- or three-column CSV body: grid, re [, im]. A non-numeric
    /// first record is treated as a header and skipped.
    pub fn from_csv<R: std::io::Read>(reader: R, order: InterpOrder) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let mut grid = Vec::new();
        let mut values = Vec::new();
        for (row, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::InvalidInput(format!("csv: {e}")))?;
            if rec.is_empty() || (rec.len() == 1 && rec[0].is_empty()) {
                continue;
            }
            let parsed: std::result::Result<Vec<f64>, _> =
                rec.iter().map(|f| f.parse::<f64>()).collect();
            match parsed {
                Ok(nums) if nums.len() >= 2 => {
                    grid.push(nums[0]);
                    values.push(Complex64::new(nums[1], nums.get(2).copied().unwrap_or(0.0)));
                }
                Ok(_) => {
                    return Err(Error::InvalidInput(format!(
                        "csv row {} has fewer than two columns",
                        row + 1
                    )))
                }
                Err(e) => {
                    if row == 0 {
                        continue; // header row
                    }
                    return Err(Error::InvalidInput(format!("csv row {}: {e}", row + 1)));
                }
            }
        }
        Self::new(grid, values, order)
    }

    /// Write the table as three-column CSV (t, re, im), the same layout
    /// [`from_csv`](Self::from_csv) accepts.
    pub fn to_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,re,im")?;
        for (t, v) in self.grid.iter().zip(&self.values) {
            writeln!(w, "{t},{},{}", v.re, v.im)?;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn bandwidth_hint(&self) -> Option<f64> {
        self.bandwidth_hint
    }

    fn cell_of(&self, t: f64) -> Option<usize> {
        let n = self.grid.len();
        if t < self.grid[0] || t > self.grid[n - 1] {
            return None;
        }
        let i = match self.uniform_step {
            Some(h) => (((t - self.grid[0]) / h) as usize).min(n - 2),
            None => self
                .grid
                .partition_point(|&x| x <= t)
                .saturating_sub(1)
                .min(n - 2),
        };
        Some(i)
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        let Some(i) = self.cell_of(t) else {
            return Complex64::new(0.0, 0.0);
        };
        match self.order {
            InterpOrder::Linear => {
                let (x0, x1) = (self.grid[i], self.grid[i + 1]);
                let w = (t - x0) / (x1 - x0);
                self.values[i] * (1.0 - w) + self.values[i + 1] * w
            }
            InterpOrder::Cubic => {
                let n = self.grid.len();
                if n < 4 {
                    let (x0, x1) = (self.grid[i], self.grid[i + 1]);
                    let w = (t - x0) / (x1 - x0);
                    return self.values[i] * (1.0 - w) + self.values[i + 1] * w;
                }
                // 4-point Lagrange stencil around the cell, clamped at the ends.
                let il = i.saturating_sub(1).min(n - 4);
                let xs = &self.grid[il..il + 4];
                let vs = &self.values[il..il + 4];
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..4 {
                    let mut l = 1.0;
                    for m in 0..4 {
                        if m != j {
                            l *= (t - xs[m]) / (xs[j] - xs[m]);
                        }
                    }
                    acc += vs[j] * l;
                }
                acc
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Density
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub enum DensityKind {
    /// `exp(-π((t-center)/width)²) · e^{2πi·linear_phase·t}`
    Gaussian {
        width: f64,
        center: f64,
        linear_phase: f64,
    },
    /// L²-normalized Hermite function of the given order (Fourier eigenfunction
    /// with eigenvalue (-i)^order under this convention).
    Hermite {
        order: u32,
    },
    /// `exp(-1/(1-u²))` with `u = (t-center)/radius`, zero outside.
    SmoothBump {
        center: f64,
        radius: f64,
    },
    /// `u · exp(-1/(1-u²))` with `u = t/radius`; odd by construction.
    OddBump {
        radius: f64,
    },
    /// `base(t) · e^{2πi(linear_phase·t + quadratic_phase·t²)}`
    PhaseModulated {
        base: Box<Density>,
        linear_phase: f64,
        quadratic_phase: f64,
    },
    SampleTable(SampleTable),
}

/// A one-dimensional complex density. `scale` is a constant complex factor
/// applied on top of the kind; it absorbs the unimodular constants produced by
/// translations and lets tests scale or negate a density exactly.
#[derive(Debug, Clone)]
pub struct Density {
    pub kind: DensityKind,
    pub scale: Complex64,
}

impl Density {
    pub fn new(kind: DensityKind) -> Self {
        Self {
            kind,
            scale: Complex64::new(1.0, 0.0),
        }
    }

    pub fn gaussian(width: f64, center: f64, linear_phase: f64) -> Self {
        assert!(width > 0.0, "gaussian width must be positive");
        Self::new(DensityKind::Gaussian {
            width,
            center,
            linear_phase,
        })
    }

    pub fn unit_gaussian() -> Self {
        Self::gaussian(1.0, 0.0, 0.0)
    }

    pub fn hermite(order: u32) -> Self {
        Self::new(DensityKind::Hermite { order })
    }

    pub fn smooth_bump(center: f64, radius: f64) -> Self {
        assert!(radius > 0.0, "bump radius must be positive");
        Self::new(DensityKind::SmoothBump { center, radius })
    }

    pub fn odd_bump(radius: f64) -> Self {
        assert!(radius > 0.0, "bump radius must be positive");
        Self::new(DensityKind::OddBump { radius })
    }

    pub fn sample_table(table: SampleTable) -> Self {
        Self::new(DensityKind::SampleTable(table))
    }

    pub fn scaled(mut self, s: Complex64) -> Self {
        self.scale *= s;
        self
    }

    /// Multiply by `e^{2πi(lin·t + quad·t²)}`, merging with an existing
    /// modulation layer when possible.
    pub fn modulated(self, lin: f64, quad: f64) -> Self {
        if lin == 0.0 && quad == 0.0 {
            return self;
        }
        let scale = self.scale;
        match self.kind {
            DensityKind::PhaseModulated {
                base,
                linear_phase,
                quadratic_phase,
            } => Self {
                kind: DensityKind::PhaseModulated {
                    base,
                    linear_phase: linear_phase + lin,
                    quadratic_phase: quadratic_phase + quad,
                },
                scale,
            },
            DensityKind::Gaussian {
                width,
                center,
                linear_phase,
            } if quad == 0.0 => Self {
                kind: DensityKind::Gaussian {
                    width,
                    center,
                    linear_phase: linear_phase + lin,
                },
                scale,
            },
            kind => Self {
                kind: DensityKind::PhaseModulated {
                    base: Box::new(Self {
                        kind,
                        scale: Complex64::new(1.0, 0.0),
                    }),
                    linear_phase: lin,
                    quadratic_phase: quad,
                },
                scale,
            },
        }
    }

    /// The density `t ↦ g(t - v)`. Translation is exact for every kind that
    /// can represent it; odd bumps (pinned to the origin) and Hermite modes
    /// reject nonzero shifts.
    pub fn translate(&self, v: f64) -> Result<Self> {
        if v == 0.0 {
            return Ok(self.clone());
        }
        let scale = self.scale;
        match &self.kind {
            DensityKind::Gaussian {
                width,
                center,
                linear_phase,
            } => {
                // g(t-v) picks up the constant e^{-2πi p v}.
                let phase = Complex64::from_polar(1.0, -2.0 * PI * linear_phase * v);
                Ok(Self {
                    kind: DensityKind::Gaussian {
                        width: *width,
                        center: center + v,
                        linear_phase: *linear_phase,
                    },
                    scale: scale * phase,
                })
            }
            DensityKind::SmoothBump { center, radius } => Ok(Self {
                kind: DensityKind::SmoothBump {
                    center: center + v,
                    radius: *radius,
                },
                scale,
            }),
            DensityKind::SampleTable(table) => {
                let grid = table.grid.iter().map(|x| x + v).collect();
                let mut shifted = SampleTable::new(grid, table.values.clone(), table.order)?;
                shifted.bandwidth_hint = table.bandwidth_hint;
                Ok(Self {
                    kind: DensityKind::SampleTable(shifted),
                    scale,
                })
            }
            DensityKind::PhaseModulated {
                base,
                linear_phase,
                quadratic_phase,
            } => {
                // base(t-v) e^{2πi(p(t-v) + q(t-v)²)}
                //   = [translate(base)](t) e^{2πi(q t² + (p-2qv) t)} · e^{2πi(qv² - pv)}
                let inner = base.translate(v)?;
                let phase = Complex64::from_polar(
                    1.0,
                    2.0 * PI * (quadratic_phase * v * v - linear_phase * v),
                );
                Ok(inner
                    .modulated(linear_phase - 2.0 * quadratic_phase * v, *quadratic_phase)
                    .scaled(scale * phase))
            }
            DensityKind::Hermite { .. } => Err(Error::Unsupported(
                "translated Hermite mode has no closed representation".into(),
            )),
            DensityKind::OddBump { .. } => Err(Error::Unsupported(
                "translating an odd bump would break its origin symmetry".into(),
            )),
        }
    }

    // -- pointwise evaluation ------------------------------------------------

    pub fn evaluate(&self, t: f64) -> Complex64 {
        self.scale * self.eval_kind(t)
    }

    fn eval_kind(&self, t: f64) -> Complex64 {
        match &self.kind {
            DensityKind::Gaussian {
                width,
                center,
                linear_phase,
            } => {
                let u = (t - center) / width;
                Complex64::from_polar((-PI * u * u).exp(), 2.0 * PI * linear_phase * t)
            }
            DensityKind::Hermite { order } => Complex64::new(hermite_fn(*order, t), 0.0),
            DensityKind::SmoothBump { center, radius } => {
                Complex64::new(bump_profile((t - center) / radius), 0.0)
            }
            DensityKind::OddBump { radius } => {
                let u = t / radius;
                Complex64::new(u * bump_profile(u), 0.0)
            }
            DensityKind::PhaseModulated {
                base,
                linear_phase,
                quadratic_phase,
            } => {
                base.evaluate(t)
                    * Complex64::from_polar(
                        1.0,
                        2.0 * PI * (linear_phase * t + quadratic_phase * t * t),
                    )
            }
            DensityKind::SampleTable(table) => table.eval(t),
        }
    }

    // -- structure probes ----------------------------------------------------

    pub fn support(&self) -> Support {
        match &self.kind {
            DensityKind::Gaussian { .. } | DensityKind::Hermite { .. } => Support::Unbounded,
            DensityKind::SmoothBump { center, radius } => {
                Support::Interval(center - radius, center + radius)
            }
            DensityKind::OddBump { radius } => Support::Interval(-radius, *radius),
            DensityKind::PhaseModulated { base, .. } => base.support(),
            DensityKind::SampleTable(t) => Support::Interval(t.grid[0], t.grid[t.grid.len() - 1]),
        }
    }

    /// Radius of the support around the origin, `None` when unbounded.
    pub fn support_radius(&self) -> Option<f64> {
        match self.support() {
            Support::Interval(lo, hi) => Some(lo.abs().max(hi.abs())),
            Support::Unbounded => None,
        }
    }

    /// Accumulated (linear, quadratic) phase coefficients under e^{2πi(...)}.
    pub(crate) fn phase_coeffs(&self) -> (f64, f64) {
        match &self.kind {
            DensityKind::Gaussian { linear_phase, .. } => (*linear_phase, 0.0),
            DensityKind::PhaseModulated {
                base,
                linear_phase,
                quadratic_phase,
            } => {
                let (l, q) = base.phase_coeffs();
                (l + linear_phase, q + quadratic_phase)
            }
            _ => (0.0, 0.0),
        }
    }

    /// Finest amplitude feature the quadrature panels must resolve.
    pub(crate) fn amp_max_width(&self) -> f64 {
        match &self.kind {
            DensityKind::Gaussian { width, .. } => width / 3.0,
            DensityKind::Hermite { order } => (2.0 * PI / (2.0 * *order as f64 + 1.0)).sqrt() / 3.0,
            DensityKind::SmoothBump { radius, .. } | DensityKind::OddBump { radius } => {
                radius / 4.0
            }
            DensityKind::PhaseModulated { base, .. } => base.amp_max_width(),
            DensityKind::SampleTable(t) => match t.bandwidth_hint {
                Some(b) if b > 0.0 => 0.75 / b,
                _ => {
                    let mean_step =
                        (t.grid[t.grid.len() - 1] - t.grid[0]) / (t.grid.len() - 1) as f64;
                    4.0 * mean_step
                }
            },
        }
    }

    /// Finite integration window [lo, hi] plus a bound on the |g| mass outside.
    pub(crate) fn integration_domain(&self, eps: f64) -> (f64, f64, f64) {
        match self.support() {
            Support::Interval(lo, hi) => (lo, hi, 0.0),
            Support::Unbounded => match &self.kind {
                DensityKind::Gaussian { width, center, .. } => {
                    let s = self.scale.norm().max(1e-300);
                    let u = ((s * width / eps).max(std::f64::consts::E).ln() / PI).sqrt() + 1.0;
                    let tail = s * width * (-PI * u * u).exp() / (PI * u);
                    (center - width * u, center + width * u, tail)
                }
                DensityKind::Hermite { order } => {
                    let s = self.scale.norm().max(1e-300);
                    let turn = ((2.0 * *order as f64 + 1.0) / (2.0 * PI)).sqrt();
                    let mut r = turn + 1.0;
                    let thresh = eps / (8.0 * s * (turn + 2.0));
                    while hermite_fn(*order, r).abs() > thresh
                        || hermite_fn(*order, r + 0.25).abs() > thresh
                    {
                        r += 0.25;
                        if r > turn + 60.0 {
                            break;
                        }
                    }
                    (-r, r, eps / 4.0)
                }
                DensityKind::PhaseModulated { base, .. } => base.integration_domain(eps),
                _ => unreachable!("compact kinds handled above"),
            },
        }
    }

    /// Exact transform values for the kinds that have them: Gaussians under
    /// any phase layers, and unmodulated Hermite modes on the line eta = 0.
    pub(crate) fn closed_form_extension(&self, xi: f64, eta: f64) -> Option<Complex64> {
        let v = match &self.kind {
            DensityKind::Gaussian {
                width,
                center,
                linear_phase,
            } => Some(gaussian_kernel_integral(
                *width,
                *center,
                *linear_phase,
                0.0,
                xi,
                eta,
            )),
            DensityKind::PhaseModulated {
                base,
                linear_phase,
                quadratic_phase,
            } => base.closed_form_extension(xi - linear_phase, eta - quadratic_phase),
            DensityKind::Hermite { order } if eta == 0.0 => {
                let eig = Complex64::new(0.0, -1.0).powu(*order);
                Some(eig * hermite_fn(*order, xi))
            }
            _ => None,
        };
        v.map(|v| v * self.scale)
    }

    /// Default integration tolerance: 1e-10 for compactly supported
    /// densities, 1e-8 when tails have to be truncated.
    pub fn default_tolerance(&self) -> f64 {
        match self.support() {
            Support::Interval(..) => 1e-10,
            Support::Unbounded => 1e-8,
        }
    }

    /// Flatten a Gaussian under any number of phase layers into
    /// `(width, center, lin, quad, scale)` with `g(t) = scale ·
    /// e^{-π((t-c)/w)²} e^{2πi(lin·t + quad·t²)}`.
    fn as_gaussian_chain(&self) -> Option<(f64, f64, f64, f64, Complex64)> {
        match &self.kind {
            DensityKind::Gaussian {
                width,
                center,
                linear_phase,
            } => Some((*width, *center, *linear_phase, 0.0, self.scale)),
            DensityKind::PhaseModulated {
                base,
                linear_phase,
                quadratic_phase,
            } => {
                let (w, c, p, q, s) = base.as_gaussian_chain()?;
                Some((w, c, p + linear_phase, q + quadratic_phase, s * self.scale))
            }
            _ => None,
        }
    }

    /// The transform ĝ as another exact `Density`, when it is representable:
    /// Hermite modes (Fourier eigenfunctions) and Gaussians under arbitrary
    /// linear and quadratic phase layers — the transform of a chirped Gaussian
    /// is again a chirped Gaussian.
    pub fn fourier_transform_density(&self) -> Option<Density> {
        if let DensityKind::Hermite { order } = &self.kind {
            let eig = Complex64::new(0.0, -1.0).powu(*order);
            return Some(Density::hermite(*order).scaled(eig * self.scale));
        }
        // Completing the square in ∫ e^{-π((t-c)/w)²} e^{2πi(pt+qt²)} e^{-2πiξt} dt
        // with A = w^{-2} - 2iq gives, in terms of u = ξ - p - 2qc,
        //   ĝ(ξ) = A^{-1/2} e^{2πi(pc+qc²)} · e^{-π(u/W)²} e^{2πiκu²} e^{-2πicξ},
        // where W = |A|·w and κ = -q/|A|².
        let (w, c, p, q, scale) = self.as_gaussian_chain()?;
        let a = Complex64::new(1.0 / (w * w), -2.0 * q);
        let norm_sq = a.norm_sqr();
        let big_w = a.norm() * w;
        let kappa = -q / norm_sq;
        let mu = p + 2.0 * q * c;
        // Expand κu² about ξ = 0 and fold the constants into the scale.
        let lin = -c - 2.0 * kappa * mu;
        let amp = scale
            * a.powf(-0.5)
            * Complex64::from_polar(1.0, 2.0 * PI * (p * c + q * c * c + kappa * mu * mu));
        Some(Density::gaussian(big_w, mu, 0.0).modulated(lin, kappa).scaled(amp))
    }

    // -- integral operations ---------------------------------------------------

    /// `ĝ(ξ)` to the requested tolerance. Closed forms are exact; everything
    /// else goes through the oscillatory panel engine.
    pub fn fourier_transform_1d(&self, xi: f64, tol: f64) -> Result<Estimate> {
        assert!(tol > 0.0);
        if let Some(value) = self.closed_form_extension(xi, 0.0) {
            return Ok(Estimate {
                value,
                est_error: 1e-15 * (1.0 + value.norm()),
            });
        }
        self.transform_by_quadrature(xi, 0.0, tol)
    }

    /// Quadrature route for `∫ g(t) e^{-2πi(ξt + ηt²)} dt`; shared with the
    /// extension module.
    pub(crate) fn transform_by_quadrature(&self, xi: f64, eta: f64, tol: f64) -> Result<Estimate> {
        let (lo, hi, tail) = self.integration_domain(tol / 10.0);
        let (pl, pq) = self.phase_coeffs();
        let phase = PhaseSpec::new(xi - pl, eta - pq);
        let f = |t: f64| {
            self.evaluate(t) * Complex64::from_polar(1.0, -2.0 * PI * (xi * t + eta * t * t))
        };
        let quad_tol = (tol - tail).max(tol * 0.1);
        let out = quad::oscillatory_integral(
            &f,
            lo,
            hi,
            phase,
            self.amp_max_width(),
            quad_tol,
            quad::DEFAULT_MAX_PANELS,
        );
        let est_error = out.est_error + tail;
        if !out.converged {
            return Err(Error::NonConvergence {
                partial: out.value,
                achieved: est_error,
                requested: tol,
            });
        }
        Ok(Estimate {
            value: out.value,
            est_error,
        })
    }

    /// Weighted moment `I_k = ∫ |x|^k |g(x)| dx`. Non-convergence is reported
    /// in the flags, never thrown.
    pub fn moment(&self, k: u32, tol: f64) -> MomentReport {
        assert!(
            k <= MAX_MOMENT_ORDER,
            "moment order {k} exceeds the configured maximum {MAX_MOMENT_ORDER}"
        );
        assert!(tol > 0.0);
        let kf = k as f64;
        let weight = move |t: f64| if k == 0 { 1.0 } else { t.abs().powf(kf) };

        let (lo, hi, mut tail) = match self.support() {
            Support::Interval(lo, hi) => (lo, hi, 0.0),
            Support::Unbounded => {
                // Push the window out until the weighted envelope certifies the tail.
                let (l0, h0, _) = self.integration_domain(1e-14);
                let mut r = l0.abs().max(h0.abs()).max(1.0);
                let peak = (kf / (2.0 * PI)).sqrt().max(1.0);
                let mut ok = false;
                while r < 80.0 * peak {
                    let m =
                        weight(r) * self.evaluate(r).norm() + weight(-r) * self.evaluate(-r).norm();
                    if m * 4.0 * r < tol / 4.0 {
                        ok = true;
                        break;
                    }
                    r *= 1.25;
                }
                if !ok {
                    // Tail cannot be certified; report the partial integral.
                    let out = quad::adaptive_real(
                        &|t: f64| weight(t) * self.evaluate(t).norm(),
                        -r,
                        r,
                        self.amp_max_width(),
                        tol,
                        quad::DEFAULT_MAX_PANELS,
                    );
                    return MomentReport {
                        order: k,
                        value: out.value.re.max(0.0),
                        converged: false,
                        est_error: f64::INFINITY,
                    };
                }
                let m = weight(r) * self.evaluate(r).norm() + weight(-r) * self.evaluate(-r).norm();
                (-r, r, m * 4.0 * r)
            }
        };

        let f = |t: f64| weight(t) * self.evaluate(t).norm();
        let quad_tol = (tol - tail).max(tol * 0.1);
        let out = quad::adaptive_real(
            &f,
            lo,
            hi,
            self.amp_max_width(),
            quad_tol,
            quad::DEFAULT_MAX_PANELS,
        );
        tail += out.est_error;
        MomentReport {
            order: k,
            value: out.value.re.max(0.0),
            converged: out.converged && tail <= tol,
            est_error: tail,
        }
    }
}

/// `exp(-1/(1-u²))` on (-1, 1), zero outside.
fn bump_profile(u: f64) -> f64 {
    if u.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - u * u)).exp()
    }
}

/// L²-normalized Hermite function `e_n(t) = c_n H_n(√(2π) t) e^{-πt²}` via the
/// stable normalized recurrence (no factorials).
fn hermite_fn(order: u32, t: f64) -> f64 {
    let y = (2.0 * PI).sqrt() * t;
    let g = (-PI * t * t).exp();
    let mut e0 = 2.0f64.powf(0.25) * g;
    if order == 0 {
        return e0;
    }
    let mut e1 = y * 2.0f64.sqrt() * e0;
    for n in 1..order {
        let nf = n as f64;
        let e2 = y * (2.0 / (nf + 1.0)).sqrt() * e1 - (nf / (nf + 1.0)).sqrt() * e0;
        e0 = e1;
        e1 = e2;
    }
    e1
}

/// Exact value of `∫ exp(-π((t-c)/w)²) e^{2πi(pt + qt²)} e^{-2πi(ξt + ηt²)} dt`
/// by completing the square; principal square root throughout.
pub(crate) fn gaussian_kernel_integral(
    width: f64,
    center: f64,
    lin_phase: f64,
    quad_phase: f64,
    xi: f64,
    eta: f64,
) -> Complex64 {
    let xr = xi - lin_phase;
    let er = eta - quad_phase;
    let a = Complex64::new(1.0 / (width * width), 2.0 * er);
    let u = Complex64::new(xr + 2.0 * er * center, 0.0);
    let front = Complex64::from_polar(1.0, -2.0 * PI * (xr * center + er * center * center));
    front * a.powf(-0.5) * (-(PI) * u * u / a).exp()
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct ComplexDoc {
    re: f64,
    #[serde(default)]
    im: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum KindDoc {
    Gaussian {
        width: f64,
        #[serde(default)]
        center: f64,
        #[serde(default)]
        linear_phase: f64,
    },
    Hermite {
        order: u32,
    },
    SmoothBump {
        center: f64,
        radius: f64,
    },
    OddBump {
        radius: f64,
    },
    PhaseModulated {
        base: Box<DensityDoc>,
        #[serde(default)]
        linear_phase: f64,
        #[serde(default)]
        quadratic_phase: f64,
    },
    SampleTable {
        grid: Vec<f64>,
        values_re: Vec<f64>,
        #[serde(default)]
        values_im: Option<Vec<f64>>,
        #[serde(default = "default_interp")]
        interpolation: InterpOrder,
        #[serde(default)]
        bandwidth_hint: Option<f64>,
    },
}

fn default_interp() -> InterpOrder {
    InterpOrder::Cubic
}

#[derive(Serialize, Deserialize)]
pub(crate) struct DensityDoc {
    #[serde(flatten)]
    kind: KindDoc,
    #[serde(default)]
    scale: Option<ComplexDoc>,
}

impl TryFrom<DensityDoc> for Density {
    type Error = Error;

    fn try_from(doc: DensityDoc) -> Result<Self> {
        let kind = match doc.kind {
            KindDoc::Gaussian {
                width,
                center,
                linear_phase,
            } => {
                if width <= 0.0 {
                    return Err(Error::InvalidInput(
                        "gaussian width must be positive".into(),
                    ));
                }
                DensityKind::Gaussian {
                    width,
                    center,
                    linear_phase,
                }
            }
            KindDoc::Hermite { order } => DensityKind::Hermite { order },
            KindDoc::SmoothBump { center, radius } => {
                if radius <= 0.0 {
                    return Err(Error::InvalidInput("bump radius must be positive".into()));
                }
                DensityKind::SmoothBump { center, radius }
            }
            KindDoc::OddBump { radius } => {
                if radius <= 0.0 {
                    return Err(Error::InvalidInput("bump radius must be positive".into()));
                }
                DensityKind::OddBump { radius }
            }
            KindDoc::PhaseModulated {
                base,
                linear_phase,
                quadratic_phase,
            } => DensityKind::PhaseModulated {
                base: Box::new(Density::try_from(*base)?),
                linear_phase,
                quadratic_phase,
            },
            KindDoc::SampleTable {
                grid,
                values_re,
                values_im,
                interpolation,
                bandwidth_hint,
            } => {
                if let Some(im) = &values_im {
                    if im.len() != values_re.len() {
                        return Err(Error::InvalidInput(
                            "values_im length differs from values_re".into(),
                        ));
                    }
                }
                let values = values_re
                    .iter()
                    .enumerate()
                    .map(|(i, &re)| Complex64::new(re, values_im.as_ref().map_or(0.0, |im| im[i])))
                    .collect();
                let mut table = SampleTable::new(grid, values, interpolation)?;
                table.bandwidth_hint = bandwidth_hint;
                DensityKind::SampleTable(table)
            }
        };
        let scale = doc
            .scale
            .map_or(Complex64::new(1.0, 0.0), |s| Complex64::new(s.re, s.im));
        Ok(Density { kind, scale })
    }
}

impl From<Density> for DensityDoc {
    fn from(d: Density) -> Self {
        let kind = match d.kind {
            DensityKind::Gaussian {
                width,
                center,
                linear_phase,
            } => KindDoc::Gaussian {
                width,
                center,
                linear_phase,
            },
            DensityKind::Hermite { order } => KindDoc::Hermite { order },
            DensityKind::SmoothBump { center, radius } => KindDoc::SmoothBump { center, radius },
            DensityKind::OddBump { radius } => KindDoc::OddBump { radius },
            DensityKind::PhaseModulated {
                base,
                linear_phase,
                quadratic_phase,
            } => KindDoc::PhaseModulated {
                base: Box::new(DensityDoc::from(*base)),
                linear_phase,
                quadratic_phase,
            },
            DensityKind::SampleTable(t) => KindDoc::SampleTable {
                grid: t.grid,
                values_re: t.values.iter().map(|v| v.re).collect(),
                values_im: Some(t.values.iter().map(|v| v.im).collect()),
                interpolation: t.order,
                bandwidth_hint: t.bandwidth_hint,
            },
        };
        let scale = (d.scale != Complex64::new(1.0, 0.0)).then_some(ComplexDoc {
            re: d.scale.re,
            im: d.scale.im,
        });
        DensityDoc { kind, scale }
    }
}

impl Serialize for Density {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DensityDoc::from(self.clone()).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Density {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = DensityDoc::deserialize(d)?;
        Density::try_from(doc).map_err(serde::de::Error::custom)
    }
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const EXP_NEG_PI: f64 = 0.043_213_918_263_772_26;

    #[test]
    fn evaluate_closed_form_kinds() {
        let g = Density::unit_gaussian();
        assert_abs_diff_eq!(g.evaluate(0.0).re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(g.evaluate(1.0).re, EXP_NEG_PI, epsilon = 1e-15);
        assert_eq!(Density::odd_bump(0.7).evaluate(0.0).re, 0.0);
        // Bumps vanish identically outside their support.
        let b = Density::smooth_bump(0.3, 0.5);
        assert_eq!(b.evaluate(0.81).norm(), 0.0);
        assert_eq!(b.evaluate(-0.21).norm(), 0.0);
        assert!(b.evaluate(0.3).re > 0.0);
    }

    #[test]
    fn odd_bump_is_exactly_odd() {
        let b = Density::odd_bump(0.8);
        for i in 0..40 {
            let x = -1.0 + 0.05 * i as f64;
            assert_eq!(b.evaluate(x), -b.evaluate(-x));
        }
    }

    #[test]
    fn gaussian_transform_is_self_dual() {
        let g = Density::unit_gaussian();
        for xi in [0.0, 0.5, 1.0, -2.3] {
            let ft = g.fourier_transform_1d(xi, 1e-10).unwrap();
            assert_abs_diff_eq!(ft.value.re, (-PI * xi * xi).exp(), epsilon = 1e-12);
            assert_abs_diff_eq!(ft.value.im, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn gaussian_closed_form_matches_quadrature_with_center_and_phase() {
        // The completed-square formula against the panel engine, off-center
        // and modulated.
        let g = Density::gaussian(0.8, 0.4, 0.7);
        for (xi, eta) in [(0.3, 0.0), (1.1, 0.6), (-0.7, -1.2)] {
            let exact = g.closed_form_extension(xi, eta).unwrap();
            let quad = g.transform_by_quadrature(xi, eta, 1e-11).unwrap();
            assert!(
                (exact - quad.value).norm() < 1e-10,
                "({xi},{eta}): {}",
                (exact - quad.value).norm()
            );
        }
    }

    #[test]
    fn hermite_is_fourier_eigenfunction() {
        for order in [1u32, 2, 5] {
            let h = Density::hermite(order);
            for xi in [0.3, 1.1] {
                let ft = h.fourier_transform_1d(xi, 1e-10).unwrap();
                let expect = Complex64::new(0.0, -1.0).powu(order) * h.evaluate(xi);
                assert!((ft.value - expect).norm() < 1e-12);
                // cross-check the closed form against real quadrature
                let q = h.transform_by_quadrature(xi, 0.0, 1e-10).unwrap();
                assert!(
                    (q.value - expect).norm() < 1e-9,
                    "order {order} xi {xi}: {}",
                    (q.value - expect).norm()
                );
            }
        }
    }

    #[test]
    fn bump_mass_matches_riemann_oracle() {
        // Independent oracle: dense midpoint Riemann sum over the support.
        let b = Density::smooth_bump(0.0, 0.5);
        let n = 400_000;
        let h = 1.0 / n as f64;
        let riemann: f64 = (0..n)
            .map(|i| b.evaluate(-0.5 + (i as f64 + 0.5) * h).re * h)
            .sum();
        let ft0 = b.fourier_transform_1d(0.0, 1e-10).unwrap();
        assert_abs_diff_eq!(ft0.value.re, riemann, epsilon = 1e-8);
        assert_abs_diff_eq!(ft0.value.im, 0.0, epsilon = 1e-12);
        // Frozen from the oracle.
        assert_abs_diff_eq!(ft0.value.re, 0.221_996_908_084_039, epsilon = 1e-9);
    }

    #[test]
    fn odd_bump_transform_is_imaginary_and_odd() {
        let b = Density::odd_bump(0.5);
        for xi in [0.2, 0.9, 2.5] {
            let plus = b.fourier_transform_1d(xi, 1e-10).unwrap().value;
            let minus = b.fourier_transform_1d(-xi, 1e-10).unwrap().value;
            assert!(plus.re.abs() < 1e-10);
            assert!((plus + minus).norm() < 2e-10);
        }
    }

    #[test]
    fn unreachable_tolerance_reports_nonconvergence() {
        // Below the floating-point floor the panel budget runs out and the
        // partial value plus achieved error come back in the error.
        let b = Density::smooth_bump(0.0, 0.5);
        match b.fourier_transform_1d(0.3, 1e-30) {
            Err(Error::NonConvergence {
                partial, achieved, ..
            }) => {
                assert!(partial.norm() < 1.0);
                assert!(achieved > 1e-30);
            }
            other => panic!("expected NonConvergence, got {other:?}"),
        }
    }

    #[test]
    fn gaussian_moments() {
        let g = Density::unit_gaussian();
        let m0 = g.moment(0, 1e-10);
        assert!(m0.converged);
        assert_abs_diff_eq!(m0.value, 1.0, epsilon = 1e-9);
        // ∫ t² e^{-πt²} dt = 1/(2π)
        let m2 = g.moment(2, 1e-10);
        assert!(m2.converged);
        assert_abs_diff_eq!(m2.value, 0.159_154_943_091_895_35, epsilon = 1e-9);
    }

    #[test]
    fn compact_support_moments_always_converge() {
        let b = Density::smooth_bump(0.2, 0.4);
        for k in [0u32, 3, 17, 64] {
            let m = b.moment(k, 1e-9);
            assert!(m.converged, "k = {k}");
            assert!(m.value.is_finite() && m.value >= 0.0);
        }
    }

    #[test]
    fn moment_scales_linearly_with_density_scale() {
        let g = Density::unit_gaussian();
        let base = g.moment(2, 1e-10).value;
        for s in [0.25, 3.0] {
            let scaled = g.clone().scaled(Complex64::new(s, 0.0)).moment(2, 1e-10);
            assert_abs_diff_eq!(scaled.value, s * base, epsilon = 1e-8);
        }
    }

    #[test]
    fn transform_bounded_by_mass() {
        for d in [
            Density::unit_gaussian(),
            Density::smooth_bump(0.1, 0.6),
            Density::odd_bump(0.5),
            Density::hermite(3),
        ] {
            let mass = d.moment(0, 1e-9).value;
            for xi in [0.0, 0.7, 1.9] {
                let ft = d.fourier_transform_1d(xi, 1e-9).unwrap();
                assert!(ft.value.norm() <= mass + 1e-8);
            }
        }
    }

    #[test]
    fn sample_table_interpolates_and_vanishes_outside() {
        let grid: Vec<f64> = (0..=100).map(|i| -1.0 + 0.02 * i as f64).collect();
        let values: Vec<Complex64> = grid
            .iter()
            .map(|&x| Complex64::new((-PI * x * x).exp(), 0.0))
            .collect();
        let t = SampleTable::new(grid, values, InterpOrder::Cubic).unwrap();
        let d = Density::sample_table(t);
        assert_eq!(d.evaluate(1.5).norm(), 0.0);
        assert_eq!(d.evaluate(-1.01).norm(), 0.0);
        assert_abs_diff_eq!(
            d.evaluate(0.313).re,
            (-PI * 0.313f64 * 0.313).exp(),
            epsilon = 1e-7
        );
    }

    #[test]
    fn sample_table_rejects_bad_grids() {
        let bad = SampleTable::new(
            vec![0.0, 0.0, 1.0],
            vec![Complex64::new(1.0, 0.0); 3],
            InterpOrder::Linear,
        );
        assert!(matches!(bad, Err(Error::InvalidInput(_))));
        let short = SampleTable::new(
            vec![0.0],
            vec![Complex64::new(1.0, 0.0)],
            InterpOrder::Linear,
        );
        assert!(short.is_err());
    }

    #[test]
    fn csv_round_trip() {
        let csv_body = "t,re,im\n-1.0,0.0,0.5\n0.0,1.0,0.0\n1.0,0.0,-0.5\n";
        let t = SampleTable::from_csv(csv_body.as_bytes(), InterpOrder::Linear).unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t.eval(0.0), Complex64::new(1.0, 0.0));
        assert_eq!(t.eval(-1.0), Complex64::new(0.0, 0.5));
        // two-column form, no header
        let t2 = SampleTable::from_csv("0,1\n1,2\n".as_bytes(), InterpOrder::Linear).unwrap();
        assert_eq!(t2.eval(1.0), Complex64::new(2.0, 0.0));
        // write → read reproduces the samples exactly
        let mut buf = Vec::new();
        t.to_csv(&mut buf).unwrap();
        let back = SampleTable::from_csv(buf.as_slice(), InterpOrder::Linear).unwrap();
        assert_eq!(back.grid(), t.grid());
        assert_eq!(back.values(), t.values());
    }

    #[test]
    fn json_round_trip() {
        let d = Density::gaussian(0.8, 0.3, -0.2)
            .modulated(0.5, 1.5)
            .scaled(Complex64::new(0.0, 2.0));
        let json = serde_json::to_string(&d).unwrap();
        let back: Density = serde_json::from_str(&json).unwrap();
        for t in [-1.3, 0.0, 0.77] {
            assert!((d.evaluate(t) - back.evaluate(t)).norm() < 1e-15);
        }
        let plain = r#"{"kind":"gaussian","width":1.0}"#;
        let g: Density = serde_json::from_str(plain).unwrap();
        assert_abs_diff_eq!(g.evaluate(0.0).re, 1.0, epsilon = 1e-15);
        let bad = r#"{"kind":"gaussian","width":-1.0}"#;
        assert!(serde_json::from_str::<Density>(bad).is_err());
    }

    #[test]
    fn transform_density_matches_pointwise_transform() {
        let cases = [
            Density::gaussian(0.8, 0.4, 0.7),
            Density::hermite(3),
            Density::gaussian(1.2, -0.3, 0.0).modulated(0.6, 0.0),
        ];
        for d in cases {
            let ft = d.fourier_transform_density().unwrap();
            for xi in [-1.1, 0.0, 0.9, 2.3] {
                let direct = d.fourier_transform_1d(xi, 1e-11).unwrap().value;
                let viadens = ft.evaluate(xi);
                assert!(
                    (direct - viadens).norm() < 1e-12,
                    "xi={xi}: {:.2e}",
                    (direct - viadens).norm()
                );
            }
        }
        assert!(Density::smooth_bump(0.0, 0.5)
            .fourier_transform_density()
            .is_none());
        assert!(Density::unit_gaussian()
            .modulated(0.0, 0.4)
            .fourier_transform_density()
            .is_none());
    }

    #[test]
    fn translate_matches_pointwise_shift() {
        let cases = [
            Density::gaussian(0.9, 0.2, 0.4),
            Density::smooth_bump(0.1, 0.5),
            Density::unit_gaussian().modulated(0.3, -0.6),
        ];
        for d in cases {
            let v = 0.7;
            let shifted = d.translate(v).unwrap();
            for t in [-0.4, 0.3, 1.1] {
                let want = d.evaluate(t - v);
                let got = shifted.evaluate(t);
                assert!(
                    (want - got).norm() < 1e-13,
                    "{:?} at {t}: {}",
                    d.kind,
                    (want - got).norm()
                );
            }
        }
        assert!(Density::odd_bump(0.5).translate(0.1).is_err());
        assert!(Density::hermite(2).translate(0.1).is_err());
    }
}
