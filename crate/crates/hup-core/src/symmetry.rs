//! Galilean and pseudo-conformal symmetries of the free-Schrödinger flow,
//! realized on densities, evaluation points and field values.

use crate::error::{Error, Result};
use crate::extension::{EvalPoint, ParabolaMeasure};
use crate::uniqueness::{LambdaBranch, LambdaSpec, Line};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Unit-determinant parameters (a, b; c, d) of the pseudo-conformal action.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MoebiusParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

const DET_TOL: f64 = 1e-12;

impl MoebiusParams {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        if (det - 1.0).abs() > DET_TOL {
            return Err(Error::Spec(format!("determinant {det} must equal 1")));
        }
        Ok(Self { a, b, c, d })
    }

    pub fn identity() -> Self {
        Self {
            a: 1.0,
            b: 0.0,
            c: 0.0,
            d: 1.0,
        }
    }

    /// The parameters of the inverse point map: (d, -b, -c, a).
    pub fn inverse(&self) -> Self {
        Self {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    fn denom(&self, eta: f64) -> Result<f64> {
        let den = self.a + self.b * eta;
        if den.abs() < 1e-14 * (1.0 + self.a.abs() + (self.b * eta).abs()) {
            return Err(Error::Pole { eta });
        }
        Ok(den)
    }
}

// ---------------------------------------------------------------------------
// Density-level symmetries
// ---------------------------------------------------------------------------

/// Shift the density: `g(t) ↦ g(t - v)`. The new extension satisfies
/// `μ̂_new(x, y) = e^{-2πi(vx + v²y)} μ̂(x + 2vy, y)`.
pub fn galilean_shift(m: &ParabolaMeasure, v: f64) -> Result<ParabolaMeasure> {
    let density = m.density.translate(v)?;
    Ok(ParabolaMeasure::new(
        density,
        format!("{}+shift({v})", m.label),
    ))
}

/// Modulate the density: `g(t) ↦ g(t) e^{-2πi t² h}`. The new extension is the
/// η-translate `μ̂_new(x, y) = μ̂(x, y + h)`.
pub fn quadratic_modulation(m: &ParabolaMeasure, h: f64) -> ParabolaMeasure {
    let density = m.density.clone().modulated(0.0, -h);
    ParabolaMeasure::new(density, format!("{}+etashift({h})", m.label))
}

// ---------------------------------------------------------------------------
// Pseudo-conformal action
// ---------------------------------------------------------------------------

/// Point map `(x, y) ↦ (x/(a+by), (c+dy)/(a+by))`.
pub fn pseudo_conformal_point(p: EvalPoint, m: &MoebiusParams) -> Result<EvalPoint> {
    let den = m.denom(p.eta)?;
    Ok(EvalPoint::new(p.xi / den, (m.c + m.d * p.eta) / den))
}

/// Prefactor applied to field values under the point map:
/// `(a+bη)^{-1/2} e^{iπ b ξ²/(2(a+bη))}`, principal square root.
///
/// The π/2 in the exponent (rather than a bare 1/4) is what the 2π Fourier
/// convention of the extension requires; with it, pulling the Gaussian closed
/// form through the map again solves `2πi ∂_η + ∂²_ξ = 0` exactly.
pub fn pseudo_conformal_value(
    value: Complex64,
    p: EvalPoint,
    m: &MoebiusParams,
) -> Result<Complex64> {
    let den = m.denom(p.eta)?;
    let pref = Complex64::new(den, 0.0).powf(-0.5)
        * Complex64::from_polar(1.0, PI * m.b * p.xi * p.xi / (2.0 * den));
    Ok(pref * value)
}

/// Transform a whole field: `F(x,y) = prefactor(x,y) · u(point_map(x,y))`.
/// If `u` solves the free-Schrödinger equation, so does `F`.
pub fn pseudo_conformal_field<'a, F>(
    u: F,
    m: &'a MoebiusParams,
) -> impl Fn(f64, f64) -> Result<Complex64> + 'a
where
    F: Fn(f64, f64) -> Complex64 + 'a,
{
    move |x: f64, y: f64| {
        let p = EvalPoint::new(x, y);
        let q = pseudo_conformal_point(p, m)?;
        pseudo_conformal_value(u(q.xi, q.eta), p, m)
    }
}

// ---------------------------------------------------------------------------
// Mapping Λ specifications
// ---------------------------------------------------------------------------

/// Image of a Λ truncation under the point map: a structured spec when every
/// branch lands on a recognizable power-sequence line, a raw point list
/// otherwise.
#[derive(Debug, Clone)]
pub enum MappedLambda {
    Spec(LambdaSpec),
    Points(Vec<EvalPoint>),
}

impl MappedLambda {
    /// Concrete points of the image at truncation `n_max`.
    pub fn points(&self, n_max: u32) -> Result<Vec<EvalPoint>> {
        match self {
            MappedLambda::Spec(spec) => crate::uniqueness::lambda_points(spec, n_max),
            MappedLambda::Points(pts) => Ok(pts.clone()),
        }
    }
}

/// Map every branch point with index ≤ `n_max` through the Moebius point map.
/// Hitting the pole is an error, as in the underlying point map.
pub fn map_lambda(spec: &LambdaSpec, m: &MoebiusParams, n_max: u32) -> Result<MappedLambda> {
    spec.validate()?;
    let mut structured: Vec<LambdaBranch> = Vec::new();
    let mut all_points: Vec<EvalPoint> = Vec::new();
    let mut all_structured = true;

    for br in &spec.branches {
        // Positive-sign representatives drive the structure detection; the
        // mirrored family is mapped alongside for the raw output.
        let mut plus = Vec::new();
        let mut minus = Vec::new();
        for n in br.start_index..=n_max {
            let t = br.c * (n as f64).powf(br.exponent);
            let (p, q) = match br.line {
                Line::Horizontal { height } => {
                    (EvalPoint::new(t, height), EvalPoint::new(-t, height))
                }
                Line::ThroughOrigin { slope } => {
                    (EvalPoint::new(t, slope * t), EvalPoint::new(-t, -slope * t))
                }
                Line::Vertical { abscissa } => {
                    (EvalPoint::new(abscissa, t), EvalPoint::new(abscissa, -t))
                }
            };
            plus.push((n, pseudo_conformal_point(p, m)?));
            minus.push((n, pseudo_conformal_point(q, m)?));
        }
        all_points.extend(plus.iter().map(|&(_, p)| p));
        all_points.extend(minus.iter().map(|&(_, p)| p));

        match detect_branch(&plus, &minus, br.start_index) {
            Some(branch) => structured.push(branch),
            None => all_structured = false,
        }
    }

    if all_structured {
        Ok(MappedLambda::Spec(LambdaSpec::new(structured)))
    } else {
        for p in &mut all_points {
            p.xi += 0.0;
            p.eta += 0.0;
        }
        all_points.sort_by(|a, b| (a.xi, a.eta).partial_cmp(&(b.xi, b.eta)).unwrap());
        all_points.dedup_by(|a, b| a.xi == b.xi && a.eta == b.eta);
        Ok(MappedLambda::Points(all_points))
    }
}

/// Try to express a mapped branch as one of the three line kinds carrying a
/// power sequence c·nᵉ. Requires at least two usable indices and an exact
/// (1e-10 relative) match at every probe point. The sign of the fitted series
/// is absorbed by each kind's ± family, so the coefficient stays positive.
fn detect_branch(
    plus: &[(u32, EvalPoint)],
    minus: &[(u32, EvalPoint)],
    start_index: u32,
) -> Option<LambdaBranch> {
    let close = |u: f64, v: f64| (u - v).abs() <= 1e-10 * (1.0 + u.abs().max(v.abs()));

    // Candidate geometries, checked on the full ± family.
    let is_horizontal = plus
        .iter()
        .chain(minus)
        .all(|&(_, p)| close(p.eta, plus[0].1.eta))
        && minus
            .iter()
            .zip(plus)
            .all(|(&(_, q), &(_, p))| close(q.xi, -p.xi));
    let is_vertical = plus
        .iter()
        .chain(minus)
        .all(|&(_, p)| close(p.xi, plus[0].1.xi))
        && minus
            .iter()
            .zip(plus)
            .all(|(&(_, q), &(_, p))| close(q.eta, -p.eta));
    let slope = (plus[0].1.xi != 0.0).then(|| plus[0].1.eta / plus[0].1.xi);
    let is_through_origin = slope.is_some_and(|s| {
        plus.iter().all(|&(_, p)| close(p.eta, s * p.xi))
            && minus
                .iter()
                .zip(plus)
                .all(|(&(_, q), &(_, p))| close(q.xi, -p.xi) && close(q.eta, -p.eta))
    });

    let line = if is_horizontal {
        Line::Horizontal {
            height: plus[0].1.eta,
        }
    } else if is_vertical {
        Line::Vertical {
            abscissa: plus[0].1.xi,
        }
    } else if is_through_origin {
        Line::ThroughOrigin { slope: slope? }
    } else {
        return None;
    };

    // The running coordinate whose values should follow ±c·nᵉ.
    let series: Vec<(u32, f64)> = plus
        .iter()
        .map(|&(n, p)| {
            let v = if is_vertical { p.eta } else { p.xi };
            (n, v)
        })
        .collect();

    // Fit on the extreme indices ≥ 1, then verify everywhere.
    let fit: Vec<&(u32, f64)> = series.iter().filter(|(n, _)| *n >= 1).collect();
    if fit.len() < 2 {
        return None;
    }
    let (n1, v1) = *fit[0];
    let (n2, v2) = *fit[fit.len() - 1];
    if n1 == n2 || v1 == 0.0 || v2 == 0.0 || v1.signum() != v2.signum() {
        return None;
    }
    let exponent = (v2 / v1).abs().ln() / ((n2 as f64) / (n1 as f64)).ln();
    let sign = v1.signum();
    let c = v1.abs() / (n1 as f64).powf(exponent);
    if !(c.is_finite() && exponent.is_finite()) || c <= 0.0 {
        return None;
    }
    if exponent < 0.0 && start_index == 0 {
        return None;
    }
    for &(n, v) in &series {
        let model = sign * c * (n as f64).powf(exponent);
        if !close(v, model) {
            return None;
        }
    }

    Some(LambdaBranch {
        line,
        c,
        exponent,
        start_index,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::Density;
    use crate::extension::{
        extension_gaussian_closed_form, extension_quadrature, schrodinger_residual_field,
    };
    use approx::assert_abs_diff_eq;

    #[test]
    fn moebius_validation_and_inverse() {
        assert!(MoebiusParams::new(1.0, 0.0, 0.0, 1.0).is_ok());
        assert!(MoebiusParams::new(2.0, 0.0, 0.0, 1.0).is_err());
        let m = MoebiusParams::new(0.8, 0.5, -0.4, 1.0).unwrap();
        let inv = m.inverse();
        assert_abs_diff_eq!(inv.a * inv.d - inv.b * inv.c, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn point_map_examples() {
        let id = MoebiusParams::identity();
        let p = EvalPoint::new(0.7, -1.3);
        let q = pseudo_conformal_point(p, &id).unwrap();
        assert_eq!((q.xi, q.eta), (0.7, -1.3));

        let inv = MoebiusParams::new(0.0, 1.0, -1.0, 0.0).unwrap();
        let q = pseudo_conformal_point(EvalPoint::new(2.0, 1.0), &inv).unwrap();
        assert_abs_diff_eq!(q.xi, 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(q.eta, -1.0, epsilon = 1e-15);

        assert!(matches!(
            pseudo_conformal_point(EvalPoint::new(0.4, 0.0), &inv),
            Err(Error::Pole { .. })
        ));
    }

    #[test]
    fn point_map_composes_with_inverse_to_identity() {
        let m = MoebiusParams::new(0.8, 0.5, -0.4, 1.0).unwrap();
        let inv = m.inverse();
        for (x, y) in [(0.3, 0.4), (-1.7, 2.2), (5.0, -0.9)] {
            let q = pseudo_conformal_point(EvalPoint::new(x, y), &m).unwrap();
            let r = pseudo_conformal_point(q, &inv).unwrap();
            assert_abs_diff_eq!(r.xi, x, epsilon = 1e-12);
            assert_abs_diff_eq!(r.eta, y, epsilon = 1e-12);
        }
    }

    #[test]
    fn prefactor_modulus_is_exact() {
        let m = MoebiusParams::new(0.8, 0.5, -0.4, 1.0).unwrap();
        for (x, y) in [(0.3, 0.4), (1.0, 2.0)] {
            let v =
                pseudo_conformal_value(Complex64::new(1.0, 0.0), EvalPoint::new(x, y), &m).unwrap();
            let den: f64 = m.a + m.b * y;
            assert_abs_diff_eq!(v.norm(), den.abs().powf(-0.5), epsilon = 1e-14);
        }
        // Identity parameters leave the value unchanged.
        let id = MoebiusParams::identity();
        let v = pseudo_conformal_value(Complex64::new(0.3, -0.8), EvalPoint::new(1.0, 1.0), &id)
            .unwrap();
        assert!((v - Complex64::new(0.3, -0.8)).norm() < 1e-15);
    }

    #[test]
    fn transformed_gaussian_field_still_solves_the_pde() {
        let m = MoebiusParams::new(0.8, 0.5, -0.4, 1.0).unwrap();
        let u = |x: f64, y: f64| extension_gaussian_closed_form(1.0, EvalPoint::new(x, y));
        let field = pseudo_conformal_field(u, &m);
        // Seeded pseudo-random points away from the pole.
        let mut state = 0x2545F4914F6CDD1Du64;
        let mut rand01 = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..9 {
            let x = 2.0 * rand01() - 1.0;
            let y = 0.2 + 0.8 * rand01();
            let r =
                schrodinger_residual_field(|a, b| field(a, b).unwrap(), EvalPoint::new(x, y), 1e-3);
            assert!(r.norm() < 1e-5, "residual {:.2e} at ({x},{y})", r.norm());
        }
    }

    #[test]
    fn galilean_zero_shift_is_identity() {
        let m = ParabolaMeasure::new(Density::unit_gaussian(), "g");
        let shifted = galilean_shift(&m, 0.0).unwrap();
        for t in [-0.8, 0.0, 1.1] {
            assert!((shifted.density.evaluate(t) - m.density.evaluate(t)).norm() < 1e-15);
        }
    }

    #[test]
    fn galilean_relation_on_gaussian() {
        let m = ParabolaMeasure::new(Density::unit_gaussian(), "g");
        let v = 1.0;
        let shifted = galilean_shift(&m, v).unwrap();
        let (x, y) = (0.3, 0.7);
        let lhs = extension_quadrature(&shifted, EvalPoint::new(x, y), 1e-10).unwrap();
        let base = extension_quadrature(&m, EvalPoint::new(x + 2.0 * v * y, y), 1e-10).unwrap();
        let rhs = Complex64::from_polar(1.0, -2.0 * PI * (v * x + v * v * y)) * base.value;
        assert!(
            (lhs.value - rhs).norm() < 1e-8,
            "{:.2e}",
            (lhs.value - rhs).norm()
        );
        // Slice identity: shifted measure's μ̂(x,0) = e^{-2πivx} ĝ(x).
        let slice = extension_quadrature(&shifted, EvalPoint::new(x, 0.0), 1e-10).unwrap();
        let ghat = m.density.fourier_transform_1d(x, 1e-10).unwrap();
        let expect = Complex64::from_polar(1.0, -2.0 * PI * v * x) * ghat.value;
        assert!((slice.value - expect).norm() < 1e-9);
    }

    #[test]
    fn quadratic_modulation_relation_on_gaussian() {
        let m = ParabolaMeasure::new(Density::unit_gaussian(), "g");
        let shifted = quadratic_modulation(&m, 0.4);
        let got = extension_quadrature(&shifted, EvalPoint::new(1.0, 0.2), 1e-10).unwrap();
        let expect = extension_gaussian_closed_form(1.0, EvalPoint::new(1.0, 0.6));
        assert!(
            (got.value - expect).norm() < 1e-8,
            "{:.2e}",
            (got.value - expect).norm()
        );
        // h = 0 is the identity; composing h then -h returns the original.
        let id = quadratic_modulation(&m, 0.0);
        assert!((id.density.evaluate(0.4) - m.density.evaluate(0.4)).norm() < 1e-15);
        let round = quadratic_modulation(&quadratic_modulation(&m, 0.4), -0.4);
        let a = extension_quadrature(&round, EvalPoint::new(0.7, 0.3), 1e-9).unwrap();
        let b = extension_quadrature(&m, EvalPoint::new(0.7, 0.3), 1e-9).unwrap();
        assert!((a.value - b.value).norm() < 2e-8);
    }

    #[test]
    fn map_lambda_identity_reproduces_spec() {
        let spec = LambdaSpec::two_lines(1.0, 0.3, 0.7, 0.5);
        let mapped = map_lambda(&spec, &MoebiusParams::identity(), 8).unwrap();
        let MappedLambda::Spec(out) = mapped else {
            panic!("expected structured spec");
        };
        let a = crate::uniqueness::lambda_points(&spec, 8).unwrap();
        let b = crate::uniqueness::lambda_points(&out, 8).unwrap();
        assert_eq!(a.len(), b.len());
        for (p, q) in a.iter().zip(&b) {
            assert_abs_diff_eq!(p.xi, q.xi, epsilon = 1e-10);
            assert_abs_diff_eq!(p.eta, q.eta, epsilon = 1e-10);
        }
    }

    #[test]
    fn map_lambda_inversion_sends_through_origin_to_vertical() {
        // (t, at) ↦ (1/a, -1/(at)): a vertical pair at x = ±1/a.
        let a = 2.0;
        let spec = LambdaSpec::new(vec![LambdaBranch {
            line: Line::ThroughOrigin { slope: a },
            c: 1.0,
            exponent: -0.4,
            start_index: 1,
        }]);
        let inv = MoebiusParams::new(0.0, 1.0, -1.0, 0.0).unwrap();
        let mapped = map_lambda(&spec, &inv, 9).unwrap();
        let MappedLambda::Spec(out) = mapped else {
            panic!("expected structured image");
        };
        assert_eq!(out.branches.len(), 1);
        let br = out.branches[0];
        match br.line {
            Line::Vertical { abscissa } => {
                assert_abs_diff_eq!(abscissa.abs(), 1.0 / a, epsilon = 1e-12)
            }
            other => panic!("expected vertical image, got {other:?}"),
        }
        assert_abs_diff_eq!(br.exponent, 0.4, epsilon = 1e-10);
        // Every mapped point must be reproduced by the structured branch.
        let direct = map_lambda(&spec, &inv, 9).unwrap().points(9).unwrap();
        let rebuilt = crate::uniqueness::lambda_points(&out, 9).unwrap();
        assert_eq!(direct.len(), rebuilt.len());
    }

    #[test]
    fn map_lambda_pole_detection() {
        let spec = LambdaSpec::new(vec![LambdaBranch {
            line: Line::Horizontal { height: 0.0 },
            c: 1.0,
            exponent: 0.5,
            start_index: 0,
        }]);
        let inv = MoebiusParams::new(0.0, 1.0, -1.0, 0.0).unwrap();
        assert!(matches!(
            map_lambda(&spec, &inv, 4),
            Err(Error::Pole { .. })
        ));
    }
}
