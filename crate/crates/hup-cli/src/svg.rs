//! Hand-written SVG emission for the exponent-region figure.

use hup_core::uniqueness::{region_a_boundary, SupremumSearch};
use std::fmt::Write;

const SIZE: f64 = 520.0;
const MARGIN: f64 = 40.0;

fn px(v: f64) -> f64 {
    MARGIN + v * (SIZE - 2.0 * MARGIN)
}

fn py(v: f64) -> f64 {
    SIZE - MARGIN - v * (SIZE - 2.0 * MARGIN)
}

/// The admissible region: the union of the areas under the two monotone
/// boundary curves α = (1-β)²/(2-β) and its mirror, shaded over the unit
/// square, with the supremum point marked.
pub fn region_figure(sup: &SupremumSearch) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(s, r#"<rect width="{SIZE}" height="{SIZE}" fill="white"/>"#);

    // Region below α = f(β): polygon along the curve then back along α = 0.
    let steps = 400;
    let mut lower = String::new(); // {α < f(β)}: x bounded by the curve
    let _ = write!(lower, "M {} {}", px(0.0), py(0.0));
    for k in 0..=steps {
        let beta = k as f64 / steps as f64;
        let alpha = region_a_boundary(beta);
        let _ = write!(lower, " L {} {}", px(alpha), py(beta));
    }
    let _ = write!(lower, " L {} {} Z", px(0.0), py(1.0));

    let mut mirror = String::new(); // {β < f(α)}
    let _ = write!(mirror, "M {} {}", px(0.0), py(0.0));
    for k in 0..=steps {
        let alpha = k as f64 / steps as f64;
        let beta = region_a_boundary(alpha);
        let _ = write!(mirror, " L {} {}", px(alpha), py(beta));
    }
    let _ = write!(mirror, " L {} {} Z", px(1.0), py(0.0));

    for path in [&lower, &mirror] {
        let _ = writeln!(
            s,
            r##"<path d="{path}" fill="#4a7fd4" fill-opacity="0.45" stroke="#2a5db0" stroke-width="1.5"/>"##
        );
    }

    // Axes.
    let _ = writeln!(
        s,
        r#"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        px(0.0),
        py(1.0),
        SIZE - 2.0 * MARGIN,
        SIZE - 2.0 * MARGIN
    );
    for (v, label) in [(0.0, "0"), (0.5, "0.5"), (1.0, "1")] {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">{label}</text>"#,
            px(v),
            SIZE - MARGIN + 16.0
        );
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" font-size="12" text-anchor="end">{label}</text>"#,
            MARGIN - 6.0,
            py(v) + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="14" text-anchor="middle">α</text>"#,
        px(0.5),
        SIZE - 8.0
    );
    let _ = writeln!(
        s,
        r#"<text x="12" y="{}" font-size="14" text-anchor="middle">β</text>"#,
        py(0.5)
    );

    // Supremum point of min(α,β)/(1-α-β).
    let _ = writeln!(
        s,
        r##"<circle cx="{}" cy="{}" r="4" fill="#d4442a"/>"##,
        px(sup.argmax.alpha),
        py(sup.argmax.beta)
    );
    let _ = writeln!(
        s,
        r##"<text x="{}" y="{}" font-size="12" fill="#d4442a">sup = {:.5}</text>"##,
        px(sup.argmax.alpha) + 8.0,
        py(sup.argmax.beta) - 6.0,
        sup.value
    );
    let _ = writeln!(s, "</svg>");
    s
}
