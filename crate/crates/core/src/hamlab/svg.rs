//! Static SVG phase portraits.

use std::fmt::Write;

use super::{integrate, HamiltonianSystem};

/// Orbits from `seeds` drawn on the unit square (coordinates reduced mod 1),
/// with the transversal `x = x0` and the critical points marked.
pub fn phase_portrait_svg(sys: &HamiltonianSystem, seeds: &[(f64, f64)], duration: f64, x0: f64, size: u32) -> String {
    let sz = size as f64;
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
    );
    let _ = writeln!(out, r#"<rect width="{size}" height="{size}" fill="white" stroke="black"/>"#);
    let px = |x: f64| x.rem_euclid(1.0) * sz;
    let py = |y: f64| (1.0 - y.rem_euclid(1.0)) * sz;
    for &(x, y) in seeds {
        let Ok(tr) = integrate(sys, x, y, duration, 1e-8) else { continue };
        let mut path = String::new();
        let mut prev: Option<(f64, f64)> = None;
        for &(_, sx, sy) in &tr.samples {
            let p = (px(sx), py(sy));
            let jump = prev.is_none_or(|q| (q.0 - p.0).abs() > sz / 2.0 || (q.1 - p.1).abs() > sz / 2.0);
            let _ = write!(path, "{}{:.2},{:.2} ", if jump { "M" } else { "L" }, p.0, p.1);
            prev = Some(p);
        }
        let _ = writeln!(out, r#"<path d="{}" fill="none" stroke="steelblue" stroke-width="0.8"/>"#, path.trim_end());
    }
    let _ = writeln!(
        out,
        r#"<line x1="{0:.2}" y1="0" x2="{0:.2}" y2="{size}" stroke="crimson" stroke-width="1.5"/>"#,
        px(x0)
    );
    for &(cx, cy) in &sys.critical {
        let _ = writeln!(out, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="black"/>"#, px(cx), py(cy));
    }
    out.push_str("</svg>\n");
    out
}
