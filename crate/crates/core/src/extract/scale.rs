//! Anisotropic scale from dimension callouts.

use super::bundle::DimensionCallout;
use super::segments::Frame;
use super::ExtractError;

/// Callouts whose minor axis component is below sin 10° count as pure-axis.
const AXIS_SNAP: f64 = 0.173_648_177_666_930_3;

/// Default isotropy weight: ten per callout.
pub fn default_lambda(n: usize) -> f64 {
    10.0 * n as f64
}

/// Least-squares `(sx, sy)` in feet per pixel. Each callout measures
/// `sx·|d|·a² + sy·|d|·b²` where `(a, b)` is its deskewed unit direction,
/// and `lambda·(sx − sy)²` pulls the two toward each other. `frame` supplies
/// the skew; its scale fields are ignored.
pub fn estimate_scale(callouts: &[DimensionCallout], frame: &Frame, lambda: f64) -> Result<(f64, f64), ExtractError> {
    let mut rows = Vec::new();
    for c in callouts {
        let d = frame.deskew(c.p2) - frame.deskew(c.p1);
        let n = d.norm();
        if n <= 0.0 || !(c.length > 0.0) {
            return Err(ExtractError::Bundle(format!("degenerate dimension callout {c:?}")));
        }
        let (a, b) = ((d.x / n).abs(), (d.y / n).abs());
        let (wa, wb) = if b < AXIS_SNAP {
            (1.0, 0.0)
        } else if a < AXIS_SNAP {
            (0.0, 1.0)
        } else {
            (a * a, b * b)
        };
        rows.push((n * wa, n * wb, c.length));
    }
    if rows.is_empty() {
        return Err(ExtractError::NoScaleAnnotation);
    }
    // normal equations of the stacked system
    let (mut m11, mut m12, mut m22, mut r1, mut r2) = (lambda, -lambda, lambda, 0.0, 0.0);
    for (u, v, l) in rows {
        m11 += u * u;
        m12 += u * v;
        m22 += v * v;
        r1 += u * l;
        r2 += v * l;
    }
    let det = m11 * m22 - m12 * m12;
    if det.abs() < 1e-12 {
        return Err(ExtractError::NoScaleAnnotation);
    }
    let sx = (r1 * m22 - m12 * r2) / det;
    let sy = (m11 * r2 - m12 * r1) / det;
    if !(sx > 0.0 && sy > 0.0) {
        return Err(ExtractError::Bundle(format!("callouts give a non-positive scale ({sx}, {sy})")));
    }
    Ok((sx, sy))
}
