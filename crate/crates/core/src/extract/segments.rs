//! Segments, the pixel-to-world frame, skew estimation and stroke splitting.

use serde::{Deserialize, Serialize};

use crate::geometry::{closest_on_segment, segment_intersection};
use crate::{Arc, Point};

/// Maximum radial residual (ft) for a run of samples to be accepted as an arc.
pub const ARC_RESIDUAL_MAX: f64 = 0.10;
/// Skews beyond this fold are treated as genuine diagonals and left alone.
pub const SKEW_FOLD_MAX_DEG: f64 = 15.0;
/// Minimum weight (px of line) behind a skew peak.
pub const SKEW_SUPPORT_MIN: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
    /// Inlier pixels (raster) or samples (strokes) behind the segment.
    pub support: usize,
}

impl Segment {
    pub fn new(a: Point, b: Point, support: usize) -> Self {
        Self { a, b, support }
    }

    pub fn length(&self) -> f64 {
        self.a.dist(self.b)
    }

    /// Direction angle in `[0, π)`.
    pub fn angle(&self) -> f64 {
        (self.b - self.a).angle().rem_euclid(std::f64::consts::PI)
    }

    pub fn map(&self, f: impl Fn(Point) -> Point) -> Self {
        Self::new(f(self.a), f(self.b), self.support)
    }
}

/// Splits segments wherever they cross each other or another segment's end
/// lands on their interior (within `tol`). Pieces keep a share of the
/// support proportional to their length.
pub fn split_at_junctions(segs: &[Segment], tol: f64) -> Vec<Segment> {
    let mut out = Vec::new();
    for (i, s) in segs.iter().enumerate() {
        let len = s.length();
        if len <= 0.0 {
            continue;
        }
        let mut cuts = vec![0.0, 1.0];
        let interior = |t: f64| t * len > tol && (1.0 - t) * len > tol;
        for (j, o) in segs.iter().enumerate() {
            if i == j {
                continue;
            }
            if let Some((t, _)) = segment_intersection(s.a, s.b, o.a, o.b) {
                if interior(t) {
                    cuts.push(t);
                }
            }
            for e in [o.a, o.b] {
                let (t, q) = closest_on_segment(e, s.a, s.b);
                if q.dist(e) <= tol && interior(t) {
                    cuts.push(t);
                }
            }
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup_by(|x, y| (*x - *y) * len <= tol);
        if cuts.last() != Some(&1.0) {
            // the dedup may have swallowed the end cut
            let n = cuts.len();
            cuts[n - 1] = 1.0;
        }
        for w in cuts.windows(2) {
            let sup = ((w[1] - w[0]) * s.support as f64).round() as usize;
            out.push(Segment::new(s.a.lerp(s.b, w[0]), s.a.lerp(s.b, w[1]), sup.max(1)));
        }
    }
    out
}

/// Maps pixel coordinates (x right, y down) into world feet (x east, y north):
/// shift to `origin`, flip y, rotate by `-skew`, then scale per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub origin: Point,
    pub skew: f64,
    pub sx: f64,
    pub sy: f64,
}

impl Frame {
    /// y-up pixel offsets from the origin.
    pub fn to_up(&self, p: Point) -> Point {
        Point::new(p.x - self.origin.x, self.origin.y - p.y)
    }

    /// Deskewed y-up pixel offsets.
    pub fn deskew(&self, p: Point) -> Point {
        self.to_up(p).rotate(-self.skew)
    }

    pub fn to_world(&self, p: Point) -> Point {
        let r = self.deskew(p);
        Point::new(r.x * self.sx, r.y * self.sy)
    }
}

fn fold_quarter(a: f64) -> f64 {
    let q = std::f64::consts::FRAC_PI_2;
    let f = a - q * (a / q).round();
    if f >= q / 2.0 {
        f - q
    } else {
        f
    }
}

/// Outcome of skew estimation; `dominant` is false when no peak had support.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Skew {
    pub phi: f64,
    pub dominant: bool,
}

/// Dominant direction of `(angle, weight)` samples folded into a quarter turn.
/// The peak of a 1° histogram is refined by the weighted circular mean of the
/// samples within 1.5° of it; folds beyond ±15° are reported as zero.
pub fn estimate_skew(dirs: &[(f64, f64)]) -> Skew {
    let mut hist = [0.0f64; 90];
    let bin = |f: f64| (((f.to_degrees() + 45.0).floor() as i64).rem_euclid(90)) as usize;
    for &(a, w) in dirs {
        hist[bin(fold_quarter(a))] += w;
    }
    let (peak, &weight) = hist
        .iter()
        .enumerate()
        .fold((0, &f64::NEG_INFINITY), |b, (i, w)| if *w > *b.1 { (i, w) } else { b });
    if weight < SKEW_SUPPORT_MIN {
        return Skew { phi: 0.0, dominant: false };
    }
    let centre = (peak as f64 - 44.5).to_radians();
    let (mut c, mut s) = (0.0, 0.0);
    for &(a, w) in dirs {
        let f = fold_quarter(a);
        if fold_quarter(f - centre).abs() <= 1.5f64.to_radians() {
            c += w * (4.0 * f).cos();
            s += w * (4.0 * f).sin();
        }
    }
    let phi = fold_quarter(s.atan2(c) / 4.0);
    if phi.abs() > SKEW_FOLD_MAX_DEG.to_radians() {
        return Skew { phi: 0.0, dominant: true };
    }
    Skew { phi, dominant: true }
}

/// A piece of a decomposed stroke.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Piece {
    Line(Segment),
    Arc(Arc),
}

/// Largest radial residual of `pts` against `arc`'s circle.
pub fn arc_residual(arc: &Arc, pts: &[Point]) -> f64 {
    pts.iter()
        .map(|p| (p.dist(arc.center) - arc.radius).abs())
        .fold(0.0, f64::max)
}

/// Arc through the first, middle (by arc length) and last samples, kept
/// only if every sample lies within the residual bound, then refined by a
/// least-squares circle.
pub fn fit_arc(pts: &[Point]) -> Option<Arc> {
    if pts.len() < 5 {
        return None;
    }
    let mut acc = vec![0.0];
    for w in pts.windows(2) {
        acc.push(acc[acc.len() - 1] + w[0].dist(w[1]));
    }
    let half = acc[acc.len() - 1] / 2.0;
    let mid = (1..pts.len() - 1)
        .min_by(|&i, &j| (acc[i] - half).abs().total_cmp(&(acc[j] - half).abs()))
        .expect("at least five samples");
    super::arcs::fit_arc_samples(pts, mid)
}

/// Splits a world-space polyline into lines and arcs. A run is a line when
/// every sample is within `line_tol` of its chord; otherwise an arc when
/// [`fit_arc`] accepts it; otherwise it splits at the farthest sample.
pub fn decompose_stroke(pts: &[Point], line_tol: f64) -> Vec<Piece> {
    let mut pts = pts.to_vec();
    pts.dedup_by(|a, b| a.dist(*b) < 1e-9);
    let mut out = Vec::new();
    if pts.len() >= 2 {
        decompose_into(&pts, line_tol, &mut out);
    }
    out
}

fn decompose_into(pts: &[Point], line_tol: f64, out: &mut Vec<Piece>) {
    let (a, b) = (pts[0], pts[pts.len() - 1]);
    let (far, dev) = (1..pts.len() - 1)
        .map(|i| (i, crate::geometry::dist_point_segment(pts[i], a, b)))
        .fold((0, 0.0), |best, x| if x.1 > best.1 { x } else { best });
    if dev <= line_tol && a.dist(b) > 0.0 {
        out.push(Piece::Line(Segment::new(a, b, pts.len())));
        return;
    }
    if let Some(arc) = fit_arc(pts) {
        out.push(Piece::Arc(arc));
        return;
    }
    if far == 0 {
        // closed loop: split at the sample farthest from the start
        let k = (1..pts.len() - 1)
            .max_by(|&i, &j| pts[i].dist(a).total_cmp(&pts[j].dist(a)))
            .unwrap_or(0);
        if k == 0 {
            return;
        }
        decompose_into(&pts[..=k], line_tol, out);
        decompose_into(&pts[k..], line_tol, out);
        return;
    }
    decompose_into(&pts[..=far], line_tol, out);
    decompose_into(&pts[far..], line_tol, out);
}
