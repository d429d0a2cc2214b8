//! Collinear and double-stroke merging of world-space segments.

use serde::{Deserialize, Serialize};

use super::orient::OrientationModel;
use super::segments::Segment;
use crate::geometry::orientation_diff;
use crate::layout::DEFAULT_WALL_THICKNESS;
use crate::Point;

pub const MERGE_ANGLE_DEG: f64 = 1.0;
pub const MERGE_GAP: f64 = 3.0;
pub const MERGE_OFFSET: f64 = 0.5;
/// Parallel strokes further apart than this are separate walls.
pub const DOUBLE_OFFSET_MAX: f64 = 1.5;
pub const DOUBLE_OVERLAP: f64 = 0.6;

/// A wall centerline before topology repair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WallLine {
    pub a: Point,
    pub b: Point,
    pub thickness: f64,
}

impl WallLine {
    pub fn new(a: Point, b: Point) -> Self {
        Self {
            a,
            b,
            thickness: DEFAULT_WALL_THICKNESS,
        }
    }

    pub fn length(&self) -> f64 {
        self.a.dist(self.b)
    }

    pub fn angle(&self) -> f64 {
        (self.b - self.a).angle().rem_euclid(std::f64::consts::PI)
    }

    /// Endpoints ordered lexicographically, so equal walls compare equal.
    fn canonical(mut self) -> Self {
        if (self.b.x, self.b.y) < (self.a.x, self.a.y) {
            std::mem::swap(&mut self.a, &mut self.b);
        }
        self
    }

    fn key(&self) -> (f64, f64, f64, f64) {
        (self.a.x, self.a.y, self.b.x, self.b.y)
    }
}

/// Rotates each segment about its midpoint onto its cluster mean.
pub fn snap_to_model(segs: &[Segment], model: &OrientationModel<f64>) -> Vec<Segment> {
    segs.iter()
        .zip(&model.labels)
        .map(|(s, &l)| {
            let m = s.a.midpoint(s.b);
            let half = s.length() / 2.0;
            let mut dir = Point::from_angle(model.means[l]);
            if dir.dot(s.b - s.a) < 0.0 {
                dir = -dir;
            }
            Segment::new(m - dir * half, m + dir * half, s.support)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
enum MergeKind {
    Collinear,
    Double,
}

/// Frame of a pair: shared axis direction and the projections of each wall.
struct PairGeom {
    dir: Point,
    /// Perpendicular offset between the two lines.
    offset: f64,
    /// Intervals of `x` and `y` along `dir`.
    ix: (f64, f64),
    iy: (f64, f64),
}

fn pair_geom(x: &WallLine, y: &WallLine) -> PairGeom {
    let (lx, ly) = (x.length(), y.length());
    let mut dy = (y.b - y.a).normalized();
    let dx = (x.b - x.a).normalized();
    if dx.dot(dy) < 0.0 {
        dy = -dy;
    }
    // length-weighted mean direction
    let dir = (dx * lx + dy * ly).normalized();
    let n = dir.perp();
    let off = |w: &WallLine| w.a.midpoint(w.b).dot(n);
    let span = |w: &WallLine| {
        let (s, t) = (w.a.dot(dir), w.b.dot(dir));
        (s.min(t), s.max(t))
    };
    PairGeom {
        dir,
        offset: (off(x) - off(y)).abs(),
        ix: span(x),
        iy: span(y),
    }
}

fn classify(x: &WallLine, y: &WallLine) -> Option<(MergeKind, f64)> {
    if orientation_diff(x.angle(), y.angle()) > MERGE_ANGLE_DEG.to_radians() {
        return None;
    }
    let g = pair_geom(x, y);
    let overlap = g.ix.1.min(g.iy.1) - g.ix.0.max(g.iy.0);
    if g.offset <= MERGE_OFFSET {
        // gap between the intervals; overlapping pieces have a negative gap
        if -overlap <= MERGE_GAP {
            return Some((MergeKind::Collinear, g.offset + (-overlap).max(0.0)));
        }
        return None;
    }
    let shorter = (g.ix.1 - g.ix.0).min(g.iy.1 - g.iy.0);
    if g.offset <= DOUBLE_OFFSET_MAX && shorter > 0.0 && overlap >= DOUBLE_OVERLAP * shorter {
        return Some((MergeKind::Double, g.offset));
    }
    None
}

fn combine(x: &WallLine, y: &WallLine, kind: MergeKind) -> WallLine {
    let g = pair_geom(x, y);
    let n = g.dir.perp();
    let (lx, ly) = (x.length(), y.length());
    let c = match kind {
        MergeKind::Collinear => (x.a.midpoint(x.b) * lx + y.a.midpoint(y.b) * ly) * (1.0 / (lx + ly)),
        MergeKind::Double => x.a.midpoint(x.b).midpoint(y.a.midpoint(y.b)),
    };
    let base = n * c.dot(n);
    let (lo, hi) = (g.ix.0.min(g.iy.0), g.ix.1.max(g.iy.1));
    let thickness = match kind {
        MergeKind::Double => g.offset,
        MergeKind::Collinear if lx >= ly => x.thickness,
        MergeKind::Collinear => y.thickness,
    };
    WallLine {
        a: base + g.dir * lo,
        b: base + g.dir * hi,
        thickness,
    }
    .canonical()
}

/// Merges to a fixed point. Each round merges the single best pair:
/// collinear before double-stroke, then the smallest residual, then the
/// canonical order of the walls, so the result does not depend on input order.
pub fn merge_walls(walls: &[WallLine]) -> Vec<WallLine> {
    let mut ws: Vec<WallLine> = walls.iter().map(|w| w.canonical()).filter(|w| w.length() > 0.0).collect();
    loop {
        ws.sort_by(|p, q| p.key().partial_cmp(&q.key()).unwrap_or(std::cmp::Ordering::Equal));
        let mut best: Option<(MergeKind, f64, usize, usize)> = None;
        for i in 0..ws.len() {
            for j in (i + 1)..ws.len() {
                if let Some((k, score)) = classify(&ws[i], &ws[j]) {
                    let better = match best {
                        None => true,
                        Some((bk, bs, _, _)) => (k, score) < (bk, bs),
                    };
                    if better {
                        best = Some((k, score, i, j));
                    }
                }
            }
        }
        let Some((kind, _, i, j)) = best else {
            return ws;
        };
        let m = combine(&ws[i], &ws[j], kind);
        ws.remove(j);
        ws[i] = m;
    }
}

/// Segments to centerlines: [`merge_walls`] on default-thickness walls.
pub fn merge_segments(segs: &[Segment]) -> Vec<WallLine> {
    let ws: Vec<WallLine> = segs.iter().map(|s| WallLine::new(s.a, s.b)).collect();
    merge_walls(&ws)
}
