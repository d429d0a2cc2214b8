//! Renders a layout back into a sketch bundle: pen strokes or a raster.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::extract::{DimensionCallout, Gray, LabelClass, LabelMark, RasterDoc, SketchBundle};
use crate::geometry::arc_from_3pt;
use crate::layout::opening_midpoint;
use crate::{Layout, OpeningClass, Point, WallShape};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderOptions {
    pub px_per_ft: f64,
    /// Blank border around the drawing, in feet.
    pub margin_ft: f64,
    /// Counter-clockwise rotation of the whole drawing, radians.
    pub rotation: f64,
    /// Standard deviation of the per-vertex pen offset, in pixels.
    pub jitter_px: f64,
    pub seed: u64,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self {
            px_per_ft: 8.0,
            margin_ft: 4.0,
            rotation: 0.0,
            jitter_px: 0.0,
            seed: 0,
        }
    }
}

/// Spacing of stroke samples along lines, pixels.
const LINE_STEP_PX: f64 = 4.0;
/// Angular step of arc samples.
const ARC_STEP_DEG: f64 = 1.5;
/// Labels sit this far off the host centerline, feet.
const LABEL_OFFSET: f64 = 0.3;

struct Canvas {
    opts: RenderOptions,
    origin: Point,
    width: usize,
    height: usize,
}

impl Canvas {
    fn new(layout: &Layout, opts: RenderOptions) -> Self {
        let pts: Vec<Point> = layout
            .walls
            .iter()
            .flat_map(|w| w.polyline())
            .map(|p| p.rotate(opts.rotation) * opts.px_per_ft)
            .collect();
        let lo = pts.iter().fold(Point::new(f64::INFINITY, f64::INFINITY), |a, p| Point::new(a.x.min(p.x), a.y.min(p.y)));
        let hi = pts.iter().fold(Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY), |a, p| Point::new(a.x.max(p.x), a.y.max(p.y)));
        let m = opts.margin_ft * opts.px_per_ft;
        let origin = Point::new((m - lo.x).round(), (m + hi.y).round());
        Self {
            opts,
            origin,
            width: (hi.x - lo.x + 2.0 * m).ceil() as usize + 1,
            height: (hi.y - lo.y + 2.0 * m).ceil() as usize + 1,
        }
    }

    fn px(&self, w: Point) -> Point {
        let r = w.rotate(self.opts.rotation) * self.opts.px_per_ft;
        Point::new(self.origin.x + r.x, self.origin.y - r.y)
    }
}

fn key(p: Point) -> (i64, i64) {
    ((p.x * 1e4).round() as i64, (p.y * 1e4).round() as i64)
}

/// Stroke-based sketch of `layout`. Wall ends that coincide share one pen
/// offset so junctions stay closed; arcs pass through their offset ends.
/// Two callouts span the full extent along each axis, and every opening
/// gets a label just off its host.
pub fn render_strokes(layout: &Layout, opts: RenderOptions) -> SketchBundle {
    let canvas = Canvas::new(layout, opts);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let normal = Normal::new(0.0, opts.jitter_px.max(0.0)).expect("finite sigma");
    let mut offsets: BTreeMap<(i64, i64), Point> = BTreeMap::new();
    let mut jit = |p: Point, rng: &mut ChaCha8Rng| -> Point {
        *offsets
            .entry(key(p))
            .or_insert_with(|| Point::new(normal.sample(rng), normal.sample(rng)))
    };
    let mut strokes = Vec::new();
    for w in &layout.walls {
        match &w.shape {
            WallShape::Line { start, end } | WallShape::Arc3Pt { start, end, .. } => {
                let a = canvas.px(*start) + jit(*start, &mut rng);
                let b = canvas.px(*end) + jit(*end, &mut rng);
                let n = (a.dist(b) / LINE_STEP_PX).ceil().max(1.0) as usize;
                strokes.push((0..=n).map(|i| a.lerp(b, i as f64 / n as f64)).collect());
            }
            WallShape::Arc(arc) => {
                let (s, e) = (arc.start(), arc.end());
                let a = canvas.px(s) + jit(s, &mut rng);
                let b = canvas.px(e) + jit(e, &mut rng);
                let m = canvas.px(arc.mid());
                let pts = match arc_from_3pt(a, m, b) {
                    Ok(pa) => {
                        let n = (pa.sweep.abs().to_degrees() / ARC_STEP_DEG).ceil().max(2.0) as usize;
                        (0..=n).map(|i| pa.point_at(i as f64 / n as f64)).collect()
                    }
                    Err(_) => vec![a, b],
                };
                strokes.push(pts);
            }
        }
    }
    let (lo, hi) = layout.bounds().expect("layout has walls");
    let below = lo.y - 1.5;
    let left = lo.x - 1.5;
    let callouts = vec![
        DimensionCallout {
            p1: canvas.px(Point::new(lo.x, below)),
            p2: canvas.px(Point::new(hi.x, below)),
            length: hi.x - lo.x,
        },
        DimensionCallout {
            p1: canvas.px(Point::new(left, lo.y)),
            p2: canvas.px(Point::new(left, hi.y)),
            length: hi.y - lo.y,
        },
    ];
    let index = layout.wall_index();
    let labels = layout
        .openings()
        .map(|(class, o)| {
            let host = index[o.host.as_str()];
            let mid = opening_midpoint(o, host);
            let t = host.tangent_at_arclength(o.offset);
            LabelMark {
                p: canvas.px(mid + t.perp() * LABEL_OFFSET),
                class: match class {
                    OpeningClass::Door => LabelClass::Door,
                    OpeningClass::Window => LabelClass::Window,
                },
                width_hint: (o.width != class.default_width()).then_some(o.width),
            }
        })
        .collect();
    SketchBundle {
        raster: None,
        strokes: Some(strokes),
        callouts,
        labels,
        swings: Vec::new(),
        origin: Some(canvas.origin),
    }
}

/// Rasterizes the strokes of [`render_strokes`] with a 3 px brush and drops
/// the stroke list.
pub fn render_raster(layout: &Layout, opts: RenderOptions) -> SketchBundle {
    let canvas = Canvas::new(layout, opts);
    let mut bundle = render_strokes(layout, opts);
    let mut img = Gray::new(canvas.width, canvas.height, 255);
    for s in bundle.strokes.take().unwrap_or_default() {
        for w in s.windows(2) {
            let n = (w[0].dist(w[1]) * 2.0).ceil().max(1.0) as usize;
            for i in 0..=n {
                stamp(&mut img, w[0].lerp(w[1], i as f64 / n as f64));
            }
        }
    }
    bundle.raster = Some(RasterDoc::encode(&img));
    bundle
}

fn stamp(img: &mut Gray, c: Point) {
    let (cx, cy) = (c.x.floor() as i64, c.y.floor() as i64);
    for dy in -1..=1 {
        for dx in -1..=1 {
            let (x, y) = (cx + dx, cy + dy);
            if x >= 0 && y >= 0 && (x as usize) < img.width && (y as usize) < img.height {
                img.set(x as usize, y as usize, 0);
            }
        }
    }
}
