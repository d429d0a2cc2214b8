//! The full extraction pipeline and its plain-text summary.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use super::arcs::raster_arcs;
use super::bundle::{LabelClass, SketchBundle};
use super::merge::{merge_segments, snap_to_model};
use super::openings::{place_openings, Mark};
use super::orient::{cluster_orientations, OrientationModel};
use super::raster::{binarize, hough_segments, SUPPORT_MIN};
use super::rooms::extract_rooms;
use super::scale::{default_lambda, estimate_scale};
use super::segments::{decompose_stroke, estimate_skew, split_at_junctions, Frame, Piece, Segment};
use super::topology::{join_endpoints, node_walls, retain_stubs, JOIN_TOL};
use super::ExtractError;
use crate::validate::validate;
use crate::{assign_canonical_ids, Layout, OpeningClass, Point, Wall};

/// Line tolerance for stroke splitting and junction splitting, in pixels.
const LINE_TOL_PX: f64 = 2.0;

#[derive(Debug, Clone, PartialEq)]
pub struct ExtractOptions {
    /// Feet per pixel on both axes; skips callout fitting.
    pub assume_scale: Option<f64>,
    /// Isotropy weight; defaults to ten per callout.
    pub lambda: Option<f64>,
    /// Hough vote threshold.
    pub support_min: usize,
    /// RANSAC seed.
    pub seed: u64,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        Self {
            assume_scale: None,
            lambda: None,
            support_min: SUPPORT_MIN,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageRecord {
    pub stage: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{stage}: {error}")]
pub struct StageError {
    pub stage: String,
    pub error: ExtractError,
}

fn at(stage: &str) -> impl Fn(ExtractError) -> StageError + '_ {
    move |error| StageError {
        stage: stage.to_string(),
        error,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Extraction {
    pub layout: Layout,
    pub summary: String,
    pub frame: Frame,
    pub orientation: Option<OrientationModel<f64>>,
    pub log: Vec<StageRecord>,
    pub warnings: Vec<String>,
}

/// Pluggable producer of an initial layout and summary from a sketch.
pub trait ExtractionAgent {
    fn extract(&self, bundle: &SketchBundle) -> Result<Extraction, StageError>;
}

/// The deterministic geometric extractor.
#[derive(Debug, Clone, Default)]
pub struct GeometricExtractor {
    pub options: ExtractOptions,
}

impl ExtractionAgent for GeometricExtractor {
    fn extract(&self, bundle: &SketchBundle) -> Result<Extraction, StageError> {
        extract_layout(bundle, &self.options)
    }
}

enum Source {
    Raster(Vec<super::raster::Detected>, Vec<Point>),
    Strokes(Vec<Vec<Point>>),
}

/// Runs every stage from ink to canonical ids.
pub fn extract_layout(bundle: &SketchBundle, opts: &ExtractOptions) -> Result<Extraction, StageError> {
    let mut log = Vec::new();
    let mut warnings = Vec::new();
    let mut record = |stage: &str, detail: String| {
        log.push(StageRecord {
            stage: stage.into(),
            detail,
        })
    };

    // source and default origin
    let (source, default_origin) = match (&bundle.raster, &bundle.strokes) {
        (Some(r), _) => {
            let img = r.decode().map_err(at("bundle"))?;
            let ink = binarize(&img).map_err(at("binarize"))?;
            record("binarize", format!("{} ink pixels of {}x{}", ink.count(), img.width, img.height));
            let dets = hough_segments(&ink, opts.support_min, opts.seed);
            record("segments", format!("{} Hough segments", dets.len()));
            (Source::Raster(dets, ink.points()), Point::new(0.0, img.height as f64))
        }
        (None, Some(strokes)) if strokes.iter().any(|s| s.len() >= 2) => {
            let pts = strokes.iter().flatten();
            let minx = pts.clone().map(|p| p.x).fold(f64::INFINITY, f64::min);
            let maxy = pts.map(|p| p.y).fold(f64::NEG_INFINITY, f64::max);
            (Source::Strokes(strokes.clone()), Point::new(minx, maxy))
        }
        _ => return Err(at("binarize")(ExtractError::EmptyImage)),
    };
    let origin = bundle.origin.unwrap_or(default_origin);

    // deskew on y-up pixel directions
    let up = |d: Point| Point::new(d.x, -d.y);
    let dirs: Vec<(f64, f64)> = match &source {
        Source::Raster(dets, _) => dets.iter().map(|d| (up(d.seg.b - d.seg.a).angle(), d.seg.length())).collect(),
        Source::Strokes(ss) => ss
            .iter()
            .flat_map(|s| s.windows(2).map(|w| (up(w[1] - w[0]).angle(), w[0].dist(w[1]))))
            .collect(),
    };
    let skew = estimate_skew(&dirs);
    if !skew.dominant {
        warnings.push("NoDominantDirection: skew left at 0".into());
    }
    record("deskew", format!("skew {:.4} deg", skew.phi.to_degrees()));
    let mut frame = Frame {
        origin,
        skew: skew.phi,
        sx: 1.0,
        sy: 1.0,
    };

    let (sx, sy) = match opts.assume_scale {
        Some(s) if s > 0.0 => (s, s),
        Some(s) => return Err(at("scale")(ExtractError::Bundle(format!("assumed scale {s} is not positive")))),
        None => {
            let lambda = opts.lambda.unwrap_or(default_lambda(bundle.callouts.len()));
            estimate_scale(&bundle.callouts, &frame, lambda).map_err(at("scale"))?
        }
    };
    frame.sx = sx;
    frame.sy = sy;
    record("scale", format!("sx {sx:.6} ft/px, sy {sy:.6} ft/px"));
    let line_tol = LINE_TOL_PX * sx.max(sy);

    // world-space lines and arcs
    let (mut lines, arcs): (Vec<Segment>, Vec<crate::Arc>) = match &source {
        Source::Raster(dets, ink) => {
            let (arcs, used) = raster_arcs(dets, ink, &frame);
            let lines = dets
                .iter()
                .zip(&used)
                .filter(|(_, &u)| !u)
                .map(|(d, _)| d.seg.map(|p| frame.to_world(p)))
                .collect();
            (lines, arcs)
        }
        Source::Strokes(ss) => {
            let (mut lines, mut arcs) = (Vec::new(), Vec::new());
            for s in ss {
                let pts: Vec<Point> = s.iter().map(|&p| frame.to_world(p)).collect();
                for piece in decompose_stroke(&pts, line_tol) {
                    match piece {
                        Piece::Line(l) => lines.push(l),
                        Piece::Arc(a) => arcs.push(a),
                    }
                }
            }
            (lines, arcs)
        }
    };
    lines = split_at_junctions(&lines, line_tol);
    record("arcs", format!("{} arcs, {} line segments after junction split", arcs.len(), lines.len()));

    let orientation = if lines.is_empty() {
        None
    } else {
        let angles: Vec<f64> = lines.iter().map(|s| s.angle()).collect();
        let m = cluster_orientations(&angles).expect("non-empty");
        record(
            "cluster",
            format!(
                "K = {} (BIC {:.2}, AIC {:.2}), means {:?} deg",
                m.k,
                m.bic,
                m.aic,
                m.means.iter().map(|a| (a.to_degrees() * 100.0).round() / 100.0).collect::<Vec<_>>()
            ),
        );
        lines = snap_to_model(&lines, &m);
        Some(m)
    };

    let merged = merge_segments(&lines);
    record("merge", format!("{} centerlines", merged.len()));
    let mut walls: Vec<Wall> = merged
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let mut wall = Wall::line(format!("w{i}"), w.a, w.b);
            wall.thickness = (w.thickness * 100.0).round() / 100.0;
            wall
        })
        .collect();
    let n_lines = walls.len();
    walls.extend(arcs.iter().enumerate().map(|(i, a)| Wall::arc(format!("w{}", n_lines + i), *a)));
    let moves = join_endpoints(&mut walls, JOIN_TOL);
    walls.retain(|w| w.length() > 1e-6);
    record("junctions", format!("{moves} endpoint moves"));
    let (walls, dropped) = retain_stubs(&walls);
    record("stubs", format!("{} short walls dropped {:?}", dropped.len(), dropped));
    let mut walls = node_walls(&walls);
    walls.retain(|w| w.length() > 1e-6);
    for (i, w) in walls.iter_mut().enumerate() {
        w.id = format!("w{i}");
    }
    let mut layout = Layout::new();
    layout.walls = walls;
    let mut layout = layout.rounded();
    record("noding", format!("{} walls", layout.walls.len()));

    let marks: Vec<Mark> = bundle
        .labels
        .iter()
        .filter_map(|l| {
            let class = match l.class {
                LabelClass::Door => OpeningClass::Door,
                LabelClass::Window => OpeningClass::Window,
                LabelClass::Room => return None,
            };
            Some(Mark::Label {
                p: frame.to_world(l.p),
                class,
                width_hint: l.width_hint,
            })
        })
        .chain(
            bundle
                .swings
                .iter()
                .map(|s| Mark::Swing(s.iter().map(|&p| frame.to_world(p)).collect())),
        )
        .collect();
    let (doors, windows, w) = place_openings(&marks, &layout.walls);
    warnings.extend(w);
    record("openings", format!("{} doors, {} windows", doors.len(), windows.len()));
    layout.doors = doors;
    layout.windows = windows;

    let (rooms, notes) = extract_rooms(&layout.walls).map_err(at("rooms"))?;
    record("rooms", format!("{} rooms; {}", rooms.len(), notes.join("; ")));
    layout.rooms = rooms;

    let layout = assign_canonical_ids(&layout).rounded();
    let report = validate(&layout);
    for v in &report.violations {
        warnings.push(format!("{:?}: {}", v.code, v.message));
    }
    record("validate", format!("{} violations", report.violations.len()));
    let summary = summarize(&layout);
    Ok(Extraction {
        layout,
        summary,
        frame,
        orientation,
        log,
        warnings,
    })
}

/// Deterministic plain-text description: counts, room adjacency through
/// shared walls, and bounding-box proportions.
pub fn summarize(layout: &Layout) -> String {
    let mut s = String::new();
    let arcs = layout.walls.iter().filter(|w| w.is_arc()).count();
    let _ = writeln!(
        s,
        "walls: {} ({} straight, {} curved)",
        layout.walls.len(),
        layout.walls.len() - arcs,
        arcs
    );
    let _ = writeln!(s, "doors: {}", layout.doors.len());
    let _ = writeln!(s, "windows: {}", layout.windows.len());
    let _ = writeln!(s, "rooms: {}", layout.rooms.len());
    if let Some((lo, hi)) = layout.bounds() {
        let (w, h) = (hi.x - lo.x, hi.y - lo.y);
        let ratio = if h > 0.0 { w / h } else { 0.0 };
        let _ = writeln!(s, "extent: {w:.2} x {h:.2} ft (width/height {ratio:.2})");
    }
    let mut by_wall: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for r in &layout.rooms {
        for w in &r.wall_chain {
            by_wall.entry(w.as_str()).or_default().push(r.id.as_str());
        }
    }
    for r in &layout.rooms {
        let mut nb: Vec<&str> = r
            .wall_chain
            .iter()
            .flat_map(|w| by_wall[w.as_str()].iter().copied())
            .filter(|&o| o != r.id)
            .collect();
        nb.sort();
        nb.dedup();
        let _ = writeln!(s, "{} adjacent to: {}", r.id, if nb.is_empty() { "-".to_string() } else { nb.join(", ") });
    }
    s
}
