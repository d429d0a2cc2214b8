//! The layout document: walls, doors, windows and rooms in world feet.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::geometry::{closest_on_segment, ArcGeom, GeomError, Point2};
use crate::scalar::round_decimals;
use crate::Point;

pub const DEFAULT_WALL_THICKNESS: f64 = 0.5;
pub const DEFAULT_WALL_HEIGHT: f64 = 10.0;
pub const DEFAULT_DOOR_HEIGHT: f64 = 7.0;
pub const DEFAULT_WINDOW_HEIGHT: f64 = 4.0;
pub const DEFAULT_WINDOW_SILL: f64 = 3.0;
pub const DEFAULT_DOOR_WIDTH: f64 = 3.0;
pub const DOOR_WIDTH_RANGE: (f64, f64) = (2.5, 3.5);
pub const DEFAULT_WINDOW_WIDTH: f64 = 4.5;
pub const WINDOW_WIDTH_RANGE: (f64, f64) = (4.0, 5.0);
/// Clear distance between an opening and either end of its host.
pub const END_MARGIN: f64 = 0.75;
/// Minimum clear gap between neighbouring openings on one host.
pub const OPENING_GAP: f64 = 0.50;
/// Endpoint-coincidence tolerance for connectivity.
pub const SNAP_TOL: f64 = 0.05;
/// Decimal places kept for lengths and coordinates (0.01 ft).
pub const LENGTH_DECIMALS: i32 = 2;
/// Decimal places kept for angles in radians.
pub const ANGLE_DECIMALS: i32 = 6;
/// Three-point arcs flatter than this sagitta are kept as `Arc3Pt`.
pub const ARC3PT_MIN_SAGITTA: f64 = 0.01;

const MARGIN_EPS: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum LayoutError {
    #[error("malformed layout document: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum WallShape {
    Line { start: Point, end: Point },
    Arc(ArcGeom<f64>),
    /// Three-point arc input too flat to fit a circle. Only produced by
    /// ingest; geometry queries treat it as its chord.
    Arc3Pt { start: Point, mid: Point, end: Point },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Wall {
    pub id: String,
    pub shape: WallShape,
    pub thickness: f64,
    pub height: f64,
}

impl Wall {
    pub fn line(id: impl Into<String>, start: Point, end: Point) -> Self {
        Self {
            id: id.into(),
            shape: WallShape::Line { start, end },
            thickness: DEFAULT_WALL_THICKNESS,
            height: DEFAULT_WALL_HEIGHT,
        }
    }

    pub fn arc(id: impl Into<String>, arc: ArcGeom<f64>) -> Self {
        Self {
            id: id.into(),
            shape: WallShape::Arc(arc),
            thickness: DEFAULT_WALL_THICKNESS,
            height: DEFAULT_WALL_HEIGHT,
        }
    }

    pub fn is_arc(&self) -> bool {
        matches!(self.shape, WallShape::Arc(_))
    }

    pub fn as_arc(&self) -> Option<&ArcGeom<f64>> {
        match &self.shape {
            WallShape::Arc(a) => Some(a),
            _ => None,
        }
    }

    /// Segment length for lines, `radius × sweep` for arcs.
    pub fn length(&self) -> f64 {
        match &self.shape {
            WallShape::Line { start, end } | WallShape::Arc3Pt { start, end, .. } => start.dist(*end),
            WallShape::Arc(a) => a.length(),
        }
    }

    pub fn start_point(&self) -> Point {
        match &self.shape {
            WallShape::Line { start, .. } | WallShape::Arc3Pt { start, .. } => *start,
            WallShape::Arc(a) => a.start(),
        }
    }

    pub fn end_point(&self) -> Point {
        match &self.shape {
            WallShape::Line { end, .. } | WallShape::Arc3Pt { end, .. } => *end,
            WallShape::Arc(a) => a.end(),
        }
    }

    pub fn endpoints(&self) -> [Point; 2] {
        [self.start_point(), self.end_point()]
    }

    /// Segment midpoint, or the point at half sweep for arcs.
    pub fn midpoint(&self) -> Point {
        self.point_at_arclength(self.length() / 2.0)
    }

    pub fn point_at_arclength(&self, s: f64) -> Point {
        let len = self.length();
        let t = if len > 0.0 { s / len } else { 0.0 };
        match &self.shape {
            WallShape::Line { start, end } | WallShape::Arc3Pt { start, end, .. } => {
                start.lerp(*end, t)
            }
            WallShape::Arc(a) => a.point_at(t),
        }
    }

    /// Unit direction of travel at arc-length `s`.
    pub fn tangent_at_arclength(&self, s: f64) -> Point {
        match &self.shape {
            WallShape::Line { start, end } | WallShape::Arc3Pt { start, end, .. } => {
                (*end - *start).normalized()
            }
            WallShape::Arc(a) => {
                let len = a.length();
                a.tangent_at(if len > 0.0 { s / len } else { 0.0 })
            }
        }
    }

    /// Arc-length position of the closest point to `p` and the distance to it.
    pub fn project(&self, p: Point) -> (f64, f64) {
        match &self.shape {
            WallShape::Line { start, end } | WallShape::Arc3Pt { start, end, .. } => {
                let (t, q) = closest_on_segment(p, *start, *end);
                (t * start.dist(*end), q.dist(p))
            }
            WallShape::Arc(a) => {
                let t = a.project(p);
                (t * a.length(), a.point_at(t).dist(p))
            }
        }
    }

    pub fn distance_to(&self, p: Point) -> f64 {
        self.project(p).1
    }

    /// Undirected orientation in `[0, π)`; chord direction for arcs.
    pub fn orientation(&self) -> f64 {
        let d = self.end_point() - self.start_point();
        let a = d.angle();
        a.rem_euclid(std::f64::consts::PI)
    }

    pub fn translate(&mut self, d: Point) {
        match &mut self.shape {
            WallShape::Line { start, end } => {
                *start = *start + d;
                *end = *end + d;
            }
            WallShape::Arc3Pt { start, mid, end } => {
                *start = *start + d;
                *mid = *mid + d;
                *end = *end + d;
            }
            WallShape::Arc(a) => a.center = a.center + d,
        }
    }

    /// Polyline following the wall; arcs sampled every 5° (at least 2 pieces).
    pub fn polyline(&self) -> Vec<Point> {
        match &self.shape {
            WallShape::Line { start, end } | WallShape::Arc3Pt { start, end, .. } => {
                vec![*start, *end]
            }
            WallShape::Arc(a) => {
                let n = ((a.sweep / 5f64.to_radians()).ceil() as usize).max(2);
                a.sample(n)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OpeningClass {
    Door,
    Window,
}

impl OpeningClass {
    pub fn default_width(self) -> f64 {
        match self {
            OpeningClass::Door => DEFAULT_DOOR_WIDTH,
            OpeningClass::Window => DEFAULT_WINDOW_WIDTH,
        }
    }

    pub fn width_range(self) -> (f64, f64) {
        match self {
            OpeningClass::Door => DOOR_WIDTH_RANGE,
            OpeningClass::Window => WINDOW_WIDTH_RANGE,
        }
    }

    pub fn id_prefix(self) -> &'static str {
        match self {
            OpeningClass::Door => "door",
            OpeningClass::Window => "win",
        }
    }
}

/// A door or window embedded in a host wall. `offset` is the arc-length
/// distance from the host start to the opening center.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Opening {
    pub id: String,
    pub host: String,
    pub offset: f64,
    pub width: f64,
    pub height: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sill: Option<f64>,
}

impl Opening {
    pub fn door(id: impl Into<String>, host: impl Into<String>, offset: f64, width: f64) -> Self {
        Self {
            id: id.into(),
            host: host.into(),
            offset,
            width,
            height: DEFAULT_DOOR_HEIGHT,
            sill: None,
        }
    }

    pub fn window(id: impl Into<String>, host: impl Into<String>, offset: f64, width: f64) -> Self {
        Self {
            id: id.into(),
            host: host.into(),
            offset,
            width,
            height: DEFAULT_WINDOW_HEIGHT,
            sill: Some(DEFAULT_WINDOW_SILL),
        }
    }

    pub fn lo(&self) -> f64 {
        self.offset - self.width / 2.0
    }

    pub fn hi(&self) -> f64 {
        self.offset + self.width / 2.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Room {
    pub id: String,
    pub polygon: Vec<Point>,
    pub wall_chain: Vec<String>,
}

/// The structured layout document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Layout {
    pub units: String,
    #[serde(with = "wall_doc")]
    pub walls: Vec<Wall>,
    pub doors: Vec<Opening>,
    pub windows: Vec<Opening>,
    pub rooms: Vec<Room>,
}

impl Default for Layout {
    fn default() -> Self {
        Self {
            units: "feet".into(),
            walls: Vec::new(),
            doors: Vec::new(),
            windows: Vec::new(),
            rooms: Vec::new(),
        }
    }
}

impl Layout {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_json(text: &str) -> Result<Self, LayoutError> {
        serde_json::from_str(text).map_err(|e| LayoutError::Parse(e.to_string()))
    }

    /// Canonical UTF-8 serialization (rounded to document precision).
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.rounded()).expect("layout serializes")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&self.rounded()).expect("layout serializes")
    }

    /// Hex SHA-256 of the canonical serialization.
    pub fn digest(&self) -> String {
        hex_digest(self.to_json().as_bytes())
    }

    pub fn wall(&self, id: &str) -> Option<&Wall> {
        self.walls.iter().find(|w| w.id == id)
    }

    pub fn wall_mut(&mut self, id: &str) -> Option<&mut Wall> {
        self.walls.iter_mut().find(|w| w.id == id)
    }

    pub fn wall_index(&self) -> HashMap<&str, &Wall> {
        self.walls.iter().map(|w| (w.id.as_str(), w)).collect()
    }

    pub fn openings(&self) -> impl Iterator<Item = (OpeningClass, &Opening)> {
        self.doors
            .iter()
            .map(|o| (OpeningClass::Door, o))
            .chain(self.windows.iter().map(|o| (OpeningClass::Window, o)))
    }

    pub fn openings_of(&self, class: OpeningClass) -> &Vec<Opening> {
        match class {
            OpeningClass::Door => &self.doors,
            OpeningClass::Window => &self.windows,
        }
    }

    pub fn openings_of_mut(&mut self, class: OpeningClass) -> &mut Vec<Opening> {
        match class {
            OpeningClass::Door => &mut self.doors,
            OpeningClass::Window => &mut self.windows,
        }
    }

    pub fn opening(&self, id: &str) -> Option<(OpeningClass, &Opening)> {
        self.openings().find(|(_, o)| o.id == id)
    }

    pub fn opening_mut(&mut self, id: &str) -> Option<&mut Opening> {
        self.doors
            .iter_mut()
            .chain(self.windows.iter_mut())
            .find(|o| o.id == id)
    }

    pub fn element_count(&self) -> usize {
        self.walls.len() + self.doors.len() + self.windows.len() + self.rooms.len()
    }

    /// Copy with every length rounded to 0.01 ft and angles to 1e-6 rad.
    pub fn rounded(&self) -> Layout {
        let mut out = self.clone();
        let l = |v: f64| round_decimals(v, LENGTH_DECIMALS);
        let rp = |p: Point| Point2::new(l(p.x), l(p.y));
        for w in &mut out.walls {
            w.thickness = l(w.thickness);
            w.height = l(w.height);
            match &mut w.shape {
                WallShape::Line { start, end } => {
                    *start = rp(*start);
                    *end = rp(*end);
                }
                WallShape::Arc3Pt { start, mid, end } => {
                    *start = rp(*start);
                    *mid = rp(*mid);
                    *end = rp(*end);
                }
                WallShape::Arc(a) => {
                    a.center = rp(a.center);
                    a.radius = l(a.radius);
                    a.start_angle = round_decimals(a.start_angle, ANGLE_DECIMALS);
                    a.sweep = round_decimals(a.sweep, ANGLE_DECIMALS);
                }
            }
        }
        for o in out.doors.iter_mut().chain(out.windows.iter_mut()) {
            o.offset = l(o.offset);
            o.width = l(o.width);
            o.height = l(o.height);
            o.sill = o.sill.map(l);
        }
        for r in &mut out.rooms {
            for p in &mut r.polygon {
                *p = rp(*p);
            }
        }
        out
    }

    /// Axis-aligned bounds over wall geometry: `(min, max)`.
    pub fn bounds(&self) -> Option<(Point, Point)> {
        let pts: Vec<Point> = self.walls.iter().flat_map(|w| w.polyline()).collect();
        if pts.is_empty() {
            return None;
        }
        let mut lo = pts[0];
        let mut hi = pts[0];
        for p in pts {
            lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        Some((lo, hi))
    }
}

pub(crate) fn hex_digest(bytes: &[u8]) -> String {
    let d = Sha256::digest(bytes);
    d.iter().map(|b| format!("{b:02x}")).collect()
}

/// Converts three-point arc input to stored form: a proper arc, or `Arc3Pt`
/// when the points are (nearly) collinear.
pub fn ingest_arc3pt(start: Point, mid: Point, end: Point) -> WallShape {
    let flat = crate::geometry::dist_point_segment(mid, start, end) < ARC3PT_MIN_SAGITTA;
    match crate::geometry::arc_from_3pt(start, mid, end) {
        Ok(arc) if !flat => WallShape::Arc(arc),
        _ => WallShape::Arc3Pt { start, mid, end },
    }
}

/// World endpoints of an opening on its host. Line hosts project along the
/// wall direction; arc hosts use the tangent chord centered at the opening's
/// arc-length position.
pub fn opening_world_span(opening: &Opening, host: &Wall) -> Result<(Point, Point), GeomError> {
    let len = host.length();
    let (lo, hi) = (opening.lo(), opening.hi());
    let (min, max) = (END_MARGIN, len - END_MARGIN);
    if lo < min - MARGIN_EPS || hi > max + MARGIN_EPS {
        return Err(GeomError::OffWall { lo, hi, min, max });
    }
    match &host.shape {
        WallShape::Line { .. } | WallShape::Arc3Pt { .. } => {
            Ok((host.point_at_arclength(lo), host.point_at_arclength(hi)))
        }
        WallShape::Arc(_) => {
            let c = host.point_at_arclength(opening.offset);
            let t = host.tangent_at_arclength(opening.offset);
            let h = opening.width / 2.0;
            Ok((c - t * h, c + t * h))
        }
    }
}

/// World midpoint of an opening: the host point at its offset.
pub fn opening_midpoint(opening: &Opening, host: &Wall) -> Point {
    host.point_at_arclength(opening.offset)
}

/// Renumbers every element deterministically. Exterior-boundary walls come
/// first (counterclockwise from the wall with the lexicographically smallest
/// midpoint), then interior walls by midpoint x then y. Openings follow their
/// host order then offset; rooms are ordered by centroid like interior walls.
/// Geometry is untouched.
pub fn assign_canonical_ids(layout: &Layout) -> Layout {
    let key = |p: Point| {
        (
            (round_decimals(p.x, LENGTH_DECIMALS) * 100.0) as i64,
            (round_decimals(p.y, LENGTH_DECIMALS) * 100.0) as i64,
        )
    };
    let boundary = crate::planar::PlanarGraph::from_walls(&layout.walls, SNAP_TOL).outer_boundary_walls();
    let mut order: Vec<usize> = Vec::with_capacity(layout.walls.len());
    if !boundary.is_empty() {
        let start = boundary
            .iter()
            .enumerate()
            .min_by_key(|(_, &w)| key(layout.walls[w].midpoint()))
            .map(|(i, _)| i)
            .unwrap_or(0);
        order.extend(boundary[start..].iter().chain(boundary[..start].iter()));
    }
    let mut interior: Vec<usize> = (0..layout.walls.len()).filter(|i| !order.contains(i)).collect();
    interior.sort_by_key(|&i| (key(layout.walls[i].midpoint()), i));
    order.extend(interior);

    let mut wall_map: BTreeMap<String, String> = BTreeMap::new();
    let mut walls = Vec::with_capacity(layout.walls.len());
    for (n, &i) in order.iter().enumerate() {
        let mut w = layout.walls[i].clone();
        let new_id = format!("wall{}", n + 1);
        wall_map.insert(w.id.clone(), new_id.clone());
        w.id = new_id;
        walls.push(w);
    }
    let host_rank: HashMap<&str, usize> = order
        .iter()
        .enumerate()
        .map(|(n, &i)| (layout.walls[i].id.as_str(), n))
        .collect();

    let renumber = |list: &[Opening], class: OpeningClass| -> Vec<Opening> {
        let mut idx: Vec<usize> = (0..list.len()).collect();
        idx.sort_by_key(|&i| {
            let o = &list[i];
            (
                host_rank.get(o.host.as_str()).copied().unwrap_or(usize::MAX),
                (round_decimals(o.offset, LENGTH_DECIMALS) * 100.0) as i64,
                i,
            )
        });
        idx.iter()
            .enumerate()
            .map(|(n, &i)| {
                let mut o = list[i].clone();
                o.id = format!("{}{}", class.id_prefix(), n + 1);
                if let Some(h) = wall_map.get(&o.host) {
                    o.host = h.clone();
                }
                o
            })
            .collect()
    };
    let doors = renumber(&layout.doors, OpeningClass::Door);
    let windows = renumber(&layout.windows, OpeningClass::Window);

    let centroid = |poly: &[Point]| {
        let n = poly.len().max(1) as f64;
        let s = poly.iter().fold(Point::origin(), |a, &p| a + p);
        s * (1.0 / n)
    };
    let mut ridx: Vec<usize> = (0..layout.rooms.len()).collect();
    ridx.sort_by_key(|&i| (key(centroid(&layout.rooms[i].polygon)), i));
    let rooms = ridx
        .iter()
        .enumerate()
        .map(|(n, &i)| {
            let mut r = layout.rooms[i].clone();
            r.id = format!("room{}", n + 1);
            for w in &mut r.wall_chain {
                if let Some(h) = wall_map.get(w) {
                    *w = h.clone();
                }
            }
            r
        })
        .collect();

    Layout {
        units: layout.units.clone(),
        walls,
        doors,
        windows,
        rooms,
    }
}

mod wall_doc {
    //! Flat `{"id","kind",...}` wall records.
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(deny_unknown_fields)]
    struct WallDoc {
        id: String,
        kind: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        start: Option<Point>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        end: Option<Point>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mid: Option<Point>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<Point>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        radius: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        start_angle: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sweep: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        ccw: Option<bool>,
        thickness: f64,
        height: f64,
    }

    pub fn serialize<Z: Serializer>(walls: &[Wall], ser: Z) -> Result<Z::Ok, Z::Error> {
        let docs: Vec<WallDoc> = walls
            .iter()
            .map(|w| {
                let mut d = WallDoc {
                    id: w.id.clone(),
                    kind: String::new(),
                    start: None,
                    end: None,
                    mid: None,
                    center: None,
                    radius: None,
                    start_angle: None,
                    sweep: None,
                    ccw: None,
                    thickness: w.thickness,
                    height: w.height,
                };
                match &w.shape {
                    WallShape::Line { start, end } => {
                        d.kind = "line".into();
                        d.start = Some(*start);
                        d.end = Some(*end);
                    }
                    WallShape::Arc3Pt { start, mid, end } => {
                        d.kind = "arc3pt".into();
                        d.start = Some(*start);
                        d.mid = Some(*mid);
                        d.end = Some(*end);
                    }
                    WallShape::Arc(a) => {
                        d.kind = "arc".into();
                        d.center = Some(a.center);
                        d.radius = Some(a.radius);
                        d.start_angle = Some(a.start_angle);
                        d.sweep = Some(a.sweep);
                        d.ccw = Some(a.ccw);
                    }
                }
                d
            })
            .collect();
        docs.serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Vec<Wall>, D::Error> {
        use serde::de::Error;
        let docs = Vec::<WallDoc>::deserialize(de)?;
        docs.into_iter()
            .map(|d| {
                let shape = match d.kind.as_str() {
                    "line" => WallShape::Line {
                        start: d.start.ok_or_else(|| D::Error::missing_field("start"))?,
                        end: d.end.ok_or_else(|| D::Error::missing_field("end"))?,
                    },
                    "arc" => WallShape::Arc(ArcGeom {
                        center: d.center.ok_or_else(|| D::Error::missing_field("center"))?,
                        radius: d.radius.ok_or_else(|| D::Error::missing_field("radius"))?,
                        start_angle: d
                            .start_angle
                            .ok_or_else(|| D::Error::missing_field("start_angle"))?,
                        sweep: d.sweep.ok_or_else(|| D::Error::missing_field("sweep"))?,
                        ccw: d.ccw.ok_or_else(|| D::Error::missing_field("ccw"))?,
                    }),
                    "arc3pt" => {
                        let start = d.start.ok_or_else(|| D::Error::missing_field("start"))?;
                        let mid = d.mid.ok_or_else(|| D::Error::missing_field("mid"))?;
                        let end = d.end.ok_or_else(|| D::Error::missing_field("end"))?;
                        ingest_arc3pt(start, mid, end)
                    }
                    other => {
                        return Err(D::Error::unknown_variant(other, &["line", "arc", "arc3pt"]));
                    }
                };
                Ok(Wall {
                    id: d.id,
                    shape,
                    thickness: d.thickness,
                    height: d.height,
                })
            })
            .collect()
    }
}
