//! Schema and topology validation of layout documents, with suggested fixes
//! and a deterministic auto-repair catalog.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::geometry::{polygon_self_intersects, signed_area};
use crate::layout::{
    Layout, Opening, OpeningClass, Wall, WallShape, ANGLE_DECIMALS, END_MARGIN, LENGTH_DECIMALS,
    OPENING_GAP, SNAP_TOL,
};
use crate::scalar::round_decimals;
use crate::Point;

/// Dangling endpoints closer than this to another wall are snapped by repair.
pub const DANGLING_SNAP_RADIUS: f64 = 0.5;
/// Room vertices within this distance of a wall are snapped onto it by repair.
pub const ROOM_SNAP_RADIUS: f64 = 1.0;
/// Maximum validate/repair rounds.
pub const REPAIR_PASSES: usize = 3;

const EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ViolationCode {
    Schema,
    DupId,
    ZeroLen,
    FullCircle,
    CollinearArc3pt,
    OpeningOffWall,
    OpeningEndMargin,
    OpeningOverlap,
    OpeningCrossesVertex,
    MissingHost,
    RoomNotClosed,
    RoomCw,
    RoomSelfX,
    RoomNonposArea,
    DanglingEndpoint,
    ExcessPrecision,
}

impl ViolationCode {
    pub const ALL: [ViolationCode; 16] = [
        ViolationCode::Schema,
        ViolationCode::DupId,
        ViolationCode::ZeroLen,
        ViolationCode::FullCircle,
        ViolationCode::CollinearArc3pt,
        ViolationCode::OpeningOffWall,
        ViolationCode::OpeningEndMargin,
        ViolationCode::OpeningOverlap,
        ViolationCode::OpeningCrossesVertex,
        ViolationCode::MissingHost,
        ViolationCode::RoomNotClosed,
        ViolationCode::RoomCw,
        ViolationCode::RoomSelfX,
        ViolationCode::RoomNonposArea,
        ViolationCode::DanglingEndpoint,
        ViolationCode::ExcessPrecision,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ViolationCode::Schema => "SCHEMA",
            ViolationCode::DupId => "DUP_ID",
            ViolationCode::ZeroLen => "ZERO_LEN",
            ViolationCode::FullCircle => "FULL_CIRCLE",
            ViolationCode::CollinearArc3pt => "COLLINEAR_ARC3PT",
            ViolationCode::OpeningOffWall => "OPENING_OFF_WALL",
            ViolationCode::OpeningEndMargin => "OPENING_END_MARGIN",
            ViolationCode::OpeningOverlap => "OPENING_OVERLAP",
            ViolationCode::OpeningCrossesVertex => "OPENING_CROSSES_VERTEX",
            ViolationCode::MissingHost => "MISSING_HOST",
            ViolationCode::RoomNotClosed => "ROOM_NOT_CLOSED",
            ViolationCode::RoomCw => "ROOM_CW",
            ViolationCode::RoomSelfX => "ROOM_SELF_X",
            ViolationCode::RoomNonposArea => "ROOM_NONPOS_AREA",
            ViolationCode::DanglingEndpoint => "DANGLING_ENDPOINT",
            ViolationCode::ExcessPrecision => "EXCESS_PRECISION",
        }
    }
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WallEnd {
    Start,
    End,
}

/// A machine-applicable repair suggestion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case")]
pub enum Fix {
    RenameDuplicate { id: String, new_id: String },
    RefitAsLine { wall: String },
    RelocateOpening { opening: String, offset: f64 },
    TrimOpening { opening: String, offset: f64, width: f64 },
    SeparateOpenings { openings: Vec<String> },
    AttachToNearestWall { opening: String, host: String },
    SnapEndpoint { wall: String, end: WallEnd, to: Point },
    ReverseRoom { room: String },
    SnapRoomToWalls { room: String },
    RoundPrecision,
}

impl fmt::Display for Fix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = |v: f64| round_decimals(v, LENGTH_DECIMALS);
        match self {
            Fix::RenameDuplicate { id, new_id } => write!(f, "rename duplicate {id} to {new_id}"),
            Fix::RefitAsLine { wall } => write!(f, "refit {wall} as a straight wall"),
            Fix::RelocateOpening { offset, .. } => write!(f, "relocate to offset {}", r(*offset)),
            Fix::TrimOpening { offset, width, .. } => {
                write!(f, "trim to width {} at offset {}", r(*width), r(*offset))
            }
            Fix::SeparateOpenings { openings } => write!(f, "separate {}", openings.join(" and ")),
            Fix::AttachToNearestWall { host, .. } => write!(f, "attach to {host}"),
            Fix::SnapEndpoint { end, to, .. } => {
                write!(f, "snap {:?} to ({}, {})", end, r(to.x), r(to.y))
            }
            Fix::ReverseRoom { .. } => f.write_str("reverse vertex order"),
            Fix::SnapRoomToWalls { .. } => f.write_str("snap polygon onto walls"),
            Fix::RoundPrecision => f.write_str("round to 0.01 ft"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub code: ViolationCode,
    pub elements: Vec<String>,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suggested_fix: Option<Fix>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub passes: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn codes(&self) -> BTreeSet<ViolationCode> {
        self.violations.iter().map(|v| v.code).collect()
    }

    pub fn has(&self, code: ViolationCode) -> bool {
        self.violations.iter().any(|v| v.code == code)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DanglingEndpoint {
    pub wall: String,
    pub end: WallEnd,
    pub point: Point,
}

struct Collector {
    out: Vec<Violation>,
}

impl Collector {
    fn push(&mut self, code: ViolationCode, elements: Vec<String>, message: String, fix: Option<Fix>) {
        self.out.push(Violation {
            code,
            elements,
            message,
            suggested_fix: fix,
        });
    }
}

fn finite(v: f64) -> bool {
    v.is_finite()
}

/// Usable offset range for the center of an opening of `width` on a host of `len`.
pub fn center_range(len: f64, width: f64) -> (f64, f64) {
    (END_MARGIN + width / 2.0, len - END_MARGIN - width / 2.0)
}

/// Arc-length stations on `host` where another wall's endpoint attaches to
/// its interior.
pub fn interior_vertices(layout: &Layout, host: &Wall) -> Vec<f64> {
    let len = host.length();
    let mut out: Vec<f64> = layout
        .walls
        .iter()
        .filter(|w| w.id != host.id)
        .flat_map(|w| w.endpoints())
        .filter_map(|p| {
            let (s, d) = host.project(p);
            (d <= SNAP_TOL && s > SNAP_TOL && s < len - SNAP_TOL).then_some(s)
        })
        .collect();
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() <= SNAP_TOL);
    out
}

/// Wall endpoints that neither coincide with another wall's endpoint nor lie
/// on another wall, within the 0.05 ft tolerance.
pub fn connectivity_check(layout: &Layout) -> Vec<DanglingEndpoint> {
    let mut out = Vec::new();
    for (i, w) in layout.walls.iter().enumerate() {
        for (end, p) in [(WallEnd::Start, w.start_point()), (WallEnd::End, w.end_point())] {
            let connected = layout
                .walls
                .iter()
                .enumerate()
                .any(|(j, o)| j != i && o.distance_to(p) <= SNAP_TOL);
            if !connected {
                out.push(DanglingEndpoint {
                    wall: w.id.clone(),
                    end,
                    point: p,
                });
            }
        }
    }
    out
}

fn excess(v: f64, places: i32) -> bool {
    (v - round_decimals(v, places)).abs() > EPS
}

fn has_excess_precision(l: &Layout) -> bool {
    let pt = |p: &Point| excess(p.x, LENGTH_DECIMALS) || excess(p.y, LENGTH_DECIMALS);
    let len = |v: f64| excess(v, LENGTH_DECIMALS);
    l.walls.iter().any(|w| {
        len(w.thickness)
            || len(w.height)
            || match &w.shape {
                WallShape::Line { start, end } => pt(start) || pt(end),
                WallShape::Arc3Pt { start, mid, end } => pt(start) || pt(mid) || pt(end),
                WallShape::Arc(a) => {
                    pt(&a.center)
                        || len(a.radius)
                        || excess(a.start_angle, ANGLE_DECIMALS)
                        || excess(a.sweep, ANGLE_DECIMALS)
                }
            }
    }) || l.openings().any(|(_, o)| {
        len(o.offset) || len(o.width) || len(o.height) || o.sill.is_some_and(len)
    }) || l.rooms.iter().any(|r| r.polygon.iter().any(pt))
}

fn schema_problems(l: &Layout) -> Vec<(String, String)> {
    let mut out = Vec::new();
    if l.units != "feet" {
        out.push((String::new(), format!("units must be \"feet\", found {:?}", l.units)));
    }
    let pt_ok = |p: &Point| finite(p.x) && finite(p.y);
    for w in &l.walls {
        let geom_ok = match &w.shape {
            WallShape::Line { start, end } => pt_ok(start) && pt_ok(end),
            WallShape::Arc3Pt { start, mid, end } => pt_ok(start) && pt_ok(mid) && pt_ok(end),
            WallShape::Arc(a) => {
                pt_ok(&a.center) && finite(a.radius) && finite(a.start_angle) && finite(a.sweep)
            }
        };
        if w.id.is_empty() || !geom_ok || !(w.thickness > 0.0) || !(w.height > 0.0) {
            out.push((w.id.clone(), format!("wall {:?} has missing or non-positive fields", w.id)));
        }
    }
    for (class, o) in l.openings() {
        let sill_ok = match class {
            OpeningClass::Door => o.sill.is_none(),
            OpeningClass::Window => o.sill.is_some_and(|s| finite(s) && s >= 0.0),
        };
        if o.id.is_empty() || !finite(o.offset) || !(o.width > 0.0) || !(o.height > 0.0) || !sill_ok {
            out.push((o.id.clone(), format!("{class:?} {:?} has invalid fields", o.id)));
        }
    }
    for r in &l.rooms {
        if r.id.is_empty() || r.polygon.len() < 3 || !r.polygon.iter().all(pt_ok) {
            out.push((r.id.clone(), format!("room {:?} polygon needs ≥ 3 finite vertices", r.id)));
        }
    }
    out
}

/// Checks the layout against the schema and topology rules.
pub fn validate(layout: &Layout) -> ValidationReport {
    let mut c = Collector { out: Vec::new() };

    // schema
    let schema = schema_problems(layout);
    let schema_bad: BTreeSet<String> = schema.iter().map(|(id, _)| id.clone()).collect();
    for (id, msg) in schema {
        let elements = if id.is_empty() { Vec::new() } else { vec![id] };
        c.push(ViolationCode::Schema, elements, msg, None);
    }

    // unique ids
    let mut seen: BTreeMap<&str, usize> = BTreeMap::new();
    let all_ids = layout
        .walls
        .iter()
        .map(|w| w.id.as_str())
        .chain(layout.openings().map(|(_, o)| o.id.as_str()))
        .chain(layout.rooms.iter().map(|r| r.id.as_str()));
    for id in all_ids {
        *seen.entry(id).or_insert(0) += 1;
    }
    let taken: BTreeSet<&str> = seen.keys().copied().collect();
    for (id, n) in &seen {
        if *n > 1 && !id.is_empty() {
            let new_id = fresh_id(id, &taken);
            c.push(
                ViolationCode::DupId,
                vec![id.to_string()],
                format!("id {id:?} used by {n} elements"),
                Some(Fix::RenameDuplicate {
                    id: id.to_string(),
                    new_id,
                }),
            );
        }
    }

    // wall geometry
    for w in &layout.walls {
        if schema_bad.contains(&w.id) {
            continue;
        }
        match &w.shape {
            WallShape::Arc(a) => {
                if !(a.radius > EPS) {
                    c.push(ViolationCode::ZeroLen, vec![w.id.clone()], "arc radius must be positive".into(), None);
                } else if !(a.sweep > EPS && a.sweep < std::f64::consts::TAU - EPS) {
                    c.push(
                        ViolationCode::FullCircle,
                        vec![w.id.clone()],
                        format!("arc sweep {:.6} outside (0, 2π)", a.sweep),
                        None,
                    );
                }
            }
            WallShape::Arc3Pt { .. } => {
                if w.length() > EPS {
                    c.push(
                        ViolationCode::CollinearArc3pt,
                        vec![w.id.clone()],
                        "three-point arc is (nearly) collinear".into(),
                        Some(Fix::RefitAsLine { wall: w.id.clone() }),
                    );
                } else {
                    c.push(ViolationCode::ZeroLen, vec![w.id.clone()], "wall has zero length".into(), None);
                }
            }
            WallShape::Line { .. } => {
                if !(w.length() > EPS) {
                    c.push(ViolationCode::ZeroLen, vec![w.id.clone()], "wall has zero length".into(), None);
                }
            }
        }
    }

    // openings
    let walls = layout.wall_index();
    let mut per_host: BTreeMap<&str, Vec<&Opening>> = BTreeMap::new();
    for (class, o) in layout.openings() {
        if schema_bad.contains(&o.id) {
            continue;
        }
        let Some(host) = walls.get(o.host.as_str()) else {
            let fix = nearest_host_for(layout, o, class).map(|h| Fix::AttachToNearestWall {
                opening: o.id.clone(),
                host: h,
            });
            c.push(
                ViolationCode::MissingHost,
                vec![o.id.clone()],
                format!("host {:?} does not exist", o.host),
                fix,
            );
            continue;
        };
        let len = host.length();
        if len <= EPS {
            continue;
        }
        let (cmin, cmax) = center_range(len, o.width);
        if o.offset < -EPS || o.offset > len + EPS || cmin > cmax + EPS {
            let fix = (cmin <= cmax).then(|| Fix::RelocateOpening {
                opening: o.id.clone(),
                offset: o.offset.clamp(cmin, cmax),
            });
            c.push(
                ViolationCode::OpeningOffWall,
                vec![o.id.clone()],
                format!("opening {} does not lie on {} (length {:.2})", o.id, host.id, len),
                fix,
            );
            continue;
        }
        if o.offset < cmin - 1e-6 || o.offset > cmax + 1e-6 {
            c.push(
                ViolationCode::OpeningEndMargin,
                vec![o.id.clone()],
                format!("opening {} closer than {END_MARGIN} ft to an end of {}", o.id, host.id),
                Some(Fix::RelocateOpening {
                    opening: o.id.clone(),
                    offset: o.offset.clamp(cmin, cmax),
                }),
            );
        }
        let verts = interior_vertices(layout, host);
        if let Some(&s) = verts.iter().find(|&&s| s > o.lo() + 1e-6 && s < o.hi() - 1e-6) {
            let fix = crossing_fix(o, s, &verts, len);
            c.push(
                ViolationCode::OpeningCrossesVertex,
                vec![o.id.clone()],
                format!("opening {} spans a wall junction at {:.2} ft", o.id, s),
                fix,
            );
        }
        per_host.entry(host.id.as_str()).or_default().push(o);
    }
    for list in per_host.values_mut() {
        list.sort_by(|a, b| a.offset.total_cmp(&b.offset).then(a.id.cmp(&b.id)));
        for i in 0..list.len() {
            for j in (i + 1)..list.len() {
                let (a, b) = (list[i], list[j]);
                if a.hi() + OPENING_GAP > b.lo() + 1e-6 && b.hi() + OPENING_GAP > a.lo() + 1e-6 {
                    let mut ids = vec![a.id.clone(), b.id.clone()];
                    ids.sort();
                    c.push(
                        ViolationCode::OpeningOverlap,
                        ids.clone(),
                        format!("openings {} and {} closer than {OPENING_GAP} ft", ids[0], ids[1]),
                        Some(Fix::SeparateOpenings { openings: ids }),
                    );
                }
            }
        }
    }

    // rooms
    for r in &layout.rooms {
        if schema_bad.contains(&r.id) {
            continue;
        }
        let off_wall = r
            .polygon
            .iter()
            .any(|p| !layout.walls.iter().any(|w| w.distance_to(*p) <= SNAP_TOL));
        let unknown_wall = r.wall_chain.iter().any(|w| !walls.contains_key(w.as_str()));
        if off_wall || unknown_wall {
            c.push(
                ViolationCode::RoomNotClosed,
                vec![r.id.clone()],
                format!("room {} boundary does not close onto the walls", r.id),
                Some(Fix::SnapRoomToWalls { room: r.id.clone() }),
            );
        }
        let area = signed_area(&r.polygon).unwrap_or(0.0);
        if polygon_self_intersects(&r.polygon) {
            c.push(ViolationCode::RoomSelfX, vec![r.id.clone()], format!("room {} self-intersects", r.id), None);
        } else if area.abs() <= EPS {
            c.push(ViolationCode::RoomNonposArea, vec![r.id.clone()], format!("room {} has no area", r.id), None);
        } else if area < 0.0 {
            c.push(
                ViolationCode::RoomCw,
                vec![r.id.clone()],
                format!("room {} is clockwise", r.id),
                Some(Fix::ReverseRoom { room: r.id.clone() }),
            );
        }
    }

    // connectivity
    for d in connectivity_check(layout) {
        let fix = snap_target(layout, &d).map(|to| Fix::SnapEndpoint {
            wall: d.wall.clone(),
            end: d.end,
            to,
        });
        c.push(
            ViolationCode::DanglingEndpoint,
            vec![d.wall.clone()],
            format!("{:?} of {} at ({:.2}, {:.2}) is not connected", d.end, d.wall, d.point.x, d.point.y),
            fix,
        );
    }

    if has_excess_precision(layout) {
        c.push(
            ViolationCode::ExcessPrecision,
            Vec::new(),
            "values carry more than 0.01 ft precision".into(),
            Some(Fix::RoundPrecision),
        );
    }

    let mut violations = c.out;
    violations.sort_by(|a, b| {
        let ka = a.elements.first().map(String::as_str).unwrap_or("");
        let kb = b.elements.first().map(String::as_str).unwrap_or("");
        ka.cmp(kb).then(a.code.cmp(&b.code)).then(a.elements.cmp(&b.elements))
    });
    ValidationReport {
        passes: violations.is_empty(),
        violations,
    }
}

fn fresh_id(id: &str, taken: &BTreeSet<&str>) -> String {
    let stem = id.trim_end_matches(|c: char| c.is_ascii_digit());
    (1..)
        .map(|n| format!("{stem}{n}"))
        .find(|cand| !taken.contains(cand.as_str()))
        .expect("unbounded search")
}

fn id_number(id: &str) -> Option<i64> {
    let digits: String = id
        .chars()
        .rev()
        .take_while(|c| c.is_ascii_digit())
        .collect::<Vec<_>>()
        .into_iter()
        .rev()
        .collect();
    digits.parse().ok()
}

/// Replacement host for an orphaned opening. The document keeps no world
/// position for openings, so "nearest" is taken in canonical numbering: the
/// wall whose number is closest to the missing host's, among walls long
/// enough to carry the opening.
fn nearest_host_for(layout: &Layout, o: &Opening, _class: OpeningClass) -> Option<String> {
    let want = id_number(&o.host).unwrap_or(0);
    layout
        .walls
        .iter()
        .filter(|w| {
            let (a, b) = center_range(w.length(), o.width);
            a <= b
        })
        .min_by_key(|w| {
            let n = id_number(&w.id).unwrap_or(i64::MAX / 2);
            ((n - want).abs(), n, w.id.clone())
        })
        .map(|w| w.id.clone())
}

fn crossing_fix(o: &Opening, s: f64, verts: &[f64], len: f64) -> Option<Fix> {
    // free intervals between junctions, each shrunk by the end margin
    let mut cuts = vec![0.0];
    cuts.extend_from_slice(verts);
    cuts.push(len);
    let intervals: Vec<(f64, f64)> = cuts
        .windows(2)
        .map(|w| (w[0] + END_MARGIN, w[1] - END_MARGIN))
        .filter(|(a, b)| b > a)
        .collect();
    // trim: keep the side of the junction holding the opening center
    let side = if o.offset < s {
        (o.lo().max(END_MARGIN), s - END_MARGIN)
    } else {
        (s + END_MARGIN, o.hi().min(len - END_MARGIN))
    };
    if side.1 - side.0 >= o.width * 0.5 && side.1 > side.0 {
        let width = side.1 - side.0;
        return Some(Fix::TrimOpening {
            opening: o.id.clone(),
            offset: (side.0 + side.1) / 2.0,
            width,
        });
    }
    // relocate into the closest interval wide enough for the full width
    intervals
        .iter()
        .filter(|(a, b)| b - a >= o.width)
        .map(|(a, b)| o.offset.clamp(a + o.width / 2.0, b - o.width / 2.0))
        .min_by(|x, y| (x - o.offset).abs().total_cmp(&(y - o.offset).abs()))
        .map(|offset| Fix::RelocateOpening {
            opening: o.id.clone(),
            offset,
        })
}

fn snap_target(layout: &Layout, d: &DanglingEndpoint) -> Option<Point> {
    let mut best: Option<(f64, Point)> = None;
    for w in layout.walls.iter().filter(|w| w.id != d.wall) {
        // prefer endpoints; fall back to the closest point on the wall
        for q in w.endpoints() {
            let dist = q.dist(d.point);
            if dist <= DANGLING_SNAP_RADIUS && best.is_none_or(|(b, _)| dist < b) {
                best = Some((dist, q));
            }
        }
    }
    if best.is_some() {
        return best.map(|(_, p)| p);
    }
    for w in layout.walls.iter().filter(|w| w.id != d.wall) {
        let (s, dist) = w.project(d.point);
        if dist <= DANGLING_SNAP_RADIUS && best.is_none_or(|(b, _)| dist < b) {
            best = Some((dist, w.point_at_arclength(s)));
        }
    }
    best.map(|(_, p)| p)
}

fn apply_fix(layout: &mut Layout, fix: &Fix) {
    match fix {
        Fix::RenameDuplicate { id, new_id } => {
            // keep the first bearer, rename the second
            let mut count = 0;
            let mut rename = |eid: &mut String| {
                if eid == id {
                    count += 1;
                    if count == 2 {
                        *eid = new_id.clone();
                    }
                }
            };
            for w in &mut layout.walls {
                rename(&mut w.id);
            }
            for o in layout.doors.iter_mut().chain(layout.windows.iter_mut()) {
                rename(&mut o.id);
            }
            for r in &mut layout.rooms {
                rename(&mut r.id);
            }
        }
        Fix::RefitAsLine { wall } => {
            if let Some(w) = layout.wall_mut(wall) {
                if let WallShape::Arc3Pt { start, end, .. } = w.shape {
                    w.shape = WallShape::Line { start, end };
                }
            }
        }
        Fix::RelocateOpening { opening, offset } => {
            if let Some(o) = layout.opening_mut(opening) {
                o.offset = *offset;
            }
        }
        Fix::TrimOpening { opening, offset, width } => {
            if let Some(o) = layout.opening_mut(opening) {
                o.offset = *offset;
                o.width = *width;
            }
        }
        Fix::SeparateOpenings { openings } => separate_or_merge(layout, openings),
        Fix::AttachToNearestWall { opening, host } => {
            let len = layout.wall(host).map(|w| w.length()).unwrap_or(0.0);
            if let Some(o) = layout.opening_mut(opening) {
                o.host = host.clone();
                let (a, b) = center_range(len, o.width);
                o.offset = if a <= b { o.offset.clamp(a, b) } else { len / 2.0 };
            }
        }
        Fix::SnapEndpoint { wall, end, to } => {
            if let Some(w) = layout.wall_mut(wall) {
                if let WallShape::Line { start, end: e } = &mut w.shape {
                    match end {
                        WallEnd::Start => *start = *to,
                        WallEnd::End => *e = *to,
                    }
                }
            }
        }
        Fix::ReverseRoom { room } => {
            if let Some(r) = layout.rooms.iter_mut().find(|r| &r.id == room) {
                r.polygon.reverse();
                r.wall_chain.reverse();
            }
        }
        Fix::SnapRoomToWalls { room } => {
            let walls = layout.walls.clone();
            let known: BTreeSet<String> = walls.iter().map(|w| w.id.clone()).collect();
            if let Some(r) = layout.rooms.iter_mut().find(|r| &r.id == room) {
                for p in &mut r.polygon {
                    let best = walls
                        .iter()
                        .map(|w| {
                            let (s, d) = w.project(*p);
                            (d, w.point_at_arclength(s))
                        })
                        .min_by(|a, b| a.0.total_cmp(&b.0));
                    if let Some((d, q)) = best {
                        if d <= ROOM_SNAP_RADIUS {
                            *p = q;
                        }
                    }
                }
                r.wall_chain.retain(|w| known.contains(w));
            }
        }
        Fix::RoundPrecision => *layout = layout.rounded(),
    }
}

/// Separates two overlapping openings when both fit on the host with the
/// required gap and margins; otherwise merges them into one.
fn separate_or_merge(layout: &mut Layout, ids: &[String]) {
    let [a_id, b_id] = ids else { return };
    let (Some((ca, a)), Some((_, b))) = (layout.opening(a_id), layout.opening(b_id)) else {
        return;
    };
    if a.host != b.host {
        return;
    }
    let (a, b) = (a.clone(), b.clone());
    let Some(host) = layout.wall(&a.host) else { return };
    let len = host.length();
    let (first, second) = if (a.offset, &a.id) <= (b.offset, &b.id) { (a, b) } else { (b, a) };
    let need = first.width + OPENING_GAP + second.width;
    let usable = len - 2.0 * END_MARGIN;
    if need <= usable + 1e-9 {
        // keep the pair's midpoint where possible, then slide into the extent
        let mid = (first.offset + second.offset) / 2.0;
        let mut lo = mid - need / 2.0;
        lo = lo.clamp(END_MARGIN, len - END_MARGIN - need);
        let off1 = lo + first.width / 2.0;
        let off2 = lo + first.width + OPENING_GAP + second.width / 2.0;
        if let Some(o) = layout.opening_mut(&first.id) {
            o.offset = off1;
        }
        if let Some(o) = layout.opening_mut(&second.id) {
            o.offset = off2;
        }
    } else {
        // merge: the first opening absorbs the second's span
        let lo = first.lo().min(second.lo()).max(END_MARGIN);
        let hi = first.hi().max(second.hi()).min(len - END_MARGIN);
        let (_, max_w) = ca.width_range();
        let width = (hi - lo).min(max_w).max(0.0);
        if let Some(o) = layout.opening_mut(&first.id) {
            o.offset = (lo + hi) / 2.0;
            o.width = width;
        }
        layout.doors.retain(|o| o.id != second.id);
        layout.windows.retain(|o| o.id != second.id);
    }
}

fn stage_of(code: ViolationCode) -> usize {
    use ViolationCode::*;
    match code {
        Schema | DupId | ZeroLen | FullCircle | CollinearArc3pt | DanglingEndpoint => 0,
        MissingHost | OpeningOffWall | OpeningEndMargin | OpeningCrossesVertex | OpeningOverlap => 1,
        RoomNotClosed | RoomCw | RoomSelfX | RoomNonposArea => 2,
        ExcessPrecision => 3,
    }
}

/// Applies the fix catalog: geometry repairs, then opening repairs, then room
/// repairs, then precision rounding, re-validating between stages. A stage
/// whose result would raise a violation class absent from the input report
/// is rolled back. At most [`REPAIR_PASSES`] rounds are run.
pub fn auto_repair(layout: &Layout, report: &ValidationReport) -> Layout {
    let allowed: BTreeSet<ViolationCode> = report.codes();
    let mut current = layout.clone();
    let mut rep = report.clone();
    for _ in 0..REPAIR_PASSES {
        if rep.passes {
            break;
        }
        let before = current.clone();
        for stage in 0..4 {
            let fixes: Vec<Fix> = rep
                .violations
                .iter()
                .filter(|v| stage_of(v.code) == stage)
                .filter_map(|v| v.suggested_fix.clone())
                .collect();
            if fixes.is_empty() {
                continue;
            }
            let mut trial = current.clone();
            let mut done: Vec<&Fix> = Vec::new();
            for f in &fixes {
                if !done.contains(&f) {
                    apply_fix(&mut trial, f);
                    done.push(f);
                }
            }
            let trial_rep = validate(&trial);
            if trial_rep.codes().is_subset(&allowed) {
                current = trial;
                rep = trial_rep;
            }
        }
        if current == before {
            break;
        }
    }
    current
}

/// Moves every opening on `host` into legal position: clamps into the end
/// margins and resolves spacing. Used after edits that change host length.
pub fn settle_openings(layout: &mut Layout, host: &str) -> Vec<String> {
    let mut warnings = Vec::new();
    let Some(len) = layout.wall(host).map(|w| w.length()) else {
        return warnings;
    };
    for o in layout.doors.iter_mut().chain(layout.windows.iter_mut()) {
        if o.host != host {
            continue;
        }
        let (a, b) = center_range(len, o.width);
        if a <= b && (o.offset < a || o.offset > b) {
            let clamped = o.offset.clamp(a, b);
            warnings.push(format!("{} clamped to offset {:.2} on {}", o.id, clamped, host));
            o.offset = clamped;
        }
    }
    warnings
}
