use super::grammar::{AddSpec, Direction, EditCommand, EndSelector};
use super::{Applied, EditError};
use crate::ids::{normalize_id, ElementClass, ElementRef};
use crate::layout::{assign_canonical_ids, Layout, Opening, OpeningClass, Wall, WallShape, SNAP_TOL};
use crate::planar::{derive_rooms, reconcile_rooms, MIN_ROOM_AREA};
use crate::validate::{center_range, settle_openings};
use crate::Point;

/// Walls whose axis makes a smaller cosine than this with the requested
/// direction cannot be extended along it.
const MIN_AXIS_COS: f64 = 0.1;

fn wall_idx(layout: &Layout, r: ElementRef) -> Result<usize, EditError> {
    if r.class != ElementClass::Wall {
        return Err(invalid(r, "expected a wall"));
    }
    layout
        .walls
        .iter()
        .position(|w| r.matches(&w.id))
        .ok_or_else(|| EditError::UnknownTarget(r.to_string()))
}

fn opening_loc(layout: &Layout, r: ElementRef) -> Result<(OpeningClass, usize), EditError> {
    let class = match r.class {
        ElementClass::Door => OpeningClass::Door,
        ElementClass::Window => OpeningClass::Window,
        _ => return Err(invalid(r, "expected a door or window")),
    };
    layout
        .openings_of(class)
        .iter()
        .position(|o| r.matches(&o.id))
        .map(|i| (class, i))
        .ok_or_else(|| EditError::UnknownTarget(r.to_string()))
}

fn invalid(r: ElementRef, reason: &str) -> EditError {
    EditError::InvalidTarget {
        target: r.to_string(),
        reason: reason.into(),
    }
}

fn impossible(msg: impl Into<String>) -> EditError {
    EditError::GeometricallyImpossible(msg.into())
}

fn next_free(ids: impl Iterator<Item = String>, class: ElementClass) -> u64 {
    ids.filter_map(|id| normalize_id(&id).ok())
        .filter(|(c, _)| *c == class)
        .map(|(_, n)| n)
        .max()
        .unwrap_or(0)
        + 1
}

/// Endpoint of `w` extremal in a world direction; ties keep the start.
fn extremal_end(w: &Wall, sel: EndSelector) -> (bool, Point) {
    let u = sel.direction().unit();
    let [s, e] = w.endpoints();
    if e.dot(u) > s.dot(u) + 1e-9 {
        (true, e)
    } else {
        (false, s)
    }
}

/// Replaces the endpoints of a line wall. Openings keep their distance from
/// whichever end stayed put.
fn set_line_ends(layout: &mut Layout, wi: usize, start: Point, end: Point) -> Result<Vec<String>, EditError> {
    let w = &layout.walls[wi];
    let WallShape::Line { start: s0, .. } = w.shape else {
        return Err(impossible(format!("{} is not a straight wall", w.id)));
    };
    if start.dist(end) <= SNAP_TOL {
        return Err(impossible(format!("{} would collapse to a point", w.id)));
    }
    let old_len = w.length();
    let new_len = start.dist(end);
    let start_moved = s0.dist(start) > 1e-12;
    let id = w.id.clone();
    layout.walls[wi].shape = WallShape::Line { start, end };
    if start_moved {
        for o in layout.doors.iter_mut().chain(layout.windows.iter_mut()) {
            if o.host == id {
                o.offset = new_len - (old_len - o.offset);
            }
        }
    }
    Ok(settle_openings(layout, &id))
}

/// Moves the extremal end of a wall along its own axis so that its component
/// along `dir` changes by `signed` feet.
fn grow(layout: &mut Layout, wi: usize, dir: Direction, signed: f64) -> Result<Vec<String>, EditError> {
    let u = dir.unit();
    let w = layout.walls[wi].clone();
    let [s, e] = w.endpoints();
    let at_end = e.dot(u) > s.dot(u) + 1e-9;
    if (e.dot(u) - s.dot(u)).abs() <= 1e-9 && !w.is_arc() {
        return Err(impossible(format!("{} runs across the {dir:?} direction", w.id).to_lowercase()));
    }
    match &w.shape {
        WallShape::Arc(a) => {
            let len = a.length();
            // outward tangent at the extremal end
            let t = if at_end { w.tangent_at_arclength(len) } else { w.tangent_at_arclength(0.0) * -1.0 };
            let c = t.dot(u);
            if c < MIN_AXIS_COS {
                return Err(impossible(format!("{} does not run {dir:?}ward at that end", w.id).to_lowercase()));
            }
            let dtheta = signed / c / a.radius;
            let mut na = *a;
            na.sweep += dtheta;
            if na.sweep <= 1e-6 || na.sweep >= std::f64::consts::TAU - 1e-6 {
                return Err(impossible(format!("{} sweep would leave (0, 2π)", w.id)));
            }
            if !at_end {
                na.start_angle -= if a.ccw { dtheta } else { -dtheta };
                let id = w.id.clone();
                for o in layout.doors.iter_mut().chain(layout.windows.iter_mut()) {
                    if o.host == id {
                        o.offset += dtheta * a.radius;
                    }
                }
            }
            layout.walls[wi].shape = WallShape::Arc(na);
            Ok(settle_openings(layout, &w.id))
        }
        _ => {
            let (fixed, moving) = if at_end { (s, e) } else { (e, s) };
            let t = (moving - fixed).normalized();
            let c = t.dot(u);
            if c < MIN_AXIS_COS {
                return Err(impossible(format!("{} is almost perpendicular to {dir:?}", w.id).to_lowercase()));
            }
            let moved = moving + t * (signed / c);
            if (moved - fixed).dot(t) <= SNAP_TOL {
                return Err(impossible(format!("{} would vanish", w.id)));
            }
            let (ns, ne) = if at_end { (s, moved) } else { (moved, e) };
            if let WallShape::Arc3Pt { .. } = w.shape {
                layout.walls[wi].shape = WallShape::Line { start: s, end: e };
            }
            set_line_ends(layout, wi, ns, ne)
        }
    }
}

fn snap_to_neighbours(layout: &mut Layout, wi: usize) {
    let WallShape::Line { start, end } = layout.walls[wi].shape else {
        return;
    };
    let others: Vec<Point> = layout
        .walls
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != wi)
        .flat_map(|(_, w)| w.endpoints())
        .collect();
    let snap = |p: Point| {
        others
            .iter()
            .filter(|q| q.dist(p) <= SNAP_TOL)
            .min_by(|a, b| a.dist(p).total_cmp(&b.dist(p)))
            .copied()
            .unwrap_or(p)
    };
    layout.walls[wi].shape = WallShape::Line { start: snap(start), end: snap(end) };
}

fn rename_refs(layout: &mut Layout, old: &str, new: &str) {
    for o in layout.doors.iter_mut().chain(layout.windows.iter_mut()) {
        if o.host == old {
            o.host = new.to_string();
        }
    }
    for r in &mut layout.rooms {
        for w in &mut r.wall_chain {
            if w == old {
                *w = new.to_string();
            }
        }
    }
}

/// Applies one command. The result is rounded to document precision so that
/// inverse edits restore the input exactly.
pub fn apply_command(layout: &Layout, cmd: &EditCommand) -> Result<Applied, EditError> {
    let mut l = layout.clone();
    let mut warnings = Vec::new();
    let mut walls_changed = false;
    match *cmd {
        EditCommand::Accept | EditCommand::Reject => {
            return Ok(Applied {
                layout: layout.clone(),
                warnings,
            })
        }
        EditCommand::ReHost { target, wall } => {
            let (class, oi) = opening_loc(&l, target)?;
            let wi = wall_idx(&l, wall)?;
            let host = &l.walls[wi];
            let o = &l.openings_of(class)[oi];
            let (a, b) = center_range(host.length(), o.width);
            if a > b {
                return Err(impossible(format!("{} does not fit on {}", o.id, host.id)));
            }
            let offset = if o.offset >= a && o.offset <= b {
                o.offset
            } else if o.offset > 0.0 && o.offset < host.length() {
                warnings.push(format!("{} clamped into the margins of {}", o.id, host.id));
                o.offset.clamp(a, b)
            } else {
                warnings.push(format!("{} placed at the midpoint of {}", o.id, host.id));
                host.length() / 2.0
            };
            let host_id = host.id.clone();
            let o = &mut l.openings_of_mut(class)[oi];
            o.host = host_id;
            o.offset = offset;
        }
        EditCommand::MoveTo { target, offset } => {
            let (class, oi) = opening_loc(&l, target)?;
            let o = l.openings_of(class)[oi].clone();
            let host = l.wall(&o.host).ok_or_else(|| impossible(format!("{} has no host", o.id)))?;
            let (a, b) = center_range(host.length(), o.width);
            if offset < a - 1e-9 || offset > b + 1e-9 {
                return Err(impossible(format!("offset {offset} is outside [{a:.2}, {b:.2}] on {}", host.id)));
            }
            l.openings_of_mut(class)[oi].offset = offset;
        }
        EditCommand::MoveBy { target, direction, distance } => match target.class {
            ElementClass::Wall => {
                let wi = wall_idx(&l, target)?;
                l.walls[wi].translate(direction.unit() * distance);
                snap_to_neighbours(&mut l, wi);
                walls_changed = true;
            }
            ElementClass::Door | ElementClass::Window => {
                let (class, oi) = opening_loc(&l, target)?;
                let o = l.openings_of(class)[oi].clone();
                let host = l.wall(&o.host).ok_or_else(|| impossible(format!("{} has no host", o.id)))?;
                let along = host.tangent_at_arclength(o.offset).dot(direction.unit());
                if along.abs() < 1e-6 {
                    return Err(impossible(format!("{} cannot slide {direction:?} along {}", o.id, host.id).to_lowercase()));
                }
                let (a, b) = center_range(host.length(), o.width);
                let wanted = o.offset + along * distance;
                let offset = wanted.clamp(a, b.max(a));
                if (offset - wanted).abs() > 1e-9 {
                    warnings.push(format!("{} clamped to offset {:.2} on {}", o.id, offset, host.id));
                }
                l.openings_of_mut(class)[oi].offset = offset;
            }
            ElementClass::Room => return Err(invalid(target, "rooms follow their walls")),
        },
        EditCommand::Extend { target, direction, distance } => {
            let wi = wall_idx(&l, target)?;
            warnings.extend(grow(&mut l, wi, direction, distance)?);
            walls_changed = true;
        }
        EditCommand::Shorten { target, direction, distance } => {
            let wi = wall_idx(&l, target)?;
            warnings.extend(grow(&mut l, wi, direction, -distance)?);
            walls_changed = true;
        }
        EditCommand::Connect { target, to, wall, keep } => {
            let ai = wall_idx(&l, target)?;
            let bi = wall_idx(&l, wall)?;
            if ai == bi {
                return Err(impossible(format!("cannot connect {target} to itself")));
            }
            let a = l.walls[ai].clone();
            if a.is_arc() {
                return Err(impossible(format!("{} is curved and cannot be re-aimed", a.id)));
            }
            let b = &l.walls[bi];
            let dest = match to {
                Some(e) => extremal_end(b, e.end).1,
                None => {
                    let [s, e] = b.endpoints();
                    let da = a.distance_to(s).min(s.dist(a.start_point()));
                    let db = a.distance_to(e).min(e.dist(a.start_point()));
                    if da <= db {
                        s
                    } else {
                        e
                    }
                }
            };
            let [s, e] = a.endpoints();
            let (moving_end, pinned) = match keep {
                Some(k) => {
                    let (pin_is_end, p) = extremal_end(&a, k.end);
                    let anchor = &l.walls[wall_idx(&l, k.anchor)?];
                    if anchor.id == a.id {
                        return Err(impossible(format!("{} cannot anchor itself", a.id)));
                    }
                    let (sa, d) = anchor.project(p);
                    let p = if d > SNAP_TOL {
                        warnings.push(format!("{} end snapped onto {}", a.id, anchor.id));
                        anchor.point_at_arclength(sa)
                    } else {
                        p
                    };
                    (!pin_is_end, p)
                }
                None => {
                    let moving_is_end = e.dist(dest) < s.dist(dest);
                    (moving_is_end, if moving_is_end { s } else { e })
                }
            };
            if pinned.dist(dest) <= SNAP_TOL {
                return Err(impossible(format!(
                    "both constraints fall on the same end of {}",
                    a.id
                )));
            }
            let (ns, ne) = if moving_end { (pinned, dest) } else { (dest, pinned) };
            warnings.extend(set_line_ends(&mut l, ai, ns, ne)?);
            walls_changed = true;
        }
        EditCommand::Remove { target } => match target.class {
            ElementClass::Wall => {
                let wi = wall_idx(&l, target)?;
                let id = l.walls.remove(wi).id;
                let orphans: Vec<String> = l.openings().filter(|(_, o)| o.host == id).map(|(_, o)| o.id.clone()).collect();
                if !orphans.is_empty() {
                    warnings.push(format!("{} lost their host {id}", orphans.join(", ")));
                }
                walls_changed = true;
            }
            ElementClass::Door | ElementClass::Window => {
                let (class, oi) = opening_loc(&l, target)?;
                l.openings_of_mut(class).remove(oi);
            }
            ElementClass::Room => {
                let ri = l.rooms.iter().position(|r| target.matches(&r.id)).ok_or_else(|| EditError::UnknownTarget(target.to_string()))?;
                l.rooms.remove(ri);
            }
        },
        EditCommand::Add { spec } => match spec {
            AddSpec::Wall { start, end } => {
                if start.dist(end) <= SNAP_TOL {
                    return Err(impossible("a wall needs two distinct endpoints"));
                }
                let n = next_free(l.walls.iter().map(|w| w.id.clone()), ElementClass::Wall);
                l.walls.push(Wall::line(format!("wall{n}"), start, end));
                walls_changed = true;
            }
            AddSpec::Opening { class, host, offset, width } => {
                let oc = match class {
                    ElementClass::Door => OpeningClass::Door,
                    ElementClass::Window => OpeningClass::Window,
                    _ => return Err(impossible("only doors and windows sit on walls")),
                };
                let wi = wall_idx(&l, host)?;
                let w = &l.walls[wi];
                let width = width.unwrap_or(oc.default_width());
                let offset = offset.unwrap_or(w.length() / 2.0);
                let (a, b) = center_range(w.length(), width);
                if offset < a - 1e-9 || offset > b + 1e-9 {
                    return Err(impossible(format!("a {width} ft {} does not fit at {offset} on {}", class.name(), w.id)));
                }
                let n = next_free(l.openings_of(oc).iter().map(|o| o.id.clone()), class);
                let id = format!("{}{n}", oc.id_prefix());
                let o = match oc {
                    OpeningClass::Door => Opening::door(id, w.id.clone(), offset, width),
                    OpeningClass::Window => Opening::window(id, w.id.clone(), offset, width),
                };
                l.openings_of_mut(oc).push(o);
            }
        },
        EditCommand::SetThickness { target, thickness } => {
            let wi = wall_idx(&l, target)?;
            if thickness <= 0.0 {
                return Err(impossible("thickness must be positive"));
            }
            l.walls[wi].thickness = thickness;
        }
        EditCommand::Split { target, at } => {
            let wi = wall_idx(&l, target)?;
            let w = l.walls[wi].clone();
            let len = w.length();
            let at = at.unwrap_or(len / 2.0);
            if at <= SNAP_TOL || at >= len - SNAP_TOL {
                return Err(impossible(format!("{at} ft is not inside {}", w.id)));
            }
            if let Some((_, o)) = l.openings().find(|(_, o)| o.host == w.id && o.lo() < at && o.hi() > at) {
                return Err(impossible(format!("{} spans the split point", o.id)));
            }
            let n = next_free(l.walls.iter().map(|w| w.id.clone()), ElementClass::Wall);
            let new_id = format!("wall{n}");
            let (first, second) = match &w.shape {
                WallShape::Arc(a) => {
                    let t = at / len;
                    let mut p = *a;
                    p.sweep = a.sweep * t;
                    let mut q = *a;
                    q.start_angle = a.angle_at(t);
                    q.sweep = a.sweep - p.sweep;
                    (WallShape::Arc(p), WallShape::Arc(q))
                }
                _ => {
                    let m = w.point_at_arclength(at);
                    let [s, e] = w.endpoints();
                    (WallShape::Line { start: s, end: m }, WallShape::Line { start: m, end: e })
                }
            };
            l.walls[wi].shape = first;
            let mut tail = w.clone();
            tail.id = new_id.clone();
            tail.shape = second;
            l.walls.insert(wi + 1, tail);
            for o in l.doors.iter_mut().chain(l.windows.iter_mut()) {
                if o.host == w.id && o.offset > at {
                    o.host = new_id.clone();
                    o.offset -= at;
                }
            }
            walls_changed = true;
        }
        EditCommand::Merge { target, other } => {
            let ai = wall_idx(&l, target)?;
            let bi = wall_idx(&l, other)?;
            if ai == bi {
                return Err(impossible("a wall cannot merge with itself"));
            }
            let (a, b) = (l.walls[ai].clone(), l.walls[bi].clone());
            let (WallShape::Line { start: a0, end: a1 }, WallShape::Line { start: b0, end: b1 }) = (&a.shape, &b.shape) else {
                return Err(impossible("only straight walls can be merged"));
            };
            let line_dist = |p: Point| ((p - *a0).cross(*a1 - *a0) / a0.dist(*a1)).abs();
            if line_dist(*b0) > SNAP_TOL || line_dist(*b1) > SNAP_TOL {
                return Err(impossible(format!("{} and {} are not collinear", a.id, b.id)));
            }
            let shared = [(*a0, *b0), (*a0, *b1), (*a1, *b0), (*a1, *b1)]
                .into_iter()
                .position(|(p, q)| p.dist(q) <= SNAP_TOL)
                .ok_or_else(|| impossible(format!("{} and {} do not meet", a.id, b.id)))?;
            let b_far = if shared % 2 == 0 { *b1 } else { *b0 };
            let (ns, ne) = if shared < 2 { (b_far, *a1) } else { (*a0, b_far) };
            // opening world midpoints survive the merge
            let mids: Vec<(OpeningClass, usize, Point)> = [OpeningClass::Door, OpeningClass::Window]
                .into_iter()
                .flat_map(|c| {
                    let l = &l;
                    let (a, b) = (&a, &b);
                    l.openings_of(c).iter().enumerate().filter_map(move |(i, o)| {
                        let host = if o.host == a.id {
                            a
                        } else if o.host == b.id {
                            b
                        } else {
                            return None;
                        };
                        Some((c, i, host.point_at_arclength(o.offset)))
                    })
                })
                .collect();
            l.walls[ai].shape = WallShape::Line { start: ns, end: ne };
            let merged = l.walls[ai].clone();
            for (c, i, p) in mids {
                let o = &mut l.openings_of_mut(c)[i];
                o.host = merged.id.clone();
                o.offset = merged.project(p).0;
            }
            l.walls.remove(bi);
            for r in &mut l.rooms {
                r.wall_chain.retain(|w| *w != b.id);
            }
            walls_changed = true;
        }
        EditCommand::RenameId { target: None, .. } => {
            l = assign_canonical_ids(&l);
        }
        EditCommand::RenameId { target: Some(t), new } => {
            let new = new.ok_or_else(|| invalid(t, "missing new id"))?;
            let old_id = match t.class {
                ElementClass::Wall => l.walls[wall_idx(&l, t)?].id.clone(),
                ElementClass::Room => l
                    .rooms
                    .iter()
                    .find(|r| t.matches(&r.id))
                    .map(|r| r.id.clone())
                    .ok_or_else(|| EditError::UnknownTarget(t.to_string()))?,
                _ => {
                    let (c, i) = opening_loc(&l, t)?;
                    l.openings_of(c)[i].id.clone()
                }
            };
            let taken = match new.class {
                ElementClass::Wall => l.walls.iter().any(|w| new.matches(&w.id)),
                ElementClass::Room => l.rooms.iter().any(|r| new.matches(&r.id)),
                _ => l.openings().any(|(_, o)| new.matches(&o.id)),
            };
            if taken && new != t {
                return Err(EditError::IdConflict(new.canonical_id()));
            }
            let new_id = new.canonical_id();
            match t.class {
                ElementClass::Wall => {
                    let wi = wall_idx(&l, t)?;
                    l.walls[wi].id = new_id.clone();
                    rename_refs(&mut l, &old_id, &new_id);
                }
                ElementClass::Room => {
                    if let Some(r) = l.rooms.iter_mut().find(|r| r.id == old_id) {
                        r.id = new_id;
                    }
                }
                _ => {
                    let (c, i) = opening_loc(&l, t)?;
                    l.openings_of_mut(c)[i].id = new_id;
                }
            }
        }
    }
    if walls_changed && !l.rooms.is_empty() {
        let fresh = derive_rooms(&l.walls, MIN_ROOM_AREA);
        l.rooms = reconcile_rooms(&layout.rooms, fresh);
    }
    Ok(Applied {
        layout: l.rounded(),
        warnings,
    })
}
