//! Junction repair, stub pruning and noding of extracted walls.

use crate::geometry::{arc_from_3pt, orientation_diff, segment_intersection};
use crate::layout::{Wall, WallShape, SNAP_TOL};
use crate::planar::PlanarGraph;
use crate::{Arc, Point};

/// Endpoints closer than this are joined; an endpoint this close to another
/// wall is attached to it.
pub const JOIN_TOL: f64 = 1.0;
/// Fragments shorter than this never survive.
pub const STUB_MIN: f64 = 1.25;
/// Walls shorter than this must earn their place by closing a room.
pub const STUB_MAX: f64 = 3.0;
pub const STUB_TURN_DEG: f64 = 12.0;
/// Lines closer than this to parallel have no useful intersection.
const PARALLEL_DEG: f64 = 5.0;

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

fn line_ends(w: &Wall) -> Option<(Point, Point)> {
    match w.shape {
        WallShape::Line { start, end } => Some((start, end)),
        _ => None,
    }
}

/// Moves one end of a wall. Arcs are refit through the new end, their
/// midpoint and the other end.
pub fn set_end(w: &mut Wall, end: usize, p: Point) {
    match &mut w.shape {
        WallShape::Line { start, end: e } => {
            if end == 0 {
                *start = p;
            } else {
                *e = p;
            }
        }
        WallShape::Arc(a) => {
            let (s, m, e) = (a.start(), a.mid(), a.end());
            let fit = if end == 0 { arc_from_3pt(p, m, e) } else { arc_from_3pt(s, m, p) };
            if let Ok(f) = fit {
                *a = f;
            }
        }
        WallShape::Arc3Pt { start, end: e, .. } => {
            if end == 0 {
                *start = p;
            } else {
                *e = p;
            }
        }
    }
}

/// Intersection of the infinite lines through two segments.
fn line_intersection(a: (Point, Point), b: (Point, Point)) -> Option<Point> {
    let r = a.1 - a.0;
    let s = b.1 - b.0;
    let den = r.cross(s);
    if den.abs() < 1e-12 {
        return None;
    }
    Some(a.0 + r * ((b.0 - a.0).cross(s) / den))
}

fn far_from_parallel(a: (Point, Point), b: (Point, Point)) -> bool {
    let ta = (a.1 - a.0).angle();
    let tb = (b.1 - b.0).angle();
    orientation_diff(ta, tb) > PARALLEL_DEG.to_radians()
}

/// Point minimizing squared distance to every line, when they are not all
/// near-parallel.
fn least_squares_meet(lines: &[(Point, Point)]) -> Option<Point> {
    let (mut a11, mut a12, mut a22, mut b1, mut b2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(p, q) in lines {
        let n = (q - p).normalized().perp();
        let c = n.dot(p);
        a11 += n.x * n.x;
        a12 += n.x * n.y;
        a22 += n.y * n.y;
        b1 += n.x * c;
        b2 += n.y * c;
    }
    // smallest eigenvalue of the normal matrix
    let tr = a11 + a22;
    let det = a11 * a22 - a12 * a12;
    let lmin = tr / 2.0 - ((tr * tr / 4.0 - det).max(0.0)).sqrt();
    if lmin < PARALLEL_DEG.to_radians().sin().powi(2) / 2.0 {
        return None;
    }
    Some(Point::new((b1 * a22 - a12 * b2) / det, (a11 * b2 - a12 * b1) / det))
}

/// Joins nearby endpoints into corners and attaches endpoints that stop
/// short of (or overshoot) another wall. Returns the number of moves.
pub fn join_endpoints(walls: &mut [Wall], tol: f64) -> usize {
    let ends: Vec<(usize, usize, Point)> = walls
        .iter()
        .enumerate()
        .flat_map(|(i, w)| [(i, 0, w.start_point()), (i, 1, w.end_point())])
        .collect();
    let mut parent: Vec<usize> = (0..ends.len()).collect();
    for i in 0..ends.len() {
        for j in (i + 1)..ends.len() {
            if ends[i].0 != ends[j].0 && ends[i].2.dist(ends[j].2) <= tol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut clusters: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..ends.len() {
        let r = find(&mut parent, i);
        clusters.entry(r).or_default().push(i);
    }
    let mut moves = 0;
    let mut joined = vec![false; ends.len()];
    for members in clusters.values().filter(|m| m.len() > 1) {
        let pinned = members.iter().find(|&&m| walls[ends[m].0].is_arc()).map(|&m| ends[m].2);
        let centroid = members.iter().fold(Point::origin(), |a, &m| a + ends[m].2) * (1.0 / members.len() as f64);
        let target = pinned.unwrap_or_else(|| {
            let lines: Vec<(Point, Point)> = members.iter().filter_map(|&m| line_ends(&walls[ends[m].0])).collect();
            least_squares_meet(&lines)
                .filter(|x| x.dist(centroid) <= 2.0 * tol)
                .unwrap_or(centroid)
        });
        for &m in members {
            joined[m] = true;
            if ends[m].2 != target {
                set_end(&mut walls[ends[m].0], ends[m].1, target);
                moves += 1;
            }
        }
    }
    for (k, &(i, end, _)) in ends.iter().enumerate() {
        if joined[k] {
            continue;
        }
        let p = walls[i].endpoints()[end];
        let best = (0..walls.len())
            .filter(|&j| j != i)
            .map(|j| (j, walls[j].distance_to(p)))
            .filter(|&(_, d)| d <= tol && d > 1e-9)
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        let Some((j, _)) = best else {
            continue;
        };
        let (s, _) = walls[j].project(p);
        let mut target = walls[j].point_at_arclength(s);
        if let (Some(a), Some(b)) = (line_ends(&walls[i]), line_ends(&walls[j])) {
            if far_from_parallel(a, b) {
                if let Some(x) = line_intersection(a, b) {
                    let (_, dx) = walls[j].project(x);
                    if x.dist(p) <= 2.0 * tol && dx <= 1e-6 {
                        target = x;
                    }
                }
            }
        }
        set_end(&mut walls[i], end, target);
        moves += 1;
    }
    moves
}

fn sub_arc(a: &Arc, t0: f64, t1: f64) -> Arc {
    Arc {
        center: a.center,
        radius: a.radius,
        start_angle: a.angle_at(t0),
        sweep: a.sweep * (t1 - t0),
        ccw: a.ccw,
    }
}

/// Splits every wall where another wall ends on its interior or crosses it.
pub fn node_walls(walls: &[Wall]) -> Vec<Wall> {
    let mut out = Vec::new();
    for (i, w) in walls.iter().enumerate() {
        let len = w.length();
        let mut cuts: Vec<f64> = Vec::new();
        for (j, o) in walls.iter().enumerate() {
            if i == j {
                continue;
            }
            for p in o.endpoints() {
                let (s, d) = w.project(p);
                if d <= SNAP_TOL {
                    cuts.push(s);
                }
            }
            if let (Some(a), Some(b)) = (line_ends(w), line_ends(o)) {
                if let Some((t, _)) = segment_intersection(a.0, a.1, b.0, b.1) {
                    cuts.push(t * len);
                }
            }
        }
        cuts.retain(|&s| s > SNAP_TOL && s < len - SNAP_TOL);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup_by(|a, b| (*a - *b).abs() <= SNAP_TOL);
        let mut stations = vec![0.0];
        stations.extend(cuts);
        stations.push(len);
        for k in 0..stations.len() - 1 {
            let (s0, s1) = (stations[k], stations[k + 1]);
            let mut piece = w.clone();
            piece.shape = match &w.shape {
                WallShape::Arc(a) => WallShape::Arc(sub_arc(a, s0 / len, s1 / len)),
                _ => WallShape::Line {
                    start: w.point_at_arclength(s0),
                    end: w.point_at_arclength(s1),
                },
            };
            out.push(piece);
        }
    }
    out
}

/// Drops fragments under 1.25 ft, and short walls (under 3.0 ft) unless they
/// bridge two longer walls at turns of at least 12° and bound a room.
/// Returns the kept walls and the ids of dropped ones.
pub fn retain_stubs(walls: &[Wall]) -> (Vec<Wall>, Vec<String>) {
    let g = PlanarGraph::from_walls(walls, SNAP_TOL);
    let fs = g.faces();
    let bounds_room = |wi: usize| {
        g.edges.iter().enumerate().any(|(e, edge)| {
            edge.wall == wi
                && g.is_active(e)
                && [2 * e, 2 * e + 1]
                    .iter()
                    .any(|&h| fs.face_of[h].is_some_and(|f| fs.faces[f].area > 1e-9))
        })
    };
    let turns_onto_longer = |wi: usize, p: Point| {
        let w = &walls[wi];
        walls.iter().enumerate().any(|(j, o)| {
            j != wi
                && o.length() > w.length()
                && o.distance_to(p) <= SNAP_TOL
                && orientation_diff(o.orientation(), w.orientation()) >= STUB_TURN_DEG.to_radians()
        })
    };
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    for (i, w) in walls.iter().enumerate() {
        let len = w.length();
        let keep = len >= STUB_MAX
            || (len >= STUB_MIN && w.endpoints().iter().all(|&p| turns_onto_longer(i, p)) && bounds_room(i));
        if keep {
            kept.push(w.clone());
        } else {
            dropped.push(w.id.clone());
        }
    }
    (kept, dropped)
}
