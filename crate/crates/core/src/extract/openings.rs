//! Door and window placement from labels and swing arcs.

use std::collections::BTreeMap;

use crate::geometry::arc_from_3pt;
use crate::layout::{END_MARGIN, OPENING_GAP};
use crate::validate::center_range;
use crate::{Opening, OpeningClass, Point, Wall};

/// Marks further than this from every wall have no host.
pub const HOST_RADIUS: f64 = 2.0;
/// A swing's closed leaf must lie within this angle of the host tangent.
const SWING_TANGENT_DEG: f64 = 20.0;

/// An opening mark in world feet.
#[derive(Debug, Clone, PartialEq)]
pub enum Mark {
    Label {
        p: Point,
        class: OpeningClass,
        width_hint: Option<f64>,
    },
    /// Door swing polyline: the hinge is its circle center, the leaf its radius.
    Swing(Vec<Point>),
}

/// Nearest wall within the host radius whose perpendicular foot falls
/// strictly inside it. Returns `(wall index, station, distance)`.
fn nearest_host(p: Point, walls: &[Wall]) -> Option<(usize, f64, f64)> {
    walls
        .iter()
        .enumerate()
        .filter_map(|(i, w)| {
            let (s, d) = w.project(p);
            let len = w.length();
            (d <= HOST_RADIUS && s > 1e-9 && s < len - 1e-9).then_some((i, s, d))
        })
        .min_by(|a, b| a.2.total_cmp(&b.2).then(a.0.cmp(&b.0)))
}

/// Host and center station of a swing: the hinge projects onto a wall whose
/// tangent lines up with one leaf position.
fn swing_host(pts: &[Point], walls: &[Wall]) -> Result<(usize, f64, f64), String> {
    if pts.len() < 3 {
        return Err("swing needs at least three samples".into());
    }
    let arc = arc_from_3pt(pts[0], pts[pts.len() / 2], pts[pts.len() - 1]).map_err(|e| format!("swing is not an arc: {e}"))?;
    let hinge = arc.center;
    let cos_min = SWING_TANGENT_DEG.to_radians().cos();
    walls
        .iter()
        .enumerate()
        .filter_map(|(i, w)| {
            let (s, d) = w.project(hinge);
            if d > HOST_RADIUS {
                return None;
            }
            let t = w.tangent_at_arclength(s);
            let (leaf, along) = [pts[0], pts[pts.len() - 1]]
                .iter()
                .map(|&e| {
                    let v = (e - hinge).normalized();
                    (v.dot(t).abs(), v.dot(t).signum())
                })
                .fold((0.0, 1.0), |b, x| if x.0 > b.0 { x } else { b });
            (leaf >= cos_min).then_some((i, s, d, along))
        })
        .min_by(|a, b| a.2.total_cmp(&b.2).then(a.0.cmp(&b.0)))
        .map(|(i, s, _, along)| (i, s + along * arc.radius / 2.0, arc.radius))
        .ok_or_else(|| format!("no wall within {HOST_RADIUS} ft lines up with the swing at ({:.2}, {:.2})", hinge.x, hinge.y))
}

fn clamp_width(class: OpeningClass, w: f64) -> f64 {
    let (lo, hi) = class.width_range();
    w.clamp(lo, hi)
}

/// Assigns each mark to a host and lays the openings out legally: widths
/// trimmed to the usable host length, centers clamped into the end margins,
/// and later openings pushed along until they clear the previous one by
/// 0.5 ft (trimmed to the class minimum if the push runs out of wall).
/// Marks that cannot be placed are dropped with a warning.
pub fn place_openings(marks: &[Mark], walls: &[Wall]) -> (Vec<Opening>, Vec<Opening>, Vec<String>) {
    let mut warnings = Vec::new();
    let mut placed: Vec<(OpeningClass, usize, f64, f64)> = Vec::new();
    for (k, m) in marks.iter().enumerate() {
        match m {
            Mark::Label { p, class, width_hint } => match nearest_host(*p, walls) {
                Some((i, s, _)) => {
                    let w = clamp_width(*class, width_hint.unwrap_or(class.default_width()));
                    placed.push((*class, i, s, w));
                }
                None => warnings.push(format!(
                    "NoHostInRange: {} mark {k} at ({:.2}, {:.2}) is more than {HOST_RADIUS} ft from every wall",
                    class.id_prefix(),
                    p.x,
                    p.y
                )),
            },
            Mark::Swing(pts) => match swing_host(pts, walls) {
                Ok((i, s, r)) => placed.push((OpeningClass::Door, i, s, clamp_width(OpeningClass::Door, r))),
                Err(e) => warnings.push(format!("NoHostInRange: swing {k}: {e}")),
            },
        }
    }
    let mut by_host: BTreeMap<usize, Vec<(OpeningClass, f64, f64)>> = BTreeMap::new();
    for (class, i, s, w) in placed {
        by_host.entry(i).or_default().push((class, s, w));
    }
    let (mut doors, mut windows) = (Vec::new(), Vec::new());
    for (i, mut list) in by_host {
        let len = walls[i].length();
        let usable = len - 2.0 * END_MARGIN;
        list.sort_by(|a, b| a.1.total_cmp(&b.1));
        let mut prev_hi: Option<f64> = None;
        for (class, s, mut w) in list {
            let (min_w, _) = class.width_range();
            if w > usable {
                w = usable;
            }
            let drop = |warnings: &mut Vec<String>, why: &str| {
                warnings.push(format!("{} on {} dropped: {why}", class.id_prefix(), walls[i].id));
            };
            if w < min_w {
                drop(&mut warnings, "host too short");
                continue;
            }
            let (lo, hi) = center_range(len, w);
            let mut c = s.clamp(lo, hi);
            if let Some(ph) = prev_hi {
                let need = ph + OPENING_GAP + w / 2.0;
                if c < need {
                    c = need;
                }
                if c > hi {
                    // trim toward the class minimum, keeping the near edge
                    let room = hi + w / 2.0 - (ph + OPENING_GAP);
                    let trimmed = room.min(w);
                    if trimmed < min_w {
                        drop(&mut warnings, "no room left beside its neighbour");
                        continue;
                    }
                    w = trimmed;
                    c = ph + OPENING_GAP + w / 2.0;
                }
            }
            prev_hi = Some(c + w / 2.0);
            let o = match class {
                OpeningClass::Door => Opening::door(format!("door{}", doors.len() + 1), walls[i].id.clone(), c, w),
                OpeningClass::Window => {
                    Opening::window(format!("win{}", windows.len() + 1), walls[i].id.clone(), c, w)
                }
            };
            match class {
                OpeningClass::Door => doors.push(o),
                OpeningClass::Window => windows.push(o),
            }
        }
    }
    (doors, windows, warnings)
}
