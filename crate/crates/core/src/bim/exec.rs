//! Plan execution into meshes, runtime faults and the repair loop.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::Serialize;
use thiserror::Error;

use super::mesh::{clean_ring, prism, wall_solid, Hole, Mesh};
use super::{compile_unchecked, footprint, static_validate, BuildOp, BuildPlan, PlanCheck};
use crate::geometry::{polygon_self_intersects, signed_area};
use crate::layout::{END_MARGIN, OPENING_GAP, SNAP_TOL};
use crate::{Layout, Point, Wall};

/// Execute/repair rounds before giving up.
pub const MAX_REPAIR_ITERATIONS: usize = 5;
/// Solid wall kept above every opening, in feet.
pub const HEAD_CLEARANCE: f64 = 0.5;
/// Thickness of the door and window panels.
pub const PANEL_THICKNESS: f64 = 0.15;
const EPS: f64 = 1e-6;
const MIN_WALL_LENGTH: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementClass {
    Wall,
    Door,
    Window,
    Slab,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Element {
    pub source_id: String,
    pub class: ElementClass,
    pub mesh: Mesh,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Model3D {
    pub elements: Vec<Element>,
    /// Open ring (no repeated closing point), counterclockwise.
    pub slab_polygon: Vec<Point>,
}

impl Model3D {
    pub fn count(&self, class: ElementClass) -> usize {
        self.elements.iter().filter(|e| e.class == class).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum FaultCode {
    OpeningOutOfExtent,
    OpeningCollision,
    ZeroLengthCurve,
    SlabNotClosed,
    HostMissing,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RuntimeFault {
    pub code: FaultCode,
    pub op: usize,
    pub detail: String,
}

struct Placed {
    op: usize,
    lo: f64,
    hi: f64,
    z0: f64,
    z1: f64,
}

fn placement(op: &BuildOp) -> Option<(&str, f64, f64, f64, f64)> {
    match *op {
        BuildOp::PlaceDoor {
            ref host,
            offset,
            width,
            height,
            ..
        } => Some((host, offset, width, 0.0, height)),
        BuildOp::PlaceWindow {
            ref host,
            offset,
            width,
            height,
            sill,
            ..
        } => Some((host, offset, width, sill, sill + height)),
        _ => None,
    }
}

fn degenerate(w: &Wall) -> bool {
    let bad_arc = w.as_arc().is_some_and(|a| !(a.radius > 1e-9 && a.sweep > 1e-9));
    bad_arc || !(w.length() > MIN_WALL_LENGTH)
}

fn slab_problem(boundary: &[Point]) -> Option<String> {
    if boundary.len() < 4 {
        return Some(format!("boundary has {} points", boundary.len()));
    }
    let gap = boundary[0].dist(boundary[boundary.len() - 1]);
    if gap > 1e-9 {
        return Some(format!("boundary gap of {gap:.3} ft"));
    }
    let ring = clean_ring(boundary);
    if ring.len() < 3 || signed_area(&ring).unwrap_or(0.0).abs() < EPS {
        return Some("boundary encloses no area".into());
    }
    if polygon_self_intersects(&ring) {
        return Some("boundary crosses itself".into());
    }
    None
}

fn hosts(plan: &BuildPlan) -> HashMap<&str, (usize, Wall)> {
    plan.ops
        .iter()
        .enumerate()
        .filter_map(|(i, op)| op.as_wall().map(|w| (op.id(), (i, w))))
        .collect()
}

fn find_faults(plan: &BuildPlan) -> (Vec<RuntimeFault>, BTreeMap<String, Vec<Placed>>) {
    let mut faults = Vec::new();
    let walls = hosts(plan);
    for (i, op) in plan.ops.iter().enumerate() {
        if let Some(w) = op.as_wall() {
            if degenerate(&w) {
                faults.push(RuntimeFault {
                    code: FaultCode::ZeroLengthCurve,
                    op: i,
                    detail: format!("{} has length {:.6} ft", w.id, w.length()),
                });
            }
        }
    }
    let mut by_host: BTreeMap<String, Vec<Placed>> = BTreeMap::new();
    for (i, op) in plan.ops.iter().enumerate() {
        let Some((host, offset, width, z0, z1)) = placement(op) else {
            continue;
        };
        let Some((_, w)) = walls.get(host) else {
            faults.push(RuntimeFault {
                code: FaultCode::HostMissing,
                op: i,
                detail: format!("{} is hosted by missing wall {host}", op.id()),
            });
            continue;
        };
        if degenerate(w) {
            continue;
        }
        let (len, lo, hi) = (w.length(), offset - width / 2.0, offset + width / 2.0);
        if lo < END_MARGIN - EPS || hi > len - END_MARGIN + EPS || z0 < -EPS || z1 > w.height - HEAD_CLEARANCE + EPS {
            faults.push(RuntimeFault {
                code: FaultCode::OpeningOutOfExtent,
                op: i,
                detail: format!(
                    "{} spans [{lo:.3}, {hi:.3}] x [{z0:.3}, {z1:.3}] on {host} of length {len:.3} and height {:.3}",
                    op.id(),
                    w.height
                ),
            });
        }
        by_host.entry(host.to_string()).or_default().push(Placed { op: i, lo, hi, z0, z1 });
    }
    for list in by_host.values_mut() {
        list.sort_by(|a, b| a.lo.total_cmp(&b.lo).then(a.op.cmp(&b.op)));
        for k in 1..list.len() {
            let gap = list[k].lo - list[k - 1].hi;
            if gap < OPENING_GAP - EPS {
                faults.push(RuntimeFault {
                    code: FaultCode::OpeningCollision,
                    op: list[k].op,
                    detail: format!(
                        "{} is {gap:.3} ft from {}",
                        plan.ops[list[k].op].id(),
                        plan.ops[list[k - 1].op].id()
                    ),
                });
            }
        }
    }
    for (i, op) in plan.ops.iter().enumerate() {
        if let BuildOp::CreateFloorSlab { boundary, .. } = op {
            if let Some(detail) = slab_problem(boundary) {
                faults.push(RuntimeFault {
                    code: FaultCode::SlabNotClosed,
                    op: i,
                    detail,
                });
            }
        }
    }
    faults.sort_by_key(|f| (f.op, f.code));
    (faults, by_host)
}

/// Builds every element or reports every fault; never a partial model.
pub fn execute(plan: &BuildPlan) -> Result<Model3D, Vec<RuntimeFault>> {
    let (faults, by_host) = find_faults(plan);
    if !faults.is_empty() {
        return Err(faults);
    }
    let walls = hosts(plan);
    let mut model = Model3D::default();
    for op in &plan.ops {
        let element = |class, mesh| Element {
            source_id: op.id().to_string(),
            class,
            mesh,
        };
        match op {
            BuildOp::CreateLineWall { .. } | BuildOp::CreateArcWall { .. } => {
                let w = op.as_wall().expect("wall op");
                let holes: Vec<Hole> = by_host
                    .get(op.id())
                    .map(|l| {
                        l.iter()
                            .map(|p| Hole {
                                lo: p.lo,
                                hi: p.hi,
                                z0: p.z0,
                                z1: p.z1,
                            })
                            .collect()
                    })
                    .unwrap_or_default();
                model.elements.push(element(ElementClass::Wall, wall_solid(&w, 0.0, w.height, &holes)));
            }
            BuildOp::PlaceDoor { .. } | BuildOp::PlaceWindow { .. } => {
                let (host, offset, width, z0, z1) = placement(op).expect("opening op");
                let w = &walls[host].1;
                let (a, b) = panel_span(w, offset, width);
                let mut panel = Wall::line(op.id(), a, b);
                panel.thickness = PANEL_THICKNESS;
                let class = if matches!(op, BuildOp::PlaceDoor { .. }) {
                    ElementClass::Door
                } else {
                    ElementClass::Window
                };
                model.elements.push(element(class, wall_solid(&panel, z0, z1, &[])));
            }
            BuildOp::CreateFloorSlab { boundary, thickness, .. } => {
                model.slab_polygon = clean_ring(boundary);
                model.elements.push(element(ElementClass::Slab, prism(boundary, -thickness, 0.0)));
            }
        }
    }
    Ok(model)
}

/// Panel chord: along a line host, or tangent at the center of an arc host.
fn panel_span(host: &Wall, offset: f64, width: f64) -> (Point, Point) {
    if host.is_arc() {
        let c = host.point_at_arclength(offset);
        let t = host.tangent_at_arclength(offset);
        (c - t * (width / 2.0), c + t * (width / 2.0))
    } else {
        (
            host.point_at_arclength(offset - width / 2.0),
            host.point_at_arclength(offset + width / 2.0),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Repair {
    pub plan: BuildPlan,
    pub warnings: Vec<String>,
}

fn set_placement(op: &mut BuildOp, new_offset: f64, new_width: f64, new_height: f64) {
    match op {
        BuildOp::PlaceDoor {
            offset, width, height, ..
        }
        | BuildOp::PlaceWindow {
            offset, width, height, ..
        } => {
            *offset = new_offset;
            *width = new_width;
            *height = new_height;
        }
        _ => {}
    }
}

fn op_height(op: &BuildOp) -> f64 {
    match op {
        BuildOp::PlaceDoor { height, .. } | BuildOp::PlaceWindow { height, .. } => *height,
        _ => 0.0,
    }
}

/// One pass of the fix table. A missing host with a source layout at hand
/// regenerates the whole plan from it; without one the orphan is dropped.
pub fn repair(plan: &BuildPlan, faults: &[RuntimeFault], layout: Option<&Layout>) -> Repair {
    let mut warnings = Vec::new();
    if let Some(l) = layout.filter(|_| faults.iter().any(|f| f.code == FaultCode::HostMissing)) {
        if let Ok(p) = compile_unchecked(l) {
            warnings.push("HOST_MISSING: plan regenerated from the layout".into());
            return Repair { plan: p, warnings };
        }
    }
    let mut plan = plan.clone();
    let id = |i: usize| plan.ops[i].id().to_string();
    let codes: HashMap<String, HashSet<FaultCode>> = faults.iter().fold(HashMap::new(), |mut m, f| {
        m.entry(id(f.op)).or_default().insert(f.code);
        m
    });
    let has = |id: &str, c: FaultCode| codes.get(id).is_some_and(|s| s.contains(&c));

    // clamp out-of-extent openings
    let walls: HashMap<String, Wall> = hosts(&plan).into_iter().map(|(k, (_, w))| (k.to_string(), w)).collect();
    for op in plan.ops.iter_mut() {
        if !has(op.id(), FaultCode::OpeningOutOfExtent) {
            continue;
        }
        let (host, offset, width, z0, _) = placement(op).expect("opening op");
        let w = &walls[host];
        let len = w.length();
        let width = width.min(len - 2.0 * END_MARGIN);
        let height = op_height(op).min(w.height - HEAD_CLEARANCE - z0);
        if width <= 0.0 || height <= 0.0 {
            warnings.push(format!("OPENING_OUT_OF_EXTENT: {} does not fit on {host}", op.id()));
            continue;
        }
        let offset = offset.clamp(END_MARGIN + width / 2.0, len - END_MARGIN - width / 2.0);
        warnings.push(format!("OPENING_OUT_OF_EXTENT: {} clamped to offset {offset:.3}", op.id()));
        set_placement(op, offset, width, height);
    }

    // push colliding openings along their host
    let collided: HashSet<String> = faults
        .iter()
        .filter(|f| f.code == FaultCode::OpeningCollision)
        .filter_map(|f| placement(&plan.ops[f.op]).map(|p| p.0.to_string()))
        .collect();
    for host in &collided {
        let mut idx: Vec<usize> = (0..plan.ops.len())
            .filter(|&i| placement(&plan.ops[i]).is_some_and(|p| p.0 == host))
            .collect();
        let lo = |op: &BuildOp| placement(op).map(|p| p.1 - p.2 / 2.0).unwrap();
        idx.sort_by(|&a, &b| lo(&plan.ops[a]).total_cmp(&lo(&plan.ops[b])).then(a.cmp(&b)));
        for k in 1..idx.len() {
            let prev = placement(&plan.ops[idx[k - 1]]).map(|p| p.1 + p.2 / 2.0).unwrap();
            let (_, offset, width, _, _) = placement(&plan.ops[idx[k]]).unwrap();
            if offset - width / 2.0 - prev < OPENING_GAP - EPS {
                let op = &mut plan.ops[idx[k]];
                let shifted = prev + OPENING_GAP + width / 2.0;
                warnings.push(format!("OPENING_COLLISION: {} shifted to offset {shifted:.3}", op.id()));
                let h = op_height(op);
                set_placement(op, shifted, width, h);
            }
        }
    }

    // close the slab ring
    if faults.iter().any(|f| f.code == FaultCode::SlabNotClosed) {
        let wall_list: Vec<Wall> = plan.ops.iter().filter_map(BuildOp::as_wall).filter(|w| !degenerate(w)).collect();
        let anchors: Vec<Point> = wall_list.iter().flat_map(|w| w.endpoints()).collect();
        for op in plan.ops.iter_mut() {
            if let BuildOp::CreateFloorSlab { boundary, .. } = op {
                for p in boundary.iter_mut() {
                    if let Some(a) = anchors
                        .iter()
                        .filter(|a| a.dist(*p) <= SNAP_TOL)
                        .min_by(|a, b| a.dist(*p).total_cmp(&b.dist(*p)))
                    {
                        *p = *a;
                    }
                }
                let n = boundary.len();
                if n >= 2 && boundary[0].dist(boundary[n - 1]) <= SNAP_TOL {
                    boundary[n - 1] = boundary[0];
                }
                if slab_problem(boundary).is_some() {
                    *boundary = footprint(&wall_list);
                    warnings.push("SLAB_NOT_CLOSED: boundary rebuilt from the wall graph".into());
                } else {
                    warnings.push("SLAB_NOT_CLOSED: boundary snapped closed".into());
                }
            }
        }
    }

    // drop what cannot be built
    let drop: HashSet<String> = codes
        .iter()
        .filter(|(_, c)| c.contains(&FaultCode::ZeroLengthCurve) || (layout.is_none() && c.contains(&FaultCode::HostMissing)))
        .map(|(id, _)| id.clone())
        .collect();
    let mut dropped: Vec<&String> = drop.iter().collect();
    dropped.sort();
    for d in dropped {
        warnings.push(format!("dropped op {d}"));
    }
    plan.ops.retain(|op| !drop.contains(op.id()));
    Repair { plan, warnings }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BuildOutcome {
    pub model: Model3D,
    /// The plan that finally executed.
    pub plan: BuildPlan,
    pub repairs: usize,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BuildError {
    #[error("plan fails static checks ({} violations)", .0.violations.len())]
    StaticCheck(PlanCheck),
    #[error("repair exhausted after {iterations} rounds with {} faults left", faults.len())]
    RepairExhausted { iterations: usize, faults: Vec<RuntimeFault> },
}

/// Static check, then execute with up to `MAX_REPAIR_ITERATIONS` repair
/// rounds. A plan failing static checks is regenerated once from `layout`.
pub fn build(plan: &BuildPlan, layout: Option<&Layout>) -> Result<BuildOutcome, BuildError> {
    let mut plan = plan.clone();
    let mut warnings = Vec::new();
    let check = static_validate(&plan);
    if !check.passes {
        let regenerated = layout.and_then(|l| compile_unchecked(l).ok());
        match regenerated {
            Some(p) if static_validate(&p).passes => {
                warnings.push("plan regenerated from the layout after static check failure".into());
                plan = p;
            }
            _ => return Err(BuildError::StaticCheck(check)),
        }
    }
    for round in 0..=MAX_REPAIR_ITERATIONS {
        match execute(&plan) {
            Ok(model) => {
                return Ok(BuildOutcome {
                    model,
                    plan,
                    repairs: round,
                    warnings,
                })
            }
            Err(faults) if round == MAX_REPAIR_ITERATIONS => {
                return Err(BuildError::RepairExhausted {
                    iterations: round,
                    faults,
                })
            }
            Err(faults) => {
                let r = repair(&plan, &faults, layout);
                plan = r.plan;
                warnings.extend(r.warnings);
            }
        }
    }
    unreachable!("the last round returns")
}
