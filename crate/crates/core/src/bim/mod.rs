//! Build plans: compile a validated layout into ordered construction ops,
//! check the plan statically, execute it into a mesh model with a bounded
//! repair loop, and emit script text or OBJ.

mod check;
mod exec;
pub mod mesh;
mod obj;
mod script;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::planar::PlanarGraph;
use crate::validate::validate;
use crate::{Layout, OpeningClass, Point, WallShape};

pub use check::{static_validate, static_validate_value, PlanCheck, PlanViolation, Predicate};
pub use exec::{build, execute, repair, BuildError, BuildOutcome, Element, ElementClass, FaultCode, Model3D, Repair, RuntimeFault, MAX_REPAIR_ITERATIONS};
pub use mesh::Mesh;
pub use obj::export_obj;
pub use script::emit_script_text;

/// Floor slab thickness in feet.
pub const SLAB_THICKNESS: f64 = 0.5;
/// Source id carried by the slab op.
pub const SLAB_ID: &str = "slab";

/// One construction step. Arc walls keep the document's arc parameters;
/// the slab boundary is a closed ring whose last point repeats the first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum BuildOp {
    CreateLineWall {
        id: String,
        start: Point,
        end: Point,
        thickness: f64,
        height: f64,
    },
    CreateArcWall {
        id: String,
        center: Point,
        radius: f64,
        start_angle: f64,
        sweep: f64,
        ccw: bool,
        thickness: f64,
        height: f64,
    },
    PlaceDoor {
        id: String,
        host: String,
        offset: f64,
        width: f64,
        height: f64,
    },
    PlaceWindow {
        id: String,
        host: String,
        offset: f64,
        width: f64,
        height: f64,
        sill: f64,
    },
    CreateFloorSlab {
        id: String,
        boundary: Vec<Point>,
        thickness: f64,
    },
}

impl BuildOp {
    pub fn id(&self) -> &str {
        match self {
            BuildOp::CreateLineWall { id, .. }
            | BuildOp::CreateArcWall { id, .. }
            | BuildOp::PlaceDoor { id, .. }
            | BuildOp::PlaceWindow { id, .. }
            | BuildOp::CreateFloorSlab { id, .. } => id,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            BuildOp::CreateLineWall { .. } => "CreateLineWall",
            BuildOp::CreateArcWall { .. } => "CreateArcWall",
            BuildOp::PlaceDoor { .. } => "PlaceDoor",
            BuildOp::PlaceWindow { .. } => "PlaceWindow",
            BuildOp::CreateFloorSlab { .. } => "CreateFloorSlab",
        }
    }

    pub fn is_wall(&self) -> bool {
        matches!(self, BuildOp::CreateLineWall { .. } | BuildOp::CreateArcWall { .. })
    }

    pub fn host(&self) -> Option<&str> {
        match self {
            BuildOp::PlaceDoor { host, .. } | BuildOp::PlaceWindow { host, .. } => Some(host),
            _ => None,
        }
    }

    /// Wall op as a layout wall, for geometry queries.
    pub fn as_wall(&self) -> Option<crate::Wall> {
        match *self {
            BuildOp::CreateLineWall {
                ref id,
                start,
                end,
                thickness,
                height,
            } => Some(crate::Wall {
                id: id.clone(),
                shape: WallShape::Line { start, end },
                thickness,
                height,
            }),
            BuildOp::CreateArcWall {
                ref id,
                center,
                radius,
                start_angle,
                sweep,
                ccw,
                thickness,
                height,
            } => Some(crate::Wall {
                id: id.clone(),
                shape: WallShape::Arc(crate::Arc {
                    center,
                    radius,
                    start_angle,
                    sweep,
                    ccw,
                }),
                thickness,
                height,
            }),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BuildPlan {
    pub ops: Vec<BuildOp>,
    /// Digest of the layout the plan was compiled from.
    pub provenance: String,
}

impl BuildPlan {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("plan serializes")
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.ops.iter().position(|o| o.id() == id)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CompileError {
    #[error("layout is not valid: {0}")]
    NotValidated(String),
    #[error("layout has no walls")]
    NoWalls,
}

/// Compiles a layout that passes validation.
pub fn compile(layout: &Layout) -> Result<BuildPlan, CompileError> {
    if layout.walls.is_empty() {
        return Err(CompileError::NoWalls);
    }
    let report = validate(layout);
    if !report.passes {
        let codes: Vec<&str> = report.violations.iter().map(|v| v.code.as_str()).collect();
        return Err(CompileError::NotValidated(codes.join(", ")));
    }
    compile_unchecked(layout)
}

/// Compiles without running the validator. Walls come in document order
/// (canonical after id assignment), openings grouped by host in wall order
/// and by offset within a host, then the slab.
pub fn compile_unchecked(layout: &Layout) -> Result<BuildPlan, CompileError> {
    if layout.walls.is_empty() {
        return Err(CompileError::NoWalls);
    }
    let mut ops = Vec::new();
    for w in &layout.walls {
        ops.push(match &w.shape {
            WallShape::Line { start, end } | WallShape::Arc3Pt { start, end, .. } => BuildOp::CreateLineWall {
                id: w.id.clone(),
                start: *start,
                end: *end,
                thickness: w.thickness,
                height: w.height,
            },
            WallShape::Arc(a) => BuildOp::CreateArcWall {
                id: w.id.clone(),
                center: a.center,
                radius: a.radius,
                start_angle: a.start_angle,
                sweep: a.sweep,
                ccw: a.ccw,
                thickness: w.thickness,
                height: w.height,
            },
        });
    }
    for w in &layout.walls {
        let mut hosted: Vec<_> = layout.openings().filter(|(_, o)| o.host == w.id).collect();
        hosted.sort_by(|a, b| a.1.offset.total_cmp(&b.1.offset).then_with(|| a.1.id.cmp(&b.1.id)));
        ops.extend(hosted.into_iter().map(|(class, o)| opening_op(class, o)));
    }
    // openings on unknown hosts still get an op so bindings can flag them
    let known: std::collections::HashSet<&str> = layout.walls.iter().map(|w| w.id.as_str()).collect();
    ops.extend(
        layout
            .openings()
            .filter(|(_, o)| !known.contains(o.host.as_str()))
            .map(|(class, o)| opening_op(class, o)),
    );
    ops.push(BuildOp::CreateFloorSlab {
        id: SLAB_ID.into(),
        boundary: footprint(&layout.walls),
        thickness: SLAB_THICKNESS,
    });
    Ok(BuildPlan {
        ops,
        provenance: layout.digest(),
    })
}

fn opening_op(class: OpeningClass, o: &crate::Opening) -> BuildOp {
    match class {
        OpeningClass::Door => BuildOp::PlaceDoor {
            id: o.id.clone(),
            host: o.host.clone(),
            offset: o.offset,
            width: o.width,
            height: o.height,
        },
        OpeningClass::Window => BuildOp::PlaceWindow {
            id: o.id.clone(),
            host: o.host.clone(),
            offset: o.offset,
            width: o.width,
            height: o.height,
            sill: o.sill.unwrap_or(crate::layout::DEFAULT_WINDOW_SILL),
        },
    }
}

/// Closed counterclockwise ring along the exterior boundary of the wall
/// graph, arcs discretized; empty when the walls bound nothing.
pub fn footprint(walls: &[crate::Wall]) -> Vec<Point> {
    let g = PlanarGraph::from_walls(walls, crate::layout::SNAP_TOL);
    match g.outer_boundary() {
        Some(f) if f.polygon.len() >= 3 => {
            let mut ring = f.polygon;
            ring.push(ring[0]);
            ring
        }
        _ => Vec::new(),
    }
}
