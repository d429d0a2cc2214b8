//! Script text for an external BIM scripting host.
//!
//! Template: a fixed preamble (imports, document and level lookup, one
//! helper per op kind, a transaction), then one helper call per op in plan
//! order, then the commit. Numbers print with four decimals in feet and
//! radians, so the same plan always yields the same bytes.

use std::fmt::Write as _;

use super::{BuildOp, BuildPlan};

const PREAMBLE: &str = r#"import clr
clr.AddReference('RevitAPI')
from Autodesk.Revit.DB import *
from Autodesk.Revit.DB.Structure import StructuralType

doc = __revit__.ActiveUIDocument.Document
level = FilteredElementCollector(doc).OfClass(Level).FirstElement()
elements = {}

def _symbol(category):
    s = FilteredElementCollector(doc).OfCategory(category).OfClass(FamilySymbol).FirstElement()
    if not s.IsActive:
        s.Activate()
    return s

def _finish_wall(key, wall, height):
    wall.get_Parameter(BuiltInParameter.WALL_USER_HEIGHT_PARAM).Set(height)
    elements[key] = wall

def line_wall(key, x0, y0, x1, y1, thickness, height):
    curve = Line.CreateBound(XYZ(x0, y0, 0), XYZ(x1, y1, 0))
    _finish_wall(key, Wall.Create(doc, curve, level.Id, False), height)

def arc_wall(key, cx, cy, radius, a0, a1, thickness, height):
    curve = Arc.Create(XYZ(cx, cy, 0), radius, a0, a1, XYZ.BasisX, XYZ.BasisY)
    _finish_wall(key, Wall.Create(doc, curve, level.Id, False), height)

def place_door(key, host, x, y, width, height):
    inst = doc.Create.NewFamilyInstance(XYZ(x, y, 0), _symbol(BuiltInCategory.OST_Doors), elements[host], level, StructuralType.NonStructural)
    inst.get_Parameter(BuiltInParameter.DOOR_WIDTH).Set(width)
    inst.get_Parameter(BuiltInParameter.DOOR_HEIGHT).Set(height)
    elements[key] = inst

def place_window(key, host, x, y, width, height, sill):
    inst = doc.Create.NewFamilyInstance(XYZ(x, y, sill), _symbol(BuiltInCategory.OST_Windows), elements[host], level, StructuralType.NonStructural)
    inst.get_Parameter(BuiltInParameter.WINDOW_WIDTH).Set(width)
    inst.get_Parameter(BuiltInParameter.WINDOW_HEIGHT).Set(height)
    inst.get_Parameter(BuiltInParameter.INSTANCE_SILL_HEIGHT_PARAM).Set(sill)
    elements[key] = inst

def floor_slab(key, points, thickness):
    profile = CurveArray()
    for (x0, y0), (x1, y1) in zip(points, points[1:]):
        profile.Append(Line.CreateBound(XYZ(x0, y0, 0), XYZ(x1, y1, 0)))
    elements[key] = doc.Create.NewFloor(profile, False)

t = Transaction(doc, 'sketchbim build')
t.Start()
"#;

fn f(x: f64) -> String {
    // avoid printing negative zero
    let s = format!("{x:.4}");
    if s == "-0.0000" {
        "0.0000".into()
    } else {
        s
    }
}

/// Renders the plan; callers run `static_validate` first.
pub fn emit_script_text(plan: &BuildPlan) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# sketchbim build script");
    let _ = writeln!(s, "# provenance: {}", plan.provenance);
    let _ = writeln!(s, "# units: feet");
    s.push_str(PREAMBLE);
    let hosts: std::collections::HashMap<&str, crate::Wall> =
        plan.ops.iter().filter_map(|o| o.as_wall().map(|w| (o.id(), w))).collect();
    let at = |host: &str, offset: f64| hosts.get(host).map(|w| w.point_at_arclength(offset)).unwrap_or_default();
    for op in &plan.ops {
        let _ = match op {
            BuildOp::CreateLineWall {
                id,
                start,
                end,
                thickness,
                height,
            } => writeln!(
                s,
                "line_wall('{id}', {}, {}, {}, {}, {}, {})",
                f(start.x),
                f(start.y),
                f(end.x),
                f(end.y),
                f(*thickness),
                f(*height)
            ),
            BuildOp::CreateArcWall {
                id,
                center,
                radius,
                start_angle,
                sweep,
                ccw,
                thickness,
                height,
            } => {
                // the host API sweeps counterclockwise from a0 to a1
                let a0 = if *ccw { *start_angle } else { start_angle - sweep };
                writeln!(
                    s,
                    "arc_wall('{id}', {}, {}, {}, {}, {}, {}, {})",
                    f(center.x),
                    f(center.y),
                    f(*radius),
                    f(a0),
                    f(a0 + sweep),
                    f(*thickness),
                    f(*height)
                )
            }
            BuildOp::PlaceDoor {
                id,
                host,
                offset,
                width,
                height,
            } => {
                let p = at(host, *offset);
                writeln!(s, "place_door('{id}', '{host}', {}, {}, {}, {})", f(p.x), f(p.y), f(*width), f(*height))
            }
            BuildOp::PlaceWindow {
                id,
                host,
                offset,
                width,
                height,
                sill,
            } => {
                let p = at(host, *offset);
                writeln!(
                    s,
                    "place_window('{id}', '{host}', {}, {}, {}, {}, {})",
                    f(p.x),
                    f(p.y),
                    f(*width),
                    f(*height),
                    f(*sill)
                )
            }
            BuildOp::CreateFloorSlab { id, boundary, thickness } => {
                let pts: Vec<String> = boundary.iter().map(|p| format!("({}, {})", f(p.x), f(p.y))).collect();
                writeln!(s, "floor_slab('{id}', [{}], {})", pts.join(", "), f(*thickness))
            }
        };
    }
    s.push_str("t.Commit()\n");
    s
}
