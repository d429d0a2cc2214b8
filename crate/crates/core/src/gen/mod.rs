//! Synthetic floor plans with known ground truth, and sketch renderers.

pub mod render;
pub mod suite;

use serde::{Deserialize, Serialize};

use crate::extract::topology::node_walls;
use crate::geometry::arc_from_3pt;
use crate::planar::{derive_rooms, MIN_ROOM_AREA};
use crate::{assign_canonical_ids, Layout, Opening, OpeningClass, Point, Wall};

pub use render::{render_raster, render_strokes, RenderOptions};
pub use suite::{p10_analog, p10_script, suite, three_room_plan, SuitePlan};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum WallSpec {
    Line(Point, Point),
    /// Circular arc through three points.
    Arc(Point, Point, Point),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpeningSpec {
    pub class: OpeningClass,
    /// Any point on the intended host; the nearest noded wall hosts it.
    pub at: Point,
    pub width: f64,
}

/// A plan described by wall strokes and opening positions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanSpec {
    pub name: String,
    pub walls: Vec<WallSpec>,
    pub openings: Vec<OpeningSpec>,
}

impl PlanSpec {
    pub fn new(name: &str) -> Self {
        Self {
            name: name.into(),
            walls: Vec::new(),
            openings: Vec::new(),
        }
    }

    pub fn line(mut self, a: (f64, f64), b: (f64, f64)) -> Self {
        self.walls.push(WallSpec::Line(pt(a), pt(b)));
        self
    }

    /// Closed polygon of line walls.
    pub fn polygon(mut self, pts: &[(f64, f64)]) -> Self {
        for i in 0..pts.len() {
            self.walls.push(WallSpec::Line(pt(pts[i]), pt(pts[(i + 1) % pts.len()])));
        }
        self
    }

    pub fn arc(mut self, a: (f64, f64), m: (f64, f64), b: (f64, f64)) -> Self {
        self.walls.push(WallSpec::Arc(pt(a), pt(m), pt(b)));
        self
    }

    pub fn door(mut self, at: (f64, f64)) -> Self {
        self.openings.push(OpeningSpec {
            class: OpeningClass::Door,
            at: pt(at),
            width: OpeningClass::Door.default_width(),
        });
        self
    }

    pub fn window(mut self, at: (f64, f64)) -> Self {
        self.openings.push(OpeningSpec {
            class: OpeningClass::Window,
            at: pt(at),
            width: OpeningClass::Window.default_width(),
        });
        self
    }

    /// Ground-truth layout: walls noded at every junction, openings centered
    /// at the projection of their point, rooms from the bounded faces and
    /// canonical ids throughout.
    pub fn build(&self) -> Layout {
        let walls: Vec<Wall> = self
            .walls
            .iter()
            .enumerate()
            .map(|(i, w)| match *w {
                WallSpec::Line(a, b) => Wall::line(format!("s{i}"), a, b),
                WallSpec::Arc(a, m, b) => Wall::arc(format!("s{i}"), arc_from_3pt(a, m, b).expect("spec arcs are not collinear")),
            })
            .collect();
        let mut layout = Layout::new();
        layout.walls = node_walls(&walls);
        for (i, w) in layout.walls.iter_mut().enumerate() {
            w.id = format!("n{i}");
        }
        layout = layout.rounded();
        for o in &self.openings {
            let (host, s) = layout
                .walls
                .iter()
                .map(|w| (w, w.project(o.at)))
                .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
                .map(|(w, (s, _))| (w.id.clone(), s))
                .expect("plans have walls");
            match o.class {
                OpeningClass::Door => {
                    let id = format!("door{}", layout.doors.len() + 1);
                    layout.doors.push(Opening::door(id, host, s, o.width));
                }
                OpeningClass::Window => {
                    let id = format!("win{}", layout.windows.len() + 1);
                    layout.windows.push(Opening::window(id, host, s, o.width));
                }
            }
        }
        layout.rooms = derive_rooms(&layout.walls, MIN_ROOM_AREA);
        assign_canonical_ids(&layout).rounded()
    }
}

fn pt(p: (f64, f64)) -> Point {
    Point::new(p.0, p.1)
}
