//! Half-edge planar graph built from wall centerlines.
//!
//! Walls are noded on construction: endpoints that land on another wall's
//! interior split it, and crossing line walls are split at the crossing.
//! Face tracing keeps the face on the left of every half-edge, so bounded
//! faces come out counterclockwise and exterior faces clockwise.

use std::collections::{BTreeMap, BTreeSet};

use crate::geometry::{point_in_polygon, segment_intersection, signed_area};
use crate::layout::{Room, Wall, WallShape, SNAP_TOL};
use crate::Point;

#[derive(Debug, Clone)]
pub struct Edge {
    /// Index of the source wall.
    pub wall: usize,
    pub from: usize,
    pub to: usize,
    /// Polyline from `from` to `to` following the wall.
    pub path: Vec<Point>,
    pub length: f64,
}

#[derive(Debug, Clone)]
pub struct Face {
    /// Half-edge ids in traversal order; half-edge `2e` runs along edge `e`,
    /// `2e + 1` against it.
    pub halfedges: Vec<usize>,
    pub polygon: Vec<Point>,
    /// Wall indices along the boundary, consecutive repeats collapsed.
    pub walls: Vec<usize>,
    pub area: f64,
}

#[derive(Debug, Clone)]
pub struct PlanarGraph {
    pub vertices: Vec<Point>,
    pub edges: Vec<Edge>,
    active: Vec<bool>,
}

#[derive(Debug, Clone)]
pub struct FaceSet {
    pub faces: Vec<Face>,
    /// Face id of each half-edge, `None` for inactive edges.
    pub face_of: Vec<Option<usize>>,
}

impl FaceSet {
    pub fn bounded(&self) -> impl Iterator<Item = (usize, &Face)> {
        self.faces.iter().enumerate().filter(|(_, f)| f.area > 1e-9)
    }

    /// Shared boundary length between face `f` and each neighbouring face.
    pub fn neighbours(&self, graph: &PlanarGraph, f: usize) -> BTreeMap<usize, f64> {
        let mut out = BTreeMap::new();
        for &h in &self.faces[f].halfedges {
            if let Some(g) = self.face_of[h ^ 1] {
                if g != f {
                    *out.entry(g).or_insert(0.0) += graph.edges[h / 2].length;
                }
            }
        }
        out
    }
}

fn find_or_add(vertices: &mut Vec<Point>, p: Point, tol: f64) -> usize {
    if let Some(i) = vertices.iter().position(|v| v.dist(p) <= tol) {
        return i;
    }
    vertices.push(p);
    vertices.len() - 1
}

impl PlanarGraph {
    pub fn from_walls(walls: &[Wall], tol: f64) -> Self {
        let mut vertices: Vec<Point> = Vec::new();
        for w in walls {
            for p in w.endpoints() {
                find_or_add(&mut vertices, p, tol);
            }
        }
        // crossings between line walls become vertices too
        for i in 0..walls.len() {
            for j in (i + 1)..walls.len() {
                if let (WallShape::Line { start: a, end: b }, WallShape::Line { start: c, end: d }) =
                    (&walls[i].shape, &walls[j].shape)
                {
                    if let Some((t, _)) = segment_intersection(*a, *b, *c, *d) {
                        let x = a.lerp(*b, t);
                        find_or_add(&mut vertices, x, tol);
                    }
                }
            }
        }

        let mut edges = Vec::new();
        for (wi, w) in walls.iter().enumerate() {
            let len = w.length();
            if len <= tol {
                continue;
            }
            // arc-length stations of every vertex lying on this wall
            let mut stations: Vec<(f64, usize)> = Vec::new();
            for (vi, v) in vertices.iter().enumerate() {
                let (s, d) = w.project(*v);
                if d <= tol {
                    stations.push((s, vi));
                }
            }
            stations.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            stations.dedup_by(|b, a| a.1 == b.1);
            let mut kept: Vec<(f64, usize)> = Vec::new();
            for st in stations {
                match kept.last() {
                    Some(last) if st.0 - last.0 <= tol => {}
                    _ => kept.push(st),
                }
            }
            for pair in kept.windows(2) {
                let ((s0, v0), (s1, v1)) = (pair[0], pair[1]);
                if v0 == v1 {
                    continue;
                }
                let path = match &w.shape {
                    WallShape::Line { .. } | WallShape::Arc3Pt { .. } => vec![vertices[v0], vertices[v1]],
                    WallShape::Arc(a) => {
                        let n = (((s1 - s0) / a.radius / 5f64.to_radians()).ceil() as usize).max(2);
                        let mut pts: Vec<Point> = (0..=n)
                            .map(|k| w.point_at_arclength(s0 + (s1 - s0) * k as f64 / n as f64))
                            .collect();
                        pts[0] = vertices[v0];
                        pts[n] = vertices[v1];
                        pts
                    }
                };
                edges.push(Edge {
                    wall: wi,
                    from: v0,
                    to: v1,
                    path,
                    length: s1 - s0,
                });
            }
        }
        let active = vec![true; edges.len()];
        let mut g = Self {
            vertices,
            edges,
            active,
        };
        g.prune_dangling();
        g
    }

    pub fn halfedge_count(&self) -> usize {
        self.edges.len() * 2
    }

    pub fn origin(&self, h: usize) -> usize {
        let e = &self.edges[h / 2];
        if h % 2 == 0 {
            e.from
        } else {
            e.to
        }
    }

    pub fn target(&self, h: usize) -> usize {
        self.origin(h ^ 1)
    }

    fn path(&self, h: usize) -> Vec<Point> {
        let mut p = self.edges[h / 2].path.clone();
        if h % 2 == 1 {
            p.reverse();
        }
        p
    }

    pub fn is_active(&self, e: usize) -> bool {
        self.active[e]
    }

    /// Deactivates edges and re-prunes dangling chains.
    pub fn remove_edges(&mut self, edges: impl IntoIterator<Item = usize>) {
        for e in edges {
            self.active[e] = false;
        }
        self.prune_dangling();
    }

    fn prune_dangling(&mut self) {
        loop {
            let mut degree = vec![0usize; self.vertices.len()];
            for (e, edge) in self.edges.iter().enumerate() {
                if self.active[e] {
                    degree[edge.from] += 1;
                    degree[edge.to] += 1;
                }
            }
            let mut changed = false;
            for (e, edge) in self.edges.iter().enumerate() {
                if self.active[e] && (degree[edge.from] < 2 || degree[edge.to] < 2) {
                    self.active[e] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
    }

    pub fn faces(&self) -> FaceSet {
        let nh = self.halfedge_count();
        // outgoing half-edges per vertex, sorted counterclockwise by the
        // direction of their first path step
        let mut outgoing: Vec<Vec<(f64, usize)>> = vec![Vec::new(); self.vertices.len()];
        for h in 0..nh {
            if !self.active[h / 2] {
                continue;
            }
            let path = self.path(h);
            let dir = path[1] - path[0];
            outgoing[self.origin(h)].push((dir.angle(), h));
        }
        for list in &mut outgoing {
            list.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        }
        let mut next = vec![usize::MAX; nh];
        for h in 0..nh {
            if !self.active[h / 2] {
                continue;
            }
            let v = self.target(h);
            let list = &outgoing[v];
            let k = list.iter().position(|&(_, g)| g == h ^ 1).expect("twin is outgoing");
            let prev = (k + list.len() - 1) % list.len();
            next[h] = list[prev].1;
        }

        let mut face_of = vec![None; nh];
        let mut faces = Vec::new();
        for start in 0..nh {
            if !self.active[start / 2] || face_of[start].is_some() {
                continue;
            }
            let fid = faces.len();
            let mut hs = Vec::new();
            let mut h = start;
            loop {
                face_of[h] = Some(fid);
                hs.push(h);
                h = next[h];
                if h == start || hs.len() > nh {
                    break;
                }
            }
            let mut polygon: Vec<Point> = Vec::new();
            let mut walls: Vec<usize> = Vec::new();
            for &h in &hs {
                let p = self.path(h);
                polygon.extend_from_slice(&p[..p.len() - 1]);
                let w = self.edges[h / 2].wall;
                if walls.last() != Some(&w) {
                    walls.push(w);
                }
            }
            if walls.len() > 1 && walls.first() == walls.last() {
                walls.pop();
            }
            let area = signed_area(&polygon).unwrap_or(0.0);
            faces.push(Face {
                halfedges: hs,
                polygon,
                walls,
                area,
            });
        }
        FaceSet { faces, face_of }
    }

    /// Exterior boundary of the largest component, as a counterclockwise face.
    pub fn outer_boundary(&self) -> Option<Face> {
        let fs = self.faces();
        let outer = fs
            .faces
            .into_iter()
            .filter(|f| f.area < -1e-9)
            .min_by(|a, b| a.area.total_cmp(&b.area))?;
        let mut f = outer;
        f.polygon.reverse();
        f.walls.reverse();
        f.halfedges.reverse();
        f.area = -f.area;
        Some(f)
    }

    /// Walls on the exterior boundary in counterclockwise order, each once.
    pub fn outer_boundary_walls(&self) -> Vec<usize> {
        let Some(f) = self.outer_boundary() else {
            return Vec::new();
        };
        let mut seen = BTreeSet::new();
        f.walls.into_iter().filter(|w| seen.insert(*w)).collect()
    }
}

/// Faces smaller than this (sq ft) are not rooms.
pub const MIN_ROOM_AREA: f64 = 1.0;

/// Rooms from the bounded faces of the wall graph. Faces below `min_area`
/// are skipped. Ids are `room1..` in face order.
pub fn derive_rooms(walls: &[Wall], min_area: f64) -> Vec<Room> {
    let g = PlanarGraph::from_walls(walls, SNAP_TOL);
    let fs = g.faces();
    fs.bounded()
        .filter(|(_, f)| f.area >= min_area)
        .enumerate()
        .map(|(k, (_, f))| Room {
            id: format!("room{}", k + 1),
            polygon: f.polygon.clone(),
            wall_chain: f.walls.iter().map(|&w| walls[w].id.clone()).collect(),
        })
        .collect()
}

fn vertex_mean(poly: &[Point]) -> Point {
    let n = poly.len().max(1) as f64;
    poly.iter().fold(Point::origin(), |a, &p| a + p) * (1.0 / n)
}

/// Carries room ids over from `old` to freshly derived rooms: a new room
/// inherits the id of the first unused old room whose vertex mean lies
/// inside it. Unmatched rooms get fresh numbers.
pub fn reconcile_rooms(old: &[Room], fresh: Vec<Room>) -> Vec<Room> {
    let mut used = vec![false; old.len()];
    let mut next = old
        .iter()
        .filter_map(|r| crate::ids::normalize_id(&r.id).ok().map(|(_, n)| n))
        .max()
        .unwrap_or(0);
    fresh
        .into_iter()
        .map(|mut r| {
            let hit = (0..old.len())
                .find(|&i| !used[i] && point_in_polygon(vertex_mean(&old[i].polygon), &r.polygon));
            match hit {
                Some(i) => {
                    used[i] = true;
                    r.id = old[i].id.clone();
                }
                None => {
                    next += 1;
                    r.id = format!("room{next}");
                }
            }
            r
        })
        .collect()
}
