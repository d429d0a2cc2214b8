//! Triangle meshes for walls, opening panels and the slab.

use std::collections::HashMap;

use crate::{Point, Wall};

/// Arc walls are stepped at most this many degrees per facet.
pub const ARC_STEP_DEG: f64 = 5.0;
const BREAK_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<[f64; 3]>,
    pub triangles: Vec<[usize; 3]>,
}

/// Rectangular void in a wall's elevation, in arc length and height.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hole {
    pub lo: f64,
    pub hi: f64,
    pub z0: f64,
    pub z1: f64,
}

type V3 = [f64; 3];

fn sub(a: V3, b: V3) -> V3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: V3, b: V3) -> V3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot(a: V3, b: V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

impl Mesh {
    /// Two triangles over `q`, wound so the normal points along `outward`.
    fn quad(&mut self, q: [usize; 4], outward: V3) {
        let p = |i: usize| self.vertices[q[i]];
        let n = cross(sub(p(1), p(0)), sub(p(2), p(0)));
        let n2 = cross(sub(p(2), p(0)), sub(p(3), p(0)));
        let flip = dot(n, outward) + dot(n2, outward) < 0.0;
        if flip {
            self.triangles.push([q[0], q[2], q[1]]);
            self.triangles.push([q[0], q[3], q[2]]);
        } else {
            self.triangles.push([q[0], q[1], q[2]]);
            self.triangles.push([q[0], q[2], q[3]]);
        }
    }

    /// Every undirected edge is used by exactly two triangles, once in
    /// each direction.
    pub fn is_watertight(&self) -> bool {
        if self.triangles.is_empty() {
            return false;
        }
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for t in &self.triangles {
            if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return false;
            }
            for k in 0..3 {
                *directed.entry((t[k], t[(k + 1) % 3])).or_default() += 1;
            }
        }
        directed
            .iter()
            .all(|(&(a, b), &n)| n == 1 && directed.get(&(b, a)) == Some(&1))
    }

    /// V - E + F over the vertices the triangles use.
    pub fn euler_characteristic(&self) -> i64 {
        let mut used = vec![false; self.vertices.len()];
        let mut edges = std::collections::HashSet::new();
        for t in &self.triangles {
            for k in 0..3 {
                used[t[k]] = true;
                let (a, b) = (t[k], t[(k + 1) % 3]);
                edges.insert((a.min(b), a.max(b)));
            }
        }
        let v = used.iter().filter(|&&u| u).count() as i64;
        v - edges.len() as i64 + self.triangles.len() as i64
    }

    /// Enclosed volume; positive when triangles face outward.
    pub fn signed_volume(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| {
                let [a, b, c] = t.map(|i| self.vertices[i]);
                dot(a, cross(b, c)) / 6.0
            })
            .sum()
    }
}

fn sorted_breaks(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| (*a - *b).abs() < BREAK_EPS);
    v
}

/// Solid swept along the wall's centerline between heights `z0` and `z1`,
/// with rectangular holes removed. The elevation is cut into a grid at hole
/// edges (and arc facet steps) so neighboring cells share whole edges.
pub fn wall_solid(wall: &Wall, z0: f64, z1: f64, holes: &[Hole]) -> Mesh {
    let len = wall.length();
    let mut s = vec![0.0, len];
    if let Some(a) = wall.as_arc() {
        let n = (a.sweep.to_degrees() / ARC_STEP_DEG).ceil().max(1.0) as usize;
        s.extend((1..n).map(|k| len * k as f64 / n as f64));
    }
    let mut z = vec![z0, z1];
    for h in holes {
        s.extend([h.lo.clamp(0.0, len), h.hi.clamp(0.0, len)]);
        z.extend([h.z0.clamp(z0, z1), h.z1.clamp(z0, z1)]);
    }
    let (s, z) = (sorted_breaks(s), sorted_breaks(z));
    let (ns, nz) = (s.len() - 1, z.len() - 1);
    let solid = |i: isize, j: isize| -> bool {
        if i < 0 || j < 0 || i >= ns as isize || j >= nz as isize {
            return false;
        }
        let (i, j) = (i as usize, j as usize);
        let (sm, zm) = ((s[i] + s[i + 1]) / 2.0, (z[j] + z[j + 1]) / 2.0);
        !holes.iter().any(|h| sm > h.lo && sm < h.hi && zm > h.z0 && zm < h.z1)
    };

    let half = wall.thickness / 2.0;
    let frame: Vec<(Point, Point)> = s
        .iter()
        .map(|&si| {
            let t = wall.tangent_at_arclength(si);
            (wall.point_at_arclength(si), Point::new(-t.y, t.x))
        })
        .collect();
    let mut mesh = Mesh::default();
    let mut index: HashMap<(usize, usize, u8), usize> = HashMap::new();
    let mut vert = |mesh: &mut Mesh, i: usize, j: usize, side: u8| -> usize {
        *index.entry((i, j, side)).or_insert_with(|| {
            let (p, n) = frame[i];
            let k = if side == 0 { half } else { -half };
            mesh.vertices.push([p.x + n.x * k, p.y + n.y * k, z[j]]);
            mesh.vertices.len() - 1
        })
    };
    let center = |sv: f64, zv: f64| -> V3 {
        let p = wall.point_at_arclength(sv);
        [p.x, p.y, zv]
    };

    for i in 0..ns {
        for j in 0..nz {
            if !solid(i as isize, j as isize) {
                continue;
            }
            let sm = (s[i] + s[i + 1]) / 2.0;
            let c = center(sm, (z[j] + z[j + 1]) / 2.0);
            let t = wall.tangent_at_arclength(sm);
            let n = [-t.y, t.x, 0.0];
            for side in [0u8, 1] {
                let q = [
                    vert(&mut mesh, i, j, side),
                    vert(&mut mesh, i + 1, j, side),
                    vert(&mut mesh, i + 1, j + 1, side),
                    vert(&mut mesh, i, j + 1, side),
                ];
                let out = if side == 0 { n } else { n.map(|x| -x) };
                mesh.quad(q, out);
            }
            // grid edges of the cell as (node a, node b, neighbor cell)
            let (ii, jj) = (i as isize, j as isize);
            let sides = [
                ((i, j), (i + 1, j), (ii, jj - 1)),
                ((i + 1, j + 1), (i, j + 1), (ii, jj + 1)),
                ((i, j + 1), (i, j), (ii - 1, jj)),
                ((i + 1, j), (i + 1, j + 1), (ii + 1, jj)),
            ];
            for (a, b, nb) in sides {
                if solid(nb.0, nb.1) {
                    continue;
                }
                let q = [
                    vert(&mut mesh, a.0, a.1, 0),
                    vert(&mut mesh, b.0, b.1, 0),
                    vert(&mut mesh, b.0, b.1, 1),
                    vert(&mut mesh, a.0, a.1, 1),
                ];
                let qc = q
                    .iter()
                    .map(|&v| mesh.vertices[v])
                    .fold([0.0; 3], |acc, v| [acc[0] + v[0] / 4.0, acc[1] + v[1] / 4.0, acc[2] + v[2] / 4.0]);
                mesh.quad(q, sub(qc, c));
            }
        }
    }
    mesh
}

/// Drops the closing repeat, duplicate and collinear vertices, and orients
/// the ring counterclockwise.
pub fn clean_ring(ring: &[Point]) -> Vec<Point> {
    let mut pts: Vec<Point> = Vec::with_capacity(ring.len());
    for &p in ring {
        if pts.last().map_or(true, |q: &Point| q.dist(p) > 1e-9) {
            pts.push(p);
        }
    }
    while pts.len() > 1 && pts[0].dist(pts[pts.len() - 1]) <= 1e-9 {
        pts.pop();
    }
    loop {
        let n = pts.len();
        if n < 3 {
            return pts;
        }
        let flat = (0..n).find(|&i| {
            let (a, b, c) = (pts[(i + n - 1) % n], pts[i], pts[(i + 1) % n]);
            (b - a).cross(c - b).abs() <= 1e-9 * (1.0 + a.dist(b) * b.dist(c))
        });
        match flat {
            Some(i) => {
                pts.remove(i);
            }
            None => break,
        }
    }
    if crate::geometry::signed_area(&pts).unwrap_or(0.0) < 0.0 {
        pts.reverse();
    }
    pts
}

fn in_triangle(p: Point, a: Point, b: Point, c: Point) -> bool {
    let d1 = (b - a).cross(p - a);
    let d2 = (c - b).cross(p - b);
    let d3 = (a - c).cross(p - c);
    d1 >= -1e-12 && d2 >= -1e-12 && d3 >= -1e-12
}

/// Ear-clipping triangulation of a counterclockwise simple polygon.
pub fn triangulate(poly: &[Point]) -> Vec<[usize; 3]> {
    let mut idx: Vec<usize> = (0..poly.len()).collect();
    let mut out = Vec::with_capacity(poly.len().saturating_sub(2));
    while idx.len() > 3 {
        let n = idx.len();
        let convex = |k: usize| {
            let (a, b, c) = (poly[idx[(k + n - 1) % n]], poly[idx[k]], poly[idx[(k + 1) % n]]);
            (b - a).cross(c - b)
        };
        let ear = (0..n).find(|&k| {
            if convex(k) <= 0.0 {
                return false;
            }
            let (ia, ib, ic) = (idx[(k + n - 1) % n], idx[k], idx[(k + 1) % n]);
            idx.iter()
                .filter(|&&m| m != ia && m != ib && m != ic)
                .all(|&m| !in_triangle(poly[m], poly[ia], poly[ib], poly[ic]))
        });
        // numerically stuck: clip the most convex corner
        let k = ear.unwrap_or_else(|| (0..n).max_by(|&a, &b| convex(a).total_cmp(&convex(b))).unwrap());
        out.push([idx[(k + n - 1) % n], idx[k], idx[(k + 1) % n]]);
        idx.remove(k);
    }
    if idx.len() == 3 {
        out.push([idx[0], idx[1], idx[2]]);
    }
    out
}

/// Vertical extrusion of a polygon between `z0` and `z1`.
pub fn prism(ring: &[Point], z0: f64, z1: f64) -> Mesh {
    let poly = clean_ring(ring);
    let n = poly.len();
    let mut mesh = Mesh::default();
    if n < 3 {
        return mesh;
    }
    for z in [z0, z1] {
        mesh.vertices.extend(poly.iter().map(|p| [p.x, p.y, z]));
    }
    for [a, b, c] in triangulate(&poly) {
        mesh.triangles.push([a, c, b]);
        mesh.triangles.push([a + n, b + n, c + n]);
    }
    for i in 0..n {
        let j = (i + 1) % n;
        let d = poly[j] - poly[i];
        mesh.quad([i, j, j + n, i + n], [d.y, -d.x, 0.0]);
    }
    mesh
}
