//! Planar primitives: points, circular arcs, polygons and segment predicates.
//!
//! Everything here is generic over [`Scalar`] so the same kernels serve the
//! `f64` document model and `f32` raster-side computations.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::scalar::Scalar;

/// Twice-triangle-area floor below which three points count as collinear.
pub const COLLINEAR_EPS: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("points are collinear; no circle passes through them")]
    CollinearPoints,
    #[error("sweep is a whole number of turns (full circles are not allowed)")]
    FullCircle,
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("opening span [{lo:.3}, {hi:.3}] leaves the usable extent [{min:.3}, {max:.3}] of its host")]
    OffWall { lo: f64, hi: f64, min: f64, max: f64 },
}

/// A point in the world frame (x east, y north).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2<S> {
    pub x: S,
    pub y: S,
}

impl<S: Scalar> Point2<S> {
    pub fn new(x: S, y: S) -> Self {
        Self { x, y }
    }

    pub fn origin() -> Self {
        Self::new(S::zero(), S::zero())
    }

    pub fn from_angle(theta: S) -> Self {
        Self::new(theta.cos(), theta.sin())
    }

    pub fn dot(self, o: Self) -> S {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, o: Self) -> S {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> S {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Self) -> S {
        (self - o).norm()
    }

    pub fn normalized(self) -> Self {
        let n = self.norm();
        if n > S::zero() {
            self * (S::one() / n)
        } else {
            self
        }
    }

    /// Rotated +90°.
    pub fn perp(self) -> Self {
        Self::new(-self.y, self.x)
    }

    pub fn rotate(self, theta: S) -> Self {
        let (s, c) = theta.sin_cos();
        Self::new(self.x * c - self.y * s, self.x * s + self.y * c)
    }

    pub fn lerp(self, o: Self, t: S) -> Self {
        self + (o - self) * t
    }

    pub fn midpoint(self, o: Self) -> Self {
        self.lerp(o, S::lit(0.5))
    }

    pub fn angle(self) -> S {
        self.y.atan2(self.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn cast<T: Scalar>(self) -> Point2<T> {
        Point2::new(T::lit(self.x.as_f64()), T::lit(self.y.as_f64()))
    }
}

impl<S: Scalar> Add for Point2<S> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y)
    }
}

impl<S: Scalar> Sub for Point2<S> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y)
    }
}

impl<S: Scalar> Mul<S> for Point2<S> {
    type Output = Self;
    fn mul(self, k: S) -> Self {
        Self::new(self.x * k, self.y * k)
    }
}

impl<S: Scalar> Neg for Point2<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

// Points travel as `[x, y]` pairs in every document format.
impl<S: Scalar> Serialize for Point2<S> {
    fn serialize<Z: Serializer>(&self, ser: Z) -> Result<Z::Ok, Z::Error> {
        [self.x.as_f64(), self.y.as_f64()].serialize(ser)
    }
}

impl<'de, S: Scalar> Deserialize<'de> for Point2<S> {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let [x, y] = <[f64; 2]>::deserialize(de)?;
        Ok(Point2::new(S::lit(x), S::lit(y)))
    }
}

/// Wraps `raw` into the open interval `(0, 2π)`.
pub fn normalize_sweep<S: Scalar>(raw: S) -> Result<S, GeomError> {
    let tau = S::two_pi();
    let r = raw - tau * (raw / tau).floor();
    let eps = S::lit(1e-9).max(S::epsilon() * S::lit(16.0));
    if r <= eps || tau - r <= eps {
        return Err(GeomError::FullCircle);
    }
    Ok(r)
}

/// Wraps an angle into `[0, 2π)`.
pub fn wrap_angle<S: Scalar>(a: S) -> S {
    let tau = S::two_pi();
    let r = a - tau * (a / tau).floor();
    if r >= tau {
        S::zero()
    } else {
        r
    }
}

/// Smallest difference between two undirected line orientations, in `[0, π/2]`.
pub fn orientation_diff<S: Scalar>(a: S, b: S) -> S {
    let pi = S::PI();
    let mut d = (a - b).abs() % pi;
    if d > pi / S::lit(2.0) {
        d = pi - d;
    }
    d
}

/// Circular arc geometry. The arc starts at `start_angle` and turns by
/// `sweep` counterclockwise when `ccw`, clockwise otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcGeom<S> {
    pub center: Point2<S>,
    pub radius: S,
    pub start_angle: S,
    pub sweep: S,
    pub ccw: bool,
}

impl<S: Scalar> ArcGeom<S> {
    fn signed_sweep(&self) -> S {
        if self.ccw {
            self.sweep
        } else {
            -self.sweep
        }
    }

    /// Polar angle of the point at fraction `t ∈ [0, 1]` along the arc.
    pub fn angle_at(&self, t: S) -> S {
        self.start_angle + self.signed_sweep() * t
    }

    pub fn point_at(&self, t: S) -> Point2<S> {
        self.center + Point2::from_angle(self.angle_at(t)) * self.radius
    }

    pub fn start(&self) -> Point2<S> {
        self.point_at(S::zero())
    }

    pub fn end(&self) -> Point2<S> {
        self.point_at(S::one())
    }

    pub fn mid(&self) -> Point2<S> {
        self.point_at(S::lit(0.5))
    }

    pub fn length(&self) -> S {
        self.radius * self.sweep
    }

    /// Unit tangent in the direction of travel at fraction `t`.
    pub fn tangent_at(&self, t: S) -> Point2<S> {
        let radial = Point2::from_angle(self.angle_at(t));
        if self.ccw {
            radial.perp()
        } else {
            -radial.perp()
        }
    }

    /// Fraction along the arc of the point closest to `p`, clamped to `[0, 1]`.
    pub fn project(&self, p: Point2<S>) -> S {
        let a = (p - self.center).angle();
        let rel = if self.ccw {
            wrap_angle(a - self.start_angle)
        } else {
            wrap_angle(self.start_angle - a)
        };
        if rel <= self.sweep {
            return rel / self.sweep;
        }
        // outside the swept range: snap to the nearer end
        let past_end = rel - self.sweep;
        let before_start = S::two_pi() - rel;
        if past_end < before_start {
            S::one()
        } else {
            S::zero()
        }
    }

    pub fn distance_to(&self, p: Point2<S>) -> S {
        self.point_at(self.project(p)).dist(p)
    }

    /// Polyline approximation with `n` segments.
    pub fn sample(&self, n: usize) -> Vec<Point2<S>> {
        let n = n.max(1);
        (0..=n)
            .map(|i| self.point_at(S::lit(i as f64) / S::lit(n as f64)))
            .collect()
    }

    /// Sagitta of the arc: distance from the arc midpoint to its chord.
    pub fn sagitta(&self) -> S {
        let half = self.sweep / S::lit(2.0);
        self.radius * (S::one() - half.cos())
    }
}

/// Circle through three points (the arc3pt / sagitta-midpoint construction).
///
/// The returned arc starts at `p_start`, passes through `p_mid` and ends at
/// `p_end`; `ccw` records the turning direction of that point order.
pub fn arc_from_3pt<S: Scalar>(
    p_start: Point2<S>,
    p_mid: Point2<S>,
    p_end: Point2<S>,
) -> Result<ArcGeom<S>, GeomError> {
    let ab = p_mid - p_start;
    let ac = p_end - p_start;
    let twice_area = ab.cross(ac);
    if twice_area.abs() <= S::lit(COLLINEAR_EPS) {
        return Err(GeomError::CollinearPoints);
    }
    // circumcenter relative to p_start
    let d = S::lit(2.0) * twice_area;
    let ab2 = ab.dot(ab);
    let ac2 = ac.dot(ac);
    let ux = (ac.y * ab2 - ab.y * ac2) / d;
    let uy = (ab.x * ac2 - ac.x * ab2) / d;
    let center = p_start + Point2::new(ux, uy);
    let radius = (p_start - center).norm();
    // positive area means start → mid → end turns left, i.e. counterclockwise
    let ccw = twice_area > S::zero();
    let a0 = (p_start - center).angle();
    let a2 = (p_end - center).angle();
    let raw = if ccw { a2 - a0 } else { a0 - a2 };
    let sweep = normalize_sweep(raw)?;
    Ok(ArcGeom {
        center,
        radius,
        start_angle: a0,
        sweep,
        ccw,
    })
}

/// Shoelace area; counterclockwise polygons are positive.
pub fn signed_area<S: Scalar>(polygon: &[Point2<S>]) -> Result<S, GeomError> {
    if polygon.len() < 3 {
        return Err(GeomError::TooFewVertices(polygon.len()));
    }
    let mut acc = S::zero();
    for (i, p) in polygon.iter().enumerate() {
        let q = polygon[(i + 1) % polygon.len()];
        acc = acc + p.cross(q);
    }
    Ok(acc / S::lit(2.0))
}

/// Parameter `t ∈ [0, 1]` and the closest point on segment `ab` to `p`.
pub fn closest_on_segment<S: Scalar>(p: Point2<S>, a: Point2<S>, b: Point2<S>) -> (S, Point2<S>) {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 <= S::zero() {
        return (S::zero(), a);
    }
    let t = ((p - a).dot(ab) / len2).max(S::zero()).min(S::one());
    (t, a + ab * t)
}

pub fn dist_point_segment<S: Scalar>(p: Point2<S>, a: Point2<S>, b: Point2<S>) -> S {
    closest_on_segment(p, a, b).1.dist(p)
}

/// Proper or touching intersection of segments `ab` and `cd`, as parameters
/// `(t, u)` along each. Parallel segments report `None`.
pub fn segment_intersection<S: Scalar>(
    a: Point2<S>,
    b: Point2<S>,
    c: Point2<S>,
    d: Point2<S>,
) -> Option<(S, S)> {
    let r = b - a;
    let s = d - c;
    let denom = r.cross(s);
    let scale = r.norm() * s.norm();
    if denom.abs() <= S::lit(1e-12) * scale.max(S::one()) {
        return None;
    }
    let qp = c - a;
    let t = qp.cross(s) / denom;
    let u = qp.cross(r) / denom;
    let eps = S::lit(1e-9);
    if t >= -eps && t <= S::one() + eps && u >= -eps && u <= S::one() + eps {
        Some((t, u))
    } else {
        None
    }
}

/// True when two non-adjacent edges of the closed polygon cross or touch.
pub fn polygon_self_intersects<S: Scalar>(poly: &[Point2<S>]) -> bool {
    let n = poly.len();
    if n < 4 {
        return false;
    }
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        for j in (i + 1)..n {
            // skip edges sharing a vertex
            if j == i + 1 || (i == 0 && j == n - 1) {
                continue;
            }
            let (c, d) = (poly[j], poly[(j + 1) % n]);
            if segment_intersection(a, b, c, d).is_some() {
                return true;
            }
        }
    }
    false
}

/// Even-odd point-in-polygon test.
pub fn point_in_polygon<S: Scalar>(p: Point2<S>, poly: &[Point2<S>]) -> bool {
    let n = poly.len();
    let mut inside = false;
    let mut j = n.wrapping_sub(1);
    for i in 0..n {
        let (pi, pj) = (poly[i], poly[j]);
        if (pi.y > p.y) != (pj.y > p.y) {
            let x = pj.x + (p.y - pj.y) * (pi.x - pj.x) / (pi.y - pj.y);
            if p.x < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Distance from `p` to the boundary of a closed polygon.
pub fn dist_to_polygon_boundary<S: Scalar>(p: Point2<S>, poly: &[Point2<S>]) -> S {
    let n = poly.len();
    (0..n)
        .map(|i| dist_point_segment(p, poly[i], poly[(i + 1) % n]))
        .fold(S::infinity(), S::min)
}

/// Andrew's monotone chain; returns the hull counterclockwise.
pub fn convex_hull<S: Scalar>(points: &[Point2<S>]) -> Vec<Point2<S>> {
    let mut pts: Vec<Point2<S>> = points.to_vec();
    pts.sort_by(|a, b| {
        a.x.partial_cmp(&b.x)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.y.partial_cmp(&b.y).unwrap_or(std::cmp::Ordering::Equal))
    });
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<Point2<S>> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2
            && (lower[lower.len() - 1] - lower[lower.len() - 2]).cross(p - lower[lower.len() - 2])
                <= S::zero()
        {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point2<S>> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2
            && (upper[upper.len() - 1] - upper[upper.len() - 2]).cross(p - upper[upper.len() - 2])
                <= S::zero()
        {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Minimum caliper width: the smallest distance between two parallel
/// supporting lines of the point set.
pub fn min_caliper_width<S: Scalar>(points: &[Point2<S>]) -> S {
    let hull = convex_hull(points);
    let n = hull.len();
    if n < 3 {
        return S::zero();
    }
    // the minimum-width direction is always normal to a hull edge
    let mut best = S::infinity();
    for i in 0..n {
        let a = hull[i];
        let dir = (hull[(i + 1) % n] - a).normalized();
        let far = hull
            .iter()
            .map(|&p| dir.cross(p - a).abs())
            .fold(S::zero(), S::max);
        best = best.min(far);
    }
    best
}
