//! Circle fitting and arc recovery from raster segments.

use super::raster::Detected;
use super::segments::{arc_residual, Frame, ARC_RESIDUAL_MAX};
use crate::geometry::{arc_from_3pt, normalize_sweep, wrap_angle};
use crate::{Arc, Point};

/// Algebraic (Kåsa) circle fit followed by Gauss-Newton on the geometric
/// residuals. Returns `(center, radius)`.
pub fn fit_circle(pts: &[Point]) -> Option<(Point, f64)> {
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let m = pts.iter().fold(Point::origin(), |a, &p| a + p) * (1.0 / n);
    // centered moments
    let (mut suu, mut suv, mut svv, mut suuu, mut svvv, mut suvv, mut svuu) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for p in pts {
        let (u, v) = (p.x - m.x, p.y - m.y);
        suu += u * u;
        suv += u * v;
        svv += v * v;
        suuu += u * u * u;
        svvv += v * v * v;
        suvv += u * v * v;
        svuu += v * u * u;
    }
    let det = suu * svv - suv * suv;
    if det.abs() < 1e-12 {
        return None;
    }
    let r1 = 0.5 * (suuu + suvv);
    let r2 = 0.5 * (svvv + svuu);
    let uc = (r1 * svv - suv * r2) / det;
    let vc = (suu * r2 - suv * r1) / det;
    let mut c = Point::new(m.x + uc, m.y + vc);
    let mut r = (uc * uc + vc * vc + (suu + svv) / n).sqrt();
    for _ in 0..20 {
        // normal equations for (cx, cy, r)
        let mut a = [[0.0f64; 3]; 3];
        let mut b = [0.0f64; 3];
        for p in pts {
            let d = p.dist(c);
            if d < 1e-12 {
                continue;
            }
            let j = [(c.x - p.x) / d, (c.y - p.y) / d, -1.0];
            let res = d - r;
            for (i, ji) in j.iter().enumerate() {
                b[i] -= ji * res;
                for (k, jk) in j.iter().enumerate() {
                    a[i][k] += ji * jk;
                }
            }
        }
        let step = solve3(a, b)?;
        c = Point::new(c.x + step[0], c.y + step[1]);
        r += step[2];
        if step.iter().map(|s| s.abs()).fold(0.0, f64::max) < 1e-10 {
            break;
        }
    }
    (r.is_finite() && r > 0.0).then_some((c, r))
}

fn solve3(a: [[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    let det = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(a);
    if d.abs() < 1e-14 {
        return None;
    }
    let mut out = [0.0; 3];
    for (i, o) in out.iter_mut().enumerate() {
        let mut m = a;
        for r in 0..3 {
            m[r][i] = b[r];
        }
        *o = det(m) / d;
    }
    Some(out)
}

/// Arc on the circle `(c, r)` from the angle of `first` to the angle of
/// `last`, turning the way `first → mid → last` turns.
pub fn arc_on_circle(c: Point, r: f64, first: Point, mid: Point, last: Point) -> Option<Arc> {
    let ccw = (mid - first).cross(last - first) > 0.0;
    let a0 = (first - c).angle();
    let a1 = (last - c).angle();
    let raw = if ccw { a1 - a0 } else { a0 - a1 };
    let sweep = normalize_sweep(raw).ok()?;
    Some(Arc {
        center: c,
        radius: r,
        start_angle: wrap_angle(a0),
        sweep,
        ccw,
    })
}

/// Three-point arc over ordered samples, refined by a least-squares circle.
/// `None` when either fit leaves a sample more than 0.10 ft off the circle.
pub fn fit_arc_samples(pts: &[Point], mid: usize) -> Option<Arc> {
    let (first, last) = (pts[0], pts[pts.len() - 1]);
    let init = arc_from_3pt(first, pts[mid], last).ok()?;
    if arc_residual(&init, pts) > ARC_RESIDUAL_MAX {
        return None;
    }
    let refined = fit_circle(pts).and_then(|(c, r)| arc_on_circle(c, r, first, pts[mid], last));
    match refined {
        Some(a) if arc_residual(&a, pts) <= arc_residual(&init, pts) => Some(a),
        _ => Some(init),
    }
}

/// Angular bin used to average a thick stroke down to its centerline.
const CENTERLINE_BIN_DEG: f64 = 3.0;
/// Radial half-width (px) of the ink band gathered around a candidate circle.
const ARC_BAND_PX: f64 = 2.5;
/// Angular step when following ink past the ends of a group.
const MARCH_STEP_DEG: f64 = 1.0;
/// A marched degree must average within this radial distance (px) of the circle.
const MARCH_RADIUS_PX: f64 = 0.5;
/// Bulge (px) of a segment's ink off its chord that marks it as curved.
const CURVED_SAGITTA_PX: f64 = 1.5;
/// Mean radial offset (px) under which a segment joins a circle group.
const GROUP_OFF_PX: f64 = 1.5;
/// Flatter bows than this radius-to-chord ratio read as kinked lines.
const CURVE_MAX_R_PER_CHORD: f64 = 4.0;
/// RMS (px) of the centerline about its circle for a curved segment.
const CURVE_FIT_PX: f64 = 0.35;
/// Share of a segment's ink on an accepted arc that hands it to the arc.
const ON_ARC_SHARE: f64 = 0.8;
const MIN_CURVE_SAMPLES: usize = 5;
/// Half-width (px) of the ink strip read around a segment's chord.
const CENTERLINE_HALF_PX: f64 = 8.0;
/// Run length (px) along the chord per centerline sample.
const CENTERLINE_STEP_PX: f64 = 2.0;
/// Chord length (px) skipped at each end, where other walls cross.
const CENTERLINE_TRIM_PX: f64 = 6.0;

fn rms(v: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = v.fold((0.0, 0usize), |(s, n), x| (s + x * x, n + 1));
    if n == 0 { 0.0 } else { (s / n as f64).sqrt() }
}

/// Centerline samples (pixels) of the ink around a segment: the median
/// cross offset per short run along its chord, away from its ends.
fn centerline(ink: &[Point], a: Point, b: Point) -> Vec<Point> {
    let len = a.dist(b);
    if len < 1e-9 {
        return Vec::new();
    }
    let t = (b - a) * (1.0 / len);
    let n = t.perp();
    let mut bins: std::collections::BTreeMap<i64, Vec<f64>> = Default::default();
    for p in ink {
        let (u, v) = ((*p - a).dot(t), (*p - a).dot(n));
        if u >= CENTERLINE_TRIM_PX && u <= len - CENTERLINE_TRIM_PX && v.abs() <= CENTERLINE_HALF_PX {
            bins.entry((u / CENTERLINE_STEP_PX).floor() as i64).or_default().push(v);
        }
    }
    bins.into_iter()
        .map(|(k, mut vs)| {
            vs.sort_by(f64::total_cmp);
            let v = vs[vs.len() / 2];
            a + t * ((k as f64 + 0.5) * CENTERLINE_STEP_PX) + n * v
        })
        .collect()
}

/// Circle through a segment's centerline when it bows off the chord.
fn curved_fit(pts: &[Point], a: Point, b: Point, px: f64) -> Option<(Point, f64)> {
    if pts.len() < MIN_CURVE_SAMPLES {
        return None;
    }
    let (c, r) = fit_circle(pts)?;
    let half = a.dist(b) / 2.0;
    if r <= half || r > CURVE_MAX_R_PER_CHORD * 2.0 * half {
        return None;
    }
    let sagitta = r - (r * r - half * half).sqrt();
    let t = (b - a).normalized();
    let line = rms(pts.iter().map(|p| (*p - a).cross(t)));
    let circ = rms(pts.iter().map(|p| p.dist(c) - r));
    (sagitta >= CURVED_SAGITTA_PX * px && circ <= 0.5 * line && circ <= CURVE_FIT_PX * px).then_some((c, r))
}

fn mean_off(pts: &[Point], c: Point, r: f64) -> f64 {
    pts.iter().map(|p| (p.dist(c) - r).abs()).sum::<f64>() / pts.len().max(1) as f64
}

/// Angle of `p` around `c` measured counter-clockwise from `a0`, in
/// degrees within `[-90, 270)`.
fn rel_deg(p: Point, c: Point, a0: f64) -> f64 {
    let q = std::f64::consts::FRAC_PI_2;
    (wrap_angle((p - c).angle() - a0 + q) - q).to_degrees()
}

/// Counter-clockwise angular extent `(start, sweep)` of points around `c`:
/// the complement of the widest empty gap.
fn angular_extent(pts: &[Point], c: Point) -> (f64, f64) {
    let tau = std::f64::consts::TAU;
    let mut a: Vec<f64> = pts.iter().map(|p| (*p - c).angle().rem_euclid(tau)).collect();
    a.sort_by(f64::total_cmp);
    let mut gap = (a[0] + tau - a[a.len() - 1], 0);
    for i in 1..a.len() {
        if a[i] - a[i - 1] > gap.0 {
            gap = (a[i] - a[i - 1], i);
        }
    }
    (a[gap.1], tau - gap.0)
}

/// Finds raster segments whose ink bows into a circle, groups those lying
/// on a common circle, and replaces each group with an arc in world feet.
/// The circle is refit on all ink in a band around it, and the arc follows
/// that ink past the group's ends. Returns the arcs and, per input segment,
/// whether an arc consumed it.
pub fn raster_arcs(dets: &[Detected], ink: &[Point], frame: &Frame) -> (Vec<Arc>, Vec<bool>) {
    let px = frame.sx.max(frame.sy);
    let world: Vec<Vec<Point>> = dets
        .iter()
        .map(|d| centerline(ink, d.seg.a, d.seg.b).into_iter().map(|p| frame.to_world(p)).collect())
        .collect();
    let mut curved: Vec<(usize, Point, f64)> = dets
        .iter()
        .enumerate()
        .filter_map(|(i, d)| curved_fit(&world[i], frame.to_world(d.seg.a), frame.to_world(d.seg.b), px).map(|(c, r)| (i, c, r)))
        .collect();
    curved.sort_by_key(|&(i, _, _)| std::cmp::Reverse(world[i].len()));
    let mut used = vec![false; dets.len()];
    let mut arcs = Vec::new();
    let world_ink: Vec<Point> = ink.iter().map(|&p| frame.to_world(p)).collect();
    let band = ARC_BAND_PX * px;
    for &(seed, c_seed, r_seed) in &curved {
        if used[seed] {
            continue;
        }
        let mut group = vec![seed];
        let (mut c0, mut r0) = (c_seed, r_seed);
        loop {
            let before = group.len();
            for &(j, _, _) in &curved {
                if !used[j] && !group.contains(&j) && mean_off(&world[j], c0, r0) <= GROUP_OFF_PX * px {
                    group.push(j);
                }
            }
            if group.len() == before {
                break;
            }
            let pts: Vec<Point> = group.iter().flat_map(|&i| world[i].iter().copied()).collect();
            match fit_circle(&pts) {
                Some((c, r)) => (c0, r0) = (c, r),
                None => break,
            }
        }
        let gpts: Vec<Point> = group.iter().flat_map(|&i| world[i].iter().copied()).collect();
        let (a0, sweep0) = angular_extent(&gpts, c0);
        // refit on the ink band over the group's own span
        let span_ink: Vec<Point> = world_ink
            .iter()
            .filter(|p| (p.dist(c0) - r0).abs() <= band && (0.0..=sweep0.to_degrees()).contains(&rel_deg(**p, c0, a0)))
            .copied()
            .collect();
        let Some((c, r)) = fit_circle(&span_ink) else { continue };
        // follow the ink around the circle past the span
        let near: Vec<(f64, Point)> = world_ink
            .iter()
            .filter(|p| (p.dist(c) - r).abs() <= band)
            .map(|&p| (rel_deg(p, c, a0), p))
            .collect();
        // a degree of ink counts while its mean radius stays on the circle
        let mut sums: std::collections::BTreeMap<i64, (f64, usize)> = Default::default();
        for (d, p) in &near {
            let e = sums.entry((d / MARCH_STEP_DEG).floor() as i64).or_insert((0.0, 0));
            e.0 += p.dist(c);
            e.1 += 1;
        }
        let tol = MARCH_RADIUS_PX * px;
        let has = |d: f64| {
            sums.get(&((d / MARCH_STEP_DEG).floor() as i64))
                .is_some_and(|&(sum, k)| (sum / k as f64 - r).abs() <= tol)
        };
        let mut lo = 0.0;
        while lo > -90.0 + MARCH_STEP_DEG && has(lo - MARCH_STEP_DEG) {
            lo -= MARCH_STEP_DEG;
        }
        let mut hi = sweep0.to_degrees();
        while hi < 270.0 - MARCH_STEP_DEG && has(hi) {
            hi += MARCH_STEP_DEG;
        }
        let pts: Vec<Point> = near.iter().filter(|(d, _)| *d >= lo && *d <= hi).map(|&(_, p)| p).collect();
        let on = |deg: f64| c + Point::from_angle(a0 + deg.to_radians()) * r;
        let Some(arc) = arc_on_circle(c, r, on(lo), on((lo + hi) / 2.0), on(hi)) else { continue };
        // centerline check: mean radius per angular bin
        let mut cl: std::collections::BTreeMap<i64, (f64, usize)> = Default::default();
        for p in &pts {
            let rel = wrap_angle((*p - c).angle() - arc.start_angle);
            let k = (rel.to_degrees() / CENTERLINE_BIN_DEG).floor() as i64;
            let e = cl.entry(k).or_insert((0.0, 0));
            e.0 += p.dist(c);
            e.1 += 1;
        }
        // end bins hold the ink of the walls the arc runs into
        let inner = cl.len().saturating_sub(2).max(1);
        let worst = cl
            .values()
            .skip(usize::from(cl.len() > 2))
            .take(inner)
            .map(|&(sum, k)| (sum / k as f64 - r).abs())
            .fold(0.0, f64::max);
        if worst > ARC_RESIDUAL_MAX {
            continue;
        }
        // every segment whose ink lies on the arc belongs to it
        let on_arc = |p: &Point| {
            let q = frame.to_world(*p);
            (q.dist(c) - r).abs() <= band && (-0.02..=1.02).contains(&arc.project(q))
        };
        for (i, d) in dets.iter().enumerate() {
            let k = d.pixels.iter().filter(|p| on_arc(p)).count();
            if k as f64 >= ON_ARC_SHARE * d.pixels.len() as f64 {
                used[i] = true;
            }
        }
        for &i in &group {
            used[i] = true;
        }
        arcs.push(arc);
    }
    (arcs, used)
}
