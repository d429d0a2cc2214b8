//! Ink detection and Hough/RANSAC line finding on rasters.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::bundle::Gray;
use super::segments::Segment;
use super::ExtractError;
use crate::Point;

/// Minimum votes (pixels) for a Hough peak or a segment.
pub const SUPPORT_MIN: usize = 20;
/// RANSAC inlier band in pixels.
pub const RANSAC_BAND: f64 = 2.0;
pub const RANSAC_ITERS: usize = 200;
const RHO_BIN: f64 = 2.0;
const THETA_BINS: usize = 180;
/// Largest along-line gap (px) inside one segment.
const RUN_GAP: f64 = 6.0;
/// Candidate band around a Hough peak: the bin half-width plus the RANSAC band.
const CANDIDATE_BAND: f64 = RHO_BIN / 2.0 + RANSAC_BAND + 1.0;

/// A Hough segment with the pixel centers that support it.
#[derive(Debug, Clone, PartialEq)]
pub struct Detected {
    pub seg: Segment,
    pub pixels: Vec<Point>,
}

/// Ink pixels of a raster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ink {
    pub width: usize,
    pub height: usize,
    pub mask: Vec<bool>,
}

impl Ink {
    pub fn count(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    pub fn is_ink(&self, x: usize, y: usize) -> bool {
        self.mask[y * self.width + x]
    }

    /// Pixel centers of all ink pixels in row-major order.
    pub fn points(&self) -> Vec<Point> {
        let mut out = Vec::new();
        for y in 0..self.height {
            for x in 0..self.width {
                if self.mask[y * self.width + x] {
                    out.push(Point::new(x as f64 + 0.5, y as f64 + 0.5));
                }
            }
        }
        out
    }
}

/// Otsu threshold over the 256-bin histogram: the `t` maximizing
/// between-class variance, dark class `v <= t`.
pub fn otsu_threshold(img: &Gray) -> Option<u8> {
    let mut hist = [0u64; 256];
    for &v in &img.data {
        hist[v as usize] += 1;
    }
    let total = img.data.len() as f64;
    if hist.iter().filter(|&&c| c > 0).count() < 2 {
        return None;
    }
    let sum_all: f64 = hist.iter().enumerate().map(|(i, &c)| i as f64 * c as f64).sum();
    let (mut w0, mut sum0) = (0.0, 0.0);
    let mut best = (f64::NEG_INFINITY, 0u8);
    for t in 0..255usize {
        w0 += hist[t] as f64;
        sum0 += t as f64 * hist[t] as f64;
        let w1 = total - w0;
        if w0 == 0.0 || w1 == 0.0 {
            continue;
        }
        let m0 = sum0 / w0;
        let m1 = (sum_all - sum0) / w1;
        let between = w0 * w1 * (m0 - m1) * (m0 - m1);
        if between > best.0 {
            best = (between, t as u8);
        }
    }
    Some(best.1)
}

/// Marks pixels at or below the Otsu threshold as ink. A single-valued image
/// is all ink when dark and empty otherwise.
pub fn binarize(img: &Gray) -> Result<Ink, ExtractError> {
    let mask: Vec<bool> = match otsu_threshold(img) {
        Some(t) => img.data.iter().map(|&v| v <= t).collect(),
        None => img.data.iter().map(|&v| v < 128).collect(),
    };
    let ink = Ink {
        width: img.width,
        height: img.height,
        mask,
    };
    if ink.count() == 0 {
        return Err(ExtractError::EmptyImage);
    }
    Ok(ink)
}

struct Accumulator {
    cos: Vec<f64>,
    sin: Vec<f64>,
    rho_max: f64,
    n_rho: usize,
    votes: Vec<u32>,
    dead: Vec<bool>,
}

impl Accumulator {
    fn new(width: usize, height: usize) -> Self {
        let rho_max = ((width * width + height * height) as f64).sqrt() + 2.0;
        let n_rho = (2.0 * rho_max / RHO_BIN).ceil() as usize + 1;
        let (sin, cos): (Vec<f64>, Vec<f64>) = (0..THETA_BINS)
            .map(|i| (i as f64).to_radians().sin_cos())
            .unzip();
        Self {
            cos,
            sin,
            rho_max,
            n_rho,
            votes: vec![0; THETA_BINS * n_rho],
            dead: vec![false; THETA_BINS * n_rho],
        }
    }

    fn rho_bin(&self, rho: f64) -> usize {
        (((rho + self.rho_max) / RHO_BIN).round() as usize).min(self.n_rho - 1)
    }

    fn vote(&mut self, p: Point, delta: i64) {
        for t in 0..THETA_BINS {
            let rho = p.x * self.cos[t] + p.y * self.sin[t];
            let k = t * self.n_rho + self.rho_bin(rho);
            self.votes[k] = (self.votes[k] as i64 + delta).max(0) as u32;
        }
    }

    /// Highest live bin; ties go to the lowest index.
    fn peak(&self) -> Option<(usize, usize, u32)> {
        let mut best: Option<(usize, u32)> = None;
        for (k, &v) in self.votes.iter().enumerate() {
            if !self.dead[k] && best.is_none_or(|b| v > b.1) {
                best = Some((k, v));
            }
        }
        best.map(|(k, v)| (k / self.n_rho, k % self.n_rho, v))
    }
}

/// Total-least-squares line through points: (centroid, unit direction).
pub fn fit_line(pts: &[Point]) -> (Point, Point) {
    let n = pts.len().max(1) as f64;
    let c = pts.iter().fold(Point::origin(), |a, &p| a + p) * (1.0 / n);
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for p in pts {
        let d = *p - c;
        sxx += d.x * d.x;
        sxy += d.x * d.y;
        syy += d.y * d.y;
    }
    let angle = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    (c, Point::from_angle(angle))
}

/// Distance from `p` to the line through `c` along the unit vector `dir`.
pub fn line_dist(p: Point, c: Point, dir: Point) -> f64 {
    (p - c).cross(dir).abs()
}

/// RANSAC line over `pts`, refit by total least squares on the inliers.
/// Returns the refined line and inlier indices.
pub fn ransac_line(pts: &[Point], rng: &mut ChaCha8Rng) -> Option<((Point, Point), Vec<usize>)> {
    if pts.len() < 2 {
        return None;
    }
    let mut best: Option<(usize, Point, Point)> = None;
    for _ in 0..RANSAC_ITERS {
        let i = rng.gen_range(0..pts.len());
        let j = rng.gen_range(0..pts.len());
        let d = pts[j] - pts[i];
        if d.norm() < 1.0 {
            continue;
        }
        let dir = d.normalized();
        let count = pts.iter().filter(|&&p| line_dist(p, pts[i], dir) <= RANSAC_BAND).count();
        if best.is_none_or(|b| count > b.0) {
            best = Some((count, pts[i], dir));
        }
    }
    let (_, c, dir) = best?;
    let inl: Vec<Point> = pts.iter().copied().filter(|&p| line_dist(p, c, dir) <= RANSAC_BAND).collect();
    let (c, dir) = fit_line(&inl);
    let idx: Vec<usize> = (0..pts.len()).filter(|&i| line_dist(pts[i], c, dir) <= RANSAC_BAND).collect();
    Some(((c, dir), idx))
}

/// Progressive Hough voting with RANSAC refinement, in pixel coordinates.
/// Each accepted run of inliers becomes a segment and its pixels stop voting.
/// `support_min` is the vote and inlier threshold, normally [`SUPPORT_MIN`].
pub fn hough_segments(ink: &Ink, support_min: usize, seed: u64) -> Vec<Detected> {
    let pts = ink.points();
    let mut live = vec![true; pts.len()];
    let mut acc = Accumulator::new(ink.width, ink.height);
    for &p in &pts {
        acc.vote(p, 1);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    while let Some((t, r, votes)) = acc.peak() {
        if (votes as usize) < support_min {
            break;
        }
        acc.dead[t * acc.n_rho + r] = true;
        let rho = r as f64 * RHO_BIN - acc.rho_max;
        let (c, s) = (acc.cos[t], acc.sin[t]);
        let cand: Vec<usize> = (0..pts.len())
            .filter(|&i| live[i] && (pts[i].x * c + pts[i].y * s - rho).abs() <= CANDIDATE_BAND)
            .collect();
        if cand.len() < support_min {
            continue;
        }
        let cpts: Vec<Point> = cand.iter().map(|&i| pts[i]).collect();
        let Some(((lc, dir), inl)) = ransac_line(&cpts, &mut rng) else {
            continue;
        };
        let mut proj: Vec<(f64, usize)> = inl.iter().map(|&k| ((cpts[k] - lc).dot(dir), cand[k])).collect();
        proj.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut runs: Vec<Vec<(f64, usize)>> = Vec::new();
        for q in proj {
            match runs.last_mut() {
                Some(run) if q.0 - run.last().expect("runs are non-empty").0 <= RUN_GAP => run.push(q),
                _ => runs.push(vec![q]),
            }
        }
        for run in runs {
            let (t0, t1) = (run[0].0, run[run.len() - 1].0);
            if run.len() < support_min || t1 - t0 < RUN_GAP {
                continue;
            }
            for &(_, i) in &run {
                live[i] = false;
                acc.vote(pts[i], -1);
            }
            out.push(Detected {
                seg: Segment::new(lc + dir * t0, lc + dir * t1, run.len()),
                pixels: run.iter().map(|&(_, i)| pts[i]).collect(),
            });
        }
    }
    out
}
