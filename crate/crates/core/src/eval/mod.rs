//! Scoring a predicted layout against ground truth: gated one-to-one
//! pairing per category, detection metrics and geometric error.

pub mod hungarian;

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use hungarian::{hungarian_assign, sentinel, Assignment};

pub use crate::ids::normalize_id;
use crate::geometry::orientation_diff;
use crate::ids::ElementClass;
use crate::layout::{Layout, OpeningClass};
use crate::Point;

/// Cost weights for midpoint, length and orientation terms.
pub const COST_WEIGHTS: (f64, f64, f64) = (0.5, 0.3, 0.2);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Walls,
    Doors,
    Windows,
}

impl Category {
    pub const ALL: [Category; 3] = [Category::Walls, Category::Doors, Category::Windows];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Walls => "walls",
            Category::Doors => "doors",
            Category::Windows => "windows",
        }
    }

    fn class(self) -> ElementClass {
        match self {
            Category::Walls => ElementClass::Wall,
            Category::Doors => ElementClass::Door,
            Category::Windows => ElementClass::Window,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CategoryGates {
    /// Radians.
    pub orientation_max: f64,
    /// Feet.
    pub midpoint_max: f64,
    pub length_ratio_max: f64,
    pub radius_ratio_max: f64,
}

/// Tunables behind [`derive_gates`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateConfig {
    pub orientation_deg: f64,
    pub midpoint_frac: f64,
    pub length_ratio_max: f64,
    pub radius_ratio_max: f64,
}

impl Default for GateConfig {
    fn default() -> Self {
        Self {
            orientation_deg: 10.0,
            midpoint_frac: 0.25,
            length_ratio_max: 0.5,
            radius_ratio_max: 0.2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Gates {
    pub walls: Option<CategoryGates>,
    pub doors: Option<CategoryGates>,
    pub windows: Option<CategoryGates>,
}

impl Gates {
    pub fn get(&self, c: Category) -> Option<CategoryGates> {
        match c {
            Category::Walls => self.walls,
            Category::Doors => self.doors,
            Category::Windows => self.windows,
        }
    }
}

/// Geometry of one element as seen by the matcher.
#[derive(Debug, Clone, PartialEq)]
pub struct Feature {
    pub id: String,
    pub mid: Point,
    /// Wall length, or span along the host for openings.
    pub length: f64,
    /// Undirected orientation in `[0, π)`.
    pub orientation: f64,
    pub radius: Option<f64>,
    /// Host wall id, openings only.
    pub host: Option<String>,
}

/// Features of one category. Openings whose host is missing have no world
/// position and are returned separately.
pub fn features(layout: &Layout, cat: Category) -> (Vec<Feature>, Vec<String>) {
    let mut out = Vec::new();
    let mut lost = Vec::new();
    match cat {
        Category::Walls => {
            for w in &layout.walls {
                out.push(Feature {
                    id: w.id.clone(),
                    mid: w.midpoint(),
                    length: w.length(),
                    orientation: w.orientation(),
                    radius: w.as_arc().map(|a| a.radius),
                    host: None,
                });
            }
        }
        Category::Doors | Category::Windows => {
            let class = if cat == Category::Doors { OpeningClass::Door } else { OpeningClass::Window };
            for o in layout.openings_of(class) {
                match layout.wall(&o.host) {
                    Some(h) => out.push(Feature {
                        id: o.id.clone(),
                        mid: h.point_at_arclength(o.offset),
                        length: o.width,
                        orientation: h.tangent_at_arclength(o.offset).angle().rem_euclid(std::f64::consts::PI),
                        radius: None,
                        host: Some(o.host.clone()),
                    }),
                    None => lost.push(o.id.clone()),
                }
            }
        }
    }
    (out, lost)
}

fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { (v[n / 2 - 1] + v[n / 2]) / 2.0 })
}

/// Gates scaled by ground-truth lengths: walls by their median length, and
/// openings by the median wall length too, since a misplaced door is off by
/// a fraction of its wall rather than of its own width.
pub fn derive_gates(gt: &Layout) -> Gates {
    derive_gates_with(gt, &GateConfig::default())
}

pub fn derive_gates_with(gt: &Layout, cfg: &GateConfig) -> Gates {
    let median_len = |c: Category| median(features(gt, c).0.iter().map(|f| f.length).collect());
    let wall_median = median_len(Category::Walls);
    let make = |c: Category| {
        median_len(c).map(|own| CategoryGates {
            orientation_max: cfg.orientation_deg.to_radians(),
            midpoint_max: cfg.midpoint_frac * if c == Category::Walls { own } else { wall_median.unwrap_or(own) },
            length_ratio_max: cfg.length_ratio_max,
            radius_ratio_max: cfg.radius_ratio_max,
        })
    };
    Gates {
        walls: make(Category::Walls),
        doors: make(Category::Doors),
        windows: make(Category::Windows),
    }
}

/// Gated pair cost, `None` when any gate fails.
pub fn pair_cost(g: &CategoryGates, p: &Feature, q: &Feature) -> Option<f64> {
    let d = p.mid.dist(q.mid);
    let dl = (p.length - q.length).abs() / q.length.max(1e-12);
    let dth = orientation_diff(p.orientation, q.orientation);
    if d > g.midpoint_max + 1e-9 || dl > g.length_ratio_max + 1e-9 || dth > g.orientation_max + 1e-9 {
        return None;
    }
    match (p.radius, q.radius) {
        (Some(rp), Some(rq)) if (rp - rq).abs() / rq > g.radius_ratio_max + 1e-9 => return None,
        (Some(_), None) | (None, Some(_)) => return None,
        _ => {}
    }
    let (w1, w2, w3) = COST_WEIGHTS;
    Some(w1 * d / g.midpoint_max + w2 * dl + w3 * dth / g.orientation_max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pair {
    pub pred: String,
    pub gt: String,
    pub cost: f64,
    /// Predicted minus ground-truth length.
    pub delta_length: f64,
    pub midpoint_distance: f64,
    /// Openings: whether the predicted host maps to the ground-truth host
    /// through the wall matching.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub host_agrees: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matching {
    pub category: Category,
    pub pairs: Vec<Pair>,
    pub unmatched_pred: Vec<String>,
    pub unmatched_gt: Vec<String>,
}

fn match_category(pred: &Layout, gt: &Layout, cat: Category, gates: Option<CategoryGates>) -> Matching {
    let (pf, plost) = features(pred, cat);
    let (gf, glost) = features(gt, cat);
    let mut m = Matching {
        category: cat,
        pairs: Vec::new(),
        unmatched_pred: plost,
        unmatched_gt: glost,
    };
    let Some(g) = gates else {
        m.unmatched_pred.extend(pf.iter().map(|f| f.id.clone()));
        m.unmatched_gt.extend(gf.iter().map(|f| f.id.clone()));
        return m;
    };
    let mk_pair = |p: &Feature, q: &Feature, cost: f64| Pair {
        pred: p.id.clone(),
        gt: q.id.clone(),
        cost,
        delta_length: p.length - q.length,
        midpoint_distance: p.mid.dist(q.mid),
        host_agrees: None,
    };

    // ID-first: unique normalized keys on both sides that also pass the gates
    let key = |f: &Feature| normalize_id(&f.id).ok().filter(|(c, _)| *c == cat.class());
    let mut pcount: HashMap<(ElementClass, u64), usize> = HashMap::new();
    let mut gcount: HashMap<(ElementClass, u64), usize> = HashMap::new();
    for f in &pf {
        if let Some(k) = key(f) {
            *pcount.entry(k).or_default() += 1;
        }
    }
    for f in &gf {
        if let Some(k) = key(f) {
            *gcount.entry(k).or_default() += 1;
        }
    }
    let mut pused = vec![false; pf.len()];
    let mut gused = vec![false; gf.len()];
    for (i, p) in pf.iter().enumerate() {
        let Some(k) = key(p) else { continue };
        if pcount[&k] != 1 || gcount.get(&k) != Some(&1) {
            continue;
        }
        let j = gf.iter().position(|q| key(q) == Some(k)).expect("counted");
        if let Some(c) = pair_cost(&g, p, &gf[j]) {
            pused[i] = true;
            gused[j] = true;
            m.pairs.push(mk_pair(p, &gf[j], c));
        }
    }

    // geometric fallback on the remainder
    let pi: Vec<usize> = (0..pf.len()).filter(|&i| !pused[i]).collect();
    let gj: Vec<usize> = (0..gf.len()).filter(|&j| !gused[j]).collect();
    let cost: Vec<Vec<f64>> = pi
        .iter()
        .map(|&i| gj.iter().map(|&j| pair_cost(&g, &pf[i], &gf[j]).unwrap_or(f64::INFINITY)).collect())
        .collect();
    let a = hungarian_assign(&cost);
    for (r, c) in a.pairs() {
        let (i, j) = (pi[r], gj[c]);
        pused[i] = true;
        gused[j] = true;
        m.pairs.push(mk_pair(&pf[i], &gf[j], cost[r][c]));
    }
    m.unmatched_pred.extend((0..pf.len()).filter(|&i| !pused[i]).map(|i| pf[i].id.clone()));
    m.unmatched_gt.extend((0..gf.len()).filter(|&j| !gused[j]).map(|j| gf[j].id.clone()));
    m.pairs.sort_by(|a, b| a.pred.cmp(&b.pred));
    m.unmatched_pred.sort();
    m.unmatched_gt.sort();
    m
}

/// Pairs walls, doors and windows separately. Opening pairs record whether
/// their hosts correspond under the wall matching.
pub fn pair_elements(pred: &Layout, gt: &Layout) -> Vec<Matching> {
    pair_elements_with(pred, gt, &derive_gates(gt))
}

pub fn pair_elements_with(pred: &Layout, gt: &Layout, gates: &Gates) -> Vec<Matching> {
    let walls = match_category(pred, gt, Category::Walls, gates.walls);
    let wall_map: HashMap<&str, &str> = walls.pairs.iter().map(|p| (p.pred.as_str(), p.gt.as_str())).collect();
    let mut out = vec![walls.clone()];
    for cat in [Category::Doors, Category::Windows] {
        let mut m = match_category(pred, gt, cat, gates.get(cat));
        for p in &mut m.pairs {
            let ph = pred.opening(&p.pred).map(|(_, o)| o.host.as_str());
            let gh = gt.opening(&p.gt).map(|(_, o)| o.host.as_str());
            p.host_agrees = Some(ph.and_then(|h| wall_map.get(h).copied()) == gh);
        }
        out.push(m);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CategoryMetrics {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub rmse_length: f64,
    pub mae_midpoint: f64,
    /// No matched pairs: the geometric errors are reported as 0.
    pub empty: bool,
}

/// Precision, recall and F1 with the empty-denominator conventions
/// P = 1 when nothing was predicted and R = 1 when nothing was expected.
pub fn detection_metrics(tp: usize, fp: usize, fn_: usize) -> (f64, f64, f64) {
    let p = if tp + fp == 0 { 1.0 } else { tp as f64 / (tp + fp) as f64 };
    let r = if tp + fn_ == 0 { 1.0 } else { tp as f64 / (tp + fn_) as f64 };
    let f1 = if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };
    (p, r, f1)
}

/// Root-mean-square of length deviations and mean midpoint displacement.
/// Returns `None` for an empty pair list.
pub fn geometry_metrics(delta_lengths: &[f64], midpoint_distances: &[f64]) -> Option<(f64, f64)> {
    if delta_lengths.is_empty() {
        return None;
    }
    let rmse = (delta_lengths.iter().map(|d| d * d).sum::<f64>() / delta_lengths.len() as f64).sqrt();
    let mae = midpoint_distances.iter().map(|d| d.abs()).sum::<f64>() / midpoint_distances.len().max(1) as f64;
    Some((rmse, mae))
}

fn metrics_of(pairs: &[&Pair], fp: usize, fn_: usize) -> CategoryMetrics {
    let tp = pairs.len();
    let (precision, recall, f1) = detection_metrics(tp, fp, fn_);
    let dl: Vec<f64> = pairs.iter().map(|p| p.delta_length).collect();
    let dp: Vec<f64> = pairs.iter().map(|p| p.midpoint_distance).collect();
    let geo = geometry_metrics(&dl, &dp);
    CategoryMetrics {
        tp,
        fp,
        fn_,
        precision,
        recall,
        f1,
        rmse_length: geo.map_or(0.0, |g| g.0),
        mae_midpoint: geo.map_or(0.0, |g| g.1),
        empty: geo.is_none(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub walls: CategoryMetrics,
    pub doors: CategoryMetrics,
    pub windows: CategoryMetrics,
    /// Micro average: TP/FP/FN and geometric errors pooled over categories.
    pub overall: CategoryMetrics,
}

impl MetricsReport {
    pub fn get(&self, c: Category) -> &CategoryMetrics {
        match c {
            Category::Walls => &self.walls,
            Category::Doors => &self.doors,
            Category::Windows => &self.windows,
        }
    }

    /// `(name, metrics)` for the three categories then `overall`.
    pub fn rows(&self) -> [(&'static str, &CategoryMetrics); 4] {
        [("walls", &self.walls), ("doors", &self.doors), ("windows", &self.windows), ("overall", &self.overall)]
    }
}

pub fn report_from_matchings(ms: &[Matching]) -> MetricsReport {
    let per = |c: Category| {
        let m = ms.iter().find(|m| m.category == c).expect("every category is matched");
        metrics_of(&m.pairs.iter().collect::<Vec<_>>(), m.unmatched_pred.len(), m.unmatched_gt.len())
    };
    let all: Vec<&Pair> = ms.iter().flat_map(|m| m.pairs.iter()).collect();
    let fp = ms.iter().map(|m| m.unmatched_pred.len()).sum();
    let fn_ = ms.iter().map(|m| m.unmatched_gt.len()).sum();
    MetricsReport {
        walls: per(Category::Walls),
        doors: per(Category::Doors),
        windows: per(Category::Windows),
        overall: metrics_of(&all, fp, fn_),
    }
}

/// Pairs and scores a prediction in one step.
pub fn evaluate(pred: &Layout, gt: &Layout) -> MetricsReport {
    report_from_matchings(&pair_elements(pred, gt))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Deltas {
    pub d_f1: f64,
    pub d_rmse: f64,
    pub d_mae: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRow {
    pub iteration: usize,
    pub metrics: MetricsReport,
    /// Current minus final, in `rows()` order.
    pub deltas: [Deltas; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub rows: Vec<IterationRow>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("session log has no layout snapshots")]
    EmptyLog,
}

/// Scores every snapshot of a session against ground truth.
pub fn score_snapshots(snapshots: &[Layout], gt: &Layout) -> Result<IterationTrace, EvalError> {
    if snapshots.is_empty() {
        return Err(EvalError::EmptyLog);
    }
    let gates = derive_gates(gt);
    let reports: Vec<MetricsReport> = snapshots
        .iter()
        .map(|s| report_from_matchings(&pair_elements_with(s, gt, &gates)))
        .collect();
    let last = reports.last().expect("non-empty").clone();
    let rows = reports
        .into_iter()
        .enumerate()
        .map(|(i, r)| {
            let fin = last.rows();
            let cur = r.rows();
            let deltas = std::array::from_fn(|k| Deltas {
                d_f1: cur[k].1.f1 - fin[k].1.f1,
                d_rmse: cur[k].1.rmse_length - fin[k].1.rmse_length,
                d_mae: cur[k].1.mae_midpoint - fin[k].1.mae_midpoint,
            });
            IterationRow {
                iteration: i,
                metrics: r,
                deltas,
            }
        })
        .collect();
    Ok(IterationTrace { rows })
}

impl IterationTrace {
    pub const CSV_HEADER: &'static str = "iteration,category,tp,fp,fn,precision,recall,f1,rmse,mae,d_f1,d_rmse,d_mae";

    pub fn to_csv(&self) -> String {
        let mut s = String::from(Self::CSV_HEADER);
        s.push('\n');
        for row in &self.rows {
            for ((name, m), d) in row.metrics.rows().iter().zip(row.deltas.iter()) {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{:.4},{:.4},{:.4},{:.4},{:.4},{:.4},{:.4},{:.4}",
                    row.iteration,
                    name,
                    m.tp,
                    m.fp,
                    m.fn_,
                    m.precision,
                    m.recall,
                    m.f1,
                    m.rmse_length,
                    m.mae_midpoint,
                    d.d_f1,
                    d.d_rmse,
                    d.d_mae
                );
            }
        }
        s
    }

    pub fn last(&self) -> &IterationRow {
        self.rows.last().expect("traces are never empty")
    }
}
