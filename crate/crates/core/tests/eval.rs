use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sketchbim::eval::{
    derive_gates, evaluate, hungarian_assign, pair_cost, pair_elements, score_snapshots, sentinel, Category, EvalError,
    Feature,
};
use sketchbim::{ArcGeom, Layout, Opening, Point, Wall};

fn p(x: f64, y: f64) -> Point {
    Point::new(x, y)
}

/// Exhaustive optimum over every permutation of the square-extended matrix.
/// Returns (real pair count, real total).
fn brute_force(cost: &[Vec<f64>]) -> (usize, f64) {
    let n = cost.len();
    let m = cost.first().map_or(0, Vec::len);
    let k = n.max(m);
    let big = sentinel(cost);
    let at = |i: usize, j: usize| if i < n && j < m && cost[i][j].is_finite() { Some(cost[i][j]) } else { None };
    let mut perm: Vec<usize> = (0..k).collect();
    let mut best: Option<(f64, usize, f64)> = None;
    permute(&mut perm, 0, &mut |perm| {
        let mut padded = 0.0;
        let mut real = 0.0;
        let mut count = 0;
        for (i, &j) in perm.iter().enumerate() {
            match at(i, j) {
                Some(c) => {
                    padded += c;
                    real += c;
                    count += 1;
                }
                None => padded += big,
            }
        }
        if best.is_none_or(|b| padded < b.0) {
            best = Some((padded, count, real));
        }
    });
    best.map_or((0, 0.0), |b| (b.1, b.2))
}

fn permute(v: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == v.len() {
        f(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute(v, k + 1, f);
        v.swap(k, i);
    }
}

#[test]
fn brute_force_oracle_agrees_on_worked_example() {
    let c = vec![vec![1.0, 2.0, 3.0], vec![2.0, 4.0, 6.0], vec![3.0, 6.0, 9.0]];
    assert_eq!(brute_force(&c), (3, 10.0));
    assert_eq!(hungarian_assign(&c).total, 10.0);
}

#[test]
fn hungarian_matches_exhaustive_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for trial in 0..1000 {
        let n = rng.gen_range(1..=6);
        let m = rng.gen_range(1..=6);
        let forbid = if trial % 3 == 0 { 0.3 } else { 0.0 };
        let cost: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                (0..m)
                    .map(|_| if rng.gen_bool(forbid) { f64::INFINITY } else { rng.gen_range(0..100) as f64 })
                    .collect()
            })
            .collect();
        let a = hungarian_assign(&cost);
        let (count, total) = brute_force(&cost);
        assert_eq!(a.pairs().count(), count, "trial {trial}: {cost:?}");
        assert_eq!(a.total, total, "trial {trial}: {cost:?}");
        let mut cols: Vec<usize> = a.pairs().map(|(_, c)| c).collect();
        cols.sort();
        cols.dedup();
        assert_eq!(cols.len(), count);
    }
}

fn plan() -> Layout {
    let mut l = Layout::new();
    let c = [p(0.0, 0.0), p(24.0, 0.0), p(24.0, 12.0), p(0.0, 12.0)];
    for i in 0..4 {
        l.walls.push(Wall::line(format!("wall{}", i + 1), c[i], c[(i + 1) % 4]));
    }
    l.walls.push(Wall::line("wall5", p(12.0, 0.0), p(12.0, 12.0)));
    l.doors.push(Opening::door("door1", "wall1", 6.0, 3.0));
    l.doors.push(Opening::door("door2", "wall5", 6.0, 3.0));
    l.windows.push(Opening::window("win1", "wall3", 6.0, 4.5));
    l.windows.push(Opening::window("win2", "wall3", 18.0, 4.5));
    l
}

#[test]
fn gates_scale_with_plan() {
    let mut l = Layout::new();
    for (i, len) in [10.0, 12.0, 14.0].iter().enumerate() {
        let y = i as f64 * 5.0;
        l.walls.push(Wall::line(format!("wall{}", i + 1), p(0.0, y), p(*len, y)));
    }
    let g = derive_gates(&l).walls.unwrap();
    assert_eq!(g.midpoint_max, 3.0);
    assert!((g.orientation_max - 10f64.to_radians()).abs() < 1e-12);

    let gt = plan();
    let mut doubled = gt.clone();
    for w in &mut doubled.walls {
        let [a, b] = w.endpoints();
        *w = Wall::line(w.id.clone(), a * 2.0, b * 2.0);
    }
    let g1 = derive_gates(&gt).walls.unwrap().midpoint_max;
    let g2 = derive_gates(&doubled).walls.unwrap().midpoint_max;
    assert_eq!(g2, 2.0 * g1);
    assert!(derive_gates(&Layout::new()).windows.is_none());
}

#[test]
fn identical_layouts_score_perfectly() {
    let r = evaluate(&plan(), &plan());
    for (_, m) in r.rows() {
        assert_eq!((m.f1, m.rmse_length, m.mae_midpoint), (1.0, 0.0, 0.0));
    }
}

#[test]
fn no_windows_on_either_side() {
    let mut gt = plan();
    gt.windows.clear();
    let r = evaluate(&gt, &gt);
    assert_eq!((r.windows.tp, r.windows.fp, r.windows.fn_), (0, 0, 0));
    assert!(r.windows.empty);
}

#[test]
fn short_id_pairs_by_id() {
    let gt = plan();
    let mut pred = plan();
    pred.doors[0].id = "d1".into();
    pred.doors[0].offset += 0.1;
    let ms = pair_elements(&pred, &gt);
    let doors = ms.iter().find(|m| m.category == Category::Doors).unwrap();
    assert!(doors.pairs.iter().any(|p| p.pred == "d1" && p.gt == "door1"));
}

#[test]
fn rotated_wall_is_unmatched() {
    let mut gt = Layout::new();
    gt.walls.push(Wall::line("wall1", p(0.0, 0.0), p(10.0, 0.0)));
    let mut pred = Layout::new();
    let dir = Point::from_angle(20f64.to_radians());
    pred.walls.push(Wall::line("wall1", p(5.0, 0.0) - dir * 5.0, p(5.0, 0.0) + dir * 5.0));
    let r = evaluate(&pred, &gt);
    assert_eq!((r.walls.tp, r.walls.fp, r.walls.fn_), (0, 1, 1));
}

#[test]
fn duplicates_match_one_to_one() {
    let mut gt = Layout::new();
    gt.walls.push(Wall::line("wall1", p(0.0, 0.0), p(10.0, 0.0)));
    let mut pred = Layout::new();
    pred.walls.push(Wall::line("a", p(0.0, 0.2), p(10.0, 0.2)));
    pred.walls.push(Wall::line("b", p(0.0, -0.5), p(10.0, -0.5)));
    let ms = pair_elements(&pred, &gt);
    assert_eq!(ms[0].pairs.len(), 1);
    assert_eq!(ms[0].pairs[0].pred, "a");
    assert_eq!(ms[0].unmatched_pred, vec!["b".to_string()]);
}

#[test]
fn arc_radius_gate() {
    let arc = |r: f64| ArcGeom { center: p(0.0, 0.0), radius: r, start_angle: 0.0, sweep: 1.0, ccw: true };
    let mut gt = Layout::new();
    gt.walls.push(Wall::arc("wall1", arc(10.0)));
    let mut pred = Layout::new();
    pred.walls.push(Wall::arc("wall1", arc(10.5)));
    assert_eq!(evaluate(&pred, &gt).walls.tp, 1);
    pred.walls[0] = Wall::line("wall1", arc(10.0).start(), arc(10.0).end());
    assert_eq!(evaluate(&pred, &gt).walls.tp, 0);
}

#[test]
fn host_agreement_is_reported() {
    let gt = plan();
    let mut pred = plan();
    pred.walls[0] = Wall::line("wall1", p(0.0, 0.0), p(12.0, 0.0));
    pred.walls.push(Wall::line("wall6", p(12.0, 0.0), p(24.0, 0.0)));
    pred.doors[0].host = "wall1".into();
    let ms = pair_elements(&pred, &gt);
    let doors = &ms[1];
    assert_eq!(doors.pairs[0].host_agrees, Some(false));
    assert_eq!(doors.pairs[1].host_agrees, Some(true));
}

#[test]
fn trace_deltas_end_at_zero() {
    let gt = plan();
    let mut first = plan();
    first.walls.pop();
    first.doors.pop();
    let t = score_snapshots(&[first, gt.clone()], &gt).unwrap();
    assert!(t.rows[0].metrics.walls.f1 < 1.0);
    assert_eq!(t.rows[0].metrics.windows, t.rows[1].metrics.windows);
    for d in t.last().deltas {
        assert_eq!((d.d_f1, d.d_rmse, d.d_mae), (0.0, 0.0, 0.0));
    }
    let csv = t.to_csv();
    assert!(csv.starts_with("iteration,category,tp,fp,fn,precision,recall,f1,rmse,mae,d_f1,d_rmse,d_mae\n"));
    assert_eq!(csv.lines().count(), 1 + 2 * 4);
    assert_eq!(score_snapshots(&[], &gt), Err(EvalError::EmptyLog));
}

fn jittered(seed: u64, shuffle: bool) -> (Layout, Layout) {
    let gt = plan();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pred = gt.clone();
    for (i, w) in pred.walls.iter_mut().enumerate() {
        let d = p(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5));
        w.translate(d);
        w.id = format!("x{}_{i}", rng.gen_range(0..1000));
    }
    if rng.gen_bool(0.5) {
        pred.walls.pop();
    }
    if shuffle {
        pred.walls.reverse();
        pred.doors.reverse();
        pred.windows.reverse();
    }
    (pred, gt)
}

proptest! {
    #[test]
    fn pairs_respect_category_and_gates(seed in any::<u64>()) {
        let (pred, gt) = jittered(seed, false);
        let gates = derive_gates(&gt);
        for m in pair_elements(&pred, &gt) {
            let g = gates.get(m.category).unwrap();
            let (pf, _) = sketchbim::eval::features(&pred, m.category);
            let (gf, _) = sketchbim::eval::features(&gt, m.category);
            let find = |fs: &[Feature], id: &str| fs.iter().find(|f| f.id == id).cloned();
            for pair in &m.pairs {
                let a = find(&pf, &pair.pred);
                let b = find(&gf, &pair.gt);
                prop_assert!(a.is_some() && b.is_some(), "pair crosses categories");
                prop_assert!(pair_cost(&g, &a.unwrap(), &b.unwrap()).is_some());
            }
        }
    }

    #[test]
    fn metrics_ignore_element_order(seed in any::<u64>()) {
        let (a, gt) = jittered(seed, false);
        let (b, _) = jittered(seed, true);
        let ra = evaluate(&a, &gt);
        let rb = evaluate(&b, &gt);
        for ((_, x), (_, y)) in ra.rows().iter().zip(rb.rows().iter()) {
            prop_assert_eq!((x.tp, x.fp, x.fn_), (y.tp, y.fp, y.fn_));
            prop_assert!((x.rmse_length - y.rmse_length).abs() < 1e-9);
            prop_assert!((x.mae_midpoint - y.mae_midpoint).abs() < 1e-9);
        }
    }

    #[test]
    fn micro_f1_between_categories(seed in any::<u64>()) {
        let (pred, gt) = jittered(seed, false);
        let r = evaluate(&pred, &gt);
        let f = [r.walls.f1, r.doors.f1, r.windows.f1];
        let lo = f.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = f.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(r.overall.f1 >= lo - 1e-12 && r.overall.f1 <= hi + 1e-12);
    }
}

mod hungarian {
    use sketchbim::eval::hungarian::*;

    #[test]
    fn worked_example() {
        let c = vec![vec![1.0, 2.0, 3.0], vec![2.0, 4.0, 6.0], vec![3.0, 6.0, 9.0]];
        let a = hungarian_assign(&c);
        assert_eq!(a.rows, vec![Some(2), Some(1), Some(0)]);
        assert_eq!(a.total, 10.0);
    }

    #[test]
    fn diagonal_dominant_is_identity() {
        let c: Vec<Vec<f32>> = (0..4)
            .map(|i| (0..4).map(|j| if i == j { 0.1 } else { 5.0 }).collect())
            .collect();
        assert_eq!(hungarian_assign(&c).rows, vec![Some(0), Some(1), Some(2), Some(3)]);
    }

    #[test]
    fn all_forbidden() {
        let c = vec![vec![f64::INFINITY; 3]; 2];
        let a = hungarian_assign(&c);
        assert_eq!(a.rows, vec![None, None]);
        assert_eq!(a.total, 0.0);
    }

    #[test]
    fn rectangular() {
        let c = vec![vec![4.0, 1.0], vec![2.0, 8.0], vec![3.0, 0.5]];
        let a = hungarian_assign(&c);
        assert_eq!(a.pairs().count(), 2);
        assert_eq!(a.total, 2.5);
    }
}

mod eval_unit {
    use sketchbim::eval::*;

    #[test]
    fn detection_examples() {
        let (p, r, f1) = detection_metrics(5, 0, 1);
        assert_eq!(p, 1.0);
        assert!((r - 0.8333).abs() < 1e-4);
        assert!((f1 - 0.9091).abs() < 1e-4);
        assert_eq!(detection_metrics(0, 2, 3), (0.0, 0.0, 0.0));
        assert_eq!(detection_metrics(0, 0, 0), (1.0, 1.0, 1.0));
    }

    #[test]
    fn geometry_examples() {
        let (rmse, _) = geometry_metrics(&[3.0, 4.0], &[0.0, 0.0]).unwrap();
        assert!((rmse - 3.5355).abs() < 1e-4);
        let (_, mae) = geometry_metrics(&[0.0; 3], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(mae, 2.0);
        assert!(geometry_metrics(&[], &[]).is_none());
    }
}
