use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sketchbim::extract::merge::merge_segments;
use sketchbim::extract::raster::hough_segments;
use sketchbim::extract::*;
use sketchbim::gen::{p10_analog, render_raster, render_strokes, suite, three_room_plan, PlanSpec, RenderOptions};
use sketchbim::geometry::orientation_diff;
use sketchbim::validate::validate;
use sketchbim::{Layout, Point};

fn p(x: f64, y: f64) -> Point {
    Point::new(x, y)
}

fn frame0() -> Frame {
    Frame {
        origin: p(0.0, 0.0),
        skew: 0.0,
        sx: 1.0,
        sy: 1.0,
    }
}

fn callout(p1: Point, p2: Point, length: f64) -> DimensionCallout {
    DimensionCallout { p1, p2, length }
}

fn extract(b: &SketchBundle) -> Extraction {
    extract_layout(b, &ExtractOptions::default()).expect("extraction succeeds")
}

fn strokes(spec: &PlanSpec, opts: RenderOptions) -> Extraction {
    extract(&render_strokes(&spec.build(), opts))
}

// scale

#[test]
fn consistent_callouts_are_isotropic() {
    let cs = [callout(p(0.0, 0.0), p(100.0, 0.0), 10.0), callout(p(0.0, 0.0), p(0.0, 200.0), 20.0)];
    let (sx, sy) = estimate_scale(&cs, &frame0(), 20.0).unwrap();
    assert!((sx - 0.1).abs() < 1e-12 && (sy - 0.1).abs() < 1e-12);
}

/// Closed-form minimizer of (100 sx - 10)^2 + (100 sy - 12)^2 + lambda (sx - sy)^2.
fn scale_oracle(lambda: f64) -> (f64, f64) {
    let (a, b) = (1e4 + lambda, -lambda);
    let det = a * a - b * b;
    ((1000.0 * a - b * 1200.0) / det, (a * 1200.0 - b * 1000.0) / det)
}

#[test]
fn conflicting_callouts_follow_lambda() {
    let cs = [callout(p(0.0, 0.0), p(100.0, 0.0), 10.0), callout(p(0.0, 0.0), p(0.0, 100.0), 12.0)];
    for lambda in [0.0, 1e-3, 20.0, 1e4, 1e12] {
        let (sx, sy) = estimate_scale(&cs, &frame0(), lambda).unwrap();
        let (ox, oy) = scale_oracle(lambda);
        assert!((sx - ox).abs() < 1e-9 && (sy - oy).abs() < 1e-9, "lambda {lambda}");
    }
    let (sx, sy) = estimate_scale(&cs, &frame0(), 0.0).unwrap();
    assert!((sx - 0.1).abs() < 1e-12 && (sy - 0.12).abs() < 1e-12);
    let (sx, sy) = estimate_scale(&cs, &frame0(), 1e12).unwrap();
    assert!((sx - 0.11).abs() < 1e-6 && (sy - 0.11).abs() < 1e-6);
}

#[test]
fn no_callouts_no_scale() {
    assert_eq!(estimate_scale(&[], &frame0(), 10.0), Err(ExtractError::NoScaleAnnotation));
}

#[test]
fn assumed_scale_skips_callouts() {
    let mut b = render_strokes(&three_room_plan().build(), RenderOptions::default());
    b.callouts.clear();
    let err = extract_layout(&b, &ExtractOptions::default()).unwrap_err();
    assert_eq!(err.stage, "scale");
    let opts = ExtractOptions {
        assume_scale: Some(0.125),
        ..Default::default()
    };
    let x = extract_layout(&b, &opts).unwrap();
    assert_eq!(x.layout.walls.len(), 10);
}

// skew

fn skew_of(spec: &PlanSpec, deg: f64) -> f64 {
    let x = strokes(
        spec,
        RenderOptions {
            rotation: deg.to_radians(),
            ..Default::default()
        },
    );
    x.frame.skew.to_degrees()
}

#[test]
fn axis_aligned_plan_has_no_skew() {
    assert!(skew_of(&three_room_plan(), 0.0).abs() <= 0.1);
}

#[test]
fn rotated_plan_skew_recovered() {
    assert!((skew_of(&three_room_plan(), 7.0) - 7.0).abs() <= 0.5);
}

#[test]
fn diagonal_plan_keeps_its_diagonals() {
    let diamond = PlanSpec::new("diamond")
        .polygon(&[(0.0, 0.0), (15.0, 15.0), (0.0, 30.0), (-15.0, 15.0)])
        .line((0.0, 0.0), (0.0, 30.0));
    assert!(skew_of(&diamond, 0.0).abs() < 1e-9);
    let x = strokes(&diamond, RenderOptions::default());
    let diag = x
        .layout
        .walls
        .iter()
        .filter(|w| orientation_diff(w.orientation(), std::f64::consts::FRAC_PI_4) < 1e-3 || orientation_diff(w.orientation(), 3.0 * std::f64::consts::FRAC_PI_4) < 1e-3)
        .count();
    assert_eq!(diag, 4);
}

// segments

fn ink_of(img: &Gray) -> Ink {
    binarize(img).unwrap()
}

fn hline(img: &mut Gray, x0: usize, x1: usize, y: usize) {
    for x in x0..=x1 {
        for dy in 0..3 {
            img.set(x, y + dy, 0);
        }
    }
}

fn vline(img: &mut Gray, x: usize, y0: usize, y1: usize) {
    for y in y0..=y1 {
        for dx in 0..3 {
            img.set(x + dx, y, 0);
        }
    }
}

#[test]
fn clean_stroke_is_one_segment() {
    let mut img = Gray::new(260, 60, 255);
    hline(&mut img, 30, 229, 29);
    let segs = hough_segments(&ink_of(&img), 20, 0);
    assert_eq!(segs.len(), 1);
    let s = segs[0].seg;
    let (l, r) = if s.a.x < s.b.x { (s.a, s.b) } else { (s.b, s.a) };
    // true centerline y = 30, x from 30 to 229
    assert!(l.dist(p(30.0, 30.0)) <= 2.0 && r.dist(p(229.0, 30.0)) <= 2.0, "{l:?} {r:?}");
}

#[test]
fn plus_sign_splits_into_four() {
    let mut img = Gray::new(240, 240, 255);
    hline(&mut img, 20, 219, 119);
    vline(&mut img, 119, 20, 219);
    let segs: Vec<Segment> = hough_segments(&ink_of(&img), 20, 0).into_iter().map(|d| d.seg).collect();
    assert_eq!(segs.len(), 2);
    assert_eq!(split_at_junctions(&segs, 2.0).len(), 4);
}

#[test]
fn sparse_noise_has_no_segments() {
    for seed in 0..5 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut img = Gray::new(200, 200, 255);
        for y in 0..200 {
            for x in 0..200 {
                if rng.gen::<f64>() < 0.01 {
                    img.set(x, y, 0);
                }
            }
        }
        assert!(hough_segments(&ink_of(&img), 20, seed).is_empty(), "seed {seed}");
    }
}

// orientation clustering

fn noisy_angles(modes: &[f64], n: usize, sigma_deg: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = rand_distr::Normal::new(0.0, sigma_deg).unwrap();
    modes
        .iter()
        .flat_map(|&m| (0..n).map(move |_| m).collect::<Vec<_>>())
        .map(|m| (m + rand_distr::Distribution::sample(&normal, &mut rng)).to_radians().rem_euclid(std::f64::consts::PI))
        .collect()
}

#[test]
fn single_direction_is_one_cluster() {
    assert_eq!(cluster_orientations(&vec![0.0; 20]).unwrap().k, 1);
}

#[test]
fn two_directions_two_clusters() {
    assert_eq!(cluster_orientations(&noisy_angles(&[0.0, 90.0], 20, 1.0, 3)).unwrap().k, 2);
}

#[test]
fn four_directions_four_clusters() {
    assert_eq!(cluster_orientations(&noisy_angles(&[0.0, 30.0, 60.0, 90.0], 15, 1.0, 5)).unwrap().k, 4);
}

// full pipeline

#[test]
fn three_room_plan_counts() {
    let x = strokes(&three_room_plan(), RenderOptions::default());
    let l = &x.layout;
    assert_eq!((l.walls.len(), l.rooms.len(), l.doors.len(), l.windows.len()), (10, 3, 3, 4));
    assert!(x.warnings.is_empty(), "{:?}", x.warnings);
    assert!(x.summary.contains("rooms: 3"));
}

#[test]
fn three_room_plan_from_raster() {
    let x = extract(&render_raster(&three_room_plan().build(), RenderOptions::default()));
    assert_eq!((x.layout.walls.len(), x.layout.rooms.len()), (10, 3));
}

#[test]
fn empty_bundle_fails_at_binarize() {
    let b = SketchBundle {
        raster: None,
        strokes: None,
        callouts: Vec::new(),
        labels: Vec::new(),
        swings: Vec::new(),
        origin: None,
    };
    assert_eq!(extract_layout(&b, &ExtractOptions::default()).unwrap_err().stage, "binarize");
    let blank = SketchBundle {
        raster: Some(RasterDoc::encode(&Gray::new(40, 40, 255))),
        ..b
    };
    let e = extract_layout(&blank, &ExtractOptions::default()).unwrap_err();
    assert_eq!((e.stage.as_str(), e.error), ("binarize", ExtractError::EmptyImage));
}

#[test]
fn p10_analog_counts_match_ground_truth() {
    let (init, gt) = p10_analog();
    let g = gt.build();
    assert_eq!((g.walls.len(), g.doors.len(), g.windows.len(), g.rooms.len()), (15, 5, 8, 5));
    assert_eq!(g.walls.iter().filter(|w| w.is_arc()).count(), 1);
    let x = strokes(&gt, RenderOptions::default());
    let l = &x.layout;
    assert_eq!((l.walls.len(), l.doors.len(), l.windows.len(), l.rooms.len()), (15, 5, 8, 5));
    // the sketch differs from ground truth but keeps the element counts
    let i = strokes(&init, RenderOptions::default()).layout;
    assert_eq!((i.walls.len(), i.doors.len(), i.windows.len(), i.rooms.len()), (15, 5, 8, 5));
}

#[test]
fn clean_suite_extracts_exactly() {
    for plan in suite() {
        let gt = plan.spec.build();
        let x = strokes(
            &plan.spec,
            RenderOptions {
                rotation: plan.rotation_deg.to_radians(),
                ..Default::default()
            },
        );
        let m = sketchbim::eval::evaluate(&x.layout, &gt);
        assert_eq!(m.overall.f1, 1.0, "{}", plan.spec.name);
        assert!(m.walls.rmse_length < 0.05, "{}", plan.spec.name);
        assert_eq!(x.layout.rooms.len(), gt.rooms.len(), "{}", plan.spec.name);
    }
}

#[test]
fn summary_is_deterministic() {
    let b = render_strokes(&three_room_plan().build(), RenderOptions::default());
    assert_eq!(extract(&b).summary, extract(&b).summary);
    assert_eq!(extract(&b).layout, extract(&b).layout);
}

// invariants

fn wall_angles(l: &Layout) -> Vec<f64> {
    let mut a: Vec<f64> = l.walls.iter().map(|w| w.orientation().to_degrees()).collect();
    a.sort_by(f64::total_cmp);
    a
}

/// Sample points of a fine grid that lie inside two rooms at once.
fn overlap_cells(l: &Layout) -> usize {
    let Some((lo, hi)) = l.bounds() else { return 0 };
    let inside = |poly: &[Point], q: Point| {
        let mut c = false;
        for i in 0..poly.len() {
            let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
            if (a.y > q.y) != (b.y > q.y) && q.x < a.x + (q.y - a.y) / (b.y - a.y) * (b.x - a.x) {
                c = !c;
            }
        }
        c
    };
    let step = 0.25;
    let mut over = 0;
    let mut y = lo.y + step * 0.37;
    while y < hi.y {
        let mut x = lo.x + step * 0.61;
        while x < hi.x {
            if l.rooms.iter().filter(|r| inside(&r.polygon, p(x, y))).count() > 1 {
                over += 1;
            }
            x += step;
        }
        y += step;
    }
    over
}

fn signed_area(poly: &[Point]) -> f64 {
    (0..poly.len()).map(|i| poly[i].cross(poly[(i + 1) % poly.len()])).sum::<f64>() / 2.0
}

#[test]
fn rooms_are_ccw_and_disjoint() {
    for plan in suite() {
        let x = strokes(
            &plan.spec,
            RenderOptions {
                rotation: plan.rotation_deg.to_radians(),
                jitter_px: 1.0,
                seed: 7,
                ..Default::default()
            },
        );
        for r in &x.layout.rooms {
            assert!(signed_area(&r.polygon) > 0.0, "{} {}", plan.spec.name, r.id);
        }
        assert_eq!(overlap_cells(&x.layout), 0, "{}", plan.spec.name);
    }
}

#[test]
fn violations_are_reported() {
    for plan in suite() {
        for seed in 0..3 {
            let b = render_strokes(
                &plan.spec.build(),
                RenderOptions {
                    jitter_px: 2.0,
                    seed,
                    ..Default::default()
                },
            );
            let Ok(x) = extract_layout(&b, &ExtractOptions::default()) else { continue };
            for v in validate(&x.layout).violations {
                assert!(x.warnings.iter().any(|w| w.contains(&v.message)), "{} unreported: {}", plan.spec.name, v.message);
            }
        }
    }
}

#[test]
fn scale_equivariance() {
    for spec in [three_room_plan(), p10_analog().1] {
        let a = strokes(&spec, RenderOptions::default()).layout;
        let b = strokes(
            &spec,
            RenderOptions {
                px_per_ft: 16.0,
                ..Default::default()
            },
        )
        .layout;
        assert_eq!(a.walls.len(), b.walls.len());
        for (wa, wb) in a.walls.iter().zip(&b.walls) {
            let (ea, eb) = (wa.endpoints(), wb.endpoints());
            assert!(ea[0].dist(eb[0]) <= 0.05 && ea[1].dist(eb[1]) <= 0.05, "{} vs {}", wa.id, wb.id);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn deskew_restores_wall_angles(alpha in -15.0f64..15.0) {
        let plan = three_room_plan();
        let base = wall_angles(&strokes(&plan, RenderOptions::default()).layout);
        let rot = strokes(&plan, RenderOptions { rotation: alpha.to_radians(), ..Default::default() }).layout;
        let got = wall_angles(&rot);
        prop_assert_eq!(base.len(), got.len());
        for (a, b) in base.iter().zip(&got) {
            prop_assert!(orientation_diff(a.to_radians(), b.to_radians()).to_degrees() <= 0.5, "{} vs {}", a, b);
        }
    }

    #[test]
    fn merging_ignores_input_order(seed in 0u64..1000) {
        // pieces of a few walls, some overlapping, some collinear with gaps
        let pieces = [
            (p(0.0, 0.0), p(10.0, 0.0)), (p(10.5, 0.0), p(20.0, 0.0)), (p(19.0, 0.02), p(30.0, 0.02)),
            (p(0.0, 0.0), p(0.0, 12.0)), (p(0.0, 13.0), p(0.0, 20.0)), (p(0.6, 1.0), p(0.6, 19.0)),
            (p(5.0, 5.0), p(15.0, 15.0)), (p(15.5, 15.5), p(22.0, 22.0)), (p(30.0, 0.0), p(30.0, 20.0)),
        ];
        let segs: Vec<Segment> = pieces.iter().map(|&(a, b)| Segment::new(a, b, 10)).collect();
        let mut shuffled = segs.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in (1..shuffled.len()).rev() {
            let j = rng.gen_range(0..=i);
            shuffled.swap(i, j);
            if rng.gen::<bool>() {
                let s = shuffled[i];
                shuffled[i] = Segment::new(s.b, s.a, s.support);
            }
        }
        prop_assert_eq!(merge_segments(&segs), merge_segments(&shuffled));
    }
}

mod arcs {
    use sketchbim::extract::arcs::*;
    use sketchbim::Point;

    #[test]
    fn circle_through_noisy_samples() {
        let pts: Vec<Point> = (0..40)
            .map(|i| {
                let t = i as f64 / 39.0 * 1.5;
                let wobble = if i % 2 == 0 { 0.02 } else { -0.02 };
                Point::new(3.0, -2.0) + Point::from_angle(t) * (12.0 + wobble)
            })
            .collect();
        let (c, r) = fit_circle(&pts).unwrap();
        assert!((r - 12.0).abs() < 0.01);
        assert!(c.dist(Point::new(3.0, -2.0)) < 0.02);
    }

    #[test]
    fn wobbly_curve_rejected() {
        let pts: Vec<Point> = (0..40)
            .map(|i| {
                let t = i as f64 / 39.0 * 1.5;
                Point::from_angle(t) * (12.0 + 0.2 * (7.0 * t).sin())
            })
            .collect();
        assert!(fit_arc_samples(&pts, 20).is_none());
    }
}

mod merge {
    use sketchbim::extract::merge::*;
    use sketchbim::extract::segments::Segment;
    use sketchbim::Point;

    fn s(x0: f64, y0: f64, x1: f64, y1: f64) -> Segment {
        Segment::new(Point::new(x0, y0), Point::new(x1, y1), 10)
    }

    #[test]
    fn collinear_gap_closes() {
        let m = merge_segments(&[s(0.0, 0.0, 10.0, 0.0), s(10.5, 0.0, 20.0, 0.0)]);
        assert_eq!(m.len(), 1);
        assert!(m[0].a.dist(Point::new(0.0, 0.0)) < 1e-9 && m[0].b.dist(Point::new(20.0, 0.0)) < 1e-9);
    }

    #[test]
    fn double_stroke_centerline() {
        let m = merge_segments(&[s(0.0, 0.0, 20.0, 0.0), s(0.5, 0.6, 19.5, 0.6)]);
        assert_eq!(m.len(), 1);
        assert!((m[0].thickness - 0.6).abs() < 1e-9);
        assert!((m[0].a.y - 0.3).abs() < 1e-9);
    }

    #[test]
    fn three_degrees_stays_apart() {
        let d = Point::from_angle(3f64.to_radians()) * 10.0;
        let m = merge_segments(&[s(0.0, 0.0, 10.0, 0.0), s(10.2, 0.0, 10.2 + d.x, d.y)]);
        assert_eq!(m.len(), 2);
    }

    #[test]
    fn far_gap_stays_apart() {
        assert_eq!(merge_segments(&[s(0.0, 0.0, 10.0, 0.0), s(13.5, 0.0, 20.0, 0.0)]).len(), 2);
    }
}

mod openings {
    use sketchbim::extract::openings::*;
    use sketchbim::{OpeningClass, Point, Wall};

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    #[test]
    fn door_label_defaults() {
        let walls = [Wall::line("w", p(0.0, 0.0), p(12.0, 0.0))];
        let marks = [Mark::Label { p: p(6.0, 0.3), class: OpeningClass::Door, width_hint: None }];
        let (d, _, warn) = place_openings(&marks, &walls);
        assert!(warn.is_empty());
        assert_eq!((d[0].offset, d[0].width), (6.0, 3.0));
    }

    #[test]
    fn overlapping_windows_spaced() {
        let walls = [Wall::line("w", p(0.0, 0.0), p(20.0, 0.0))];
        let mk = |x: f64| Mark::Label { p: p(x, 0.2), class: OpeningClass::Window, width_hint: None };
        let (_, w, _) = place_openings(&[mk(6.0), mk(8.0)], &walls);
        assert_eq!(w.len(), 2);
        assert!((w[1].lo() - w[0].hi() - 0.5).abs() < 1e-9);
        assert_eq!(w[1].width, 4.5);
    }

    #[test]
    fn far_label_warns() {
        let walls = [Wall::line("w", p(0.0, 0.0), p(12.0, 0.0))];
        let marks = [Mark::Label { p: p(6.0, 5.0), class: OpeningClass::Door, width_hint: None }];
        let (d, _, warn) = place_openings(&marks, &walls);
        assert!(d.is_empty());
        assert!(warn[0].starts_with("NoHostInRange"));
    }

    #[test]
    fn swing_places_door_beside_hinge() {
        let walls = [Wall::line("w", p(0.0, 0.0), p(12.0, 0.0))];
        let swing: Vec<Point> = (0..=8)
            .map(|i| p(4.0, 0.0) + Point::from_angle(i as f64 / 8.0 * std::f64::consts::FRAC_PI_2) * 3.0)
            .collect();
        let (d, _, _) = place_openings(&[Mark::Swing(swing)], &walls);
        assert!((d[0].offset - 5.5).abs() < 1e-9);
        assert!((d[0].width - 3.0).abs() < 1e-9);
    }
}

mod orient {
    use sketchbim::extract::orient::*;

    #[test]
    fn single_mode() {
        let m = cluster_orientations(&[0.0f64; 20]).unwrap();
        assert_eq!(m.k, 1);
        assert_eq!(m.means.len(), 1);
    }

    #[test]
    fn wraps_across_pi() {
        let a: Vec<f64> = (0..10).map(|i| if i % 2 == 0 { 0.01 } else { std::f64::consts::PI - 0.01 }).collect();
        let m = cluster_orientations(&a).unwrap();
        assert_eq!(m.k, 1);
    }

    #[test]
    fn departing_member_seeds_cluster() {
        let mut a = vec![0.0f64; 30];
        a.push(8f64.to_radians());
        let m = cluster_orientations(&a).unwrap();
        assert_eq!(m.means.len(), 2);
        assert_ne!(m.labels[30], m.labels[0]);
    }

    #[test]
    fn works_in_f32() {
        let a: Vec<f32> = (0..40).map(|i| if i < 20 { 0.0 } else { std::f32::consts::FRAC_PI_2 }).collect();
        assert_eq!(cluster_orientations(&a).unwrap().k, 2);
    }
}

mod raster {
    use sketchbim::extract::raster::*;
    use sketchbim::extract::bundle::Gray;
    use sketchbim::extract::ExtractError;
    use sketchbim::Point;

    #[test]
    fn all_white_is_empty() {
        assert!(matches!(binarize(&Gray::new(8, 8, 255)), Err(ExtractError::EmptyImage)));
    }

    #[test]
    fn single_row() {
        let mut g = Gray::new(20, 5, 255);
        for x in 0..10 {
            g.set(x, 2, 0);
        }
        assert_eq!(binarize(&g).unwrap().count(), 10);
    }

    #[test]
    fn checkerboard() {
        let mut g = Gray::new(6, 6, 230);
        for y in 0..6 {
            for x in 0..6 {
                if (x + y) % 2 == 0 {
                    g.set(x, y, 20);
                }
            }
        }
        let ink = binarize(&g).unwrap();
        for y in 0..6 {
            for x in 0..6 {
                assert_eq!(ink.is_ink(x, y), (x + y) % 2 == 0);
            }
        }
    }

    #[test]
    fn tls_fit() {
        let pts: Vec<Point> = (0..10).map(|i| Point::new(i as f64, 2.0 * i as f64 + 1.0)).collect();
        let (c, d) = fit_line(&pts);
        assert!((d.y / d.x - 2.0).abs() < 1e-9);
        assert!(line_dist(Point::new(20.0, 41.0), c, d) < 1e-9);
    }
}

mod rooms {
    use sketchbim::extract::rooms::*;
    use sketchbim::extract::ExtractError;
    use sketchbim::Wall;
    use sketchbim::geometry::signed_area;
    use sketchbim::Point;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    fn rect(id: &str, x0: f64, y0: f64, x1: f64, y1: f64) -> Vec<Wall> {
        let c = [p(x0, y0), p(x1, y0), p(x1, y1), p(x0, y1)];
        (0..4).map(|i| Wall::line(format!("{id}{i}"), c[i], c[(i + 1) % 4])).collect()
    }

    #[test]
    fn square_room() {
        let (r, _) = extract_rooms(&rect("a", 0.0, 0.0, 10.0, 10.0)).unwrap();
        assert_eq!(r.len(), 1);
        assert!((signed_area(&r[0].polygon).unwrap() - 100.0).abs() < 1e-9);
    }

    #[test]
    fn two_squares_share_a_wall() {
        let mut w = rect("a", 0.0, 0.0, 20.0, 10.0);
        w.push(Wall::line("m", p(10.0, 0.0), p(10.0, 10.0)));
        assert_eq!(extract_rooms(&w).unwrap().0.len(), 2);
    }

    #[test]
    fn corridor_sliver_merges() {
        // two rooms and a 1.5 ft corridor between them
        let mut w = rect("a", 0.0, 0.0, 21.5, 10.0);
        w.push(Wall::line("m1", p(10.0, 0.0), p(10.0, 10.0)));
        w.push(Wall::line("m2", p(11.5, 0.0), p(11.5, 10.0)));
        let (r, notes) = extract_rooms(&w).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(notes.len(), 1);
    }

    #[test]
    fn open_walls_have_no_room() {
        let w = vec![Wall::line("a", p(0.0, 0.0), p(10.0, 0.0))];
        assert_eq!(extract_rooms(&w), Err(ExtractError::NoBoundedFace));
    }
}

mod segments {
    use sketchbim::extract::segments::*;
    use sketchbim::Point;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    #[test]
    fn plus_splits_into_four() {
        let segs = [Segment::new(p(0.0, 50.0), p(100.0, 50.0), 100), Segment::new(p(50.0, 0.0), p(50.0, 100.0), 100)];
        let out = split_at_junctions(&segs, 2.0);
        assert_eq!(out.len(), 4);
    }

    #[test]
    fn t_junction_splits_the_bar() {
        let segs = [Segment::new(p(0.0, 0.0), p(100.0, 0.0), 100), Segment::new(p(40.0, 1.0), p(40.0, 60.0), 60)];
        let out = split_at_junctions(&segs, 2.0);
        assert_eq!(out.len(), 3);
    }

    #[test]
    fn folds() {
        let s = estimate_skew(&[(0.0, 100.0), (std::f64::consts::FRAC_PI_2, 100.0)]);
        assert!(s.dominant && s.phi.abs() < 1e-12);
        let r = 7f64.to_radians();
        let s = estimate_skew(&[(r, 100.0), (r + std::f64::consts::FRAC_PI_2, 80.0)]);
        assert!((s.phi - r).abs() < 1e-9);
        let d = 45f64.to_radians();
        assert_eq!(estimate_skew(&[(d, 100.0), (-d, 100.0)]).phi, 0.0);
        assert!(!estimate_skew(&[(0.1, 3.0)]).dominant);
    }

    #[test]
    fn frame_flips_y() {
        let f = Frame { origin: p(0.0, 100.0), skew: 0.0, sx: 0.1, sy: 0.1 };
        let w = f.to_world(p(10.0, 90.0));
        assert!((w.x - 1.0).abs() < 1e-12 && (w.y - 1.0).abs() < 1e-12);
    }

    #[test]
    fn l_stroke_becomes_two_lines() {
        let pieces = decompose_stroke(&[p(0.0, 0.0), p(5.0, 0.0), p(10.0, 0.0), p(10.0, 8.0)], 0.2);
        assert_eq!(pieces.len(), 2);
        assert!(pieces.iter().all(|q| matches!(q, Piece::Line(_))));
    }

    #[test]
    fn quarter_circle_is_an_arc() {
        let pts: Vec<Point> = (0..=30)
            .map(|i| Point::from_angle(i as f64 / 30.0 * std::f64::consts::FRAC_PI_2) * 12.0)
            .collect();
        let pieces = decompose_stroke(&pts, 0.2);
        assert_eq!(pieces.len(), 1);
        let Piece::Arc(a) = pieces[0] else { panic!("expected an arc") };
        assert!((a.radius - 12.0).abs() < 0.05);
    }
}

mod topology {
    use sketchbim::extract::topology::*;
    use sketchbim::{Point, Wall};

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    #[test]
    fn corner_gap_closes_at_intersection() {
        let mut w = vec![Wall::line("a", p(0.0, 0.0), p(9.6, 0.0)), Wall::line("b", p(10.0, 0.4), p(10.0, 10.0))];
        join_endpoints(&mut w, JOIN_TOL);
        assert!(w[0].end_point().dist(p(10.0, 0.0)) < 1e-9);
        assert!(w[1].start_point().dist(p(10.0, 0.0)) < 1e-9);
    }

    #[test]
    fn t_stem_reaches_the_bar() {
        let mut w = vec![Wall::line("bar", p(0.0, 0.0), p(20.0, 0.0)), Wall::line("stem", p(8.0, 0.7), p(8.0, 10.0))];
        join_endpoints(&mut w, JOIN_TOL);
        assert!(w[1].start_point().dist(p(8.0, 0.0)) < 1e-9);
        assert_eq!(node_walls(&w).len(), 3);
    }

    #[test]
    fn dangling_fragment_dropped() {
        let sq = [p(0.0, 0.0), p(10.0, 0.0), p(10.0, 10.0), p(0.0, 10.0)];
        let mut w: Vec<Wall> = (0..4).map(|i| Wall::line(format!("w{i}"), sq[i], sq[(i + 1) % 4])).collect();
        w.push(Wall::line("frag", p(5.0, 10.0), p(5.0, 11.0)));
        let (kept, dropped) = retain_stubs(&w);
        assert_eq!(kept.len(), 4);
        assert_eq!(dropped, vec!["frag".to_string()]);
    }

    #[test]
    fn bevel_survives() {
        // trapezoid-like room with a 1.5 ft bevel at 135° turns
        let b = 1.5 / 2f64.sqrt();
        let pts = [p(0.0, 0.0), p(10.0, 0.0), p(10.0, 10.0 - b), p(10.0 - b, 10.0), p(0.0, 10.0)];
        let w: Vec<Wall> = (0..5).map(|i| Wall::line(format!("w{i}"), pts[i], pts[(i + 1) % 5])).collect();
        let (kept, _) = retain_stubs(&w);
        assert_eq!(kept.len(), 5);
    }
}
