mod layout {
    use sketchbim::layout::*;
    use sketchbim::{ArcGeom, GeomError, Point, Point2};
    use std::f64::consts::{FRAC_PI_2, PI};

    fn p(x: f64, y: f64) -> Point {
        Point2::new(x, y)
    }

    pub(crate) fn square(side: f64) -> Layout {
        let mut l = Layout::new();
        let c = [p(0.0, 0.0), p(side, 0.0), p(side, side), p(0.0, side)];
        for i in 0..4 {
            l.walls.push(Wall::line(format!("w{i}"), c[i], c[(i + 1) % 4]));
        }
        l
    }

    #[test]
    fn wall_lengths() {
        assert_eq!(Wall::line("a", p(0.0, 0.0), p(3.0, 4.0)).length(), 5.0);
        let arc = ArcGeom {
            center: p(0.0, 0.0),
            radius: 10.0,
            start_angle: 0.0,
            sweep: PI,
            ccw: true,
        };
        assert!((Wall::arc("b", arc).length() - 31.4159).abs() < 1e-4);
        assert_eq!(Wall::line("c", p(1.0, 1.0), p(1.0, 1.0)).length(), 0.0);
    }

    #[test]
    fn door_span_on_line() {
        let host = Wall::line("w", p(0.0, 0.0), p(10.0, 0.0));
        let d = Opening::door("d", "w", 5.0, 3.0);
        let (a, b) = opening_world_span(&d, &host).unwrap();
        assert!(a.dist(p(3.5, 0.0)) < 1e-12 && b.dist(p(6.5, 0.0)) < 1e-12);
        let bad = Opening::door("d", "w", 0.5, 3.0);
        assert!(matches!(opening_world_span(&bad, &host), Err(GeomError::OffWall { .. })));
    }

    #[test]
    fn window_span_on_arc_is_tangent_chord() {
        let arc = ArcGeom {
            center: p(0.0, 0.0),
            radius: 20.0,
            start_angle: 0.0,
            sweep: PI,
            ccw: true,
        };
        let host = Wall::arc("a", arc);
        // quarter of the full circle = arc-length 10π from angle 0
        let w = Opening::window("win", "a", 20.0 * FRAC_PI_2, 4.0);
        let (a, b) = opening_world_span(&w, &host).unwrap();
        // trigonometric oracle: tangent point (0,20), tangent ⟂ radius is horizontal
        let tp = p(20.0 * FRAC_PI_2.cos(), 20.0 * FRAC_PI_2.sin());
        assert!((a.dist(tp) - 2.0).abs() < 1e-9 && (b.dist(tp) - 2.0).abs() < 1e-9);
        let chord = b - a;
        assert!(chord.dot(tp).abs() < 1e-9);
        assert!((a.y - 20.0).abs() < 1e-9 && (b.y - 20.0).abs() < 1e-9);
    }

    #[test]
    fn json_shape_matches_document_format() {
        let mut l = square(10.0);
        l.doors.push(Opening::door("door1", "w0", 5.0, 3.0));
        l.windows.push(Opening::window("win1", "w1", 5.0, 4.0));
        let text = l.to_json();
        assert!(text.starts_with(r#"{"units":"feet","walls":[{"id":"w0","kind":"line","start":[0.0,0.0],"end":[10.0,0.0],"thickness":0.5,"height":10.0}"#));
        assert!(text.contains(r#""windows":[{"id":"win1","host":"w1","offset":5.0,"width":4.0,"height":4.0,"sill":3.0}]"#));
        let back = Layout::from_json(&text).unwrap();
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn arc3pt_is_converted_at_ingest() {
        let doc = |mid: &str| format!(r#"{{"units":"feet","walls":[{{"id":"a","kind":"arc3pt","start":[0,0],"mid":{mid},"end":[10,0],"thickness":0.5,"height":10}}],"doors":[],"windows":[],"rooms":[]}}"#);
        let curved = Layout::from_json(&doc("[5,5]")).unwrap();
        assert!(curved.walls[0].is_arc());
        assert!(curved.to_json().contains(r#""kind":"arc""#));
        let flat = Layout::from_json(&doc("[5,0.001]")).unwrap();
        assert!(matches!(flat.walls[0].shape, WallShape::Arc3Pt { .. }));
    }

    #[test]
    fn malformed_documents_fail_to_parse() {
        assert!(Layout::from_json("{").is_err());
        assert!(Layout::from_json(r#"{"units":"feet","walls":[{"id":"a","kind":"spline","thickness":1,"height":1}],"doors":[],"windows":[],"rooms":[]}"#).is_err());
    }

    #[test]
    fn canonical_ids_square() {
        let mut l = square(10.0);
        // scramble ids and order
        l.walls.reverse();
        for (i, w) in l.walls.iter_mut().enumerate() {
            w.id = format!("x{}", 9 - i);
        }
        let c = assign_canonical_ids(&l);
        let mid = |id: &str| c.wall(id).unwrap().midpoint();
        // left wall first, then counterclockwise: bottom, right, top
        assert!(mid("wall1").dist(p(0.0, 5.0)) < 1e-9);
        assert!(mid("wall2").dist(p(5.0, 0.0)) < 1e-9);
        assert!(mid("wall3").dist(p(10.0, 5.0)) < 1e-9);
        assert!(mid("wall4").dist(p(5.0, 10.0)) < 1e-9);
        assert_eq!(assign_canonical_ids(&c), c);
    }

    #[test]
    fn interior_walls_left_to_right() {
        let mut l = square(10.0);
        l.walls.push(Wall::line("b", p(7.0, 0.0), p(7.0, 3.0)));
        l.walls.push(Wall::line("a", p(3.0, 0.0), p(3.0, 3.0)));
        let c = assign_canonical_ids(&l);
        let x3 = c.walls.iter().position(|w| (w.midpoint().x - 3.0).abs() < 1e-9).unwrap();
        let x7 = c.walls.iter().position(|w| (w.midpoint().x - 7.0).abs() < 1e-9).unwrap();
        assert!(x3 < x7);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn serialization_is_a_fixed_point(
                pts in proptest::collection::vec((-100.0f64..100.0, -100.0f64..100.0), 2..10),
                r in 0.5f64..40.0, a0 in -3.0f64..3.0, sw in 0.1f64..6.0, ccw in any::<bool>()
            ) {
                let mut l = Layout::new();
                for (i, w) in pts.windows(2).enumerate() {
                    l.walls.push(Wall::line(format!("wall{}", i + 1), p(w[0].0, w[0].1), p(w[1].0, w[1].1)));
                }
                l.walls.push(Wall::arc("wallA", ArcGeom { center: p(pts[0].0, pts[0].1), radius: r, start_angle: a0, sweep: sw, ccw }));
                l.doors.push(Opening::door("door1", "wall1", 1.2345678, 3.0));
                let once = l.to_json();
                let twice = Layout::from_json(&once).unwrap().to_json();
                prop_assert_eq!(once, twice);
            }

            #[test]
            fn canonical_ids_idempotent_and_geometry_preserving(
                xs in proptest::collection::vec(1.0f64..9.0, 0..4), side in 5.0f64..40.0
            ) {
                let mut l = square(side);
                for (i, x) in xs.iter().enumerate() {
                    let x = x * side / 10.0;
                    l.walls.push(Wall::line(format!("i{i}"), p(x, 0.0), p(x, side * 0.3)));
                }
                let once = assign_canonical_ids(&l);
                prop_assert_eq!(assign_canonical_ids(&once), once.clone());
                let mut before: Vec<String> = l.walls.iter().map(|w| format!("{:?}", w.shape)).collect();
                let mut after: Vec<String> = once.walls.iter().map(|w| format!("{:?}", w.shape)).collect();
                before.sort();
                after.sort();
                prop_assert_eq!(before, after);
            }
        }
    }
}

mod ids {
    use sketchbim::ids::*;

    #[test]
    fn normalization_examples() {
        assert_eq!(normalize_id("d02"), Ok((ElementClass::Door, 2)));
        assert_eq!(normalize_id("d2"), normalize_id("d02"));
        assert_ne!(normalize_id("win11"), normalize_id("win15"));
        assert_eq!(normalize_id("Wall 7"), Ok((ElementClass::Wall, 7)));
        assert_eq!(normalize_id("W_3"), Ok((ElementClass::Window, 3)));
        assert!(normalize_id("column4").is_err());
        assert!(normalize_id("door").is_err());
    }

    #[test]
    fn refs_match_ids() {
        let r = ElementRef::new(ElementClass::Window, 2);
        assert_eq!(r.canonical_id(), "win2");
        assert!(r.matches("window02"));
        assert!(!r.matches("door2"));
    }
}

mod planar {
    use sketchbim::planar::*;
    use sketchbim::{Point, Wall};
    use sketchbim::geometry::{ArcGeom, Point2};

    fn p(x: f64, y: f64) -> Point {
        Point2::new(x, y)
    }

    fn rect_walls(x0: f64, y0: f64, x1: f64, y1: f64) -> Vec<Wall> {
        let c = [p(x0, y0), p(x1, y0), p(x1, y1), p(x0, y1)];
        (0..4)
            .map(|i| Wall::line(format!("w{i}"), c[i], c[(i + 1) % 4]))
            .collect()
    }

    #[test]
    fn square_has_one_bounded_face() {
        let g = PlanarGraph::from_walls(&rect_walls(0.0, 0.0, 10.0, 10.0), 0.05);
        let fs = g.faces();
        let bounded: Vec<_> = fs.bounded().collect();
        assert_eq!(bounded.len(), 1);
        assert!((bounded[0].1.area - 100.0).abs() < 1e-9);
        let outer = g.outer_boundary().unwrap();
        assert!((outer.area - 100.0).abs() < 1e-9);
    }

    #[test]
    fn t_junction_is_noded() {
        let mut w = rect_walls(0.0, 0.0, 20.0, 10.0);
        w.push(Wall::line("mid", p(10.0, 0.0), p(10.0, 10.0)));
        let g = PlanarGraph::from_walls(&w, 0.05);
        assert_eq!(g.faces().bounded().count(), 2);
    }

    #[test]
    fn dangling_wall_is_pruned() {
        let mut w = rect_walls(0.0, 0.0, 10.0, 10.0);
        w.push(Wall::line("spur", p(10.0, 5.0), p(15.0, 5.0)));
        let g = PlanarGraph::from_walls(&w, 0.05);
        let fs = g.faces();
        assert_eq!(fs.bounded().count(), 1);
        assert_eq!(g.outer_boundary_walls().len(), 4);
    }

    #[test]
    fn d_shaped_room_with_arc() {
        let arc = ArcGeom {
            center: p(0.0, 0.0),
            radius: 5.0,
            start_angle: 0.0,
            sweep: std::f64::consts::PI,
            ccw: true,
        };
        let walls = vec![Wall::line("l", p(-5.0, 0.0), p(5.0, 0.0)), Wall::arc("a", arc)];
        let g = PlanarGraph::from_walls(&walls, 0.05);
        let fs = g.faces();
        let b: Vec<_> = fs.bounded().collect();
        assert_eq!(b.len(), 1);
        let half_disc = std::f64::consts::PI * 25.0 / 2.0;
        assert!((b[0].1.area - half_disc).abs() / half_disc < 0.01);
    }
}

mod validate {
    use sketchbim::layout::OPENING_GAP;
    use sketchbim::validate::*;
    use sketchbim::{Layout, Opening, Point, Wall, WallShape};
    use sketchbim::geometry::Point2;
    use sketchbim::layout::Room;

    fn p(x: f64, y: f64) -> Point {
        Point2::new(x, y)
    }

    fn square_room() -> Layout {
        let mut l = Layout::new();
        let c = [p(0.0, 0.0), p(10.0, 0.0), p(10.0, 10.0), p(0.0, 10.0)];
        for i in 0..4 {
            l.walls.push(Wall::line(format!("wall{}", i + 1), c[i], c[(i + 1) % 4]));
        }
        l.rooms.push(Room {
            id: "room1".into(),
            polygon: c.to_vec(),
            wall_chain: (1..=4).map(|i| format!("wall{i}")).collect(),
        });
        l
    }

    #[test]
    fn valid_square_passes() {
        let r = validate(&square_room());
        assert!(r.passes, "{:?}", r.violations);
    }

    #[test]
    fn duplicate_ids() {
        let mut l = square_room();
        l.walls[2].id = "wall3".into();
        l.walls[3].id = "wall3".into();
        l.rooms[0].wall_chain = vec!["wall1".into(), "wall2".into(), "wall3".into()];
        let r = validate(&l);
        assert_eq!(r.codes().into_iter().collect::<Vec<_>>(), vec![ViolationCode::DupId]);
    }

    #[test]
    fn end_margin_suggests_relocation() {
        let mut l = square_room();
        l.doors.push(Opening::door("door1", "wall1", 0.6, 2.7));
        let r = validate(&l);
        let v = r.violations.iter().find(|v| v.code == ViolationCode::OpeningEndMargin).unwrap();
        assert_eq!(v.suggested_fix.as_ref().unwrap().to_string(), "relocate to offset 2.1");
        assert_eq!(r.violations.len(), 1);
    }

    #[test]
    fn connectivity_cases() {
        assert!(connectivity_check(&square_room()).is_empty());
        let mut gap = square_room();
        if let WallShape::Line { end, .. } = &mut gap.walls[0].shape {
            *end = p(10.0, -0.3);
        }
        assert_eq!(connectivity_check(&gap).len(), 2);
        let mut tee = square_room();
        tee.walls.push(Wall::line("wall5", p(5.0, 0.0), p(5.0, 10.0)));
        assert!(connectivity_check(&tee).is_empty());
    }

    #[test]
    fn repair_realigns_off_wall_opening() {
        let mut l = square_room();
        l.doors.push(Opening::door("door1", "wall1", -0.3, 3.0));
        let r = validate(&l);
        assert!(r.has(ViolationCode::OpeningOffWall));
        let fixed = auto_repair(&l, &r);
        let r2 = validate(&fixed);
        assert!(r2.passes, "{:?}", r2.violations);
        assert!((fixed.doors[0].offset - 2.25).abs() < 1e-9);
    }

    #[test]
    fn repair_refits_flat_arc3pt() {
        let mut l = square_room();
        l.walls[0].shape = WallShape::Arc3Pt {
            start: p(0.0, 0.0),
            mid: p(5.0, 0.001),
            end: p(10.0, 0.0),
        };
        let r = validate(&l);
        assert!(r.has(ViolationCode::CollinearArc3pt));
        let fixed = auto_repair(&l, &r);
        assert!(matches!(fixed.walls[0].shape, WallShape::Line { .. }));
        assert!(validate(&fixed).passes);
    }

    #[test]
    fn repair_rounds_precision() {
        let mut l = square_room();
        l.doors.push(Opening::door("door1", "wall1", 5.123456789, 3.0));
        let r = validate(&l);
        assert_eq!(r.codes().into_iter().collect::<Vec<_>>(), vec![ViolationCode::ExcessPrecision]);
        let fixed = auto_repair(&l, &r);
        assert_eq!(fixed.doors[0].offset, 5.12);
        assert!(validate(&fixed).passes);
    }

    #[test]
    fn overlap_separates_when_room_allows() {
        let mut l = square_room();
        l.windows.push(Opening::window("win1", "wall1", 4.0, 4.0));
        l.windows.push(Opening::window("win2", "wall1", 6.0, 4.0));
        let r = validate(&l);
        assert!(r.has(ViolationCode::OpeningOverlap));
        let fixed = auto_repair(&l, &r);
        let r2 = validate(&fixed);
        assert!(r2.passes, "{:?}", r2.violations);
        assert_eq!(fixed.windows.len(), 2);
        let gap = fixed.windows[1].lo() - fixed.windows[0].hi();
        assert!((gap - OPENING_GAP).abs() < 1e-9);
    }

    #[test]
    fn overlap_merges_when_too_long() {
        let mut l = square_room();
        l.windows.push(Opening::window("win1", "wall1", 4.5, 4.5));
        l.windows.push(Opening::window("win2", "wall1", 5.5, 4.5));
        let fixed = auto_repair(&l, &validate(&l));
        assert_eq!(fixed.windows.len(), 1);
        assert!(validate(&fixed).passes);
    }

    #[test]
    fn clockwise_room_reversed() {
        let mut l = square_room();
        l.rooms[0].polygon.reverse();
        let r = validate(&l);
        assert_eq!(r.codes().into_iter().collect::<Vec<_>>(), vec![ViolationCode::RoomCw]);
        assert!(validate(&auto_repair(&l, &r)).passes);
    }

    #[test]
    fn report_order_is_stable() {
        let mut l = square_room();
        l.doors.push(Opening::door("door2", "wall9", 5.0, 3.0));
        l.doors.push(Opening::door("door1", "wall1", 0.5, 3.0));
        let r = validate(&l);
        let ids: Vec<_> = r.violations.iter().map(|v| v.elements[0].clone()).collect();
        assert_eq!(ids, vec!["door1", "door2"]);
        assert_eq!(validate(&l), r);
    }
}
