use proptest::prelude::*;
use sketchbim::edit::{apply_command, apply_feedback, Direction, EditCommand, EditError};
use sketchbim::ids::{ElementClass, ElementRef};
use sketchbim::layout::Room;
use sketchbim::validate::validate;
use sketchbim::{Layout, Opening, Point, Wall};

fn p(x: f64, y: f64) -> Point {
    Point::new(x, y)
}

/// 20 x 10 ft box split by a wall at x = 10, two rooms.
fn two_rooms() -> Layout {
    let mut l = Layout::new();
    let seg = [
        ("wall1", p(0.0, 0.0), p(10.0, 0.0)),
        ("wall2", p(10.0, 0.0), p(20.0, 0.0)),
        ("wall3", p(20.0, 0.0), p(20.0, 10.0)),
        ("wall4", p(20.0, 10.0), p(10.0, 10.0)),
        ("wall5", p(10.0, 10.0), p(0.0, 10.0)),
        ("wall6", p(0.0, 10.0), p(0.0, 0.0)),
        ("wall7", p(10.0, 0.0), p(10.0, 10.0)),
    ];
    for (id, a, b) in seg {
        l.walls.push(Wall::line(id, a, b));
    }
    l.doors.push(Opening::door("door1", "wall1", 5.0, 3.0));
    l.doors.push(Opening::door("door2", "wall7", 5.0, 3.0));
    l.windows.push(Opening::window("win1", "wall3", 5.0, 4.5));
    l.windows.push(Opening::window("win2", "wall6", 5.0, 4.5));
    l.rooms.push(Room {
        id: "room1".into(),
        polygon: vec![p(0.0, 0.0), p(10.0, 0.0), p(10.0, 10.0), p(0.0, 10.0)],
        wall_chain: vec!["wall1".into(), "wall7".into(), "wall5".into(), "wall6".into()],
    });
    l.rooms.push(Room {
        id: "room2".into(),
        polygon: vec![p(10.0, 0.0), p(20.0, 0.0), p(20.0, 10.0), p(10.0, 10.0)],
        wall_chain: vec!["wall2".into(), "wall3".into(), "wall4".into(), "wall7".into()],
    });
    l
}

#[test]
fn extend_vertical_wall_downward() {
    let mut l = Layout::new();
    l.walls.push(Wall::line("wall7", p(5.0, 0.0), p(5.0, 10.0)));
    let out = apply_feedback(&l, "Extend wall 7 downward by 8 feet").unwrap();
    assert_eq!(out.new_layout.walls[0].endpoints(), [p(5.0, -8.0), p(5.0, 10.0)]);
}

#[test]
fn window_slides_along_vertical_host() {
    let l = two_rooms();
    // wall6 runs from (0,10) down to (0,0): moving down increases the offset
    let out = apply_feedback(&l, "Move window 2 downward by 2 feet").unwrap();
    assert_eq!(out.new_layout.windows[1].offset, 7.0);
    // wall3 runs upward: moving down decreases the offset
    let out = apply_feedback(&l, "move win 1 down by 2 ft").unwrap();
    assert_eq!(out.new_layout.windows[0].offset, 3.0);
    assert!(out.warnings.is_empty());
}

#[test]
fn slide_clamps_with_warning() {
    let l = two_rooms();
    let out = apply_feedback(&l, "move door 1 eight feet to the right").unwrap();
    assert_eq!(out.new_layout.doors[0].offset, 7.75);
    assert_eq!(out.warnings.len(), 1);
}

#[test]
fn accept_is_identity() {
    let l = two_rooms();
    let out = apply_feedback(&l, "Accept").unwrap();
    assert_eq!(out.new_layout, l);
    assert_eq!(out.applied, vec![EditCommand::Accept]);
}

#[test]
fn unknown_target_leaves_layout_alone() {
    let l = two_rooms();
    let before = l.to_json();
    let err = apply_feedback(&l, "Remove wall 99").unwrap_err();
    assert!(matches!(err, EditError::UnknownTarget(_)));
    assert_eq!(l.to_json(), before);
}

#[test]
fn failing_clause_aborts_batch() {
    let l = two_rooms();
    let err = apply_feedback(&l, "move door 1 one ft to the left, remove wall 99").unwrap_err();
    assert_eq!(err.kind(), "UnknownTarget");
}

#[test]
fn inverse_pair_restores() {
    let l = two_rooms();
    let a = apply_feedback(&l, "move door 1 two ft to the left").unwrap().new_layout;
    assert_eq!(a.doors[0].offset, 3.0);
    let b = apply_feedback(&a, "move door 1 two ft to the right").unwrap().new_layout;
    assert_eq!(b, l);
}

#[test]
fn rehost_keeps_offset() {
    let l = two_rooms();
    let out = apply_feedback(&l, "Move door 1 to wall 2").unwrap().new_layout;
    assert_eq!(out.doors[0].host, "wall2");
    assert_eq!(out.doors[0].offset, 5.0);
    let err = apply_feedback(&l, "move door 1 to wall 42").unwrap_err();
    assert_eq!(err.kind(), "UnknownTarget");
}

#[test]
fn rigid_wall_move_rebuilds_rooms() {
    let l = two_rooms();
    // the partition moves, but its neighbours do not follow, so the walls
    // it used to split are no longer noded there
    let out = apply_feedback(&l, "move wall 7 two feet to the right").unwrap().new_layout;
    assert_eq!(out.walls[6].endpoints(), [p(12.0, 0.0), p(12.0, 10.0)]);
    assert_eq!(out.doors[1].offset, 5.0);
    assert_eq!(out.rooms.len(), 2);
    assert_eq!(out.rooms[0].id, "room1");
}

#[test]
fn connect_reaims_between_constraints() {
    let mut l = Layout::new();
    l.walls.push(Wall::line("wall3", p(10.0, 0.0), p(10.0, 12.0)));
    l.walls.push(Wall::line("wall4", p(0.0, 10.0), p(10.0, 10.0)));
    l.walls.push(Wall::line("wall5", p(0.0, 0.0), p(0.0, 10.0)));
    let out = apply_feedback(
        &l,
        "Connect wall 4 with the top end of wall 3, while keeping the left end of wall 4 connected to wall 5",
    )
    .unwrap()
    .new_layout;
    assert_eq!(out.walls[1].endpoints(), [p(0.0, 10.0), p(10.0, 12.0)]);
}

#[test]
fn connect_same_point_is_impossible() {
    let mut l = Layout::new();
    l.walls.push(Wall::line("wall1", p(0.0, 0.0), p(10.0, 0.0)));
    l.walls.push(Wall::line("wall2", p(0.0, 0.0), p(0.0, 10.0)));
    l.walls.push(Wall::line("wall3", p(0.0, -5.0), p(0.0, 0.0)));
    let err = apply_feedback(
        &l,
        "connect wall 1 with the bottom end of wall 2 while keeping the left end of wall 1 connected to wall 3",
    )
    .unwrap_err();
    assert_eq!(err.kind(), "GeometricallyImpossible");
}

#[test]
fn remove_wall_orphans_openings() {
    let l = two_rooms();
    let out = apply_feedback(&l, "remove wall 3").unwrap();
    assert_eq!(out.new_layout.windows.len(), 2);
    assert!(validate(&out.new_layout).has(sketchbim::validate::ViolationCode::MissingHost));
}

#[test]
fn split_merge_round_trip() {
    let l = two_rooms();
    let s = apply_feedback(&l, "split wall 5 at 4 ft").unwrap().new_layout;
    assert_eq!(s.walls.len(), 8);
    assert!(s.wall("wall8").is_some());
    let m = apply_feedback(&s, "merge wall 5 with wall 8").unwrap().new_layout;
    assert_eq!(m.walls.len(), 7);
    assert_eq!(m.wall("wall5").unwrap().endpoints(), [p(10.0, 10.0), p(0.0, 10.0)]);
}

#[test]
fn add_and_rename() {
    let l = two_rooms();
    let a = apply_feedback(&l, "add a window to wall 5 at 3 ft").unwrap().new_layout;
    assert_eq!(a.windows[2].id, "win3");
    assert_eq!(a.windows[2].offset, 3.0);
    let r = apply_feedback(&a, "rename window 3 to window 7").unwrap().new_layout;
    assert_eq!(r.windows[2].id, "win7");
    let err = apply_feedback(&a, "rename window 3 to window 1").unwrap_err();
    assert_eq!(err.kind(), "IdConflict");
    let t = apply_feedback(&l, "set the thickness of wall 2 to 0.75 ft").unwrap().new_layout;
    assert_eq!(t.walls[1].thickness, 0.75);
}

#[test]
fn ids_are_stable_across_geometry_edits() {
    let l = two_rooms();
    let out = apply_feedback(&l, "extend wall 3 upward by 2 feet, move door 2 one ft down").unwrap().new_layout;
    let ids = |l: &Layout| l.walls.iter().map(|w| w.id.clone()).chain(l.openings().map(|(_, o)| o.id.clone())).collect::<Vec<_>>();
    assert_eq!(ids(&out), ids(&l));
}

proptest! {
    #[test]
    fn move_by_inverse_is_identity(start in 2.25f64..7.75, d in 0.01f64..5.0, right in any::<bool>()) {
        let mut l = two_rooms();
        l.doors[0].offset = (start * 100.0).round() / 100.0;
        let d = (d * 100.0).round() / 100.0;
        let (a, b) = if right { (Direction::Right, Direction::Left) } else { (Direction::Left, Direction::Right) };
        let target = ElementRef::new(ElementClass::Door, 1);
        let there = apply_command(&l, &EditCommand::MoveBy { target, direction: a, distance: d }).unwrap();
        prop_assume!(there.warnings.is_empty());
        let back = apply_command(&there.layout, &EditCommand::MoveBy { target, direction: b, distance: d }).unwrap();
        prop_assert_eq!(back.layout, l);
    }

    #[test]
    fn edits_are_deterministic(k in 1u64..8, d in 1u64..6) {
        let l = two_rooms();
        let text = format!("move wall {k} {d} ft to the left");
        let a = apply_feedback(&l, &text).map(|o| o.new_layout.to_json());
        let b = apply_feedback(&l, &text).map(|o| o.new_layout.to_json());
        prop_assert_eq!(a, b);
    }
}

mod grammar {
    use sketchbim::edit::grammar::*;
    use sketchbim::edit::EditError;
    use sketchbim::ids::{ElementClass, ElementRef};
    use sketchbim::Point;

    fn r(class: ElementClass, n: u64) -> ElementRef {
        ElementRef::new(class, n)
    }

    #[test]
    fn table_step_one() {
        assert_eq!(
            parse_feedback("Move door 3 to wall 8").unwrap(),
            vec![EditCommand::ReHost {
                target: r(ElementClass::Door, 3),
                wall: ElementRef::wall(8)
            }]
        );
    }

    #[test]
    fn table_step_three_has_three_commands() {
        let cmds = parse_feedback(
            "Move door 1 eight feet to the right, move door 3 two feet to the left, and move wall 2 downward by 8 feet",
        )
        .unwrap();
        assert_eq!(
            cmds,
            vec![
                EditCommand::MoveBy { target: r(ElementClass::Door, 1), direction: Direction::Right, distance: 8.0 },
                EditCommand::MoveBy { target: r(ElementClass::Door, 3), direction: Direction::Left, distance: 2.0 },
                EditCommand::MoveBy { target: ElementRef::wall(2), direction: Direction::Down, distance: 8.0 },
            ]
        );
    }

    #[test]
    fn shared_verb_across_targets() {
        let cmds = parse_feedback("Extend wall 7 and wall 3 downward by 8 feet").unwrap();
        assert_eq!(
            cmds,
            vec![
                EditCommand::Extend { target: ElementRef::wall(7), direction: Direction::Down, distance: 8.0 },
                EditCommand::Extend { target: ElementRef::wall(3), direction: Direction::Down, distance: 8.0 },
            ]
        );
    }

    #[test]
    fn connect_with_keep_constraint() {
        let cmds = parse_feedback(
            "Connect wall 4 with the top end of wall 3, while keeping the left end of wall 4 connected to wall 5",
        )
        .unwrap();
        assert_eq!(
            cmds,
            vec![EditCommand::Connect {
                target: ElementRef::wall(4),
                to: Some(EndRef { end: EndSelector::Top, wall: ElementRef::wall(3) }),
                wall: ElementRef::wall(3),
                keep: Some(KeepConstraint { end: EndSelector::Left, anchor: ElementRef::wall(5) }),
            }]
        );
    }

    #[test]
    fn remaining_table_steps_parse() {
        for text in [
            "Move door 1 to wall 8",
            "Move window 2 downward by 8 feet",
            "Extend wall 3 upward by 8 feet",
            "Accept",
        ] {
            assert_eq!(parse_feedback(text).unwrap().len(), 1, "{text}");
        }
    }

    #[test]
    fn misc_verbs() {
        assert_eq!(
            parse_feedback("add a door to wall 2 at 4.5 ft width 3 ft").unwrap(),
            vec![EditCommand::Add {
                spec: AddSpec::Opening {
                    class: ElementClass::Door,
                    host: ElementRef::wall(2),
                    offset: Some(4.5),
                    width: Some(3.0)
                }
            }]
        );
        assert_eq!(
            parse_feedback("add wall from (0, 0) to (10, 0)").unwrap(),
            vec![EditCommand::Add { spec: AddSpec::Wall { start: Point::new(0.0, 0.0), end: Point::new(10.0, 0.0) } }]
        );
        assert_eq!(parse_feedback("merge wall 3 and wall 4").unwrap().len(), 1);
        assert_eq!(parse_feedback("set the thickness of wall 2 to 0.75 ft").unwrap().len(), 1);
        assert_eq!(parse_feedback("SPLIT WALL 2 AT 3 FT. remove d2").unwrap().len(), 2);
        assert_eq!(
            parse_feedback("move W 2 three ft to the left").unwrap()[0],
            EditCommand::MoveBy { target: r(ElementClass::Window, 2), direction: Direction::Left, distance: 3.0 }
        );
    }

    #[test]
    fn never_guesses() {
        let err = parse_feedback("mvoe door 3 to wall 8").unwrap_err();
        match err {
            EditError::UnparsableClause { suggestion, .. } => assert!(suggestion.contains("\"move\"")),
            other => panic!("{other:?}"),
        }
        assert!(parse_feedback("move door 3 somewhere nice").is_err());
        assert!(parse_feedback("move door 3 to the left").is_err());
        assert!(matches!(parse_feedback("   "), Err(EditError::EmptyFeedback)));
        assert!(parse_feedback("extend wall 2 downward by 0 feet").is_err());
    }
}
