use std::sync::Arc;

use sketchbim::eval::evaluate;
use sketchbim::extract::SketchBundle;
use sketchbim::gen::{p10_analog, p10_script, render_strokes, PlanSpec, RenderOptions};
use sketchbim::session::{score_session, Artifacts, Phase, SessionError, SessionLog, SessionManager};
use sketchbim::{Layout, Point, Wall};

fn p10_bundle() -> SketchBundle {
    let (init, _) = p10_analog();
    render_strokes(&init.build(), RenderOptions::default())
}

fn square() -> Layout {
    PlanSpec::new("sq")
        .polygon(&[(0.0, 0.0), (20.0, 0.0), (20.0, 15.0), (0.0, 15.0)])
        .door((10.0, 0.0))
        .build()
}

#[test]
fn start_stores_first_snapshot() {
    let m = SessionManager::in_memory();
    let s = m.start_session(p10_bundle()).unwrap();
    let st = m.state(&s.session_id).unwrap();
    assert_eq!(st.phase, Phase::AwaitFeedback);
    assert_eq!(st.memory.iteration, 0);
    assert!(st.memory.constraints.passes);
    assert_eq!(st.memory.current_layout, s.layout);
    assert!(s.summary.starts_with("walls: 15"));
    assert_eq!(m.session_log(&s.session_id).unwrap().snapshots.len(), 1);
}

#[test]
fn same_bundle_gives_independent_identical_sessions() {
    let m = SessionManager::in_memory();
    let a = m.start_session(p10_bundle()).unwrap();
    let b = m.start_session(p10_bundle()).unwrap();
    assert_ne!(a.session_id, b.session_id);
    assert_eq!(a.layout, b.layout);
    m.submit_feedback(&a.session_id, "Move door 1 eight feet to the right").unwrap();
    assert_eq!(m.layout(&b.session_id).unwrap(), b.layout);
}

#[test]
fn malformed_bundle_creates_nothing() {
    let m = SessionManager::in_memory();
    assert!(matches!(m.start_session(SketchBundle::default()), Err(SessionError::Extract(_))));
    assert!(m.ids().is_empty());
}

#[test]
fn accept_finalizes_valid_layout() {
    let m = SessionManager::in_memory();
    let id = m.start_from_layout(square()).unwrap().session_id;
    let r = m.submit_feedback(&id, "Accept").unwrap();
    assert_eq!(r.phase, Phase::Finalized);
    let st = m.state(&id).unwrap();
    assert!(st.memory.constraints.passes);
    assert_eq!(st.memory.feedback_history.last().unwrap().text, "Accept");
    assert!(matches!(
        m.submit_feedback(&id, "Accept"),
        Err(SessionError::PhaseViolation { .. })
    ));
}

#[test]
fn accept_on_invalid_layout_stays_open() {
    let mut l = square();
    l.walls.push(Wall::line("wall9", Point::new(40.0, 40.0), Point::new(50.0, 40.0)));
    let m = SessionManager::in_memory();
    let id = m.start_from_layout(l).unwrap().session_id;
    let r = m.finalize(&id).unwrap();
    assert_eq!(r.phase, Phase::AwaitFeedback);
    assert!(!r.report.passes);
    assert!(r.warnings.iter().any(|w| w.contains("DANGLING_ENDPOINT")));
    assert_eq!(m.state(&id).unwrap().memory.iteration, 1);
    // removing the stray wall lets the next accept through
    let r = m.submit_feedback(&id, "Remove wall 9").unwrap();
    assert!(r.report.passes, "{:?}", r.report);
    assert_eq!(m.finalize(&id).unwrap().phase, Phase::Finalized);
}

#[test]
fn parse_errors_leave_state_unchanged() {
    let m = SessionManager::in_memory();
    let id = m.start_from_layout(square()).unwrap().session_id;
    let before = m.session_log(&id).unwrap();
    assert!(matches!(m.submit_feedback(&id, "paint wall 1 blue"), Err(SessionError::Edit(_))));
    assert!(matches!(m.submit_feedback(&id, "Move door 9 to wall 1"), Err(SessionError::Edit(_))));
    assert_eq!(m.session_log(&id).unwrap(), before);
}

#[test]
fn bare_reject_reextracts() {
    let m = SessionManager::in_memory();
    let id = m.start_session(p10_bundle()).unwrap().session_id;
    let r = m.submit_feedback(&id, "Reject").unwrap();
    assert_eq!(r.iteration, 1);
    assert_eq!(r.phase, Phase::AwaitFeedback);
    assert!(r.warnings.iter().any(|w| w.contains("vote threshold")));
    let from_layout = m.start_from_layout(square()).unwrap().session_id;
    assert!(matches!(m.submit_feedback(&from_layout, "Reject"), Err(SessionError::NoSketch)));
    assert_eq!(m.state(&from_layout).unwrap().memory.iteration, 0);
}

#[test]
fn scripted_replay_finalizes_with_monotone_trace() {
    let (_, gt) = p10_analog();
    let gt = gt.build();
    let m = SessionManager::in_memory();
    let id = m.start_session(p10_bundle()).unwrap().session_id;
    let script = p10_script();
    for (k, line) in script.iter().enumerate() {
        let r = m.submit_feedback(&id, line).unwrap();
        assert_eq!(r.iteration, k + 1);
        if k == 6 {
            assert_eq!(m.session_log(&id).unwrap().snapshots.len(), 8);
        }
    }
    let st = m.state(&id).unwrap();
    assert_eq!(st.phase, Phase::Finalized);
    assert!(st.memory.constraints.passes);
    let log = m.session_log(&id).unwrap();
    assert_eq!(log.snapshots.len(), script.len() + 1);
    let trace = score_session(&log, &gt).unwrap();
    let f1: Vec<f64> = trace.rows.iter().map(|r| r.metrics.walls.f1).collect();
    assert!(f1.windows(2).all(|w| w[1] >= w[0]), "{f1:?}");
    assert!(f1[0] < 1.0);
    let last = &trace.last().metrics;
    assert_eq!(last.overall.f1, 1.0);
    assert!(last.overall.rmse_length < 0.005 && last.overall.mae_midpoint < 0.005);
    assert_eq!(evaluate(&st.memory.current_layout, &gt).overall.f1, 1.0);
}

#[test]
fn build_requires_finalized_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let m = SessionManager::open(dir.path()).unwrap();
    let id = m.start_from_layout(square()).unwrap().session_id;
    assert!(matches!(m.finalize_and_build(&id), Err(SessionError::PhaseViolation { .. })));
    m.finalize(&id).unwrap();
    let first = m.finalize_and_build(&id).unwrap();
    assert_eq!(m.state(&id).unwrap().phase, Phase::Done);
    let files: Vec<Vec<u8>> = Artifacts::FILES
        .iter()
        .map(|f| std::fs::read(dir.path().join(&id).join(f)).unwrap())
        .collect();
    let again = m.finalize_and_build(&id).unwrap();
    assert_eq!(first, again);
    for (f, before) in Artifacts::FILES.iter().zip(&files) {
        assert_eq!(&std::fs::read(dir.path().join(&id).join(f)).unwrap(), before);
    }
    assert_eq!(m.model_obj(&id).unwrap(), first.obj);
}

#[test]
fn reload_reproduces_state() {
    let dir = tempfile::tempdir().unwrap();
    let (id, state, log) = {
        let m = SessionManager::open(dir.path()).unwrap();
        let id = m.start_session(p10_bundle()).unwrap().session_id;
        m.submit_feedback(&id, &p10_script()[0]).unwrap();
        m.submit_feedback(&id, "Reject").unwrap();
        (id.clone(), m.state(&id).unwrap(), m.session_log(&id).unwrap())
    };
    let m = SessionManager::open(dir.path()).unwrap();
    assert_eq!(m.ids(), vec![id.clone()]);
    assert_eq!(m.state(&id).unwrap(), state);
    assert_eq!(m.session_log(&id).unwrap(), log);
    // new sessions keep numbering past the reloaded ones
    let other = m.start_from_layout(square()).unwrap().session_id;
    assert!(other > id);
    // a second reject continues the threshold schedule
    m.submit_feedback(&id, "Reject").unwrap();
}

#[test]
fn snapshots_are_immutable() {
    let m = SessionManager::in_memory();
    let id = m.start_session(p10_bundle()).unwrap().session_id;
    let first = m.session_log(&id).unwrap().snapshots;
    for line in &p10_script()[..3] {
        m.submit_feedback(&id, line).unwrap();
    }
    let later = m.session_log(&id).unwrap().snapshots;
    assert_eq!(&later[..first.len()], &first[..]);
}

#[test]
fn log_round_trips() {
    let m = SessionManager::in_memory();
    let id = m.start_session(p10_bundle()).unwrap().session_id;
    m.submit_feedback(&id, &p10_script()[0]).unwrap();
    let log = m.session_log(&id).unwrap();
    assert_eq!(SessionLog::from_json(&log.to_json_pretty()).unwrap(), log);
    let minimal = format!("{{\"snapshots\":[{{\"iteration\":0,\"layout\":{},\"report\":null}}]}}", square().to_json());
    assert_eq!(SessionLog::from_json(&minimal).unwrap().snapshots.len(), 1);
}

#[test]
fn unknown_session() {
    let m = SessionManager::in_memory();
    assert!(matches!(m.session_log("nope"), Err(SessionError::UnknownSession(_))));
}

#[test]
fn sessions_run_concurrently() {
    let m = Arc::new(SessionManager::in_memory());
    let ids: Vec<String> = (0..4).map(|_| m.start_from_layout(square()).unwrap().session_id).collect();
    let handles: Vec<_> = ids
        .iter()
        .cloned()
        .map(|id| {
            let m = Arc::clone(&m);
            std::thread::spawn(move || {
                m.submit_feedback(&id, "Move door 1 two feet to the left").unwrap();
                m.finalize(&id).unwrap();
                m.finalize_and_build(&id).unwrap().obj
            })
        })
        .collect();
    let objs: Vec<Vec<u8>> = handles.into_iter().map(|h| h.join().unwrap()).collect();
    assert!(objs.windows(2).all(|w| w[0] == w[1]));
}
