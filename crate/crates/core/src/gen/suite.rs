//! The synthetic plan corpus: ten plans covering Manhattan, skewed,
//! polygonal, trapezoidal and curved layouts, a small three-room plan, and a
//! scripted refinement session whose initial sketch carries drawing errors.

use super::PlanSpec;

/// A suite member and the rotation its sketch is drawn at.
#[derive(Debug, Clone, PartialEq)]
pub struct SuitePlan {
    pub spec: PlanSpec,
    pub rotation_deg: f64,
}

pub fn three_room_plan() -> PlanSpec {
    PlanSpec::new("three-room")
        .polygon(&[(0.0, 0.0), (36.0, 0.0), (36.0, 20.0), (0.0, 20.0)])
        .line((12.0, 0.0), (12.0, 20.0))
        .line((24.0, 0.0), (24.0, 20.0))
        .door((12.0, 10.0))
        .door((24.0, 10.0))
        .door((6.0, 0.0))
        .window((6.0, 20.0))
        .window((18.0, 20.0))
        .window((30.0, 20.0))
        .window((36.0, 10.0))
}

fn p01() -> PlanSpec {
    PlanSpec::new("P01")
        .polygon(&[(0.0, 0.0), (30.0, 0.0), (30.0, 20.0), (0.0, 20.0)])
        .line((14.0, 0.0), (14.0, 20.0))
        .door((14.0, 10.0))
        .door((7.0, 0.0))
        .window((7.0, 20.0))
        .window((22.0, 20.0))
        .window((30.0, 10.0))
}

fn p02() -> PlanSpec {
    PlanSpec::new("P02")
        .polygon(&[(0.0, 0.0), (36.0, 0.0), (36.0, 16.0), (20.0, 16.0), (20.0, 30.0), (0.0, 30.0)])
        .line((20.0, 0.0), (20.0, 16.0))
        .line((0.0, 16.0), (20.0, 16.0))
        .door((20.0, 8.0))
        .door((10.0, 16.0))
        .door((28.0, 0.0))
        .window((10.0, 30.0))
        .window((36.0, 8.0))
        .window((0.0, 23.0))
}

fn p03() -> PlanSpec {
    PlanSpec::new("P03")
        .polygon(&[(4.0, 0.0), (32.0, 0.0), (36.0, 4.0), (36.0, 20.0), (32.0, 24.0), (4.0, 24.0), (0.0, 20.0), (0.0, 4.0)])
        .line((18.0, 0.0), (18.0, 24.0))
        .door((18.0, 12.0))
        .door((10.0, 0.0))
        .window((27.0, 24.0))
        .window((9.0, 24.0))
        .window((36.0, 12.0))
}

fn p04() -> PlanSpec {
    PlanSpec::new("P04")
        .polygon(&[(0.0, 0.0), (34.0, 0.0), (40.0, 6.0), (40.0, 18.0), (34.0, 24.0), (0.0, 24.0)])
        .line((16.0, 0.0), (16.0, 24.0))
        .line((0.0, 12.0), (16.0, 12.0))
        .door((16.0, 6.0))
        .door((8.0, 12.0))
        .door((25.0, 0.0))
        .window((25.0, 24.0))
        .window((40.0, 12.0))
        .window((0.0, 6.0))
        .window((0.0, 18.0))
}

fn p05() -> PlanSpec {
    PlanSpec::new("P05")
        .polygon(&[(0.0, 0.0), (32.0, 0.0), (32.0, 28.0), (0.0, 28.0)])
        .line((16.0, 0.0), (16.0, 28.0))
        .line((0.0, 14.0), (32.0, 14.0))
        .door((16.0, 7.0))
        .door((16.0, 21.0))
        .door((8.0, 14.0))
        .door((24.0, 14.0))
        .window((8.0, 0.0))
        .window((24.0, 28.0))
        .window((32.0, 7.0))
        .window((0.0, 21.0))
}

fn p06() -> PlanSpec {
    let mut s = PlanSpec::new("P06").polygon(&[(0.0, 0.0), (60.0, 0.0), (54.0, 24.0), (6.0, 24.0)]);
    for x in [12.0, 24.0, 36.0, 48.0] {
        s = s.line((x, 0.0), (x, 24.0));
    }
    s.line((12.0, 12.0), (36.0, 12.0))
        .door((12.0, 6.0))
        .door((24.0, 6.0))
        .door((24.0, 18.0))
        .door((18.0, 12.0))
        .door((30.0, 12.0))
        .door((48.0, 12.0))
        .door((30.0, 0.0))
        .window((18.0, 24.0))
        .window((30.0, 24.0))
        .window((42.0, 24.0))
        .window((6.0, 0.0))
        .window((54.0, 0.0))
}

fn p07() -> PlanSpec {
    PlanSpec::new("P07")
        .line((-5.0, 0.0), (30.0, 0.0))
        .arc((30.0, 0.0), (36.0, 10.0), (30.0, 20.0))
        .line((30.0, 20.0), (0.0, 20.0))
        .line((0.0, 20.0), (-5.0, 0.0))
        .line((14.0, 0.0), (14.0, 20.0))
        .door((14.0, 10.0))
        .door((7.0, 0.0))
        .window((7.0, 20.0))
        .window((22.0, 20.0))
        .window((36.0, 10.0))
}

fn p08() -> PlanSpec {
    let h = 8.0 * 3f64.sqrt();
    PlanSpec::new("P08")
        .line((0.0, 0.0), (16.0, 0.0))
        .line((16.0, 0.0), (24.0, h))
        .line((24.0, h), (16.0, 2.0 * h))
        .arc((16.0, 2.0 * h), (8.0, 2.0 * h + 4.0), (0.0, 2.0 * h))
        .line((0.0, 2.0 * h), (-8.0, h))
        .line((-8.0, h), (0.0, 0.0))
        .line((-8.0, h), (24.0, h))
        .door((8.0, h))
        .door((8.0, 0.0))
        .window((20.0, h / 2.0))
        .window((-4.0, 1.5 * h))
}

fn p09() -> PlanSpec {
    PlanSpec::new("P09")
        .polygon(&[(0.0, 0.0), (32.0, 0.0), (32.0, 14.0), (22.0, 24.0), (0.0, 24.0)])
        .arc((14.0, 0.0), (18.0, 12.0), (14.0, 24.0))
        .door((18.0, 12.0))
        .door((7.0, 0.0))
        .window((7.0, 24.0))
        .window((23.0, 0.0))
        .window((32.0, 7.0))
        .window((27.0, 19.0))
}

/// Height of the bottom-left partition in the scripted session; the
/// initial sketch draws the bottom wall 8 ft too high, 3.1 ft below it.
const P10_W: f64 = 11.1;

/// Walls shared by both versions of the scripted plan.
fn p10_common(name: &str) -> PlanSpec {
    PlanSpec::new(name)
        .line((36.0, 50.0), (24.0, 50.0))
        .arc((24.0, 50.0), (9.0, 45.0), (0.0, 32.0))
        .line((0.0, 32.0), (0.0, P10_W))
        .line((0.0, P10_W), (36.0, P10_W))
        .line((36.0, P10_W), (36.0, 50.0))
        .line((24.0, P10_W), (24.0, 50.0))
        .line((0.0, 32.0), (36.0, 32.0))
        .door((12.0, 32.0))
        .door((30.0, 32.0))
        .door((36.0, 21.5))
        .window((60.0, 12.0))
        .window((0.0, 21.5))
        .window((9.0, 45.0))
        .window((30.0, 50.0))
}

/// Ground truth of the scripted session: five rooms, fifteen walls (one
/// curved), five doors and eight windows.
fn p10_gt() -> PlanSpec {
    p10_common("P10")
        .line((0.0, 0.0), (60.0, 0.0))
        .line((60.0, 0.0), (60.0, 50.0))
        .line((60.0, 50.0), (36.0, 50.0))
        .line((0.0, 0.0), (0.0, P10_W))
        .door((10.4, P10_W))
        .door((16.0, P10_W))
        .window((26.0, 0.0))
        .window((38.0, 0.0))
        .window((50.0, 0.0))
        .window((60.0, 20.0))
}

/// The same plan as first sketched: bottom wall 8 ft too high, right wall
/// short by 8 ft at both ends, top-right wall slanting down to it, the two
/// partition doors drawn on the bottom wall and one window 8 ft too high.
/// The scripted moves carry the door at 8 ft to 16 and the one at 12.4 to 10.4.
fn p10_initial() -> PlanSpec {
    p10_common("P10-initial")
        .line((0.0, 8.0), (60.0, 8.0))
        .line((60.0, 8.0), (60.0, 42.0))
        .line((60.0, 42.0), (36.0, 50.0))
        .line((0.0, 8.0), (0.0, P10_W))
        .door((8.0, 8.0))
        .door((12.4, 8.0))
        .window((26.0, 8.0))
        .window((38.0, 8.0))
        .window((50.0, 8.0))
        .window((60.0, 28.0))
}

/// `(initial sketch, ground truth)` of the scripted session.
pub fn p10_analog() -> (PlanSpec, PlanSpec) {
    (p10_initial(), p10_gt())
}

/// Feedback lines that turn the extracted initial sketch into the ground
/// truth, ending with acceptance. Ids are the canonical ids of the
/// extraction at each step.
pub fn p10_script() -> Vec<String> {
    [
        "Move door 2 to wall 8",
        "Move door 1 to wall 8",
        "Move door 1 eight feet to the right, move door 2 two feet to the left, and move wall 2 downward by 8 feet",
        "Extend wall 1 and wall 3 downward by 8 feet",
        "Move window 5 downward by 8 feet",
        "Extend wall 3 upward by 8 feet",
        "Connect wall 4 with the top end of wall 3, while keeping the left end of wall 4 connected to wall 5",
        "Accept",
    ]
    .map(String::from)
    .to_vec()
}

/// Ten plans mirroring the benchmark classes: P01 to P06 Manhattan (P03 and
/// P05 drawn skewed, P03 and P04 with octagonal corners, P06 trapezoidal
/// with seven rooms), P07 to P10 with slanted and curved walls (P09 and P10
/// skewed).
pub fn suite() -> Vec<SuitePlan> {
    let rot = [0.0, 0.0, 6.0, 0.0, -8.0, 0.0, 0.0, 0.0, 10.0, 7.0];
    [p01(), p02(), p03(), p04(), p05(), p06(), p07(), p08(), p09(), p10_gt()]
        .into_iter()
        .zip(rot)
        .map(|(spec, rotation_deg)| SuitePlan { spec, rotation_deg })
        .collect()
}
