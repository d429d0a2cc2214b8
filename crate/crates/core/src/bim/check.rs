//! Static plan checks over the plan document.
//!
//! Four predicates, read for a data plan instead of program text:
//! imports (every op kind and attribute is declared in the schema table),
//! syntax (declared attributes present, typed and in range), bindings (ids
//! unique, hosts resolve to wall ops) and dependency order (hosts precede
//! their openings, exactly one slab and it comes last).

use std::collections::HashMap;

use serde::Serialize;
use serde_json::Value;

use super::BuildPlan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Predicate {
    Imports,
    Syntax,
    Bindings,
    DependencyOrder,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanViolation {
    pub predicate: Predicate,
    pub op: Option<usize>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanCheck {
    pub passes: bool,
    pub violations: Vec<PlanViolation>,
}

impl PlanCheck {
    pub fn has(&self, p: Predicate) -> bool {
        self.violations.iter().any(|v| v.predicate == p)
    }
}

#[derive(Clone, Copy)]
enum Ty {
    Str,
    Num,
    Positive,
    NonNegative,
    Bool,
    Pt,
    Ring,
}

const WALL_ATTRS: [(&str, Ty); 2] = [("thickness", Ty::Positive), ("height", Ty::Positive)];

fn schema(kind: &str) -> Option<Vec<(&'static str, Ty)>> {
    let mut s = vec![("kind", Ty::Str), ("id", Ty::Str)];
    match kind {
        "CreateLineWall" => s.extend([("start", Ty::Pt), ("end", Ty::Pt)]),
        "CreateArcWall" => s.extend([
            ("center", Ty::Pt),
            ("radius", Ty::NonNegative),
            ("start_angle", Ty::Num),
            ("sweep", Ty::NonNegative),
            ("ccw", Ty::Bool),
        ]),
        "PlaceDoor" => s.extend([("host", Ty::Str), ("offset", Ty::Num), ("width", Ty::Positive), ("height", Ty::Positive)]),
        "PlaceWindow" => s.extend([
            ("host", Ty::Str),
            ("offset", Ty::Num),
            ("width", Ty::Positive),
            ("height", Ty::Positive),
            ("sill", Ty::NonNegative),
        ]),
        "CreateFloorSlab" => s.extend([("boundary", Ty::Ring), ("thickness", Ty::Positive)]),
        _ => return None,
    }
    if kind.ends_with("Wall") {
        s.extend(WALL_ATTRS);
    }
    Some(s)
}

fn finite(v: &Value) -> Option<f64> {
    v.as_f64().filter(|x| x.is_finite())
}

fn is_point(v: &Value) -> bool {
    matches!(v.as_array(), Some(a) if a.len() == 2 && a.iter().all(|c| finite(c).is_some()))
}

fn well_typed(v: &Value, ty: Ty) -> bool {
    match ty {
        Ty::Str => v.as_str().is_some_and(|s| !s.is_empty()),
        Ty::Num => finite(v).is_some(),
        Ty::Positive => finite(v).is_some_and(|x| x > 0.0),
        Ty::NonNegative => finite(v).is_some_and(|x| x >= 0.0),
        Ty::Bool => v.is_boolean(),
        Ty::Pt => is_point(v),
        Ty::Ring => v.as_array().is_some_and(|a| a.iter().all(is_point)),
    }
}

/// Checks a typed plan.
pub fn static_validate(plan: &BuildPlan) -> PlanCheck {
    static_validate_value(&serde_json::to_value(plan).expect("plan serializes"))
}

/// Checks a plan document that may not deserialize into a typed plan.
pub fn static_validate_value(doc: &Value) -> PlanCheck {
    let mut out = Vec::new();
    let mut push = |predicate, op, detail: String| out.push(PlanViolation { predicate, op, detail });
    if !doc.get("provenance").is_some_and(Value::is_string) {
        push(Predicate::Imports, None, "plan does not declare its layout provenance".into());
    }
    let Some(ops) = doc.get("ops").and_then(Value::as_array) else {
        push(Predicate::Syntax, None, "plan has no op list".into());
        return finish(out);
    };

    let mut kinds: Vec<Option<&str>> = Vec::with_capacity(ops.len());
    for (i, op) in ops.iter().enumerate() {
        let Some(obj) = op.as_object() else {
            push(Predicate::Syntax, Some(i), "op is not an object".into());
            kinds.push(None);
            continue;
        };
        let kind = obj.get("kind").and_then(Value::as_str);
        let Some(attrs) = kind.and_then(schema) else {
            push(Predicate::Imports, Some(i), format!("undeclared op kind {:?}", obj.get("kind")));
            kinds.push(None);
            continue;
        };
        kinds.push(kind);
        for key in obj.keys() {
            if !attrs.iter().any(|(a, _)| a == key) {
                push(Predicate::Imports, Some(i), format!("attribute {key:?} is not declared for {}", kind.unwrap()));
            }
        }
        for (a, ty) in attrs {
            match obj.get(a) {
                None => push(Predicate::Syntax, Some(i), format!("missing attribute {a:?}")),
                Some(v) if !well_typed(v, ty) => push(Predicate::Syntax, Some(i), format!("attribute {a:?} is malformed: {v}")),
                _ => {}
            }
        }
    }

    // bindings
    let id_of = |i: usize| ops[i].get("id").and_then(Value::as_str);
    let mut first: HashMap<&str, usize> = HashMap::new();
    for i in 0..ops.len() {
        if let Some(id) = id_of(i) {
            if let Some(&j) = first.get(id) {
                push(Predicate::Bindings, Some(i), format!("id {id} already bound by op {j}"));
            } else {
                first.insert(id, i);
            }
        }
    }
    let walls: HashMap<&str, usize> = (0..ops.len())
        .filter(|&i| kinds[i].is_some_and(|k| k.ends_with("Wall")))
        .filter_map(|i| id_of(i).map(|id| (id, i)))
        .collect();
    for i in 0..ops.len() {
        if !kinds[i].is_some_and(|k| k.starts_with("Place")) {
            continue;
        }
        let Some(host) = ops[i].get("host").and_then(Value::as_str) else {
            continue;
        };
        match walls.get(host) {
            None => push(Predicate::Bindings, Some(i), format!("host {host} does not resolve to a wall op")),
            Some(&h) if h > i => push(
                Predicate::DependencyOrder,
                Some(i),
                format!("placed before its host {host} (op {h})"),
            ),
            Some(_) => {}
        }
    }

    // one slab, last
    let slabs: Vec<usize> = (0..ops.len()).filter(|&i| kinds[i] == Some("CreateFloorSlab")).collect();
    match slabs.as_slice() {
        [] => push(Predicate::DependencyOrder, None, "plan has no floor slab".into()),
        [s] if *s + 1 == ops.len() => {}
        [s] => push(Predicate::DependencyOrder, Some(*s), "floor slab is not the last op".into()),
        many => push(Predicate::DependencyOrder, Some(many[1]), format!("{} floor slabs", many.len())),
    }
    finish(out)
}

fn finish(violations: Vec<PlanViolation>) -> PlanCheck {
    PlanCheck {
        passes: violations.is_empty(),
        violations,
    }
}
