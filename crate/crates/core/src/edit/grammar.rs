//! Controlled-language feedback grammar.
//!
//! ```text
//! feedback := clause (("," | "and" | ";" | ".") clause)*
//! clause   := "accept" | "reject"
//!           | "move" ref "to" "wall" n
//!           | "move" ref "to" ["offset"] num unit
//!           | ("move" | "extend" | "shorten") ref motion
//!           | "connect" ref ("with" | "to") ["the" end "end" "of"] "wall" n
//!                 ["," "while" "keeping" "the" end "end" "of" ref "connected" "to" "wall" n]
//!           | ("remove" | "delete") ref
//!           | "add" ("door" | "window") ("to" | "on") "wall" n ["at" num unit] ["width" num unit]
//!           | "add" "wall" "from" point "to" point
//!           | "set" ["the"] "thickness" "of" ref "to" num unit | "set" ref "thickness" "to" num unit
//!           | "split" ref ["at" num unit]
//!           | "merge" ref ("with" | "and") ref
//!           | "rename" ref "to" ref | "renumber" ...
//! motion   := num unit "to" "the" dir | dirword "by" num unit | "by" num unit dirword | num unit dirword
//! ref      := class n            (class: wall | door | d | window | win | w | room)
//! num      := digits | "one" … "twenty"
//! ```
//!
//! A fragment that starts with an element reference instead of a verb adds a
//! target to the preceding clause ("extend wall 7 and wall 3 downward by 8
//! feet"); a fragment starting with "while" continues it.

use serde::{Deserialize, Serialize};

use super::EditError;
use crate::ids::{ElementClass, ElementRef};
use crate::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Left,
    Right,
    Up,
    Down,
}

impl Direction {
    /// World-frame unit vector ("up" is +y, north).
    pub fn unit(self) -> Point {
        match self {
            Direction::Left => Point::new(-1.0, 0.0),
            Direction::Right => Point::new(1.0, 0.0),
            Direction::Up => Point::new(0.0, 1.0),
            Direction::Down => Point::new(0.0, -1.0),
        }
    }

    pub fn opposite(self) -> Self {
        match self {
            Direction::Left => Direction::Right,
            Direction::Right => Direction::Left,
            Direction::Up => Direction::Down,
            Direction::Down => Direction::Up,
        }
    }
}

/// Wall end chosen by world extremes: `Top` is the endpoint with larger y.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EndSelector {
    Top,
    Bottom,
    Left,
    Right,
}

impl EndSelector {
    pub fn direction(self) -> Direction {
        match self {
            EndSelector::Top => Direction::Up,
            EndSelector::Bottom => Direction::Down,
            EndSelector::Left => Direction::Left,
            EndSelector::Right => Direction::Right,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EndRef {
    pub end: EndSelector,
    pub wall: ElementRef,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KeepConstraint {
    pub end: EndSelector,
    pub anchor: ElementRef,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "what", rename_all = "lowercase")]
pub enum AddSpec {
    Opening {
        class: ElementClass,
        host: ElementRef,
        offset: Option<f64>,
        width: Option<f64>,
    },
    Wall {
        start: Point,
        end: Point,
    },
}

/// One parsed feedback action.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verb")]
pub enum EditCommand {
    MoveTo { target: ElementRef, offset: f64 },
    MoveBy { target: ElementRef, direction: Direction, distance: f64 },
    Extend { target: ElementRef, direction: Direction, distance: f64 },
    Shorten { target: ElementRef, direction: Direction, distance: f64 },
    Remove { target: ElementRef },
    Add { spec: AddSpec },
    Connect { target: ElementRef, to: Option<EndRef>, wall: ElementRef, keep: Option<KeepConstraint> },
    SetThickness { target: ElementRef, thickness: f64 },
    Split { target: ElementRef, at: Option<f64> },
    Merge { target: ElementRef, other: ElementRef },
    ReHost { target: ElementRef, wall: ElementRef },
    RenameId { target: Option<ElementRef>, new: Option<ElementRef> },
    Accept,
    Reject,
}

impl EditCommand {
    pub fn verb(&self) -> &'static str {
        match self {
            EditCommand::MoveTo { .. } => "MoveTo",
            EditCommand::MoveBy { .. } => "MoveBy",
            EditCommand::Extend { .. } => "Extend",
            EditCommand::Shorten { .. } => "Shorten",
            EditCommand::Remove { .. } => "Remove",
            EditCommand::Add { .. } => "Add",
            EditCommand::Connect { .. } => "Connect",
            EditCommand::SetThickness { .. } => "SetThickness",
            EditCommand::Split { .. } => "Split",
            EditCommand::Merge { .. } => "Merge",
            EditCommand::ReHost { .. } => "ReHost",
            EditCommand::RenameId { .. } => "RenameId",
            EditCommand::Accept => "Accept",
            EditCommand::Reject => "Reject",
        }
    }

    /// True for commands that leave the layout untouched.
    pub fn is_decision(&self) -> bool {
        matches!(self, EditCommand::Accept | EditCommand::Reject)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Num(f64),
    Pt(Point),
    Sep,
}

const VERBS: &[&str] = &[
    "move", "extend", "shorten", "connect", "remove", "delete", "add", "set", "split", "merge",
    "rename", "renumber", "accept", "reject",
];

const NUMBER_WORDS: &[&str] = &[
    "zero", "one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten", "eleven",
    "twelve", "thirteen", "fourteen", "fifteen", "sixteen", "seventeen", "eighteen", "nineteen",
    "twenty",
];

fn number_word(w: &str) -> Option<f64> {
    NUMBER_WORDS.iter().position(|&n| n == w).filter(|&i| i > 0).map(|i| i as f64)
}

fn tokenize(text: &str) -> Result<Vec<Tok>, String> {
    let lower = text.to_lowercase();
    let chars: Vec<char> = lower.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '(' {
            let close = chars[i..].iter().position(|&c| c == ')').ok_or("unclosed '('")? + i;
            let inner: String = chars[i + 1..close].iter().collect();
            let nums: Vec<f64> = inner
                .split(|c: char| c == ',' || c == ';' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|_| format!("bad point ({inner})"))?;
            let [x, y] = nums[..] else {
                return Err(format!("point ({inner}) needs two coordinates"));
            };
            out.push(Tok::Pt(Point::new(x, y)));
            i = close + 1;
        } else if c.is_ascii_digit() || (c == '-' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            i += 1;
            while i < chars.len() && (chars[i].is_ascii_digit() || (chars[i] == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()))) {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push(Tok::Num(s.parse().map_err(|_| format!("bad number {s}"))?));
        } else if c.is_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_alphabetic() || chars[i] == '\'') {
                i += 1;
            }
            let w: String = chars[start..i].iter().collect();
            match number_word(&w) {
                Some(n) => out.push(Tok::Num(n)),
                None => out.push(Tok::Word(w)),
            }
        } else if matches!(c, ',' | ';' | '.' | '!') {
            out.push(Tok::Sep);
            i += 1;
        } else {
            // stray punctuation such as quotes is ignored
            i += 1;
        }
    }
    Ok(out)
}

struct Cursor<'a> {
    toks: &'a [Tok],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(toks: &'a [Tok]) -> Self {
        Self { toks, pos: 0 }
    }

    fn done(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn peek_word(&self) -> Option<&str> {
        match self.toks.get(self.pos) {
            Some(Tok::Word(w)) => Some(w.as_str()),
            _ => None,
        }
    }

    fn eat(&mut self, word: &str) -> bool {
        if self.peek_word() == Some(word) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_any(&mut self, words: &[&str]) -> Option<String> {
        let w = self.peek_word()?.to_string();
        if words.contains(&w.as_str()) {
            self.pos += 1;
            Some(w)
        } else {
            None
        }
    }

    fn expect(&mut self, word: &str) -> Result<(), String> {
        if self.eat(word) {
            Ok(())
        } else {
            Err(format!("expected \"{word}\""))
        }
    }

    fn num(&mut self) -> Result<f64, String> {
        match self.toks.get(self.pos) {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(*n)
            }
            _ => Err("expected a number".into()),
        }
    }

    fn point(&mut self) -> Result<Point, String> {
        match self.toks.get(self.pos) {
            Some(Tok::Pt(p)) => {
                self.pos += 1;
                Ok(*p)
            }
            _ => Err("expected a point like (x, y)".into()),
        }
    }

    fn unit(&mut self) -> Result<(), String> {
        self.eat_any(&["feet", "foot", "ft"]).map(|_| ()).ok_or_else(|| "expected \"feet\" or \"ft\"".into())
    }

    fn length(&mut self) -> Result<f64, String> {
        let n = self.num()?;
        self.unit()?;
        if n <= 0.0 {
            return Err("distances must be positive".into());
        }
        Ok(n)
    }

    fn class(&mut self) -> Result<ElementClass, String> {
        let w = self.peek_word().ok_or("expected an element class")?;
        let c = ElementClass::from_word(w).ok_or_else(|| format!("unknown element class \"{w}\""))?;
        self.pos += 1;
        Ok(c)
    }

    fn element(&mut self) -> Result<ElementRef, String> {
        let class = self.class()?;
        let n = self.num()?;
        if n < 0.0 || n.fract() != 0.0 {
            return Err("element numbers are whole numbers".into());
        }
        Ok(ElementRef::new(class, n as u64))
    }

    fn wall(&mut self) -> Result<ElementRef, String> {
        let r = self.element()?;
        if r.class != ElementClass::Wall {
            return Err(format!("expected a wall, found {r}"));
        }
        Ok(r)
    }

    fn dir_word(&mut self) -> Option<Direction> {
        let w = self.peek_word()?;
        let d = match w {
            "upward" | "upwards" | "up" | "north" => Direction::Up,
            "downward" | "downwards" | "down" | "south" => Direction::Down,
            "leftward" | "leftwards" | "left" | "west" => Direction::Left,
            "rightward" | "rightwards" | "right" | "east" => Direction::Right,
            _ => return None,
        };
        self.pos += 1;
        Some(d)
    }

    fn end_selector(&mut self) -> Result<EndSelector, String> {
        let e = match self.peek_word() {
            Some("top" | "upper") => EndSelector::Top,
            Some("bottom" | "lower") => EndSelector::Bottom,
            Some("left") => EndSelector::Left,
            Some("right") => EndSelector::Right,
            _ => return Err("expected top, bottom, left or right".into()),
        };
        self.pos += 1;
        Ok(e)
    }

    /// `num unit to the dir | dirword by num unit | by num unit dirword | num unit dirword`
    fn motion(&mut self) -> Result<(Direction, f64), String> {
        if let Some(d) = self.dir_word() {
            self.expect("by")?;
            return Ok((d, self.length()?));
        }
        if self.eat("by") {
            let n = self.length()?;
            let d = self.dir_word().ok_or("expected a direction")?;
            return Ok((d, n));
        }
        let n = self.length()?;
        if self.eat("to") {
            self.eat("the");
            let d = self.dir_word().ok_or("expected a direction")?;
            return Ok((d, n));
        }
        let d = self.dir_word().ok_or("expected a direction")?;
        Ok((d, n))
    }

    fn finish(&self) -> Result<(), String> {
        if self.done() {
            Ok(())
        } else {
            Err(format!("unexpected trailing words: {}", render(&self.toks[self.pos..])))
        }
    }
}

fn render(toks: &[Tok]) -> String {
    toks.iter()
        .map(|t| match t {
            Tok::Word(w) => w.clone(),
            Tok::Num(n) => format!("{n}"),
            Tok::Pt(p) => format!("({}, {})", p.x, p.y),
            Tok::Sep => ",".into(),
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn levenshtein(a: &str, b: &str) -> usize {
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    for (i, ca) in a.chars().enumerate() {
        let mut cur = vec![i + 1];
        for (j, cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != *cb);
            cur.push(sub.min(prev[j + 1] + 1).min(cur[j] + 1));
        }
        prev = cur;
    }
    prev[b.len()]
}

fn template(verb: &str) -> &'static str {
    match verb {
        "move" => "move <element> <n> to wall <m> | move <element> <n> <number> feet to the <left|right|up|down>",
        "extend" | "shorten" => "extend wall <n> <upward|downward|leftward|rightward> by <number> feet",
        "connect" => "connect wall <n> with the <top|bottom|left|right> end of wall <m>[, while keeping the <end> end of wall <n> connected to wall <k>]",
        "remove" | "delete" => "remove <element> <n>",
        "add" => "add <door|window> to wall <n> [at <number> feet] | add wall from (x, y) to (x, y)",
        "set" => "set the thickness of wall <n> to <number> feet",
        "split" => "split wall <n> [at <number> feet]",
        "merge" => "merge wall <n> with wall <m>",
        "rename" | "renumber" => "rename <element> <n> to <element> <m> | renumber ids",
        _ => "accept | reject",
    }
}

fn suggestion(first: Option<&str>) -> String {
    let Some(w) = first else {
        return "start each clause with a verb such as \"move\"".into();
    };
    if VERBS.contains(&w) {
        return format!("expected: {}", template(w));
    }
    let best = VERBS.iter().min_by_key(|v| levenshtein(w, v)).copied().unwrap_or("move");
    format!("did you mean \"{best}\"? expected: {}", template(best))
}

/// A verb clause with its extra targets and continuation fragments.
struct Clause {
    head: Vec<Tok>,
    extras: Vec<Vec<Tok>>,
    cont: Vec<Tok>,
}

fn unparsable(toks: &[Tok], why: String) -> EditError {
    let first = match toks.first() {
        Some(Tok::Word(w)) => Some(w.as_str()),
        _ => None,
    };
    EditError::UnparsableClause {
        clause: render(toks),
        reason: why,
        suggestion: suggestion(first),
    }
}

/// Parses free text into commands, in clause order. Never guesses: any
/// fragment that does not fit the grammar fails the whole text.
pub fn parse_feedback(text: &str) -> Result<Vec<EditCommand>, EditError> {
    if text.trim().is_empty() {
        return Err(EditError::EmptyFeedback);
    }
    let toks = tokenize(text).map_err(|e| EditError::UnparsableClause {
        clause: text.trim().to_string(),
        reason: e,
        suggestion: suggestion(None),
    })?;
    let mut segments: Vec<Vec<Tok>> = vec![Vec::new()];
    for t in toks {
        match &t {
            Tok::Sep => segments.push(Vec::new()),
            Tok::Word(w) if w == "and" || w == "then" => segments.push(Vec::new()),
            _ => segments.last_mut().expect("non-empty").push(t),
        }
    }
    let mut clauses: Vec<Clause> = Vec::new();
    for seg in segments.into_iter().filter(|s| !s.is_empty()) {
        let first = match &seg[0] {
            Tok::Word(w) => w.clone(),
            _ => return Err(unparsable(&seg, "clause must start with a verb".into())),
        };
        if VERBS.contains(&first.as_str()) {
            clauses.push(Clause {
                head: seg,
                extras: Vec::new(),
                cont: Vec::new(),
            });
        } else if first == "while" {
            let Some(c) = clauses.last_mut() else {
                return Err(unparsable(&seg, "\"while\" needs a preceding clause".into()));
            };
            c.cont.extend(seg);
        } else if ElementClass::from_word(&first).is_some() && !clauses.is_empty() {
            clauses.last_mut().expect("checked").extras.push(seg);
        } else {
            return Err(unparsable(&seg, format!("\"{first}\" is not a known verb")));
        }
    }
    let mut out = Vec::new();
    for c in clauses {
        out.extend(parse_clause(&c)?);
    }
    Ok(out)
}

fn parse_clause(c: &Clause) -> Result<Vec<EditCommand>, EditError> {
    let all: Vec<Tok> = c
        .head
        .iter()
        .chain(c.extras.iter().flatten())
        .chain(c.cont.iter())
        .cloned()
        .collect();
    let fail = |why: String| unparsable(&all, why);

    // Multi-target form: every fragment is `ref [rest]`; the last non-empty
    // rest applies to all targets.
    if !c.extras.is_empty() {
        let verb = match &c.head[0] {
            Tok::Word(w) => w.clone(),
            _ => unreachable!("clauses start with a verb"),
        };
        let mut targets = Vec::new();
        let mut rest: Vec<Tok> = Vec::new();
        for frag in std::iter::once(&c.head[1..]).chain(c.extras.iter().map(|e| &e[..])) {
            let mut cur = Cursor::new(frag);
            targets.push(cur.element().map_err(&fail)?);
            if !cur.done() {
                rest = frag[cur.pos..].to_vec();
            }
        }
        if verb == "merge" {
            if targets.len() != 2 || !rest.is_empty() {
                return Err(fail("merge takes exactly two walls".into()));
            }
            return Ok(vec![EditCommand::Merge {
                target: targets[0],
                other: targets[1],
            }]);
        }
        let mut cmds = Vec::new();
        for t in targets {
            let mut toks = vec![Tok::Word(verb.clone())];
            toks.extend(render_ref(t));
            toks.extend(rest.iter().cloned());
            toks.extend(c.cont.iter().cloned());
            cmds.push(parse_single(&toks).map_err(&fail)?);
        }
        return Ok(cmds);
    }
    let mut toks = c.head.clone();
    toks.extend(c.cont.iter().cloned());
    Ok(vec![parse_single(&toks).map_err(fail)?])
}

fn render_ref(r: ElementRef) -> Vec<Tok> {
    vec![Tok::Word(r.class.name().into()), Tok::Num(r.index as f64)]
}

fn parse_single(toks: &[Tok]) -> Result<EditCommand, String> {
    let mut cur = Cursor::new(toks);
    let verb = cur.peek_word().ok_or("missing verb")?.to_string();
    cur.pos += 1;
    let cmd = match verb.as_str() {
        "accept" => {
            cur.eat_any(&["layout", "it", "this"]);
            EditCommand::Accept
        }
        "reject" => {
            cur.eat_any(&["layout", "it", "this"]);
            EditCommand::Reject
        }
        "move" => {
            let target = cur.element()?;
            if cur.eat("to") {
                if cur.peek_word().and_then(ElementClass::from_word) == Some(ElementClass::Wall) {
                    EditCommand::ReHost { target, wall: cur.wall()? }
                } else if cur.eat("the") {
                    let d = cur.dir_word().ok_or("expected a direction")?;
                    return Err(format!("missing distance before \"to the {d:?}\""));
                } else {
                    cur.eat("offset");
                    let offset = cur.num()?;
                    cur.unit()?;
                    EditCommand::MoveTo { target, offset }
                }
            } else {
                let (direction, distance) = cur.motion()?;
                EditCommand::MoveBy { target, direction, distance }
            }
        }
        "extend" | "shorten" => {
            let target = cur.element()?;
            let (direction, distance) = cur.motion()?;
            if verb == "extend" {
                EditCommand::Extend { target, direction, distance }
            } else {
                EditCommand::Shorten { target, direction, distance }
            }
        }
        "connect" => {
            let target = cur.element()?;
            if cur.eat_any(&["with", "to"]).is_none() {
                return Err("expected \"with\" or \"to\"".into());
            }
            let mut to_end = None;
            if cur.eat("the") {
                to_end = Some(cur.end_selector()?);
                cur.expect("end")?;
                cur.expect("of")?;
            }
            let wall = cur.wall()?;
            let mut keep = None;
            if cur.eat("while") {
                cur.expect("keeping")?;
                cur.eat("the");
                let end = cur.end_selector()?;
                cur.expect("end")?;
                cur.expect("of")?;
                let who = cur.element()?;
                if who != target {
                    return Err(format!("the kept end must belong to {target}"));
                }
                cur.expect("connected")?;
                cur.expect("to")?;
                keep = Some(KeepConstraint { end, anchor: cur.wall()? });
            }
            EditCommand::Connect {
                target,
                to: to_end.map(|end| EndRef { end, wall }),
                wall,
                keep,
            }
        }
        "remove" | "delete" => EditCommand::Remove { target: cur.element()? },
        "add" => {
            cur.eat_any(&["a", "an", "new"]);
            let class = cur.class()?;
            if class == ElementClass::Wall {
                cur.expect("from")?;
                let start = cur.point()?;
                cur.expect("to")?;
                let end = cur.point()?;
                EditCommand::Add { spec: AddSpec::Wall { start, end } }
            } else if matches!(class, ElementClass::Door | ElementClass::Window) {
                if cur.eat_any(&["to", "on", "in"]).is_none() {
                    return Err("expected \"to wall <n>\"".into());
                }
                let host = cur.wall()?;
                let mut offset = None;
                let mut width = None;
                loop {
                    if cur.eat("at") {
                        cur.eat("offset");
                        offset = Some(cur.num()?);
                        cur.unit()?;
                    } else if cur.eat("width") || (cur.eat("with") && cur.eat("width")) {
                        width = Some(cur.length()?);
                    } else {
                        break;
                    }
                }
                EditCommand::Add { spec: AddSpec::Opening { class, host, offset, width } }
            } else {
                return Err("only walls, doors and windows can be added".into());
            }
        }
        "set" => {
            cur.eat("the");
            let target = if cur.eat("thickness") {
                cur.expect("of")?;
                cur.element()?
            } else {
                let t = cur.element()?;
                cur.expect("thickness")?;
                t
            };
            cur.expect("to")?;
            EditCommand::SetThickness { target, thickness: cur.length()? }
        }
        "split" => {
            let target = cur.element()?;
            let at = if cur.eat("at") {
                let n = cur.num()?;
                cur.unit()?;
                Some(n)
            } else {
                None
            };
            EditCommand::Split { target, at }
        }
        "merge" => {
            let target = cur.element()?;
            cur.expect("with")?;
            EditCommand::Merge { target, other: cur.element()? }
        }
        "rename" => {
            let target = cur.element()?;
            cur.expect("to")?;
            let new = cur.element()?;
            if new.class != target.class {
                return Err("renaming cannot change the element class".into());
            }
            EditCommand::RenameId { target: Some(target), new: Some(new) }
        }
        "renumber" => {
            cur.eat_any(&["ids", "elements", "all", "everything"]);
            EditCommand::RenameId { target: None, new: None }
        }
        other => return Err(format!("unknown verb \"{other}\"")),
    };
    cur.finish()?;
    Ok(cmd)
}
