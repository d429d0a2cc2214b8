//! Element identifiers: classes, normalization and references.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementClass {
    Wall,
    Door,
    Window,
    Room,
}

impl ElementClass {
    /// Prefix used by canonical ids.
    pub fn prefix(self) -> &'static str {
        match self {
            ElementClass::Wall => "wall",
            ElementClass::Door => "door",
            ElementClass::Window => "win",
            ElementClass::Room => "room",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ElementClass::Wall => "wall",
            ElementClass::Door => "door",
            ElementClass::Window => "window",
            ElementClass::Room => "room",
        }
    }

    pub fn from_word(word: &str) -> Option<Self> {
        match word {
            "wall" | "walls" => Some(ElementClass::Wall),
            "d" | "door" | "doors" => Some(ElementClass::Door),
            "w" | "win" | "window" | "windows" => Some(ElementClass::Window),
            "room" | "rooms" => Some(ElementClass::Room),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot classify element id {0:?}")]
pub struct Unclassifiable(pub String);

/// Normalizes a raw id: lowercase, spaces and underscores stripped, class
/// aliases folded, numeric suffix parsed without leading zeros.
///
/// `"d02"` and `"Door 2"` both give `(Door, 2)`.
pub fn normalize_id(raw: &str) -> Result<(ElementClass, u64), Unclassifiable> {
    let s: String = raw
        .chars()
        .filter(|c| !c.is_whitespace() && *c != '_' && *c != '-')
        .flat_map(char::to_lowercase)
        .collect();
    let split = s.find(|c: char| c.is_ascii_digit()).unwrap_or(s.len());
    let (word, digits) = s.split_at(split);
    let class = ElementClass::from_word(word).ok_or_else(|| Unclassifiable(raw.to_string()))?;
    if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
        return Err(Unclassifiable(raw.to_string()));
    }
    let trimmed = digits.trim_start_matches('0');
    let n = if trimmed.is_empty() { 0 } else { trimmed.parse().map_err(|_| Unclassifiable(raw.to_string()))? };
    Ok((class, n))
}

/// A user-facing reference such as "door 3".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ElementRef {
    pub class: ElementClass,
    pub index: u64,
}

impl ElementRef {
    pub fn new(class: ElementClass, index: u64) -> Self {
        Self { class, index }
    }

    pub fn wall(index: u64) -> Self {
        Self::new(ElementClass::Wall, index)
    }

    /// Canonical id string, e.g. `win2`.
    pub fn canonical_id(&self) -> String {
        format!("{}{}", self.class.prefix(), self.index)
    }

    /// True when `id` normalizes to this reference.
    pub fn matches(&self, id: &str) -> bool {
        normalize_id(id).is_ok_and(|(c, n)| c == self.class && n == self.index)
    }
}

impl fmt::Display for ElementRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.class.name(), self.index)
    }
}
