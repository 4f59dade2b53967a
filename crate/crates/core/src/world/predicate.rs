//! Grounded predicates and task goals.

use super::entity::EntityId;
use serde::{Deserialize, Serialize};
use std::fmt;

/// A grounded relational fact. Arities are fixed per name:
/// at:2, in:2, holding:2, hand-empty:1, dirty:1, clean:1, filled-with:2,
/// empty:1, served-at:2.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub enum Predicate {
    /// Robot `.0` stands on the cell of container `.1`.
    At(EntityId, EntityId),
    /// Object `.0` is inside container `.1`.
    In(EntityId, EntityId),
    /// Robot `.0` holds object `.1`.
    Holding(EntityId, EntityId),
    HandEmpty(EntityId),
    Dirty(EntityId),
    Clean(EntityId),
    /// Vessel `.0` is filled with liquid entity `.1`.
    FilledWith(EntityId, EntityId),
    /// Fillable object: carries no liquid. Container: holds no objects.
    Empty(EntityId),
    /// Object `.0` sits on surface container `.1` (derived from `In`).
    ServedAt(EntityId, EntityId),
}

impl Predicate {
    pub fn name(&self) -> &'static str {
        match self {
            Predicate::At(..) => "at",
            Predicate::In(..) => "in",
            Predicate::Holding(..) => "holding",
            Predicate::HandEmpty(..) => "hand-empty",
            Predicate::Dirty(..) => "dirty",
            Predicate::Clean(..) => "clean",
            Predicate::FilledWith(..) => "filled-with",
            Predicate::Empty(..) => "empty",
            Predicate::ServedAt(..) => "served-at",
        }
    }

    pub fn args(&self) -> Vec<EntityId> {
        match *self {
            Predicate::At(a, b)
            | Predicate::In(a, b)
            | Predicate::Holding(a, b)
            | Predicate::FilledWith(a, b)
            | Predicate::ServedAt(a, b) => vec![a, b],
            Predicate::HandEmpty(a)
            | Predicate::Dirty(a)
            | Predicate::Clean(a)
            | Predicate::Empty(a) => vec![a],
        }
    }

    pub fn from_parts(name: &str, args: &[EntityId]) -> Option<Predicate> {
        match (name, args) {
            ("at", [a, b]) => Some(Predicate::At(*a, *b)),
            ("in", [a, b]) => Some(Predicate::In(*a, *b)),
            ("holding", [a, b]) => Some(Predicate::Holding(*a, *b)),
            ("hand-empty", [a]) => Some(Predicate::HandEmpty(*a)),
            ("dirty", [a]) => Some(Predicate::Dirty(*a)),
            ("clean", [a]) => Some(Predicate::Clean(*a)),
            ("filled-with", [a, b]) => Some(Predicate::FilledWith(*a, *b)),
            ("empty", [a]) => Some(Predicate::Empty(*a)),
            ("served-at", [a, b]) => Some(Predicate::ServedAt(*a, *b)),
            _ => None,
        }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.name())?;
        for (i, a) in self.args().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "e{}", a.0)?;
        }
        write!(f, ")")
    }
}

/// A task: a goal given as a conjunction of grounded predicates.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct TaskSpec {
    pub label: String,
    pub goal: Vec<Predicate>,
}

impl TaskSpec {
    pub fn new(label: impl Into<String>, mut goal: Vec<Predicate>) -> TaskSpec {
        goal.sort();
        goal.dedup();
        TaskSpec {
            label: label.into(),
            goal,
        }
    }
}
