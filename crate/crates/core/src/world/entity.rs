//! Entities and their attribute flags.

use crate::grid::Cell;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Index into the world's entity table.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct EntityId(pub u32);

impl EntityId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Robot,
    Room,
    Container,
    Object,
}

impl Kind {
    pub fn one_hot_index(self) -> usize {
        match self {
            Kind::Robot => 0,
            Kind::Room => 1,
            Kind::Container => 2,
            Kind::Object => 3,
        }
    }
}

/// The fixed 9-flag attribute vocabulary. Flags outside this set are rejected
/// at load time.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum Attr {
    #[serde(rename = "isDirty")]
    IsDirty,
    #[serde(rename = "isEmpty")]
    IsEmpty,
    #[serde(rename = "isLiquid")]
    IsLiquid,
    #[serde(rename = "isFillable")]
    IsFillable,
    #[serde(rename = "isWashable")]
    IsWashable,
    #[serde(rename = "isSurface")]
    IsSurface,
    #[serde(rename = "isWaterSource")]
    IsWaterSource,
    #[serde(rename = "isCoffeeSource")]
    IsCoffeeSource,
    #[serde(rename = "isSink")]
    IsSink,
}

pub const ATTR_COUNT: usize = 9;

impl Attr {
    pub const ALL: [Attr; ATTR_COUNT] = [
        Attr::IsDirty,
        Attr::IsEmpty,
        Attr::IsLiquid,
        Attr::IsFillable,
        Attr::IsWashable,
        Attr::IsSurface,
        Attr::IsWaterSource,
        Attr::IsCoffeeSource,
        Attr::IsSink,
    ];

    pub fn bit(self) -> u16 {
        1 << (Attr::ALL.iter().position(|&a| a == self).unwrap() as u16)
    }

    pub fn from_name(name: &str) -> Option<Attr> {
        Attr::ALL.into_iter().find(|a| a.name() == name)
    }

    pub fn name(self) -> &'static str {
        match self {
            Attr::IsDirty => "isDirty",
            Attr::IsEmpty => "isEmpty",
            Attr::IsLiquid => "isLiquid",
            Attr::IsFillable => "isFillable",
            Attr::IsWashable => "isWashable",
            Attr::IsSurface => "isSurface",
            Attr::IsWaterSource => "isWaterSource",
            Attr::IsCoffeeSource => "isCoffeeSource",
            Attr::IsSink => "isSink",
        }
    }
}

/// Set of attribute flags, stored as a bitmask over [`Attr::ALL`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct AttrSet(pub u16);

impl AttrSet {
    pub fn empty() -> AttrSet {
        AttrSet(0)
    }

    pub fn with(mut self, attr: Attr) -> AttrSet {
        self.0 |= attr.bit();
        self
    }

    pub fn insert(&mut self, attr: Attr) {
        self.0 |= attr.bit();
    }

    pub fn contains(self, attr: Attr) -> bool {
        self.0 & attr.bit() != 0
    }

    pub fn iter(self) -> impl Iterator<Item = Attr> {
        Attr::ALL.into_iter().filter(move |a| self.contains(*a))
    }
}

impl FromIterator<Attr> for AttrSet {
    fn from_iter<T: IntoIterator<Item = Attr>>(iter: T) -> AttrSet {
        let mut s = AttrSet::empty();
        for a in iter {
            s.insert(a);
        }
        s
    }
}

impl fmt::Debug for AttrSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Entity {
    /// Stable string identifier, unique within the world.
    pub id: String,
    /// Category label from the profile's closed vocabulary.
    pub name: String,
    pub kind: Kind,
    /// Grid coordinate; present for robot, rooms, and containers.
    pub cell: Option<Cell>,
    /// Room the entity belongs to (containers; robot's room is positional).
    pub room: Option<EntityId>,
    /// Inclusive cell rectangle covered by a room entity.
    pub bounds: Option<(Cell, Cell)>,
    pub attrs: AttrSet,
}

impl Entity {
    pub fn is_movable(&self) -> bool {
        self.kind == Kind::Object && !self.attrs.contains(Attr::IsLiquid)
    }

    pub fn is_liquid(&self) -> bool {
        self.attrs.contains(Attr::IsLiquid)
    }
}
