//! Symbolic world model: entities, predicates, states, grounded actions, and
//! atomic perturbations.

mod action;
mod entity;
mod perturb;
mod predicate;
mod state;

pub use action::{ActionKind, GroundedAction};
pub use entity::{Attr, AttrSet, Entity, EntityId, Kind, ATTR_COUNT};
pub use perturb::Perturbation;
pub use predicate::{Predicate, TaskSpec};
pub use state::{
    ActionCosts, CleanState, FillState, Loc, Profile, StateKey, WorldModel, WorldState,
};
