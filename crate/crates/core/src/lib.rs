//! Anticipatory task planning for long-lived service robots.
//!
//! A robot in a persistent environment is handed tasks one at a time. Myopic
//! planning solves each task at minimum immediate cost; anticipatory planning
//! instead minimizes immediate cost plus the expected cost of one future task
//! drawn from a known task distribution, and preparation optimizes the
//! environment in advance of any task. This crate provides the symbolic world
//! model, occupancy-grid motion costs, an optimal forward-search planner, the
//! anticipatory planning loop with its exact and learned cost estimators, a
//! procedural environment generator, and a benchmark harness comparing the
//! four planning regimes.

pub mod anticipate;
pub mod cost;
pub mod dataset;
pub mod error;
pub mod fixtures;
pub mod generator;
pub mod grid;
pub mod harness;
pub mod io;
pub mod nn;
pub mod pddl;
pub mod planner;
pub mod prepare;
pub mod scene;
pub mod stats;
pub mod world;

pub use cost::Cost;
pub use grid::{Cell, Connectivity, DistanceField, MotionContext, OccupancyGrid};
pub use world::{
    ActionCosts, ActionKind, Attr, AttrSet, Entity, EntityId, GroundedAction, Kind, Predicate,
    Profile, TaskSpec, WorldModel, WorldState,
};
