//! Grounded actions: applicability and transition semantics.

use super::entity::{Attr, EntityId};
use super::state::{CleanState, FillState, Loc, WorldState};
use crate::cost::Cost;
use crate::error::WorldError;
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub enum ActionKind {
    /// Move the robot to the cell of container `to`.
    Move { to: EntityId },
    Pick { obj: EntityId, from: EntityId },
    Place { obj: EntityId, to: EntityId },
    /// Wash `obj` inside `sink`: removes dirty, adds clean, empties liquid.
    Wash { obj: EntityId, sink: EntityId },
    /// Fill the held `obj` with water at a water source.
    Fill { obj: EntityId, source: EntityId },
    /// Brew coffee into the held, clean, empty `obj` at a coffee source.
    MakeCoffee { obj: EntityId, machine: EntityId },
    /// Relocate all contents of `container` to the disposal container.
    Clear { container: EntityId },
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct GroundedAction {
    pub kind: ActionKind,
    pub cost: Cost,
}

impl ActionKind {
    pub fn name(&self) -> &'static str {
        match self {
            ActionKind::Move { .. } => "move",
            ActionKind::Pick { .. } => "pick",
            ActionKind::Place { .. } => "place",
            ActionKind::Wash { .. } => "wash",
            ActionKind::Fill { .. } => "fill",
            ActionKind::MakeCoffee { .. } => "make-coffee",
            ActionKind::Clear { .. } => "clear",
        }
    }

    pub fn args(&self) -> Vec<EntityId> {
        match *self {
            ActionKind::Move { to } => vec![to],
            ActionKind::Pick { obj, from } => vec![obj, from],
            ActionKind::Place { obj, to } => vec![obj, to],
            ActionKind::Wash { obj, sink } => vec![obj, sink],
            ActionKind::Fill { obj, source } => vec![obj, source],
            ActionKind::MakeCoffee { obj, machine } => vec![obj, machine],
            ActionKind::Clear { container } => vec![container],
        }
    }
}

impl fmt::Display for GroundedAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.kind.name())?;
        for (i, a) in self.kind.args().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "e{}", a.0)?;
        }
        write!(f, ") [{}]", self.cost)
    }
}

impl WorldState {
    /// Capacity check for adding one object to `container`.
    fn has_room(&self, container: EntityId) -> bool {
        match self.model.capacity_limit {
            Some(cap) => self.content_count(container) < cap,
            None => true,
        }
    }

    fn is_applicable(&self, action: &GroundedAction) -> bool {
        let m = &self.model;
        match action.kind {
            ActionKind::Move { to } => {
                m.is_container(to)
                    && m.cell_of(to) != Some(self.robot_cell)
                    && self
                        .model
                        .motion
                        .move_cost(self.robot_cell, m.cell_of(to).unwrap())
                        .ok()
                        .flatten()
                        .is_some_and(|c| c == action.cost)
            }
            ActionKind::Pick { obj, from } => {
                self.holding().is_none()
                    && self.loc_of(obj) == Loc::In(from)
                    && self.in_reach(from)
            }
            ActionKind::Place { obj, to } => {
                self.holding() == Some(obj)
                    && m.is_container(to)
                    && self.in_reach(to)
                    && self.has_room(to)
            }
            ActionKind::Wash { obj, sink } => {
                m.is_container(sink)
                    && m.has_attr(sink, Attr::IsSink)
                    && self.loc_of(obj) == Loc::In(sink)
                    && self.in_reach(sink)
                    && m.has_attr(obj, Attr::IsWashable)
                    && (self.clean_of(obj) == CleanState::Dirty
                        || matches!(self.fill_of(obj), FillState::Filled(_)))
            }
            ActionKind::Fill { obj, source } => {
                m.water.is_some()
                    && m.is_container(source)
                    && m.has_attr(source, Attr::IsWaterSource)
                    && self.holding() == Some(obj)
                    && m.has_attr(obj, Attr::IsFillable)
                    && self.fill_of(obj) == FillState::Empty
                    && self.in_reach(source)
            }
            ActionKind::MakeCoffee { obj, machine } => {
                m.coffee.is_some()
                    && m.is_container(machine)
                    && m.has_attr(machine, Attr::IsCoffeeSource)
                    && self.holding() == Some(obj)
                    && m.has_attr(obj, Attr::IsFillable)
                    && self.fill_of(obj) == FillState::Empty
                    && self.clean_of(obj) != CleanState::Dirty
                    && self.in_reach(machine)
            }
            ActionKind::Clear { container } => {
                let contents = self.content_count(container);
                m.is_container(container)
                    && container != m.disposal
                    && contents > 0
                    && self.holding().is_none()
                    && self.in_reach(container)
                    && match m.capacity_limit {
                        Some(cap) => self.content_count(m.disposal) + contents <= cap,
                        None => true,
                    }
            }
        }
    }

    /// Every grounded action whose preconditions hold, in canonical order.
    pub fn applicable_actions(&self) -> Vec<GroundedAction> {
        let m = &self.model;
        let costs = &m.costs;
        let mut out = Vec::new();
        // moves
        for &c in &m.containers {
            let cell = m.cell_of(c).unwrap();
            if cell == self.robot_cell {
                continue;
            }
            if let Ok(Some(cost)) = m.motion.move_cost(self.robot_cell, cell) {
                out.push(GroundedAction {
                    kind: ActionKind::Move { to: c },
                    cost,
                });
            }
        }
        // manipulations
        let held = self.holding();
        let reachable: Vec<EntityId> = m
            .containers
            .iter()
            .copied()
            .filter(|&c| self.in_reach(c))
            .collect();
        if held.is_none() {
            for &c in &reachable {
                for o in self.contents(c) {
                    out.push(GroundedAction {
                        kind: ActionKind::Pick { obj: o, from: c },
                        cost: costs.pick,
                    });
                    if m.has_attr(c, Attr::IsSink)
                        && m.has_attr(o, Attr::IsWashable)
                        && (self.clean_of(o) == CleanState::Dirty
                            || matches!(self.fill_of(o), FillState::Filled(_)))
                    {
                        out.push(GroundedAction {
                            kind: ActionKind::Wash { obj: o, sink: c },
                            cost: costs.wash,
                        });
                    }
                }
                if c != m.disposal && self.content_count(c) > 0 {
                    let ok = match m.capacity_limit {
                        Some(cap) => self.content_count(m.disposal) + self.content_count(c) <= cap,
                        None => true,
                    };
                    if ok {
                        out.push(GroundedAction {
                            kind: ActionKind::Clear { container: c },
                            cost: costs.clear,
                        });
                    }
                }
            }
        }
        if let Some(obj) = held {
            for &c in &reachable {
                if self.has_room(c) {
                    out.push(GroundedAction {
                        kind: ActionKind::Place { obj, to: c },
                        cost: costs.place,
                    });
                }
                if m.water.is_some()
                    && m.has_attr(c, Attr::IsWaterSource)
                    && m.has_attr(obj, Attr::IsFillable)
                    && self.fill_of(obj) == FillState::Empty
                {
                    out.push(GroundedAction {
                        kind: ActionKind::Fill { obj, source: c },
                        cost: costs.fill,
                    });
                }
                if m.coffee.is_some()
                    && m.has_attr(c, Attr::IsCoffeeSource)
                    && m.has_attr(obj, Attr::IsFillable)
                    && self.fill_of(obj) == FillState::Empty
                    && self.clean_of(obj) != CleanState::Dirty
                {
                    out.push(GroundedAction {
                        kind: ActionKind::MakeCoffee { obj, machine: c },
                        cost: costs.make_coffee,
                    });
                }
            }
        }
        debug_assert!(out.iter().all(|a| self.is_applicable(a)));
        out
    }

    /// Applies an applicable action, returning the successor state.
    pub fn apply(&self, action: &GroundedAction) -> Result<WorldState, WorldError> {
        if !self.is_applicable(action) {
            return Err(WorldError::InapplicableAction(action.to_string()));
        }
        let mut next = self.clone();
        let m = &self.model;
        match action.kind {
            ActionKind::Move { to } => {
                next.robot_cell = m.cell_of(to).unwrap();
            }
            ActionKind::Pick { obj, .. } => next.set_loc(obj, Loc::Held),
            ActionKind::Place { obj, to } => next.set_loc(obj, Loc::In(to)),
            ActionKind::Wash { obj, .. } => {
                if m.has_attr(obj, Attr::IsWashable) {
                    next.set_clean(obj, CleanState::Clean);
                }
                if m.has_attr(obj, Attr::IsFillable) {
                    next.set_fill(obj, FillState::Empty);
                }
            }
            ActionKind::Fill { obj, .. } => {
                next.set_fill(obj, FillState::Filled(m.water.unwrap()));
            }
            ActionKind::MakeCoffee { obj, .. } => {
                next.set_fill(obj, FillState::Filled(m.coffee.unwrap()));
            }
            ActionKind::Clear { container } => {
                for o in self.contents(container) {
                    next.set_loc(o, Loc::In(m.disposal));
                }
            }
        }
        Ok(next)
    }
}
