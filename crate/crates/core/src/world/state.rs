//! The static world model and the dynamic world state.
//!
//! `WorldModel` holds everything that never changes within an episode:
//! entities, the occupancy grid with its memoized distance fields, action
//! costs, and the profile configuration. `WorldState` is the cheap-to-clone
//! dynamic part: robot cell, object locations, cleanliness and fill flags.
//! All operations are pure; states are never mutated in place by callers.

use super::entity::{Attr, Entity, EntityId, Kind};
use super::predicate::{Predicate, TaskSpec};
use crate::cost::Cost;
use crate::error::WorldError;
use crate::grid::{Cell, MotionContext, OccupancyGrid};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    Home,
    Restaurant,
}

/// Constant costs of the non-move actions, in cost units.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ActionCosts {
    pub pick: Cost,
    pub place: Cost,
    pub wash: Cost,
    pub fill: Cost,
    pub make_coffee: Cost,
    pub clear: Cost,
}

impl Default for ActionCosts {
    fn default() -> ActionCosts {
        ActionCosts {
            pick: Cost::from_units(1.0),
            place: Cost::from_units(1.0),
            wash: Cost::from_units(2.0),
            fill: Cost::from_units(1.0),
            make_coffee: Cost::from_units(2.0),
            clear: Cost::from_units(2.0),
        }
    }
}

impl ActionCosts {
    /// Cheapest manipulation, used as a heuristic floor.
    pub fn min_manipulation(&self) -> Cost {
        [
            self.pick,
            self.place,
            self.wash,
            self.fill,
            self.make_coffee,
            self.clear,
        ]
        .into_iter()
        .min()
        .unwrap()
    }
}

/// Immutable per-episode description of the environment.
#[derive(Debug)]
pub struct WorldModel {
    pub profile: Profile,
    pub entities: Vec<Entity>,
    pub motion: MotionContext,
    pub costs: ActionCosts,
    /// Max objects per container (home profile: 7).
    pub capacity_limit: Option<usize>,
    /// Where `clear` relocates container contents.
    pub disposal: EntityId,
    pub robot: EntityId,
    /// Closed category-name vocabulary of the profile, in feature order.
    pub vocab: Vec<String>,
    // derived indexes
    pub rooms: Vec<EntityId>,
    pub containers: Vec<EntityId>,
    pub movables: Vec<EntityId>,
    pub water: Option<EntityId>,
    pub coffee: Option<EntityId>,
}

impl WorldModel {
    pub fn grid(&self) -> &Arc<OccupancyGrid> {
        self.motion.grid()
    }

    pub fn entity(&self, id: EntityId) -> &Entity {
        &self.entities[id.index()]
    }

    pub fn lookup(&self, string_id: &str) -> Result<EntityId, WorldError> {
        self.entities
            .iter()
            .position(|e| e.id == string_id)
            .map(|i| EntityId(i as u32))
            .ok_or_else(|| WorldError::UnknownEntity(string_id.to_string()))
    }

    pub fn contains_id(&self, id: EntityId) -> bool {
        id.index() < self.entities.len()
    }

    /// Cell of a located entity (robot/room/container).
    pub fn cell_of(&self, id: EntityId) -> Option<Cell> {
        self.entity(id).cell
    }

    pub fn is_container(&self, id: EntityId) -> bool {
        self.contains_id(id) && self.entity(id).kind == Kind::Container
    }

    pub fn has_attr(&self, id: EntityId, attr: Attr) -> bool {
        self.entity(id).attrs.contains(attr)
    }

    pub fn sinks(&self) -> impl Iterator<Item = EntityId> + '_ {
        self.containers
            .iter()
            .copied()
            .filter(|&c| self.has_attr(c, Attr::IsSink))
    }

    pub fn water_sources(&self) -> impl Iterator<Item = EntityId> + '_ {
        self.containers
            .iter()
            .copied()
            .filter(|&c| self.has_attr(c, Attr::IsWaterSource))
    }

    pub fn coffee_sources(&self) -> impl Iterator<Item = EntityId> + '_ {
        self.containers
            .iter()
            .copied()
            .filter(|&c| self.has_attr(c, Attr::IsCoffeeSource))
    }

    /// Builds the model, deriving indexes and checking structural invariants.
    pub fn build(
        profile: Profile,
        entities: Vec<Entity>,
        grid: Arc<OccupancyGrid>,
        costs: ActionCosts,
        capacity_limit: Option<usize>,
        disposal_id: &str,
        vocab: Vec<String>,
    ) -> Result<Arc<WorldModel>, WorldError> {
        let mut robot = None;
        let mut rooms = Vec::new();
        let mut containers = Vec::new();
        let mut movables = Vec::new();
        let mut water = None;
        let mut coffee = None;
        for (i, e) in entities.iter().enumerate() {
            let id = EntityId(i as u32);
            if entities[..i].iter().any(|other| other.id == e.id) {
                return Err(WorldError::Invalid(format!("duplicate entity id `{}`", e.id)));
            }
            if !vocab.contains(&e.name) {
                return Err(WorldError::Invalid(format!(
                    "entity `{}`: name `{}` not in the profile vocabulary",
                    e.id, e.name
                )));
            }
            match e.kind {
                Kind::Robot => {
                    if robot.replace(id).is_some() {
                        return Err(WorldError::Invalid("more than one robot".into()));
                    }
                }
                Kind::Room => rooms.push(id),
                Kind::Container => containers.push(id),
                Kind::Object => {
                    if e.is_liquid() {
                        match e.name.as_str() {
                            "water" => water = Some(id),
                            "coffee" => coffee = Some(id),
                            _ => {}
                        }
                    } else {
                        movables.push(id);
                    }
                }
            }
            match e.kind {
                Kind::Robot | Kind::Room | Kind::Container => {
                    let cell = e.cell.ok_or_else(|| {
                        WorldError::Invalid(format!("entity `{}` needs a grid cell", e.id))
                    })?;
                    if !grid.in_bounds(cell) {
                        return Err(WorldError::Invalid(format!(
                            "entity `{}`: cell {cell} out of bounds",
                            e.id
                        )));
                    }
                    if grid.is_blocked(cell) {
                        return Err(WorldError::Invalid(format!(
                            "entity `{}`: cell {cell} is blocked",
                            e.id
                        )));
                    }
                }
                Kind::Object => {}
            }
        }
        let robot = robot.ok_or_else(|| WorldError::Invalid("world has no robot".into()))?;
        for (i, e) in entities.iter().enumerate() {
            if e.kind == Kind::Container {
                if let Some(room) = e.room {
                    if !rooms.contains(&room) {
                        return Err(WorldError::Invalid(format!(
                            "container `{}`: room reference is not a room",
                            e.id
                        )));
                    }
                }
                let cell = e.cell.unwrap();
                if entities[..i]
                    .iter()
                    .any(|o| o.kind == Kind::Container && o.cell == Some(cell))
                {
                    return Err(WorldError::Invalid(format!(
                        "container `{}`: cell {cell} already taken by another container",
                        e.id
                    )));
                }
            }
        }
        let model = WorldModel {
            profile,
            motion: MotionContext::new(grid),
            costs,
            capacity_limit,
            disposal: EntityId(0), // patched below
            robot,
            vocab,
            rooms,
            containers,
            movables,
            water,
            coffee,
            entities,
        };
        let disposal = model.lookup(disposal_id)?;
        if !model.is_container(disposal) {
            return Err(WorldError::Invalid(format!(
                "disposal `{disposal_id}` is not a container"
            )));
        }
        Ok(Arc::new(WorldModel {
            disposal,
            ..model
        }))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub enum Loc {
    /// Not a movable object.
    NA,
    In(EntityId),
    Held,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub enum CleanState {
    NA,
    Dirty,
    Clean,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub enum FillState {
    NA,
    Empty,
    Filled(EntityId),
}

/// Canonical hashable snapshot of the dynamic state.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct StateKey {
    pub robot_cell: Cell,
    pub locs: Vec<Loc>,
    pub clean: Vec<CleanState>,
    pub fill: Vec<FillState>,
}

/// Complete symbolic + geometric snapshot of the environment.
#[derive(Clone, Debug)]
pub struct WorldState {
    pub model: Arc<WorldModel>,
    pub robot_cell: Cell,
    pub(crate) locs: Vec<Loc>,
    pub(crate) clean: Vec<CleanState>,
    pub(crate) fill: Vec<FillState>,
}

impl PartialEq for WorldState {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.model, &other.model) && self.key() == other.key()
    }
}
impl Eq for WorldState {}

impl WorldState {
    /// Builds the initial dynamic state from explicit facts. Non-movable
    /// entities get `NA` markers; washable objects default to clean and
    /// fillable objects to empty unless facts say otherwise.
    pub fn from_facts(
        model: Arc<WorldModel>,
        robot_cell: Cell,
        facts: &[Predicate],
    ) -> Result<WorldState, WorldError> {
        let n = model.entities.len();
        let mut locs = vec![Loc::NA; n];
        let mut clean = vec![CleanState::NA; n];
        let mut fill = vec![FillState::NA; n];
        for &id in &model.movables {
            let e = model.entity(id);
            if e.attrs.contains(Attr::IsWashable) {
                clean[id.index()] = CleanState::Clean;
            }
            if e.attrs.contains(Attr::IsFillable) {
                fill[id.index()] = FillState::Empty;
            }
        }
        let mut holding = None;
        for &f in facts {
            for arg in f.args() {
                if !model.contains_id(arg) {
                    return Err(WorldError::UnknownEntity(format!("e{}", arg.0)));
                }
            }
            match f {
                Predicate::In(o, c) => {
                    if !model.is_container(c) {
                        return Err(WorldError::Invalid(format!("in fact: `{f}` target not a container")));
                    }
                    if locs[o.index()] != Loc::NA {
                        return Err(WorldError::Invalid(format!("object e{} located twice", o.0)));
                    }
                    locs[o.index()] = Loc::In(c);
                }
                Predicate::Holding(_, o) => {
                    if holding.replace(o).is_some() {
                        return Err(WorldError::Invalid("more than one holding fact".into()));
                    }
                    if locs[o.index()] != Loc::NA {
                        return Err(WorldError::Invalid(format!("object e{} located twice", o.0)));
                    }
                    locs[o.index()] = Loc::Held;
                }
                Predicate::Dirty(o) => clean[o.index()] = CleanState::Dirty,
                Predicate::Clean(o) => clean[o.index()] = CleanState::Clean,
                Predicate::FilledWith(o, l) => fill[o.index()] = FillState::Filled(l),
                Predicate::Empty(o) => {
                    if fill[o.index()] != FillState::NA {
                        fill[o.index()] = FillState::Empty;
                    }
                }
                Predicate::HandEmpty(_) | Predicate::At(..) | Predicate::ServedAt(..) => {}
            }
        }
        let state = WorldState {
            model,
            robot_cell,
            locs,
            clean,
            fill,
        };
        state.validate()?;
        Ok(state)
    }

    pub fn key(&self) -> StateKey {
        StateKey {
            robot_cell: self.robot_cell,
            locs: self.locs.clone(),
            clean: self.clean.clone(),
            fill: self.fill.clone(),
        }
    }

    pub fn holding(&self) -> Option<EntityId> {
        self.model
            .movables
            .iter()
            .copied()
            .find(|&o| self.locs[o.index()] == Loc::Held)
    }

    pub fn loc_of(&self, obj: EntityId) -> Loc {
        self.locs[obj.index()]
    }

    pub fn contents(&self, container: EntityId) -> Vec<EntityId> {
        self.model
            .movables
            .iter()
            .copied()
            .filter(|&o| self.locs[o.index()] == Loc::In(container))
            .collect()
    }

    pub fn content_count(&self, container: EntityId) -> usize {
        self.model
            .movables
            .iter()
            .filter(|&&o| self.locs[o.index()] == Loc::In(container))
            .count()
    }

    pub fn clean_of(&self, obj: EntityId) -> CleanState {
        self.clean[obj.index()]
    }

    pub fn fill_of(&self, obj: EntityId) -> FillState {
        self.fill[obj.index()]
    }

    pub(crate) fn set_loc(&mut self, obj: EntityId, loc: Loc) {
        self.locs[obj.index()] = loc;
    }

    pub(crate) fn set_clean(&mut self, obj: EntityId, c: CleanState) {
        self.clean[obj.index()] = c;
    }

    pub(crate) fn set_fill(&mut self, obj: EntityId, f: FillState) {
        self.fill[obj.index()] = f;
    }

    /// Room containing the robot's current cell (by room bounds, falling back
    /// to the nearest room cell).
    pub fn robot_room(&self) -> Option<EntityId> {
        let m = &self.model;
        for &r in &m.rooms {
            if let Some((lo, hi)) = m.entity(r).bounds {
                if (lo.x..=hi.x).contains(&self.robot_cell.x)
                    && (lo.y..=hi.y).contains(&self.robot_cell.y)
                {
                    return Some(r);
                }
            }
        }
        m.rooms
            .iter()
            .copied()
            .min_by_key(|&r| {
                let c = m.cell_of(r).unwrap();
                let dx = c.x.abs_diff(self.robot_cell.x) as u64;
                let dy = c.y.abs_diff(self.robot_cell.y) as u64;
                (dx * dx + dy * dy, r)
            })
    }

    /// Robot can manipulate a located entity when standing within Chebyshev
    /// distance 1 of its cell.
    pub fn in_reach(&self, target: EntityId) -> bool {
        self.model
            .cell_of(target)
            .is_some_and(|c| self.robot_cell.chebyshev(c) <= 1)
    }

    /// True iff the predicate holds in this state.
    pub fn holds(&self, p: Predicate) -> bool {
        let m = &self.model;
        match p {
            Predicate::At(r, c) => {
                r == m.robot && m.cell_of(c).is_some_and(|cell| cell == self.robot_cell)
            }
            Predicate::In(o, c) => self.locs.get(o.index()) == Some(&Loc::In(c)),
            Predicate::Holding(r, o) => r == m.robot && self.holding() == Some(o),
            Predicate::HandEmpty(r) => r == m.robot && self.holding().is_none(),
            Predicate::Dirty(o) => self.clean.get(o.index()) == Some(&CleanState::Dirty),
            Predicate::Clean(o) => self.clean.get(o.index()) == Some(&CleanState::Clean),
            Predicate::FilledWith(o, l) => self.fill.get(o.index()) == Some(&FillState::Filled(l)),
            Predicate::Empty(x) => {
                if m.contains_id(x) && m.is_container(x) {
                    self.content_count(x) == 0
                } else {
                    self.fill.get(x.index()) == Some(&FillState::Empty)
                }
            }
            Predicate::ServedAt(o, c) => {
                m.contains_id(c)
                    && m.has_attr(c, Attr::IsSurface)
                    && self.locs.get(o.index()) == Some(&Loc::In(c))
            }
        }
    }

    /// True iff every goal predicate holds. Errors when the task references
    /// an entity absent from the world.
    pub fn satisfies(&self, task: &TaskSpec) -> Result<bool, WorldError> {
        for p in &task.goal {
            for arg in p.args() {
                if !self.model.contains_id(arg) {
                    return Err(WorldError::UnknownEntity(format!("e{}", arg.0)));
                }
            }
        }
        Ok(task.goal.iter().all(|&p| self.holds(p)))
    }

    /// The full fact set, sorted canonically.
    pub fn facts(&self) -> Vec<Predicate> {
        let m = &self.model;
        let mut facts = Vec::new();
        for &c in &m.containers {
            if m.cell_of(c) == Some(self.robot_cell) {
                facts.push(Predicate::At(m.robot, c));
            }
        }
        match self.holding() {
            Some(o) => facts.push(Predicate::Holding(m.robot, o)),
            None => facts.push(Predicate::HandEmpty(m.robot)),
        }
        for &o in &m.movables {
            match self.locs[o.index()] {
                Loc::In(c) => {
                    facts.push(Predicate::In(o, c));
                    if m.has_attr(c, Attr::IsSurface) {
                        facts.push(Predicate::ServedAt(o, c));
                    }
                }
                Loc::Held | Loc::NA => {}
            }
            match self.clean[o.index()] {
                CleanState::Dirty => facts.push(Predicate::Dirty(o)),
                CleanState::Clean => facts.push(Predicate::Clean(o)),
                CleanState::NA => {}
            }
            match self.fill[o.index()] {
                FillState::Filled(l) => facts.push(Predicate::FilledWith(o, l)),
                FillState::Empty => facts.push(Predicate::Empty(o)),
                FillState::NA => {}
            }
        }
        facts.sort();
        facts
    }

    /// Checks all dynamic-state invariants.
    pub fn validate(&self) -> Result<(), WorldError> {
        let m = &self.model;
        let grid = m.grid();
        if !grid.in_bounds(self.robot_cell) || grid.is_blocked(self.robot_cell) {
            return Err(WorldError::Invalid(format!(
                "robot cell {} invalid",
                self.robot_cell
            )));
        }
        let mut held = 0usize;
        for &o in &m.movables {
            match self.locs[o.index()] {
                Loc::In(c) => {
                    if !m.is_container(c) {
                        return Err(WorldError::Invalid(format!(
                            "object `{}` is inside a non-container",
                            m.entity(o).id
                        )));
                    }
                }
                Loc::Held => held += 1,
                Loc::NA => {
                    return Err(WorldError::Invalid(format!(
                        "movable object `{}` has no location",
                        m.entity(o).id
                    )))
                }
            }
            if self.clean[o.index()] != CleanState::NA && !m.has_attr(o, Attr::IsWashable) {
                return Err(WorldError::Invalid(format!(
                    "non-washable `{}` carries a cleanliness flag",
                    m.entity(o).id
                )));
            }
            if self.fill[o.index()] != FillState::NA && !m.has_attr(o, Attr::IsFillable) {
                return Err(WorldError::Invalid(format!(
                    "non-fillable `{}` carries a fill flag",
                    m.entity(o).id
                )));
            }
        }
        if held > 1 {
            return Err(WorldError::Invalid("more than one object held".into()));
        }
        if let Some(cap) = m.capacity_limit {
            for &c in &m.containers {
                let count = self.content_count(c);
                if count > cap {
                    return Err(WorldError::Invalid(format!(
                        "container `{}` holds {count} objects, capacity {cap}",
                        m.entity(c).id
                    )));
                }
            }
        }
        Ok(())
    }
}
