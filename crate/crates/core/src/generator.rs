//! Procedural worlds and matched task distributions.
//!
//! Restaurant worlds are two rooms (kitchen and serving room) split by a
//! wall with one doorway; the kitchen always carries a sink, a tap, and a
//! coffee machine, and the serving room carries the tables. Home worlds are
//! 2 to 5 rooms of plain containers with a per-container capacity limit and
//! pick-and-place tasks only. Everything is deterministic per seed.

use crate::anticipate::TaskDistribution;
use crate::error::{GenError, PlanError};
use crate::grid::{Cell, OccupancyGrid};
use crate::planner::{task_plan, SearchBudget};
use crate::world::{
    ActionCosts, Attr, AttrSet, Entity, EntityId, Kind, Predicate,
    Profile, TaskSpec, WorldModel, WorldState,
};
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;
use std::time::Duration;

/// Closed category vocabulary of the restaurant profile.
pub const RESTAURANT_VOCAB: [&str; 25] = [
    "restaurant",
    "kitchen",
    "serving_room",
    "robot",
    "sink",
    "tap",
    "coffee_machine",
    "counter",
    "shelf",
    "table",
    "cup",
    "mug",
    "glass",
    "jar",
    "plate",
    "bowl",
    "knife",
    "fork",
    "spoon",
    "apple",
    "banana",
    "orange",
    "tray",
    "water",
    "coffee",
];

/// Closed category vocabulary of the home profile.
pub const HOME_VOCAB: [&str; 14] = [
    "home", "room", "robot", "cabinet", "shelf", "drawer", "table", "box", "book", "cup",
    "plate", "toy", "bottle", "ball",
];

#[derive(Clone, Debug)]
pub struct GeneratorConfig {
    pub profile: Profile,
    pub width: u32,
    pub height: u32,
    pub room_count: usize,
    pub container_count: usize,
    pub object_count: usize,
    pub rng_seed: u64,
    pub capacity_limit: Option<usize>,
    /// Task pool is clamped to this range when feasible instantiations allow.
    pub task_count_min: usize,
    pub task_count_max: usize,
    /// Expansion-limited budget of the per-task solvability probe.
    pub probe_expansions: usize,
    /// Successive task weights scale by this ratio; 1.0 means uniform.
    /// Values below 1 concentrate probability on a few routine tasks.
    pub weight_ratio: f64,
}

impl GeneratorConfig {
    pub fn restaurant(rng_seed: u64) -> GeneratorConfig {
        GeneratorConfig {
            profile: Profile::Restaurant,
            width: 20,
            height: 12,
            room_count: 2,
            container_count: 8,
            object_count: 10,
            rng_seed,
            capacity_limit: None,
            task_count_min: 50,
            task_count_max: 100,
            probe_expansions: 100_000,
            weight_ratio: 1.0,
        }
    }

    pub fn home(rng_seed: u64) -> GeneratorConfig {
        GeneratorConfig {
            profile: Profile::Home,
            width: 20,
            height: 12,
            room_count: 3,
            container_count: 7,
            object_count: 10,
            rng_seed,
            capacity_limit: Some(7),
            task_count_min: 50,
            task_count_max: 100,
            probe_expansions: 100_000,
            weight_ratio: 1.0,
        }
    }

    pub fn vocab(&self) -> Vec<String> {
        let names: &[&str] = match self.profile {
            Profile::Restaurant => &RESTAURANT_VOCAB,
            Profile::Home => &HOME_VOCAB,
        };
        names.iter().map(|s| s.to_string()).collect()
    }

    fn validate(&self) -> Result<(), GenError> {
        let min_strip = 3;
        let need_w = self.room_count as u32 * min_strip + self.room_count as u32 - 1;
        if self.width < need_w || self.height < 4 {
            return Err(GenError::InfeasibleConfig(format!(
                "{}x{} grid cannot hold {} rooms",
                self.width, self.height, self.room_count
            )));
        }
        match self.profile {
            Profile::Restaurant => {
                if self.room_count != 2 {
                    return Err(GenError::InfeasibleConfig(
                        "restaurant profile needs exactly 2 rooms".into(),
                    ));
                }
                if self.container_count < 5 {
                    return Err(GenError::InfeasibleConfig(
                        "restaurant profile needs at least 5 containers \
                         (sink, tap, coffee machine, counter, table)"
                            .into(),
                    ));
                }
            }
            Profile::Home => {
                if !(2..=5).contains(&self.room_count) {
                    return Err(GenError::InfeasibleConfig(
                        "home profile supports 2 to 5 rooms".into(),
                    ));
                }
                if self.capacity_limit.is_none() {
                    return Err(GenError::InfeasibleConfig(
                        "home profile requires a capacity limit".into(),
                    ));
                }
                if self.container_count < self.room_count {
                    return Err(GenError::InfeasibleConfig(
                        "need at least one container per room".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    fn probe_budget(&self) -> SearchBudget {
        SearchBudget {
            max_expansions: self.probe_expansions,
            max_time: Duration::from_secs(3600),
        }
    }
}

struct RoomStrip {
    min_x: u32,
    max_x: u32,
}

/// Vertical strips separated by one-cell walls, widths as even as possible.
fn room_strips(width: u32, rooms: usize) -> Vec<RoomStrip> {
    let rooms_u = rooms as u32;
    let usable = width - (rooms_u - 1);
    let base = usable / rooms_u;
    let extra = usable % rooms_u;
    let mut strips = Vec::with_capacity(rooms);
    let mut x = 0;
    for i in 0..rooms_u {
        let w = base + u32::from(i < extra);
        strips.push(RoomStrip {
            min_x: x,
            max_x: x + w - 1,
        });
        x += w + 1;
    }
    strips
}

fn perimeter_cells(strip: &RoomStrip, height: u32) -> Vec<Cell> {
    let mut cells = Vec::new();
    for y in 0..height {
        for x in strip.min_x..=strip.max_x {
            if x == strip.min_x || x == strip.max_x || y == 0 || y == height - 1 {
                cells.push(Cell::new(x, y));
            }
        }
    }
    cells
}

/// Generates a world; deterministic per config.
pub fn generate_world(cfg: &GeneratorConfig) -> Result<WorldState, GenError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let strips = room_strips(cfg.width, cfg.room_count);

    let mut grid = OccupancyGrid::new(cfg.width, cfg.height, 1.0);
    for strip in strips.iter().skip(1) {
        let wall_x = strip.min_x - 1;
        let doorway_y = rng.gen_range(1..cfg.height - 1);
        for y in 0..cfg.height {
            if y != doorway_y {
                grid.block(Cell::new(wall_x, y));
            }
        }
    }
    let grid = Arc::new(grid);

    let mut entities = Vec::new();
    let room_names: Vec<String> = match cfg.profile {
        Profile::Restaurant => vec!["kitchen".into(), "serving_room".into()],
        Profile::Home => (0..cfg.room_count).map(|_| "room".to_string()).collect(),
    };
    for (i, strip) in strips.iter().enumerate() {
        let center = Cell::new((strip.min_x + strip.max_x) / 2, cfg.height / 2);
        entities.push(Entity {
            id: match cfg.profile {
                Profile::Restaurant => room_names[i].clone(),
                Profile::Home => format!("room{i}"),
            },
            name: room_names[i].clone(),
            kind: Kind::Room,
            cell: Some(center),
            room: None,
            bounds: Some((
                Cell::new(strip.min_x, 0),
                Cell::new(strip.max_x, cfg.height - 1),
            )),
            attrs: AttrSet::default(),
        });
    }
    let room_ids: Vec<EntityId> = (0..cfg.room_count).map(|i| EntityId(i as u32)).collect();

    // (name, room index, attrs) per container, fixtures first
    let mut container_plan: Vec<(String, usize, AttrSet)> = Vec::new();
    match cfg.profile {
        Profile::Restaurant => {
            let mut sink_attrs = AttrSet::default();
            sink_attrs.insert(Attr::IsSink);
            let mut tap_attrs = AttrSet::default();
            tap_attrs.insert(Attr::IsWaterSource);
            let mut coffee_attrs = AttrSet::default();
            coffee_attrs.insert(Attr::IsCoffeeSource);
            let mut table_attrs = AttrSet::default();
            table_attrs.insert(Attr::IsSurface);
            container_plan.push(("sink".into(), 0, sink_attrs));
            container_plan.push(("tap".into(), 0, tap_attrs));
            container_plan.push(("coffee_machine".into(), 0, coffee_attrs));
            let remaining = cfg.container_count - 3;
            let tables = (remaining + 1) / 2;
            for _ in 0..tables {
                container_plan.push(("table".into(), 1, table_attrs));
            }
            for i in 0..remaining - tables {
                let name = if i % 2 == 0 { "counter" } else { "shelf" };
                container_plan.push((name.into(), 0, AttrSet::default()));
            }
        }
        Profile::Home => {
            let names = ["cabinet", "shelf", "drawer", "table", "box"];
            for i in 0..cfg.container_count {
                container_plan.push((
                    names[i % names.len()].into(),
                    i % cfg.room_count,
                    AttrSet::default(),
                ));
            }
        }
    }

    let mut used_cells: Vec<Cell> = Vec::new();
    let mut per_room_candidates: Vec<Vec<Cell>> = strips
        .iter()
        .map(|s| perimeter_cells(s, cfg.height))
        .collect();
    for cand in per_room_candidates.iter_mut() {
        cand.shuffle(&mut rng);
    }
    let mut name_counters: std::collections::HashMap<String, usize> = Default::default();
    let container_base = entities.len();
    for (name, room_idx, attrs) in &container_plan {
        let cell = loop {
            let c = per_room_candidates[*room_idx].pop().ok_or_else(|| {
                GenError::InfeasibleConfig(format!(
                    "room {room_idx} has no perimeter cells left for `{name}`"
                ))
            })?;
            if !used_cells.contains(&c) {
                break c;
            }
        };
        used_cells.push(cell);
        let n = name_counters.entry(name.clone()).or_insert(0);
        entities.push(Entity {
            id: format!("{name}{n}"),
            name: name.clone(),
            kind: Kind::Container,
            cell: Some(cell),
            room: Some(room_ids[*room_idx]),
            bounds: None,
            attrs: *attrs,
        });
        *n += 1;
    }
    let container_ids: Vec<EntityId> =
        (0..container_plan.len()).map(|i| EntityId((container_base + i) as u32)).collect();

    // object categories cycle through a fixed list so small worlds still
    // cover vessels, dishes, and fruit
    let object_cycle: &[&str] = match cfg.profile {
        Profile::Restaurant => &[
            "cup", "bowl", "apple", "mug", "plate", "banana", "glass", "fork", "orange",
            "jar", "spoon", "knife",
        ],
        Profile::Home => &["cup", "book", "plate", "toy", "bottle", "ball"],
    };
    // objects never start inside the tap or the coffee machine
    let placeable: Vec<usize> = container_plan
        .iter()
        .enumerate()
        .filter(|(_, (name, _, _))| name != "tap" && name != "coffee_machine")
        .map(|(i, _)| i)
        .collect();
    let mut facts: Vec<Predicate> = Vec::new();
    let mut load: Vec<usize> = vec![0; container_plan.len()];
    for i in 0..cfg.object_count {
        let name = object_cycle[i % object_cycle.len()];
        let mut attrs = AttrSet::default();
        let washable = matches!(
            name,
            "cup" | "mug" | "glass" | "jar" | "plate" | "bowl" | "knife" | "fork" | "spoon"
        ) && cfg.profile == Profile::Restaurant;
        let fillable =
            matches!(name, "cup" | "mug" | "glass" | "jar") && cfg.profile == Profile::Restaurant;
        if washable {
            attrs.insert(Attr::IsWashable);
        }
        if fillable {
            attrs.insert(Attr::IsFillable);
        }
        let n = name_counters.entry(name.to_string()).or_insert(0);
        let oid = EntityId(entities.len() as u32);
        entities.push(Entity {
            id: format!("{name}{n}"),
            name: name.to_string(),
            kind: Kind::Object,
            cell: None,
            room: None,
            bounds: None,
            attrs,
        });
        *n += 1;
        let cap = cfg.capacity_limit.unwrap_or(usize::MAX);
        let open: Vec<usize> = placeable.iter().copied().filter(|&c| load[c] < cap).collect();
        let slot = *open.choose(&mut rng).ok_or_else(|| {
            GenError::InfeasibleConfig("all containers are at capacity".into())
        })?;
        load[slot] += 1;
        facts.push(Predicate::In(oid, container_ids[slot]));
        if washable && rng.gen_bool(0.5) {
            facts.push(Predicate::Dirty(oid));
        }
    }

    let mut water = None;
    if cfg.profile == Profile::Restaurant {
        let mut liquid = AttrSet::default();
        liquid.insert(Attr::IsLiquid);
        for name in ["water", "coffee"] {
            let id = EntityId(entities.len() as u32);
            entities.push(Entity {
                id: name.into(),
                name: name.into(),
                kind: Kind::Object,
                cell: None,
                room: None,
                bounds: None,
                attrs: liquid,
            });
            if name == "water" {
                water = Some(id);
            }
        }
        // some clean vessels start already filled with water
        if let Some(water) = water {
            let fillables: Vec<EntityId> = entities
                .iter()
                .enumerate()
                .filter(|(_, e)| e.kind == Kind::Object && e.attrs.contains(Attr::IsFillable))
                .map(|(i, _)| EntityId(i as u32))
                .collect();
            for &v in &fillables {
                if !facts.contains(&Predicate::Dirty(v)) && rng.gen_bool(0.25) {
                    facts.push(Predicate::FilledWith(v, water));
                }
            }
        }
    }

    // the robot starts standing on a container cell
    let start = *container_ids.choose(&mut rng).unwrap();
    let robot_cell = entities[start.index()].cell.unwrap();
    entities.push(Entity {
        id: "robot".into(),
        name: "robot".into(),
        kind: Kind::Robot,
        cell: Some(robot_cell),
        room: None,
        bounds: None,
        attrs: AttrSet::default(),
    });

    let disposal = match cfg.profile {
        Profile::Restaurant => "sink0".to_string(),
        Profile::Home => entities[container_base].id.clone(),
    };
    let model = WorldModel::build(
        cfg.profile,
        entities,
        grid,
        ActionCosts::default(),
        cfg.capacity_limit,
        &disposal,
        cfg.vocab(),
    )?;
    Ok(WorldState::from_facts(model, robot_cell, &facts)?)
}

fn label(template: &str, args: &[&str]) -> String {
    format!("{template}({})", args.join(","))
}

/// Every task template instantiation against the world's entities;
/// deterministic order, not yet filtered for feasibility.
pub fn instantiate_tasks(state: &WorldState) -> Vec<TaskSpec> {
    let m = &state.model;
    let by_name = |name: &str| -> Vec<EntityId> {
        m.entities
            .iter()
            .enumerate()
            .filter(|(_, e)| e.name == name)
            .map(|(i, _)| EntityId(i as u32))
            .collect()
    };
    let id = |e: EntityId| m.entity(e).id.as_str();
    let mut tasks = Vec::new();
    match m.profile {
        Profile::Restaurant => {
            let tables = by_name("table");
            let vessels: Vec<EntityId> = m
                .movables
                .iter()
                .copied()
                .filter(|&o| m.entity(o).attrs.contains(Attr::IsFillable))
                .collect();
            let washables: Vec<EntityId> = m
                .movables
                .iter()
                .copied()
                .filter(|&o| m.entity(o).attrs.contains(Attr::IsWashable))
                .collect();
            let bowls = by_name("bowl");
            let fruits: Vec<EntityId> = ["apple", "banana", "orange"]
                .iter()
                .flat_map(|n| by_name(n))
                .collect();
            if let Some(water) = m.water {
                for &v in &vessels {
                    for &t in &tables {
                        tasks.push(TaskSpec::new(
                            label("serve-water", &[id(v), id(t)]),
                            vec![
                                Predicate::FilledWith(v, water),
                                Predicate::In(v, t),
                                Predicate::Clean(v),
                            ],
                        ));
                    }
                }
            }
            if let Some(coffee) = m.coffee {
                for &v in &vessels {
                    for &t in &tables {
                        tasks.push(TaskSpec::new(
                            label("make-coffee", &[id(v), id(t)]),
                            vec![Predicate::FilledWith(v, coffee), Predicate::In(v, t)],
                        ));
                    }
                }
            }
            for &b in &bowls {
                for &f in &fruits {
                    for &t in &tables {
                        tasks.push(TaskSpec::new(
                            label("serve-fruit-bowl", &[id(b), id(f), id(t)]),
                            vec![
                                Predicate::Clean(b),
                                Predicate::In(b, t),
                                Predicate::In(f, t),
                            ],
                        ));
                    }
                }
            }
            for &c in &m.containers {
                let name = &m.entity(c).name;
                if matches!(name.as_str(), "table" | "counter" | "shelf") {
                    tasks.push(TaskSpec::new(
                        label("clear-container", &[id(c)]),
                        vec![Predicate::Empty(c)],
                    ));
                }
            }
            for &o in &washables {
                tasks.push(TaskSpec::new(
                    label("wash-object", &[id(o)]),
                    vec![Predicate::Clean(o)],
                ));
            }
            for &o in &m.movables {
                for &c in &m.containers {
                    let name = &m.entity(c).name;
                    if matches!(name.as_str(), "tap" | "coffee_machine") {
                        continue;
                    }
                    tasks.push(TaskSpec::new(
                        label("pick-and-place", &[id(o), id(c)]),
                        vec![Predicate::In(o, c)],
                    ));
                }
            }
        }
        Profile::Home => {
            for &o in &m.movables {
                for &c in &m.containers {
                    tasks.push(TaskSpec::new(
                        label("pick-and-place", &[id(o), id(c)]),
                        vec![Predicate::In(o, c)],
                    ));
                }
            }
        }
    }
    tasks
}

/// Samples a feasible task distribution for the world; deterministic per
/// seed. Instantiations failing the solvability probe are discarded.
pub fn generate_distribution(
    state: &WorldState,
    cfg: &GeneratorConfig,
    rng_seed: u64,
) -> Result<TaskDistribution, GenError> {
    let mut pool = instantiate_tasks(state);
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    pool.shuffle(&mut rng);
    let budget = cfg.probe_budget();
    let mut kept = Vec::new();
    for task in pool {
        match task_plan(state, &task, &budget) {
            Ok(_) => kept.push(task),
            Err(PlanError::Unsolvable | PlanError::BudgetExhausted) => {}
            Err(PlanError::World(e)) => return Err(GenError::World(e)),
        }
        if kept.len() >= cfg.task_count_max {
            break;
        }
    }
    if kept.is_empty() {
        return Err(GenError::NoFeasibleTasks);
    }
    if cfg.weight_ratio == 1.0 {
        return TaskDistribution::uniform(kept)
            .map_err(|e| GenError::InfeasibleConfig(e.to_string()));
    }
    // geometric weights over the shuffled order model environments where a
    // few routine tasks dominate the workload
    let entries = kept
        .into_iter()
        .enumerate()
        .map(|(i, t)| (t, cfg.weight_ratio.powi(i as i32)))
        .collect();
    TaskDistribution::normalized(entries).map_err(|e| GenError::InfeasibleConfig(e.to_string()))
}
