//! File formats: worlds, task distributions, and trained regressors.
//!
//! Everything is versioned JSON. Worlds serialize the static description
//! (grid raster, entities, costs) together with the current dynamic facts,
//! so a saved world reloads into the exact same state. Entity references in
//! files are the stable string ids, never the internal indices.

use crate::anticipate::TaskDistribution;
use crate::error::WorldError;
use crate::grid::{Cell, OccupancyGrid};
use crate::nn::Regressor;
use crate::world::{
    ActionCosts, Attr, AttrSet, Entity, EntityId, Kind, Loc, Predicate, Profile, TaskSpec,
    WorldModel, WorldState,
};
use serde::{Deserialize, Serialize};
use std::path::Path;
use std::sync::Arc;

pub const WORLD_FORMAT_VERSION: u32 = 1;
pub const DISTRIBUTION_FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct WorldFile {
    version: u32,
    profile: String,
    cell_size: f64,
    /// Raster rows, `.` free and `#` blocked, row 0 at y = 0.
    grid: Vec<String>,
    capacity_limit: Option<usize>,
    disposal: String,
    costs: CostsFile,
    vocab: Vec<String>,
    entities: Vec<EntityFile>,
    /// Dynamic facts as `[name, arg ids...]`.
    facts: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct EntityFile {
    id: String,
    name: String,
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    cell: Option<[u32; 2]>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    room: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    bounds: Option<[[u32; 2]; 2]>,
    attributes: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct CostsFile {
    pick: f64,
    place: f64,
    wash: f64,
    fill: f64,
    make_coffee: f64,
    clear: f64,
}

#[derive(Serialize, Deserialize)]
struct DistributionFile {
    version: u32,
    tasks: Vec<TaskFile>,
}

#[derive(Serialize, Deserialize)]
struct TaskFile {
    label: String,
    /// Goal conjunction as `[name, arg ids...]`.
    goal: Vec<Vec<String>>,
    weight: f64,
}

fn kind_name(kind: Kind) -> &'static str {
    match kind {
        Kind::Robot => "robot",
        Kind::Room => "room",
        Kind::Container => "container",
        Kind::Object => "object",
    }
}

fn parse_kind(s: &str) -> Result<Kind, WorldError> {
    match s {
        "robot" => Ok(Kind::Robot),
        "room" => Ok(Kind::Room),
        "container" => Ok(Kind::Container),
        "object" => Ok(Kind::Object),
        other => Err(WorldError::Parse(format!("unknown entity kind `{other}`"))),
    }
}

fn profile_name(p: Profile) -> &'static str {
    match p {
        Profile::Home => "home",
        Profile::Restaurant => "restaurant",
    }
}

fn parse_profile(s: &str) -> Result<Profile, WorldError> {
    match s {
        "home" => Ok(Profile::Home),
        "restaurant" => Ok(Profile::Restaurant),
        other => Err(WorldError::Parse(format!("unknown profile `{other}`"))),
    }
}

/// Serializes a state (static world plus current facts) to pretty JSON.
pub fn world_to_json(state: &WorldState) -> String {
    let m = &state.model;
    let entities = m
        .entities
        .iter()
        .enumerate()
        .map(|(_i, e)| {
            let cell = if e.kind == Kind::Robot {
                Some(state.robot_cell)
            } else {
                e.cell
            };
            EntityFile {
                id: e.id.clone(),
                name: e.name.clone(),
                kind: kind_name(e.kind).to_string(),
                cell: cell.map(|c| [c.x, c.y]),
                room: e.room.map(|r| m.entity(r).id.clone()),
                bounds: e.bounds.map(|(a, b)| [[a.x, a.y], [b.x, b.y]]),
                attributes: e.attrs.iter().map(|a| a.name().to_string()).collect(),
            }
        })
        .collect();
    let mut facts = Vec::new();
    for &o in &m.movables {
        match state.loc_of(o) {
            Loc::In(c) => facts.push(fact_row(&Predicate::In(o, c), m)),
            Loc::Held => facts.push(fact_row(&Predicate::Holding(m.robot, o), m)),
            Loc::NA => {}
        }
        if state.clean_of(o) == crate::world::CleanState::Dirty {
            facts.push(fact_row(&Predicate::Dirty(o), m));
        }
        if let crate::world::FillState::Filled(l) = state.fill_of(o) {
            facts.push(fact_row(&Predicate::FilledWith(o, l), m));
        }
    }
    let file = WorldFile {
        version: WORLD_FORMAT_VERSION,
        profile: profile_name(m.profile).to_string(),
        cell_size: m.grid().cell_size(),
        grid: m.grid().to_raster(),
        capacity_limit: m.capacity_limit,
        disposal: m.entity(m.disposal).id.clone(),
        costs: CostsFile {
            pick: m.costs.pick.as_f64(),
            place: m.costs.place.as_f64(),
            wash: m.costs.wash.as_f64(),
            fill: m.costs.fill.as_f64(),
            make_coffee: m.costs.make_coffee.as_f64(),
            clear: m.costs.clear.as_f64(),
        },
        vocab: m.vocab.clone(),
        entities,
        facts,
    };
    serde_json::to_string_pretty(&file).expect("world serialization cannot fail")
}

fn fact_row(p: &Predicate, m: &WorldModel) -> Vec<String> {
    let mut row = vec![p.name().to_string()];
    row.extend(p.args().iter().map(|&a| m.entity(a).id.clone()));
    row
}

/// Parses a world file back into a state.
pub fn world_from_json(json: &str) -> Result<WorldState, WorldError> {
    let file: WorldFile =
        serde_json::from_str(json).map_err(|e| WorldError::Parse(e.to_string()))?;
    if file.version != WORLD_FORMAT_VERSION {
        return Err(WorldError::Parse(format!(
            "unsupported world format version {}",
            file.version
        )));
    }
    let profile = parse_profile(&file.profile)?;
    let grid = Arc::new(OccupancyGrid::from_raster(&file.grid, file.cell_size)?);
    // first pass resolves string ids to dense indices for room references
    let index_of = |id: &str| -> Result<EntityId, WorldError> {
        file.entities
            .iter()
            .position(|e| e.id == id)
            .map(|i| EntityId(i as u32))
            .ok_or_else(|| WorldError::UnknownEntity(id.to_string()))
    };
    let mut entities = Vec::with_capacity(file.entities.len());
    let mut robot_cell = None;
    for ef in &file.entities {
        let kind = parse_kind(&ef.kind)?;
        let mut attrs = AttrSet::default();
        for a in &ef.attributes {
            attrs.insert(Attr::from_name(a).ok_or_else(|| {
                WorldError::Parse(format!("unknown attribute `{a}` on `{}`", ef.id))
            })?);
        }
        let cell = ef.cell.map(|[x, y]| Cell::new(x, y));
        if kind == Kind::Robot {
            robot_cell = cell;
        }
        entities.push(Entity {
            id: ef.id.clone(),
            name: ef.name.clone(),
            kind,
            cell,
            room: ef.room.as_deref().map(index_of).transpose()?,
            bounds: ef
                .bounds
                .map(|[[ax, ay], [bx, by]]| (Cell::new(ax, ay), Cell::new(bx, by))),
            attrs,
        });
    }
    let costs = ActionCosts {
        pick: crate::cost::Cost::from_units(file.costs.pick),
        place: crate::cost::Cost::from_units(file.costs.place),
        wash: crate::cost::Cost::from_units(file.costs.wash),
        fill: crate::cost::Cost::from_units(file.costs.fill),
        make_coffee: crate::cost::Cost::from_units(file.costs.make_coffee),
        clear: crate::cost::Cost::from_units(file.costs.clear),
    };
    let model = WorldModel::build(
        profile,
        entities,
        grid,
        costs,
        file.capacity_limit,
        &file.disposal,
        file.vocab,
    )?;
    let robot_cell =
        robot_cell.ok_or_else(|| WorldError::Parse("robot entity has no cell".into()))?;
    let facts = file
        .facts
        .iter()
        .map(|row| parse_fact(row, &model))
        .collect::<Result<Vec<_>, _>>()?;
    WorldState::from_facts(model, robot_cell, &facts)
}

fn parse_fact(row: &[String], model: &WorldModel) -> Result<Predicate, WorldError> {
    let (name, args) = row
        .split_first()
        .ok_or_else(|| WorldError::Parse("empty fact row".into()))?;
    let args = args
        .iter()
        .map(|id| model.lookup(id))
        .collect::<Result<Vec<_>, _>>()?;
    Predicate::from_parts(name, &args)
        .ok_or_else(|| WorldError::Parse(format!("bad fact `{}/{}`", name, args.len())))
}

pub fn save_world(state: &WorldState, path: &Path) -> Result<(), WorldError> {
    std::fs::write(path, world_to_json(state))?;
    Ok(())
}

pub fn load_world(path: &Path) -> Result<WorldState, WorldError> {
    world_from_json(&std::fs::read_to_string(path)?)
}

/// Serializes a task distribution; entity references become string ids.
pub fn distribution_to_json(dist: &TaskDistribution, model: &WorldModel) -> String {
    let tasks = dist
        .entries()
        .iter()
        .map(|(task, weight)| TaskFile {
            label: task.label.clone(),
            goal: task.goal.iter().map(|p| fact_row(p, model)).collect(),
            weight: *weight,
        })
        .collect();
    let file = DistributionFile {
        version: DISTRIBUTION_FORMAT_VERSION,
        tasks,
    };
    serde_json::to_string_pretty(&file).expect("distribution serialization cannot fail")
}

pub fn distribution_from_json(
    json: &str,
    model: &WorldModel,
) -> Result<TaskDistribution, WorldError> {
    let file: DistributionFile =
        serde_json::from_str(json).map_err(|e| WorldError::Parse(e.to_string()))?;
    if file.version != DISTRIBUTION_FORMAT_VERSION {
        return Err(WorldError::Parse(format!(
            "unsupported distribution format version {}",
            file.version
        )));
    }
    let mut entries = Vec::with_capacity(file.tasks.len());
    for t in &file.tasks {
        let goal = t
            .goal
            .iter()
            .map(|row| parse_fact(row, model))
            .collect::<Result<Vec<_>, _>>()?;
        entries.push((TaskSpec::new(t.label.clone(), goal), t.weight));
    }
    TaskDistribution::new(entries).map_err(|e| WorldError::Parse(e.to_string()))
}

pub fn save_distribution(
    dist: &TaskDistribution,
    model: &WorldModel,
    path: &Path,
) -> Result<(), WorldError> {
    std::fs::write(path, distribution_to_json(dist, model))?;
    Ok(())
}

pub fn load_distribution(path: &Path, model: &WorldModel) -> Result<TaskDistribution, WorldError> {
    distribution_from_json(&std::fs::read_to_string(path)?, model)
}

pub fn save_regressor(model: &Regressor, path: &Path) -> Result<(), WorldError> {
    let json =
        serde_json::to_string(model).map_err(|e| WorldError::Parse(e.to_string()))?;
    std::fs::write(path, json)?;
    Ok(())
}

pub fn load_regressor(path: &Path) -> Result<Regressor, WorldError> {
    serde_json::from_str(&std::fs::read_to_string(path)?)
        .map_err(|e| WorldError::Parse(e.to_string()))
}
