//! Small hand-built worlds used throughout the test suites and docs.

use crate::grid::{Cell, OccupancyGrid};
use crate::world::{
    ActionCosts, Attr, AttrSet, Entity, Kind, Predicate, Profile, TaskSpec, WorldModel, WorldState,
};
use std::sync::Arc;

pub const TINY_VOCAB: &[&str] = &[
    "robot", "kitchen", "sink", "counter", "shelf", "table", "coffee_machine", "cup", "mug",
    "apple", "water", "coffee",
];

fn vocab() -> Vec<String> {
    TINY_VOCAB.iter().map(|s| s.to_string()).collect()
}

fn ent(id: &str, name: &str, kind: Kind, cell: Option<Cell>, attrs: AttrSet) -> Entity {
    Entity {
        id: id.to_string(),
        name: name.to_string(),
        kind,
        cell,
        room: None,
        bounds: None,
        attrs,
    }
}

/// A one-room world: sink (water source), counter, table, coffee machine,
/// one washable+fillable cup, one apple. Robot starts mid-room.
///
/// Layout (9 wide, 5 tall, open):
///   sink (1,1)   counter (4,1)   table (7,1)   coffee machine (1,3)
pub fn tiny_restaurant() -> WorldState {
    let grid = Arc::new(OccupancyGrid::new(9, 5, 1.0));
    let mut kitchen = ent("kitchen", "kitchen", Kind::Room, Some(Cell::new(4, 2)), AttrSet::empty());
    kitchen.bounds = Some((Cell::new(0, 0), Cell::new(8, 4)));
    let entities = vec![
        ent("robot", "robot", Kind::Robot, Some(Cell::new(4, 3)), AttrSet::empty()),
        kitchen,
        ent(
            "sink",
            "sink",
            Kind::Container,
            Some(Cell::new(1, 1)),
            AttrSet::empty().with(Attr::IsSink).with(Attr::IsWaterSource),
        ),
        ent("counter", "counter", Kind::Container, Some(Cell::new(4, 1)), AttrSet::empty()),
        ent(
            "table",
            "table",
            Kind::Container,
            Some(Cell::new(7, 1)),
            AttrSet::empty().with(Attr::IsSurface),
        ),
        ent(
            "coffee_machine",
            "coffee_machine",
            Kind::Container,
            Some(Cell::new(1, 3)),
            AttrSet::empty().with(Attr::IsCoffeeSource),
        ),
        ent(
            "cup",
            "cup",
            Kind::Object,
            None,
            AttrSet::empty().with(Attr::IsWashable).with(Attr::IsFillable),
        ),
        ent("apple", "apple", Kind::Object, None, AttrSet::empty()),
        ent("water", "water", Kind::Object, None, AttrSet::empty().with(Attr::IsLiquid)),
        ent("coffee", "coffee", Kind::Object, None, AttrSet::empty().with(Attr::IsLiquid)),
    ];
    let model = WorldModel::build(
        Profile::Restaurant,
        entities,
        grid,
        ActionCosts::default(),
        None,
        "sink",
        vocab(),
    )
    .unwrap();
    let cup = model.lookup("cup").unwrap();
    let counter = model.lookup("counter").unwrap();
    let apple = model.lookup("apple").unwrap();
    let table = model.lookup("table").unwrap();
    let robot_cell = model.cell_of(model.robot).unwrap();
    WorldState::from_facts(
        model,
        robot_cell,
        &[
            Predicate::In(cup, counter),
            Predicate::Dirty(cup),
            Predicate::In(apple, table),
        ],
    )
    .unwrap()
}

/// Two containers and one object on a 7x3 open strip, for hand enumerations.
/// Robot starts adjacent to container `a`.
pub fn two_container_world() -> WorldState {
    let grid = Arc::new(OccupancyGrid::new(7, 3, 1.0));
    let entities = vec![
        ent("robot", "robot", Kind::Robot, Some(Cell::new(1, 2)), AttrSet::empty()),
        ent("kitchen", "kitchen", Kind::Room, Some(Cell::new(3, 1)), AttrSet::empty()),
        ent("a", "counter", Kind::Container, Some(Cell::new(1, 1)), AttrSet::empty()),
        ent("b", "shelf", Kind::Container, Some(Cell::new(5, 2)), AttrSet::empty()),
        ent("cup", "cup", Kind::Object, None, AttrSet::empty()),
    ];
    let model = WorldModel::build(
        Profile::Restaurant,
        entities,
        grid,
        ActionCosts::default(),
        None,
        "a",
        vocab(),
    )
    .unwrap();
    let cup = model.lookup("cup").unwrap();
    let a = model.lookup("a").unwrap();
    let robot_cell = model.cell_of(model.robot).unwrap();
    WorldState::from_facts(model, robot_cell, &[Predicate::In(cup, a)]).unwrap()
}

/// Goal `in(cup, b)` for [`two_container_world`].
pub fn move_cup_task(state: &WorldState) -> TaskSpec {
    let cup = state.model.lookup("cup").unwrap();
    let b = state.model.lookup("b").unwrap();
    TaskSpec::new("PickAndPlace(cup,b)", vec![Predicate::In(cup, b)])
}
