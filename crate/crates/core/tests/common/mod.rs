//! Shared fixtures for the oracle-backed integration tests: a randomized
//! tiny-world sampler and a uniform-cost search that ignores the planner's
//! heuristic entirely.

use antiplan::grid::OccupancyGrid;
use antiplan::world::{ActionCosts, Attr, AttrSet, Entity, Kind, Predicate, Profile, TaskSpec};
use antiplan::{Cell, Cost, WorldState};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BinaryHeap, HashMap};
use std::sync::Arc;

const VOCAB: &[&str] = &[
    "robot", "kitchen", "sink", "counter", "table", "coffee_machine", "cup", "mug", "apple",
    "water", "coffee",
];

fn ent(id: &str, kind: Kind, cell: Option<Cell>, attrs: AttrSet) -> Entity {
    Entity {
        id: id.to_string(),
        name: id.to_string(),
        kind,
        cell,
        room: None,
        bounds: None,
        attrs,
    }
}

/// A random open-grid world with 2-3 containers (one sink) and 1-3 objects,
/// small enough for exhaustive search. Robot starts on a container cell.
pub fn tiny_world(rng: &mut ChaCha8Rng) -> WorldState {
    let w = rng.gen_range(6..=9);
    let h = rng.gen_range(4..=6);
    let grid = Arc::new(OccupancyGrid::new(w, h, 1.0));

    let mut cells: Vec<Cell> = (0..h).flat_map(|y| (0..w).map(move |x| Cell::new(x, y))).collect();
    cells.shuffle(rng);

    let mut kitchen = ent("kitchen", Kind::Room, Some(Cell::new(w / 2, h / 2)), AttrSet::empty());
    kitchen.bounds = Some((Cell::new(0, 0), Cell::new(w - 1, h - 1)));

    let mut entities = vec![kitchen];
    entities.push(ent(
        "sink",
        Kind::Container,
        Some(cells.pop().unwrap()),
        AttrSet::empty().with(Attr::IsSink).with(Attr::IsWaterSource),
    ));
    let mut container_ids = vec!["sink"];
    let extra: &[(&str, AttrSet)] = &[
        ("counter", AttrSet::empty()),
        ("table", AttrSet::empty().with(Attr::IsSurface)),
        ("coffee_machine", AttrSet::empty().with(Attr::IsCoffeeSource)),
    ];
    let n_extra = rng.gen_range(1..=2);
    let mut picks: Vec<usize> = (0..extra.len()).collect();
    picks.shuffle(rng);
    for &i in picks.iter().take(n_extra) {
        let (id, attrs) = &extra[i];
        entities.push(ent(id, Kind::Container, Some(cells.pop().unwrap()), *attrs));
        container_ids.push(id);
    }

    let objs: &[(&str, AttrSet)] = &[
        ("cup", AttrSet::empty().with(Attr::IsWashable).with(Attr::IsFillable)),
        ("mug", AttrSet::empty().with(Attr::IsWashable).with(Attr::IsFillable)),
        ("apple", AttrSet::empty()),
    ];
    let n_objs = rng.gen_range(1..=3);
    let mut object_ids = Vec::new();
    for (id, attrs) in objs.iter().take(n_objs) {
        entities.push(ent(id, Kind::Object, None, *attrs));
        object_ids.push(*id);
    }
    entities.push(ent("water", Kind::Object, None, AttrSet::empty().with(Attr::IsLiquid)));
    entities.push(ent("coffee", Kind::Object, None, AttrSet::empty().with(Attr::IsLiquid)));

    let start = *container_ids.choose(rng).unwrap();
    let start_cell = entities
        .iter()
        .find(|e| e.id == start)
        .and_then(|e| e.cell)
        .unwrap();
    entities.insert(0, ent("robot", Kind::Robot, Some(start_cell), AttrSet::empty()));

    let model = antiplan::world::WorldModel::build(
        Profile::Restaurant,
        entities,
        grid,
        ActionCosts::default(),
        None,
        "sink",
        VOCAB.iter().map(|s| s.to_string()).collect(),
    )
    .unwrap();

    let mut facts = Vec::new();
    for id in &object_ids {
        let o = model.lookup(id).unwrap();
        let c = model.lookup(container_ids.choose(rng).unwrap()).unwrap();
        facts.push(Predicate::In(o, c));
        if model.has_attr(o, Attr::IsWashable) && rng.gen_bool(0.5) {
            facts.push(Predicate::Dirty(o));
        }
        if model.has_attr(o, Attr::IsFillable) && rng.gen_bool(0.3) {
            facts.push(Predicate::FilledWith(o, model.lookup("water").unwrap()));
        }
    }
    let robot_cell = model.cell_of(model.robot).unwrap();
    WorldState::from_facts(model, robot_cell, &facts).unwrap()
}

/// Random single-predicate goals that are plausibly achievable in a
/// [`tiny_world`]. Callers discard the unsolvable ones via search.
pub fn tiny_tasks(state: &WorldState, rng: &mut ChaCha8Rng, n: usize) -> Vec<TaskSpec> {
    let m = &state.model;
    let mut menu: Vec<Predicate> = Vec::new();
    let containers: Vec<_> = m.containers.clone();
    for &o in &m.movables {
        for &c in &containers {
            menu.push(Predicate::In(o, c));
        }
        if m.has_attr(o, Attr::IsWashable) {
            menu.push(Predicate::Clean(o));
        }
        if m.has_attr(o, Attr::IsFillable) {
            if let Some(water) = m.water {
                menu.push(Predicate::FilledWith(o, water));
            }
            if let Some(coffee) = m.coffee {
                if m.coffee_sources().next().is_some() {
                    menu.push(Predicate::FilledWith(o, coffee));
                }
            }
        }
    }
    for &c in &containers {
        menu.push(Predicate::Empty(c));
    }
    menu.shuffle(rng);
    menu.truncate(n);
    menu.iter().enumerate().map(|(i, &p)| TaskSpec::new(format!("t{i}"), vec![p])).collect()
}

/// Uniform-cost search over the full state graph. Exact optimal cost, or
/// `None` when the goal is unreachable. Panics past `max_expansions` so a
/// blown budget cannot masquerade as unsolvability.
pub fn ucs_cost(s0: &WorldState, task: &TaskSpec, max_expansions: usize) -> Option<Cost> {
    let mut best: HashMap<antiplan::world::StateKey, Cost> = HashMap::new();
    let mut open: BinaryHeap<std::cmp::Reverse<(Cost, usize)>> = BinaryHeap::new();
    let mut states = vec![s0.clone()];
    best.insert(s0.key(), Cost::ZERO);
    open.push(std::cmp::Reverse((Cost::ZERO, 0)));
    let mut expansions = 0;
    while let Some(std::cmp::Reverse((g, idx))) = open.pop() {
        let s = states[idx].clone();
        if best.get(&s.key()).copied() < Some(g) {
            continue;
        }
        if s.satisfies(task).unwrap() {
            return Some(g);
        }
        expansions += 1;
        assert!(expansions <= max_expansions, "ucs oracle exceeded {max_expansions} expansions");
        for a in s.applicable_actions() {
            let succ = s.apply(&a).unwrap();
            let ng = g + a.cost;
            let key = succ.key();
            if best.get(&key).is_some_and(|&old| old <= ng) {
                continue;
            }
            best.insert(key, ng);
            states.push(succ);
            open.push(std::cmp::Reverse((ng, states.len() - 1)));
        }
    }
    None
}

/// A fresh rng for the given test stream.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
