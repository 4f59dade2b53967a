//! One-way export of an instance to classical planning text documents
//! (domain + problem), for cross-checking against external solvers.
//!
//! Motion is abstracted to container-level locations with exact
//! shortest-path move costs; the grid's adjacency nuance (manipulating a
//! neighbor container without stepping onto it) is conservatively dropped,
//! so external plan costs upper-bound ours. The export is never parsed
//! back.

use crate::world::{Attr, CleanState, FillState, Kind, Loc, Predicate, TaskSpec, WorldState};
use std::fmt::Write;

const START_LOC: &str = "loc-start";

/// Domain document shared by every instance of the same profile.
pub fn export_domain(state: &WorldState) -> String {
    let m = &state.model;
    let mut s = String::new();
    let _ = write!(
        s,
        "(define (domain anticipatory-service)\n\
         \x20 (:requirements :strips :typing :adl :action-costs)\n\
         \x20 (:types location movable liquid - object)\n\
         \x20 (:predicates\n\
         \x20   (robot-at ?l - location)\n\
         \x20   (in ?o - movable ?l - location)\n\
         \x20   (holding ?o - movable)\n\
         \x20   (hand-empty)\n\
         \x20   (dirty ?o - movable)\n\
         \x20   (clean-p ?o - movable)\n\
         \x20   (filled ?o - movable ?q - liquid)\n\
         \x20   (vessel-empty ?o - movable)\n\
         \x20   (washable ?o - movable)\n\
         \x20   (fillable ?o - movable)\n\
         \x20   (sink-loc ?l - location)\n\
         \x20   (water-loc ?l - location)\n\
         \x20   (coffee-loc ?l - location)\n\
         \x20   (disposal-loc ?l - location))\n\
         \x20 (:functions (total-cost) (move-cost ?a ?b - location))\n"
    );
    let costs = &m.costs;
    let _ = write!(
        s,
        "\x20 (:action move\n\
         \x20   :parameters (?from ?to - location)\n\
         \x20   :precondition (robot-at ?from)\n\
         \x20   :effect (and (not (robot-at ?from)) (robot-at ?to)\n\
         \x20     (increase (total-cost) (move-cost ?from ?to))))\n\
         \x20 (:action pick\n\
         \x20   :parameters (?o - movable ?l - location)\n\
         \x20   :precondition (and (robot-at ?l) (in ?o ?l) (hand-empty))\n\
         \x20   :effect (and (not (in ?o ?l)) (not (hand-empty)) (holding ?o)\n\
         \x20     (increase (total-cost) {pick})))\n\
         \x20 (:action place\n\
         \x20   :parameters (?o - movable ?l - location)\n\
         \x20   :precondition (and (robot-at ?l) (holding ?o))\n\
         \x20   :effect (and (in ?o ?l) (hand-empty) (not (holding ?o))\n\
         \x20     (increase (total-cost) {place})))\n\
         \x20 (:action wash\n\
         \x20   :parameters (?o - movable ?l - location)\n\
         \x20   :precondition (and (robot-at ?l) (sink-loc ?l) (in ?o ?l) (washable ?o))\n\
         \x20   :effect (and (clean-p ?o) (not (dirty ?o)) (vessel-empty ?o)\n\
         \x20     (forall (?q - liquid) (not (filled ?o ?q)))\n\
         \x20     (increase (total-cost) {wash})))\n\
         \x20 (:action fill-water\n\
         \x20   :parameters (?o - movable ?l - location ?q - liquid)\n\
         \x20   :precondition (and (robot-at ?l) (water-loc ?l) (holding ?o)\n\
         \x20     (fillable ?o) (vessel-empty ?o))\n\
         \x20   :effect (and (filled ?o ?q) (not (vessel-empty ?o))\n\
         \x20     (increase (total-cost) {fill})))\n\
         \x20 (:action make-coffee\n\
         \x20   :parameters (?o - movable ?l - location ?q - liquid)\n\
         \x20   :precondition (and (robot-at ?l) (coffee-loc ?l) (holding ?o)\n\
         \x20     (fillable ?o) (vessel-empty ?o) (clean-p ?o))\n\
         \x20   :effect (and (filled ?o ?q) (not (vessel-empty ?o))\n\
         \x20     (increase (total-cost) {coffee})))\n\
         \x20 (:action clear\n\
         \x20   :parameters (?l - location ?d - location)\n\
         \x20   :precondition (and (robot-at ?l) (disposal-loc ?d) (hand-empty))\n\
         \x20   :effect (and (forall (?o - movable)\n\
         \x20     (when (in ?o ?l) (and (not (in ?o ?l)) (in ?o ?d))))\n\
         \x20     (increase (total-cost) {clear})))\n\
         )\n",
        pick = costs.pick,
        place = costs.place,
        wash = costs.wash,
        fill = costs.fill,
        coffee = costs.make_coffee,
        clear = costs.clear,
    );
    s
}

fn goal_atom(p: &Predicate, state: &WorldState) -> String {
    let m = &state.model;
    let id = |e: crate::world::EntityId| m.entity(e).id.clone();
    match *p {
        Predicate::At(_, c) => format!("(robot-at {})", id(c)),
        Predicate::In(o, c) | Predicate::ServedAt(o, c) => {
            format!("(in {} {})", id(o), id(c))
        }
        Predicate::Holding(_, o) => format!("(holding {})", id(o)),
        Predicate::HandEmpty(_) => "(hand-empty)".to_string(),
        Predicate::Dirty(o) => format!("(dirty {})", id(o)),
        Predicate::Clean(o) => format!("(clean-p {})", id(o)),
        Predicate::FilledWith(o, q) => format!("(filled {} {})", id(o), id(q)),
        Predicate::Empty(x) => {
            if m.is_container(x) {
                format!(
                    "(forall (?o - movable) (not (in ?o {})))",
                    id(x)
                )
            } else {
                format!("(vessel-empty {})", id(x))
            }
        }
    }
}

/// Problem document for one state and task.
pub fn export_problem(state: &WorldState, task: &TaskSpec) -> String {
    let m = &state.model;
    let id = |e: crate::world::EntityId| m.entity(e).id.clone();
    let mut s = String::new();
    let _ = write!(
        s,
        "(define (problem {})\n\x20 (:domain anticipatory-service)\n",
        sanitize(&task.label)
    );

    // locations: containers, plus a start marker when the robot is not on
    // a container cell
    let mut locations: Vec<(String, crate::grid::Cell)> = m
        .containers
        .iter()
        .map(|&c| (id(c), m.cell_of(c).unwrap()))
        .collect();
    let robot_loc = locations
        .iter()
        .find(|(_, cell)| *cell == state.robot_cell)
        .map(|(name, _)| name.clone())
        .unwrap_or_else(|| {
            locations.push((START_LOC.to_string(), state.robot_cell));
            START_LOC.to_string()
        });

    let _ = writeln!(s, "\x20 (:objects");
    let loc_names: Vec<&str> = locations.iter().map(|(n, _)| n.as_str()).collect();
    let _ = writeln!(s, "\x20   {} - location", loc_names.join(" "));
    let movables: Vec<String> = m.movables.iter().map(|&o| id(o)).collect();
    if !movables.is_empty() {
        let _ = writeln!(s, "\x20   {} - movable", movables.join(" "));
    }
    let liquids: Vec<String> = m
        .entities
        .iter()
        .filter(|e| e.kind == Kind::Object && e.is_liquid())
        .map(|e| e.id.clone())
        .collect();
    if !liquids.is_empty() {
        let _ = writeln!(s, "\x20   {} - liquid", liquids.join(" "));
    }
    let _ = writeln!(s, "\x20 )");

    let _ = writeln!(s, "\x20 (:init");
    let _ = writeln!(s, "\x20   (= (total-cost) 0)");
    let _ = writeln!(s, "\x20   (robot-at {robot_loc})");
    for (a, ca) in &locations {
        for (b, cb) in &locations {
            if a != b {
                let d = m
                    .motion
                    .move_cost(*ca, *cb)
                    .ok()
                    .flatten()
                    .map(|c| c.to_string())
                    .unwrap_or_else(|| "1000000".to_string());
                let _ = writeln!(s, "\x20   (= (move-cost {a} {b}) {d})");
            }
        }
    }
    if state.holding().is_none() {
        let _ = writeln!(s, "\x20   (hand-empty)");
    }
    for &o in &m.movables {
        match state.loc_of(o) {
            Loc::In(c) => {
                let _ = writeln!(s, "\x20   (in {} {})", id(o), id(c));
            }
            Loc::Held => {
                let _ = writeln!(s, "\x20   (holding {})", id(o));
            }
            Loc::NA => {}
        }
        match state.clean_of(o) {
            CleanState::Dirty => {
                let _ = writeln!(s, "\x20   (dirty {})", id(o));
            }
            CleanState::Clean => {
                let _ = writeln!(s, "\x20   (clean-p {})", id(o));
            }
            CleanState::NA => {}
        }
        match state.fill_of(o) {
            FillState::Filled(q) => {
                let _ = writeln!(s, "\x20   (filled {} {})", id(o), id(q));
            }
            FillState::Empty => {
                let _ = writeln!(s, "\x20   (vessel-empty {})", id(o));
            }
            FillState::NA => {}
        }
        let e = m.entity(o);
        if e.attrs.contains(Attr::IsWashable) {
            let _ = writeln!(s, "\x20   (washable {})", id(o));
        }
        if e.attrs.contains(Attr::IsFillable) {
            let _ = writeln!(s, "\x20   (fillable {})", id(o));
        }
    }
    for &c in &m.containers {
        let e = m.entity(c);
        if e.attrs.contains(Attr::IsSink) {
            let _ = writeln!(s, "\x20   (sink-loc {})", id(c));
        }
        if e.attrs.contains(Attr::IsWaterSource) {
            let _ = writeln!(s, "\x20   (water-loc {})", id(c));
        }
        if e.attrs.contains(Attr::IsCoffeeSource) {
            let _ = writeln!(s, "\x20   (coffee-loc {})", id(c));
        }
        if c == m.disposal {
            let _ = writeln!(s, "\x20   (disposal-loc {})", id(c));
        }
    }
    let _ = writeln!(s, "\x20 )");

    let goals: Vec<String> = task.goal.iter().map(|p| goal_atom(p, state)).collect();
    let _ = writeln!(s, "\x20 (:goal (and {}))", goals.join(" "));
    let _ = writeln!(s, "\x20 (:metric minimize (total-cost))");
    s.push_str(")\n");
    s
}

fn sanitize(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '-' })
        .collect()
}
