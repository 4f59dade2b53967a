//! Optimal forward state-space search.
//!
//! Best-first search (A*) over the symbolic state space with an admissible
//! lower-bound heuristic built from grid distances and the constant
//! manipulation costs. On instances the budget can exhaust, the returned cost
//! is exact-optimal; when the budget runs out the best incumbent found so far
//! is returned with `optimal = false`.

use crate::cost::Cost;
use crate::error::PlanError;
use crate::grid::SQRT2;
use crate::world::{
    Attr, CleanState, EntityId, FillState, GroundedAction, Loc, Predicate, TaskSpec, WorldState,
};
use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::time::{Duration, Instant};

#[derive(Clone, Copy, Debug)]
pub struct SearchBudget {
    pub max_expansions: usize,
    pub max_time: Duration,
}

impl Default for SearchBudget {
    fn default() -> SearchBudget {
        SearchBudget {
            // expansion-bounded by default; a wall-clock cutoff would make
            // results depend on machine speed
            max_expansions: 200_000,
            max_time: Duration::from_secs(3600),
        }
    }
}

impl SearchBudget {
    pub fn new(max_expansions: usize, max_time: Duration) -> SearchBudget {
        assert!(max_expansions > 0 && max_time > Duration::ZERO);
        SearchBudget {
            max_expansions,
            max_time,
        }
    }
}

/// An ordered grounded-action sequence solving a task.
#[derive(Clone, Debug)]
pub struct Plan {
    pub actions: Vec<GroundedAction>,
    pub total_cost: Cost,
    pub terminal: WorldState,
    /// True when the search proved the cost minimal before budget exhaustion.
    pub optimal: bool,
    /// Nodes expanded by the search that produced this plan.
    pub expansions: usize,
}

impl Plan {
    /// Alg.-style accessor for the plan's terminal state.
    pub fn tail(&self) -> &WorldState {
        &self.terminal
    }

    /// Replays the plan from `initial`, checking applicability and cost
    /// accounting. Used by tests and the harness to validate plans.
    pub fn replay(&self, initial: &WorldState) -> Result<WorldState, PlanError> {
        let mut state = initial.clone();
        let mut cost = Cost::ZERO;
        for a in &self.actions {
            state = state.apply(a)?;
            cost += a.cost;
        }
        if cost != self.total_cost {
            return Err(PlanError::World(crate::error::WorldError::Invalid(
                format!("plan cost {} != action sum {}", self.total_cost, cost),
            )));
        }
        Ok(state)
    }
}

/// Admissible lower bound on the remaining cost to satisfy `task`.
///
/// Per unsatisfied goal predicate, sums the unavoidable travel legs (robot to
/// the object's container, container to the predicate's target) and the
/// unavoidable manipulation costs. The bound is the larger of the best
/// single-predicate total and the best single-predicate travel plus the sum
/// of manipulation costs that cannot be shared between predicates (washes
/// deduplicated per object, since one wash both cleans and empties). Travel
/// legs are slackened by one diagonal step per manipulation endpoint because
/// the robot may act from any cell within Chebyshev distance 1 of a
/// container. `None` means the predicate is provably unreachable.
pub fn heuristic(state: &WorldState, task: &TaskSpec) -> Option<Cost> {
    let m = &state.model;
    let costs = &m.costs;
    // one diagonal step of slack, plus one milli against rounding
    let slack = Cost::from_units(SQRT2 * m.grid().cell_size()) + Cost(1);
    let dist = |a: EntityId, cell: crate::grid::Cell| -> Option<Cost> {
        let src = m.cell_of(a)?;
        m.motion.move_cost(src, cell).ok().flatten()
    };
    let robot_to = |c: EntityId| -> Option<Cost> {
        // symmetric query so distance fields stay keyed by container cells
        dist(c, state.robot_cell)
    };
    let between = |a: EntityId, b: EntityId| -> Option<Cost> { dist(a, m.cell_of(b)?) };
    let reach = |c: EntityId| -> Option<Cost> { Some(robot_to(c)?.saturating_sub(slack)) };
    let leg = |a: EntityId, b: EntityId| -> Option<Cost> {
        Some(between(a, b)?.saturating_sub(slack + slack))
    };
    // travel to `o`'s current holder and the pick needed to take it, split
    // so the pick can enter the summed manipulation bound
    let fetch = |o: EntityId| -> Option<(Cost, Cost, Option<EntityId>)> {
        match state.loc_of(o) {
            Loc::Held => Some((Cost::ZERO, Cost::ZERO, None)),
            Loc::In(c) => Some((reach(c)?, costs.pick, Some(c))),
            Loc::NA => None,
        }
    };
    // travel from `o`'s current holder (or the robot, if held) next to `t`
    let deliver_leg = |from: Option<EntityId>, t: EntityId| -> Option<Cost> {
        match from {
            Some(c) if c == t => Some(Cost::ZERO),
            Some(c) => leg(c, t),
            None => reach(t),
        }
    };
    let nearest = |from: Option<EntityId>, targets: &mut dyn Iterator<Item = EntityId>| -> Option<Cost> {
        targets
            .filter_map(|t| deliver_leg(from, t))
            .min()
    };

    let mut best_total = Cost::ZERO;
    let mut best_travel = Cost::ZERO;
    let mut manip_sum = Cost::ZERO;
    let mut washed: Vec<EntityId> = Vec::new();
    for &p in &task.goal {
        if state.holds(p) {
            continue;
        }
        // one wash both cleans and empties, so its cost enters the sum once
        let mut wash_once = |o: EntityId| -> Cost {
            if washed.contains(&o) {
                Cost::ZERO
            } else {
                washed.push(o);
                costs.wash
            }
        };
        // (travel bound, full manipulation, manipulation safe to sum across
        // predicates: actions no other predicate's satisfaction can share)
        let (trav, full, safe) = match p {
            Predicate::At(r, c) => {
                if r != m.robot || !m.is_container(c) {
                    return None;
                }
                (robot_to(c)?, Cost::ZERO, Cost::ZERO)
            }
            Predicate::In(o, c) | Predicate::ServedAt(o, c) => {
                if !m.is_container(c) || !m.contains_id(o) || !m.entity(o).is_movable() {
                    return None;
                }
                if c == m.disposal {
                    // a single clear relocates contents here without a
                    // carry leg, so only the fetch travel is forced
                    let (t, pick, _) = fetch(o)?;
                    ((t), (pick + costs.place).min(costs.clear), Cost::ZERO)
                } else {
                    let (t, pick, from) = fetch(o)?;
                    let manip = pick + costs.place;
                    (t + deliver_leg(from, c)?, manip, manip)
                }
            }
            Predicate::Holding(r, o) => {
                if r != m.robot {
                    return None;
                }
                let (t, pick, _) = fetch(o)?;
                (t, pick, pick)
            }
            // the place that frees the hand may also satisfy an In goal
            Predicate::HandEmpty(_) => (Cost::ZERO, costs.place, Cost::ZERO),
            Predicate::Clean(o) => {
                if !m.has_attr(o, Attr::IsWashable) {
                    return None;
                }
                let wash = wash_once(o);
                match state.loc_of(o) {
                    Loc::In(c) if m.has_attr(c, Attr::IsSink) => {
                        (reach(c)?, costs.wash, wash)
                    }
                    _ => {
                        let (t, pick, from) = fetch(o)?;
                        (
                            t + nearest(from, &mut m.sinks())?,
                            pick + costs.place + costs.wash,
                            wash,
                        )
                    }
                }
            }
            Predicate::Dirty(_) => return None, // no action dirties an object
            Predicate::FilledWith(o, l) => {
                if !m.has_attr(o, Attr::IsFillable) {
                    return None;
                }
                let (brew, sources): (Cost, Vec<EntityId>) = if Some(l) == m.water {
                    (costs.fill, m.water_sources().collect())
                } else if Some(l) == m.coffee {
                    (costs.make_coffee, m.coffee_sources().collect())
                } else {
                    return None;
                };
                if sources.is_empty() {
                    return None;
                }
                let (t, pick, from) = fetch(o)?;
                let mut extra = Cost::ZERO;
                // a wrong liquid must be washed out first; coffee needs a
                // non-dirty vessel
                if matches!(state.fill_of(o), FillState::Filled(cur) if cur != l) {
                    extra += costs.wash;
                } else if Some(l) == m.coffee && state.clean_of(o) == CleanState::Dirty {
                    extra += costs.wash;
                }
                (
                    t + nearest(from, &mut sources.iter().copied())?,
                    pick + brew + extra,
                    brew,
                )
            }
            Predicate::Empty(x) => {
                if m.is_container(x) {
                    // contents must be removed: the cheaper of clearing or a
                    // single pick, either of which may serve an In goal too
                    (reach(x)?, costs.clear.min(costs.pick), Cost::ZERO)
                } else if m.contains_id(x) && m.has_attr(x, Attr::IsFillable) {
                    // only washing empties a vessel
                    let wash = wash_once(x);
                    match state.loc_of(x) {
                        Loc::In(c) if m.has_attr(c, Attr::IsSink) => {
                            (reach(c)?, costs.wash, wash)
                        }
                        _ => {
                            let (t, pick, from) = fetch(x)?;
                            (
                                t + nearest(from, &mut m.sinks())?,
                                pick + costs.place + costs.wash,
                                wash,
                            )
                        }
                    }
                } else {
                    return None;
                }
            }
        };
        best_total = best_total.max(trav + full);
        best_travel = best_travel.max(trav);
        manip_sum += safe;
    }
    Some(best_total.max(best_travel + manip_sum))
}

struct Node {
    state: WorldState,
    g: Cost,
    parent: Option<(usize, GroundedAction)>,
}

/// Minimum-cost plan from `state` to the goal space of `task`.
///
/// Tie-breaking is deterministic: lower f, then lower h, then fewer actions,
/// then insertion order (successors are generated in canonical action order).
pub fn task_plan(
    state: &WorldState,
    task: &TaskSpec,
    budget: &SearchBudget,
) -> Result<Plan, PlanError> {
    // vocabulary check up front
    for p in &task.goal {
        for arg in p.args() {
            if !state.model.contains_id(arg) {
                return Err(PlanError::World(crate::error::WorldError::UnknownEntity(
                    format!("e{}", arg.0),
                )));
            }
        }
    }
    if state.satisfies(task)? {
        return Ok(Plan {
            actions: Vec::new(),
            total_cost: Cost::ZERO,
            terminal: state.clone(),
            optimal: true,
            expansions: 0,
        });
    }
    let start = Instant::now();
    let mut nodes: Vec<Node> = vec![Node {
        state: state.clone(),
        g: Cost::ZERO,
        parent: None,
    }];
    // Reverse((f, h, plan_len, seq)) -> node index
    let mut open: BinaryHeap<(Reverse<(Cost, Cost, usize, usize)>, usize)> = BinaryHeap::new();
    let mut best_g: HashMap<crate::world::StateKey, Cost> = HashMap::new();
    let h0 = match heuristic(state, task) {
        Some(h) => h,
        None => return Err(PlanError::Unsolvable),
    };
    best_g.insert(state.key(), Cost::ZERO);
    let mut seq = 0usize;
    open.push((Reverse((h0, h0, 0, seq)), 0));
    let mut incumbent: Option<usize> = None;
    let mut incumbent_g = Cost(u64::MAX);
    let mut expansions = 0usize;

    let build_plan = |nodes: &[Node], idx: usize, optimal: bool, expansions: usize| -> Plan {
        let mut actions = Vec::new();
        let mut cur = idx;
        while let Some((p, a)) = nodes[cur].parent {
            actions.push(a);
            cur = p;
        }
        actions.reverse();
        Plan {
            actions,
            total_cost: nodes[idx].g,
            terminal: nodes[idx].state.clone(),
            optimal,
            expansions,
        }
    };

    while let Some((Reverse((_, _, depth, _)), idx)) = open.pop() {
        let g = nodes[idx].g;
        if best_g.get(&nodes[idx].state.key()).copied() < Some(g) {
            continue; // stale entry
        }
        if nodes[idx].state.satisfies(task)? {
            return Ok(build_plan(&nodes, idx, true, expansions));
        }
        expansions += 1;
        if expansions > budget.max_expansions
            || (expansions % 256 == 0 && start.elapsed() > budget.max_time)
        {
            return match incumbent {
                Some(i) => Ok(build_plan(&nodes, i, false, expansions)),
                None => Err(PlanError::BudgetExhausted),
            };
        }
        for action in nodes[idx].state.applicable_actions() {
            let succ = nodes[idx].state.apply(&action)?;
            let ng = g + action.cost;
            let key = succ.key();
            if best_g.get(&key).is_some_and(|&old| old <= ng) {
                continue;
            }
            best_g.insert(key, ng);
            let Some(h) = heuristic(&succ, task) else {
                continue;
            };
            if succ.satisfies(task)? && ng < incumbent_g {
                incumbent_g = ng;
                incumbent = Some(nodes.len());
            }
            seq += 1;
            let entry = (ng + h, h, depth + 1, seq);
            nodes.push(Node {
                state: succ,
                g: ng,
                parent: Some((idx, action)),
            });
            open.push((Reverse(entry), nodes.len() - 1));
        }
    }
    Err(PlanError::Unsolvable)
}
