//! Atomic state perturbations (for preparation search and augmented-task
//! filtering) and direct predicate imposition.

use super::entity::EntityId;
use super::predicate::Predicate;
use super::state::{CleanState, FillState, Loc, WorldState};
use crate::error::WorldError;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// One atomic state change, the move set of the annealing search.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Perturbation {
    Relocate { obj: EntityId, to: EntityId },
    ToggleClean { obj: EntityId },
    FillWater { obj: EntityId },
    EmptyLiquid { obj: EntityId },
}

impl WorldState {
    /// All legal atomic perturbations, in canonical order.
    pub fn perturbation_candidates(&self) -> Vec<Perturbation> {
        let m = &self.model;
        let mut out = Vec::new();
        for &o in &m.movables {
            if let Loc::In(cur) = self.loc_of(o) {
                for &c in &m.containers {
                    if c != cur && self.has_capacity_for_one_more(c) {
                        out.push(Perturbation::Relocate { obj: o, to: c });
                    }
                }
            }
            match self.clean_of(o) {
                CleanState::Dirty | CleanState::Clean => {
                    out.push(Perturbation::ToggleClean { obj: o })
                }
                CleanState::NA => {}
            }
            match self.fill_of(o) {
                FillState::Empty if m.water.is_some() => {
                    out.push(Perturbation::FillWater { obj: o })
                }
                FillState::Filled(_) => out.push(Perturbation::EmptyLiquid { obj: o }),
                _ => {}
            }
        }
        out
    }

    fn has_capacity_for_one_more(&self, container: EntityId) -> bool {
        match self.model.capacity_limit {
            Some(cap) => self.content_count(container) < cap,
            None => true,
        }
    }

    pub fn apply_perturbation(&self, p: Perturbation) -> WorldState {
        let mut next = self.clone();
        match p {
            Perturbation::Relocate { obj, to } => next.set_loc(obj, Loc::In(to)),
            Perturbation::ToggleClean { obj } => {
                let flipped = match self.clean_of(obj) {
                    CleanState::Dirty => CleanState::Clean,
                    CleanState::Clean => CleanState::Dirty,
                    CleanState::NA => CleanState::NA,
                };
                next.set_clean(obj, flipped);
            }
            Perturbation::FillWater { obj } => {
                next.set_fill(obj, FillState::Filled(self.model.water.unwrap()))
            }
            Perturbation::EmptyLiquid { obj } => next.set_fill(obj, FillState::Empty),
        }
        next
    }

    /// Returns a valid state differing by exactly one atomic change, drawn
    /// uniformly; deterministic per seed.
    pub fn perturb(&self, rng_seed: u64) -> Result<WorldState, WorldError> {
        let candidates = self.perturbation_candidates();
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        let chosen = candidates
            .choose(&mut rng)
            .ok_or(WorldError::NoLegalPerturbation)?;
        Ok(self.apply_perturbation(*chosen))
    }

    /// Imposes goal predicates by direct atomic state edits, without
    /// planning. Errors when a predicate cannot be realized by any edit.
    pub fn impose(&self, preds: &[Predicate]) -> Result<WorldState, WorldError> {
        let m = self.model.clone();
        let mut state = self.clone();
        for &p in preds {
            if state.holds(p) {
                continue;
            }
            match p {
                Predicate::At(r, c) => {
                    if r != m.robot || !m.is_container(c) {
                        return Err(WorldError::Invalid(format!("cannot impose {p}")));
                    }
                    state.robot_cell = m.cell_of(c).unwrap();
                }
                Predicate::In(o, c) => {
                    if !m.is_container(c)
                        || !m.contains_id(o)
                        || !m.entity(o).is_movable()
                        || !state.has_capacity_for_one_more(c)
                    {
                        return Err(WorldError::Invalid(format!("cannot impose {p}")));
                    }
                    state.set_loc(o, Loc::In(c));
                }
                Predicate::Clean(o) if state.clean_of(o) != CleanState::NA => {
                    state.set_clean(o, CleanState::Clean)
                }
                Predicate::Dirty(o) if state.clean_of(o) != CleanState::NA => {
                    state.set_clean(o, CleanState::Dirty)
                }
                Predicate::FilledWith(o, l) if state.fill_of(o) != FillState::NA => {
                    state.set_fill(o, FillState::Filled(l))
                }
                Predicate::Empty(x) => {
                    if m.contains_id(x) && m.is_container(x) {
                        for o in state.contents(x) {
                            state.set_loc(o, Loc::In(m.disposal));
                        }
                    } else if state.fill_of(x) != FillState::NA {
                        state.set_fill(x, FillState::Empty);
                    } else {
                        return Err(WorldError::Invalid(format!("cannot impose {p}")));
                    }
                }
                other => return Err(WorldError::Invalid(format!("cannot impose {other}"))),
            }
        }
        state.validate()?;
        Ok(state)
    }
}
