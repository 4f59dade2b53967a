//! Featurized scene-graph representation of a world state.
//!
//! The graph is the hierarchy root -> rooms -> containers -> objects, with
//! the robot attached to its current room, held objects attached to the
//! robot, and liquid nodes attached to the root plus an edge to every vessel
//! currently filled with them. Every edge is stored in both directions for
//! message passing.
//!
//! Node features: one-hot category name | one-hot kind (4) | normalized
//! position (2) | attribute bits (9). Attribute bits reflect both static
//! entity flags and the current fact set (dirty, empty).

use crate::error::EstimatorError;
use crate::world::{Attr, CleanState, EntityId, FillState, Kind, Loc, WorldState, ATTR_COUNT};
use ndarray::Array2;
use serde::{Deserialize, Serialize};

pub const KIND_ONE_HOT: usize = 4;
pub const POSITION_DIMS: usize = 2;

/// Fixed per-profile feature layout.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureSpec {
    pub name_vocab: Vec<String>,
}

impl FeatureSpec {
    pub fn new(name_vocab: Vec<String>) -> FeatureSpec {
        FeatureSpec { name_vocab }
    }

    pub fn from_state(state: &WorldState) -> FeatureSpec {
        FeatureSpec::new(state.model.vocab.clone())
    }

    pub fn feature_len(&self) -> usize {
        self.name_vocab.len() + KIND_ONE_HOT + POSITION_DIMS + ATTR_COUNT
    }

    fn name_index(&self, name: &str) -> Result<usize, EstimatorError> {
        self.name_vocab
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| EstimatorError::UnknownName(name.to_string()))
    }
}

/// Featurized graph of a state, consumed by the cost regressor.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SceneGraph {
    /// Node features, one row per node.
    pub features: Array2<f64>,
    /// Directed edges; every undirected link appears in both directions.
    pub edges: Vec<(usize, usize)>,
    /// Entity behind each node; `None` for the synthetic root.
    pub node_entities: Vec<Option<EntityId>>,
}

impl SceneGraph {
    pub fn node_count(&self) -> usize {
        self.features.nrows()
    }
}

/// Deterministic conversion of a state into its featurized scene graph.
pub fn convert_to_graph(
    state: &WorldState,
    spec: &FeatureSpec,
) -> Result<SceneGraph, EstimatorError> {
    let m = &state.model;
    let f = spec.feature_len();
    let n_entities = m.entities.len();
    // node 0 is the synthetic root; entity i maps to node i + 1
    let n = n_entities + 1;
    let mut features = Array2::zeros((n, f));
    let mut node_entities = vec![None; n];
    let grid = m.grid();
    let norm = |v: u32, extent: u32| -> f64 {
        if extent <= 1 {
            0.0
        } else {
            v as f64 / (extent - 1) as f64
        }
    };
    let kind_off = spec.name_vocab.len();
    let pos_off = kind_off + KIND_ONE_HOT;
    let attr_off = pos_off + POSITION_DIMS;

    // root: profile name when present in the vocabulary, else zeros
    features[[0, pos_off]] = 0.5;
    features[[0, pos_off + 1]] = 0.5;
    let root_name = match m.profile {
        crate::world::Profile::Home => "home",
        crate::world::Profile::Restaurant => "restaurant",
    };
    if let Ok(i) = spec.name_index(root_name) {
        features[[0, i]] = 1.0;
    }

    let robot_room = state.robot_room();
    for (i, e) in m.entities.iter().enumerate() {
        let id = EntityId(i as u32);
        let node = i + 1;
        node_entities[node] = Some(id);
        features[[node, spec.name_index(&e.name)?]] = 1.0;
        features[[node, kind_off + e.kind.one_hot_index()]] = 1.0;
        let cell = match e.kind {
            Kind::Robot => Some(state.robot_cell),
            Kind::Room | Kind::Container => e.cell,
            Kind::Object => match state.loc_of(id) {
                Loc::In(c) => m.cell_of(c),
                Loc::Held => Some(state.robot_cell),
                Loc::NA => None, // liquids carry no position
            },
        };
        if let Some(c) = cell {
            features[[node, pos_off]] = norm(c.x, grid.width());
            features[[node, pos_off + 1]] = norm(c.y, grid.height());
        }
        let mut attrs = e.attrs;
        // state-dependent bits override the static dirty/empty flags
        match e.kind {
            Kind::Object if e.is_movable() => {
                let mut bits = attrs.0;
                bits &= !(Attr::IsDirty.bit() | Attr::IsEmpty.bit());
                if state.clean_of(id) == CleanState::Dirty {
                    bits |= Attr::IsDirty.bit();
                }
                if state.fill_of(id) == FillState::Empty {
                    bits |= Attr::IsEmpty.bit();
                }
                attrs.0 = bits;
            }
            Kind::Container => {
                let mut bits = attrs.0 & !Attr::IsEmpty.bit();
                if state.content_count(id) == 0 {
                    bits |= Attr::IsEmpty.bit();
                }
                attrs.0 = bits;
            }
            Kind::Robot => {
                let mut bits = attrs.0 & !Attr::IsEmpty.bit();
                if state.holding().is_none() {
                    bits |= Attr::IsEmpty.bit();
                }
                attrs.0 = bits;
            }
            _ => {}
        }
        for attr in attrs.iter() {
            let bit_index = Attr::ALL.iter().position(|&a| a == attr).unwrap();
            features[[node, attr_off + bit_index]] = 1.0;
        }
    }

    let node_of = |id: EntityId| id.index() + 1;
    let mut edges = Vec::new();
    let mut link = |a: usize, b: usize| {
        edges.push((a, b));
        edges.push((b, a));
    };
    for &r in &m.rooms {
        link(0, node_of(r));
    }
    for &c in &m.containers {
        let parent = match m.entity(c).room {
            Some(r) => node_of(r),
            None => 0,
        };
        link(parent, node_of(c));
    }
    for &o in &m.movables {
        match state.loc_of(o) {
            Loc::In(c) => link(node_of(c), node_of(o)),
            Loc::Held => link(node_of(m.robot), node_of(o)),
            Loc::NA => link(0, node_of(o)),
        }
    }
    // robot hangs off its current room (or the root in a room-less world)
    match robot_room {
        Some(r) => link(node_of(r), node_of(m.robot)),
        None => link(0, node_of(m.robot)),
    }
    // liquid nodes: under the root, plus an edge per filled vessel
    for (i, e) in m.entities.iter().enumerate() {
        let id = EntityId(i as u32);
        if e.kind == Kind::Object && e.is_liquid() {
            link(0, node_of(id));
            for &o in &m.movables {
                if state.fill_of(o) == FillState::Filled(id) {
                    link(node_of(o), node_of(id));
                }
            }
        }
    }
    Ok(SceneGraph {
        features,
        edges,
        node_entities,
    })
}
