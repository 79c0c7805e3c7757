//! Hereditary and saturated vertex sets, their closures, the lattice of
//! saturated hereditary sets, and restriction of a graph to a hereditary set.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use thiserror::Error;

use crate::graph::{Graph, GraphError, GraphId, VertexClass, VertexId};

/// Default vertex bound for lattice enumeration.
pub const DEFAULT_LATTICE_BOUND: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IdealError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("vertex set belongs to a different graph")]
    ForeignSet,
    #[error("vertex set is not hereditary: edge {edge} leaves it")]
    NotHereditary { edge: String },
    #[error("vertex set is not saturated")]
    NotSaturated,
    #[error("lattice enumeration limited to {bound} vertices, graph has {vertices}")]
    BoundExceeded { bound: usize, vertices: usize },
}

/// A set of vertices of one particular graph.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VertexSet {
    graph: GraphId,
    members: BTreeSet<VertexId>,
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.members.iter().map(|v| v.0)).finish()
    }
}

impl PartialOrd for VertexSet {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for VertexSet {
    /// Size first, then lexicographic on sorted members.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.members.len().cmp(&other.members.len()).then_with(|| self.members.iter().cmp(other.members.iter()))
    }
}

impl VertexSet {
    pub fn empty(g: &Graph) -> Self {
        VertexSet { graph: g.id(), members: BTreeSet::new() }
    }

    pub fn full(g: &Graph) -> Self {
        VertexSet { graph: g.id(), members: g.vertices().collect() }
    }

    pub fn new(g: &Graph, members: impl IntoIterator<Item = VertexId>) -> Result<Self, IdealError> {
        let members: BTreeSet<VertexId> = members.into_iter().collect();
        if let Some(v) = members.iter().find(|v| v.0 >= g.vertex_count()) {
            return Err(GraphError::UnknownVertex(format!("#{}", v.0)).into());
        }
        Ok(VertexSet { graph: g.id(), members })
    }

    pub fn from_names<S: AsRef<str>>(g: &Graph, names: &[S]) -> Result<Self, IdealError> {
        let members = names.iter().map(|n| g.vertex(n.as_ref())).collect::<Result<BTreeSet<_>, _>>()?;
        Ok(VertexSet { graph: g.id(), members })
    }

    pub fn graph(&self) -> GraphId {
        self.graph
    }

    pub fn members(&self) -> &BTreeSet<VertexId> {
        &self.members
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.members.contains(&v)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.members.is_subset(&other.members)
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        VertexSet { graph: self.graph, members: self.members.union(&other.members).copied().collect() }
    }

    pub fn names(&self, g: &Graph) -> Vec<String> {
        self.members.iter().map(|&v| g.name(v).to_string()).collect()
    }

    pub fn display(&self, g: &Graph) -> String {
        format!("{{{}}}", self.names(g).join(", "))
    }

    fn check(&self, g: &Graph) -> Result<(), IdealError> {
        if self.graph == g.id() {
            Ok(())
        } else {
            Err(IdealError::ForeignSet)
        }
    }
}

/// A saturated hereditary set, standing for the ideal it generates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdealHandle(VertexSet);

impl IdealHandle {
    pub fn new(g: &Graph, set: VertexSet) -> Result<Self, IdealError> {
        if !is_hereditary(g, &set)? {
            return Err(IdealError::NotHereditary { edge: first_leaving_edge(g, &set).unwrap_or_default() });
        }
        if !is_saturated(g, &set)? {
            return Err(IdealError::NotSaturated);
        }
        Ok(IdealHandle(set))
    }

    pub fn generators(&self) -> &VertexSet {
        &self.0
    }
}

fn first_leaving_edge(g: &Graph, s: &VertexSet) -> Option<String> {
    g.bundle_ids()
        .find(|&b| s.contains(g.bundle_src(b)) && !s.contains(g.bundle_dst(b)))
        .map(|b| g.bundle_name(b).to_string())
}

/// Every edge starting in `s` ends in `s`.
pub fn is_hereditary(g: &Graph, s: &VertexSet) -> Result<bool, IdealError> {
    s.check(g)?;
    Ok(first_leaving_edge(g, s).is_none())
}

/// No regular vertex outside `s` sends all its edges into `s`.
pub fn is_saturated(g: &Graph, s: &VertexSet) -> Result<bool, IdealError> {
    s.check(g)?;
    Ok(!g.vertices().any(|v| !s.contains(v) && forced(g, v, &s.members)))
}

/// `v` is regular and `r(s^{-1}(v)) ⊆ set`.
fn forced(g: &Graph, v: VertexId, set: &BTreeSet<VertexId>) -> bool {
    matches!(g.vertex_class(v), VertexClass::Regular(_)) && g.successors(v).all(|w| set.contains(&w))
}

/// Smallest hereditary superset.
pub fn hereditary_closure(g: &Graph, s: &VertexSet) -> Result<VertexSet, IdealError> {
    s.check(g)?;
    Ok(VertexSet { graph: g.id(), members: g.reachable_from(s.members.iter().copied()) })
}

/// Smallest saturated superset of a hereditary set.
pub fn saturate(g: &Graph, s: &VertexSet) -> Result<VertexSet, IdealError> {
    if !is_hereditary(g, s)? {
        return Err(IdealError::NotHereditary { edge: first_leaving_edge(g, s).unwrap_or_default() });
    }
    let mut members = s.members.clone();
    saturate_in_place(g, &mut members);
    Ok(VertexSet { graph: g.id(), members })
}

fn saturate_in_place(g: &Graph, members: &mut BTreeSet<VertexId>) {
    loop {
        let added: Vec<VertexId> = g.vertices().filter(|&v| !members.contains(&v) && forced(g, v, members)).collect();
        if added.is_empty() {
            return;
        }
        members.extend(added);
    }
}

/// `H(v)`: every vertex reachable from `v`.
pub fn downstream(g: &Graph, v: VertexId) -> VertexSet {
    VertexSet { graph: g.id(), members: g.reachable_from([v]) }
}

pub fn downstream_by_name(g: &Graph, v: &str) -> Result<VertexSet, IdealError> {
    Ok(downstream(g, g.vertex(v)?))
}

/// `E_H`: vertices `H` and every bundle whose source lies in `H`.
pub fn restrict_to(g: &Graph, h: &VertexSet) -> Result<Graph, IdealError> {
    if !is_hereditary(g, h)? {
        return Err(IdealError::NotHereditary { edge: first_leaving_edge(g, h).unwrap_or_default() });
    }
    Ok(g.induced(&h.members))
}

/// All saturated hereditary sets, sorted by size then lexicographically.
///
/// Every saturated hereditary `H` is reached from `∅` by repeatedly joining
/// single vertices: `X ↦ sat(her(X ∪ {v}))`, so the search visits exactly
/// the lattice elements and never the full powerset.
pub fn enumerate_saturated_hereditary(g: &Graph, bound: usize) -> Result<Vec<VertexSet>, IdealError> {
    let n = g.vertex_count();
    if n > bound || n > 128 {
        return Err(IdealError::BoundExceeded { bound: bound.min(128), vertices: n });
    }
    let bit = |v: VertexId| 1u128 << v.0;
    let reach: Vec<u128> = g.vertices().map(|v| g.reachable_from([v]).into_iter().fold(0, |m, w| m | bit(w))).collect();
    let succ: Vec<Option<u128>> = g
        .vertices()
        .map(|v| match g.vertex_class(v) {
            VertexClass::Regular(_) => Some(g.successors(v).fold(0, |m, w| m | bit(w))),
            _ => None,
        })
        .collect();
    let saturate_mask = |mut m: u128| loop {
        let mut grown = m;
        for (v, s) in succ.iter().enumerate() {
            if let Some(s) = s {
                if grown & (1 << v) == 0 && s & !grown == 0 {
                    grown |= 1 << v;
                }
            }
        }
        if grown == m {
            return m;
        }
        m = grown;
    };

    let bottom = saturate_mask(0);
    let mut seen: HashSet<u128> = HashSet::from([bottom]);
    let mut frontier = vec![bottom];
    while let Some(x) = frontier.pop() {
        for (v, &r) in reach.iter().enumerate() {
            if x & (1 << v) != 0 {
                continue;
            }
            let y = saturate_mask(x | r);
            if seen.insert(y) {
                frontier.push(y);
            }
        }
    }
    let mut out: Vec<VertexSet> = seen
        .into_iter()
        .map(|m| VertexSet { graph: g.id(), members: (0..n).filter(|&i| m & (1 << i) != 0).map(VertexId).collect() })
        .collect();
    out.sort();
    Ok(out)
}
