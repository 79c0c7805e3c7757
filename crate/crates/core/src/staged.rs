//! Countable graphs presented as monotone sequences of finite stages.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::sync::{Arc, Mutex};

use thiserror::Error;

use crate::graph::{Cardinality, Graph, GraphError, VertexClass, VertexId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StageError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("stage {stage} is not a subgraph of stage {}", stage + 1)]
    NotMonotone { stage: usize },
    #[error("profile claim `{claim}` fails at stage {stage}: {detail}")]
    ProfileViolation { stage: usize, claim: &'static str, detail: String },
}

type StageFn = dyn Fn(usize) -> Result<Graph, GraphError> + Send + Sync;
type SpineFn = dyn Fn(usize) -> String + Send + Sync;

/// A declared infinite vertex sequence `v_1, v_2, …` (1-based).
#[derive(Clone)]
pub struct Spine(Arc<SpineFn>);

impl Spine {
    pub fn new(f: impl Fn(usize) -> String + Send + Sync + 'static) -> Self {
        Spine(Arc::new(f))
    }

    pub fn name(&self, i: usize) -> String {
        (self.0)(i)
    }
}

impl fmt::Debug for Spine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Spine({}, {}, …)", self.name(1), self.name(2))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MinOutDegree {
    pub k: u64,
    /// The claim covers vertices of stage `m` and later.
    pub beyond_stage: usize,
}

/// Certificates about the limit graph. Each claim is checked on every stage
/// that gets materialized; a stage that contradicts a claim is an error.
#[derive(Debug, Clone, Default)]
pub struct UniformProfile {
    /// Every vertex of stage `n - 1` emits at least `k` edges in stage `n`.
    pub min_out_degree: Option<MinOutDegree>,
    pub spine: Option<Spine>,
    /// Every edge leaving `v_i` lands on `v_{i+1}`.
    pub linear_spine: bool,
    /// `v_i` emits exactly one edge, and it lands on `v_{i+1}`.
    pub exclusive_spine: bool,
    /// Every vertex reaches the spine, only spine vertices are sinks of a
    /// stage, and every maximal path from `v_i` passes through `v_{i+1}`.
    pub absorbing_spine: bool,
    /// All stages coincide: the limit is the finite graph `stage(0)`.
    pub stationary: bool,
}

impl UniformProfile {
    pub fn stationary() -> Self {
        UniformProfile { stationary: true, ..Default::default() }
    }
}

pub struct StagedGraph {
    name: String,
    generator: Arc<StageFn>,
    profile: Option<UniformProfile>,
    cache: Mutex<BTreeMap<usize, Arc<Graph>>>,
}

impl fmt::Debug for StagedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StagedGraph").field("name", &self.name).field("profile", &self.profile).finish()
    }
}

impl StagedGraph {
    pub fn new(
        name: impl Into<String>,
        profile: Option<UniformProfile>,
        generator: impl Fn(usize) -> Result<Graph, GraphError> + Send + Sync + 'static,
    ) -> Self {
        StagedGraph { name: name.into(), generator: Arc::new(generator), profile, cache: Mutex::new(BTreeMap::new()) }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn profile(&self) -> Option<&UniformProfile> {
        self.profile.as_ref()
    }

    pub fn is_stationary(&self) -> bool {
        self.profile.as_ref().is_some_and(|p| p.stationary)
    }

    /// Materializes stage `n`, checking inclusion of every earlier stage in
    /// its successor and every profile claim on each newly built stage.
    pub fn stage(&self, n: usize) -> Result<Arc<Graph>, StageError> {
        let mut cache = self.cache.lock().expect("stage cache poisoned");
        if let Some(g) = cache.get(&n) {
            return Ok(g.clone());
        }
        let start = cache.range(..n).next_back().map_or(0, |(&k, _)| k + 1);
        for k in start..=n {
            let g = Arc::new((self.generator)(k)?);
            if k > 0 {
                let prev = cache.get(&(k - 1)).expect("stages built in order").clone();
                if !prev.is_subgraph_of(&g) {
                    return Err(StageError::NotMonotone { stage: k - 1 });
                }
                if let Some(p) = &self.profile {
                    check_profile(p, k, &prev, &g)?;
                }
            } else if let Some(p) = &self.profile {
                check_spine_claims(p, 0, &g)?;
            }
            cache.insert(k, g);
        }
        Ok(cache.get(&n).expect("just inserted").clone())
    }

    /// The spine vertices `v_1, …, v_j` present in stage `n`.
    pub fn spine_prefix(&self, n: usize) -> Result<Vec<VertexId>, StageError> {
        let g = self.stage(n)?;
        Ok(match self.profile.as_ref().and_then(|p| p.spine.as_ref()) {
            Some(spine) => spine_in(spine, &g),
            None => Vec::new(),
        })
    }
}

pub(crate) fn spine_in(spine: &Spine, g: &Graph) -> Vec<VertexId> {
    let mut out = Vec::new();
    let mut i = 1;
    while let Ok(v) = g.vertex(&spine.name(i)) {
        out.push(v);
        i += 1;
    }
    out
}

fn violation(stage: usize, claim: &'static str, detail: String) -> StageError {
    StageError::ProfileViolation { stage, claim, detail }
}

fn check_profile(p: &UniformProfile, n: usize, prev: &Graph, g: &Graph) -> Result<(), StageError> {
    if p.stationary && prev != g {
        return Err(violation(n, "stationary", "stage differs from its predecessor".into()));
    }
    if let Some(MinOutDegree { k, beyond_stage }) = p.min_out_degree {
        if n > beyond_stage {
            for v in prev.vertices() {
                let w = g.vertex(prev.name(v))?;
                let enough = match g.out_cardinality(w) {
                    Cardinality::Finite(d) => d >= k,
                    _ => true,
                };
                if !enough {
                    return Err(violation(
                        n,
                        "min_out_degree",
                        format!("vertex {} emits fewer than {k} edges", prev.name(v)),
                    ));
                }
            }
        }
    }
    check_spine_claims(p, n, g)
}

fn check_spine_claims(p: &UniformProfile, n: usize, g: &Graph) -> Result<(), StageError> {
    let Some(spine) = &p.spine else {
        if p.linear_spine || p.exclusive_spine || p.absorbing_spine {
            return Err(violation(n, "spine", "spine claims made without a spine".into()));
        }
        return Ok(());
    };
    let vs = spine_in(spine, g);
    for (i, pair) in vs.windows(2).enumerate() {
        let (v, next) = (pair[0], pair[1]);
        if p.linear_spine || p.exclusive_spine {
            if let Some(&b) = g.out_bundles(v).iter().find(|&&b| g.bundle_dst(b) != next) {
                return Err(violation(
                    n,
                    if p.exclusive_spine { "exclusive_spine" } else { "linear_spine" },
                    format!("edge {} leaves the spine at {}", g.bundle_name(b), g.name(v)),
                ));
            }
        }
        if p.exclusive_spine && g.out_cardinality(v) != Cardinality::Finite(1) {
            return Err(violation(n, "exclusive_spine", format!("spine vertex v_{} emits more than one edge", i + 1)));
        }
    }
    if p.absorbing_spine {
        let on_spine: BTreeSet<VertexId> = vs.iter().copied().collect();
        if let Some(v) = g.vertices().find(|&v| g.vertex_class(v) == VertexClass::Sink && !on_spine.contains(&v)) {
            return Err(violation(n, "absorbing_spine", format!("{} is a sink off the spine", g.name(v))));
        }
        let reach_spine = reverse_closure(g, &on_spine);
        if let Some(v) = g.vertices().find(|v| !reach_spine.contains(v)) {
            return Err(violation(n, "absorbing_spine", format!("{} cannot reach the spine", g.name(v))));
        }
        let cyclic: BTreeSet<VertexId> = g.cyclic_components().into_iter().flatten().collect();
        for pair in vs.windows(2) {
            if escapes_avoiding(g, pair[0], pair[1], &cyclic) {
                return Err(violation(
                    n,
                    "absorbing_spine",
                    format!("a path from {} avoids {}", g.name(pair[0]), g.name(pair[1])),
                ));
            }
        }
    }
    Ok(())
}

/// Vertices that reach some member of `targets`.
fn reverse_closure(g: &Graph, targets: &BTreeSet<VertexId>) -> BTreeSet<VertexId> {
    let mut seen: BTreeSet<VertexId> = targets.clone();
    let mut queue: VecDeque<VertexId> = targets.iter().copied().collect();
    while let Some(v) = queue.pop_front() {
        for &b in g.in_bundles(v) {
            let u = g.bundle_src(b);
            if seen.insert(u) {
                queue.push_back(u);
            }
        }
    }
    seen
}

/// Whether a maximal path from `from` can avoid `gate`: it reaches a sink or
/// a cycle without passing through `gate`.
fn escapes_avoiding(g: &Graph, from: VertexId, gate: VertexId, cyclic: &BTreeSet<VertexId>) -> bool {
    let mut seen = BTreeSet::from([from]);
    let mut queue = VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        if g.vertex_class(v) == VertexClass::Sink || cyclic.contains(&v) {
            return true;
        }
        for w in g.successors(v) {
            if w != gate && seen.insert(w) {
                queue.push_back(w);
            }
        }
    }
    false
}
