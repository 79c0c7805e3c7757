//! Decision procedures: simplicity, AF, row class, doubled-path ladders,
//! the sink/tail dichotomy and the final verdict on unique irreducible
//! representations.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::citation::Citation;
use crate::graph::{Cardinality, Graph, GraphError, LassoPath, Path, VertexId};
use crate::ideals::{self, IdealError, VertexSet};
use crate::staged::{StageError, StagedGraph};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassifyError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Ideal(#[from] IdealError),
    #[error(transparent)]
    Stage(#[from] StageError),
    #[error("the graph has no vertices")]
    EmptyGraph,
    #[error("graph has a cycle through {0}")]
    Cyclic(String),
}

/// Why a graph algebra fails to be simple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SimplicityWitness {
    ExitlessCycle(Path),
    /// `vertex` cannot reach the cycle of `lasso`; `ideal` is a proper
    /// nonzero saturated hereditary set separating them.
    NotCofinal {
        vertex: VertexId,
        lasso: LassoPath,
        ideal: VertexSet,
    },
    /// `from` cannot reach the singular vertex `singular`; `ideal` is a
    /// proper nonzero saturated hereditary set separating them.
    UnreachedSingular {
        from: VertexId,
        singular: VertexId,
        ideal: VertexSet,
    },
}

impl SimplicityWitness {
    pub fn ideal(&self) -> Option<&VertexSet> {
        match self {
            SimplicityWitness::ExitlessCycle(_) => None,
            SimplicityWitness::NotCofinal { ideal, .. } | SimplicityWitness::UnreachedSingular { ideal, .. } => {
                Some(ideal)
            }
        }
    }

    pub fn render(&self, g: &Graph) -> String {
        match self {
            SimplicityWitness::ExitlessCycle(c) => format!("exitless cycle {}", c.display(g)),
            SimplicityWitness::NotCofinal { vertex, lasso, ideal } => format!(
                "{} does not reach the cycle of {}; proper saturated hereditary set {}",
                g.name(*vertex),
                lasso.display(g),
                ideal.display(g)
            ),
            SimplicityWitness::UnreachedSingular { from, singular, ideal } => format!(
                "{} does not reach singular vertex {}; proper saturated hereditary set {}",
                g.name(*from),
                g.name(*singular),
                ideal.display(g)
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplicityReport {
    pub simple: bool,
    pub condition_l: bool,
    pub cofinal: bool,
    pub reaches_singulars: bool,
    /// Condition (L), cofinality and reachability of every singular vertex.
    pub route2: bool,
    /// Condition (L) and a two-element lattice; `None` when the lattice
    /// enumeration bound was exceeded.
    pub route3: Option<bool>,
    pub lattice_size: Option<usize>,
    pub witness: Option<SimplicityWitness>,
}

pub fn is_simple(g: &Graph) -> Result<SimplicityReport, ClassifyError> {
    is_simple_bounded(g, ideals::DEFAULT_LATTICE_BOUND)
}

pub fn is_simple_bounded(g: &Graph, bound: usize) -> Result<SimplicityReport, ClassifyError> {
    if g.vertex_count() == 0 {
        return Err(ClassifyError::EmptyGraph);
    }
    let cycles = g.cycles_and_condition_l();
    let cofinality = g.cofinal();
    let unreached = unreached_singular(g);
    let route2 = cycles.condition_l && cofinality.cofinal && unreached.is_none();

    let (route3, lattice_size) = match ideals::enumerate_saturated_hereditary(g, bound) {
        Ok(lattice) => (Some(cycles.condition_l && lattice.len() == 2), Some(lattice.len())),
        Err(IdealError::BoundExceeded { .. }) => (None, None),
        Err(e) => return Err(e.into()),
    };

    let witness = if let Some(c) = cycles.witness {
        Some(SimplicityWitness::ExitlessCycle(c))
    } else if let Some((vertex, lasso)) = cofinality.witness {
        let ideal = separating(g, lasso.cycle.source(), vertex)?;
        Some(SimplicityWitness::NotCofinal { vertex, lasso, ideal })
    } else if let Some((from, singular)) = unreached {
        let ideal = separating(g, singular, from)?;
        Some(SimplicityWitness::UnreachedSingular { from, singular, ideal })
    } else {
        None
    };

    Ok(SimplicityReport {
        simple: route2,
        condition_l: cycles.condition_l,
        cofinal: cofinality.cofinal,
        reaches_singulars: unreached.is_none(),
        route2,
        route3,
        lattice_size,
        witness,
    })
}

fn unreached_singular(g: &Graph) -> Option<(VertexId, VertexId)> {
    let reach = g.reachability_matrix();
    g.singular_vertices().into_iter().find_map(|s| g.vertices().find(|v| !reach[v.0][s.0]).map(|v| (v, s)))
}

/// `sat(her({seed}))`.
fn generated(g: &Graph, seed: VertexId) -> Result<VertexSet, IdealError> {
    ideals::saturate(g, &ideals::downstream(g, seed))
}

/// A saturated hereditary set containing exactly one of `target` and
/// `outsider`, given that `outsider` cannot reach `target`: the one generated
/// by `target` when it leaves `outsider` out, else the one generated by
/// `outsider`, which never reaches `target`.
fn separating(g: &Graph, target: VertexId, outsider: VertexId) -> Result<VertexSet, IdealError> {
    let by_target = generated(g, target)?;
    if !by_target.contains(outsider) {
        return Ok(by_target);
    }
    generated(g, outsider)
}

pub fn is_af(g: &Graph) -> bool {
    !g.has_cycle()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RowClass {
    RowFinite,
    RowCountableNotFinite,
    HasUncountableEmitter,
}

impl fmt::Display for RowClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RowClass::RowFinite => "row-finite",
            RowClass::RowCountableNotFinite => "row-countable, not row-finite",
            RowClass::HasUncountableEmitter => "has an uncountable emitter",
        })
    }
}

pub fn row_class(g: &Graph) -> RowClass {
    let cards: Vec<Cardinality> = g.bundle_ids().map(|b| g.cardinality(b)).collect();
    if cards.contains(&Cardinality::Uncountable) {
        RowClass::HasUncountableEmitter
    } else if cards.contains(&Cardinality::AlephNull) {
        RowClass::RowCountableNotFinite
    } else {
        RowClass::RowFinite
    }
}

/// Longest chain `u_1, …, u_{k+1}` with at least two distinct paths from
/// each `u_i` to `u_{i+1}`, as its length `k` and its vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LadderReport {
    pub length: usize,
    pub chain: Vec<VertexId>,
}

pub fn ladder_length(g: &Graph) -> Result<LadderReport, ClassifyError> {
    let order = topological(g)?;
    if let Some(b) = g.bundle_ids().find(|&b| !g.cardinality(b).is_finite()) {
        return Err(GraphError::InfiniteBundle(g.bundle_name(b).to_string()).into());
    }
    let n = g.vertex_count();
    let mut pos = vec![0; n];
    for (i, v) in order.iter().enumerate() {
        pos[v.0] = i;
    }
    // doubled[u][w]: at least two paths from u to w (counts capped at 2)
    let mut doubled = vec![vec![false; n]; n];
    for &u in &order {
        let mut count = vec![0u8; n];
        count[u.0] = 1;
        for &v in &order[pos[u.0]..] {
            if count[v.0] == 0 {
                continue;
            }
            for &b in g.out_bundles(v) {
                let w = g.bundle_dst(b);
                let mult = g.cardinality(b).finite().expect("checked finite").min(2) as u8;
                count[w.0] = (count[w.0] + count[v.0] * mult).min(2);
            }
        }
        for w in 0..n {
            doubled[u.0][w] = count[w] >= 2;
        }
    }
    // longest chain ending at each vertex, in topological order
    let mut best: Vec<(usize, Option<VertexId>)> = vec![(0, None); n];
    for &w in &order {
        for &u in &order[..pos[w.0]] {
            if doubled[u.0][w.0] && best[u.0].0 + 1 > best[w.0].0 {
                best[w.0] = (best[u.0].0 + 1, Some(u));
            }
        }
    }
    let Some(end) = order.iter().copied().max_by_key(|v| (best[v.0].0, std::cmp::Reverse(v.0))) else {
        return Ok(LadderReport { length: 0, chain: Vec::new() });
    };
    let mut chain = vec![end];
    while let Some(prev) = best[chain.last().expect("nonempty").0].1 {
        chain.push(prev);
    }
    chain.reverse();
    Ok(LadderReport { length: best[end.0].0, chain })
}

fn topological(g: &Graph) -> Result<Vec<VertexId>, ClassifyError> {
    g.topological_order().ok_or_else(|| {
        let v = g.cyclic_components()[0][0];
        ClassifyError::Cyclic(g.name(v).to_string())
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum DichotomyResult {
    /// A unique sink and no infinite paths.
    CaseI { sink: String },
    /// No sinks and an exclusive tail; alternating vertex and edge names,
    /// starting and ending with a vertex.
    CaseII { tail: Vec<String> },
    /// Neither case can hold.
    Neither { reason: String },
    /// No exclusive tail found through this depth.
    NeitherThroughDepth { depth: usize },
}

impl fmt::Display for DichotomyResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DichotomyResult::CaseI { sink } => write!(f, "CaseI sink={sink}"),
            DichotomyResult::CaseII { tail } => write!(f, "CaseII tail={} ...", tail.join(" ")),
            DichotomyResult::Neither { reason } => write!(f, "Neither ({reason})"),
            DichotomyResult::NeitherThroughDepth { depth } => write!(f, "NeitherThroughDepth({depth})"),
        }
    }
}

/// The dichotomy for a finite acyclic graph. Finite graphs have no infinite
/// paths, so Case II never occurs.
pub fn dichotomy(g: &Graph) -> Result<DichotomyResult, ClassifyError> {
    if g.vertex_count() == 0 {
        return Err(ClassifyError::EmptyGraph);
    }
    topological(g)?;
    Ok(match g.sinks().as_slice() {
        [s] => DichotomyResult::CaseI { sink: g.name(*s).to_string() },
        sinks => DichotomyResult::Neither { reason: format!("{} sinks", sinks.len()) },
    })
}

pub fn dichotomy_staged(sg: &StagedGraph, depth: usize) -> Result<DichotomyResult, ClassifyError> {
    let g = sg.stage(depth)?;
    if sg.is_stationary() {
        return dichotomy(&g);
    }
    topological(&g)?;
    let Some(profile) = sg.profile() else {
        return Ok(DichotomyResult::NeitherThroughDepth { depth });
    };
    if let Some(m) = profile.min_out_degree.filter(|m| m.k >= 2) {
        return Ok(DichotomyResult::Neither {
            reason: match m.beyond_stage {
                0 => format!("in the limit every vertex emits at least {} edges: no sinks and no exclusive edges", m.k),
                b => format!(
                    "in the limit every vertex of stage {b} or later emits at least {} edges: no sinks and no exclusive edges",
                    m.k
                ),
            },
        });
    }
    let no_sinks = profile.absorbing_spine || profile.min_out_degree.is_some_and(|m| m.k >= 1);
    if profile.exclusive_spine && no_sinks {
        if let Some(tail) = exclusive_tail(sg, &g, depth)? {
            return Ok(DichotomyResult::CaseII { tail });
        }
    }
    Ok(DichotomyResult::NeitherThroughDepth { depth })
}

/// The spine prefix of stage `depth`, if each listed edge is the only edge
/// its source emits.
fn exclusive_tail(sg: &StagedGraph, g: &Graph, depth: usize) -> Result<Option<Vec<String>>, ClassifyError> {
    let spine = sg.spine_prefix(depth)?;
    if spine.len() < 2 {
        return Ok(None);
    }
    let mut tail = vec![g.name(spine[0]).to_string()];
    for pair in spine.windows(2) {
        let out = g.out_bundles(pair[0]);
        match out {
            [b] if g.cardinality(*b) == Cardinality::Finite(1) && g.bundle_dst(*b) == pair[1] => {
                tail.push(g.bundle_name(*b).to_string());
                tail.push(g.name(pair[1]).to_string());
            }
            _ => return Ok(None),
        }
    }
    Ok(Some(tail))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Dimension {
    Finite(u128),
    CountablyInfinite,
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dimension::Finite(d) => write!(f, "{d}"),
            Dimension::CountablyInfinite => f.write_str("aleph0"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VerdictTag {
    UniqueIrrepCompacts(Dimension),
    MultipleIrreps(String),
    NotSimple(SimplicityWitness),
    OpenPurelyInfinite,
    UnknownAtDepth(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VerdictWitness {
    Cycle(Path),
    Sink(VertexId),
    Dichotomy(DichotomyResult),
}

/// A verdict with the chain of claims behind it. Each step pairs a claim
/// with the one result it rests on.
#[derive(Debug, Clone)]
pub struct Verdict {
    pub tag: VerdictTag,
    pub steps: Vec<(String, Citation)>,
    pub witness: Option<VerdictWitness>,
    /// The graph the witness refers to (for staged input, the deepest stage).
    pub graph: Arc<Graph>,
}

impl Verdict {
    pub fn citations(&self) -> Vec<Citation> {
        let mut out: Vec<Citation> = Vec::new();
        for (_, c) in &self.steps {
            if !out.contains(c) {
                out.push(*c);
            }
        }
        out
    }

    pub fn tag_name(&self) -> &'static str {
        match self.tag {
            VerdictTag::UniqueIrrepCompacts(_) => "UniqueIrrepCompacts",
            VerdictTag::MultipleIrreps(_) => "MultipleIrreps",
            VerdictTag::NotSimple(_) => "NotSimple",
            VerdictTag::OpenPurelyInfinite => "OpenPurelyInfinite",
            VerdictTag::UnknownAtDepth(_) => "UnknownAtDepth",
        }
    }

    /// One line such as `UniqueIrrepCompacts dim=2`.
    pub fn headline(&self) -> String {
        match &self.tag {
            VerdictTag::UniqueIrrepCompacts(d) => format!("UniqueIrrepCompacts dim={d}"),
            VerdictTag::MultipleIrreps(_) => "MultipleIrreps".into(),
            VerdictTag::NotSimple(w) => match w.ideal() {
                Some(ideal) => format!("NotSimple {}", ideal.display(&self.graph)),
                None => "NotSimple".into(),
            },
            VerdictTag::OpenPurelyInfinite => "OpenPurelyInfinite".into(),
            VerdictTag::UnknownAtDepth(n) => format!("UnknownAtDepth({n})"),
        }
    }

    pub fn witness_text(&self) -> Option<String> {
        let g = &self.graph;
        match (&self.tag, &self.witness) {
            (VerdictTag::NotSimple(w), _) => Some(w.render(g)),
            (_, Some(VerdictWitness::Cycle(c))) => Some(format!("cycle {}", c.display(g))),
            (_, Some(VerdictWitness::Sink(s))) => Some(format!("sink {}", g.name(*s))),
            (_, Some(VerdictWitness::Dichotomy(d))) => Some(d.to_string()),
            _ => None,
        }
    }
}

struct Steps(Vec<(String, Citation)>);

impl Steps {
    fn new() -> Self {
        Steps(Vec::new())
    }

    fn add(mut self, claim: impl Into<String>, c: Citation) -> Self {
        self.0.push((claim.into(), c));
        self
    }

    fn verdict(self, graph: Arc<Graph>, tag: VerdictTag, witness: Option<VerdictWitness>) -> Verdict {
        Verdict { tag, steps: self.0, witness, graph }
    }
}

const SIMPLE_CLAIM: &str =
    "simple: Condition (L) holds, the graph is cofinal and every vertex reaches every singular vertex";

pub fn naimark_verdict(g: &Graph) -> Result<Verdict, ClassifyError> {
    naimark_verdict_bounded(g, ideals::DEFAULT_LATTICE_BOUND)
}

/// The verdict for a finite graph; never `UnknownAtDepth`.
pub fn naimark_verdict_bounded(g: &Graph, bound: usize) -> Result<Verdict, ClassifyError> {
    let graph = Arc::new(g.clone());
    let simplicity = is_simple_bounded(g, bound)?;
    if let Some(w) = simplicity.witness {
        let claim = format!("not simple: {}", w.render(g));
        return Ok(Steps::new()
            .add(claim, Citation::SimplicityCriterion)
            .add(
                "a non-simple algebra has more than one irreducible representation",
                Citation::UniqueIrrepImpliesSimple,
            )
            .verdict(graph, VerdictTag::NotSimple(w), None));
    }
    let steps = Steps::new().add(SIMPLE_CLAIM, Citation::SimplicityCriterion);
    if g.has_cycle() {
        let cycle = g.cyclic_components().first().and_then(|c| g.cycle_through(c[0]));
        let cycle_text = cycle.as_ref().map(|c| c.display(g)).unwrap_or_default();
        let steps = steps.add(format!("has the cycle {cycle_text}, so C*(E) is not AF"), Citation::AfIffAcyclic);
        let witness = cycle.map(VerdictWitness::Cycle);
        return Ok(match row_class(g) {
            RowClass::HasUncountableEmitter => steps
                .add(
                    "simple, not AF, with an uncountable emitter: purely infinite, and no known result decides it",
                    Citation::UncountableEmitterOpen,
                )
                .verdict(graph, VerdictTag::OpenPurelyInfinite, witness),
            class => {
                let reason = format!(
                    "the graph is {class}; a row-countable graph algebra with one irreducible representation is \
                     the compacts, which is AF, but this algebra is not AF"
                );
                steps.add(reason.clone(), Citation::RowCountableCompacts).verdict(
                    graph,
                    VerdictTag::MultipleIrreps(reason),
                    witness,
                )
            }
        });
    }
    let steps = steps.add("no cycles, so C*(E) is AF", Citation::AfIffAcyclic);
    match dichotomy(g)? {
        DichotomyResult::CaseI { sink } => {
            let v = g.vertex(&sink)?;
            let dim = g.path_counts_into()?[v.0];
            Ok(steps
                .add(
                    format!("{sink} is the unique sink and a finite graph has no infinite paths"),
                    Citation::AfDichotomy,
                )
                .add(
                    format!("C*(E) is the compacts on l2 of the {dim} paths ending at {sink}"),
                    Citation::CompactsUniqueSink,
                )
                .verdict(graph, VerdictTag::UniqueIrrepCompacts(Dimension::Finite(dim)), Some(VerdictWitness::Sink(v))))
        }
        // unreachable for simple graphs, kept total
        other => {
            let reason = format!("AF with {other}: neither a unique sink nor an exclusive tail");
            Ok(steps.add(reason.clone(), Citation::AfDichotomy).verdict(
                graph,
                VerdictTag::MultipleIrreps(reason),
                Some(VerdictWitness::Dichotomy(other)),
            ))
        }
    }
}

/// The verdict for a staged graph from its certificates and the stages up
/// to `depth`.
pub fn naimark_verdict_staged(sg: &StagedGraph, depth: usize) -> Result<Verdict, ClassifyError> {
    let g = sg.stage(depth)?;
    if sg.is_stationary() {
        return naimark_verdict(&g);
    }
    let unknown = |g: Arc<Graph>, why: String, witness| {
        Steps::new().add(why, Citation::Computed).verdict(g, VerdictTag::UnknownAtDepth(depth), witness)
    };
    if g.has_cycle() {
        return Ok(unknown(g, format!("stage {depth} has a cycle and no certificate covers the limit"), None));
    }
    let d = dichotomy_staged(sg, depth)?;
    let profile = sg.profile().cloned().unwrap_or_default();
    match &d {
        DichotomyResult::Neither { reason } => {
            let reason = format!(
                "{reason}; the limit is a countable row-finite graph, and with one irreducible representation it \
                 would be AF with a unique sink or an exclusive tail"
            );
            Ok(Steps::new()
                .add(
                    "a row-countable graph algebra with one irreducible representation is AF",
                    Citation::RowCountableRowFiniteAf,
                )
                .add(reason.clone(), Citation::AfDichotomy)
                .verdict(g, VerdictTag::MultipleIrreps(reason), Some(VerdictWitness::Dichotomy(d))))
        }
        DichotomyResult::CaseII { .. } if profile.absorbing_spine && g.is_all_finite() => Ok(Steps::new()
            .add(
                "certified simple: row-finite, acyclic, no sinks in the limit, and every vertex flows into the spine",
                Citation::SimplicityCriterion,
            )
            .add("the spine is an infinite path whose vertices emit only its edges", Citation::AfDichotomy)
            .add("C*(E) is the compacts on l2 of the infinite paths", Citation::CompactsExclusiveTail)
            .verdict(
                g,
                VerdictTag::UniqueIrrepCompacts(Dimension::CountablyInfinite),
                Some(VerdictWitness::Dichotomy(d)),
            )),
        _ => Ok(unknown(
            g,
            format!("no certificate decides the limit; stages up to {depth} show no exclusive tail"),
            Some(VerdictWitness::Dichotomy(d)),
        )),
    }
}
