//! Directed graphs with cardinality-classed edge bundles, finite paths,
//! lasso paths, reachability, cycles and cofinality.
//!
//! A graph is stored as an ordered vertex list plus a list of edge bundles.
//! A `Finite(n)` bundle stands for `n` distinguishable parallel edges; the
//! `AlephNull` and `Uncountable` classes stand for infinitely many parallel
//! edges and are never expanded.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use thiserror::Error;

static NEXT_GRAPH_ID: AtomicU64 = AtomicU64::new(1);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("duplicate vertex id `{0}`")]
    DuplicateVertex(String),
    #[error("duplicate edge id `{0}`")]
    DuplicateEdge(String),
    #[error("edge `{edge}` refers to unknown vertex `{vertex}`")]
    DanglingVertex { edge: String, vertex: String },
    #[error("edge `{0}` has cardinality finite:0")]
    EmptyBundle(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("edge `{0}` is an infinite bundle; paths require finite bundles")]
    InfiniteBundle(String),
    #[error("unbounded path enumeration requested on a graph with a cycle")]
    UnboundedOnCyclic,
    #[error("edges do not compose: range of `{0}` is not the source of `{1}`")]
    NotComposable(String, String),
    #[error("a cycle must have length at least 1 and equal source and range")]
    NotACycle,
    #[error("lasso stem range differs from cycle source")]
    LassoMismatch,
    #[error("path count overflow")]
    CountOverflow,
}

/// Index of a vertex in its graph's vertex order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub usize);

/// Index of a bundle in its graph's bundle order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BundleId(pub usize);

/// One edge: a copy inside a bundle. Edges order by (bundle, copy).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub bundle: BundleId,
    pub copy: u64,
}

/// Opaque identity of a constructed graph, used to reject vertex sets that
/// were built against a different graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GraphId(u64);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Cardinality {
    Finite(u64),
    AlephNull,
    Uncountable,
}

impl Cardinality {
    pub fn is_finite(self) -> bool {
        matches!(self, Cardinality::Finite(_))
    }

    /// `Some(n)` for finite bundles.
    pub fn finite(self) -> Option<u64> {
        match self {
            Cardinality::Finite(n) => Some(n),
            _ => None,
        }
    }
}

/// Cardinal sum, with finite + finite saturating into `Finite`.
impl std::ops::Add for Cardinality {
    type Output = Cardinality;

    fn add(self, other: Cardinality) -> Cardinality {
        use Cardinality::*;
        match (self, other) {
            (Uncountable, _) | (_, Uncountable) => Uncountable,
            (AlephNull, _) | (_, AlephNull) => AlephNull,
            (Finite(a), Finite(b)) => Finite(a.saturating_add(b)),
        }
    }
}

impl fmt::Display for Cardinality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cardinality::Finite(n) => write!(f, "finite:{n}"),
            Cardinality::AlephNull => f.write_str("aleph0"),
            Cardinality::Uncountable => f.write_str("uncountable"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeBundle {
    pub id: String,
    pub src: String,
    pub dst: String,
    pub cardinality: Cardinality,
}

impl EdgeBundle {
    pub fn new(
        id: impl Into<String>,
        src: impl Into<String>,
        dst: impl Into<String>,
        cardinality: Cardinality,
    ) -> Self {
        Self { id: id.into(), src: src.into(), dst: dst.into(), cardinality }
    }

    /// A single edge.
    pub fn single(id: impl Into<String>, src: impl Into<String>, dst: impl Into<String>) -> Self {
        Self::new(id, src, dst, Cardinality::Finite(1))
    }
}

#[derive(Debug, Clone)]
struct Bundle {
    id: String,
    src: VertexId,
    dst: VertexId,
    cardinality: Cardinality,
}

/// The class of a vertex according to how many edges it emits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VertexClass {
    Sink,
    Regular(u64),
    InfiniteEmitter,
}

impl VertexClass {
    pub fn is_regular(self) -> bool {
        matches!(self, VertexClass::Regular(_))
    }

    pub fn is_singular(self) -> bool {
        !self.is_regular()
    }
}

#[derive(Debug, Clone)]
pub struct Graph {
    id: GraphId,
    names: Vec<String>,
    index: HashMap<String, VertexId>,
    bundles: Vec<Bundle>,
    bundle_index: HashMap<String, BundleId>,
    out: Vec<Vec<BundleId>>,
    inc: Vec<Vec<BundleId>>,
}

impl PartialEq for Graph {
    /// Structural equality: same vertex order and the same bundles.
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names
            && self.bundles.len() == other.bundles.len()
            && self
                .bundles
                .iter()
                .zip(&other.bundles)
                .all(|(a, b)| a.id == b.id && a.src == b.src && a.dst == b.dst && a.cardinality == b.cardinality)
    }
}

impl Graph {
    /// Validates and indexes a graph.
    pub fn build<S: AsRef<str>>(vertices: &[S], bundles: &[EdgeBundle]) -> Result<Graph, GraphError> {
        let mut names = Vec::with_capacity(vertices.len());
        let mut index = HashMap::with_capacity(vertices.len());
        for v in vertices {
            let v = v.as_ref();
            if index.insert(v.to_string(), VertexId(names.len())).is_some() {
                return Err(GraphError::DuplicateVertex(v.to_string()));
            }
            names.push(v.to_string());
        }
        let mut out = vec![Vec::new(); names.len()];
        let mut inc = vec![Vec::new(); names.len()];
        let mut stored = Vec::with_capacity(bundles.len());
        let mut bundle_index = HashMap::with_capacity(bundles.len());
        for b in bundles {
            let lookup = |name: &str| {
                index
                    .get(name)
                    .copied()
                    .ok_or_else(|| GraphError::DanglingVertex { edge: b.id.clone(), vertex: name.to_string() })
            };
            let src = lookup(&b.src)?;
            let dst = lookup(&b.dst)?;
            if b.cardinality == Cardinality::Finite(0) {
                return Err(GraphError::EmptyBundle(b.id.clone()));
            }
            let id = BundleId(stored.len());
            if bundle_index.insert(b.id.clone(), id).is_some() {
                return Err(GraphError::DuplicateEdge(b.id.clone()));
            }
            out[src.0].push(id);
            inc[dst.0].push(id);
            stored.push(Bundle { id: b.id.clone(), src, dst, cardinality: b.cardinality });
        }
        let g = Graph {
            id: GraphId(NEXT_GRAPH_ID.fetch_add(1, Ordering::Relaxed)),
            names,
            index,
            bundles: stored,
            bundle_index,
            out,
            inc,
        };
        debug_assert!(g.indexes_consistent());
        Ok(g)
    }

    fn indexes_consistent(&self) -> bool {
        let out_total: usize = self.out.iter().map(Vec::len).sum();
        let in_total: usize = self.inc.iter().map(Vec::len).sum();
        out_total == self.bundles.len()
            && in_total == self.bundles.len()
            && self.out.iter().enumerate().all(|(v, bs)| bs.iter().all(|b| self.bundles[b.0].src.0 == v))
            && self.inc.iter().enumerate().all(|(v, bs)| bs.iter().all(|b| self.bundles[b.0].dst.0 == v))
    }

    pub fn id(&self) -> GraphId {
        self.id
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn bundle_count(&self) -> usize {
        self.bundles.len()
    }

    pub fn vertices(&self) -> impl DoubleEndedIterator<Item = VertexId> + ExactSizeIterator {
        (0..self.names.len()).map(VertexId)
    }

    pub fn bundle_ids(&self) -> impl DoubleEndedIterator<Item = BundleId> + ExactSizeIterator {
        (0..self.bundles.len()).map(BundleId)
    }

    pub fn vertex(&self, name: &str) -> Result<VertexId, GraphError> {
        self.index.get(name).copied().ok_or_else(|| GraphError::UnknownVertex(name.to_string()))
    }

    pub fn contains_vertex(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn name(&self, v: VertexId) -> &str {
        &self.names[v.0]
    }

    pub fn bundle(&self, name: &str) -> Option<BundleId> {
        self.bundle_index.get(name).copied()
    }

    pub fn bundle_name(&self, b: BundleId) -> &str {
        &self.bundles[b.0].id
    }

    pub fn bundle_src(&self, b: BundleId) -> VertexId {
        self.bundles[b.0].src
    }

    pub fn bundle_dst(&self, b: BundleId) -> VertexId {
        self.bundles[b.0].dst
    }

    pub fn cardinality(&self, b: BundleId) -> Cardinality {
        self.bundles[b.0].cardinality
    }

    /// The bundle list in the public (string-keyed) form.
    pub fn edge_bundles(&self) -> Vec<EdgeBundle> {
        self.bundles
            .iter()
            .map(|b| {
                EdgeBundle::new(b.id.clone(), self.names[b.src.0].clone(), self.names[b.dst.0].clone(), b.cardinality)
            })
            .collect()
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.names
    }

    pub fn out_bundles(&self, v: VertexId) -> &[BundleId] {
        &self.out[v.0]
    }

    pub fn in_bundles(&self, v: VertexId) -> &[BundleId] {
        &self.inc[v.0]
    }

    /// Distinct out-neighbours in first-seen order.
    pub fn successors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.out[v.0].iter().map(|b| self.bundles[b.0].dst)
    }

    pub fn source(&self, e: Edge) -> VertexId {
        self.bundles[e.bundle.0].src
    }

    pub fn range(&self, e: Edge) -> VertexId {
        self.bundles[e.bundle.0].dst
    }

    /// Display label of an edge: the bundle id for single edges, `id#k`
    /// (1-based) for copies inside a larger bundle.
    pub fn edge_label(&self, e: Edge) -> String {
        let b = &self.bundles[e.bundle.0];
        match b.cardinality {
            Cardinality::Finite(1) => b.id.clone(),
            _ => format!("{}#{}", b.id, e.copy + 1),
        }
    }

    /// Parses an edge label produced by [`Graph::edge_label`].
    pub fn edge_by_label(&self, label: &str) -> Option<Edge> {
        if let Some(b) = self.bundle(label) {
            if self.cardinality(b) == Cardinality::Finite(1) {
                return Some(Edge { bundle: b, copy: 0 });
            }
        }
        let (id, k) = label.rsplit_once('#')?;
        let b = self.bundle(id)?;
        let k: u64 = k.parse().ok()?;
        if k == 0 {
            return None;
        }
        match self.cardinality(b) {
            Cardinality::Finite(n) if k <= n && n > 1 => Some(Edge { bundle: b, copy: k - 1 }),
            Cardinality::AlephNull | Cardinality::Uncountable => Some(Edge { bundle: b, copy: k - 1 }),
            _ => None,
        }
    }

    /// All edges of finite bundles, in (bundle, copy) order.
    pub fn finite_edges(&self) -> Result<Vec<Edge>, GraphError> {
        let mut edges = Vec::new();
        for b in self.bundle_ids() {
            let n = self
                .cardinality(b)
                .finite()
                .ok_or_else(|| GraphError::InfiniteBundle(self.bundle_name(b).to_string()))?;
            edges.extend((0..n).map(|copy| Edge { bundle: b, copy }));
        }
        Ok(edges)
    }

    /// Edges emitted by `v`, expanded; fails on infinite bundles.
    pub fn out_edges(&self, v: VertexId) -> Result<Vec<Edge>, GraphError> {
        let mut edges = Vec::new();
        for &b in &self.out[v.0] {
            let n = self
                .cardinality(b)
                .finite()
                .ok_or_else(|| GraphError::InfiniteBundle(self.bundle_name(b).to_string()))?;
            edges.extend((0..n).map(|copy| Edge { bundle: b, copy }));
        }
        Ok(edges)
    }

    pub fn is_all_finite(&self) -> bool {
        self.bundles.iter().all(|b| b.cardinality.is_finite())
    }

    /// Total number of edges emitted by `v`.
    pub fn out_cardinality(&self, v: VertexId) -> Cardinality {
        self.out[v.0].iter().fold(Cardinality::Finite(0), |acc, b| acc + self.bundles[b.0].cardinality)
    }

    pub fn vertex_class(&self, v: VertexId) -> VertexClass {
        match self.out_cardinality(v) {
            Cardinality::Finite(0) => VertexClass::Sink,
            Cardinality::Finite(n) => VertexClass::Regular(n),
            _ => VertexClass::InfiniteEmitter,
        }
    }

    pub fn vertex_classes(&self) -> BTreeMap<VertexId, VertexClass> {
        self.vertices().map(|v| (v, self.vertex_class(v))).collect()
    }

    pub fn sinks(&self) -> Vec<VertexId> {
        self.vertices().filter(|&v| self.vertex_class(v) == VertexClass::Sink).collect()
    }

    pub fn regular_vertices(&self) -> Vec<VertexId> {
        self.vertices().filter(|&v| self.vertex_class(v).is_regular()).collect()
    }

    pub fn singular_vertices(&self) -> Vec<VertexId> {
        self.vertices().filter(|&v| self.vertex_class(v).is_singular()).collect()
    }

    /// Forward reachability closure (BFS) of a seed set.
    pub fn reachable_from(&self, seeds: impl IntoIterator<Item = VertexId>) -> BTreeSet<VertexId> {
        let mut seen = vec![false; self.vertex_count()];
        let mut queue = VecDeque::new();
        for s in seeds {
            if !seen[s.0] {
                seen[s.0] = true;
                queue.push_back(s);
            }
        }
        while let Some(v) = queue.pop_front() {
            for w in self.successors(v) {
                if !seen[w.0] {
                    seen[w.0] = true;
                    queue.push_back(w);
                }
            }
        }
        seen.iter().enumerate().filter(|(_, &s)| s).map(|(i, _)| VertexId(i)).collect()
    }

    /// `v ≥ w`: some (possibly trivial) path runs from `v` to `w`.
    pub fn reaches(&self, v: VertexId, w: VertexId) -> bool {
        v == w || self.reachable_from([v]).contains(&w)
    }

    pub fn reaches_by_name(&self, v: &str, w: &str) -> Result<bool, GraphError> {
        Ok(self.reaches(self.vertex(v)?, self.vertex(w)?))
    }

    /// Full reachability matrix, `m[v][w] == reaches(v, w)`.
    pub fn reachability_matrix(&self) -> Vec<Vec<bool>> {
        let n = self.vertex_count();
        let mut m = vec![vec![false; n]; n];
        for v in self.vertices() {
            for w in self.reachable_from([v]) {
                m[v.0][w.0] = true;
            }
        }
        m
    }

    /// Strongly connected components (iterative Tarjan), each sorted, in
    /// reverse topological order of the condensation.
    pub fn strongly_connected_components(&self) -> Vec<Vec<VertexId>> {
        let n = self.vertex_count();
        let mut index = vec![usize::MAX; n];
        let mut low = vec![0usize; n];
        let mut on_stack = vec![false; n];
        let mut stack = Vec::new();
        let mut comps = Vec::new();
        let mut counter = 0usize;
        let succ: Vec<Vec<usize>> = (0..n).map(|v| self.successors(VertexId(v)).map(|w| w.0).collect()).collect();

        for root in 0..n {
            if index[root] != usize::MAX {
                continue;
            }
            let mut call: Vec<(usize, usize)> = vec![(root, 0)];
            index[root] = counter;
            low[root] = counter;
            counter += 1;
            stack.push(root);
            on_stack[root] = true;
            while let Some(&mut (v, ref mut i)) = call.last_mut() {
                if *i < succ[v].len() {
                    let w = succ[v][*i];
                    *i += 1;
                    if index[w] == usize::MAX {
                        index[w] = counter;
                        low[w] = counter;
                        counter += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        call.push((w, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                } else {
                    call.pop();
                    if let Some(&(parent, _)) = call.last() {
                        low[parent] = low[parent].min(low[v]);
                    }
                    if low[v] == index[v] {
                        let mut comp = Vec::new();
                        loop {
                            let w = stack.pop().expect("tarjan stack underflow");
                            on_stack[w] = false;
                            comp.push(VertexId(w));
                            if w == v {
                                break;
                            }
                        }
                        comp.sort();
                        comps.push(comp);
                    }
                }
            }
        }
        comps
    }

    /// Whether a component carries a cycle: more than one vertex, or a loop.
    fn component_is_cyclic(&self, comp: &[VertexId]) -> bool {
        comp.len() > 1 || self.out[comp[0].0].iter().any(|b| self.bundles[b.0].dst == comp[0])
    }

    pub fn cyclic_components(&self) -> Vec<Vec<VertexId>> {
        self.strongly_connected_components().into_iter().filter(|c| self.component_is_cyclic(c)).collect()
    }

    pub fn has_cycle(&self) -> bool {
        !self.cyclic_components().is_empty()
    }

    /// Vertices in topological order (sources first); `None` when cyclic.
    pub fn topological_order(&self) -> Option<Vec<VertexId>> {
        let n = self.vertex_count();
        let mut indeg = vec![0usize; n];
        for b in &self.bundles {
            indeg[b.dst.0] += 1;
        }
        let mut queue: VecDeque<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = queue.pop_front() {
            order.push(VertexId(v));
            for w in self.successors(VertexId(v)) {
                indeg[w.0] -= 1;
                if indeg[w.0] == 0 {
                    queue.push_back(w.0);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    /// A cycle through `v` inside its strongly connected component, using
    /// the first copy of every bundle. `None` if `v` lies on no cycle.
    pub fn cycle_through(&self, v: VertexId) -> Option<Path> {
        // BFS from v over edges, recording the bundle used to enter each vertex.
        let mut parent: Vec<Option<BundleId>> = vec![None; self.vertex_count()];
        let mut queue = VecDeque::new();
        let mut closing = None;
        for &b in &self.out[v.0] {
            let w = self.bundles[b.0].dst;
            if w == v {
                closing = Some(b);
                break;
            }
            if parent[w.0].is_none() {
                parent[w.0] = Some(b);
                queue.push_back(w);
            }
        }
        while closing.is_none() {
            let Some(u) = queue.pop_front() else { break };
            for &b in &self.out[u.0] {
                let w = self.bundles[b.0].dst;
                if w == v {
                    closing = Some(b);
                    break;
                }
                if parent[w.0].is_none() && w != v {
                    parent[w.0] = Some(b);
                    queue.push_back(w);
                }
            }
        }
        let closing = closing?;
        let mut bundles = vec![closing];
        let mut cur = self.bundles[closing.0].src;
        while cur != v {
            let b = parent[cur.0].expect("bfs parent");
            bundles.push(b);
            cur = self.bundles[b.0].src;
        }
        bundles.reverse();
        let edges = bundles.into_iter().map(|bundle| Edge { bundle, copy: 0 }).collect();
        Some(Path::from_edges(self, edges).expect("bfs cycle composes"))
    }

    /// Cycle structure and Condition (L).
    ///
    /// A cycle has no exit exactly when every vertex on it emits one edge in
    /// total, so exitless cycles live in the functional subgraph of vertices
    /// with out-cardinality `Finite(1)`.
    pub fn cycles_and_condition_l(&self) -> CycleReport {
        let has_cycle = self.has_cycle();
        let witness = self.exitless_cycle();
        CycleReport { has_cycle, condition_l: witness.is_none(), witness }
    }

    fn exitless_cycle(&self) -> Option<Path> {
        let n = self.vertex_count();
        let unique_out = |v: usize| -> Option<BundleId> {
            match self.out[v].as_slice() {
                [b] if self.bundles[b.0].cardinality == Cardinality::Finite(1) => Some(*b),
                _ => None,
            }
        };
        // 0 = unvisited, 1 = on current walk, 2 = done
        let mut state = vec![0u8; n];
        for start in 0..n {
            if state[start] != 0 {
                continue;
            }
            let mut walk = Vec::new();
            let mut v = start;
            loop {
                if state[v] == 1 {
                    let pos = walk.iter().position(|&(u, _)| u == v).expect("vertex on walk");
                    let edges = walk[pos..].iter().map(|&(_, b)| Edge { bundle: b, copy: 0 }).collect();
                    return Some(Path::from_edges(self, edges).expect("functional walk composes"));
                }
                if state[v] == 2 {
                    break;
                }
                let Some(b) = unique_out(v) else { break };
                state[v] = 1;
                walk.push((v, b));
                v = self.bundles[b.0].dst.0;
            }
            for (u, _) in walk {
                state[u] = 2;
            }
            state[start] = 2;
        }
        None
    }

    /// Cofinality for finite graphs: every vertex reaches every strongly
    /// connected component that carries a cycle. On failure the witness is
    /// a vertex together with a pure-cycle lasso it cannot reach.
    pub fn cofinal(&self) -> CofinalityReport {
        let reach = self.reachability_matrix();
        for comp in self.cyclic_components() {
            let target = comp[0];
            if let Some(v) = self.vertices().find(|v| !reach[v.0][target.0]) {
                let cycle = self.cycle_through(target).expect("cyclic component has a cycle");
                let lasso = LassoPath::new(self, Path::vertex(target), cycle).expect("pure cycle lasso");
                return CofinalityReport { cofinal: false, witness: Some((v, lasso)) };
            }
        }
        CofinalityReport { cofinal: true, witness: None }
    }

    /// All paths (including length-0 paths) ending at `end_at` when given,
    /// of length at most `max_len` (`None` = unbounded, acyclic graphs only),
    /// ordered by length and then lexicographically by edges.
    pub fn enumerate_paths(&self, end_at: Option<VertexId>, max_len: Option<usize>) -> Result<Vec<Path>, GraphError> {
        if let Some(b) = self.bundle_ids().find(|&b| !self.cardinality(b).is_finite()) {
            return Err(GraphError::InfiniteBundle(self.bundle_name(b).to_string()));
        }
        if max_len.is_none() && self.has_cycle() {
            return Err(GraphError::UnboundedOnCyclic);
        }
        let mut layer: Vec<Path> = match end_at {
            Some(v) => vec![Path::vertex(v)],
            None => self.vertices().map(Path::vertex).collect(),
        };
        let mut all = layer.clone();
        let mut len = 0usize;
        while !layer.is_empty() && max_len.is_none_or(|m| len < m) {
            let mut next = Vec::new();
            for p in &layer {
                for &b in &self.inc[p.source().0] {
                    let n = self.cardinality(b).finite().expect("checked finite");
                    for copy in 0..n {
                        next.push(p.prepend(self, Edge { bundle: b, copy }));
                    }
                }
            }
            next.sort();
            all.extend(next.iter().cloned());
            layer = next;
            len += 1;
        }
        Ok(all)
    }

    /// Number of paths ending at each vertex (acyclic, all-finite graphs).
    pub fn path_counts_into(&self) -> Result<Vec<u128>, GraphError> {
        let order = self.topological_order().ok_or(GraphError::UnboundedOnCyclic)?;
        let mut count = vec![1u128; self.vertex_count()];
        for v in order {
            for &b in &self.inc[v.0] {
                let n = self
                    .cardinality(b)
                    .finite()
                    .ok_or_else(|| GraphError::InfiniteBundle(self.bundle_name(b).to_string()))?;
                let from = count[self.bundle_src(b).0];
                let add = from.checked_mul(n as u128).ok_or(GraphError::CountOverflow)?;
                count[v.0] = count[v.0].checked_add(add).ok_or(GraphError::CountOverflow)?;
            }
        }
        Ok(count)
    }

    /// Number of paths from `from` to every vertex (acyclic, all-finite).
    pub fn path_counts_from(&self, from: VertexId) -> Result<Vec<u128>, GraphError> {
        let order = self.topological_order().ok_or(GraphError::UnboundedOnCyclic)?;
        let mut count = vec![0u128; self.vertex_count()];
        count[from.0] = 1;
        for v in order {
            if count[v.0] == 0 {
                continue;
            }
            for &b in &self.out[v.0] {
                let n = self
                    .cardinality(b)
                    .finite()
                    .ok_or_else(|| GraphError::InfiniteBundle(self.bundle_name(b).to_string()))?;
                let w = self.bundle_dst(b);
                let add = count[v.0].checked_mul(n as u128).ok_or(GraphError::CountOverflow)?;
                count[w.0] = count[w.0].checked_add(add).ok_or(GraphError::CountOverflow)?;
            }
        }
        Ok(count)
    }

    /// Whether `self` is a subgraph of `other`: every vertex and bundle
    /// (matched by id, with equal endpoints and cardinality) appears there.
    pub fn is_subgraph_of(&self, other: &Graph) -> bool {
        self.names.iter().all(|n| other.contains_vertex(n))
            && self.bundles.iter().all(|b| {
                other.bundle(&b.id).is_some_and(|ob| {
                    other.name(other.bundle_src(ob)) == self.names[b.src.0]
                        && other.name(other.bundle_dst(ob)) == self.names[b.dst.0]
                        && other.cardinality(ob) == b.cardinality
                })
            })
    }

    /// The subgraph on `keep`: vertices in graph order, bundles with both
    /// endpoints kept.
    pub fn induced(&self, keep: &BTreeSet<VertexId>) -> Graph {
        let vertices: Vec<&str> = keep.iter().map(|&v| self.name(v)).collect();
        let bundles: Vec<EdgeBundle> = self
            .bundles
            .iter()
            .filter(|b| keep.contains(&b.src) && keep.contains(&b.dst))
            .map(|b| {
                EdgeBundle::new(b.id.clone(), self.names[b.src.0].clone(), self.names[b.dst.0].clone(), b.cardinality)
            })
            .collect();
        Graph::build(&vertices, &bundles).expect("induced subgraph of a valid graph is valid")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleReport {
    pub has_cycle: bool,
    pub condition_l: bool,
    /// A cycle without an exit, present exactly when Condition (L) fails.
    pub witness: Option<Path>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CofinalityReport {
    pub cofinal: bool,
    pub witness: Option<(VertexId, LassoPath)>,
}

/// A finite path. Length-0 paths are vertices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Path {
    edges: Vec<Edge>,
    source: VertexId,
    range: VertexId,
}

impl Ord for Path {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.edges
            .len()
            .cmp(&other.edges.len())
            .then_with(|| self.edges.cmp(&other.edges))
            .then_with(|| self.source.cmp(&other.source))
    }
}

impl PartialOrd for Path {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Path {
    pub fn vertex(v: VertexId) -> Path {
        Path { edges: Vec::new(), source: v, range: v }
    }

    pub fn from_edges(g: &Graph, edges: Vec<Edge>) -> Result<Path, GraphError> {
        let first = *edges.first().ok_or(GraphError::NotACycle)?;
        for w in edges.windows(2) {
            if g.range(w[0]) != g.source(w[1]) {
                return Err(GraphError::NotComposable(g.edge_label(w[0]), g.edge_label(w[1])));
            }
        }
        let last = *edges.last().expect("nonempty");
        Ok(Path { source: g.source(first), range: g.range(last), edges })
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn source(&self) -> VertexId {
        self.source
    }

    pub fn range(&self) -> VertexId {
        self.range
    }

    pub fn is_cycle(&self) -> bool {
        !self.edges.is_empty() && self.source == self.range
    }

    /// `e·self`; the caller guarantees `r(e) = s(self)`.
    pub fn prepend(&self, g: &Graph, e: Edge) -> Path {
        debug_assert_eq!(g.range(e), self.source);
        let mut edges = Vec::with_capacity(self.edges.len() + 1);
        edges.push(e);
        edges.extend_from_slice(&self.edges);
        Path { edges, source: g.source(e), range: self.range }
    }

    /// Concatenation `self·other`, if composable.
    pub fn concat(&self, other: &Path) -> Option<Path> {
        if self.range != other.source {
            return None;
        }
        let mut edges = self.edges.clone();
        edges.extend_from_slice(&other.edges);
        Some(Path { edges, source: self.source, range: other.range })
    }

    /// The vertices visited, `s(e_1), …, s(e_n), r(e_n)`.
    pub fn vertices(&self, g: &Graph) -> Vec<VertexId> {
        let mut vs = vec![self.source];
        vs.extend(self.edges.iter().map(|&e| g.range(e)));
        vs
    }

    /// Vertex name for length-0 paths, otherwise edge labels joined by `.`.
    pub fn display(&self, g: &Graph) -> String {
        if self.edges.is_empty() {
            g.name(self.source).to_string()
        } else {
            self.edges.iter().map(|&e| g.edge_label(e)).collect::<Vec<_>>().join(".")
        }
    }
}

/// An eventually periodic infinite path `stem · cycle · cycle · …`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LassoPath {
    pub stem: Path,
    pub cycle: Path,
}

impl LassoPath {
    pub fn new(_g: &Graph, stem: Path, cycle: Path) -> Result<LassoPath, GraphError> {
        if !cycle.is_cycle() {
            return Err(GraphError::NotACycle);
        }
        if stem.range() != cycle.source() {
            return Err(GraphError::LassoMismatch);
        }
        Ok(LassoPath { stem, cycle })
    }

    /// Every vertex appearing as the source of some edge of the unrolling.
    pub fn vertices(&self, g: &Graph) -> BTreeSet<VertexId> {
        let mut vs: BTreeSet<VertexId> = self.stem.vertices(g).into_iter().collect();
        vs.extend(self.cycle.vertices(g));
        vs
    }

    /// The first `n` edges of the unrolling.
    pub fn prefix(&self, n: usize) -> Vec<Edge> {
        self.stem.edges().iter().chain(self.cycle.edges().iter().cycle()).take(n).copied().collect()
    }

    pub fn display(&self, g: &Graph) -> String {
        let stem = if self.stem.is_empty() { String::new() } else { format!("{}.", self.stem.display(g)) };
        format!("{stem}({})^inf", self.cycle.display(g))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g1() -> Graph {
        Graph::build(&["v", "w"], &[EdgeBundle::single("e", "v", "w")]).unwrap()
    }

    fn ladder(n: usize) -> Graph {
        let vs: Vec<String> = (1..=n).map(|i| format!("w_{i}")).collect();
        let mut bs = Vec::new();
        for i in 1..n {
            bs.push(EdgeBundle::single(format!("e_{i}"), format!("w_{i}"), format!("w_{}", i + 1)));
            bs.push(EdgeBundle::single(format!("f_{i}"), format!("w_{i}"), format!("w_{}", i + 1)));
        }
        Graph::build(&vs, &bs).unwrap()
    }

    #[test]
    fn build_validates() {
        let g = g1();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.bundle_count(), 1);
        let rose =
            Graph::build(&["u"], &[EdgeBundle::single("a", "u", "u"), EdgeBundle::single("b", "u", "u")]).unwrap();
        assert_eq!(rose.vertex_class(VertexId(0)), VertexClass::Regular(2));
        assert_eq!(
            Graph::build(&["v"], &[EdgeBundle::single("e", "v", "x")]).unwrap_err(),
            GraphError::DanglingVertex { edge: "e".into(), vertex: "x".into() }
        );
        assert!(matches!(Graph::build(&["v", "v"], &[]), Err(GraphError::DuplicateVertex(_))));
        assert!(matches!(
            Graph::build(&["v"], &[EdgeBundle::single("e", "v", "v"), EdgeBundle::single("e", "v", "v")]),
            Err(GraphError::DuplicateEdge(_))
        ));
        assert!(matches!(
            Graph::build(&["v"], &[EdgeBundle::new("e", "v", "v", Cardinality::Finite(0))]),
            Err(GraphError::EmptyBundle(_))
        ));
    }

    #[test]
    fn g1_paths_into_sink() {
        let g = g1();
        let w = g.vertex("w").unwrap();
        let paths = g.enumerate_paths(Some(w), None).unwrap();
        let shown: Vec<String> = paths.iter().map(|p| p.display(&g)).collect();
        assert_eq!(shown, ["w", "e"]);
    }

    #[test]
    fn ladder_path_counts() {
        let g = ladder(4);
        let w4 = g.vertex("w_4").unwrap();
        assert_eq!(g.enumerate_paths(Some(w4), None).unwrap().len(), 15);
        let w1 = g.vertex("w_1").unwrap();
        for n in 2..=7 {
            let g = ladder(n);
            let last = g.vertex(&format!("w_{n}")).unwrap();
            let from_w1 = g.enumerate_paths(Some(last), None).unwrap().into_iter().filter(|p| p.source() == w1).count();
            assert_eq!(from_w1, 1 << (n - 1));
            assert_eq!(g.path_counts_from(w1).unwrap()[last.0], 1 << (n - 1));
        }
    }

    #[test]
    fn enumeration_refuses_bad_input() {
        let loop_g = Graph::build(&["u"], &[EdgeBundle::single("a", "u", "u")]).unwrap();
        assert_eq!(loop_g.enumerate_paths(None, None).unwrap_err(), GraphError::UnboundedOnCyclic);
        assert_eq!(loop_g.enumerate_paths(None, Some(3)).unwrap().len(), 4);
        let inf = Graph::build(&["u", "v"], &[EdgeBundle::new("a", "u", "v", Cardinality::AlephNull)]).unwrap();
        assert!(matches!(inf.enumerate_paths(None, Some(1)), Err(GraphError::InfiniteBundle(_))));
    }

    #[test]
    fn parallel_bundle_expands() {
        let g = Graph::build(&["v", "w"], &[EdgeBundle::new("b", "v", "w", Cardinality::Finite(2))]).unwrap();
        let paths = g.enumerate_paths(None, None).unwrap();
        let shown: Vec<String> = paths.iter().map(|p| p.display(&g)).collect();
        assert_eq!(shown, ["v", "w", "b#1", "b#2"]);
        assert_eq!(g.edge_by_label("b#2"), Some(Edge { bundle: BundleId(0), copy: 1 }));
        assert_eq!(g.edge_by_label("b#3"), None);
    }

    #[test]
    fn vertex_classes_cover_cardinalities() {
        let g = g1();
        assert_eq!(g.vertex_class(g.vertex("v").unwrap()), VertexClass::Regular(1));
        assert_eq!(g.vertex_class(g.vertex("w").unwrap()), VertexClass::Sink);
        let inf = Graph::build(&["u"], &[EdgeBundle::new("a", "u", "u", Cardinality::AlephNull)]).unwrap();
        assert_eq!(inf.vertex_class(VertexId(0)), VertexClass::InfiniteEmitter);
    }

    #[test]
    fn reachability() {
        let g = g1();
        assert!(g.reaches_by_name("v", "w").unwrap());
        assert!(!g.reaches_by_name("w", "v").unwrap());
        assert!(g.reaches_by_name("w", "w").unwrap());
        assert!(ladder(3).reaches_by_name("w_1", "w_3").unwrap());
        assert!(matches!(g.reaches_by_name("v", "zz"), Err(GraphError::UnknownVertex(_))));
    }

    #[test]
    fn condition_l_examples() {
        let single = Graph::build(&["u"], &[EdgeBundle::single("a", "u", "u")]).unwrap();
        let r = single.cycles_and_condition_l();
        assert!(r.has_cycle && !r.condition_l);
        assert_eq!(r.witness.unwrap().display(&single), "a");

        let rose =
            Graph::build(&["u"], &[EdgeBundle::single("a", "u", "u"), EdgeBundle::single("b", "u", "u")]).unwrap();
        let r = rose.cycles_and_condition_l();
        assert!(r.has_cycle && r.condition_l);

        let r = g1().cycles_and_condition_l();
        assert!(!r.has_cycle && r.condition_l);

        // a doubled loop exits through its parallel copy
        let doubled = Graph::build(&["u"], &[EdgeBundle::new("a", "u", "u", Cardinality::Finite(2))]).unwrap();
        assert!(doubled.cycles_and_condition_l().condition_l);
    }

    #[test]
    fn exitless_cycle_after_tail() {
        // x -> a -> b -> a, and x also exits elsewhere
        let g = Graph::build(
            &["x", "a", "b", "y"],
            &[
                EdgeBundle::single("xa", "x", "a"),
                EdgeBundle::single("xy", "x", "y"),
                EdgeBundle::single("ab", "a", "b"),
                EdgeBundle::single("ba", "b", "a"),
            ],
        )
        .unwrap();
        let r = g.cycles_and_condition_l();
        assert!(!r.condition_l);
        let w = r.witness.unwrap();
        assert!(w.is_cycle());
        assert_eq!(w.len(), 2);
    }

    #[test]
    fn cofinality_examples() {
        assert!(g1().cofinal().cofinal);
        let single = Graph::build(&["u"], &[EdgeBundle::single("a", "u", "u")]).unwrap();
        assert!(single.cofinal().cofinal);
        let two = Graph::build(&["a", "b"], &[EdgeBundle::single("la", "a", "a"), EdgeBundle::single("lb", "b", "b")])
            .unwrap();
        let r = two.cofinal();
        assert!(!r.cofinal);
        let (v, lasso) = r.witness.unwrap();
        assert!(!lasso.vertices(&two).contains(&v));
        assert!(lasso.stem.is_empty());
    }

    #[test]
    fn scc_and_topology() {
        let g = ladder(4);
        assert_eq!(g.strongly_connected_components().len(), 4);
        assert!(g.topological_order().is_some());
        let cyc =
            Graph::build(&["a", "b"], &[EdgeBundle::single("x", "a", "b"), EdgeBundle::single("y", "b", "a")]).unwrap();
        assert_eq!(cyc.strongly_connected_components(), vec![vec![VertexId(0), VertexId(1)]]);
        assert!(cyc.topological_order().is_none());
        assert_eq!(cyc.cycle_through(VertexId(1)).unwrap().len(), 2);
    }
}
