//! Exact finite-dimensional Cuntz-Krieger families on path bases.
//!
//! For a finite acyclic graph with finite bundles and a set `S` of regular
//! vertices, the model acts on the span of all paths ending at a sink or at
//! a regular vertex outside `S`. `p_v` projects onto the paths starting at
//! `v` and `s_e` sends `δ_α` to `δ_{eα}`. Relation (CK3) then holds exactly
//! on `S`, and every gap projection off `S` is the rank-one projection onto
//! `δ_v`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde_json::{json, Value};
use thiserror::Error;

use crate::graph::{Edge, Graph, GraphError, Path, VertexClass, VertexId};
use crate::matrix::{RationalSpan, SparseMatrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CkError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("cyclic graph: no finite-dimensional model")]
    Cyclic,
    #[error("vertex `{0}` is not regular and cannot carry relation (CK3)")]
    NotRegular(String),
    #[error("block decomposition needs the full graph algebra; regular vertices {0:?} are excluded from S")]
    ExcludedRegulars(Vec<String>),
    #[error("stage graphs do not nest: {0}")]
    DimensionMismatch(String),
    #[error("step vertex `{0}` must be a sink before the step and a regular vertex with (CK3) after it")]
    BadStepVertex(String),
    #[error("no basis paths end at the step vertex; the sample spans nothing")]
    NonSpanningSample,
}

/// The set `S` of regular vertices where (CK3) is imposed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelativeSpec {
    s: BTreeSet<VertexId>,
}

impl RelativeSpec {
    /// `S` = all regular vertices: the graph algebra itself.
    pub fn full(g: &Graph) -> Self {
        RelativeSpec { s: g.regular_vertices().into_iter().collect() }
    }

    /// `S = ∅`: the Toeplitz algebra.
    pub fn toeplitz() -> Self {
        RelativeSpec { s: BTreeSet::new() }
    }

    pub fn new(g: &Graph, s: impl IntoIterator<Item = VertexId>) -> Result<Self, CkError> {
        let s: BTreeSet<VertexId> = s.into_iter().collect();
        for &v in &s {
            if v.0 >= g.vertex_count() {
                return Err(GraphError::UnknownVertex(format!("#{}", v.0)).into());
            }
            if !g.vertex_class(v).is_regular() {
                return Err(CkError::NotRegular(g.name(v).to_string()));
            }
        }
        Ok(RelativeSpec { s })
    }

    pub fn from_names<S: AsRef<str>>(g: &Graph, names: &[S]) -> Result<Self, CkError> {
        let ids = names.iter().map(|n| g.vertex(n.as_ref())).collect::<Result<Vec<_>, _>>()?;
        Self::new(g, ids)
    }

    pub fn vertices(&self) -> &BTreeSet<VertexId> {
        &self.s
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.s.contains(&v)
    }

    pub fn is_full(&self, g: &Graph) -> bool {
        g.regular_vertices().iter().all(|v| self.s.contains(v))
    }
}

fn check_modelable(g: &Graph) -> Result<(), CkError> {
    if let Some(b) = g.bundle_ids().find(|&b| !g.cardinality(b).is_finite()) {
        return Err(GraphError::InfiniteBundle(g.bundle_name(b).to_string()).into());
    }
    if g.has_cycle() {
        return Err(CkError::Cyclic);
    }
    Ok(())
}

fn is_terminal(g: &Graph, spec: &RelativeSpec, v: VertexId) -> bool {
    match g.vertex_class(v) {
        VertexClass::Sink => true,
        VertexClass::Regular(_) => !spec.contains(v),
        VertexClass::InfiniteEmitter => false,
    }
}

/// Paths whose range is a sink or a regular vertex outside `S`, in the
/// deterministic enumeration order.
pub fn path_basis(g: &Graph, spec: &RelativeSpec) -> Result<Vec<Path>, CkError> {
    check_modelable(g)?;
    Ok(g.enumerate_paths(None, None)?.into_iter().filter(|p| is_terminal(g, spec, p.range())).collect())
}

#[derive(Debug, Clone)]
pub struct MatrixRep {
    pub graph: Graph,
    pub spec: RelativeSpec,
    pub basis: Vec<Path>,
    pub p: BTreeMap<VertexId, SparseMatrix>,
    pub s: BTreeMap<Edge, SparseMatrix>,
    index: HashMap<Path, usize>,
}

pub fn build_ck_family(g: &Graph, spec: &RelativeSpec) -> Result<MatrixRep, CkError> {
    let basis = path_basis(g, spec)?;
    let n = basis.len();
    let index: HashMap<Path, usize> = basis.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
    let p = g
        .vertices()
        .map(|v| {
            (
                v,
                SparseMatrix::diagonal_projection(
                    n,
                    basis.iter().enumerate().filter(|(_, a)| a.source() == v).map(|(i, _)| i),
                ),
            )
        })
        .collect();
    let mut s = BTreeMap::new();
    for e in g.finite_edges()? {
        let pairs = basis
            .iter()
            .enumerate()
            .filter(|(_, a)| a.source() == g.range(e))
            .map(|(i, a)| (index[&a.prepend(g, e)], i));
        s.insert(e, SparseMatrix::partial_permutation(n, pairs));
    }
    Ok(MatrixRep { graph: g.clone(), spec: spec.clone(), basis, p, s, index })
}

impl MatrixRep {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis_index(&self, path: &Path) -> Option<usize> {
        self.index.get(path).copied()
    }

    /// `s_α` built directly on the basis: `δ_γ ↦ δ_{αγ}`.
    pub fn path_operator(&self, alpha: &Path) -> SparseMatrix {
        let pairs = self
            .basis
            .iter()
            .enumerate()
            .filter(|(_, g)| g.source() == alpha.range())
            .map(|(i, g)| (self.index[&alpha.concat(g).expect("composable")], i));
        SparseMatrix::partial_permutation(self.dim(), pairs)
    }

    /// `s_α` as the product `s_{e_1} ⋯ s_{e_n}` (or `p_v` for a vertex).
    pub fn path_operator_by_product(&self, alpha: &Path) -> SparseMatrix {
        let mut m = self.p[&alpha.source()].clone();
        for e in alpha.edges() {
            m = &m * &self.s[e];
        }
        m
    }

    /// `s_α s_β^*`: `δ_{βγ} ↦ δ_{αγ}`; zero unless `r(α) = r(β)`.
    pub fn unit(&self, alpha: &Path, beta: &Path) -> SparseMatrix {
        if alpha.range() != beta.range() {
            return SparseMatrix::zeros(self.dim(), self.dim());
        }
        let pairs = self.basis.iter().filter(|g| g.source() == alpha.range()).map(|g| {
            (self.index[&alpha.concat(g).expect("composable")], self.index[&beta.concat(g).expect("composable")])
        });
        SparseMatrix::partial_permutation(self.dim(), pairs)
    }

    /// Terminal vertex of each basis path.
    pub fn terminals(&self) -> BTreeSet<VertexId> {
        self.basis.iter().map(Path::range).collect()
    }

    /// Machine-readable export: basis path strings and sparse triples.
    pub fn to_json(&self) -> Value {
        let g = &self.graph;
        let triples =
            |m: &SparseMatrix| -> Value { m.triples().map(|(r, c, v)| json!([r, c, v])).collect::<Vec<_>>().into() };
        let p: serde_json::Map<String, Value> =
            self.p.iter().map(|(&v, m)| (g.name(v).to_string(), triples(m))).collect();
        let s: serde_json::Map<String, Value> = self.s.iter().map(|(&e, m)| (g.edge_label(e), triples(m))).collect();
        json!({
            "dimension": self.dim(),
            "relative_to": self.spec.s.iter().map(|&v| g.name(v)).collect::<Vec<_>>(),
            "basis": self.basis.iter().map(|b| b.display(g)).collect::<Vec<_>>(),
            "p": p,
            "s": s,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CkReport {
    pub ck1: bool,
    pub ck2: bool,
    /// For every regular vertex: whether (CK3) holds there.
    pub ck3_at: BTreeMap<VertexId, bool>,
    pub mutual_orthogonality: bool,
    /// `p_v` are self-adjoint idempotents and `s_e` partial isometries.
    pub generators_well_formed: bool,
    pub failures: Vec<String>,
}

impl CkReport {
    /// Every identity required of an `(E, S)`-family holds, with (CK3)
    /// holding exactly on `S`.
    pub fn is_relative_family(&self, spec: &RelativeSpec) -> bool {
        self.ck1
            && self.ck2
            && self.mutual_orthogonality
            && self.generators_well_formed
            && self.ck3_at.iter().all(|(v, &ok)| !spec.contains(*v) || ok)
    }
}

/// Checks the Cuntz-Krieger identities by exact matrix arithmetic.
pub fn verify_ck(rep: &MatrixRep) -> CkReport {
    let g = &rep.graph;
    let mut failures = Vec::new();
    let mut well_formed = true;
    for (&v, p) in &rep.p {
        if &(p * p) != p || &p.adjoint() != p {
            well_formed = false;
            failures.push(format!("p_{} is not a projection", g.name(v)));
        }
    }
    let ranges: BTreeMap<Edge, SparseMatrix> = rep.s.iter().map(|(&e, s)| (e, s * &s.adjoint())).collect();
    for (&e, s) in &rep.s {
        if &(&ranges[&e] * s) != s {
            well_formed = false;
            failures.push(format!("s_{} is not a partial isometry", g.edge_label(e)));
        }
    }

    let mut ck1 = true;
    for (&e, s) in &rep.s {
        if &s.adjoint() * s != rep.p[&g.range(e)] {
            ck1 = false;
            failures.push(format!("CK1 fails at {}", g.edge_label(e)));
        }
    }
    let mut ck2 = true;
    for (&e, range) in &ranges {
        if &(range * &rep.p[&g.source(e)]) != range {
            ck2 = false;
            failures.push(format!("CK2 fails at {}", g.edge_label(e)));
        }
    }

    let mut orthogonal = true;
    let ps: Vec<(&VertexId, &SparseMatrix)> = rep.p.iter().collect();
    for (i, (v, a)) in ps.iter().enumerate() {
        for (w, b) in &ps[i + 1..] {
            if !(*a * *b).is_zero() {
                orthogonal = false;
                failures.push(format!("p_{} and p_{} are not orthogonal", g.name(**v), g.name(**w)));
            }
        }
    }
    let rs: Vec<(&Edge, &SparseMatrix)> = ranges.iter().collect();
    for (i, (e, a)) in rs.iter().enumerate() {
        for (f, b) in &rs[i + 1..] {
            if !(*a * *b).is_zero() {
                orthogonal = false;
                failures.push(format!("ranges of s_{} and s_{} overlap", g.edge_label(**e), g.edge_label(**f)));
            }
        }
    }

    let mut ck3_at = BTreeMap::new();
    for v in g.regular_vertices() {
        let holds = rep.p[&v] == range_sum(rep, v);
        if rep.spec.contains(v) && !holds {
            failures.push(format!("CK3 fails at {}", g.name(v)));
        }
        ck3_at.insert(v, holds);
    }
    CkReport { ck1, ck2, ck3_at, mutual_orthogonality: orthogonal, generators_well_formed: well_formed, failures }
}

fn range_sum(rep: &MatrixRep, v: VertexId) -> SparseMatrix {
    let mut sum = SparseMatrix::zeros(rep.dim(), rep.dim());
    for (&e, s) in &rep.s {
        if rep.graph.source(e) == v {
            sum = &sum + &(s * &s.adjoint());
        }
    }
    sum
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapProjection {
    pub matrix: SparseMatrix,
    pub rank: usize,
    pub nonzero: bool,
}

/// `q_v = p_v − Σ_{s(e)=v} s_e s_e^*` for every regular `v ∉ S`.
pub fn gap_projections(rep: &MatrixRep) -> BTreeMap<VertexId, GapProjection> {
    rep.graph
        .regular_vertices()
        .into_iter()
        .filter(|v| !rep.spec.contains(*v))
        .map(|v| {
            let q = &rep.p[&v] - &range_sum(rep, v);
            let rank = q.rank();
            (v, GapProjection { nonzero: !q.is_zero(), matrix: q, rank })
        })
        .collect()
}

/// Dimension of the span of `{ s_α s_β^* : r(α) = r(β) }`, by exact rank.
pub fn algebra_dimension(rep: &MatrixRep) -> Result<usize, CkError> {
    let paths = rep.graph.enumerate_paths(None, None)?;
    Ok(span_rank(rep, &paths))
}

/// The closed form `Σ_t (number of basis paths ending at t)²`.
pub fn algebra_dimension_formula(rep: &MatrixRep) -> u128 {
    let mut per: BTreeMap<VertexId, u128> = BTreeMap::new();
    for b in &rep.basis {
        *per.entry(b.range()).or_default() += 1;
    }
    per.values().map(|c| c * c).sum()
}

fn span_rank(rep: &MatrixRep, paths: &[Path]) -> usize {
    let mut by_range: BTreeMap<VertexId, Vec<&Path>> = BTreeMap::new();
    for p in paths {
        by_range.entry(p.range()).or_default().push(p);
    }
    let mut units: Vec<SparseMatrix> = Vec::new();
    for group in by_range.values() {
        for a in group {
            for b in group {
                let u = rep.unit(a, b);
                if !u.is_zero() {
                    units.push(u);
                }
            }
        }
    }
    units.sort_by_key(SparseMatrix::nnz);
    let mut span = RationalSpan::new();
    for u in &units {
        span.insert(u.flat_entries());
    }
    span.dim()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Block {
    pub terminal: VertexId,
    pub size: usize,
}

/// Orbits of the basis under the generators. Each orbit is a minimal
/// invariant subspace on which the algebra acts as a full matrix algebra.
fn orbit_blocks(rep: &MatrixRep) -> Vec<(Vec<usize>, VertexId)> {
    let n = rep.dim();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for s in rep.s.values() {
        for (r, c, _) in s.triples() {
            let (a, b) = (find(&mut parent, r), find(&mut parent, c));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut comps: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        let root = find(&mut parent, i);
        comps.entry(root).or_default().push(i);
    }
    let mut out: Vec<(Vec<usize>, VertexId)> = comps
        .into_values()
        .map(|members| {
            let t = rep.basis[members[0]].range();
            debug_assert!(members.iter().all(|&i| rep.basis[i].range() == t));
            (members, t)
        })
        .collect();
    out.sort_by_key(|(_, t)| *t);
    out
}

/// One block per sink, sized by the paths ending there.
pub fn block_decomposition(rep: &MatrixRep) -> Result<Vec<Block>, CkError> {
    if !rep.spec.is_full(&rep.graph) {
        let excluded = rep
            .graph
            .regular_vertices()
            .into_iter()
            .filter(|v| !rep.spec.contains(*v))
            .map(|v| rep.graph.name(v).to_string())
            .collect();
        return Err(CkError::ExcludedRegulars(excluded));
    }
    Ok(orbit_blocks(rep).into_iter().map(|(m, terminal)| Block { terminal, size: m.len() }).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CornerReport {
    pub dimension: usize,
    pub full: bool,
}

/// The corner `p_v A p_v`: its dimension by exact rank, and whether `p_v`
/// generates the whole algebra as a two-sided ideal.
pub fn corner(rep: &MatrixRep, v: &str) -> Result<CornerReport, CkError> {
    let v = rep.graph.vertex(v)?;
    let from_v: Vec<Path> = rep.graph.enumerate_paths(None, None)?.into_iter().filter(|p| p.source() == v).collect();
    let dimension = span_rank(rep, &from_v);
    // the ideal generated by p_v is the sum of the blocks where p_v is nonzero
    let pv = &rep.p[&v];
    let full = orbit_blocks(rep).iter().all(|(members, _)| members.iter().any(|&i| pv.get(i, i) != 0));
    Ok(CornerReport { dimension, full })
}

/// One step of a chain of finite-dimensional subalgebras.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbedStep {
    /// The vertex that is a sink in the smaller stage and gains edges.
    pub vertex: String,
    /// Restrict the spanning units to paths starting here.
    pub base: Option<String>,
    /// Units drawn from this many spanning paths are multiplied pairwise.
    pub sample: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbedReport {
    /// Number of spanning paths ending at the step vertex.
    pub source_dim: usize,
    /// Number of isometries `δ_α ↦ δ_{αeγ}` in the amplification.
    pub multiplicity: usize,
    pub units_checked: usize,
    pub products_checked: usize,
    pub ok: bool,
    pub failures: Vec<String>,
}

/// Checks that `s_α s_β^* ↦ Σ_e s_{αe} s_{βe}^*` maps the units over paths
/// ending at the step vertex in one stage into the next stage's algebra,
/// agrees with the inclusion `s_α s_β^* ↦ s_α s_β^*`, is an amplification
/// by isometries with orthogonal ranges, and is multiplicative on a sample.
pub fn embed_check(rep_n: &MatrixRep, rep_next: &MatrixRep, step: &EmbedStep) -> Result<EmbedReport, CkError> {
    let (g0, g1) = (&rep_n.graph, &rep_next.graph);
    if !g0.is_subgraph_of(g1) {
        return Err(CkError::DimensionMismatch("the smaller stage is not a subgraph of the larger one".into()));
    }
    let v0 = g0.vertex(&step.vertex).map_err(|_| CkError::BadStepVertex(step.vertex.clone()))?;
    let v1 = g1.vertex(&step.vertex)?;
    if g0.vertex_class(v0) != VertexClass::Sink || !rep_next.spec.contains(v1) {
        return Err(CkError::BadStepVertex(step.vertex.clone()));
    }
    let base0 = step.base.as_deref().map(|b| g0.vertex(b)).transpose()?;
    let spanning: Vec<&Path> =
        rep_n.basis.iter().filter(|p| p.range() == v0 && base0.is_none_or(|b| p.source() == b)).collect();
    if spanning.is_empty() {
        return Err(CkError::NonSpanningSample);
    }
    let lift = |p: &Path| -> Result<Path, CkError> {
        if p.is_empty() {
            return Ok(Path::vertex(g1.vertex(g0.name(p.source()))?));
        }
        let edges = p
            .edges()
            .iter()
            .map(|&e| g1.edge_by_label(&g0.edge_label(e)).ok_or_else(|| CkError::DimensionMismatch(g0.edge_label(e))))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Path::from_edges(g1, edges)?)
    };
    let lifted: Vec<Path> = spanning.iter().map(|p| lift(p)).collect::<Result<_, _>>()?;
    let k = spanning.len();
    let out_edges = g1.out_edges(v1)?;

    // the isometries W_{e,γ}: δ_α ↦ δ_{αeγ}, as dim(next) × k matrices
    let mut isometries: Vec<SparseMatrix> = Vec::new();
    for &e in &out_edges {
        for gamma in rep_next.basis.iter().filter(|g| g.source() == g1.range(e)) {
            let mut w = SparseMatrix::zeros(rep_next.dim(), k);
            for (j, a) in lifted.iter().enumerate() {
                let target =
                    a.concat(&Path::from_edges(g1, vec![e])?).and_then(|ae| ae.concat(gamma)).expect("composable");
                let row =
                    rep_next.basis_index(&target).ok_or_else(|| CkError::DimensionMismatch(target.display(g1)))?;
                w.set(row, j, 1);
            }
            isometries.push(w);
        }
    }

    let mut failures = Vec::new();
    let eye = SparseMatrix::identity(k);
    for (i, wi) in isometries.iter().enumerate() {
        for (j, wj) in isometries.iter().enumerate() {
            let prod = &wi.adjoint() * wj;
            let expect = if i == j { eye.clone() } else { SparseMatrix::zeros(k, k) };
            if prod != expect {
                failures.push(format!("isometries {i} and {j} are not orthonormal"));
            }
        }
    }

    let image = |a: usize, b: usize| -> SparseMatrix {
        let mut sum = SparseMatrix::zeros(rep_next.dim(), rep_next.dim());
        for &e in &out_edges {
            let ep = Path::from_edges(g1, vec![e]).expect("edge path");
            let (ae, be) = (lifted[a].concat(&ep).expect("composable"), lifted[b].concat(&ep).expect("composable"));
            sum = &sum + &rep_next.unit(&ae, &be);
        }
        sum
    };
    let theta = |a: usize, b: usize| SparseMatrix::partial_permutation(k, [(a, b)]);

    let mut units_checked = 0;
    let mut images: HashMap<(usize, usize), SparseMatrix> = HashMap::new();
    for a in 0..k {
        for b in 0..k {
            let img = image(a, b);
            if img != rep_next.unit(&lifted[a], &lifted[b]) {
                failures.push(format!(
                    "square fails to commute at ({}, {})",
                    spanning[a].display(g0),
                    spanning[b].display(g0)
                ));
            }
            let amplified = isometries.iter().fold(SparseMatrix::zeros(rep_next.dim(), rep_next.dim()), |acc, w| {
                &acc + &(&(w * &theta(a, b)) * &w.adjoint())
            });
            if img != amplified {
                failures.push(format!("image of ({a}, {b}) is not the amplification"));
            }
            if img.is_zero() {
                failures.push(format!("image of ({a}, {b}) vanishes"));
            }
            if img.adjoint() != image(b, a) {
                failures.push(format!("image of ({a}, {b}) does not respect adjoints"));
            }
            units_checked += 1;
            if a < step.sample && b < step.sample {
                images.insert((a, b), img);
            }
        }
    }

    // multiplicativity on the sample, with products taken in the smaller stage
    let sample = step.sample.min(k);
    let mut products_checked = 0;
    let units_n: HashMap<(usize, usize), SparseMatrix> = (0..sample)
        .flat_map(|a| (0..sample).map(move |b| (a, b)))
        .map(|(a, b)| ((a, b), rep_n.unit(spanning[a], spanning[b])))
        .collect();
    let pos: HashMap<usize, usize> =
        spanning.iter().enumerate().map(|(j, p)| (rep_n.basis_index(p).expect("basis path"), j)).collect();
    for x in 0..sample * sample {
        for y in 0..sample * sample {
            let (kx, ky) = ((x / sample, x % sample), (y / sample, y % sample));
            let lhs = &images[&kx] * &images[&ky];
            let prod = &units_n[&kx] * &units_n[&ky];
            let mut rhs = SparseMatrix::zeros(rep_next.dim(), rep_next.dim());
            for (r, c, val) in prod.triples() {
                let (Some(&i), Some(&j)) = (pos.get(&r), pos.get(&c)) else {
                    failures.push("product leaves the spanning units".into());
                    continue;
                };
                let term = image(i, j);
                for (rr, cc, tv) in term.triples() {
                    let cur = rhs.get(rr, cc);
                    rhs.set(rr, cc, cur + val * tv);
                }
            }
            if lhs != rhs {
                failures.push(format!("not multiplicative on units {kx:?} · {ky:?}"));
            }
            products_checked += 1;
        }
    }

    Ok(EmbedReport {
        source_dim: k,
        multiplicity: isometries.len(),
        units_checked,
        products_checked,
        ok: failures.is_empty(),
        failures,
    })
}
