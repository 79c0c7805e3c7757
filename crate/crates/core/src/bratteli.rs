//! Chains of finite-dimensional algebras read off a staged graph, and the
//! recognizable patterns of their direct limits.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::ck::{self, CkError, EmbedReport, EmbedStep, RelativeSpec};
use crate::graph::{Cardinality, Graph, GraphError, VertexId};
use crate::staged::{StageError, StagedGraph};

pub use crate::ck::embed_check;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChainError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Stage(#[from] StageError),
    #[error(transparent)]
    Ck(#[from] CkError),
    #[error("{0} declares no spine")]
    NoSpine(String),
    #[error("spine starts at {first}, not at {base}")]
    BaseNotOnSpine { base: String, first: String },
    #[error("stage {depth} holds only {found} spine vertices")]
    SpineTooShort { depth: usize, found: usize },
    #[error("spine violation: edge {edge} leaves the spine at {vertex}")]
    SpineViolation { vertex: String, edge: String },
    #[error("exclusivity violated at {vertex}: it emits {emitted}")]
    ExclusivityViolation { vertex: String, emitted: String },
    #[error("stage {0} has a cycle")]
    CyclicStage(usize),
    #[error("chain invariant fails at level {level}: {detail}")]
    Invariant { level: usize, detail: String },
    #[error("a chain needs at least 3 levels to classify, got {0}")]
    TooShort(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Provenance {
    CornerChain,
    TailChain,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Level {
    pub index: usize,
    pub vertex: String,
    pub dim: u128,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BratteliChain {
    provenance: Provenance,
    levels: Vec<Level>,
    multiplicities: Vec<u64>,
}

impl BratteliChain {
    /// Checks the chain law for its provenance: `d_{n+1} = m_n d_n` for a
    /// corner chain, `m_n = 1` and `d_n` nondecreasing for a tail chain.
    pub fn new(provenance: Provenance, levels: Vec<Level>, multiplicities: Vec<u64>) -> Result<Self, ChainError> {
        if multiplicities.len() + 1 != levels.len().max(1) {
            return Err(ChainError::Invariant {
                level: 0,
                detail: format!("{} levels need {} multiplicities", levels.len(), levels.len().saturating_sub(1)),
            });
        }
        for (i, (pair, &m)) in levels.windows(2).zip(&multiplicities).enumerate() {
            let (d, next) = (pair[0].dim, pair[1].dim);
            let ok = match provenance {
                Provenance::CornerChain => d.checked_mul(m as u128) == Some(next),
                Provenance::TailChain => m == 1 && next >= d,
            };
            if !ok {
                return Err(ChainError::Invariant {
                    level: i + 1,
                    detail: format!("d = {d}, m = {m}, next d = {next}"),
                });
            }
        }
        Ok(BratteliChain { provenance, levels, multiplicities })
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn dims(&self) -> Vec<u128> {
        self.levels.iter().map(|l| l.dim).collect()
    }

    pub fn multiplicities(&self) -> &[u64] {
        &self.multiplicities
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "provenance": self.provenance,
            "levels": self.levels.iter().map(|l| json!({
                "index": l.index,
                "vertex": l.vertex,
                "dim": dim_json(l.dim),
            })).collect::<Vec<_>>(),
            "multiplicities": self.multiplicities,
        })
    }

    pub fn dims_json(&self) -> Value {
        self.levels.iter().map(|l| dim_json(l.dim)).collect::<Vec<_>>().into()
    }

    /// One line per level: its vertex, the matrix size, and the
    /// multiplicity of the embedding into the next level.
    pub fn diagram(&self) -> String {
        let width = self.levels.iter().map(|l| l.vertex.len()).max().unwrap_or(0);
        let mut out = String::new();
        for (i, l) in self.levels.iter().enumerate() {
            out.push_str(&format!("level {:>2}  {:<width$}  M_{}", l.index, l.vertex, l.dim));
            if let Some(m) = self.multiplicities.get(i) {
                out.push_str(&format!("  --x{m}-->"));
            }
            out.push('\n');
        }
        out
    }
}

/// Dimensions beyond `u64` are written as decimal strings.
fn dim_json(d: u128) -> Value {
    u64::try_from(d).map_or_else(|_| Value::String(d.to_string()), Value::from)
}

/// `d_n` = paths from `base` to `v_n` in stage `depth`, `m_n` = edges out of
/// `v_n`; every edge leaving a spine vertex must land on the next one.
pub fn corner_chain(sg: &StagedGraph, base: &str, depth: usize) -> Result<BratteliChain, ChainError> {
    let (g, spine) = spine_stage(sg, depth)?;
    let first = g.name(spine[0]).to_string();
    if first != base {
        return Err(ChainError::BaseNotOnSpine { base: base.to_string(), first });
    }
    let mut mults = Vec::new();
    for pair in spine.windows(2) {
        if let Some(&b) = g.out_bundles(pair[0]).iter().find(|&&b| g.bundle_dst(b) != pair[1]) {
            return Err(ChainError::SpineViolation { vertex: g.name(pair[0]).into(), edge: g.bundle_name(b).into() });
        }
        match g.out_cardinality(pair[0]) {
            Cardinality::Finite(m) => mults.push(m),
            _ => return Err(GraphError::InfiniteBundle(g.name(pair[0]).to_string()).into()),
        }
    }
    let counts = g.path_counts_from(spine[0]).map_err(|e| cyclic(e, depth))?;
    let levels = levels_from(&g, &spine, &counts);
    BratteliChain::new(Provenance::CornerChain, levels, mults)
}

/// `d_n` = paths ending at `v_n` in stage `depth`, with every spine vertex
/// before the last emitting exactly one edge, onto the next spine vertex.
pub fn tail_chain(sg: &StagedGraph, depth: usize) -> Result<BratteliChain, ChainError> {
    let (g, spine) = spine_stage(sg, depth)?;
    for pair in spine.windows(2) {
        let out = g.out_bundles(pair[0]);
        let exclusive =
            matches!(out, [b] if g.cardinality(*b) == Cardinality::Finite(1) && g.bundle_dst(*b) == pair[1]);
        if !exclusive {
            let emitted: Vec<String> = out
                .iter()
                .map(|&b| match g.cardinality(b) {
                    Cardinality::Finite(1) => g.bundle_name(b).to_string(),
                    c => format!("{} ({c})", g.bundle_name(b)),
                })
                .collect();
            return Err(ChainError::ExclusivityViolation {
                vertex: g.name(pair[0]).into(),
                emitted: emitted.join(", "),
            });
        }
    }
    let counts = g.path_counts_into().map_err(|e| cyclic(e, depth))?;
    let levels = levels_from(&g, &spine, &counts);
    let mults = vec![1; levels.len().saturating_sub(1)];
    BratteliChain::new(Provenance::TailChain, levels, mults)
}

fn cyclic(e: GraphError, depth: usize) -> ChainError {
    match e {
        GraphError::UnboundedOnCyclic => ChainError::CyclicStage(depth),
        e => e.into(),
    }
}

fn spine_stage(sg: &StagedGraph, depth: usize) -> Result<(Arc<Graph>, Vec<VertexId>), ChainError> {
    if sg.profile().and_then(|p| p.spine.as_ref()).is_none() {
        return Err(ChainError::NoSpine(sg.name().to_string()));
    }
    let g = sg.stage(depth)?;
    if g.has_cycle() {
        return Err(ChainError::CyclicStage(depth));
    }
    let mut spine = sg.spine_prefix(depth)?;
    if spine.len() < depth || depth == 0 {
        return Err(ChainError::SpineTooShort { depth, found: spine.len() });
    }
    spine.truncate(depth);
    Ok((g, spine))
}

fn levels_from(g: &Graph, spine: &[VertexId], counts: &[u128]) -> Vec<Level> {
    spine
        .iter()
        .enumerate()
        .map(|(i, &v)| Level { index: i + 1, vertex: g.name(v).to_string(), dim: counts[v.0] })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Exponent {
    Finite(u32),
    Infinite,
}

/// A supernatural number as a map from primes to exponents.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Supernatural(pub BTreeMap<u64, Exponent>);

impl fmt::Display for Supernatural {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(p, e)| match e {
                Exponent::Infinite => format!("{p}^infinity"),
                Exponent::Finite(1) => p.to_string(),
                Exponent::Finite(k) => format!("{p}^{k}"),
            })
            .collect();
        f.write_str(&parts.join(" * "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum LimitTag {
    Uhf(Supernatural),
    Compacts,
    Other(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LimitSummary {
    pub tag: LimitTag,
    pub evidence: String,
}

impl LimitSummary {
    pub fn label(&self) -> String {
        match &self.tag {
            LimitTag::Uhf(s) => format!("UHF {s}"),
            LimitTag::Compacts => "Compacts".into(),
            LimitTag::Other(reason) => format!("Other ({reason})"),
        }
    }
}

const CONSTANT: &str = "dimensions are constant: finite-dimensional limit";

fn factor(mut m: u64) -> BTreeMap<u64, u32> {
    let mut out = BTreeMap::new();
    let mut p = 2;
    while p * p <= m {
        while m.is_multiple_of(p) {
            *out.entry(p).or_insert(0) += 1;
            m /= p;
        }
        p += 1;
    }
    if m > 1 {
        *out.entry(m).or_insert(0) += 1;
    }
    out
}

/// Recognizes the two limit patterns: a corner chain with every
/// multiplicity at least 2 is UHF, and a tail chain whose dimensions
/// strictly increase over its second half is the compacts. A prime dividing
/// every multiplicity of the chain is read as recurring forever.
pub fn direct_limit_summary(chain: &BratteliChain) -> Result<LimitSummary, ChainError> {
    if chain.len() < 3 {
        return Err(ChainError::TooShort(chain.len()));
    }
    let dims = chain.dims();
    let ms = chain.multiplicities();
    let evidence = format!(
        "{} levels, dims {}, multiplicities {}",
        chain.len(),
        dims.iter().map(u128::to_string).collect::<Vec<_>>().join(","),
        ms.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
    );
    let tag = match chain.provenance() {
        Provenance::CornerChain if ms.iter().all(|&m| m >= 2) => {
            let factored: Vec<BTreeMap<u64, u32>> = ms.iter().map(|&m| factor(m)).collect();
            let mut exps: BTreeMap<u64, Exponent> = BTreeMap::new();
            for f in &factored {
                for (&p, &k) in f {
                    let e = exps.entry(p).or_insert(Exponent::Finite(0));
                    if let Exponent::Finite(total) = e {
                        *total += k;
                    }
                }
            }
            for (p, e) in exps.iter_mut() {
                if factored.iter().all(|f| f.contains_key(p)) {
                    *e = Exponent::Infinite;
                }
            }
            LimitTag::Uhf(Supernatural(exps))
        }
        Provenance::CornerChain if dims.windows(2).all(|w| w[0] == w[1]) => LimitTag::Other(CONSTANT.into()),
        Provenance::CornerChain => LimitTag::Other("some multiplicity is 1, so the chain is not a UHF pattern".into()),
        Provenance::TailChain => {
            let half = &dims[(dims.len() - 1) / 2..];
            if half.windows(2).all(|w| w[1] > w[0]) {
                LimitTag::Compacts
            } else if dims.windows(2).all(|w| w[0] == w[1]) {
                LimitTag::Other(CONSTANT.into())
            } else {
                LimitTag::Other("dimensions do not strictly increase over the second half of the chain".into())
            }
        }
    };
    Ok(LimitSummary { tag, evidence })
}

/// Runs the embedding check on consecutive stages `n → n + 1` for
/// `n = 1 … depth - 1`, stepping at the spine vertex `v_n`.
pub fn chain_embed_checks(
    sg: &StagedGraph,
    depth: usize,
    provenance: Provenance,
    sample: usize,
) -> Result<Vec<EmbedReport>, ChainError> {
    let spine = sg.profile().and_then(|p| p.spine.clone()).ok_or_else(|| ChainError::NoSpine(sg.name().into()))?;
    let mut out = Vec::new();
    let mut prev = None;
    for n in 1..=depth {
        let g = sg.stage(n)?;
        let rep = ck::build_ck_family(&g, &RelativeSpec::full(&g))?;
        if let Some(prev) = prev.take() {
            let step = EmbedStep {
                vertex: spine.name(n - 1),
                base: match provenance {
                    Provenance::CornerChain => Some(spine.name(1)),
                    Provenance::TailChain => None,
                },
                sample,
            };
            out.push(embed_check(&prev, &rep, &step)?);
        }
        prev = Some(rep);
    }
    Ok(out)
}
