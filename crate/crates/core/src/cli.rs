//! Command-line surface. `run_command` returns the exit code and the text
//! to print; `main` only forwards it.

use std::ffi::OsString;
use std::fs;
use std::path::{Path as FsPath, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::bratteli::{self, ChainError, LimitTag, Provenance};
use crate::citation::Citation;
use crate::ck::{self, CkError, RelativeSpec};
use crate::classify::{self, ClassifyError};
use crate::families::{self, FamilyError, FAMILIES};
use crate::graph::{Graph, GraphError};
use crate::ideals::{self, IdealError, DEFAULT_LATTICE_BOUND};
use crate::io::{self, GraphDocument, SchemaError};
use crate::report::{self, Report};
use crate::staged::{StageError, StagedGraph};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Schema(String),
    #[error("{0}")]
    Precondition(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Schema(_) => EXIT_USAGE,
            CliError::Precondition(_) => EXIT_PRECONDITION,
        }
    }
}

impl From<SchemaError> for CliError {
    fn from(e: SchemaError) -> Self {
        CliError::Schema(e.to_string())
    }
}

impl From<FamilyError> for CliError {
    fn from(e: FamilyError) -> Self {
        CliError::Usage(e.to_string())
    }
}

macro_rules! precondition {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Precondition(e.to_string())
            }
        }
    )*};
}

precondition!(GraphError, IdealError, StageError, CkError, ClassifyError, ChainError);

#[derive(Debug, Parser)]
#[command(name = "graph-cstar", version, about = "Structure analysis of directed graphs and their graph C*-algebras")]
struct Cli {
    /// Print the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Input {
    /// Graph document (JSON).
    #[arg(long, value_name = "FILE", conflicts_with = "family")]
    graph: Option<PathBuf>,
    /// Builtin staged family, e.g. ladder2, ray, forbidden_ladder:2,3.
    #[arg(long, value_name = "NAME")]
    family: Option<String>,
    /// Stage of the family to inspect.
    #[arg(long, value_name = "N")]
    depth: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ChainKind {
    Corner,
    Tail,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Structural summary: row class, cycles, Condition (L), cofinality, simplicity, dichotomy.
    Analyze(Input),
    /// Decide whether the algebra has a unique irreducible representation.
    Classify {
        #[command(flatten)]
        input: Input,
        /// Classify every *.json file in a directory.
        #[arg(long, value_name = "DIR", conflicts_with_all = ["graph", "family"])]
        batch: Option<PathBuf>,
    },
    /// The lattice of saturated hereditary vertex sets.
    Ideals {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = DEFAULT_LATTICE_BOUND)]
        bound: usize,
    },
    /// Restrict the graph to the vertices reachable from a vertex.
    Restrict {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        vertex: String,
    },
    /// Longest chain of vertices joined by at least two distinct paths.
    Ladder(Input),
    /// Build and verify the exact Cuntz-Krieger matrix model.
    Ck {
        #[command(flatten)]
        input: Input,
        /// Comma-separated regular vertices carrying (CK3); empty for none.
        #[arg(long, value_name = "S")]
        relative: Option<String>,
        /// Include the basis and all generator matrices.
        #[arg(long)]
        export: bool,
    },
    /// Dimension and fullness of the corner p_v C*(E) p_v.
    Corner {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        vertex: String,
    },
    /// Chain of matrix algebras along the spine of a staged family.
    Bratteli {
        #[arg(long, value_name = "NAME")]
        family: String,
        #[arg(long, value_name = "N")]
        depth: usize,
        #[arg(long, value_enum, default_value = "corner")]
        chain: ChainKind,
        /// Base vertex of a corner chain (defaults to the first spine vertex).
        #[arg(long)]
        base: Option<String>,
        /// Check every consecutive embedding on explicit matrices.
        #[arg(long)]
        verify_embeddings: bool,
    },
    /// List builtin families, or print one stage as a graph document.
    Family {
        #[arg(long)]
        list: bool,
        #[arg(long, value_name = "NAME")]
        family: Option<String>,
        #[arg(long, value_name = "N")]
        depth: Option<usize>,
    },
}

/// Where the graph came from.
enum Subject {
    File { label: String, graph: Arc<Graph> },
    Staged { family: StagedGraph, depth: usize, graph: Arc<Graph> },
}

impl Subject {
    fn graph(&self) -> &Graph {
        match self {
            Subject::File { graph, .. } | Subject::Staged { graph, .. } => graph,
        }
    }

    fn label(&self) -> String {
        match self {
            Subject::File { label, .. } => label.clone(),
            Subject::Staged { family, depth, .. } => format!("{} stage {depth}", family.name()),
        }
    }
}

fn load(input: &Input) -> Result<Subject, CliError> {
    match (&input.graph, &input.family) {
        (Some(path), None) => {
            if input.depth.is_some() {
                return Err(CliError::Usage("--depth applies only to --family".into()));
            }
            let graph = read_graph(path)?;
            Ok(Subject::File { label: path.display().to_string(), graph: Arc::new(graph) })
        }
        (None, Some(name)) => {
            let family = families::parse_family(name)?;
            let depth = input.depth.ok_or_else(|| CliError::Usage("--family needs --depth N".into()))?;
            let graph = family.stage(depth)?;
            Ok(Subject::Staged { family, depth, graph })
        }
        _ => Err(CliError::Usage("give exactly one of --graph FILE or --family NAME --depth N".into())),
    }
}

fn read_graph(path: &FsPath) -> Result<Graph, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    io::parse_graph(&text).map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))
}

fn set_names(g: &Graph, vs: impl IntoIterator<Item = crate::graph::VertexId>) -> String {
    let names: Vec<&str> = vs.into_iter().map(|v| g.name(v)).collect();
    format!("{{{}}}", names.join(", "))
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn analyze(subject: &Subject) -> Result<Report, CliError> {
    let g = subject.graph();
    let mut r = Report::new("analyze", subject.label());
    r.computed(format!("{} vertices, {} edge bundles", g.vertex_count(), g.bundle_count()));
    let class = classify::row_class(g);
    r.computed(format!("row class: {class}"));
    r.computed(format!("sinks: {}", set_names(g, g.sinks())));
    r.computed(format!("singular vertices: {}", set_names(g, g.singular_vertices())));
    let cycles = g.cycles_and_condition_l();
    if cycles.has_cycle {
        r.claim("has a cycle, so C*(E) is not AF", Citation::AfIffAcyclic);
    } else {
        r.claim("no cycles, so C*(E) is AF", Citation::AfIffAcyclic);
    }
    match &cycles.witness {
        None => r.computed("Condition (L) holds"),
        Some(c) => r.computed(format!("Condition (L) fails: {} has no exit", c.display(g))),
    };
    r.computed(format!("cofinal: {}", yes(g.cofinal().cofinal)));
    let mut data = json!({
        "vertices": g.vertex_count(),
        "bundles": g.bundle_count(),
        "row_class": class,
        "sinks": g.sinks().iter().map(|&v| g.name(v)).collect::<Vec<_>>(),
        "singular": g.singular_vertices().iter().map(|&v| g.name(v)).collect::<Vec<_>>(),
        "af": !cycles.has_cycle,
        "condition_l": cycles.condition_l,
    });
    if g.vertex_count() > 0 {
        let s = classify::is_simple(g)?;
        let route3 = s.route3.map_or("skipped (lattice bound exceeded)".to_string(), |b| b.to_string());
        r.claim(
            format!("simple: {} (route2 = {}, route3 = {route3})", yes(s.simple), s.route2),
            Citation::SimplicityCriterion,
        );
        data["simple"] = json!(s.simple);
        data["route2"] = json!(s.route2);
        data["route3"] = json!(s.route3);
        data["lattice_size"] = json!(s.lattice_size);
    }
    if !cycles.has_cycle && g.is_all_finite() {
        let ladder = classify::ladder_length(g)?;
        r.computed(format!("longest doubled-path chain: {}", ladder.length));
        data["ladder_length"] = json!(ladder.length);
    }
    let dichotomy = match subject {
        Subject::Staged { family, depth, .. } if !cycles.has_cycle => Some(classify::dichotomy_staged(family, *depth)?),
        Subject::File { .. } if !cycles.has_cycle && g.vertex_count() > 0 => Some(classify::dichotomy(g)?),
        _ => None,
    };
    let scope = if matches!(subject, Subject::Staged { .. }) { " of the limit" } else { "" };
    if let Some(d) = &dichotomy {
        r.computed(format!("dichotomy{scope}: {d}"));
        data["dichotomy"] = serde_json::to_value(d).expect("serializable");
    }
    if g.vertex_count() > 0 {
        let v = verdict(subject)?;
        r.claim(format!("verdict{scope}: {}", v.headline()), v.steps.last().map_or(Citation::Computed, |s| s.1));
        data["verdict"] = report::verdict_json(&v);
    }
    r.data = data;
    Ok(r)
}

fn verdict(subject: &Subject) -> Result<classify::Verdict, CliError> {
    Ok(match subject {
        Subject::File { graph, .. } => classify::naimark_verdict(graph)?,
        Subject::Staged { family, depth, .. } => classify::naimark_verdict_staged(family, *depth)?,
    })
}

fn classify_report(subject: &Subject) -> Result<Report, CliError> {
    let mut r = Report::new("classify", subject.label());
    let v = verdict(subject)?;
    report::add_verdict(&mut r, &v);
    Ok(r)
}

fn ideals_report(subject: &Subject, bound: usize) -> Result<Report, CliError> {
    let g = subject.graph();
    let lattice = ideals::enumerate_saturated_hereditary(g, bound)?;
    let mut r = Report::new("ideals", subject.label());
    r.computed(format!("{} saturated hereditary sets", lattice.len()));
    for h in &lattice {
        r.computed(h.display(g));
    }
    r.set("lattice", json!(lattice.iter().map(|h| h.names(g)).collect::<Vec<_>>()));
    Ok(r)
}

fn restrict_report(subject: &Subject, vertex: &str) -> Result<Report, CliError> {
    let g = subject.graph();
    let h = ideals::downstream_by_name(g, vertex)?;
    let eh = ideals::restrict_to(g, &h)?;
    let mut r = Report::new("restrict", format!("{} at {vertex}", subject.label()));
    r.computed(format!("H({vertex}) = {}", h.display(g)));
    r.computed(format!("E_H has {} vertices and {} edge bundles", eh.vertex_count(), eh.bundle_count()));
    r.claim(
        format!("C*(E_H) is Morita equivalent to the ideal generated by H({vertex})"),
        Citation::HereditaryRestrictionMorita,
    );
    let v = classify::naimark_verdict(&eh)?;
    r.claim(format!("restricted verdict: {}", v.headline()), v.steps.last().map_or(Citation::Computed, |s| s.1));
    let doc = io::emit_graph(&eh);
    r.block("restricted graph", doc.trim_end());
    r.set("downstream", json!(h.names(g)));
    r.set("graph", serde_json::to_value(GraphDocument::from_graph(&eh)).expect("serializable"));
    r.set("verdict", report::verdict_json(&v));
    Ok(r)
}

fn ladder_report(subject: &Subject) -> Result<Report, CliError> {
    let g = subject.graph();
    let ladder = classify::ladder_length(g)?;
    let mut r = Report::new("ladder", subject.label());
    let chain: Vec<&str> = ladder.chain.iter().map(|&v| g.name(v)).collect();
    r.computed(format!("longest doubled-path chain has length {}: {}", ladder.length, chain.join(" => ")));
    r.set("length", json!(ladder.length));
    r.set("chain", json!(chain));
    if let Subject::Staged { family, depth, .. } = subject {
        let mut lengths = Vec::new();
        for n in 0..=*depth {
            lengths.push(classify::ladder_length(&*family.stage(n)?)?.length);
        }
        r.computed(format!(
            "lengths by stage 0..={depth}: {}",
            lengths.iter().map(usize::to_string).collect::<Vec<_>>().join(", ")
        ));
        if ladder.length > 0 && lengths.windows(2).all(|w| w[1] > w[0] || w[0] == 0) {
            r.claim(
                "the chain grows with every stage, so the limit contains an infinite doubled-path chain and \
                 cannot be an AF algebra with a unique irreducible representation",
                Citation::NoForbiddenLadder,
            );
        }
        r.set("by_stage", json!(lengths));
    }
    Ok(r)
}

fn parse_relative(g: &Graph, relative: &Option<String>) -> Result<RelativeSpec, CliError> {
    match relative {
        None => Ok(RelativeSpec::full(g)),
        Some(s) => {
            let names: Vec<&str> = s.split(',').map(str::trim).filter(|n| !n.is_empty()).collect();
            Ok(RelativeSpec::from_names(g, &names)?)
        }
    }
}

fn ck_report(subject: &Subject, relative: &Option<String>, export: bool) -> Result<Report, CliError> {
    let g = subject.graph();
    let spec = parse_relative(g, relative)?;
    let rep = ck::build_ck_family(g, &spec)?;
    let check = ck::verify_ck(&rep);
    let mut r = Report::new("ck", subject.label());
    let s_names = set_names(g, spec.vertices().iter().copied());
    r.computed(format!("path-basis model of dimension {} with (CK3) imposed on S = {s_names}", rep.dim()));
    r.computed(format!(
        "p_v are mutually orthogonal projections: {}",
        yes(check.mutual_orthogonality && check.generators_well_formed)
    ));
    r.computed(format!("(CK1) s_e* s_e = p_r(e): {}", yes(check.ck1)));
    r.computed(format!("(CK2) s_e s_e* <= p_s(e): {}", yes(check.ck2)));
    let holds: Vec<_> = check.ck3_at.iter().filter(|(_, &ok)| ok).map(|(&v, _)| v).collect();
    r.computed(format!("(CK3) holds at {}", set_names(g, holds.iter().copied())));
    let gaps = ck::gap_projections(&rep);
    for (&v, q) in &gaps {
        r.computed(format!("gap projection q_{} has rank {}", g.name(v), q.rank));
    }
    if !gaps.is_empty() && gaps.values().all(|q| q.nonzero) {
        r.claim(
            "every p_v and every gap projection off S is nonzero and Condition (L) holds, so the model is faithful",
            Citation::RelativeCkUniqueness,
        );
    }
    let dim = ck::algebra_dimension(&rep)?;
    let formula = ck::algebra_dimension_formula(&rep);
    r.computed(format!("algebra dimension {dim} (sum over terminal vertices of squared path counts: {formula})"));
    let mut blocks_json = Value::Null;
    if spec.is_full(g) {
        let blocks = ck::block_decomposition(&rep)?;
        let list: Vec<String> = blocks.iter().map(|b| format!("{}: M_{}", g.name(b.terminal), b.size)).collect();
        r.computed(format!("{} block(s): {}", blocks.len(), list.join(", ")));
        blocks_json =
            json!(blocks.iter().map(|b| json!({"sink": g.name(b.terminal), "size": b.size})).collect::<Vec<_>>());
    }
    if !check.failures.is_empty() {
        r.block("failures", check.failures.join("\n"));
    }
    r.set("dimension", json!(rep.dim()));
    r.set("relative_to", json!(spec.vertices().iter().map(|&v| g.name(v)).collect::<Vec<_>>()));
    r.set("ck1", json!(check.ck1));
    r.set("ck2", json!(check.ck2));
    r.set(
        "ck3_at",
        json!(check
            .ck3_at
            .iter()
            .map(|(&v, &ok)| (g.name(v).to_string(), json!(ok)))
            .collect::<serde_json::Map<_, _>>()),
    );
    r.set("relative_family", json!(check.is_relative_family(&spec)));
    r.set(
        "gap_ranks",
        json!(gaps.iter().map(|(&v, q)| (g.name(v).to_string(), json!(q.rank))).collect::<serde_json::Map<_, _>>()),
    );
    r.set("algebra_dimension", json!(dim));
    r.set("blocks", blocks_json);
    if export {
        let model = rep.to_json();
        r.block("model", export_text(&model));
        r.set("model", model);
    }
    Ok(r)
}

fn export_text(model: &Value) -> String {
    let mut out = String::new();
    let basis: Vec<String> =
        model["basis"].as_array().into_iter().flatten().map(|b| b.as_str().unwrap_or("").to_string()).collect();
    out.push_str(&format!("basis ({}): {}\n", basis.len(), basis.join(" ")));
    for kind in ["p", "s"] {
        for (name, triples) in model[kind].as_object().into_iter().flatten() {
            let entries: Vec<String> =
                triples.as_array().into_iter().flatten().map(|t| format!("({},{})={}", t[0], t[1], t[2])).collect();
            out.push_str(&format!("{kind}_{name}: {}\n", entries.join(" ")));
        }
    }
    out
}

fn corner_report(subject: &Subject, vertex: &str) -> Result<Report, CliError> {
    let g = subject.graph();
    let rep = ck::build_ck_family(g, &RelativeSpec::full(g))?;
    let c = ck::corner(&rep, vertex)?;
    let mut r = Report::new("corner", format!("{} at {vertex}", subject.label()));
    r.computed(format!("p_{vertex} C*(E) p_{vertex} has dimension {}", c.dimension));
    r.computed(format!("full: {}", yes(c.full)));
    r.set("dimension", json!(c.dimension));
    r.set("full", json!(c.full));
    Ok(r)
}

fn bratteli_report(
    name: &str,
    depth: usize,
    kind: ChainKind,
    base: &Option<String>,
    verify: bool,
) -> Result<Report, CliError> {
    let family = families::parse_family(name)?;
    let chain = match kind {
        ChainKind::Corner => {
            let base = match base {
                Some(b) => b.clone(),
                None => {
                    let spine = family
                        .profile()
                        .and_then(|p| p.spine.clone())
                        .ok_or_else(|| ChainError::NoSpine(name.into()))?;
                    spine.name(1)
                }
            };
            bratteli::corner_chain(&family, &base, depth)?
        }
        ChainKind::Tail => bratteli::tail_chain(&family, depth)?,
    };
    let mut r = Report::new("bratteli", format!("{} depth {depth}", family.name()));
    let dims: Vec<String> = chain.dims().iter().map(u128::to_string).collect();
    let ms: Vec<String> = chain.multiplicities().iter().map(u64::to_string).collect();
    r.computed(format!("{:?} dims: {}", chain.provenance(), dims.join(", ")));
    r.computed(format!("multiplicities: {}", ms.join(", ")));
    match chain.provenance() {
        Provenance::CornerChain => r.computed("d_(n+1) = m_n d_n at every level"),
        Provenance::TailChain => r.computed("every embedding has multiplicity 1 and dimensions never decrease"),
    };
    let mut limit = Value::Null;
    if chain.len() >= 3 {
        let summary = bratteli::direct_limit_summary(&chain)?;
        let citation = match summary.tag {
            LimitTag::Uhf(_) => Citation::DoublingLadderUhf,
            LimitTag::Compacts => Citation::CompactsExclusiveTail,
            LimitTag::Other(_) => Citation::Computed,
        };
        r.claim(format!("limit: {}", summary.label()), citation);
        limit = json!({"label": summary.label(), "tag": summary.tag, "evidence": summary.evidence});
    } else {
        r.computed("chain too short to label the limit (need at least 3 levels)");
    }
    if verify {
        let checks = bratteli::chain_embed_checks(&family, depth, chain.provenance(), 6)?;
        let ok = checks.iter().all(|c| c.ok);
        r.computed(format!(
            "{} embeddings checked on explicit matrices: {}",
            checks.len(),
            if ok { "all commute" } else { "FAILED" }
        ));
        let failures: Vec<String> = checks.iter().flat_map(|c| c.failures.clone()).collect();
        if !failures.is_empty() {
            r.block("embedding failures", failures.join("\n"));
        }
        r.set("embeddings_ok", json!(ok));
    }
    r.block("chain", chain.diagram());
    r.set("family", json!(family.name()));
    r.set("depth", json!(depth));
    r.set("provenance", json!(chain.provenance()));
    r.set("dims", chain.dims_json());
    r.set("multiplicities", json!(chain.multiplicities()));
    r.set("chain", chain.to_json());
    r.set("limit", limit);
    Ok(r)
}

fn family_report(
    list: bool,
    family: &Option<String>,
    depth: Option<usize>,
) -> Result<(Report, Option<String>), CliError> {
    match (list, family) {
        (true, None) => {
            let mut r = Report::new("family", "builtin families");
            for (_, syntax, about) in FAMILIES {
                r.computed(format!("{syntax}: {about}"));
            }
            r.set(
                "families",
                json!(FAMILIES
                    .iter()
                    .map(|(n, s, d)| json!({"name": n, "syntax": s, "description": d}))
                    .collect::<Vec<_>>()),
            );
            Ok((r, None))
        }
        (false, Some(name)) => {
            let family = families::parse_family(name)?;
            let depth = depth.ok_or_else(|| CliError::Usage("--family needs --depth N".into()))?;
            let g = family.stage(depth)?;
            let mut r = Report::new("family", format!("{} stage {depth}", family.name()));
            r.set("graph", serde_json::to_value(GraphDocument::from_graph(&g)).expect("serializable"));
            Ok((r, Some(io::emit_graph(&g))))
        }
        _ => Err(CliError::Usage("give either --list or --family NAME --depth N".into())),
    }
}

fn batch(dir: &FsPath, json: bool) -> Result<(i32, String), CliError> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", dir.display())))?
        .filter_map(Result::ok)
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    let results: Vec<(String, Result<Report, CliError>)> = files
        .par_iter()
        .map(|p| {
            let name = p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
            let subject = read_graph(p).map(|g| Subject::File { label: name.clone(), graph: Arc::new(g) });
            (name, subject.and_then(|s| classify_report(&s)))
        })
        .collect();
    let code =
        results.iter().map(|(_, r)| r.as_ref().map_or_else(CliError::exit_code, |_| EXIT_OK)).max().unwrap_or(EXIT_OK);
    let out = if json {
        let items: Vec<Value> = results
            .iter()
            .map(|(name, r)| match r {
                Ok(rep) => json!({"file": name, "exit_code": EXIT_OK, "report": rep.to_json()}),
                Err(e) => json!({"file": name, "exit_code": e.exit_code(), "error": e.to_string()}),
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&Value::Array(items)).expect("values serialize");
        s.push('\n');
        s
    } else {
        let mut s = String::new();
        for (name, r) in &results {
            s.push_str(&format!("== {name}\n"));
            match r {
                Ok(rep) => s.push_str(&rep.to_text()),
                Err(e) => s.push_str(&format!("error: {e}\n")),
            }
        }
        s
    };
    Ok((code, out))
}

fn dispatch(cli: &Cli) -> Result<(i32, String), CliError> {
    let report = match &cli.command {
        Command::Analyze(input) => analyze(&load(input)?)?,
        Command::Classify { batch: Some(dir), .. } => return batch(dir, cli.json),
        Command::Classify { input, batch: None } => classify_report(&load(input)?)?,
        Command::Ideals { input, bound } => ideals_report(&load(input)?, *bound)?,
        Command::Restrict { input, vertex } => restrict_report(&load(input)?, vertex)?,
        Command::Ladder(input) => ladder_report(&load(input)?)?,
        Command::Ck { input, relative, export } => ck_report(&load(input)?, relative, *export)?,
        Command::Corner { input, vertex } => corner_report(&load(input)?, vertex)?,
        Command::Bratteli { family, depth, chain, base, verify_embeddings } => {
            bratteli_report(family, *depth, *chain, base, *verify_embeddings)?
        }
        Command::Family { list, family, depth } => {
            let (report, document) = family_report(*list, family, *depth)?;
            if let (Some(doc), false) = (document, cli.json) {
                return Ok((EXIT_OK, doc));
            }
            report
        }
    };
    let text = if cli.json { report.to_json_string() } else { report.to_text() };
    Ok((EXIT_OK, text))
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run_command<I, T>(argv: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            return (code, e.render().to_string());
        }
    };
    match dispatch(&cli) {
        Ok(out) => out,
        Err(e) => (e.exit_code(), format!("error: {e}\n")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (i32, String) {
        run_command(std::iter::once("graph-cstar").chain(args.iter().copied()))
    }

    #[test]
    fn bratteli_ladder_json() {
        let (code, out) = run(&["bratteli", "--family", "ladder2", "--depth", "5", "--json"]);
        assert_eq!(code, 0, "{out}");
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["data"]["dims"], json!([1, 2, 4, 8, 16]));
        assert_eq!(v["data"]["multiplicities"], json!([2, 2, 2, 2]));
        assert_eq!(v["data"]["limit"]["label"], "UHF 2^infinity");
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run(&["classify"]).0, 2);
        assert_eq!(run(&["classify", "--family", "ladder2"]).0, 2);
        assert_eq!(run(&["classify", "--family", "hexagon", "--depth", "2"]).0, 2);
        assert_eq!(run(&["frobnicate"]).0, 2);
        assert_eq!(run(&["--help"]).0, 0);
    }

    #[test]
    fn staged_classify_and_family_listing() {
        let (code, out) = run(&["classify", "--family", "ray", "--depth", "6"]);
        assert_eq!(code, 0);
        assert!(out.contains("verdict: UniqueIrrepCompacts dim=aleph0  [compacts-exclusive-tail]"), "{out}");
        let (code, out) = run(&["family", "--list"]);
        assert_eq!(code, 0);
        assert!(out.contains("forbidden_ladder:A,B"));
        let (code, out) = run(&["family", "--family", "ray", "--depth", "2"]);
        assert_eq!(code, 0);
        assert_eq!(io::parse_graph(&out).unwrap().vertex_names(), ["v_1", "v_2"]);
    }

    #[test]
    fn tail_chain_on_ladder_is_a_precondition_failure() {
        let (code, out) = run(&["bratteli", "--family", "ladder2", "--depth", "4", "--chain", "tail"]);
        assert_eq!(code, 3);
        assert!(out.contains("exclusivity violated at w_1"), "{out}");
    }
}
