//! The JSON graph document format.
//!
//! ```json
//! {
//!   "format_version": 1,
//!   "vertices": ["v", "w"],
//!   "edges": [{"id": "e", "src": "v", "dst": "w", "cardinality": "finite:1"}]
//! }
//! ```
//!
//! `cardinality` is `finite:N` with `N >= 1`, `aleph0` or `uncountable`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::graph::{Cardinality, EdgeBundle, Graph, GraphError};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SchemaError {
    #[error("line {line}, column {column}: {field}: {message}")]
    Field { field: String, line: usize, column: usize, message: String },
    #[error("{field}: {message}")]
    Graph { field: String, message: String },
    #[error("unsupported format_version {0} (expected {FORMAT_VERSION})")]
    Version(u32),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub format_version: u32,
    pub vertices: Vec<String>,
    #[serde(default)]
    pub edges: Vec<EdgeEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeEntry {
    pub id: String,
    pub src: String,
    pub dst: String,
    pub cardinality: CardinalityField,
}

/// A cardinality as written in documents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CardinalityField(pub Cardinality);

impl FromStr for CardinalityField {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let c = match s {
            "aleph0" => Cardinality::AlephNull,
            "uncountable" => Cardinality::Uncountable,
            _ => {
                let n = s
                    .strip_prefix("finite:")
                    .and_then(|n| n.parse::<u64>().ok())
                    .ok_or_else(|| format!("`{s}` is not one of finite:N, aleph0, uncountable"))?;
                if n == 0 {
                    return Err("finite:0 is not allowed; omit the edge instead".into());
                }
                Cardinality::Finite(n)
            }
        };
        Ok(CardinalityField(c))
    }
}

impl fmt::Display for CardinalityField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for CardinalityField {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CardinalityField {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl GraphDocument {
    pub fn from_graph(g: &Graph) -> Self {
        GraphDocument {
            format_version: FORMAT_VERSION,
            vertices: g.vertex_names().to_vec(),
            edges: g
                .edge_bundles()
                .into_iter()
                .map(|b| EdgeEntry { id: b.id, src: b.src, dst: b.dst, cardinality: CardinalityField(b.cardinality) })
                .collect(),
        }
    }

    pub fn to_graph(&self) -> Result<Graph, SchemaError> {
        if self.format_version != FORMAT_VERSION {
            return Err(SchemaError::Version(self.format_version));
        }
        let bundles: Vec<EdgeBundle> = self
            .edges
            .iter()
            .map(|e| EdgeBundle::new(e.id.clone(), e.src.clone(), e.dst.clone(), e.cardinality.0))
            .collect();
        Graph::build(&self.vertices, &bundles).map_err(|e| self.locate(e))
    }

    fn locate(&self, e: GraphError) -> SchemaError {
        let edge_field = |id: &str, field: &str| match self.edges.iter().position(|x| x.id == id) {
            Some(i) => format!("edges[{i}].{field}"),
            None => "edges".into(),
        };
        let field = match &e {
            GraphError::DuplicateVertex(v) => {
                let i = self.vertices.iter().enumerate().filter(|(_, x)| *x == v).nth(1).map_or(0, |(i, _)| i);
                format!("vertices[{i}]")
            }
            GraphError::DuplicateEdge(id) => {
                let i = self.edges.iter().enumerate().filter(|(_, x)| &x.id == id).nth(1).map_or(0, |(i, _)| i);
                format!("edges[{i}].id")
            }
            GraphError::DanglingVertex { edge, vertex } => {
                let side = match self.edges.iter().find(|x| &x.id == edge) {
                    Some(x) if &x.src == vertex => "src",
                    _ => "dst",
                };
                edge_field(edge, side)
            }
            GraphError::EmptyBundle(id) => edge_field(id, "cardinality"),
            _ => "document".into(),
        };
        SchemaError::Graph { field, message: e.to_string() }
    }

    /// The canonical text: pretty JSON with two-space indentation and a
    /// trailing newline.
    pub fn to_canonical_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("documents always serialize");
        s.push('\n');
        s
    }
}

pub fn parse_document(text: &str) -> Result<GraphDocument, SchemaError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let doc: GraphDocument = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        SchemaError::Field {
            field: if path == "." { "document".into() } else { path },
            line: inner.line(),
            column: inner.column(),
            message: strip_position(&inner.to_string()),
        }
    })?;
    Ok(doc)
}

/// serde_json appends " at line L column C"; the error carries those apart.
fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

pub fn parse_graph(text: &str) -> Result<Graph, SchemaError> {
    parse_document(text)?.to_graph()
}

pub fn emit_graph(g: &Graph) -> String {
    GraphDocument::from_graph(g).to_canonical_string()
}

/// Parses and re-emits a document without building the graph.
pub fn canonicalize(text: &str) -> Result<String, SchemaError> {
    Ok(parse_document(text)?.to_canonical_string())
}
