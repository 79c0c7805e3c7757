//! Builtin staged families with their profile certificates.

use thiserror::Error;

use crate::graph::{Cardinality, EdgeBundle, Graph};
use crate::staged::{MinOutDegree, Spine, StagedGraph, UniformProfile};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FamilyError {
    #[error("unknown family `{0}` (try `family --list`)")]
    Unknown(String),
    #[error("invalid parameters for `{family}`: {reason}")]
    InvalidParams { family: String, reason: String },
}

/// Name, parameter syntax and a one-line description of every family.
pub const FAMILIES: &[(&str, &str, &str)] = &[
    ("ladder", "ladder:K or ladderK", "vertices w_1, w_2, ... with K parallel edges from each w_i to w_(i+1)"),
    ("ray", "ray", "v_1 -> v_2 -> v_3 -> ..., every vertex emitting exactly one edge"),
    ("ray_with_source", "ray_with_source:J", "the ray plus an extra vertex u with one edge u -> v_J"),
    (
        "forbidden_ladder",
        "forbidden_ladder:A,B",
        "spine v_1, v_2, ... joined by two internally disjoint paths of lengths A and B",
    ),
    ("rose", "rose:N or roseN", "one vertex with N loops (every stage identical)"),
    ("uncountable_rose", "uncountable_rose", "one vertex with uncountably many loops (every stage identical)"),
];

/// Parses `ladder2`, `ladder:3`, `forbidden_ladder:2,3`, `ray`, ….
pub fn parse_family(spec: &str) -> Result<StagedGraph, FamilyError> {
    let (name, params) = match spec.split_once(':') {
        Some((name, rest)) => {
            let params = rest
                .split(',')
                .map(|p| {
                    p.trim().parse::<u64>().map_err(|_| FamilyError::InvalidParams {
                        family: name.to_string(),
                        reason: format!("`{p}` is not a nonnegative integer"),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            (name.to_string(), params)
        }
        None => {
            let digits = spec.len() - spec.trim_end_matches(|c: char| c.is_ascii_digit()).len();
            let (name, num) = spec.split_at(spec.len() - digits);
            if digits > 0 && (name == "ladder" || name == "rose") {
                (name.to_string(), vec![num.parse().expect("ascii digits")])
            } else {
                (spec.to_string(), Vec::new())
            }
        }
    };
    builtin_family(&name, &params)
}

pub fn builtin_family(name: &str, params: &[u64]) -> Result<StagedGraph, FamilyError> {
    let invalid = |reason: &str| FamilyError::InvalidParams { family: name.to_string(), reason: reason.to_string() };
    let one = |default: Option<u64>| -> Result<u64, FamilyError> {
        match (params, default) {
            ([k], _) => Ok(*k),
            ([], Some(d)) => Ok(d),
            _ => Err(invalid("expected exactly one parameter")),
        }
    };
    let none = || if params.is_empty() { Ok(()) } else { Err(invalid("takes no parameters")) };
    match name {
        "ladder" => {
            let k = one(Some(2))?;
            if k == 0 {
                return Err(invalid("K must be at least 1"));
            }
            Ok(ladder(k))
        }
        "ray" => {
            none()?;
            Ok(ray())
        }
        "ray_with_source" => {
            let j = one(None)?;
            if j < 1 {
                return Err(invalid("J must be at least 1"));
            }
            Ok(ray_with_source(j as usize))
        }
        "forbidden_ladder" => match params {
            [a, b] if *a >= 1 && *b >= 1 => Ok(forbidden_ladder(*a as usize, *b as usize)),
            _ => Err(invalid("expected two path lengths A,B >= 1")),
        },
        "rose" => {
            let n = one(None)?;
            if n == 0 {
                return Err(invalid("N must be at least 1"));
            }
            Ok(rose(n))
        }
        "uncountable_rose" => {
            none()?;
            Ok(uncountable_rose())
        }
        other => Err(FamilyError::Unknown(other.to_string())),
    }
}

fn spine(prefix: &'static str) -> Spine {
    Spine::new(move |i| format!("{prefix}_{i}"))
}

/// Stage `n` has `w_1 … w_n`; for `k = 2` the rungs are `e_i, f_i`.
pub fn ladder(k: u64) -> StagedGraph {
    let profile = UniformProfile {
        min_out_degree: Some(MinOutDegree { k, beyond_stage: 0 }),
        spine: Some(spine("w")),
        linear_spine: true,
        exclusive_spine: k == 1,
        absorbing_spine: true,
        stationary: false,
    };
    StagedGraph::new(format!("ladder{k}"), Some(profile), move |n| {
        let vs: Vec<String> = (1..=n).map(|i| format!("w_{i}")).collect();
        let mut bs = Vec::new();
        for i in 1..n {
            let (src, dst) = (format!("w_{i}"), format!("w_{}", i + 1));
            match k {
                1 => bs.push(EdgeBundle::single(format!("e_{i}"), src, dst)),
                2 => {
                    bs.push(EdgeBundle::single(format!("e_{i}"), src.clone(), dst.clone()));
                    bs.push(EdgeBundle::single(format!("f_{i}"), src, dst));
                }
                _ => {
                    for j in 1..=k {
                        bs.push(EdgeBundle::single(format!("e{j}_{i}"), src.clone(), dst.clone()));
                    }
                }
            }
        }
        Graph::build(&vs, &bs)
    })
}

fn ray_profile() -> UniformProfile {
    UniformProfile {
        min_out_degree: Some(MinOutDegree { k: 1, beyond_stage: 0 }),
        spine: Some(spine("v")),
        linear_spine: true,
        exclusive_spine: true,
        absorbing_spine: true,
        stationary: false,
    }
}

fn ray_stage(n: usize) -> (Vec<String>, Vec<EdgeBundle>) {
    let vs = (1..=n).map(|i| format!("v_{i}")).collect();
    let bs = (1..n).map(|i| EdgeBundle::single(format!("e_{i}"), format!("v_{i}"), format!("v_{}", i + 1))).collect();
    (vs, bs)
}

pub fn ray() -> StagedGraph {
    StagedGraph::new("ray", Some(ray_profile()), |n| {
        let (vs, bs) = ray_stage(n);
        Graph::build(&vs, &bs)
    })
}

/// The ray with one more vertex `u` and edge `g: u → v_j`, present from
/// stage `j` on.
pub fn ray_with_source(j: usize) -> StagedGraph {
    StagedGraph::new(format!("ray_with_source:{j}"), Some(ray_profile()), move |n| {
        let (mut vs, mut bs) = ray_stage(n);
        if n >= j {
            vs.push("u".into());
            bs.push(EdgeBundle::single("g", "u", format!("v_{j}")));
        }
        Graph::build(&vs, &bs)
    })
}

/// Spine `v_i`; between `v_i` and `v_{i+1}` two paths `a_i` (length `a`)
/// and `b_i` (length `b`) through fresh interior vertices.
pub fn forbidden_ladder(a: usize, b: usize) -> StagedGraph {
    let profile = UniformProfile {
        min_out_degree: Some(MinOutDegree { k: 1, beyond_stage: 0 }),
        spine: Some(spine("v")),
        linear_spine: false,
        exclusive_spine: false,
        absorbing_spine: true,
        stationary: false,
    };
    StagedGraph::new(format!("forbidden_ladder:{a},{b}"), Some(profile), move |n| {
        let mut vs: Vec<String> = (1..=n).map(|i| format!("v_{i}")).collect();
        let mut bs = Vec::new();
        for i in 1..n {
            for (tag, len) in [("a", a), ("b", b)] {
                let mut prev = format!("v_{i}");
                for step in 1..=len {
                    let next = if step == len {
                        format!("v_{}", i + 1)
                    } else {
                        let x = format!("{tag}{i}_{step}");
                        vs.push(x.clone());
                        x
                    };
                    let id = if len == 1 { format!("{tag}_{i}") } else { format!("{tag}_{i}.{step}") };
                    bs.push(EdgeBundle::single(id, prev, next.clone()));
                    prev = next;
                }
            }
        }
        Graph::build(&vs, &bs)
    })
}

pub fn rose(n: u64) -> StagedGraph {
    StagedGraph::new(format!("rose{n}"), Some(UniformProfile::stationary()), move |_| {
        let bs: Vec<EdgeBundle> = (1..=n).map(|i| EdgeBundle::single(format!("l_{i}"), "u", "u")).collect();
        Graph::build(&["u"], &bs)
    })
}

pub fn uncountable_rose() -> StagedGraph {
    StagedGraph::new("uncountable_rose", Some(UniformProfile::stationary()), |_| {
        Graph::build(&["u"], &[EdgeBundle::new("l", "u", "u", Cardinality::Uncountable)])
    })
}
