//! Graph generators and brute-force oracles shared by the integration
//! tests. The oracles work from raw edge lists and never call into the
//! library's own algorithms.

#![allow(dead_code)]

use std::collections::BTreeSet;

use graph_cstar::graph::{Cardinality, EdgeBundle, Graph};
use proptest::prelude::*;
use rand::Rng;

/// A small graph as plain data: vertex `i` is named `x{i}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raw {
    pub n: usize,
    /// `(src, dst, cardinality)` per bundle.
    pub edges: Vec<(usize, usize, Cardinality)>,
}

impl Raw {
    pub fn singles(n: usize, edges: &[(usize, usize)]) -> Self {
        Raw { n, edges: edges.iter().map(|&(s, d)| (s, d, Cardinality::Finite(1))).collect() }
    }

    /// The plain edge list of a library graph, indexed by vertex order.
    pub fn from_graph(g: &Graph) -> Self {
        let names = g.vertex_names();
        let idx = |n: &str| names.iter().position(|m| m == n).unwrap();
        Raw {
            n: names.len(),
            edges: g.edge_bundles().iter().map(|b| (idx(&b.src), idx(&b.dst), b.cardinality)).collect(),
        }
    }

    pub fn graph(&self) -> Graph {
        let vs: Vec<String> = (0..self.n).map(|i| format!("x{i}")).collect();
        let bs: Vec<EdgeBundle> = self
            .edges
            .iter()
            .enumerate()
            .map(|(k, &(s, d, c))| EdgeBundle::new(format!("e{k}"), format!("x{s}"), format!("x{d}"), c))
            .collect();
        Graph::build(&vs, &bs).expect("generated graphs are valid")
    }

    pub fn out_total(&self, v: usize) -> Cardinality {
        self.edges.iter().filter(|e| e.0 == v).fold(Cardinality::Finite(0), |acc, e| acc + e.2)
    }

    pub fn is_sink(&self, v: usize) -> bool {
        !self.edges.iter().any(|e| e.0 == v)
    }

    pub fn is_regular(&self, v: usize) -> bool {
        matches!(self.out_total(v), Cardinality::Finite(k) if k > 0)
    }

    pub fn successors(&self, v: usize) -> BTreeSet<usize> {
        self.edges.iter().filter(|e| e.0 == v).map(|e| e.1).collect()
    }

    /// `reach[u][w]`: a path (possibly of length 0) from `u` to `w`, by
    /// Floyd-Warshall.
    pub fn reach(&self) -> Vec<Vec<bool>> {
        let mut r = vec![vec![false; self.n]; self.n];
        for (i, row) in r.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(s, d, _) in &self.edges {
            r[s][d] = true;
        }
        for k in 0..self.n {
            for i in 0..self.n {
                for j in 0..self.n {
                    if r[i][k] && r[k][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
        r
    }

    /// Every simple cycle as its list of bundle indices, by DFS from each
    /// minimal start vertex.
    pub fn simple_cycles(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        for start in 0..self.n {
            let mut stack = vec![(start, Vec::<usize>::new(), vec![start])];
            while let Some((v, path, seen)) = stack.pop() {
                for (k, &(s, d, _)) in self.edges.iter().enumerate() {
                    if s != v || d < start {
                        continue;
                    }
                    let mut p = path.clone();
                    p.push(k);
                    if d == start {
                        out.push(p);
                    } else if !seen.contains(&d) {
                        let mut sn = seen.clone();
                        sn.push(d);
                        stack.push((d, p, sn));
                    }
                }
            }
        }
        out
    }

    pub fn has_cycle(&self) -> bool {
        !self.simple_cycles().is_empty()
    }

    /// Condition (L): every simple cycle has a vertex emitting an edge
    /// besides the cycle's own. A cycle without exits visits only vertices
    /// emitting one edge, so it is simple.
    pub fn condition_l(&self) -> bool {
        self.simple_cycles()
            .iter()
            .all(|c| c.iter().any(|&k| self.out_total(self.edges[k].0) != Cardinality::Finite(1)))
    }

    /// Every vertex reaches every cycle. Each infinite path of a finite
    /// graph eventually winds around one simple cycle, and reaching the
    /// stem of a lasso means reaching its cycle.
    pub fn cofinal(&self) -> bool {
        let r = self.reach();
        self.simple_cycles().iter().all(|c| {
            let on = self.edges[c[0]].0;
            (0..self.n).all(|v| r[v][on])
        })
    }

    pub fn singular(&self) -> Vec<usize> {
        (0..self.n).filter(|&v| !self.is_regular(v)).collect()
    }

    pub fn hereditary(&self, set: u32) -> bool {
        self.edges.iter().all(|&(s, d, _)| set & (1 << s) == 0 || set & (1 << d) != 0)
    }

    pub fn saturated(&self, set: u32) -> bool {
        (0..self.n).all(|v| {
            set & (1 << v) != 0 || !self.is_regular(v) || self.successors(v).iter().any(|&w| set & (1 << w) == 0)
        })
    }

    /// Saturated hereditary sets by testing every subset.
    pub fn powerset_lattice(&self) -> Vec<BTreeSet<usize>> {
        let mut out: Vec<BTreeSet<usize>> = (0u32..1 << self.n)
            .filter(|&m| self.hereditary(m) && self.saturated(m))
            .map(|m| (0..self.n).filter(|&i| m & (1 << i) != 0).collect())
            .collect();
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.iter().cmp(b.iter())));
        out
    }

    /// Simplicity by the lattice route, using the powerset.
    pub fn simple_by_powerset(&self) -> bool {
        self.condition_l() && self.powerset_lattice().len() == 2
    }

    /// Number of paths from `u` to `w` counted by explicit recursion over
    /// edges (acyclic, finite bundles).
    pub fn paths_between(&self, u: usize, w: usize) -> u128 {
        let mut total = if u == w { 1 } else { 0 };
        for &(s, d, c) in &self.edges {
            if s == u {
                let Cardinality::Finite(m) = c else { panic!("infinite bundle") };
                total += m as u128 * self.paths_between(d, w);
            }
        }
        total
    }

    pub fn paths_into(&self, w: usize) -> u128 {
        (0..self.n).map(|u| self.paths_between(u, w)).sum()
    }

    /// The saturated hereditary set generated by `seed`, by fixpoint
    /// iteration over bitmasks.
    pub fn generated(&self, seed: u32) -> u32 {
        let r = self.reach();
        let mut set =
            (0..self.n).filter(|&w| (0..self.n).any(|u| seed & (1 << u) != 0 && r[u][w])).fold(0, |m, w| m | 1 << w);
        loop {
            let grow = (0..self.n)
                .filter(|&v| {
                    set & (1 << v) == 0 && self.is_regular(v) && self.successors(v).iter().all(|&w| set & (1 << w) != 0)
                })
                .fold(0, |m, v| m | 1 << v);
            if grow == 0 {
                return set;
            }
            set |= grow;
        }
    }

    /// Longest chain with at least two paths between consecutive vertices,
    /// by trying every sequence of distinct vertices.
    pub fn ladder_by_search(&self) -> usize {
        let doubled: Vec<Vec<bool>> =
            (0..self.n).map(|u| (0..self.n).map(|w| u != w && self.paths_between(u, w) >= 2).collect()).collect();
        fn extend(doubled: &[Vec<bool>], chain: &mut Vec<usize>, best: &mut usize) {
            *best = (*best).max(chain.len() - 1);
            let last = *chain.last().unwrap();
            for w in 0..doubled.len() {
                if doubled[last][w] && !chain.contains(&w) {
                    chain.push(w);
                    extend(doubled, chain, best);
                    chain.pop();
                }
            }
        }
        let mut best = 0;
        for u in 0..self.n {
            extend(&doubled, &mut vec![u], &mut best);
        }
        best
    }
}

/// Every acyclic graph on `1..=max_n` vertices with at most `max_e`
/// single edges, edges running from lower to higher index (every acyclic
/// graph has such a labeling), parallel edges allowed.
pub fn exhaustive_acyclic(max_n: usize, max_e: usize) -> Vec<Raw> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        let mut chosen = Vec::new();
        multisets(&pairs, 0, max_e, &mut chosen, &mut |edges| out.push(Raw::singles(n, edges)));
    }
    out
}

type Pairs = [(usize, usize)];

fn multisets(pairs: &Pairs, from: usize, left: usize, chosen: &mut Vec<(usize, usize)>, emit: &mut dyn FnMut(&Pairs)) {
    emit(chosen);
    if left == 0 {
        return;
    }
    for i in from..pairs.len() {
        chosen.push(pairs[i]);
        multisets(pairs, i, left - 1, chosen, emit);
        chosen.pop();
    }
}

/// A random graph with up to `max_n` vertices: loops, cycles, parallel
/// edges and occasionally infinite bundles.
pub fn random_raw(rng: &mut impl Rng, max_n: usize, infinite: bool) -> Raw {
    let n = rng.gen_range(1..=max_n);
    let m = rng.gen_range(0..=2 * n);
    let edges = (0..m)
        .map(|_| {
            let c = match rng.gen_range(0..20) {
                0 if infinite => Cardinality::AlephNull,
                1 if infinite => Cardinality::Uncountable,
                2 | 3 => Cardinality::Finite(2),
                _ => Cardinality::Finite(1),
            };
            (rng.gen_range(0..n), rng.gen_range(0..n), c)
        })
        .collect();
    Raw { n, edges }
}

/// Proptest strategy for graphs with up to `max_n` vertices.
pub fn arb_raw(max_n: usize, acyclic: bool, infinite: bool) -> impl Strategy<Value = Raw> {
    (1..=max_n).prop_flat_map(move |n| {
        let card = if infinite {
            prop_oneof![
                8 => Just(Cardinality::Finite(1)),
                2 => Just(Cardinality::Finite(2)),
                1 => Just(Cardinality::AlephNull),
                1 => Just(Cardinality::Uncountable),
            ]
            .boxed()
        } else {
            prop_oneof![4 => Just(Cardinality::Finite(1)), 1 => Just(Cardinality::Finite(2))].boxed()
        };
        // an acyclic edge joins two distinct vertices, oriented upward
        let edge = if acyclic {
            (0..n, 0..n.max(2) - 1, card)
                .prop_map(|(s, d, c)| {
                    let d = if d >= s { d + 1 } else { d };
                    (s.min(d), s.max(d), c)
                })
                .boxed()
        } else {
            (0..n, 0..n, card).boxed()
        };
        let max_edges = if acyclic && n == 1 { 0 } else { 2 * n };
        proptest::collection::vec(edge, 0..=max_edges).prop_map(move |edges| Raw { n, edges })
    })
}
