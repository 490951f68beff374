//! Reduction from Partition Into Triangles (PIT) to stable matching with
//! binary, asymmetric valuations.
//!
//! A PIT graph on `3q` vertices becomes an instance with `39q` agents. Each
//! vertex `i` gets three agents `a1`, `a2`, `b` that all value each other,
//! with `b`-agents also valuing the `b`-agents of adjacent vertices. Each of
//! the `6q` pentagadgets is a five-agent directed gadget that can only be
//! stabilised by absorbing one `a`-agent. A stable matching therefore exists
//! exactly when the `b`-agents can be grouped into triangles of the graph.
//!
//! # Agent layout
//!
//! Vertex `i` (0-based) owns agents `3i` (`a1`), `3i + 1` (`a2`) and `3i + 2`
//! (`b`). Pentagadget `r` (0-based, `r < 6q`) owns agents `9q + 5r + s - 1`
//! for its members `p^s`, `s = 1..=5`.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{AgentId, Instance, Matching, Mode, Triple};

/// An undirected graph whose vertex count is a multiple of three.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PitInstance {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
}

impl PitInstance {
    /// Edges are normalised to `(low, high)` and sorted.
    pub fn new(vertex_count: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if !vertex_count.is_multiple_of(3) {
            return Err(Error::InvalidPit(format!(
                "{vertex_count} vertices is not a multiple of three"
            )));
        }
        let mut set = BTreeSet::new();
        for &(u, v) in edges {
            if u >= vertex_count || v >= vertex_count {
                return Err(Error::InvalidPit(format!("edge ({u}, {v}) out of range")));
            }
            if u == v {
                return Err(Error::InvalidPit(format!("loop at vertex {u}")));
            }
            if !set.insert((u.min(v), u.max(v))) {
                return Err(Error::InvalidPit(format!("duplicate edge ({u}, {v})")));
            }
        }
        Ok(PitInstance {
            vertex_count,
            edges: set.into_iter().collect(),
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn q(&self) -> usize {
        self.vertex_count / 3
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.binary_search(&(u.min(v), u.max(v))).is_ok()
    }
}

/// Where each gadget agent lives; see the module docs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ReductionMap {
    pub q: usize,
}

/// The role of an agent in the reduced instance. Indices are 0-based;
/// `s` is the pentagadget member number `1..=5`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    A1(usize),
    A2(usize),
    B(usize),
    P { r: usize, s: usize },
}

impl ReductionMap {
    pub fn agent_count(&self) -> usize {
        39 * self.q
    }

    pub fn a1(&self, vertex: usize) -> AgentId {
        3 * vertex
    }

    pub fn a2(&self, vertex: usize) -> AgentId {
        3 * vertex + 1
    }

    pub fn b(&self, vertex: usize) -> AgentId {
        3 * vertex + 2
    }

    /// Agent of member `p^s`, `s` in `1..=5`, of pentagadget `r`.
    pub fn p(&self, r: usize, s: usize) -> AgentId {
        debug_assert!((1..=5).contains(&s));
        9 * self.q + 5 * r + s - 1
    }

    pub fn role(&self, agent: AgentId) -> Option<Role> {
        let vertex_agents = 9 * self.q;
        if agent < vertex_agents {
            let v = agent / 3;
            Some(match agent % 3 {
                0 => Role::A1(v),
                1 => Role::A2(v),
                _ => Role::B(v),
            })
        } else if agent < self.agent_count() {
            let k = agent - vertex_agents;
            Some(Role::P { r: k / 5, s: k % 5 + 1 })
        } else {
            None
        }
    }
}

/// Out-arcs of each pentagadget member, by member number.
const PENTAGADGET_ARCS: [(usize, [usize; 3]); 5] = [
    (1, [2, 3, 5]),
    (2, [3, 4, 1]),
    (3, [4, 5, 2]),
    (4, [5, 1, 3]),
    (5, [1, 2, 4]),
];

/// Builds the reduced instance.
pub fn reduce_pit(g: &PitInstance) -> Result<(Instance, ReductionMap)> {
    let map = ReductionMap { q: g.q() };
    let mut arcs = Vec::new();
    for i in 0..g.vertex_count() {
        let gadget = [map.a1(i), map.a2(i), map.b(i)];
        for &x in &gadget {
            for &y in &gadget {
                if x != y {
                    arcs.push((x, y, 1));
                }
            }
        }
    }
    for &(u, v) in g.edges() {
        arcs.push((map.b(u), map.b(v), 1));
        arcs.push((map.b(v), map.b(u), 1));
    }
    for r in 0..6 * map.q {
        for (from, tos) in PENTAGADGET_ARCS {
            for to in tos {
                arcs.push((map.p(r, from), map.p(r, to), 1));
            }
        }
    }
    let inst = Instance::from_arcs(map.agent_count(), Mode::Binary, &arcs)?;
    Ok((inst, map))
}

/// Whether `x` partitions the vertices into triangles of `g`.
pub fn validate_pit(g: &PitInstance, x: &[[usize; 3]]) -> bool {
    if x.len() != g.q() {
        return false;
    }
    let mut seen = vec![false; g.vertex_count()];
    for &[u, v, w] in x {
        for a in [u, v, w] {
            if a >= seen.len() || seen[a] {
                return false;
            }
            seen[a] = true;
        }
        if !(g.has_edge(u, v) && g.has_edge(v, w) && g.has_edge(u, w)) {
            return false;
        }
    }
    true
}

fn canonical_partition(x: &[[usize; 3]]) -> Vec<[usize; 3]> {
    let mut out: Vec<[usize; 3]> = x
        .iter()
        .map(|t| {
            let mut t = *t;
            t.sort_unstable();
            t
        })
        .collect();
    out.sort_unstable();
    out
}

/// The stable matching built from a partition into triangles.
pub fn encode_pit_solution(
    g: &PitInstance,
    x: &[[usize; 3]],
    map: &ReductionMap,
) -> Result<Matching> {
    if !validate_pit(g, x) {
        return Err(Error::InvalidPit("not a partition into triangles".into()));
    }
    let mut triples = Vec::with_capacity(13 * map.q);
    for &[u, v, w] in x {
        triples.push(Triple::new(map.b(u), map.b(v), map.b(w))?);
    }
    for r in 0..6 * map.q {
        triples.push(Triple::new(map.p(r, 1), map.p(r, 2), map.p(r, 3))?);
    }
    for i in 0..g.vertex_count() {
        let (even, odd) = (2 * i + 1, 2 * i);
        triples.push(Triple::new(map.a1(i), map.p(even, 4), map.p(even, 5))?);
        triples.push(Triple::new(map.a2(i), map.p(odd, 4), map.p(odd, 5))?);
    }
    Matching::new(map.agent_count(), triples)
}

/// Reads a partition into triangles off a stable matching of the reduced instance.
pub fn decode_stable_matching(
    g: &PitInstance,
    map: &ReductionMap,
    m: &Matching,
) -> Result<Vec<[usize; 3]>> {
    if m.n() != map.agent_count() {
        return Err(Error::DecodeStructure(format!(
            "matching is over {} agents, reduction has {}",
            m.n(),
            map.agent_count()
        )));
    }
    let mut x = Vec::new();
    for i in 0..g.vertex_count() {
        let b = map.b(i);
        let t = m
            .triple_of(b)
            .ok_or_else(|| Error::DecodeStructure(format!("b-agent of vertex {i} is unmatched")))?;
        let mut vertices = [0usize; 3];
        for (k, a) in t.members().into_iter().enumerate() {
            match map.role(a) {
                Some(Role::B(v)) => vertices[k] = v,
                _ => {
                    return Err(Error::DecodeStructure(format!(
                        "b-agent of vertex {i} is grouped with non-b agent {a}"
                    )))
                }
            }
        }
        if vertices[0] == i {
            x.push(vertices);
        }
    }
    if !validate_pit(g, &x) {
        return Err(Error::DecodeStructure(
            "b-agent triples do not form triangles of the graph".into(),
        ));
    }
    Ok(canonical_partition(&x))
}

/// A graph with a planted partition into `q` triangles plus noise edges,
/// each present with probability `p`. With `unique`, noise edges that would
/// close a new triangle are rejected, so the planted partition is the only one.
pub fn planted_pit(q: usize, p: f64, unique: bool, seed: u64) -> Result<(PitInstance, Vec<[usize; 3]>)> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Generator(format!("edge probability {p} outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 3 * q;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let partition = canonical_partition(
        &order
            .chunks_exact(3)
            .map(|c| [c[0], c[1], c[2]])
            .collect::<Vec<_>>(),
    );
    let mut adj = vec![vec![false; n]; n];
    let link = |adj: &mut Vec<Vec<bool>>, u: usize, v: usize| {
        adj[u][v] = true;
        adj[v][u] = true;
    };
    for &[u, v, w] in &partition {
        link(&mut adj, u, v);
        link(&mut adj, v, w);
        link(&mut adj, u, w);
    }
    for u in 0..n {
        for v in u + 1..n {
            if adj[u][v] || !rng.gen_bool(p) {
                continue;
            }
            if unique && (0..n).any(|w| adj[u][w] && adj[v][w]) {
                continue;
            }
            link(&mut adj, u, v);
        }
    }
    let edges: Vec<_> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .filter(|&(u, v)| adj[u][v])
        .collect();
    Ok((PitInstance::new(n, &edges)?, partition))
}
