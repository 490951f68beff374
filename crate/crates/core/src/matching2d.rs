//! Pair matchings in general graphs, backed by petgraph.
//!
//! Vertices are `0..adj.len()`; `adj` must be symmetric. Results are
//! deterministic for a given adjacency list.

use petgraph::algo::{greedy_matching, maximum_matching as gabow};
use petgraph::graph::{NodeIndex, UnGraph};

fn graph(adj: &[Vec<usize>]) -> UnGraph<(), ()> {
    let mut g = UnGraph::with_capacity(adj.len(), 0);
    for _ in adj {
        g.add_node(());
    }
    for (v, list) in adj.iter().enumerate() {
        for &u in list.iter().filter(|&&u| v < u) {
            g.add_edge(NodeIndex::new(v), NodeIndex::new(u), ());
        }
    }
    g
}

/// Mate of every vertex in a maximum matching. `O(V^3)`.
pub fn maximum_matching(adj: &[Vec<usize>]) -> Vec<Option<usize>> {
    let g = graph(adj);
    let m = gabow(&g);
    (0..adj.len()).map(|v| m.mate(NodeIndex::new(v)).map(|u| u.index())).collect()
}

/// Mate of every vertex in a greedy maximal matching.
pub fn greedy_maximal_matching(adj: &[Vec<usize>]) -> Vec<Option<usize>> {
    let g = graph(adj);
    let m = greedy_matching(&g);
    (0..adj.len()).map(|v| m.mate(NodeIndex::new(v)).map(|u| u.index())).collect()
}
