//! Small named instances used throughout the tests and examples.

use crate::model::{AgentId, Instance, Matching, Mode};

/// Triangle on three agents.
pub fn t3() -> Instance {
    Instance::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap()
}

/// Path 0 - 1 - 2.
pub fn p3() -> Instance {
    Instance::from_edges(3, &[(0, 1), (1, 2)]).unwrap()
}

/// Three agents, no edges.
pub fn e3() -> Instance {
    Instance::edgeless(3)
}

/// Path `0 - 1 - ... - (n-1)`.
pub fn path(n: usize) -> Instance {
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    Instance::from_edges(n, &edges).unwrap()
}

/// Cycle on `n >= 3` agents.
pub fn cycle(n: usize) -> Instance {
    let mut edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    edges.push((0, n - 1));
    Instance::from_edges(n, &edges).unwrap()
}

pub fn complete(n: usize) -> Instance {
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            edges.push((a, b));
        }
    }
    Instance::from_edges(n, &edges).unwrap()
}

/// Two triangles `{0,1,2}` and `{3,4,5}` joined by the edge 2 - 3.
pub fn bridged_triangles() -> Instance {
    Instance::from_edges(6, &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 5), (3, 5)]).unwrap()
}

/// Binary asymmetric 3-cycle: 0 values 1, 1 values 2, 2 values 0.
pub fn directed_3_cycle() -> Instance {
    Instance::from_arcs(3, Mode::Binary, &[(0, 1, 1), (1, 2, 1), (2, 0, 1)]).unwrap()
}

/// Nine-agent instance on which the welfare approximation is tight.
///
/// In 1-based labels the edges are `{3,5}, {5,6}, {6,3}, {1,3}, {2,3},
/// {4,5}, {8,5}, {7,6}, {9,6}`; here every label is shifted down by one.
pub fn fig9() -> Instance {
    const LABELLED: [(AgentId, AgentId); 9] = [
        (3, 5),
        (5, 6),
        (6, 3),
        (1, 3),
        (2, 3),
        (4, 5),
        (8, 5),
        (7, 6),
        (9, 6),
    ];
    let edges: Vec<_> = LABELLED.iter().map(|&(a, b)| (a - 1, b - 1)).collect();
    Instance::from_edges(9, &edges).unwrap()
}

/// `{{α3, α5, α6}}` on [`fig9`].
pub fn fig9_triangle_matching() -> Matching {
    Matching::from_arrays(9, &[[2, 4, 5]]).unwrap()
}

/// `{{α1, α2, α3}, {α4, α5, α8}, {α6, α7, α9}}` on [`fig9`].
pub fn fig9_optimum() -> Matching {
    Matching::from_arrays(9, &[[0, 1, 2], [3, 4, 7], [5, 6, 8]]).unwrap()
}

/// A repairable input: instance, matching and pivot.
#[derive(Clone, Debug)]
pub struct RepairFixture {
    pub instance: Instance,
    pub matching: Matching,
    pub pivot: AgentId,
}

fn repair_fixture(n: usize, edges: &[(AgentId, AgentId)], triples: &[[AgentId; 3]]) -> RepairFixture {
    RepairFixture {
        instance: Instance::from_edges(n, edges).unwrap(),
        matching: Matching::from_arrays(n, triples).unwrap(),
        pivot: 0,
    }
}

/// Smallest repairable input for each repair case, indexed `1..=7`.
///
/// All share the prefix: pivot 0 adjacent to 1, 1 adjacent to the
/// zero-utility agent 2, and the path triple `{1, 3, 4}` centred on 3.
pub fn repair_case(case: u8) -> Option<RepairFixture> {
    const BASE: [(AgentId, AgentId); 4] = [(0, 1), (1, 2), (1, 3), (3, 4)];
    let with = |n: usize, extra: &[(AgentId, AgentId)], triples: &[[AgentId; 3]]| {
        let mut edges = BASE.to_vec();
        edges.extend_from_slice(extra);
        repair_fixture(n, &edges, triples)
    };
    let one = [[1, 3, 4]];
    let two = [[1, 3, 4], [5, 6, 7]];
    let fixture = match case {
        1 => with(6, &[(3, 5)], &one),
        2 => with(6, &[(4, 5)], &one),
        3 => with(9, &[(4, 5), (5, 6), (6, 7), (5, 8), (2, 6)], &two),
        4 => with(6, &[(0, 4), (0, 5)], &one),
        5 => with(6, &[(2, 4), (2, 5)], &one),
        6 => with(9, &[(4, 5), (5, 6), (6, 7), (5, 8), (2, 4), (4, 7)], &two),
        7 => with(5, &[], &one),
        _ => return None,
    };
    Some(fixture)
}
