//! Stable matchings for binary-symmetric instances.
//!
//! [`find_stable`] packs triangles greedily, then builds a stable P-matching
//! on the triangle-free remainder by inserting agents one at a time in id
//! order. Each insertion either forms a new triple around the new agent or
//! hands a repairable matching to [`crate::repair`].

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{complete_matching, find_blocking_within, AgentId, Instance, Matching, Mode, Triple};
use crate::repair::{repair_within, RepairTrace};
use crate::triangles::{eliminate_triangles, find_triangle};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolverOptions {
    /// Re-verify stability and the P-matching property after every
    /// insertion. Cubic per step.
    pub check_invariants: bool,
}

/// What an insertion did.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    /// Grouped with two unmatched neighbours.
    TwoFreeNeighbours,
    /// Grouped with an unmatched neighbour and that neighbour's unmatched neighbour.
    FreePath,
    /// Repaired the matching with the new agent as pivot.
    Repair,
    /// Left unmatched.
    Keep,
}

/// The input and result of one repair performed during a solve.
#[derive(Debug)]
pub struct RepairEvent<'a> {
    /// Agents present when the repair ran.
    pub active: &'a [bool],
    pub input: &'a Matching,
    pub pivot: AgentId,
    pub trace: &'a RepairTrace,
}

#[derive(Debug)]
pub enum SolverEvent<'a> {
    Inserted { agent: AgentId, branch: Branch },
    Repaired(RepairEvent<'a>),
}

/// Mutable matching over a growing agent set, with a utility cache.
struct Insertion<'a> {
    inst: &'a Instance,
    active: Vec<bool>,
    partners: Vec<Option<[AgentId; 2]>>,
    util: Vec<i64>,
}

impl<'a> Insertion<'a> {
    fn new(inst: &'a Instance) -> Self {
        let n = inst.n();
        Insertion {
            inst,
            active: vec![false; n],
            partners: vec![None; n],
            util: vec![0; n],
        }
    }

    fn free_neighbours(&self, a: AgentId) -> impl Iterator<Item = AgentId> + '_ {
        self.inst
            .neighbors(a)
            .iter()
            .copied()
            .filter(move |&q| self.active[q] && self.util[q] == 0)
    }

    fn add(&mut self, a: AgentId, b: AgentId, c: AgentId) {
        for (x, y, z) in [(a, b, c), (b, a, c), (c, a, b)] {
            self.partners[x] = Some([y, z]);
            self.util[x] = self.inst.pair_utility(x, y, z);
        }
    }

    fn matching(&self) -> Result<Matching> {
        let triples = (0..self.inst.n()).filter_map(|a| match self.partners[a] {
            Some([b, c]) if a < b && a < c => Some(Triple::new(a, b, c)),
            _ => None,
        });
        Matching::new(self.inst.n(), triples.collect::<Result<Vec<_>>>()?)
    }

    fn replace(&mut self, m: &Matching) {
        for a in 0..self.inst.n() {
            self.partners[a] = m.partners(a);
            self.util[a] = match self.partners[a] {
                Some([b, c]) => self.inst.pair_utility(a, b, c),
                None => 0,
            };
        }
    }

    fn insert(
        &mut self,
        i: AgentId,
        observer: &mut dyn FnMut(&SolverEvent<'_>),
    ) -> Result<Branch> {
        self.active[i] = true;

        let free: Vec<AgentId> = self.free_neighbours(i).take(2).collect();
        if let [l1, l2] = free[..] {
            self.add(i, l1, l2);
            return Ok(Branch::TwoFreeNeighbours);
        }

        let path = self.free_neighbours(i).find_map(|l3| {
            self.free_neighbours(l3)
                .find(|&l4| l4 != i)
                .map(|l4| (l3, l4))
        });
        if let Some((l3, l4)) = path {
            self.add(i, l3, l4);
            return Ok(Branch::FreePath);
        }

        let repairable = self.inst.neighbors(i).iter().any(|&l5| {
            self.active[l5] && self.util[l5] == 1 && self.free_neighbours(l5).any(|l6| l6 != i)
        });
        if repairable {
            let input = self.matching()?;
            let trace = repair_within(self.inst, &self.active, &input, i)?;
            observer(&SolverEvent::Repaired(RepairEvent {
                active: &self.active,
                input: &input,
                pivot: i,
                trace: &trace,
            }));
            self.replace(&trace.matching);
            return Ok(Branch::Repair);
        }
        Ok(Branch::Keep)
    }

    fn verify(&self, after: AgentId) -> Result<()> {
        for a in 0..self.inst.n() {
            if self.active[a] && self.partners[a].is_some() && self.util[a] == 0 {
                return Err(Error::Internal(format!(
                    "agent {a} matched with utility 0 after inserting {after}"
                )));
            }
        }
        if let Some(t) = find_blocking_within(self.inst, &self.util, Some(&self.active)) {
            return Err(Error::Internal(format!("{t} blocks after inserting {after}")));
        }
        Ok(())
    }
}

/// Stable P-matching over the agents allowed by `within`, which must induce a
/// triangle-free graph.
fn solve_triangle_free(
    inst: &Instance,
    within: &[bool],
    options: &SolverOptions,
    observer: &mut dyn FnMut(&SolverEvent<'_>),
) -> Result<Matching> {
    let mut state = Insertion::new(inst);
    for i in (0..inst.n()).filter(|&a| within[a]) {
        let branch = state.insert(i, observer)?;
        observer(&SolverEvent::Inserted { agent: i, branch });
        if options.check_invariants {
            state.verify(i)?;
        }
    }
    state.matching()
}

/// A stable P-matching of a triangle-free binary-symmetric instance.
pub fn find_stable_triangle_free(inst: &Instance) -> Result<Matching> {
    find_stable_triangle_free_with(inst, &SolverOptions::default(), &mut |_| {})
}

pub fn find_stable_triangle_free_with(
    inst: &Instance,
    options: &SolverOptions,
    observer: &mut dyn FnMut(&SolverEvent<'_>),
) -> Result<Matching> {
    inst.require_mode(Mode::BinarySymmetric)?;
    if let Some(t) = find_triangle(inst, None)? {
        return Err(Error::NotTriangleFree(t));
    }
    solve_triangle_free(inst, &vec![true; inst.n()], options, observer)
}

/// A stable P-matching of a binary-symmetric instance. With `complete`, the
/// leftover agents are then grouped so that `floor(n / 3)` triples result;
/// the output stays stable but may no longer be a P-matching.
pub fn find_stable(inst: &Instance, complete: bool) -> Result<Matching> {
    find_stable_with(inst, complete, &SolverOptions::default(), &mut |_| {})
}

pub fn find_stable_with(
    inst: &Instance,
    complete: bool,
    options: &SolverOptions,
    observer: &mut dyn FnMut(&SolverEvent<'_>),
) -> Result<Matching> {
    inst.require_mode(Mode::BinarySymmetric)?;
    let (residual, packing) = eliminate_triangles(inst)?;
    let rest = solve_triangle_free(inst, &residual.active, options, observer)?;
    let m = packing.union(&rest)?;
    if complete {
        complete_matching(inst, &m)
    } else {
        Ok(m)
    }
}
