//! A stable matching with at least half the maximum stable welfare.
//!
//! Starting from [`find_stable`], the unmatched agents `U` are grouped into
//! `floor(|U| / 3)` further triples, each built from a pair of adjacent agents
//! where possible plus one more agent of `U`.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::Result;
use crate::matching2d::{greedy_maximal_matching, maximum_matching};
use crate::model::{welfare, AgentId, Instance, Matching, Mode, Triple, WelfareReport};
use crate::oracle::{max_uw_stable, EnumerationBudget};
use crate::solver::find_stable;

/// Disjoint adjacent pairs, each stored `(low, high)`, sorted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PairMatching {
    pub pairs: Vec<(AgentId, AgentId)>,
}

impl PairMatching {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn covers(&self, a: AgentId) -> bool {
        self.pairs.iter().any(|&(p, q)| p == a || q == a)
    }
}

/// How the pairs of unmatched agents are chosen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairStrategy {
    /// Maximum cardinality.
    #[default]
    Maximum,
    /// Greedy in id order; maximal only.
    GreedyMaximal,
}

fn pair_matching(inst: &Instance, subset: &[AgentId], strategy: PairStrategy) -> Result<PairMatching> {
    inst.require_mode(Mode::BinarySymmetric)?;
    let agents: Vec<AgentId> = subset.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    for &a in &agents {
        inst.check_agent(a)?;
    }
    let mut local = vec![usize::MAX; inst.n()];
    for (k, &a) in agents.iter().enumerate() {
        local[a] = k;
    }
    let adj: Vec<Vec<usize>> = agents
        .iter()
        .map(|&a| {
            inst.neighbors(a)
                .iter()
                .filter(|&&b| local[b] != usize::MAX)
                .map(|&b| local[b])
                .collect()
        })
        .collect();
    let mate = match strategy {
        PairStrategy::Maximum => maximum_matching(&adj),
        PairStrategy::GreedyMaximal => greedy_maximal_matching(&adj),
    };
    let pairs = mate
        .iter()
        .enumerate()
        .filter_map(|(x, m)| m.filter(|&y| x < y).map(|y| (agents[x], agents[y])))
        .collect();
    Ok(PairMatching { pairs })
}

/// A maximum-cardinality matching of the graph induced by `subset`.
pub fn maximum_2d_matching(inst: &Instance, subset: &[AgentId]) -> Result<PairMatching> {
    pair_matching(inst, subset, PairStrategy::Maximum)
}

/// The approximation with the default pair strategy.
pub fn find_stable_uw(inst: &Instance) -> Result<(Matching, WelfareReport)> {
    find_stable_uw_with(inst, PairStrategy::Maximum)
}

pub fn find_stable_uw_with(
    inst: &Instance,
    strategy: PairStrategy,
) -> Result<(Matching, WelfareReport)> {
    let m1 = find_stable(inst, false)?;
    let u = m1.unmatched();
    let k = u.len() / 3;
    let y = pair_matching(inst, &u, strategy)?;

    let mut x: Vec<(AgentId, AgentId)> = y.pairs.iter().copied().take(k).collect();
    if x.len() < k {
        let spare: Vec<AgentId> = u.iter().copied().filter(|&a| !y.covers(a)).collect();
        let missing = k - x.len();
        x.extend(spare.chunks_exact(2).take(missing).map(|c| (c[0], c[1])));
        x.sort_unstable();
    }
    let in_x: BTreeSet<AgentId> = x.iter().flat_map(|&(p, q)| [p, q]).collect();
    let z = u.iter().copied().filter(|a| !in_x.contains(a)).take(k);
    let m2 = x
        .iter()
        .zip(z)
        .map(|(&(p, q), s)| Triple::new(p, q, s))
        .collect::<Result<Vec<_>>>()?;

    let m = m1.union(&Matching::new(inst.n(), m2)?)?;
    let report = welfare(inst, &m)?;
    Ok((m, report))
}

/// The approximation's output, optionally compared with the exact optimum.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ApproxReport {
    pub matching: Matching,
    pub welfare_approx: i64,
    pub welfare_opt: Option<i64>,
    /// `2 * welfare_approx >= welfare_opt`; present only with `welfare_opt`.
    pub ratio_bound_satisfied: Option<bool>,
}

pub fn approx_report(
    inst: &Instance,
    with_oracle: bool,
    budget: &EnumerationBudget,
) -> Result<ApproxReport> {
    let (matching, report) = find_stable_uw(inst)?;
    let welfare_opt = if with_oracle {
        Some(max_uw_stable(inst, budget)?.1)
    } else {
        None
    };
    Ok(ApproxReport {
        ratio_bound_satisfied: welfare_opt.map(|opt| 2 * report.total >= opt),
        welfare_approx: report.total,
        welfare_opt,
        matching,
    })
}
