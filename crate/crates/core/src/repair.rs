//! Repairing a nearly stable P-matching in a triangle-free instance.
//!
//! The input matching is blocked only by triples `{pivot, j1, j2}` where `j1`
//! is a path endpoint (utility 1) adjacent to the pivot and `j2` is an
//! unmatched neighbour of `j1`. The repair walks a path `S` of matched
//! triples starting at `M(j1)` until one of six stopping conditions holds,
//! then rebuilds the triples along `S` according to one of seven cases.
//!
//! Positions in `S` are written 1-based in comments, matching `S_1, S_2, ...`.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{
    blocking_triples, is_p_matching, is_stable, raw_utility, utilities, AgentId, Instance,
    Matching, Mode, Triple,
};
use crate::triangles::find_triangle;

/// Which construction produced the repaired matching.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(into = "u8")]
pub enum RepairCase {
    /// A zero-utility neighbour `z1 != j2` of `S_{3c-1}`.
    ZeroNeighbourOfMiddle,
    /// A zero-utility neighbour `z2` of `S_{3c}`.
    ZeroNeighbourOfLast,
    /// `j2` itself neighbours `S_{3c-1}`.
    LoopBackToJ2,
    /// `S_{3c}` neighbours the pivot, which has another zero-utility neighbour.
    PivotNeighbour,
    /// `S_{3c}` neighbours `j2`, which has a zero-utility neighbour.
    J2Neighbour,
    /// `S_{3c}` neighbours an earlier `S_{3b}` that neighbours `j2`.
    EarlierBlock,
    /// The path cannot be extended; `S_{3c}` is left unmatched.
    DeadEnd,
}

impl RepairCase {
    pub const ALL: [RepairCase; 7] = [
        RepairCase::ZeroNeighbourOfMiddle,
        RepairCase::ZeroNeighbourOfLast,
        RepairCase::LoopBackToJ2,
        RepairCase::PivotNeighbour,
        RepairCase::J2Neighbour,
        RepairCase::EarlierBlock,
        RepairCase::DeadEnd,
    ];

    /// The case number, `1..=7`.
    pub fn number(self) -> u8 {
        self as u8 + 1
    }

    pub fn from_number(k: u8) -> Option<Self> {
        Self::ALL.get((k as usize).checked_sub(1)?).copied()
    }
}

impl From<RepairCase> for u8 {
    fn from(c: RepairCase) -> u8 {
        c.number()
    }
}

impl fmt::Display for RepairCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "case {}", self.number())
    }
}

/// Working state of one repair, exposed for tracing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RepairContext {
    pub pivot: AgentId,
    pub j1: AgentId,
    pub j2: AgentId,
    pub j3: AgentId,
    pub j4: AgentId,
    /// The path; `s.len() == 3 * c`.
    pub s: Vec<AgentId>,
    pub c: usize,
    /// Zero when no earlier block qualified; otherwise 1-based block index.
    pub b: usize,
    pub z1: Option<AgentId>,
    pub z2: Option<AgentId>,
    pub y1: Option<AgentId>,
    pub y2: Option<AgentId>,
    pub w1: Option<AgentId>,
    pub z3_witness: Option<AgentId>,
    /// Utility of every agent in the input matching.
    pub l1: Vec<i64>,
    /// Lowest zero-utility neighbour of every agent, excluding the pivot.
    pub l2: Vec<Option<AgentId>>,
    /// 0-based position of every agent in `s`.
    pub l_s: Vec<Option<usize>>,
    /// Iterations of the main loop.
    pub iterations: usize,
}

impl RepairContext {
    /// `S_p` for 1-based `p`.
    fn at(&self, p: usize) -> Result<AgentId> {
        p.checked_sub(1)
            .and_then(|i| self.s.get(i).copied())
            .ok_or_else(|| invariant(format!("S position {p} out of range (|S| = {})", self.s.len())))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RepairTrace {
    pub matching: Matching,
    pub case: RepairCase,
    pub context: RepairContext,
}

fn invariant(msg: impl Into<String>) -> Error {
    Error::RepairInvariant(msg.into())
}

fn check_preconditions(inst: &Instance, m: &Matching) -> Result<()> {
    inst.require_mode(Mode::BinarySymmetric)?;
    if m.n() != inst.n() {
        return Err(Error::InvalidMatching(format!(
            "matching is over {} agents, instance has {}",
            m.n(),
            inst.n()
        )));
    }
    if let Some(t) = find_triangle(inst, None)? {
        return Err(Error::NotTriangleFree(t));
    }
    let util = utilities(inst, m)?;
    if let Some(a) = (0..inst.n()).find(|&a| m.is_matched(a) && util[a] == 0) {
        return Err(Error::NotPMatching(a));
    }
    Ok(())
}

/// Whether `blocker` has the shape `{pivot, j1, j2}` relative to `pivot`.
fn fits_pivot(inst: &Instance, util: &[i64], blocker: &Triple, pivot: AgentId) -> bool {
    let Some([p, q]) = blocker.others(pivot) else {
        return false;
    };
    let shaped = |j1: AgentId, j2: AgentId| {
        util[j1] == 1 && util[j2] == 0 && inst.val(pivot, j1) == 1 && inst.val(j1, j2) == 1
    };
    util[pivot] == 0 && (shaped(p, q) || shaped(q, p))
}

/// The pivot of a repairable matching, or `None` if `m` is stable or not repairable.
///
/// In a blocker `{i, j1, j2}` the roles of `i` and `j2` are symmetric, so two
/// agents can qualify; the lower id is returned. Cubic time.
pub fn is_repairable(inst: &Instance, m: &Matching) -> Result<Option<AgentId>> {
    check_preconditions(inst, m)?;
    let blockers = blocking_triples(inst, m)?;
    let Some(first) = blockers.first() else {
        return Ok(None);
    };
    let util = utilities(inst, m)?;
    Ok(first
        .members()
        .into_iter()
        .find(|&i| blockers.iter().all(|t| fits_pivot(inst, &util, t, i))))
}

/// Repairs `m` around `pivot`. Structural invariants are checked; the
/// repairable precondition is not (see [`repair_checked`]).
pub fn repair(inst: &Instance, m: &Matching, pivot: AgentId) -> Result<Matching> {
    Ok(trace_repair(inst, m, pivot)?.matching)
}

/// As [`repair`], additionally reporting the case taken and the final state.
pub fn trace_repair(inst: &Instance, m: &Matching, pivot: AgentId) -> Result<RepairTrace> {
    inst.require_mode(Mode::BinarySymmetric)?;
    inst.check_agent(pivot)?;
    if !is_p_matching(inst, m)? {
        let a = (0..inst.n())
            .find(|&a| m.is_matched(a) && raw_utility(inst, m, a) == 0)
            .expect("some matched agent has zero utility");
        return Err(Error::NotPMatching(a));
    }
    let active = vec![true; inst.n()];
    repair_within(inst, &active, m, pivot)
}

/// As [`trace_repair`], but first verifies that `m` is repairable with this
/// pivot and afterwards that the output is a stable P-matching.
pub fn repair_checked(inst: &Instance, m: &Matching, pivot: AgentId) -> Result<RepairTrace> {
    check_preconditions(inst, m)?;
    inst.check_agent(pivot)?;
    let util = utilities(inst, m)?;
    let blockers = blocking_triples(inst, m)?;
    if blockers.is_empty() || !blockers.iter().all(|t| fits_pivot(inst, &util, t, pivot)) {
        return Err(Error::NotRepairable);
    }
    let trace = trace_repair(inst, m, pivot)?;
    if !is_p_matching(inst, &trace.matching)? {
        return Err(invariant("output is not a P-matching"));
    }
    if !is_stable(inst, &trace.matching)? {
        return Err(invariant("output is not stable"));
    }
    Ok(trace)
}

/// Lowest active agent in `candidates` passing `keep`.
fn lowest(
    candidates: &[AgentId],
    active: &[bool],
    keep: impl Fn(AgentId) -> bool,
) -> Option<AgentId> {
    candidates.iter().copied().find(|&q| active[q] && keep(q))
}

/// Partners of a utility-1 agent, centre (utility 2) first.
fn split_path_triple(m: &Matching, l1: &[i64], end: AgentId) -> Result<(AgentId, AgentId)> {
    let [x, y] = m
        .partners(end)
        .ok_or_else(|| invariant(format!("agent {end} with utility 1 is unmatched")))?;
    if l1[x] == 2 {
        Ok((x, y))
    } else if l1[y] == 2 {
        Ok((y, x))
    } else {
        Err(invariant(format!("triple of agent {end} has no utility-2 centre")))
    }
}

/// Repair restricted to the agents marked in `active`; inactive agents are
/// treated as absent and must be unmatched in `m`.
pub(crate) fn repair_within(
    inst: &Instance,
    active: &[bool],
    m: &Matching,
    pivot: AgentId,
) -> Result<RepairTrace> {
    let n = inst.n();
    if !active[pivot] {
        return Err(invariant(format!("pivot {pivot} is not active")));
    }
    let l1: Vec<i64> = (0..n).map(|a| raw_utility(inst, m, a)).collect();
    if l1[pivot] != 0 {
        return Err(invariant(format!("pivot {pivot} has utility {}", l1[pivot])));
    }
    let zero = |q: AgentId| l1[q] == 0;
    let l2: Vec<Option<AgentId>> = (0..n)
        .map(|p| {
            if active[p] {
                lowest(inst.neighbors(p), active, |q| q != pivot && zero(q))
            } else {
                None
            }
        })
        .collect();

    let j1 = lowest(inst.neighbors(pivot), active, |p| l1[p] == 1 && l2[p].is_some())
        .ok_or_else(|| invariant(format!("no blocking triple contains pivot {pivot}")))?;
    let j2 = l2[j1].expect("j1 was chosen with a witness");
    let (j3, j4) = split_path_triple(m, &l1, j1)?;

    let mut cx = RepairContext {
        pivot,
        j1,
        j2,
        j3,
        j4,
        s: vec![j1, j3, j4],
        c: 1,
        b: 0,
        z1: None,
        z2: None,
        y1: None,
        y2: None,
        w1: None,
        z3_witness: None,
        l1: l1.clone(),
        l2: l2.clone(),
        l_s: vec![None; n],
        iterations: 0,
    };
    for (k, &a) in cx.s.iter().enumerate() {
        cx.l_s[a] = Some(k);
    }

    let max_iterations = n.saturating_sub(2) / 3;
    loop {
        cx.iterations += 1;
        if cx.iterations > max_iterations.max(1) {
            return Err(invariant("main loop exceeded its iteration bound"));
        }
        let c = cx.c;
        let middle = cx.at(3 * c - 1)?;
        let last = cx.at(3 * c)?;

        cx.z1 = lowest(inst.neighbors(middle), active, |q| q != pivot && zero(q));
        cx.z2 = lowest(inst.neighbors(last), active, |q| q != pivot && q != j2 && zero(q));
        cx.y1 = if inst.val(last, pivot) == 1 {
            lowest(inst.neighbors(pivot), active, zero)
        } else {
            None
        };
        cx.y2 = if inst.val(last, j2) == 1 {
            lowest(inst.neighbors(j2), active, zero)
        } else {
            None
        };
        cx.b = 0;
        for b in 1..c {
            let sb = cx.at(3 * b)?;
            if inst.val(sb, j2) == 1 && inst.val(last, sb) == 1 {
                cx.b = b;
                break;
            }
        }
        cx.w1 = lowest(inst.neighbors(last), active, |q| {
            l1[q] == 1 && cx.l_s[q].is_none() && l2[q].is_some()
        });
        cx.z3_witness = cx.w1.and_then(|w| l2[w]);

        let stop = cx.z1.is_some()
            || cx.z2.is_some()
            || cx.y1.is_some()
            || cx.y2.is_some()
            || cx.b > 0;
        let Some(w1) = cx.w1.filter(|_| !stop) else {
            break;
        };
        let (w2, w3) = split_path_triple(m, &l1, w1)?;
        for a in [w1, w2, w3] {
            if cx.l_s[a].is_some() {
                return Err(invariant(format!("agent {a} would enter S twice")));
            }
            cx.l_s[a] = Some(cx.s.len());
            cx.s.push(a);
        }
        cx.c += 1;
    }

    let (case, built) = build_cases(inst, active, &cx)?;
    let mut triples = built;
    triples.extend(
        m.triples()
            .iter()
            .filter(|t| t.members().iter().all(|&a| cx.l_s[a].is_none())),
    );
    let matching = Matching::new(n, triples).map_err(|e| invariant(e.to_string()))?;
    Ok(RepairTrace {
        matching,
        case,
        context: cx,
    })
}

fn triple(a: AgentId, b: AgentId, c: AgentId) -> Result<Triple> {
    Triple::new(a, b, c).map_err(|e| invariant(e.to_string()))
}

/// `{S_{3d-1}, S_{3d}, S_{3d+1}}` for `d` in `range`.
fn shifted_left(cx: &RepairContext, range: std::ops::Range<usize>) -> Result<Vec<Triple>> {
    range
        .map(|d| triple(cx.at(3 * d - 1)?, cx.at(3 * d)?, cx.at(3 * d + 1)?))
        .collect()
}

/// `{S_{3d}, S_{3d+1}, S_{3d+2}}` for `d` in `range`.
fn shifted_right(cx: &RepairContext, range: std::ops::Range<usize>) -> Result<Vec<Triple>> {
    range
        .map(|d| triple(cx.at(3 * d)?, cx.at(3 * d + 1)?, cx.at(3 * d + 2)?))
        .collect()
}

fn build_cases(
    inst: &Instance,
    active: &[bool],
    cx: &RepairContext,
) -> Result<(RepairCase, Vec<Triple>)> {
    let (i, j1, j2, j3, c) = (cx.pivot, cx.j1, cx.j2, cx.j3, cx.c);
    let zero_witness = |of: AgentId| {
        lowest(inst.neighbors(of), active, |q| q != i && q != j2 && cx.l1[q] == 0)
            .ok_or_else(|| invariant(format!("no zero-utility witness next to agent {of}")))
    };

    if let Some(z1) = cx.z1.filter(|&z| z != j2) {
        let mut out = vec![triple(i, j1, j2)?];
        out.extend(shifted_left(cx, 1..c)?);
        out.push(triple(z1, cx.at(3 * c - 1)?, cx.at(3 * c)?)?);
        return Ok((RepairCase::ZeroNeighbourOfMiddle, out));
    }
    if let Some(z2) = cx.z2 {
        let mut out = vec![triple(i, j1, j2)?];
        out.extend(shifted_left(cx, 1..c)?);
        out.push(triple(cx.at(3 * c - 1)?, cx.at(3 * c)?, z2)?);
        return Ok((RepairCase::ZeroNeighbourOfLast, out));
    }
    if cx.z1.is_some() {
        if c < 2 {
            return Err(invariant("j2 adjacent to j3 closes a triangle"));
        }
        let z4 = zero_witness(cx.at(3 * c - 2)?)?;
        let mut out = vec![triple(i, j1, j3)?];
        out.extend(shifted_right(cx, 1..c - 1)?);
        out.push(triple(cx.at(3 * c - 3)?, cx.at(3 * c - 2)?, z4)?);
        out.push(triple(cx.at(3 * c - 1)?, cx.at(3 * c)?, j2)?);
        return Ok((RepairCase::LoopBackToJ2, out));
    }
    if let Some(y1) = cx.y1 {
        let mut out = vec![triple(j2, j1, j3)?];
        out.extend(shifted_right(cx, 1..c)?);
        out.push(triple(cx.at(3 * c)?, i, y1)?);
        return Ok((RepairCase::PivotNeighbour, out));
    }
    if let Some(y2) = cx.y2 {
        let mut out = vec![triple(i, j1, j3)?];
        out.extend(shifted_right(cx, 1..c)?);
        out.push(triple(cx.at(3 * c)?, j2, y2)?);
        return Ok((RepairCase::J2Neighbour, out));
    }
    if cx.b > 0 {
        let b = cx.b;
        let z5 = zero_witness(cx.at(3 * b + 1)?)?;
        let mut out = vec![triple(i, j1, j3)?];
        out.extend(shifted_right(cx, 1..b)?);
        out.push(triple(z5, cx.at(3 * b + 1)?, cx.at(3 * b + 2)?)?);
        out.extend(shifted_right(cx, b + 1..c)?);
        out.push(triple(cx.at(3 * c)?, cx.at(3 * b)?, j2)?);
        return Ok((RepairCase::EarlierBlock, out));
    }
    if cx.w1.is_some() {
        return Err(invariant("main loop stopped without a stopping condition"));
    }
    let mut out = vec![triple(i, j1, j3)?];
    out.extend(shifted_right(cx, 1..c)?);
    Ok((RepairCase::DeadEnd, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, repair_case};
    use crate::model::utility_in_matching;
    use crate::oracle::{enumerate_matchings, EnumerationBudget, Sizes};

    fn arrays(m: &Matching) -> Vec<[AgentId; 3]> {
        m.to_arrays()
    }

    #[test]
    fn case_numbers_round_trip() {
        for (k, case) in RepairCase::ALL.iter().enumerate() {
            assert_eq!(case.number() as usize, k + 1);
            assert_eq!(RepairCase::from_number(case.number()), Some(*case));
        }
        assert_eq!(RepairCase::from_number(0), None);
        assert_eq!(RepairCase::from_number(8), None);
    }

    #[test]
    fn fixtures_take_their_case() {
        let expected: [&[[AgentId; 3]]; 7] = [
            &[[0, 1, 2], [3, 4, 5]],
            &[[0, 1, 2], [3, 4, 5]],
            &[[0, 1, 3], [2, 6, 7], [4, 5, 8]],
            &[[0, 4, 5], [1, 2, 3]],
            &[[0, 1, 3], [2, 4, 5]],
            &[[0, 1, 3], [2, 4, 7], [5, 6, 8]],
            &[[0, 1, 3]],
        ];
        for k in 1..=7u8 {
            let fx = repair_case(k).unwrap();
            assert_eq!(is_repairable(&fx.instance, &fx.matching).unwrap(), Some(0));
            let trace = repair_checked(&fx.instance, &fx.matching, fx.pivot).unwrap();
            assert_eq!(trace.case.number(), k, "fixture {k}");
            assert_eq!(arrays(&trace.matching), expected[k as usize - 1], "fixture {k}");
        }
    }

    #[test]
    fn small_examples() {
        let fx = repair_case(1).unwrap();
        let t = trace_repair(&fx.instance, &fx.matching, 0).unwrap();
        assert_eq!(t.context.z1, Some(5));
        assert_eq!((t.context.j1, t.context.j2, t.context.j3, t.context.j4), (1, 2, 3, 4));

        let fx = repair_case(2).unwrap();
        let t = trace_repair(&fx.instance, &fx.matching, 0).unwrap();
        assert_eq!((t.context.z1, t.context.z2), (None, Some(5)));

        let fx = repair_case(7).unwrap();
        let t = trace_repair(&fx.instance, &fx.matching, 0).unwrap();
        assert!(!t.matching.is_matched(2) && !t.matching.is_matched(4));
        assert_eq!(t.context.s, vec![1, 3, 4]);
    }

    #[test]
    fn pivot_gets_positive_utility() {
        for k in 1..=7u8 {
            let fx = repair_case(k).unwrap();
            let t = trace_repair(&fx.instance, &fx.matching, 0).unwrap();
            let u = utility_in_matching(&fx.instance, &t.matching, 0).unwrap();
            assert!(u >= 1);
            if t.case == RepairCase::PivotNeighbour {
                assert_eq!(u, 2);
            }
        }
    }

    #[test]
    fn not_repairable_inputs() {
        let p3 = fixtures::p3();
        assert_eq!(is_repairable(&p3, &Matching::empty(3)).unwrap(), None);
        let full = Matching::from_arrays(3, &[[0, 1, 2]]).unwrap();
        assert_eq!(is_repairable(&p3, &full).unwrap(), None);
        assert!(matches!(
            is_repairable(&fixtures::t3(), &Matching::empty(3)),
            Err(Error::NotTriangleFree(_))
        ));
        let e3 = fixtures::e3();
        assert!(matches!(is_repairable(&e3, &full), Err(Error::NotPMatching(0))));
        assert!(matches!(
            is_repairable(&fixtures::directed_3_cycle(), &Matching::empty(3)),
            Err(Error::WrongMode { .. })
        ));
        assert_eq!(
            repair_checked(&p3, &Matching::empty(3), 0).unwrap_err(),
            Error::NotRepairable
        );
    }

    #[test]
    fn bad_input_is_reported_not_mangled() {
        // agent 5 has no utility-1 neighbour; agent 3 is matched
        let fx = repair_case(1).unwrap();
        assert!(matches!(
            repair(&fx.instance, &fx.matching, 5),
            Err(Error::RepairInvariant(_))
        ));
        assert!(matches!(
            repair(&fx.instance, &fx.matching, 3),
            Err(Error::RepairInvariant(_))
        ));
    }

    #[test]
    fn symmetric_pivot_resolves_to_lower_id() {
        // the single blocker {0,1,2} also fits 2 as pivot
        let fx = repair_case(7).unwrap();
        assert_eq!(is_repairable(&fx.instance, &fx.matching).unwrap(), Some(0));
        let t = repair_checked(&fx.instance, &fx.matching, 2).unwrap();
        assert!(is_stable(&fx.instance, &t.matching).unwrap());
    }

    /// Every repairable P-matching of random small triangle-free graphs,
    /// found by exhaustive enumeration, repairs to a stable P-matching.
    #[test]
    fn exhaustive_small_repairs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let budget = EnumerationBudget::default();
        let mut seen = std::collections::BTreeSet::new();
        let mut repaired = 0;
        for _ in 0..120 {
            let n = rng.gen_range(5..=9);
            let p = rng.gen_range(0.2..0.6);
            let mut edges: Vec<(AgentId, AgentId)> = Vec::new();
            for a in 0..n {
                for b in a + 1..n {
                    if rng.gen_bool(p) {
                        edges.push((a, b));
                        let inst = Instance::from_edges(n, &edges).unwrap();
                        if find_triangle(&inst, None).unwrap().is_some() {
                            edges.pop();
                        }
                    }
                }
            }
            let inst = Instance::from_edges(n, &edges).unwrap();
            for m in enumerate_matchings(n, Sizes::All, &budget).unwrap() {
                if !is_p_matching(&inst, &m).unwrap() {
                    continue;
                }
                if let Some(pivot) = is_repairable(&inst, &m).unwrap() {
                    let t = repair_checked(&inst, &m, pivot).unwrap();
                    seen.insert(t.case);
                    repaired += 1;
                }
            }
        }
        assert!(repaired > 100, "only {repaired} repairable inputs");
        assert!(seen.len() >= 5, "cases seen: {seen:?}");
    }
}
