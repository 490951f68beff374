//! Instances, triples, matchings and the stability predicates over them.
//!
//! Agents are dense 0-based indices. An agent written `α_k` in 1-based
//! notation is agent `k - 1` here.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of an agent in `0..n`.
pub type AgentId = usize;

/// Restriction that an instance's valuations satisfy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Valuations in `{0, 1}` with `val[i][j] == val[j][i]`.
    BinarySymmetric,
    /// Valuations in `{0, 1}`.
    Binary,
    /// Arbitrary integer valuations.
    General,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::BinarySymmetric => "binary-symmetric",
            Mode::Binary => "binary",
            Mode::General => "general",
        }
    }

    pub fn is_binary(self) -> bool {
        !matches!(self, Mode::General)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "binary-symmetric" => Ok(Mode::BinarySymmetric),
            "binary" => Ok(Mode::Binary),
            "general" => Ok(Mode::General),
            other => Err(format!("unknown mode `{other}`")),
        }
    }
}

/// A set of agents together with every agent's valuation of every other agent.
///
/// The table is dense; `val(i, i)` is stored as zero and never consulted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    n: usize,
    mode: Mode,
    val: Vec<i32>,
    neighbors: Vec<Vec<AgentId>>,
}

impl Instance {
    /// Builds an instance from a row-major `n * n` table, validating it against `mode`.
    pub fn from_table(n: usize, mode: Mode, mut val: Vec<i32>) -> Result<Self> {
        if val.len() != n * n {
            return Err(Error::InvalidInstance(format!(
                "table has {} entries, expected {}",
                val.len(),
                n * n
            )));
        }
        for i in 0..n {
            val[i * n + i] = 0;
        }
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let v = val[i * n + j];
                if mode.is_binary() && v != 0 && v != 1 {
                    return Err(Error::InvalidInstance(format!(
                        "val[{i}][{j}] = {v} in {mode} mode"
                    )));
                }
                if mode == Mode::BinarySymmetric && v != val[j * n + i] {
                    return Err(Error::InvalidInstance(format!(
                        "val[{i}][{j}] != val[{j}][{i}] in {mode} mode"
                    )));
                }
            }
        }
        let neighbors = (0..n)
            .map(|i| (0..n).filter(|&j| j != i && val[i * n + j] != 0).collect())
            .collect();
        Ok(Instance {
            n,
            mode,
            val,
            neighbors,
        })
    }

    /// A binary-symmetric instance whose underlying graph has the given edges.
    pub fn from_edges(n: usize, edges: &[(AgentId, AgentId)]) -> Result<Self> {
        let mut val = vec![0; n * n];
        for &(a, b) in edges {
            check_pair(n, a, b)?;
            val[a * n + b] = 1;
            val[b * n + a] = 1;
        }
        Instance::from_table(n, Mode::BinarySymmetric, val)
    }

    /// An instance given by its nonzero arcs `(from, to, value)`.
    pub fn from_arcs(n: usize, mode: Mode, arcs: &[(AgentId, AgentId, i32)]) -> Result<Self> {
        let mut val = vec![0; n * n];
        for &(a, b, v) in arcs {
            check_pair(n, a, b)?;
            val[a * n + b] = v;
        }
        Instance::from_table(n, mode, val)
    }

    /// An instance over `n` agents with all valuations zero.
    pub fn edgeless(n: usize) -> Self {
        Instance::from_table(n, Mode::BinarySymmetric, vec![0; n * n]).expect("zero table is valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// `a`'s valuation of `b`.
    #[inline]
    pub fn val(&self, a: AgentId, b: AgentId) -> i32 {
        self.val[a * self.n + b]
    }

    /// Agents that `a` values nonzero, in ascending order.
    #[inline]
    pub fn neighbors(&self, a: AgentId) -> &[AgentId] {
        &self.neighbors[a]
    }

    pub fn check_agent(&self, a: AgentId) -> Result<()> {
        if a < self.n {
            Ok(())
        } else {
            Err(Error::InvalidAgent { id: a, n: self.n })
        }
    }

    pub fn require_mode(&self, expected: Mode) -> Result<()> {
        if self.mode == expected {
            Ok(())
        } else {
            Err(Error::WrongMode {
                expected,
                found: self.mode,
            })
        }
    }

    /// Whether every valuation is nonnegative.
    pub fn is_nonnegative(&self) -> bool {
        self.val.iter().all(|&v| v >= 0)
    }

    /// Undirected unit edges `(a, b)` with `a < b` of a binary-symmetric instance.
    pub fn edges(&self) -> Vec<(AgentId, AgentId)> {
        (0..self.n)
            .flat_map(|a| {
                self.neighbors[a]
                    .iter()
                    .filter(move |&&b| b > a)
                    .map(move |&b| (a, b))
            })
            .collect()
    }

    /// All nonzero arcs `(from, to, value)` in row-major order.
    pub fn arcs(&self) -> Vec<(AgentId, AgentId, i32)> {
        (0..self.n)
            .flat_map(|a| self.neighbors[a].iter().map(move |&b| (a, b, self.val(a, b))))
            .collect()
    }

    /// The sub-instance induced by `agents`; agent `agents[k]` becomes agent `k`.
    pub fn induced(&self, agents: &[AgentId]) -> Result<Instance> {
        let m = agents.len();
        let mut val = vec![0; m * m];
        for (x, &a) in agents.iter().enumerate() {
            self.check_agent(a)?;
            for (y, &b) in agents.iter().enumerate() {
                if x != y {
                    val[x * m + y] = self.val(a, b);
                }
            }
        }
        Instance::from_table(m, self.mode, val)
    }

    /// Utility of `a` for being grouped with `b` and `c`.
    #[inline]
    pub(crate) fn pair_utility(&self, a: AgentId, b: AgentId, c: AgentId) -> i64 {
        self.val(a, b) as i64 + self.val(a, c) as i64
    }
}

fn check_pair(n: usize, a: AgentId, b: AgentId) -> Result<()> {
    if a >= n {
        return Err(Error::InvalidAgent { id: a, n });
    }
    if b >= n {
        return Err(Error::InvalidAgent { id: b, n });
    }
    if a == b {
        return Err(Error::InvalidInstance(format!("self-valuation of agent {a}")));
    }
    Ok(())
}

/// Three distinct agents, stored sorted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "[AgentId; 3]", into = "[AgentId; 3]")]
pub struct Triple([AgentId; 3]);

impl Triple {
    pub fn new(a: AgentId, b: AgentId, c: AgentId) -> Result<Self> {
        if a == b || b == c || a == c {
            return Err(Error::InvalidMatching(format!(
                "triple ({a}, {b}, {c}) repeats an agent"
            )));
        }
        let mut m = [a, b, c];
        m.sort_unstable();
        Ok(Triple(m))
    }

    pub fn members(&self) -> [AgentId; 3] {
        self.0
    }

    pub fn contains(&self, a: AgentId) -> bool {
        self.0.contains(&a)
    }

    /// The two members other than `a`, or `None` if `a` is not a member.
    pub fn others(&self, a: AgentId) -> Option<[AgentId; 2]> {
        let [x, y, z] = self.0;
        if a == x {
            Some([y, z])
        } else if a == y {
            Some([x, z])
        } else if a == z {
            Some([x, y])
        } else {
            None
        }
    }

    /// Sum of the members' utilities for the triple.
    pub fn welfare(&self, inst: &Instance) -> i64 {
        let [x, y, z] = self.0;
        inst.pair_utility(x, y, z) + inst.pair_utility(y, x, z) + inst.pair_utility(z, x, y)
    }
}

impl TryFrom<[AgentId; 3]> for Triple {
    type Error = Error;

    fn try_from(m: [AgentId; 3]) -> Result<Self> {
        Triple::new(m[0], m[1], m[2])
    }
}

impl From<Triple> for [AgentId; 3] {
    fn from(t: Triple) -> Self {
        t.0
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}, {}, {}}}", self.0[0], self.0[1], self.0[2])
    }
}

/// A set of pairwise-disjoint triples over `n` agents.
///
/// Triples are kept sorted, so two matchings over the same agents compare
/// equal exactly when they contain the same triples.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Matching {
    n: usize,
    triples: Vec<Triple>,
    assignment: Vec<Option<u32>>,
}

impl Matching {
    pub fn empty(n: usize) -> Self {
        Matching {
            n,
            triples: Vec::new(),
            assignment: vec![None; n],
        }
    }

    pub fn new(n: usize, triples: impl IntoIterator<Item = Triple>) -> Result<Self> {
        let mut triples: Vec<Triple> = triples.into_iter().collect();
        triples.sort_unstable();
        let mut assignment = vec![None; n];
        for (k, t) in triples.iter().enumerate() {
            for a in t.members() {
                if a >= n {
                    return Err(Error::InvalidAgent { id: a, n });
                }
                if assignment[a].is_some() {
                    return Err(Error::InvalidMatching(format!(
                        "agent {a} appears in more than one triple"
                    )));
                }
                assignment[a] = Some(k as u32);
            }
        }
        Ok(Matching {
            n,
            triples,
            assignment,
        })
    }

    /// Convenience constructor from raw member arrays.
    pub fn from_arrays(n: usize, triples: &[[AgentId; 3]]) -> Result<Self> {
        let ts = triples
            .iter()
            .map(|&m| Triple::try_from(m))
            .collect::<Result<Vec<_>>>()?;
        Matching::new(n, ts)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    pub fn triple_of(&self, a: AgentId) -> Option<Triple> {
        self.assignment
            .get(a)
            .copied()
            .flatten()
            .map(|k| self.triples[k as usize])
    }

    pub fn is_matched(&self, a: AgentId) -> bool {
        matches!(self.assignment.get(a), Some(Some(_)))
    }

    pub fn partners(&self, a: AgentId) -> Option<[AgentId; 2]> {
        self.triple_of(a).and_then(|t| t.others(a))
    }

    pub fn unmatched(&self) -> Vec<AgentId> {
        (0..self.n).filter(|&a| !self.is_matched(a)).collect()
    }

    /// Union with a matching over the same agents; fails if the two overlap.
    pub fn union(&self, other: &Matching) -> Result<Matching> {
        if self.n != other.n {
            return Err(Error::InvalidMatching(format!(
                "cannot join matchings over {} and {} agents",
                self.n, other.n
            )));
        }
        Matching::new(
            self.n,
            self.triples.iter().chain(other.triples.iter()).copied(),
        )
    }

    /// Member arrays of every triple, in canonical order.
    pub fn to_arrays(&self) -> Vec<[AgentId; 3]> {
        self.triples.iter().map(|t| t.members()).collect()
    }
}

impl PartialOrd for Matching {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Matching {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.n
            .cmp(&other.n)
            .then_with(|| self.triples.cmp(&other.triples))
    }
}

impl fmt::Display for Matching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, t) in self.triples.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{t}")?;
        }
        f.write_str("}")
    }
}

impl Serialize for Matching {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.triples.serialize(s)
    }
}

fn check_matching(inst: &Instance, m: &Matching) -> Result<()> {
    if inst.n() != m.n() {
        return Err(Error::InvalidMatching(format!(
            "matching is over {} agents, instance has {}",
            m.n(),
            inst.n()
        )));
    }
    Ok(())
}

/// `a`'s utility for a coalition; `a`'s own membership is ignored.
pub fn utility(inst: &Instance, a: AgentId, coalition: &[AgentId]) -> Result<i64> {
    inst.check_agent(a)?;
    let mut total = 0i64;
    for &x in coalition {
        inst.check_agent(x)?;
        if x != a {
            total += inst.val(a, x) as i64;
        }
    }
    Ok(total)
}

/// `a`'s utility for its triple in `m`, zero if unmatched.
pub fn utility_in_matching(inst: &Instance, m: &Matching, a: AgentId) -> Result<i64> {
    check_matching(inst, m)?;
    inst.check_agent(a)?;
    Ok(raw_utility(inst, m, a))
}

#[inline]
pub(crate) fn raw_utility(inst: &Instance, m: &Matching, a: AgentId) -> i64 {
    match m.partners(a) {
        Some([b, c]) => inst.pair_utility(a, b, c),
        None => 0,
    }
}

/// Every agent's utility in `m`.
pub fn utilities(inst: &Instance, m: &Matching) -> Result<Vec<i64>> {
    check_matching(inst, m)?;
    Ok((0..inst.n()).map(|a| raw_utility(inst, m, a)).collect())
}

/// Whether each member of `{x, y, z}` strictly prefers it to its current utility.
#[inline]
pub(crate) fn blocks(inst: &Instance, util: &[i64], x: AgentId, y: AgentId, z: AgentId) -> bool {
    inst.pair_utility(x, y, z) > util[x]
        && inst.pair_utility(y, x, z) > util[y]
        && inst.pair_utility(z, x, y) > util[z]
}

/// Lexicographically least blocking triple among agents allowed by `active`.
pub(crate) fn find_blocking_within(
    inst: &Instance,
    util: &[i64],
    active: Option<&[bool]>,
) -> Option<Triple> {
    let n = inst.n();
    let on = |a: AgentId| active.is_none_or(|mask| mask[a]);
    // Best value of any single partner and of any pair of partners, per agent.
    let mut top1 = vec![i64::MIN; n];
    let mut top_pair = vec![i64::MIN; n];
    for a in 0..n {
        let (mut best, mut second) = (i64::MIN, i64::MIN);
        for b in 0..n {
            if b == a || !on(b) {
                continue;
            }
            let v = inst.val(a, b) as i64;
            if v > best {
                second = best;
                best = v;
            } else if v > second {
                second = v;
            }
        }
        top1[a] = best;
        if second != i64::MIN {
            top_pair[a] = best + second;
        }
    }
    let could_gain = |a: AgentId| on(a) && top_pair[a] != i64::MIN && top_pair[a] > util[a];
    for x in 0..n {
        if !could_gain(x) {
            continue;
        }
        for y in x + 1..n {
            if !could_gain(y) {
                continue;
            }
            let vxy = inst.val(x, y) as i64;
            let vyx = inst.val(y, x) as i64;
            if vxy + top1[x] <= util[x] || vyx + top1[y] <= util[y] {
                continue;
            }
            for z in y + 1..n {
                if could_gain(z) && blocks(inst, util, x, y, z) {
                    return Some(Triple([x, y, z]));
                }
            }
        }
    }
    None
}

/// The lexicographically least triple blocking `m`, if any.
pub fn find_blocking_triple(inst: &Instance, m: &Matching) -> Result<Option<Triple>> {
    let util = utilities(inst, m)?;
    Ok(find_blocking_within(inst, &util, None))
}

/// Every triple blocking `m`, in lexicographic order. Cubic, for verification.
pub fn blocking_triples(inst: &Instance, m: &Matching) -> Result<Vec<Triple>> {
    let util = utilities(inst, m)?;
    let n = inst.n();
    let mut out = Vec::new();
    for x in 0..n {
        for y in x + 1..n {
            for z in y + 1..n {
                if blocks(inst, &util, x, y, z) {
                    out.push(Triple([x, y, z]));
                }
            }
        }
    }
    Ok(out)
}

pub fn is_stable(inst: &Instance, m: &Matching) -> Result<bool> {
    Ok(find_blocking_triple(inst, m)?.is_none())
}

/// Whether every matched agent has strictly positive utility.
pub fn is_p_matching(inst: &Instance, m: &Matching) -> Result<bool> {
    check_matching(inst, m)?;
    Ok((0..inst.n()).all(|a| !m.is_matched(a) || raw_utility(inst, m, a) > 0))
}

/// Groups unmatched agents, in ascending id order, into triples until fewer
/// than three remain. Existing triples are left untouched.
pub fn complete_matching(inst: &Instance, m: &Matching) -> Result<Matching> {
    check_matching(inst, m)?;
    let free = m.unmatched();
    let extra = free
        .chunks_exact(3)
        .map(|c| Triple([c[0], c[1], c[2]]))
        .collect::<Vec<_>>();
    Matching::new(m.n(), m.triples().iter().copied().chain(extra))
}

/// Utilitarian welfare of a matching, broken down per agent and per triple.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WelfareReport {
    pub total: i64,
    /// Number of triples with each welfare value. In binary-symmetric mode
    /// the keys 0, 2, 4 and 6 are always present.
    pub histogram: BTreeMap<i64, usize>,
    pub per_agent: Vec<i64>,
}

impl WelfareReport {
    pub fn count(&self, triple_welfare: i64) -> usize {
        self.histogram.get(&triple_welfare).copied().unwrap_or(0)
    }
}

pub fn welfare(inst: &Instance, m: &Matching) -> Result<WelfareReport> {
    let per_agent = utilities(inst, m)?;
    let mut histogram = BTreeMap::new();
    if inst.mode() == Mode::BinarySymmetric {
        for w in [0, 2, 4, 6] {
            histogram.insert(w, 0);
        }
    }
    for t in m.triples() {
        *histogram.entry(t.welfare(inst)).or_insert(0) += 1;
    }
    Ok(WelfareReport {
        total: per_agent.iter().sum(),
        histogram,
        per_agent,
    })
}
