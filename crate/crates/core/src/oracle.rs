//! Exhaustive ground truth for small instances.
//!
//! Everything here is exponential and guarded by an [`EnumerationBudget`].
//! Matchings are enumerated depth-first: the lowest undecided agent is first
//! left unmatched (when the size mode allows it), then grouped with every
//! pair of higher undecided agents in lexicographic order. That order is the
//! canonical order used for tie-breaking.

use crate::error::{Error, Result};
use crate::model::{blocks, is_stable, welfare, AgentId, Instance, Matching, Triple};

/// Environment variable overriding [`EnumerationBudget::max_agents`].
pub const BUDGET_ENV: &str = "STABLE_TRIPLES_ORACLE_MAX_AGENTS";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumerationBudget {
    /// Largest instance accepted when only maximum-size matchings are searched.
    pub max_agents: usize,
    /// Largest instance accepted when matchings of every size are searched.
    pub max_agents_all_sizes: usize,
    /// Refuse plain enumerations that would produce more matchings than this.
    pub max_matchings: u128,
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        EnumerationBudget {
            max_agents: 15,
            max_agents_all_sizes: 12,
            max_matchings: 2_000_000,
        }
    }
}

impl EnumerationBudget {
    /// The default budget, with `max_agents` read from [`BUDGET_ENV`] if set.
    pub fn from_env() -> Self {
        let mut budget = EnumerationBudget::default();
        if let Some(cap) = std::env::var(BUDGET_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
        {
            budget.max_agents = cap;
            budget.max_agents_all_sizes = budget.max_agents_all_sizes.min(cap);
        }
        budget
    }

    fn cap(&self, sizes: Sizes) -> usize {
        match sizes {
            Sizes::MaximumOnly => self.max_agents,
            Sizes::All => self.max_agents_all_sizes,
        }
    }

    fn admit(&self, n: usize, sizes: Sizes) -> Result<()> {
        let cap = self.cap(sizes);
        if n > cap {
            return Err(Error::BudgetExceeded(format!(
                "{n} agents exceeds the cap of {cap} for {sizes:?} enumeration"
            )));
        }
        Ok(())
    }
}

/// Which matchings an enumeration visits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sizes {
    /// Every matching, including the empty one.
    All,
    /// Only matchings with `floor(n / 3)` triples.
    MaximumOnly,
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// Number of ways to split `3k` agents into `k` unordered triples: `(3k)! / (k! 6^k)`.
fn full_partitions(k: u128) -> u128 {
    // product over the lowest free agent choosing its two partners
    (0..k).fold(1u128, |acc, i| {
        let free = 3 * (k - i);
        acc * binomial(free - 1, 2)
    })
}

/// Closed-form count of the matchings [`enumerate_matchings`] yields.
pub fn count_matchings(n: usize, sizes: Sizes) -> u128 {
    let n = n as u128;
    match sizes {
        Sizes::MaximumOnly => {
            let k = n / 3;
            binomial(n, n - 3 * k) * full_partitions(k)
        }
        Sizes::All => (0..=n / 3)
            .map(|k| binomial(n, 3 * k) * full_partitions(k))
            .sum(),
    }
}

/// Streams every matching over `n` agents exactly once, in canonical order.
pub fn enumerate_matchings(
    n: usize,
    sizes: Sizes,
    budget: &EnumerationBudget,
) -> Result<MatchingEnumerator> {
    budget.admit(n, sizes)?;
    let count = count_matchings(n, sizes);
    if count > budget.max_matchings {
        return Err(Error::BudgetExceeded(format!(
            "{count} matchings exceeds the cap of {}",
            budget.max_matchings
        )));
    }
    Ok(MatchingEnumerator::new(n, sizes))
}

#[derive(Clone, Copy, Debug)]
enum Choice {
    Start,
    Unmatched,
    Pair(AgentId, AgentId),
}

#[derive(Debug)]
struct Frame {
    agent: AgentId,
    choice: Choice,
}

/// Iterative depth-first enumerator over matchings; see [`enumerate_matchings`].
#[derive(Debug)]
pub struct MatchingEnumerator {
    n: usize,
    decided: Vec<bool>,
    leftover: usize,
    triples: Vec<Triple>,
    stack: Vec<Frame>,
    descend: bool,
    done: bool,
}

impl MatchingEnumerator {
    fn new(n: usize, sizes: Sizes) -> Self {
        let leftover = match sizes {
            Sizes::All => usize::MAX,
            Sizes::MaximumOnly => n % 3,
        };
        MatchingEnumerator {
            n,
            decided: vec![false; n],
            leftover,
            triples: Vec::new(),
            stack: Vec::new(),
            descend: true,
            done: false,
        }
    }

    fn undo(&mut self, frame_agent: AgentId, choice: Choice) {
        match choice {
            Choice::Start => {}
            Choice::Unmatched => {
                self.decided[frame_agent] = false;
                self.leftover = self.leftover.wrapping_add(1);
            }
            Choice::Pair(b, c) => {
                self.decided[frame_agent] = false;
                self.decided[b] = false;
                self.decided[c] = false;
                self.triples.pop();
            }
        }
    }

    fn next_pair(&self, a: AgentId, after: Option<(AgentId, AgentId)>) -> Option<(AgentId, AgentId)> {
        let n = self.n;
        let (mut b, mut c) = match after {
            None => (a + 1, a + 2),
            Some((b, c)) => (b, c + 1),
        };
        while b < n {
            if !self.decided[b] {
                while c < n {
                    if !self.decided[c] {
                        return Some((b, c));
                    }
                    c += 1;
                }
            }
            b += 1;
            c = b + 1;
        }
        None
    }

    fn advance(&mut self, a: AgentId, previous: Choice) -> Option<Choice> {
        let after = match previous {
            Choice::Start => {
                if self.leftover > 0 {
                    return Some(Choice::Unmatched);
                }
                None
            }
            Choice::Unmatched => None,
            Choice::Pair(b, c) => Some((b, c)),
        };
        self.next_pair(a, after).map(|(b, c)| Choice::Pair(b, c))
    }

    fn apply(&mut self, a: AgentId, choice: Choice) {
        match choice {
            Choice::Start => {}
            Choice::Unmatched => {
                self.decided[a] = true;
                self.leftover = self.leftover.wrapping_sub(1);
            }
            Choice::Pair(b, c) => {
                self.decided[a] = true;
                self.decided[b] = true;
                self.decided[c] = true;
                self.triples.push(Triple::new(a, b, c).expect("distinct agents"));
            }
        }
    }
}

impl Iterator for MatchingEnumerator {
    type Item = Matching;

    fn next(&mut self) -> Option<Matching> {
        if self.done {
            return None;
        }
        loop {
            if self.descend {
                match self.decided.iter().position(|&d| !d) {
                    None => {
                        self.descend = false;
                        return Some(
                            Matching::new(self.n, self.triples.iter().copied())
                                .expect("enumerated triples are disjoint"),
                        );
                    }
                    Some(a) => self.stack.push(Frame {
                        agent: a,
                        choice: Choice::Start,
                    }),
                }
            }
            let Some(frame) = self.stack.last() else {
                self.done = true;
                return None;
            };
            let (a, prev) = (frame.agent, frame.choice);
            self.undo(a, prev);
            match self.advance(a, prev) {
                Some(choice) => {
                    self.apply(a, choice);
                    self.stack.last_mut().unwrap().choice = choice;
                    self.descend = true;
                }
                None => {
                    self.stack.pop();
                    self.descend = false;
                }
            }
        }
    }
}

/// Every stable matching of every size, sorted canonically.
pub fn all_stable_matchings(inst: &Instance, budget: &EnumerationBudget) -> Result<Vec<Matching>> {
    let mut out = Vec::new();
    for m in enumerate_matchings(inst.n(), Sizes::All, budget)? {
        if is_stable(inst, &m)? {
            out.push(m);
        }
    }
    out.sort();
    Ok(out)
}

/// Depth-first search over matchings that discards a branch as soon as three
/// already-placed agents block it, or when its welfare bound cannot beat the
/// incumbent.
struct PrunedSearch<'a> {
    inst: &'a Instance,
    n: usize,
    decided: Vec<bool>,
    order: Vec<AgentId>,
    util: Vec<i64>,
    leftover: usize,
    triples: Vec<Triple>,
    bound: Vec<i64>,
    remaining_bound: i64,
    welfare: i64,
    maximize: bool,
    best: Option<(i64, Vec<Triple>)>,
}

impl<'a> PrunedSearch<'a> {
    fn new(inst: &'a Instance, sizes: Sizes, maximize: bool) -> Self {
        let n = inst.n();
        let bound: Vec<i64> = (0..n)
            .map(|a| {
                let mut vals: Vec<i64> = (0..n)
                    .filter(|&b| b != a)
                    .map(|b| inst.val(a, b) as i64)
                    .collect();
                vals.sort_unstable_by(|x, y| y.cmp(x));
                let pair = vals.iter().take(2).sum::<i64>();
                pair.max(0)
            })
            .collect();
        let remaining_bound = bound.iter().sum();
        PrunedSearch {
            inst,
            n,
            decided: vec![false; n],
            order: Vec::with_capacity(n),
            util: vec![0; n],
            leftover: match sizes {
                Sizes::All => usize::MAX,
                Sizes::MaximumOnly => n % 3,
            },
            triples: Vec::new(),
            bound,
            remaining_bound,
            welfare: 0,
            maximize,
            best: None,
        }
    }

    /// Whether some triple of placed agents containing `fresh` blocks.
    fn creates_blocker(&self, fresh: &[AgentId]) -> bool {
        for (k, &x) in fresh.iter().enumerate() {
            for (i, &y) in self.order.iter().enumerate() {
                if fresh[..k].contains(&y) || y == x {
                    continue;
                }
                for &z in &self.order[i + 1..] {
                    if z == x || fresh[..k].contains(&z) {
                        continue;
                    }
                    if blocks(self.inst, &self.util, x, y, z) {
                        return true;
                    }
                }
            }
        }
        false
    }

    /// Returns true when the search should stop.
    fn run(&mut self) -> bool {
        if self.maximize {
            if let Some((best, _)) = &self.best {
                if self.welfare + self.remaining_bound <= *best {
                    return false;
                }
            }
        }
        let Some(a) = (0..self.n).find(|&a| !self.decided[a]) else {
            let better = match &self.best {
                None => true,
                Some((w, _)) => self.welfare > *w,
            };
            if better {
                self.best = Some((self.welfare, self.triples.clone()));
            }
            return !self.maximize;
        };

        if self.leftover > 0 {
            self.decided[a] = true;
            self.leftover = self.leftover.wrapping_sub(1);
            self.order.push(a);
            self.remaining_bound -= self.bound[a];
            let stop = !self.creates_blocker(&[a]) && self.run();
            self.remaining_bound += self.bound[a];
            self.order.pop();
            self.leftover = self.leftover.wrapping_add(1);
            self.decided[a] = false;
            if stop {
                return true;
            }
        }

        for b in a + 1..self.n {
            if self.decided[b] {
                continue;
            }
            for c in b + 1..self.n {
                if self.decided[c] {
                    continue;
                }
                let (ua, ub, uc) = (
                    self.inst.pair_utility(a, b, c),
                    self.inst.pair_utility(b, a, c),
                    self.inst.pair_utility(c, a, b),
                );
                for (x, u) in [(a, ua), (b, ub), (c, uc)] {
                    self.decided[x] = true;
                    self.util[x] = u;
                    self.order.push(x);
                    self.remaining_bound -= self.bound[x];
                }
                self.welfare += ua + ub + uc;
                self.triples.push(Triple::new(a, b, c).expect("distinct"));
                let stop = !self.creates_blocker(&[a, b, c]) && self.run();
                self.triples.pop();
                self.welfare -= ua + ub + uc;
                for x in [c, b, a] {
                    self.decided[x] = false;
                    self.util[x] = 0;
                    self.order.pop();
                    self.remaining_bound += self.bound[x];
                }
                if stop {
                    return true;
                }
            }
        }
        false
    }
}

/// Sizes over which a stable matching can be looked for without loss of
/// generality: completing a stable matching only raises utilities when no
/// valuation is negative.
fn search_sizes(inst: &Instance) -> Sizes {
    if inst.is_nonnegative() {
        Sizes::MaximumOnly
    } else {
        Sizes::All
    }
}

/// Some stable matching, or `None` if the instance admits none.
pub fn find_any_stable(inst: &Instance, budget: &EnumerationBudget) -> Result<Option<Matching>> {
    let sizes = search_sizes(inst);
    budget.admit(inst.n(), sizes)?;
    let mut search = PrunedSearch::new(inst, sizes, false);
    search.run();
    Ok(search
        .best
        .map(|(_, ts)| Matching::new(inst.n(), ts).expect("disjoint")))
}

/// Whether the instance admits a stable matching.
pub fn exists_stable(inst: &Instance, budget: &EnumerationBudget) -> Result<bool> {
    Ok(find_any_stable(inst, budget)?.is_some())
}

/// A stable matching of maximum utilitarian welfare and that welfare.
///
/// Among optimal matchings, the first in enumeration order is returned.
pub fn max_uw_stable(inst: &Instance, budget: &EnumerationBudget) -> Result<(Matching, i64)> {
    let sizes = search_sizes(inst);
    budget.admit(inst.n(), sizes)?;
    let mut search = PrunedSearch::new(inst, sizes, true);
    search.run();
    let (w, ts) = search.best.ok_or(Error::NoStableMatching)?;
    let m = Matching::new(inst.n(), ts).expect("disjoint");
    debug_assert_eq!(welfare(inst, &m).map(|r| r.total), Ok(w));
    Ok((m, w))
}

/// Largest number of disjoint unit-valued pairs inside `subset`, by exhaustive search.
///
/// Pairs need `val[p][q] != 0` in either direction, which for binary-symmetric
/// instances is the underlying graph.
pub fn max_pair_matching_bruteforce(inst: &Instance, subset: &[AgentId]) -> Result<usize> {
    const CAP: usize = 16;
    if subset.len() > CAP {
        return Err(Error::BudgetExceeded(format!(
            "{} vertices exceeds the brute-force pair matching cap of {CAP}",
            subset.len()
        )));
    }
    for &a in subset {
        inst.check_agent(a)?;
    }
    let k = subset.len();
    let adjacent = |x: usize, y: usize| {
        inst.val(subset[x], subset[y]) != 0 || inst.val(subset[y], subset[x]) != 0
    };
    fn go(free: u32, k: usize, adjacent: &dyn Fn(usize, usize) -> bool) -> usize {
        if free == 0 {
            return 0;
        }
        let x = free.trailing_zeros() as usize;
        let rest = free & !(1 << x);
        let mut best = go(rest, k, adjacent);
        for y in x + 1..k {
            if rest & (1 << y) != 0 && adjacent(x, y) {
                best = best.max(1 + go(rest & !(1 << y), k, adjacent));
            }
        }
        best
    }
    let all = if k == 0 { 0 } else { (1u32 << k) - 1 };
    Ok(go(all, k, &adjacent))
}
