//! Acceptance suite. Each test checks one criterion and prints a single
//! `[PASS]` or `[FAIL]` line straight to stdout, so the lines show up even
//! when libtest captures output.
//!
//! Stability is certified by the brute-force predicate below, written
//! against the raw valuation table and sharing no code with the library.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::sync::{Mutex, MutexGuard, OnceLock};
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use stable_triples::fixtures;
use stable_triples::generate::{generate, long_chain, random_instance, repair_case_min_n, Family, GeneratorConfig};
use stable_triples::hardness::{
    decode_stable_matching, encode_pit_solution, planted_pit, reduce_pit, validate_pit, PitInstance, ReductionMap,
};
use stable_triples::model::{is_p_matching, is_stable, Instance, Matching, Mode, Triple};
use stable_triples::oracle::{
    all_stable_matchings, exists_stable, max_pair_matching_bruteforce, max_uw_stable, EnumerationBudget,
};
use stable_triples::repair::{repair, repair_checked, trace_repair, RepairCase};
use stable_triples::solver::{find_stable, find_stable_with, SolverEvent, SolverOptions};
use stable_triples::welfare_approx::{find_stable_uw, maximum_2d_matching};

const PS: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];

static SERIAL: Mutex<()> = Mutex::new(());

/// Criteria run one at a time so the timing criterion is not disturbed.
fn serial() -> MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

fn report(id: &str, failures: &[String], detail: &str) {
    let ok = failures.is_empty();
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "[{}] {id}: {detail}", if ok { "PASS" } else { "FAIL" });
    for f in failures.iter().take(5) {
        let _ = writeln!(out, "       {f}");
    }
    let _ = out.flush();
    assert!(ok, "{id}: {} failures, first: {}", failures.len(), failures[0]);
}

// ---- brute-force reference ------------------------------------------------

fn brute_utilities(inst: &Instance, m: &Matching) -> Vec<i64> {
    let mut u = vec![0i64; inst.n()];
    for t in m.triples() {
        let [a, b, c] = t.members();
        u[a] = (inst.val(a, b) + inst.val(a, c)) as i64;
        u[b] = (inst.val(b, a) + inst.val(b, c)) as i64;
        u[c] = (inst.val(c, a) + inst.val(c, b)) as i64;
    }
    u
}

/// Every triple of agents in `agents` whose members all strictly gain.
fn brute_blockers(inst: &Instance, u: &[i64], agents: &[usize]) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for (x, &a) in agents.iter().enumerate() {
        for (y, &b) in agents.iter().enumerate().skip(x + 1) {
            for &c in &agents[y + 1..] {
                let ua = (inst.val(a, b) + inst.val(a, c)) as i64;
                let ub = (inst.val(b, a) + inst.val(b, c)) as i64;
                let uc = (inst.val(c, a) + inst.val(c, b)) as i64;
                if ua > u[a] && ub > u[b] && uc > u[c] {
                    out.push([a, b, c]);
                }
            }
        }
    }
    out
}

fn brute_stable_on(inst: &Instance, m: &Matching, agents: &[usize]) -> bool {
    brute_blockers(inst, &brute_utilities(inst, m), agents).is_empty()
}

fn brute_stable(inst: &Instance, m: &Matching) -> bool {
    let all: Vec<usize> = (0..inst.n()).collect();
    brute_stable_on(inst, m, &all)
}

fn brute_p_matching(inst: &Instance, m: &Matching) -> bool {
    let u = brute_utilities(inst, m);
    m.triples().iter().all(|t| t.members().iter().all(|&a| u[a] >= 1))
}

fn triple_welfares(inst: &Instance, m: &Matching) -> Vec<i64> {
    let u = brute_utilities(inst, m);
    m.triples().iter().map(|t| t.members().iter().map(|&a| u[a]).sum()).collect()
}

#[derive(Default)]
struct Tally {
    instances: usize,
    failures: Vec<String>,
    welfare_histogram: BTreeMap<i64, usize>,
}

impl Tally {
    fn merge(mut self, other: Tally) -> Tally {
        self.instances += other.instances;
        self.failures.extend(other.failures);
        for (k, v) in other.welfare_histogram {
            *self.welfare_histogram.entry(k).or_insert(0) += v;
        }
        self
    }

    fn one(failure: Option<String>, welfares: &[i64]) -> Tally {
        let mut t = Tally {
            instances: 1,
            failures: failure.into_iter().collect(),
            ..Tally::default()
        };
        for &w in welfares {
            *t.welfare_histogram.entry(w).or_insert(0) += 1;
        }
        t
    }
}

fn all_graphs_on_six() -> impl ParallelIterator<Item = (u32, Instance)> {
    let pairs: Vec<(usize, usize)> = (0..6).flat_map(|a| (a + 1..6).map(move |b| (a, b))).collect();
    (0u32..1 << 15).into_par_iter().map(move |mask| {
        let edges: Vec<_> = (0..15).filter(|k| mask >> k & 1 == 1).map(|k| pairs[k]).collect();
        (mask, Instance::from_edges(6, &edges).unwrap())
    })
}

/// `count` seeded binary-symmetric instances of size `n`, spread evenly over `PS`.
fn seeded_corpus(n: usize, count: usize, salt: u64) -> Vec<(u64, f64)> {
    (0..count)
        .map(|k| {
            let p = PS[k % PS.len()];
            (salt << 48 | (n as u64) << 24 | k as u64, p)
        })
        .collect()
}

fn symmetric(n: usize, p: f64, seed: u64) -> Instance {
    random_instance(n, p, Mode::BinarySymmetric, seed).unwrap()
}

// ---- AC1 -------------------------------------------------------------------

fn check_find_stable(label: &str, inst: &Instance) -> Tally {
    let m = match find_stable(inst, false) {
        Ok(m) => m,
        Err(e) => return Tally::one(Some(format!("{label}: {e}")), &[]),
    };
    let lib = is_stable(inst, &m).unwrap() && is_p_matching(inst, &m).unwrap();
    let brute = brute_stable(inst, &m) && brute_p_matching(inst, &m);
    let failure = (!(lib && brute)).then(|| format!("{label}: library {lib}, brute force {brute}"));
    Tally::one(failure, &triple_welfares(inst, &m))
}

fn ac1() -> &'static Tally {
    static RUN: OnceLock<Tally> = OnceLock::new();
    RUN.get_or_init(|| {
        let six = all_graphs_on_six()
            .map(|(mask, inst)| check_find_stable(&format!("n=6 mask {mask:#06x}"), &inst))
            .reduce(Tally::default, Tally::merge);
        let random = [9usize, 12, 15, 30, 60, 120]
            .into_par_iter()
            .flat_map(|n| seeded_corpus(n, 2000, 1).into_par_iter().map(move |(s, p)| (n, s, p)))
            .map(|(n, seed, p)| check_find_stable(&format!("n={n} p={p} seed={seed}"), &symmetric(n, p, seed)))
            .reduce(Tally::default, Tally::merge);
        six.merge(random)
    })
}

#[test]
fn ac1_existence_at_scale() {
    let _g = serial();
    let t = ac1();
    report(
        "AC1",
        &t.failures,
        &format!(
            "find_stable gave a stable P-matching on {} instances (all 32768 graphs at n=6, 2000 per n in 9..120)",
            t.instances - t.failures.len()
        ),
    );
}

// ---- AC2 -------------------------------------------------------------------

fn ac2() -> &'static Tally {
    static RUN: OnceLock<Tally> = OnceLock::new();
    RUN.get_or_init(|| {
        let budget = EnumerationBudget::default();
        let check = |label: String, inst: &Instance, membership: bool| -> Tally {
            if !exists_stable(inst, &budget).unwrap() {
                return Tally::one(Some(format!("{label}: oracle found no stable matching")), &[]);
            }
            let m = find_stable(inst, false).unwrap();
            let certified = brute_stable(inst, &m);
            let member = !membership || all_stable_matchings(inst, &budget).unwrap().contains(&m);
            let failure = (!(certified && member))
                .then(|| format!("{label}: certified {certified}, in oracle list {member}"));
            Tally::one(failure, &triple_welfares(inst, &m))
        };
        let six = all_graphs_on_six()
            .map(|(mask, inst)| check(format!("n=6 mask {mask:#06x}"), &inst, true))
            .reduce(Tally::default, Tally::merge);
        let random = [9usize, 12]
            .into_par_iter()
            .flat_map(|n| seeded_corpus(n, 500, 2).into_par_iter().map(move |(s, p)| (n, s, p)))
            .map(|(n, seed, p)| check(format!("n={n} p={p} seed={seed}"), &symmetric(n, p, seed), n == 9))
            .reduce(Tally::default, Tally::merge);
        six.merge(random)
    })
}

#[test]
fn ac2_oracle_agreement() {
    let _g = serial();
    let t = ac2();
    report(
        "AC2",
        &t.failures,
        &format!(
            "{} instances: oracle finds a stable matching and certifies find_stable's output \
             (membership in the full stable list at n <= 9)",
            t.instances
        ),
    );
}

// ---- AC3 -------------------------------------------------------------------

fn ac3() -> &'static Tally {
    static RUN: OnceLock<Tally> = OnceLock::new();
    RUN.get_or_init(|| {
        let budget = EnumerationBudget::default();
        let check = |label: String, inst: &Instance| -> Tally {
            let (m, r) = find_stable_uw(inst).unwrap();
            let (_, opt) = max_uw_stable(inst, &budget).unwrap();
            let stable = brute_stable(inst, &m);
            let failure = (!(stable && 2 * r.total >= opt))
                .then(|| format!("{label}: approx {} opt {opt} stable {stable}", r.total));
            Tally::one(failure, &triple_welfares(inst, &m))
        };
        let six = all_graphs_on_six()
            .map(|(mask, inst)| check(format!("n=6 mask {mask:#06x}"), &inst))
            .reduce(Tally::default, Tally::merge);
        let random = [9usize, 12, 15]
            .into_par_iter()
            .flat_map(|n| seeded_corpus(n, 500, 3).into_par_iter().map(move |(s, p)| (n, s, p)))
            .map(|(n, seed, p)| check(format!("n={n} p={p} seed={seed}"), &symmetric(n, p, seed)))
            .reduce(Tally::default, Tally::merge);
        six.merge(random)
    })
}

#[test]
fn ac3_two_approximation() {
    let _g = serial();
    let t = ac3();
    report(
        "AC3",
        &t.failures,
        &format!("2*u(find_stable_uw) >= max stable welfare on {} instances (all n=6, 500 per n in 9,12,15)", t.instances),
    );
}

// ---- AC4 -------------------------------------------------------------------

#[test]
fn ac4_tightness_fixture() {
    let _g = serial();
    let inst = fixtures::fig9();
    let budget = EnumerationBudget::default();
    let mut failures = Vec::new();

    // validate the reconstruction before trusting it
    let triangles: Vec<[usize; 3]> = (0..9)
        .flat_map(|a| (a + 1..9).flat_map(move |b| (b + 1..9).map(move |c| [a, b, c])))
        .filter(|&[a, b, c]| inst.val(a, b) == 1 && inst.val(b, c) == 1 && inst.val(a, c) == 1)
        .collect();
    if triangles != vec![[2, 4, 5]] {
        failures.push(format!("expected the single triangle {{2, 4, 5}}, found {triangles:?}"));
    }
    let opt_fixture = fixtures::fig9_optimum();
    let opt_welfare: i64 = brute_utilities(&inst, &opt_fixture).iter().sum();
    if opt_welfare != 12 || !brute_stable(&inst, &opt_fixture) {
        failures.push(format!("optimum fixture: welfare {opt_welfare}, stable {}", brute_stable(&inst, &opt_fixture)));
    }
    let (_, oracle_opt) = max_uw_stable(&inst, &budget).unwrap();
    if oracle_opt != 12 {
        failures.push(format!("oracle max welfare {oracle_opt}, expected 12"));
    }

    if failures.is_empty() {
        let (m, r) = find_stable_uw(&inst).unwrap();
        if r.total != 6 || !brute_stable(&inst, &m) {
            failures.push(format!("find_stable_uw welfare {} (expected 6), stable {}", r.total, brute_stable(&inst, &m)));
        }
    } else {
        failures.insert(0, "reconstruction rejected".into());
    }
    report("AC4", &failures, "fixture validated (one triangle, optimum 12); find_stable_uw = 6, oracle = 12");
}

// ---- AC5 -------------------------------------------------------------------

struct RepairRun {
    tally: Tally,
    cases: BTreeMap<u8, usize>,
    harvested: usize,
    harvested_cases: BTreeMap<u8, usize>,
}

fn check_repair_output(label: &str, inst: &Instance, out: &Matching, agents: &[usize]) -> Option<String> {
    let p = brute_p_matching(inst, out);
    let stable = brute_stable_on(inst, out, agents);
    (!(p && stable)).then(|| format!("{label}: output stable {stable}, P-matching {p}"))
}

fn ac5() -> &'static RepairRun {
    static RUN: OnceLock<RepairRun> = OnceLock::new();
    RUN.get_or_init(|| {
        let mut tally = Tally::default();
        let mut cases = BTreeMap::new();

        // targeted generator, minimal and padded
        for k in 1..=7u8 {
            let min = repair_case_min_n(k).unwrap();
            for n in [min, min + 1, min + 5] {
                let cfg = GeneratorConfig {
                    family: Family::RepairCase(k),
                    ..GeneratorConfig::random(n, 0.0, Mode::BinarySymmetric, 0)
                };
                let label = format!("repair-case {k} n={n}");
                let g = match generate(&cfg) {
                    Ok(g) => g,
                    Err(e) => {
                        tally = tally.merge(Tally::one(Some(format!("{label}: {e}")), &[]));
                        continue;
                    }
                };
                let m = g.matching.unwrap();
                let trace = trace_repair(&g.instance, &m, g.pivot.unwrap()).unwrap();
                let all: Vec<usize> = (0..n).collect();
                let mut failure = check_repair_output(&label, &g.instance, &trace.matching, &all);
                if trace.case.number() != k {
                    failure = Some(format!("{label}: took {}", trace.case));
                } else {
                    *cases.entry(k).or_insert(0) += 1;
                }
                tally = tally.merge(Tally::one(failure, &triple_welfares(&g.instance, &trace.matching)));
            }
        }
        for n in [6usize, 22, 102, 402] {
            let (inst, m) = long_chain(n).unwrap();
            let trace = repair_checked(&inst, &m, 0).unwrap();
            let all: Vec<usize> = (0..n).collect();
            let label = format!("long-chain n={n}");
            let mut failure = check_repair_output(&label, &inst, &trace.matching, &all);
            if trace.case != RepairCase::DeadEnd || trace.context.c != (n - 2) / 4 {
                failure = Some(format!("{label}: {} after {} triples", trace.case, trace.context.c));
            }
            tally = tally.merge(Tally::one(failure, &triple_welfares(&inst, &trace.matching)));
        }

        // repairs intercepted from solver runs
        let harvest = |seed: u64| -> (Tally, BTreeMap<u8, usize>) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(6..=36);
            let p = rng.gen_range(0.04..0.35);
            let inst = symmetric(n, p, rng.gen());
            let mut tally = Tally::default();
            let mut cases = BTreeMap::new();
            let mut observer = |e: &SolverEvent<'_>| {
                let SolverEvent::Repaired(ev) = e else { return };
                let agents: Vec<usize> = (0..n).filter(|&a| ev.active[a]).collect();
                let mut local = vec![usize::MAX; n];
                for (k, &a) in agents.iter().enumerate() {
                    local[a] = k;
                }
                let sub = inst.induced(&agents).unwrap();
                let map = |m: &Matching| {
                    let ts = m.triples().iter().map(|t| {
                        let [a, b, c] = t.members().map(|x| local[x]);
                        Triple::new(a, b, c).unwrap()
                    });
                    Matching::new(agents.len(), ts).unwrap()
                };
                let label = format!("seed {seed} pivot {}", ev.pivot);
                let sub_in = map(ev.input);
                let failure = match repair_checked(&sub, &sub_in, local[ev.pivot]) {
                    Err(e) => Some(format!("{label}: {e}")),
                    Ok(t) if t.case != ev.trace.case || t.matching != map(&ev.trace.matching) => {
                        Some(format!("{label}: standalone repair disagrees"))
                    }
                    Ok(_) => check_repair_output(&label, &inst, &ev.trace.matching, &agents),
                };
                *cases.entry(ev.trace.case.number()).or_insert(0) += 1;
                tally = std::mem::take(&mut tally)
                    .merge(Tally::one(failure, &triple_welfares(&inst, &ev.trace.matching)));
            };
            find_stable_with(&inst, false, &SolverOptions::default(), &mut observer).unwrap();
            (tally, cases)
        };
        let mut harvested = 0;
        let mut harvested_cases = BTreeMap::new();
        let mut next = 0u64;
        while harvested < 10_000 {
            let batch: Vec<(Tally, BTreeMap<u8, usize>)> =
                (next..next + 2000).into_par_iter().map(harvest).collect();
            next += 2000;
            for (t, c) in batch {
                harvested += t.instances;
                tally = tally.merge(t);
                for (k, v) in c {
                    *harvested_cases.entry(k).or_insert(0) += v;
                }
            }
        }
        RepairRun {
            tally,
            cases,
            harvested,
            harvested_cases,
        }
    })
}

#[test]
fn ac5_repair_coverage() {
    let _g = serial();
    let run = ac5();
    let mut failures = run.tally.failures.clone();
    for k in 1..=7u8 {
        if !run.cases.contains_key(&k) {
            failures.push(format!("no validated generator input for case {k}"));
        }
    }
    report(
        "AC5",
        &failures,
        &format!(
            "generator covers cases {:?}; {} harvested solver repairs all correct (cases {:?})",
            run.cases.keys().collect::<Vec<_>>(),
            run.harvested,
            run.harvested_cases
        ),
    );
}

// ---- AC6 -------------------------------------------------------------------

fn random_matching(n: usize, rng: &mut ChaCha8Rng) -> Matching {
    let mut agents: Vec<usize> = (0..n).collect();
    agents.shuffle(rng);
    let k = rng.gen_range(0..=n / 3);
    let ts = agents.chunks_exact(3).take(k).map(|c| Triple::new(c[0], c[1], c[2]).unwrap());
    Matching::new(n, ts).unwrap()
}

#[test]
fn ac6_blocker_improvement() {
    let _g = serial();
    const TRIALS: u64 = 100_000;
    let modes = [Mode::BinarySymmetric, Mode::Binary, Mode::General];
    let (failures, new_blockers) = (0..TRIALS)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(trial ^ 0x6ac6);
            let n = rng.gen_range(3..=9);
            let inst = random_instance(n, rng.gen_range(0.2..0.9), modes[trial as usize % 3], rng.gen()).unwrap();
            let m = random_matching(n, &mut rng);
            let m2 = random_matching(n, &mut rng);
            let (u, u2) = (brute_utilities(&inst, &m), brute_utilities(&inst, &m2));
            let all: Vec<usize> = (0..n).collect();
            let old: BTreeSet<[usize; 3]> = brute_blockers(&inst, &u, &all).into_iter().collect();
            let mut failures = Vec::new();
            let mut fresh = 0usize;
            for t in brute_blockers(&inst, &u2, &all) {
                if old.contains(&t) {
                    continue;
                }
                fresh += 1;
                if !t.iter().any(|&a| u2[a] < u[a]) {
                    failures.push(format!("trial {trial}: {t:?} has no agent worse off"));
                }
            }
            (failures, fresh)
        })
        .reduce(|| (Vec::new(), 0), |mut a, b| {
            a.0.extend(b.0);
            (a.0, a.1 + b.1)
        });
    report(
        "AC6",
        &failures,
        &format!("{TRIALS} (instance, M, M') triples at n <= 9; {new_blockers} new blockers, each with a losing agent"),
    );
}

// ---- AC7 -------------------------------------------------------------------

fn connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &(a, b) in edges {
            for (x, y) in [(a, b), (b, a)] {
                if x == v && !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
    }
    seen.into_iter().all(|s| s)
}

#[test]
fn ac7_pair_matching() {
    let _g = serial();
    let mut failures = Vec::new();
    let mut exhaustive = 0;
    for n in 1..=6usize {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
        let all: Vec<usize> = (0..n).collect();
        for mask in 0u32..1 << pairs.len() {
            let edges: Vec<_> = (0..pairs.len()).filter(|k| mask >> k & 1 == 1).map(|k| pairs[k]).collect();
            if !connected(n, &edges) {
                continue;
            }
            exhaustive += 1;
            let inst = Instance::from_edges(n, &edges).unwrap();
            let fast = maximum_2d_matching(&inst, &all).unwrap().len();
            let slow = max_pair_matching_bruteforce(&inst, &all).unwrap();
            if fast != slow {
                failures.push(format!("n={n} edges {edges:?}: {fast} vs {slow}"));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0xac7);
    for trial in 0..2000 {
        let n = rng.gen_range(1..=10);
        let inst = symmetric(n, rng.gen_range(0.05..0.95), rng.gen());
        let mut subset: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.8)).collect();
        if trial % 2 == 0 {
            subset = (0..n).collect();
        }
        let fast = maximum_2d_matching(&inst, &subset).unwrap();
        let slow = max_pair_matching_bruteforce(&inst, &subset).unwrap();
        let valid = fast.pairs.iter().all(|&(a, b)| inst.val(a, b) == 1 && subset.contains(&a) && subset.contains(&b));
        if fast.len() != slow || !valid {
            failures.push(format!("random trial {trial}: {} vs {slow}, valid {valid}", fast.len()));
        }
    }
    report(
        "AC7",
        &failures,
        &format!("maximum_2d_matching matches brute force on all {exhaustive} connected graphs with <= 6 vertices and 2000 random graphs"),
    );
}

// ---- AC8 -------------------------------------------------------------------

fn structure_failures(g: &PitInstance, map: &ReductionMap, inst: &Instance, m: &Matching) -> Vec<String> {
    let mut out = Vec::new();
    let u = brute_utilities(inst, m);
    for r in 0..6 * map.q {
        let owners: BTreeSet<Triple> = (1..=5).filter_map(|s| m.triple_of(map.p(r, s))).collect();
        if owners.len() != 2 || (1..=5).any(|s| !m.is_matched(map.p(r, s))) {
            out.push(format!("pentagadget {r} spans {} triples", owners.len()));
        }
    }
    for i in 0..g.vertex_count() {
        if u[map.a1(i)] != 0 || u[map.a2(i)] != 0 {
            out.push(format!("a-agents of vertex {i} have utilities {} and {}", u[map.a1(i)], u[map.a2(i)]));
        }
        if u[map.b(i)] != 2 {
            out.push(format!("b-agent of vertex {i} has utility {}", u[map.b(i)]));
        }
    }
    out
}

fn check_reduction(label: &str, g: &PitInstance, x: &[[usize; 3]]) -> Vec<String> {
    let (inst, map) = reduce_pit(g).unwrap();
    let m = match encode_pit_solution(g, x, &map) {
        Ok(m) => m,
        Err(e) => return vec![format!("{label}: encode failed: {e}")],
    };
    let mut failures = Vec::new();
    if inst.n() != 39 * map.q {
        failures.push(format!("{label}: {} agents", inst.n()));
    }
    if !is_stable(&inst, &m).unwrap() || !brute_stable(&inst, &m) {
        failures.push(format!("{label}: encoded matching is not stable"));
    }
    let mut sorted: Vec<[usize; 3]> = x.to_vec();
    sorted.iter_mut().for_each(|t| t.sort_unstable());
    sorted.sort_unstable();
    match decode_stable_matching(g, &map, &m) {
        Ok(back) if back == sorted => {}
        Ok(back) => failures.push(format!("{label}: decoded {back:?}, expected {sorted:?}")),
        Err(e) => failures.push(format!("{label}: decode failed: {e}")),
    }
    failures.extend(structure_failures(g, &map, &inst, &m).into_iter().map(|f| format!("{label}: {f}")));
    failures
}

#[test]
fn ac8_reduction_constructive() {
    let _g = serial();
    let mut failures = Vec::new();
    let pairs = [(0, 1), (0, 2), (1, 2)];
    let mut yes = 0;
    for mask in 0..8u32 {
        let edges: Vec<_> = (0..3).filter(|k| mask >> k & 1 == 1).map(|k| pairs[k]).collect();
        let g = PitInstance::new(3, &edges).unwrap();
        let x = [[0, 1, 2]];
        let (_, map) = reduce_pit(&g).unwrap();
        if validate_pit(&g, &x) {
            yes += 1;
            failures.extend(check_reduction(&format!("3-vertex mask {mask}"), &g, &x));
        } else if encode_pit_solution(&g, &x, &map).is_ok() {
            failures.push(format!("3-vertex mask {mask}: encoded a non-partition"));
        }
    }
    if yes != 1 {
        failures.push(format!("{yes} partitionable 3-vertex graphs, expected 1"));
    }
    let planted: Vec<Vec<String>> = (0..120u64)
        .into_par_iter()
        .map(|k| {
            let q = 2 + (k % 2) as usize;
            let p = [0.0, 0.2, 0.5, 0.8][(k / 2 % 4) as usize];
            let (g, x) = planted_pit(q, p, k % 3 == 0, k).unwrap();
            check_reduction(&format!("planted q={q} p={p} seed={k}"), &g, &x)
        })
        .collect();
    failures.extend(planted.into_iter().flatten());
    report(
        "AC8",
        &failures,
        "all 8 three-vertex graphs and 120 planted graphs at q in {2,3}: encode is stable, decode inverts it, \
         gadget structure holds (converse direction excluded)",
    );
}

// ---- AC9 -------------------------------------------------------------------

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs[xs.len() / 2]
}

/// Best of three timings of `f`, in seconds.
fn time(mut f: impl FnMut()) -> f64 {
    (0..3)
        .map(|_| {
            let start = Instant::now();
            f();
            start.elapsed().as_secs_f64()
        })
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn ac9_complexity_sanity() {
    let _g = serial();
    let solve: Vec<f64> = [60usize, 120, 240]
        .iter()
        .map(|&n| {
            median(
                (0..15)
                    .map(|k| {
                        let inst = symmetric(n, 0.9, 0xac9 + k);
                        time(|| {
                            find_stable(&inst, false).unwrap();
                        })
                    })
                    .collect(),
            )
        })
        .collect();
    // sizes kept small enough that the dense valuation table stays in cache
    let chain: Vec<f64> = [500usize, 1000, 2000]
        .iter()
        .map(|&n| {
            let (inst, m) = long_chain(n).unwrap();
            median(
                (0..21)
                    .map(|_| {
                        time(|| {
                            repair(&inst, &m, 0).unwrap();
                        })
                    })
                    .collect(),
            )
        })
        .collect();
    let solve_ratios = [solve[1] / solve[0], solve[2] / solve[1]];
    let chain_ratios = [chain[1] / chain[0], chain[2] / chain[1]];
    let mut failures = Vec::new();
    if solve_ratios.iter().any(|&r| r > 12.0) {
        failures.push(format!("find_stable ratios {solve_ratios:.2?} exceed 12"));
    }
    if chain_ratios.iter().any(|&r| r > 6.0) {
        failures.push(format!("long-chain repair ratios {chain_ratios:.2?} exceed 6"));
    }
    report(
        "AC9",
        &failures,
        &format!(
            "find_stable t(2n)/t(n) = {:.2?} (n = 60, 120, 240, p = 0.9); long-chain repair t(2n)/t(n) = {:.2?} (n = 500, 1000, 2000)",
            solve_ratios, chain_ratios
        ),
    );
}

// ---- AC10 ------------------------------------------------------------------

#[test]
fn ac10_welfare_parity() {
    let _g = serial();
    let mut histogram: BTreeMap<i64, usize> = BTreeMap::new();
    for h in [&ac1().welfare_histogram, &ac2().welfare_histogram, &ac3().welfare_histogram, &ac5().tally.welfare_histogram] {
        for (&k, &v) in h {
            *histogram.entry(k).or_insert(0) += v;
        }
    }
    let failures: Vec<String> = histogram
        .iter()
        .filter(|(w, _)| ![0, 2, 4, 6].contains(*w))
        .map(|(w, c)| format!("{c} triples with welfare {w}"))
        .collect();
    report(
        "AC10",
        &failures,
        &format!("triple welfare histogram over the AC1, AC2, AC3 and AC5 runs: {histogram:?}"),
    );
}
