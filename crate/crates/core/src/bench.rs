//! Benchmark harness.
//!
//! Every row is generated from a seed derived from the master seed, size,
//! probability and repetition, so the instance stream and the welfare column
//! do not depend on thread count or scheduling. Rows are sorted before they
//! are returned.

use std::fmt::{self, Write as _};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::generate::{long_chain, random_instance};
use crate::model::{is_stable, welfare, Mode};
use crate::repair::repair;
use crate::solver::find_stable;
use crate::welfare_approx::find_stable_uw;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    /// `find_stable` on random binary-symmetric instances.
    Solve,
    /// `repair` on the long-chain family; `p` is unused.
    Repair,
    /// `find_stable_uw` on random binary-symmetric instances.
    Approx,
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Solve => "solve",
            Suite::Repair => "repair",
            Suite::Approx => "approx",
        })
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "solve" => Ok(Suite::Solve),
            "repair" => Ok(Suite::Repair),
            "approx" => Ok(Suite::Approx),
            _ => Err(format!("unknown suite `{s}` (expected solve, repair or approx)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchConfig {
    pub suite: Suite,
    pub seed: u64,
    pub sizes: Vec<usize>,
    pub ps: Vec<f64>,
    /// Instances per (size, probability).
    pub reps: usize,
    /// Worker threads; `None` uses the rayon default.
    pub threads: Option<usize>,
}

impl BenchConfig {
    pub fn new(suite: Suite, seed: u64, sizes: Vec<usize>) -> Self {
        BenchConfig {
            suite,
            seed,
            sizes,
            ps: vec![0.5],
            reps: 1,
            threads: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub n: usize,
    pub p: Option<f64>,
    pub rep: usize,
    pub seed: u64,
    pub welfare: i64,
    pub stable: bool,
    pub solve_secs: f64,
    pub check_secs: f64,
}

/// Per-instance seed; a splitmix64 finaliser over the row coordinates.
pub fn instance_seed(seed: u64, n: usize, p: f64, rep: usize) -> u64 {
    let mut z = seed;
    for word in [n as u64, p.to_bits(), rep as u64] {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15).wrapping_add(word);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^= z >> 31;
    }
    z
}

fn run_one(suite: Suite, n: usize, p: Option<f64>, rep: usize, seed: u64) -> Result<BenchRow> {
    let (inst, m, solve_secs) = match suite {
        Suite::Solve | Suite::Approx => {
            let inst = random_instance(n, p.unwrap_or(0.5), Mode::BinarySymmetric, seed)?;
            let start = Instant::now();
            let m = if suite == Suite::Solve {
                find_stable(&inst, false)?
            } else {
                find_stable_uw(&inst)?.0
            };
            (inst, m, start.elapsed().as_secs_f64())
        }
        Suite::Repair => {
            let (inst, m0) = long_chain(n)?;
            let start = Instant::now();
            let m = repair(&inst, &m0, 0)?;
            (inst, m, start.elapsed().as_secs_f64())
        }
    };
    let start = Instant::now();
    let stable = is_stable(&inst, &m)?;
    let check_secs = start.elapsed().as_secs_f64();
    Ok(BenchRow {
        n,
        p,
        rep,
        seed,
        welfare: welfare(&inst, &m)?.total,
        stable,
        solve_secs,
        check_secs,
    })
}

pub fn run_bench(cfg: &BenchConfig) -> Result<Vec<BenchRow>> {
    if cfg.sizes.is_empty() {
        return Err(Error::Generator("no sizes given".into()));
    }
    if let Some(bad) = cfg.ps.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::Generator(format!("probability {bad} outside [0, 1]")));
    }
    let ps: Vec<Option<f64>> = match cfg.suite {
        Suite::Repair => vec![None],
        _ => cfg.ps.iter().map(|&p| Some(p)).collect(),
    };
    let mut jobs = Vec::new();
    for &n in &cfg.sizes {
        for &p in &ps {
            for rep in 0..cfg.reps {
                jobs.push((n, p, rep, instance_seed(cfg.seed, n, p.unwrap_or(0.0), rep)));
            }
        }
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cfg.threads {
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
    let mut rows = pool.install(|| {
        jobs.par_iter()
            .map(|&(n, p, rep, seed)| run_one(cfg.suite, n, p, rep, seed))
            .collect::<Result<Vec<_>>>()
    })?;
    rows.sort_by(|a, b| {
        (a.n, a.p.unwrap_or(0.0).to_bits(), a.rep).cmp(&(b.n, b.p.unwrap_or(0.0).to_bits(), b.rep))
    });
    Ok(rows)
}

/// Whitespace-aligned table, one row per instance.
pub fn format_table(rows: &[BenchRow]) -> String {
    let mut out = format!(
        "{:>6} {:>5} {:>4} {:>20} {:>8} {:>6} {:>12} {:>12}\n",
        "n", "p", "rep", "seed", "welfare", "stable", "solve_s", "check_s"
    );
    for r in rows {
        let p = r.p.map_or_else(|| "-".to_string(), |p| format!("{p:.2}"));
        let _ = writeln!(
            out,
            "{:>6} {:>5} {:>4} {:>20} {:>8} {:>6} {:>12.6} {:>12.6}",
            r.n, p, r.rep, r.seed, r.welfare, r.stable, r.solve_secs, r.check_secs
        );
    }
    out
}
