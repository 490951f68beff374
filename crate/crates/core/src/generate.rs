//! Seeded instance generators.
//!
//! All randomness comes from ChaCha8 (`rand_chacha`) seeded with
//! `seed_from_u64(seed)`, so a config always produces the same instance.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fixtures::repair_case;
use crate::hardness::{planted_pit, reduce_pit, PitInstance};
use crate::model::{AgentId, Instance, Matching, Mode, Triple};
use crate::repair::{is_repairable, repair_checked, RepairCase};

/// Names the PRNG in generated file headers.
pub const PRNG_NAME: &str = "ChaCha8 (rand_chacha 0.3, seed_from_u64)";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// Each pair (or ordered pair) present independently with probability `p`.
    Random,
    /// A PIT graph on `n` vertices with `n / 3` planted triangles.
    PlantedPit,
    /// The smallest input taking repair case `k`, padded to `n` agents.
    RepairCase(u8),
    /// A repair input whose path runs through every triple before dead-ending.
    LongChain,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Random => f.write_str("random"),
            Family::PlantedPit => f.write_str("planted-pit"),
            Family::RepairCase(k) => write!(f, "repair-case:{k}"),
            Family::LongChain => f.write_str("long-chain"),
        }
    }
}

impl FromStr for Family {
    type Err = String;

    /// Accepts `random`, `planted-pit`, `long-chain` and `repair-case:<k>`.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "random" => Ok(Family::Random),
            "planted-pit" => Ok(Family::PlantedPit),
            "long-chain" => Ok(Family::LongChain),
            _ => {
                let k = s
                    .strip_prefix("repair-case:")
                    .and_then(|k| k.parse::<u8>().ok())
                    .filter(|k| (1..=7).contains(k))
                    .ok_or_else(|| format!("unknown family `{s}`"))?;
                Ok(Family::RepairCase(k))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneratorConfig {
    pub family: Family,
    pub n: usize,
    /// Edge (or arc) probability for `random`, noise probability for `planted-pit`.
    pub p: f64,
    pub mode: Mode,
    pub seed: u64,
    /// For `planted-pit`: reject noise edges that close new triangles.
    pub unique: bool,
}

impl GeneratorConfig {
    pub fn random(n: usize, p: f64, mode: Mode, seed: u64) -> Self {
        GeneratorConfig {
            family: Family::Random,
            n,
            p,
            mode,
            seed,
            unique: false,
        }
    }

    /// Comment lines recording how an instance was produced. Only the
    /// parameters the family uses are listed.
    pub fn header_comments(&self) -> Vec<String> {
        let mut line = format!("generated: family={} n={}", self.family, self.n);
        match self.family {
            Family::Random => line += &format!(" p={} mode={} seed={}", self.p, self.mode, self.seed),
            Family::PlantedPit => {
                line += &format!(" p={} seed={}", self.p, self.seed);
                if self.unique {
                    line += " unique";
                }
            }
            Family::RepairCase(_) | Family::LongChain => {}
        }
        vec![line, format!("prng: {PRNG_NAME}")]
    }
}

/// A generated input. Extra fields are filled for the families that define them.
#[derive(Clone, Debug, PartialEq)]
pub struct Generated {
    pub instance: Instance,
    /// Repair families: the matching to repair.
    pub matching: Option<Matching>,
    /// Repair families: the pivot.
    pub pivot: Option<AgentId>,
    /// Repair families: the case the input takes.
    pub case: Option<RepairCase>,
    /// `planted-pit`: the graph; `instance` is its reduction.
    pub pit: Option<PitInstance>,
    /// `planted-pit`: the planted partition.
    pub partition: Option<Vec<[usize; 3]>>,
}

impl Generated {
    fn plain(instance: Instance) -> Self {
        Generated {
            instance,
            matching: None,
            pivot: None,
            case: None,
            pit: None,
            partition: None,
        }
    }
}

/// Smallest `n` accepted by each repair case.
pub fn repair_case_min_n(k: u8) -> Option<usize> {
    repair_case(k).map(|fx| fx.instance.n())
}

pub const LONG_CHAIN_MIN_N: usize = 6;

/// Generates and, for repair families, checks that the input is repairable
/// and takes the intended case. The check is cubic.
pub fn generate(cfg: &GeneratorConfig) -> Result<Generated> {
    let g = generate_unchecked(cfg)?;
    if let (Some(m), Some(pivot), Some(case)) = (&g.matching, g.pivot, g.case) {
        if is_repairable(&g.instance, m)?.is_none() {
            return Err(Error::Generator(format!("{} input is not repairable", cfg.family)));
        }
        let trace = repair_checked(&g.instance, m, pivot)?;
        if trace.case != case {
            return Err(Error::Generator(format!(
                "{} input took {} instead of {case}",
                cfg.family, trace.case
            )));
        }
    }
    Ok(g)
}

/// As [`generate`] without the validation pass.
pub fn generate_unchecked(cfg: &GeneratorConfig) -> Result<Generated> {
    if !(0.0..=1.0).contains(&cfg.p) {
        return Err(Error::Generator(format!("probability {} outside [0, 1]", cfg.p)));
    }
    match cfg.family {
        Family::Random => Ok(Generated::plain(random_instance(cfg.n, cfg.p, cfg.mode, cfg.seed)?)),
        Family::PlantedPit => {
            if cfg.n == 0 || !cfg.n.is_multiple_of(3) {
                return Err(Error::Generator(format!(
                    "planted-pit needs a positive multiple of 3 vertices, got {}",
                    cfg.n
                )));
            }
            let (pit, partition) = planted_pit(cfg.n / 3, cfg.p, cfg.unique, cfg.seed)?;
            let (instance, _) = reduce_pit(&pit)?;
            Ok(Generated {
                pit: Some(pit),
                partition: Some(partition),
                ..Generated::plain(instance)
            })
        }
        Family::RepairCase(k) => {
            let fx = repair_case(k)
                .ok_or_else(|| Error::Generator(format!("repair case {k} outside 1..=7")))?;
            let min = fx.instance.n();
            if cfg.n < min {
                return Err(Error::Generator(format!(
                    "repair-case {k} needs n >= {min}, got {}",
                    cfg.n
                )));
            }
            let instance = Instance::from_edges(cfg.n, &fx.instance.edges())?;
            let matching = Matching::new(cfg.n, fx.matching.triples().iter().copied())?;
            Ok(Generated {
                matching: Some(matching),
                pivot: Some(fx.pivot),
                case: RepairCase::from_number(k),
                ..Generated::plain(instance)
            })
        }
        Family::LongChain => {
            let (instance, matching) = long_chain(cfg.n)?;
            Ok(Generated {
                matching: Some(matching),
                pivot: Some(0),
                case: Some(RepairCase::DeadEnd),
                ..Generated::plain(instance)
            })
        }
    }
}

/// Random instance. Symmetric mode draws each unordered pair; the other
/// modes draw each ordered pair. General values are uniform in `-3..=3`
/// without zero.
pub fn random_instance(n: usize, p: f64, mode: Mode, seed: u64) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match mode {
        Mode::BinarySymmetric => {
            let mut edges = Vec::new();
            for a in 0..n {
                for b in a + 1..n {
                    if rng.gen_bool(p) {
                        edges.push((a, b));
                    }
                }
            }
            Instance::from_edges(n, &edges)
        }
        Mode::Binary | Mode::General => {
            let mut arcs = Vec::new();
            for a in 0..n {
                for b in 0..n {
                    if a == b || !rng.gen_bool(p) {
                        continue;
                    }
                    let v = if mode == Mode::Binary {
                        1
                    } else {
                        let v = rng.gen_range(-3..=2);
                        if v >= 0 {
                            v + 1
                        } else {
                            v
                        }
                    };
                    arcs.push((a, b, v));
                }
            }
            Instance::from_arcs(n, mode, &arcs)
        }
    }
}

/// Pivot 0, `j2` = 1, then triples `{x, y, z}` at `2 + 4k ..= 4 + 4k` forming
/// one long path `0 - x0 - y0 - z0 - x1 - ...`, with `x0` also adjacent to 1.
/// Every later `x` has a private unmatched neighbour at `5 + 4k`, so the
/// path extends through every triple and ends in the dead-end case.
pub fn long_chain(n: usize) -> Result<(Instance, Matching)> {
    if n < LONG_CHAIN_MIN_N {
        return Err(Error::Generator(format!(
            "long-chain needs n >= {LONG_CHAIN_MIN_N}, got {n}"
        )));
    }
    let blocks = (n - 2) / 4;
    let x = |k: usize| 2 + 4 * k;
    let mut edges = vec![(0, x(0)), (1, x(0))];
    let mut triples = Vec::with_capacity(blocks);
    for k in 0..blocks {
        let (a, b, c) = (x(k), x(k) + 1, x(k) + 2);
        edges.push((a, b));
        edges.push((b, c));
        triples.push(Triple::new(a, b, c)?);
        if k + 1 < blocks {
            edges.push((c, x(k + 1)));
            edges.push((x(k + 1), x(k + 1) + 3));
        }
    }
    Ok((Instance::from_edges(n, &edges)?, Matching::new(n, triples)?))
}
