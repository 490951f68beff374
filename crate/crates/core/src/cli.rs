//! Command-line front end, kept in the library so it can be tested in-process.
//!
//! Exit codes: 0 success, 1 unstable (or no stable matching exists),
//! 2 usage or other error, 3 oracle budget exceeded, 4 parse error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::bench::{format_table, run_bench, BenchConfig, Suite};
use crate::error::Error;
use crate::generate::{generate, Family, GeneratorConfig};
use crate::hardness::{decode_stable_matching, encode_pit_solution, reduce_pit};
use crate::io::{
    parse_instance, parse_matching, parse_partition, parse_pit, serialize_instance_with_comments,
    serialize_matching, serialize_matching_with_comments, serialize_partition,
    serialize_pit_with_comments,
};
use crate::model::{find_blocking_triple, is_p_matching, welfare, Matching, Mode};
use crate::oracle::{find_any_stable, max_uw_stable, EnumerationBudget};
use crate::solver::find_stable;
use crate::welfare_approx::{approx_report, find_stable_uw_with, PairStrategy};

pub const EXIT_OK: i32 = 0;
pub const EXIT_UNSTABLE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;
pub const EXIT_PARSE: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "stable-triples", version, about = "Stable matchings of agents into triples")]
struct Cli {
    /// Print a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Construct a stable matching of a binary-symmetric instance.
    Solve {
        instance: PathBuf,
        /// Group leftover agents into arbitrary triples.
        #[arg(long)]
        complete: bool,
        /// Write the matching here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a matching for stability; exits 0 iff it is stable.
    Verify { instance: PathBuf, matching: PathBuf },
    /// Stable matching with at least half the maximum stable welfare.
    Approx {
        instance: PathBuf,
        /// Also compute the optimum by enumeration.
        #[arg(long)]
        oracle: bool,
        /// Pair unmatched agents greedily instead of maximally.
        #[arg(long)]
        greedy: bool,
    },
    /// Exhaustive search over matchings, within the oracle budget.
    Exact {
        instance: PathBuf,
        /// Maximise welfare instead of returning the first stable matching.
        #[arg(long)]
        max_uw: bool,
    },
    /// Generate an instance.
    Gen(GenArgs),
    /// Reduce a PIT graph to an instance, or map solutions across the reduction.
    ReducePit {
        pit: PathBuf,
        /// `encode <partition>` or `decode <matching>`.
        action: Option<PitAction>,
        file: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time a suite over seeded instances.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PitAction {
    Encode,
    Decode,
}

#[derive(Args, Debug)]
struct GenArgs {
    /// random, planted-pit, long-chain or repair-case:<k>
    #[arg(long, default_value = "random", value_parser = parse_family)]
    family: Family,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    #[arg(long, default_value = "binary-symmetric", value_parser = parse_mode)]
    mode: Mode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// planted-pit: keep the planted partition unique.
    #[arg(long)]
    unique: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Repair families: where to write the matching.
    #[arg(long)]
    matching_out: Option<PathBuf>,
    /// planted-pit: where to write the graph.
    #[arg(long)]
    pit_out: Option<PathBuf>,
    /// planted-pit: where to write the planted partition.
    #[arg(long)]
    partition_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(value_parser = parse_suite)]
    suite: Suite,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0.5")]
    ps: Vec<f64>,
    #[arg(long, default_value_t = 1)]
    reps: usize,
    #[arg(long)]
    threads: Option<usize>,
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse()
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse()
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse()
}

enum Failure {
    Lib(Error),
    Io(PathBuf, std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Lib(Error::Parse { .. }) => EXIT_PARSE,
            Failure::Lib(Error::BudgetExceeded(_)) => EXIT_BUDGET,
            _ => EXIT_USAGE,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Lib(e) => e.to_string(),
            Failure::Io(path, e) => format!("{}: {e}", path.display()),
        }
    }
}

type Outcome = Result<i32, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(path.to_path_buf(), e))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Io(path.to_path_buf(), e))
}

/// Prefixes parse errors with the offending file.
fn in_file<T>(path: &Path, r: crate::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| match e {
        Error::Parse { line, message } => Failure::Lib(Error::Parse {
            line,
            message: format!("{}: {message}", path.display()),
        }),
        e => Failure::Lib(e),
    })
}

struct Ctx<'a> {
    json: bool,
    out: &'a mut dyn Write,
}

impl Ctx<'_> {
    fn emit(&mut self, value: &impl Serialize, text: impl FnOnce() -> String) -> Result<(), Failure> {
        let body = if self.json {
            serde_json::to_string_pretty(value)
                .map_err(|e| Failure::Lib(Error::Internal(e.to_string())))?
                + "\n"
        } else {
            text()
        };
        self.out
            .write_all(body.as_bytes())
            .map_err(|e| Failure::Io(PathBuf::from("<stdout>"), e))
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(rendered.as_bytes())
            } else {
                out.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let mut ctx = Ctx { json: cli.json, out };
    match dispatch(cli.command, &mut ctx) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message());
            f.exit_code()
        }
    }
}

fn dispatch(command: Command, ctx: &mut Ctx<'_>) -> Outcome {
    match command {
        Command::Solve { instance, complete, out } => solve(ctx, &instance, complete, out.as_deref()),
        Command::Verify { instance, matching } => verify(ctx, &instance, &matching),
        Command::Approx { instance, oracle, greedy } => approx(ctx, &instance, oracle, greedy),
        Command::Exact { instance, max_uw } => exact(ctx, &instance, max_uw),
        Command::Gen(args) => gen(ctx, args),
        Command::ReducePit { pit, action, file, out } => reduce(ctx, &pit, action, file.as_deref(), out.as_deref()),
        Command::Bench(args) => bench(ctx, args),
    }
}

fn load_instance(path: &Path) -> Result<crate::model::Instance, Failure> {
    in_file(path, parse_instance(&read(path)?))
}

#[derive(Serialize)]
struct MatchingReport<'a> {
    matching: &'a Matching,
    welfare: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    welfare_opt: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ratio_bound_satisfied: Option<bool>,
}

fn solve(ctx: &mut Ctx<'_>, path: &Path, complete: bool, out: Option<&Path>) -> Outcome {
    let inst = load_instance(path)?;
    let m = find_stable(&inst, complete)?;
    let w = welfare(&inst, &m)?.total;
    let file = serialize_matching_with_comments(&m, &[format!("welfare {w}")]);
    if let Some(out) = out {
        write_file(out, &file)?;
    }
    let report = MatchingReport {
        matching: &m,
        welfare: w,
        welfare_opt: None,
        ratio_bound_satisfied: None,
    };
    ctx.emit(&report, || match out {
        Some(p) => format!("wrote {} triples to {} (welfare {w})\n", m.len(), p.display()),
        None => file.clone(),
    })?;
    Ok(EXIT_OK)
}

fn verify(ctx: &mut Ctx<'_>, inst_path: &Path, m_path: &Path) -> Outcome {
    let inst = load_instance(inst_path)?;
    let m = in_file(m_path, parse_matching(&read(m_path)?, inst.n()))?;
    let blocking = find_blocking_triple(&inst, &m)?;
    let p_matching = is_p_matching(&inst, &m)?;
    let report = welfare(&inst, &m)?;
    let stable = blocking.is_none();
    let value = json!({
        "stable": stable,
        "p_matching": p_matching,
        "blocking_triple": blocking,
        "welfare": report.total,
        "histogram": report.histogram,
    });
    ctx.emit(&value, || {
        let mut s = format!("stable: {}\np-matching: {}\nwelfare: {}\n", yes(stable), yes(p_matching), report.total);
        if let Some(t) = blocking {
            s += &format!("blocking triple: {t}\n");
        }
        s
    })?;
    Ok(if stable { EXIT_OK } else { EXIT_UNSTABLE })
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn approx(ctx: &mut Ctx<'_>, path: &Path, oracle: bool, greedy: bool) -> Outcome {
    let inst = load_instance(path)?;
    let budget = EnumerationBudget::from_env();
    let (m, welfare, welfare_opt, ratio) = if greedy {
        let (m, w) = find_stable_uw_with(&inst, PairStrategy::GreedyMaximal)?;
        let opt = if oracle { Some(max_uw_stable(&inst, &budget)?.1) } else { None };
        (m, w.total, opt, opt.map(|o| 2 * w.total >= o))
    } else {
        let r = approx_report(&inst, oracle, &budget)?;
        (r.matching, r.welfare_approx, r.welfare_opt, r.ratio_bound_satisfied)
    };
    let mut comments = vec![format!("welfare {welfare}")];
    if let (Some(opt), Some(ok)) = (welfare_opt, ratio) {
        comments.push(format!("optimum {opt}"));
        comments.push(format!("ratio bound {}", if ok { "holds" } else { "VIOLATED" }));
    }
    let report = MatchingReport {
        matching: &m,
        welfare,
        welfare_opt,
        ratio_bound_satisfied: ratio,
    };
    ctx.emit(&report, || serialize_matching_with_comments(&m, &comments))?;
    Ok(EXIT_OK)
}

fn exact(ctx: &mut Ctx<'_>, path: &Path, max_uw: bool) -> Outcome {
    let inst = load_instance(path)?;
    let budget = EnumerationBudget::from_env();
    let found = if max_uw {
        match max_uw_stable(&inst, &budget) {
            Ok((m, w)) => Some((m, w)),
            Err(Error::NoStableMatching) => None,
            Err(e) => return Err(e.into()),
        }
    } else {
        match find_any_stable(&inst, &budget)? {
            Some(m) => {
                let w = welfare(&inst, &m)?.total;
                Some((m, w))
            }
            None => None,
        }
    };
    match found {
        Some((m, w)) => {
            let report = MatchingReport {
                matching: &m,
                welfare: w,
                welfare_opt: None,
                ratio_bound_satisfied: None,
            };
            ctx.emit(&report, || serialize_matching_with_comments(&m, &[format!("welfare {w}")]))?;
            Ok(EXIT_OK)
        }
        None => {
            ctx.emit(&json!({ "stable_matching_exists": false }), || {
                "no stable matching exists\n".to_string()
            })?;
            Ok(EXIT_UNSTABLE)
        }
    }
}

fn gen(ctx: &mut Ctx<'_>, a: GenArgs) -> Outcome {
    let cfg = GeneratorConfig {
        family: a.family,
        n: a.n,
        p: a.p,
        mode: a.mode,
        seed: a.seed,
        unique: a.unique,
    };
    let g = generate(&cfg)?;
    let mut comments = cfg.header_comments();
    if let Some(pivot) = g.pivot {
        comments.push(format!("pivot {pivot}"));
    }
    if let Some(case) = g.case {
        comments.push(format!("repair case {}", case.number()));
    }
    let text = serialize_instance_with_comments(&g.instance, &comments);
    if let Some(path) = &a.out {
        write_file(path, &text)?;
    }
    if let (Some(path), Some(m)) = (&a.matching_out, &g.matching) {
        write_file(path, &serialize_matching(m))?;
    }
    if let (Some(path), Some(pit)) = (&a.pit_out, &g.pit) {
        write_file(path, &serialize_pit_with_comments(pit, &cfg.header_comments()))?;
    }
    if let (Some(path), Some(x)) = (&a.partition_out, &g.partition) {
        write_file(path, &serialize_partition(x))?;
    }
    let value = json!({
        "n": g.instance.n(),
        "mode": g.instance.mode(),
        "instance": text,
        "matching": g.matching,
        "pivot": g.pivot,
        "case": g.case,
        "partition": g.partition,
    });
    ctx.emit(&value, || match &a.out {
        Some(p) => format!("wrote {}\n", p.display()),
        None => text.clone(),
    })?;
    Ok(EXIT_OK)
}

fn reduce(
    ctx: &mut Ctx<'_>,
    pit_path: &Path,
    action: Option<PitAction>,
    file: Option<&Path>,
    out: Option<&Path>,
) -> Outcome {
    let g = in_file(pit_path, parse_pit(&read(pit_path)?))?;
    let (inst, map) = reduce_pit(&g)?;
    let need_file = |what: &str| {
        file.ok_or_else(|| Failure::Lib(Error::InvalidPit(format!("`{what}` needs a file argument"))))
    };
    let (text, value) = match action {
        None => {
            let text = serialize_instance_with_comments(
                &inst,
                &[format!("reduction of a {}-vertex PIT graph", g.vertex_count())],
            );
            let value = json!({ "agents": inst.n(), "q": map.q, "instance": text });
            (text, value)
        }
        Some(PitAction::Encode) => {
            let path = need_file("encode")?;
            let x = in_file(path, parse_partition(&read(path)?, g.vertex_count()))?;
            let m = encode_pit_solution(&g, &x, &map)?;
            let text = serialize_matching(&m);
            (text, json!({ "agents": inst.n(), "matching": m }))
        }
        Some(PitAction::Decode) => {
            let path = need_file("decode")?;
            let m = in_file(path, parse_matching(&read(path)?, inst.n()))?;
            let x = decode_stable_matching(&g, &map, &m)?;
            let text = serialize_partition(&x);
            (text, json!({ "partition": x }))
        }
    };
    if let Some(path) = out {
        write_file(path, &text)?;
    }
    ctx.emit(&value, || match out {
        Some(p) => format!("wrote {}\n", p.display()),
        None => text.clone(),
    })?;
    Ok(EXIT_OK)
}

fn bench(ctx: &mut Ctx<'_>, a: BenchArgs) -> Outcome {
    let cfg = BenchConfig {
        suite: a.suite,
        seed: a.seed,
        sizes: a.sizes,
        ps: a.ps,
        reps: a.reps,
        threads: a.threads,
    };
    let rows = run_bench(&cfg)?;
    ctx.emit(&rows, || format_table(&rows))?;
    Ok(EXIT_OK)
}
