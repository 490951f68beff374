//! Times the solver, the approximation and the repair step across sizes.
//!
//! `cargo run --release --example bench_scaling -- 4` uses four threads.

use stable_triples::bench::{format_table, run_bench, BenchConfig, Suite};

fn main() -> stable_triples::Result<()> {
    let threads = std::env::args().nth(1).and_then(|a| a.parse().ok());
    for (suite, sizes) in [
        (Suite::Solve, vec![30, 60, 120, 240]),
        (Suite::Approx, vec![30, 60, 120]),
        (Suite::Repair, vec![250, 500, 1000, 2000]),
    ] {
        let mut cfg = BenchConfig::new(suite, 1, sizes);
        cfg.ps = vec![0.1, 0.5, 0.9];
        cfg.reps = 2;
        cfg.threads = threads;
        println!("suite {suite}");
        print!("{}", format_table(&run_bench(&cfg)?));
        println!();
    }
    Ok(())
}
