//! Exhaustive search on small instances, including ones with negative values.

use stable_triples::fixtures;
use stable_triples::generate::random_instance;
use stable_triples::model::Mode;
use stable_triples::oracle::{all_stable_matchings, count_matchings, max_uw_stable, EnumerationBudget, Sizes};

fn main() -> stable_triples::Result<()> {
    let budget = EnumerationBudget::from_env();
    println!("budget: {budget:?}");
    for n in [6, 9, 12, 15] {
        println!(
            "n={n}: {} maximum-size matchings, {} of any size",
            count_matchings(n, Sizes::MaximumOnly),
            count_matchings(n, Sizes::All)
        );
    }

    let inst = fixtures::fig9();
    let all = all_stable_matchings(&inst, &budget)?;
    println!("\ntight example has {} stable matchings; best:", all.len());
    let (m, w) = max_uw_stable(&inst, &budget)?;
    println!("  {m} with welfare {w}");

    let general = random_instance(9, 0.6, Mode::General, 3)?;
    match max_uw_stable(&general, &budget) {
        Ok((m, w)) => println!("\ngeneral instance: best stable {m} with welfare {w}"),
        Err(e) => println!("\ngeneral instance: {e}"),
    }

    let big = fixtures::path(30);
    println!("\npath on 30 agents: {}", max_uw_stable(&big, &budget).unwrap_err());
    Ok(())
}
