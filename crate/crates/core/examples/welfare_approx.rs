//! Compares the welfare approximation with the exact optimum.

use stable_triples::fixtures;
use stable_triples::generate::random_instance;
use stable_triples::model::Mode;
use stable_triples::oracle::EnumerationBudget;
use stable_triples::welfare_approx::{approx_report, find_stable_uw_with, PairStrategy};

fn main() -> stable_triples::Result<()> {
    let budget = EnumerationBudget::default();

    let r = approx_report(&fixtures::fig9(), true, &budget)?;
    println!("tight example: approx {} vs optimum {:?}: {}", r.welfare_approx, r.welfare_opt.unwrap(), r.matching);

    println!("\n seed  approx  greedy  optimum");
    for seed in 0..10 {
        let inst = random_instance(12, 0.35, Mode::BinarySymmetric, seed)?;
        let r = approx_report(&inst, true, &budget)?;
        let (_, greedy) = find_stable_uw_with(&inst, PairStrategy::GreedyMaximal)?;
        println!("{seed:>5} {:>7} {:>7} {:>8}", r.welfare_approx, greedy.total, r.welfare_opt.unwrap());
        assert_eq!(r.ratio_bound_satisfied, Some(true));
    }
    Ok(())
}
