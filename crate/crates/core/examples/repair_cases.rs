//! Runs the repair step on the smallest input for each of its seven cases
//! and on a long chain.

use stable_triples::fixtures::repair_case;
use stable_triples::generate::long_chain;
use stable_triples::model::{is_p_matching, is_stable};
use stable_triples::repair::{is_repairable, repair_checked};

fn main() -> stable_triples::Result<()> {
    for k in 1..=7 {
        let fx = repair_case(k).expect("cases 1..=7 exist");
        let pivot = is_repairable(&fx.instance, &fx.matching)?;
        let trace = repair_checked(&fx.instance, &fx.matching, fx.pivot)?;
        println!(
            "case {k}: n={} edges={:?}\n  pivot {:?}, path {:?}\n  {} -> {}  ({})",
            fx.instance.n(),
            fx.instance.edges(),
            pivot,
            trace.context.s,
            fx.matching,
            trace.matching,
            trace.case,
        );
        assert!(is_stable(&fx.instance, &trace.matching)? && is_p_matching(&fx.instance, &trace.matching)?);
    }

    let (inst, m) = long_chain(42)?;
    let trace = repair_checked(&inst, &m, 0)?;
    println!(
        "long chain n=42: walked {} triples, ended in {}",
        trace.context.c, trace.case
    );
    Ok(())
}
