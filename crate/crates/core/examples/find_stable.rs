//! Builds stable matchings of random graphs and logs what each insertion did.
//!
//! Run with an optional size and edge probability:
//! `cargo run --example find_stable -- 30 0.2`

use std::collections::BTreeMap;

use stable_triples::generate::random_instance;
use stable_triples::model::{is_p_matching, is_stable, welfare, Mode};
use stable_triples::solver::{find_stable, find_stable_with, SolverEvent, SolverOptions};

fn main() -> stable_triples::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(30);
    let p: f64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(0.2);

    let inst = random_instance(n, p, Mode::BinarySymmetric, 7)?;
    let mut branches = BTreeMap::new();
    let mut repairs = Vec::new();
    let m = find_stable_with(&inst, false, &SolverOptions::default(), &mut |e| match e {
        SolverEvent::Inserted { branch, .. } => *branches.entry(format!("{branch:?}")).or_insert(0) += 1,
        SolverEvent::Repaired(ev) => repairs.push((ev.pivot, ev.trace.case)),
    })?;

    println!("{n} agents, {} edges", inst.edges().len());
    println!("matching: {m}");
    println!("welfare {}", welfare(&inst, &m)?.total);
    println!("stable {}, P-matching {}", is_stable(&inst, &m)?, is_p_matching(&inst, &m)?);
    println!("insertions by branch: {branches:?}");
    for (pivot, case) in repairs {
        println!("  repair around agent {pivot}: {case}");
    }

    let full = find_stable(&inst, true)?;
    println!("completed: {} triples, stable {}", full.len(), is_stable(&inst, &full)?);
    Ok(())
}
