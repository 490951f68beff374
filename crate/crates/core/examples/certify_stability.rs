//! Checks two matchings of the tight example for stability and prints
//! each agent's utility.

use stable_triples::fixtures;
use stable_triples::model::{blocking_triples, is_p_matching, welfare, Matching};

fn main() -> stable_triples::Result<()> {
    let inst = fixtures::fig9();
    let candidates = [
        ("optimum", fixtures::fig9_optimum()),
        ("triangle only", fixtures::fig9_triangle_matching()),
        ("empty", Matching::empty(inst.n())),
    ];
    for (name, m) in candidates {
        let blockers = blocking_triples(&inst, &m)?;
        let report = welfare(&inst, &m)?;
        println!("{name}: {m}");
        println!("  welfare {}  utilities {:?}", report.total, report.per_agent);
        println!("  P-matching: {}", is_p_matching(&inst, &m)?);
        match blockers.first() {
            None => println!("  stable"),
            Some(t) => println!("  blocked by {t} ({} blocking triples)", blockers.len()),
        }
    }
    Ok(())
}
