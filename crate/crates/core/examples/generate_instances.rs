//! Prints one instance from each generator family.

use stable_triples::generate::{generate, Family, GeneratorConfig};
use stable_triples::io::serialize_instance_with_comments;
use stable_triples::model::Mode;

fn main() -> stable_triples::Result<()> {
    let families = [
        (Family::Random, 9),
        (Family::RepairCase(6), 9),
        (Family::LongChain, 14),
        (Family::PlantedPit, 3),
    ];
    for (family, n) in families {
        let cfg = GeneratorConfig {
            family,
            ..GeneratorConfig::random(n, 0.3, Mode::BinarySymmetric, 42)
        };
        let g = generate(&cfg)?;
        let text = serialize_instance_with_comments(&g.instance, &cfg.header_comments());
        let lines: Vec<&str> = text.lines().collect();
        println!("{}", lines[..lines.len().min(8)].join("\n"));
        if lines.len() > 8 {
            println!("... ({} lines)", lines.len());
        }
        if let (Some(m), Some(pivot)) = (&g.matching, g.pivot) {
            println!("matching {m}, pivot {pivot}, expected {}", g.case.unwrap());
        }
        println!();
    }
    Ok(())
}
