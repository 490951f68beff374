//! Writes and re-reads every file format.

use stable_triples::fixtures;
use stable_triples::generate::{generate, GeneratorConfig};
use stable_triples::hardness::planted_pit;
use stable_triples::io::{
    parse_instance, parse_matching, parse_partition, parse_pit, serialize_instance_with_comments,
    serialize_matching, serialize_partition, serialize_pit,
};
use stable_triples::model::Mode;
use stable_triples::solver::find_stable;

fn main() -> stable_triples::Result<()> {
    let cfg = GeneratorConfig::random(6, 0.5, Mode::General, 1);
    let general = generate(&cfg)?.instance;
    let text = serialize_instance_with_comments(&general, &cfg.header_comments());
    println!("{text}");
    assert_eq!(parse_instance(&text)?, general);

    let inst = fixtures::path(6);
    let m = find_stable(&inst, false)?;
    let text = serialize_matching(&m);
    println!("{text}");
    assert_eq!(parse_matching(&text, 6)?, m);

    let (g, x) = planted_pit(1, 0.0, false, 0)?;
    let (pit, part) = (serialize_pit(&g), serialize_partition(&x));
    print!("{pit}\n{part}\n");
    assert_eq!(parse_pit(&pit)?, g);
    assert_eq!(parse_partition(&part, 3)?, x);

    match parse_instance("3dsras v1\nn 3\nmode binary-symmetric\ne 0 1\ne 1 7\n") {
        Err(e) => println!("malformed input: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
