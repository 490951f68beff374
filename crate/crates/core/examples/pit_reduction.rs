//! Reduces a graph with a planted partition into triangles, encodes the
//! partition as a stable matching and decodes it back.

use stable_triples::hardness::{decode_stable_matching, encode_pit_solution, planted_pit, reduce_pit, Role};
use stable_triples::model::{is_stable, utilities};

fn main() -> stable_triples::Result<()> {
    let (g, x) = planted_pit(2, 0.3, true, 11)?;
    println!("graph: {} vertices, edges {:?}", g.vertex_count(), g.edges());
    println!("planted partition: {x:?}");

    let (inst, map) = reduce_pit(&g)?;
    println!("reduced instance: {} agents, {} arcs", inst.n(), inst.arcs().len());

    let m = encode_pit_solution(&g, &x, &map)?;
    println!("encoded matching stable: {}", is_stable(&inst, &m)?);
    let u = utilities(&inst, &m)?;
    for t in m.triples().iter().take(4) {
        let roles: Vec<Role> = t.members().iter().filter_map(|&a| map.role(a)).collect();
        println!("  {t} {roles:?} utilities {:?}", t.members().map(|a| u[a]));
    }
    println!("  ... {} triples in total", m.len());

    let back = decode_stable_matching(&g, &map, &m)?;
    println!("decoded partition: {back:?}");
    assert_eq!(back, x);
    Ok(())
}
