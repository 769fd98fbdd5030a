//! Dung semantics on a hand-built framework: grounded stages, and brute-force
//! enumeration of the other extension kinds.

use preempt::semantics::{
    enumerate_extensions, grounded_extension, grounded_stages, AaFramework, Semantics,
};

fn main() -> preempt::Result<()> {
    // a chain c -> b -> a plus a two-cycle d <-> e
    let fw = AaFramework::from_ids(
        &["a", "b", "c", "d", "e"],
        &[("c", "b"), ("b", "a"), ("d", "e"), ("e", "d")],
    )?;
    for (i, stage) in grounded_stages(&fw).iter().enumerate() {
        println!("E{i} = {:?}", fw.ids_of(stage));
    }
    let g = grounded_extension(&fw);
    println!("grounded {:?}, stable: {}", fw.ids_of(&g.members), g.stable);
    for kind in [
        Semantics::Admissible,
        Semantics::Complete,
        Semantics::Stable,
        Semantics::Preferred,
    ] {
        let sets: Vec<Vec<&str>> = enumerate_extensions(&fw, kind)?
            .iter()
            .map(|s| fw.ids_of(s))
            .collect();
        println!("{kind:?}: {sets:?}");
    }
    Ok(())
}
