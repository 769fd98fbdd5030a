//! Enumerate the sub-bases of a hierarchy and find the maximal ones that are
//! consistent with a situation.

use preempt::hierarchy::{
    consistent_subbases, enumerate_subbases, local_gt, maximal_consistent_subbases,
    ConstraintHierarchy,
};
use preempt::logic::FormulaSet;

fn main() -> preempt::Result<()> {
    let h = ConstraintHierarchy::parse(&[&["p -> !r"], &["q -> r"], &["!r"]])?;
    let all = enumerate_subbases(&h)?;
    for sb in &all {
        println!("δ{} {}", sb.rank(), sb.describe(&h, false));
    }

    // δ1 and δ2 differ first at level 2, where δ1 keeps more.
    println!("δ1 > δ2: {}", local_gt(&all[1], &all[2]));

    let situation = FormulaSet::parse(["p", "q"])?;
    let theory = FormulaSet::new();
    let consistent = consistent_subbases(&h, &situation, &theory)?;
    let ranks: Vec<String> = consistent.iter().map(|sb| format!("δ{}", sb.rank())).collect();
    println!("consistent with {situation}: {}", ranks.join(" "));
    for sb in maximal_consistent_subbases(&h, &situation, &theory)? {
        println!("maximal: δ{} {}", sb.rank(), sb.describe(&h, false));
    }
    Ok(())
}
