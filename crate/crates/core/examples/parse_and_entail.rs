//! Parse formulas, print them canonically and decide entailment by truth table.

use preempt::logic::{entails, is_consistent, Formula, FormulaSet};

fn main() -> preempt::Result<()> {
    let f = Formula::parse("(p -> !r) & ((q -> r))")?;
    println!("canonical: {f}");
    println!("atoms: {:?}", f.atoms());

    let kb = FormulaSet::parse(["p -> !r", "q -> r", "q"])?;
    let goal = Formula::parse("r")?;
    println!("{kb} consistent: {}", is_consistent(&kb)?);
    println!("{kb} entails {goal}: {}", entails(&kb, &goal)?);

    let clash = kb.union(&FormulaSet::parse(["p"])?);
    println!("{clash} consistent: {}", is_consistent(&clash)?);

    match Formula::parse("p & -> q") {
        Err(e) => println!("rejected: {e}"),
        Ok(f) => println!("unexpectedly parsed {f}"),
    }
    Ok(())
}
