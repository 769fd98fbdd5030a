//! Two equally important norms disagree. No verdict follows, yet each side
//! has its own tree family; diagnostic mode shows both.

use preempt::dsa::build_framework;
use preempt::explain::{build_explanation, diagnose, render_dialogue};
use preempt::hierarchy::{is_locally_optimized, verdict, Limits};
use preempt::normfile::parse_case;
use preempt::Error;

fn main() -> preempt::Result<()> {
    let case = parse_case(include_str!("conflict.norm"), Limits::default())?;
    println!("verdict: {}", verdict(&case).kind);
    println!("locally optimized: {}", is_locally_optimized(&case)?.optimized);
    match build_explanation(&case) {
        Err(Error::NoVerdict) => println!("plain explanation refused: no verdict"),
        other => println!("unexpected: {other:?}"),
    }
    let fw = build_framework(&case)?;
    let d = diagnose(&case)?;
    print!("{}", render_dialogue(&d.obligatory, &fw, &case, false));
    print!("{}", render_dialogue(&d.forbidden, &fw, &case, false));
    Ok(())
}
