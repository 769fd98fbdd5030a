//! Explain both overtaking verdicts with dispute trees. With oncoming traffic
//! known the explanation is an admissible tree; without it, a maximal one.

use preempt::dsa::build_framework;
use preempt::explain::{build_explanation, render_dialogue};
use preempt::hierarchy::Limits;
use preempt::normfile::parse_case;
use preempt::render::explanation_dot;

fn main() -> preempt::Result<()> {
    for src in [
        include_str!("overtaking.norm"),
        include_str!("overtaking_obstructed.norm"),
    ] {
        let case = parse_case(src, Limits::default())?;
        let fw = build_framework(&case)?;
        let expl = build_explanation(&case)?;
        println!("situation {}", case.situation());
        print!("{}", render_dialogue(&expl, &fw, &case, false));
        print!("{}", explanation_dot(&expl, &fw, false));
        println!();
    }
    Ok(())
}
