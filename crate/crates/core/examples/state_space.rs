//! Print the derivation-state matrix of the overtaking case, then the verdict.

use preempt::dsa::{build_framework, state_space};
use preempt::hierarchy::{verdict, Limits};
use preempt::normfile::parse_case;
use preempt::render::{statespace_text, verdict_text};

fn main() -> preempt::Result<()> {
    let case = parse_case(include_str!("overtaking.norm"), Limits::default())?;
    let space = state_space(&case)?;
    let fw = build_framework(&case)?;
    print!("{}", statespace_text(&space, &fw, &case, false));
    println!();
    print!("{}", verdict_text(&verdict(&case), &case, false));
    Ok(())
}
