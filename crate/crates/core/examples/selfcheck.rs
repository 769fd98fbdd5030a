//! Runs the randomized cross-checks and prints the tallies.
//!
//! cargo run --example selfcheck -- [seed] [count]

use preempt::selfcheck::run_selfcheck;

fn main() -> preempt::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);
    let count = args.next().and_then(|s| s.parse().ok()).unwrap_or(200);
    let report = run_selfcheck(seed, count)?;
    print!("{}", report.render());
    Ok(())
}
