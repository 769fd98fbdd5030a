//! Build the DS-argument framework, check its structural properties and emit
//! it as DOT and JSON.

use preempt::dsa::{build_framework, check_framework_properties};
use preempt::hierarchy::Limits;
use preempt::normfile::parse_case;
use preempt::render::{framework_dot, framework_from_json, framework_json};

fn main() -> preempt::Result<()> {
    let case = parse_case(include_str!("overtaking.norm"), Limits::default())?;
    let fw = build_framework(&case)?;
    for a in &fw.arguments {
        println!("{} {}", a.id, a.label(false));
    }
    for (x, y) in fw.attack_ids() {
        println!("{x} attacks {y}");
    }
    for c in check_framework_properties(&fw, &case).checks {
        println!("{:<28} {}", c.name, if c.passed { "ok" } else { "FAILED" });
    }
    print!("{}", framework_dot(&fw, false));

    let json = framework_json(&fw, &case)?;
    assert_eq!(framework_from_json(&json, &case)?, fw);
    println!("JSON round trip ok ({} bytes)", json.len());
    Ok(())
}
