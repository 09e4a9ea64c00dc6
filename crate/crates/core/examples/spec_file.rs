//! Describe a groupoid in the text format and run every suite on it.

use groupoid_pmu::cli::{cmd_all, Options, Target};

const SPEC: &str = "\
# Z/2 acting on two points by swapping them
unit a
unit b
arrow s : a -> b
arrow t : b -> a
compose s t = 1_b
compose t s = 1_a
measure b = 3.0
";

fn main() -> groupoid_pmu::Result<()> {
    let t = Target::from_spec("swap", SPEC)?;
    let r = cmd_all(&t, Options::default())?;
    for (k, v) in &r.values {
        println!("{k} = {v}");
    }
    println!("{} checks, all pass: {}", r.checks.len(), r.all_pass());

    match Target::from_spec("broken", "unit a\narrow f a -> a\n") {
        Err(e) => println!("{e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
