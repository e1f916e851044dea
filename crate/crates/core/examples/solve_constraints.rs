//! Builds a small constraint system by hand, prints it in plain-text LP form
//! and solves it.

use taintmine::inference::{solve, ConstraintSystem, Family, DEFAULT_C, DEFAULT_LAMBDA};
use taintmine::specs::SpecKind;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut sys = ConstraintSystem::new();
    let src = sys.variable(&"readInput()".into(), SpecKind::Src);
    let san = sys.variable(&"escape()".into(), SpecKind::San);
    let snk = sys.variable(&"saveRecord(0)".into(), SpecKind::Snk);
    let log = sys.variable(&"log(0)".into(), SpecKind::Snk);
    sys.pin(src, 1.0)?;
    sys.pin(san, 1.0)?;
    sys.add_constraint(Family::SrcSan, [src, san], vec![snk, log], DEFAULT_C);
    sys.add_constraint(Family::SrcSan, [src, san], vec![snk], DEFAULT_C);

    print!("{}", sys.dump(DEFAULT_LAMBDA));
    let s = solve(&sys, DEFAULT_LAMBDA, "demo")?;
    println!("objective {:.4}", s.objective);
    for (rep, kinds) in &s.scores {
        for (kind, score) in kinds {
            println!("{rep:<16} {kind} {score:.4}");
        }
    }
    Ok(())
}
