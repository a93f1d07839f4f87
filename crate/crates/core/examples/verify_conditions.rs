//! Checks designs against the named conditions of each optimal family.

use tcdesign::constructors::{verify_conditions, ConditionReport, Family, GhVariant};
use tcdesign::{AnyDesign, ExactDesign, Result};

pub fn run_example() -> Result<Vec<ConditionReport>> {
    let mut reports = Vec::new();

    // Unequal blocks: half of each block on the control, tests replicated twice.
    let unequal = ExactDesign::from_rows(vec![vec![1, 1, 2], vec![1, 0, 1], vec![0, 1, 1]])?;
    reports.push(verify_conditions(&unequal.into(), Family::ExactE, GhVariant::Corrected)?);

    // Four tests in four blocks of four, two controls per block.
    let four = ExactDesign::from_rows(vec![
        vec![2, 2, 2, 2],
        vec![1, 0, 0, 1],
        vec![1, 1, 0, 0],
        vec![0, 1, 1, 0],
        vec![0, 0, 1, 1],
    ])?;
    reports.push(verify_conditions(&four.into(), Family::EqualBlockE, GhVariant::Corrected)?);

    // Changing the last row to (0, 0, 0, 1) leaves block 3 one trial short.
    let short = ExactDesign::new(
        vec![4; 4],
        vec![vec![2, 2, 2, 2], vec![1, 0, 0, 1], vec![1, 1, 0, 0], vec![0, 1, 1, 0], vec![0, 0, 0, 1]],
    );
    println!("short allocation: {}", short.as_ref().map(|_| "accepted".to_string()).unwrap_or_else(|e| e.to_string()));

    let bibd: AnyDesign = ExactDesign::from_rows(vec![vec![1, 1, 1], vec![1, 0, 1], vec![1, 1, 0], vec![0, 1, 1]])?.into();
    reports.push(verify_conditions(&bibd, Family::Btib, GhVariant::Corrected)?);
    reports.push(verify_conditions(&bibd, Family::EqualBlockE, GhVariant::Corrected)?);

    for r in &reports {
        println!("{}: {}", r.family, if r.satisfied { "satisfied" } else { "violated" });
        for c in &r.checks {
            println!("  [{}] {}: {}", if c.holds { "ok" } else { "!!" }, c.name, c.detail);
        }
    }
    Ok(reports)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example().map(|_| ())
}
