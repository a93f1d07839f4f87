//! Optimal control total for BTIB designs and a search for one.

use tcdesign::constructors::{optimal_control_replication, search_exact, ControlReplication, Family, GhVariant, SearchTarget};
use tcdesign::oracle::DEFAULT_BUDGET;
use tcdesign::{ExactDesign, Result};

pub fn run_example() -> Result<(ControlReplication, Option<ExactDesign>)> {
    let (d, q, v) = (3, 3, 3);
    let rep = optimal_control_replication(d, q, v, GhVariant::Corrected)?;
    println!("(d, q, v) = ({d}, {q}, {v})");
    for (r, g) in &rep.table {
        let shown = g.as_ref().map_or("undefined".to_string(), ToString::to_string);
        println!("  g({r}) = {shown}");
    }
    println!("R = {}, g(R) = {}", rep.r, rep.value);

    let found = search_exact(v as usize, &[q; 3], &SearchTarget::family(Family::Btib), DEFAULT_BUDGET)?;
    match &found {
        Some(design) => println!("first BTIB design: {:?}", design.rows()),
        None => println!("no BTIB design on this instance"),
    }
    Ok((rep, found))
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example().map(|_| ())
}
