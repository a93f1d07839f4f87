//! Writes a design as JSON and CSV and reads it back.

use tcdesign::constructors::e_opt_exact;
use tcdesign::io::{design_from_json, design_to_csv, design_to_json};
use tcdesign::{AnyDesign, Result};

pub fn run_example() -> Result<(String, String, bool)> {
    let design: AnyDesign = e_opt_exact(2, &[2, 2, 4])?.into();
    let json = serde_json::to_string(&design_to_json(&design))?;
    let csv = design_to_csv(&design)?;
    println!("{json}\n{csv}");
    let back = design_from_json(&serde_json::from_str(&json)?)?;
    Ok((json, csv, back == design))
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example().map(|_| ())
}
