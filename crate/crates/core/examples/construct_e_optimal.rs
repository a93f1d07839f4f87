//! Builds E-optimal designs and confirms `λ_min(N)` exactly.
//!
//! Approximate: `r* ⊗ s` with half of every block on the control reaches the
//! ceiling `1/(4v)`. Exact: half of every block on the control plus
//! equireplicated tests reaches `n/(4v)`.

use tcdesign::constructors::{e_opt_approx, e_opt_exact};
use tcdesign::info::{apply_to_ones, contrast_info, lambda_min_value};
use tcdesign::scalar::parse_rational;
use tcdesign::{ExactDesign, Rational, Result, Value};

pub struct Constructed {
    pub approx_lambda_min: Value,
    pub exact: ExactDesign,
    pub exact_lambda_min: Value,
}

pub fn run_example() -> Result<Constructed> {
    let v = 3;
    let s: Vec<Rational> = ["1/6", "1/3", "1/2"].iter().map(|x| parse_rational(x)).collect::<Result<_>>()?;
    let approx = e_opt_approx(v, &s, None)?;
    let n = contrast_info(&approx)?;
    println!("approximate, v = {v}: N·1 = {:?}", apply_to_ones(&n).iter().map(ToString::to_string).collect::<Vec<_>>());
    let approx_lambda_min = lambda_min_value(&n);
    println!("  λ_min = {approx_lambda_min}");

    let exact = e_opt_exact(2, &[2, 2, 4])?;
    println!("exact, v = 2, m = (2, 2, 4):");
    for row in exact.rows() {
        println!("  {row:?}");
    }
    let exact_lambda_min = lambda_min_value(&contrast_info(&exact)?);
    println!("  λ_min = {exact_lambda_min} (n/(4v) = {})", exact.n() as f64 / 8.0);
    Ok(Constructed { approx_lambda_min, exact, exact_lambda_min })
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example().map(|_| ())
}
