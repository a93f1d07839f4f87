//! Averages `N` over test relabelings and checks the variance-sum bound.

use tcdesign::info::{contrast_info, inverse_info, symmetrized_info, symmetrized_lambda_min};
use tcdesign::{ExactDesign, Rational, Result};

pub struct Symmetrized {
    pub lambda_min_bar: Rational,
    pub varcov: Rational,
    pub bound: Rational,
}

pub fn run_example() -> Result<Symmetrized> {
    let d = ExactDesign::from_rows(vec![
        vec![2, 2, 2, 2],
        vec![1, 0, 0, 1],
        vec![1, 1, 0, 0],
        vec![0, 1, 1, 0],
        vec![0, 0, 1, 1],
    ])?;
    let bar = symmetrized_info(&d)?;
    println!("N̄ = {}", bar.to_json());
    let lambda_min_bar = symmetrized_lambda_min(&d)?;
    let inv = inverse_info(&contrast_info(&d)?)?;
    let varcov = inv.total();
    let q = d.equal_block_size().expect("equal blocks");
    let mu: u64 = (1..=d.v()).map(|i| d.integer_concurrence(0, i)).sum();
    let bound = Rational::from_integer((q * (d.v() * d.v()) as u64).into()) / Rational::from_integer(mu.into());
    println!("λ_min(N̄) = {lambda_min_bar}, 1ᵀN⁻¹1 = {varcov} ≥ qv²/Σμ_0i = {bound}");
    Ok(Symmetrized { lambda_min_bar, varcov, bound })
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example().map(|_| ())
}
