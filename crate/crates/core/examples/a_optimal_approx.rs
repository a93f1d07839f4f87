//! A-optimal approximate designs and their R-optimality.
//!
//! `r* ⊗ s` with `r*_0 = √v · r*_i` should beat random feasible designs on
//! `Φ_R` for any block weights `s`.

use tcdesign::constructors::a_opt_approx;
use tcdesign::criteria::{evaluate, Criterion};
use tcdesign::oracle::DesignSampler;
use tcdesign::Result;

/// Returns `(Φ_R of r* ⊗ s, best Φ_R among the random designs)`.
pub fn run_example() -> Result<(f64, f64)> {
    let (v, d) = (3, 4);
    let s = [0.1, 0.2, 0.3, 0.4];
    let star = a_opt_approx(v, &s)?;
    let phi_star = evaluate(&star, Criterion::PhiR)?.value.to_f64();

    let mut sampler = DesignSampler::new(7);
    let mut best = f64::NEG_INFINITY;
    for _ in 0..500 {
        let xi = sampler.sample(v, d)?.to_f64();
        best = best.max(evaluate(&xi, Criterion::PhiR)?.value.to_f64());
    }
    println!("Φ_R(r* ⊗ s) = {phi_star:.6}, best of 500 random designs = {best:.6}");
    Ok((phi_star, best))
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example().map(|_| ())
}
