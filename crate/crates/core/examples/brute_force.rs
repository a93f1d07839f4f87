//! Exhaustive optima over a small design space.

use tcdesign::criteria::Criterion;
use tcdesign::oracle::{brute_force_optimum, enumerate_designs, sweep_invariants, Optimum, DEFAULT_BUDGET};
use tcdesign::Result;

pub fn run_example() -> Result<Vec<Optimum>> {
    let (v, m) = (2, [2u64, 2, 4]);
    let space = enumerate_designs(v, &m, DEFAULT_BUDGET)?;
    println!("D({v}, {}, {m:?}) holds {} designs", m.len(), space.space().total);

    let mut out = Vec::new();
    for c in [Criterion::E, Criterion::VarCovSum, Criterion::A] {
        let opt = brute_force_optimum(v, &m, c, DEFAULT_BUDGET)?;
        println!("{}: optimum {} over {} feasible designs, {} optimizers", c, opt.optimum, opt.feasible, opt.optimizers.len());
        out.push(opt);
    }
    let sweep = sweep_invariants(v, &m, DEFAULT_BUDGET)?;
    println!("structural checks: {}", if sweep.passed() { "pass" } else { "FAIL" });
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example().map(|_| ())
}
