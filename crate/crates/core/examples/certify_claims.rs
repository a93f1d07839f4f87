//! Certifies each optimality claim on a small instance.

use tcdesign::oracle::{certify, Certificate, CertifyOptions, Claim};
use tcdesign::Result;

pub fn run_example() -> Result<Vec<Certificate>> {
    let opts = CertifyOptions { samples: 200, ..CertifyOptions::default() };
    let cases: [(Claim, usize, &[u64]); 5] = [
        (Claim::EOptExact, 2, &[2, 2, 4]),
        (Claim::VarCovSumMin, 2, &[2, 2, 4]),
        (Claim::Prop1EOpt, 2, &[2, 2]),
        (Claim::AOptIsROpt, 3, &[3, 3, 3]),
        (Claim::EOptCOpt, 2, &[2, 2, 4]),
    ];
    let mut out = Vec::new();
    for (claim, v, m) in cases {
        let cert = certify(claim, v, m, &opts)?;
        println!(
            "{:<15} v={v} m={m:?}: optimum {} ({} optimizers) -> {}",
            claim.name(),
            cert.optimum,
            cert.optimizers.len(),
            if cert.holds { "holds" } else { "does not hold" }
        );
        out.push(cert);
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example().map(|_| ())
}
