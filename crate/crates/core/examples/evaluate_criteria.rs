//! Scores the BIBD-plus-control design in `D(3, 3, 3·1)` under every criterion.

use tcdesign::criteria::{average_contrast, c_value, evaluate, Criterion};
use tcdesign::{ExactDesign, Rational, Result, Value};

pub fn bibd_with_control() -> Result<ExactDesign> {
    ExactDesign::from_rows(vec![vec![1, 1, 1], vec![1, 0, 1], vec![1, 1, 0], vec![0, 1, 1]])
}

pub fn run_example() -> Result<Vec<(Criterion, Value)>> {
    let d = bibd_with_control()?;
    let mut out = Vec::new();
    for c in Criterion::ALL {
        let value = if c == Criterion::C {
            c_value(&d, &average_contrast::<Rational>(d.v()))?
        } else {
            evaluate(&d, c)?
        };
        println!("{:>9}  {}", c.name(), value.value);
        out.push((c, value.value));
    }
    Ok(out)
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example().map(|_| ())
}
