//! Control replication for A-optimal balanced treatment incomplete block
//! (BTIB) designs in `D(v, d, q·1_d)`.
//!
//! For a BTIB design that is binary in the test treatments and spreads `r`
//! control trials as evenly as possible over `d` blocks,
//! `tr N⁻¹ = g(r; d, q, v)` with
//!
//! ```text
//! h(r; d)       = ⌊r/d⌋² (d − (r mod d)) + (r mod d) (⌊r/d⌋ + 1)²
//! g(r; d, q, v) = v / (r − h/q) + (v − 1)² / (d(q − 1) − r(q − 1)/q − (r − h/q)/v)
//! ```
//!
//! `h` is the smallest possible `Σ_k ξ(0,k)²`; the two terms of `g` are the
//! contributions of the eigenvalue on `1_v` and of its orthogonal
//! complement. The optimal control total `R` minimizes `g` over
//! `0 ≤ r ≤ ⌊dq/2⌋`.
//!
//! [`GhVariant::Transcribed`] evaluates the alternative transcription of
//! these formulas (`(r/d + 1)²` in `h`, `v(r − h/q)` in the last
//! denominator). It does not match the trace identity and is kept only for
//! diagnostics.

use num_traits::Signed;

use crate::error::{Error, Result};
use crate::scalar::{rat, rat_int, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GhVariant {
    #[default]
    Corrected,
    Transcribed,
}

/// Minimum of `Σ a_k²` over nonnegative integers `a_1..a_d` summing to `r`.
pub fn h_func(r: u64, d: u64) -> Result<u64> {
    if d == 0 {
        return Err(Error::InvalidArgument("h(r; d) needs d ≥ 1".into()));
    }
    let (f, rem) = (r / d, r % d);
    Ok(f * f * (d - rem) + rem * (f + 1) * (f + 1))
}

/// `h` under the chosen variant, as a rational.
pub fn h_value(r: u64, d: u64, variant: GhVariant) -> Result<Rational> {
    match variant {
        GhVariant::Corrected => Ok(rat_int(h_func(r, d)?)),
        GhVariant::Transcribed => {
            if d == 0 {
                return Err(Error::InvalidArgument("h(r; d) needs d ≥ 1".into()));
            }
            let f = r / d;
            let base = rat_int(f * f * (d + d * f - r));
            let tail = rat_int(r - d * f) * (rat(r as i64, d as i64) + rat(1, 1)).pow(2);
            Ok(base + tail)
        }
    }
}

/// `g(r; d, q, v)`, or `None` when either denominator is not positive.
pub fn g_func(r: u64, d: u64, q: u64, v: u64, variant: GhVariant) -> Result<Option<Rational>> {
    if d == 0 || q == 0 || v == 0 {
        return Err(Error::InvalidArgument("g(r; d, q, v) needs d, q, v ≥ 1".into()));
    }
    let h = h_value(r, d, variant)?;
    let (rr, qq, vv) = (rat_int(r), rat_int(q), rat_int(v));
    let first = rr.clone() - h / qq.clone();
    let mut second = rat_int(d * (q - 1)) - rr * rat_int(q - 1) / qq;
    second = match variant {
        GhVariant::Corrected => second - first.clone() / vv.clone(),
        GhVariant::Transcribed => second - vv.clone() * first.clone(),
    };
    if !first.is_positive() || !second.is_positive() {
        return Ok(None);
    }
    let tail = rat_int((v - 1) * (v - 1));
    Ok(Some(vv / first + tail / second))
}

/// Result of scanning `g` over `0 ≤ r ≤ ⌊dq/2⌋`.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlReplication {
    /// Smallest minimizer `R`.
    pub r: u64,
    /// `g(R)`.
    pub value: Rational,
    /// `(r, g(r))` for every scanned `r`; `None` where `g` is undefined.
    pub table: Vec<(u64, Option<Rational>)>,
}

impl ControlReplication {
    pub fn valid_range(&self) -> Vec<u64> {
        self.table.iter().filter(|(_, g)| g.is_some()).map(|(r, _)| *r).collect()
    }
}

pub fn optimal_control_replication(d: u64, q: u64, v: u64, variant: GhVariant) -> Result<ControlReplication> {
    let max = d * q / 2;
    let table = (0..=max)
        .map(|r| Ok((r, g_func(r, d, q, v, variant)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut best: Option<(u64, &Rational)> = None;
    for (r, g) in &table {
        if let Some(g) = g {
            if best.is_none_or(|(_, b)| g < b) {
                best = Some((*r, g));
            }
        }
    }
    let (r, value) = best.ok_or(Error::EmptyRange { max })?;
    let value = value.clone();
    Ok(ControlReplication { r, value, table })
}
