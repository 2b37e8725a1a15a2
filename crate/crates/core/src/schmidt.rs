//! Large-dimension law of lattice packing densities: the limiting
//! distribution of `2^n Delta` and the remainder bracket at finite `n`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::pointfield::unit_ball_volume;

/// `1 - exp(-x/2)`, the limit of `F_n(x)` as `n` grows.
pub fn limit_cdf(x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(domain(format!("x must be nonnegative, got {x}")));
    }
    Ok(-(-x / 2.0).exp_m1())
}

/// Remainder bound `6 (3/4)^(n/2) e^(4 vol) + vol^(n-1) n^(1-n) e^(vol + n)`,
/// valid for `n >= 13` and `vol <= n - 1`. Both terms are formed in log space.
pub fn remainder_bound(n: usize, vol: f64) -> Result<f64> {
    if n < 13 {
        return Err(domain(format!("remainder bound requires n >= 13, got n = {n}")));
    }
    if !(vol >= 0.0) {
        return Err(domain(format!("volume must be nonnegative, got {vol}")));
    }
    if vol > (n - 1) as f64 {
        return Err(domain(format!(
            "remainder bound requires vol <= n - 1 = {}, got {vol}",
            n - 1
        )));
    }
    let nf = n as f64;
    let first = 6f64.ln() + nf / 2.0 * 0.75f64.ln() + 4.0 * vol;
    let second = if vol == 0.0 {
        f64::NEG_INFINITY
    } else {
        (nf - 1.0) * vol.ln() - (nf - 1.0) * nf.ln() + vol + nf
    };
    let hi = first.max(second);
    Ok(hi.exp() * (1.0 + (first.min(second) - hi).exp()))
}

/// Bracket on `F_n(x)` from the remainder bound with `vol = x/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CdfBracket {
    pub n: usize,
    pub x: f64,
    /// clamped to `[0, 1]`
    pub lower: f64,
    /// clamped to `[0, 1]`
    pub upper: f64,
    /// the remainder bound `R`
    pub remainder: f64,
    /// unclamped width `2 e^(-x/2) R`
    pub width: f64,
}

impl CdfBracket {
    pub fn contains(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }
}

pub fn fn_bracket(n: usize, x: f64) -> Result<CdfBracket> {
    if !(x >= 0.0) {
        return Err(domain(format!("x must be nonnegative, got {x}")));
    }
    let r = remainder_bound(n, x / 2.0)?;
    let tail = (-x / 2.0).exp();
    Ok(CdfBracket {
        n,
        x,
        lower: (1.0 - tail * (1.0 + r)).clamp(0.0, 1.0),
        upper: (1.0 - tail * (1.0 - r)).clamp(0.0, 1.0),
        remainder: r,
        width: 2.0 * tail * r,
    })
}

/// `d` with `v_n d^n = x`: the minimal distance of a unimodular lattice whose
/// normalized density `2^n Delta` equals `x`.
pub fn min_distance_for_density(n: usize, x: f64) -> Result<f64> {
    if n == 0 {
        return Err(domain("dimension must be at least 1"));
    }
    if !(x >= 0.0) {
        return Err(domain(format!("x must be nonnegative, got {x}")));
    }
    Ok((x / unit_ball_volume(n)).powf(1.0 / n as f64))
}

/// One row of the tabulated bracket.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchmidtRow {
    pub n: usize,
    pub x: f64,
    pub limit: f64,
    pub bracket: CdfBracket,
    pub min_distance: f64,
}

/// Bracket table over a grid; cells whose preconditions fail are skipped.
pub fn schmidt_table(dims: &[usize], xs: &[f64]) -> Result<Vec<SchmidtRow>> {
    let mut rows = Vec::new();
    for &n in dims {
        for &x in xs {
            let Ok(bracket) = fn_bracket(n, x) else { continue };
            rows.push(SchmidtRow {
                n,
                x,
                limit: limit_cdf(x)?,
                bracket,
                min_distance: min_distance_for_density(n, x)?,
            });
        }
    }
    Ok(rows)
}

pub const SCHMIDT_CSV_HEADER: &str = "n,x,limit_cdf,lower,upper,width,remainder,min_distance";

pub fn schmidt_to_csv(rows: &[SchmidtRow]) -> String {
    let mut out = String::from(SCHMIDT_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.n, r.x, r.limit, r.bracket.lower, r.bracket.upper, r.bracket.width, r.bracket.remainder, r.min_distance
        ));
    }
    out
}
