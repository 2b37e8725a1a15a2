use packlab_core::decimate::{explicit_lower, nu_bounds};

use crate::CliError;

pub const FIG1_CSV_HEADER: &str = "curve_id,nu,value";

/// Points of the explicit curve `2^(1-n) nu (1 - nu)`, at `nu = k / 100`.
const EXPLICIT_STEPS: usize = 100;

/// Traces `(nu_i(d), rhs_i(d))` for the three parametric bounds over `d_grid`,
/// then the explicit lower curve. Rows whose fraction is not positive are
/// left out.
pub fn emit_fig1_curves(n: usize, d_grid: &[f64]) -> Result<String, CliError> {
    if d_grid.is_empty() {
        return Err(CliError::Validation("fig1 needs a nonempty distance grid".into()));
    }
    let bounds = d_grid.iter().map(|&d| nu_bounds(n, d)).collect::<Result<Vec<_>, _>>()?;
    let mut out = String::from(FIG1_CSV_HEADER);
    out.push('\n');
    for b in &bounds {
        if b.nu1 > 0.0 {
            out.push_str(&format!("lower13,{},{}\n", b.nu1, b.rhs13));
        }
    }
    for b in &bounds {
        out.push_str(&format!("upper14,{},{}\n", b.nu2, b.rhs14));
    }
    for b in &bounds {
        if b.nu3 > 0.0 {
            out.push_str(&format!("lower15,{},{}\n", b.nu3, b.rhs15));
        }
    }
    for k in 1..EXPLICIT_STEPS {
        let nu = k as f64 / EXPLICIT_STEPS as f64;
        out.push_str(&format!("explicit,{},{}\n", nu, explicit_lower(n, nu)?));
    }
    Ok(out)
}
