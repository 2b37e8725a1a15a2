//! Moments of the edge count `M` and the isolated-edge count `M1` of the
//! proximity graph of a Poisson field on the torus, and Monte Carlo checks of
//! their mean, variance scaling and concentration.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::pointfield::{ball_volume, sample_poisson_stream, BoxSpec, PointConfiguration};
use crate::proxgraph::{build_graph, component_census};
use crate::rng::trial_stream;
pub use crate::stats::MCEstimate;

fn check_box_and_distance(n: usize, half_side: f64, d: f64) -> Result<BoxSpec> {
    let bx = BoxSpec::torus(n, half_side)?;
    if !(d > 0.0 && d < half_side) {
        return Err(domain(format!(
            "distance must lie in (0, N) = (0, {half_side}), got {d}"
        )));
    }
    Ok(bx)
}

/// `E M = lambda^2 v_n(d) (2N)^n / 2`.
pub fn expected_m(n: usize, half_side: f64, d: f64, lambda: f64) -> Result<f64> {
    let bx = check_box_and_distance(n, half_side, d)?;
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(domain(format!("intensity must be nonnegative, got {lambda}")));
    }
    Ok(lambda * lambda * ball_volume(n, d)? * bx.volume() / 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
}

impl Bracket {
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// Bracket on `E M1` at unit intensity: the union of the two balls around an
/// isolated pair has volume between `v_n(d)` and `2 v_n(d)`.
pub fn expected_m1_bracket(n: usize, half_side: f64, d: f64) -> Result<Bracket> {
    let base = expected_m(n, half_side, d, 1.0)?;
    let v = ball_volume(n, d)?;
    Ok(Bracket {
        lo: base * (-2.0 * v).exp(),
        hi: base * (-v).exp(),
    })
}

/// `M(d, sigma)`, the number of pairs at distance `<= d`.
pub fn edge_count(config: &PointConfiguration, d: f64) -> f64 {
    build_graph(config, d)
        .map(|g| g.edge_count() as f64)
        .unwrap_or(f64::NAN)
}

/// `M1(d, sigma)`, the number of isolated edges.
pub fn isolated_edges(config: &PointConfiguration, d: f64) -> f64 {
    build_graph(config, d)
        .map(|g| component_census(&g).m1 as f64)
        .unwrap_or(f64::NAN)
}

fn statistic_values<F>(
    statistic: &F,
    bx: &BoxSpec,
    lambda: f64,
    trials: usize,
    seed: u64,
    block: u64,
) -> Result<Vec<f64>>
where
    F: Fn(&PointConfiguration) -> f64 + Sync,
{
    (0..trials as u64)
        .into_par_iter()
        .map(|t| sample_poisson_stream(bx, lambda, seed, trial_stream(block, t)).map(|cfg| statistic(&cfg)))
        .collect()
}

/// Sample mean, variance and standard error of `statistic` over independent
/// Poisson fields. Trial `t` draws from its own stream, so the result does
/// not depend on how trials are scheduled.
pub fn mc_estimate<F>(statistic: F, bx: &BoxSpec, lambda: f64, trials: usize, seed: u64) -> Result<MCEstimate>
where
    F: Fn(&PointConfiguration) -> f64 + Sync,
{
    if trials == 0 {
        return Err(domain("at least one trial is required"));
    }
    let values = statistic_values(&statistic, bx, lambda, trials, seed, 0)?;
    Ok(MCEstimate::from_values(&values))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceRow {
    pub half_side: f64,
    pub volume: f64,
    pub variance: f64,
    /// `Var(M) / (2N)^n`
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceScaling {
    pub rows: Vec<VarianceRow>,
    /// largest ratio over smallest
    pub spread: f64,
}

/// Empirical `Var(M) / (2N)^n` for each box size.
pub fn variance_scaling_check(
    n: usize,
    d: f64,
    half_sides: &[f64],
    trials: usize,
    seed: u64,
) -> Result<VarianceScaling> {
    if trials < 100 {
        return Err(domain(format!(
            "variance scaling needs at least 100 trials, got {trials}"
        )));
    }
    if half_sides.is_empty() {
        return Err(domain("no box sizes given"));
    }
    let mut rows = Vec::with_capacity(half_sides.len());
    for (block, &half_side) in half_sides.iter().enumerate() {
        let bx = check_box_and_distance(n, half_side, d)?;
        let values = statistic_values(
            &|c: &PointConfiguration| edge_count(c, d),
            &bx,
            1.0,
            trials,
            seed,
            block as u64,
        )?;
        let est = MCEstimate::from_values(&values);
        rows.push(VarianceRow {
            half_side,
            volume: bx.volume(),
            variance: est.variance,
            ratio: est.variance / bx.volume(),
        });
    }
    let max = rows.iter().map(|r| r.ratio).fold(f64::NEG_INFINITY, f64::max);
    let min = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    Ok(VarianceScaling {
        rows,
        spread: max / min,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExceedanceRow {
    pub half_side: f64,
    /// fraction of trials with `|M - E M| > eps ((2N)^n)^delta`
    pub fraction: f64,
    /// binomial standard error of `fraction`
    pub stderr: f64,
    /// Chebyshev bound `Var(M) / (eps^2 ((2N)^n)^(2 delta))`, empirical variance
    pub chebyshev: f64,
}

impl ExceedanceRow {
    pub fn within_chebyshev(&self) -> bool {
        self.fraction <= self.chebyshev + 3.0 * self.stderr
    }
}

/// Exceedance frequency of the normalized deviation of `M` per box size.
pub fn concentration_check(
    n: usize,
    d: f64,
    half_sides: &[f64],
    delta: f64,
    epsilon: f64,
    trials: usize,
    seed: u64,
) -> Result<Vec<ExceedanceRow>> {
    if !(delta > 0.5) {
        return Err(domain(format!("delta must exceed 1/2, got {delta}")));
    }
    if !(epsilon > 0.0) {
        return Err(domain(format!("epsilon must be positive, got {epsilon}")));
    }
    if trials == 0 {
        return Err(domain("at least one trial is required"));
    }
    let mut rows = Vec::with_capacity(half_sides.len());
    for (block, &half_side) in half_sides.iter().enumerate() {
        let bx = check_box_and_distance(n, half_side, d)?;
        let mean = expected_m(n, half_side, d, 1.0)?;
        let scale = bx.volume().powf(delta);
        let values = statistic_values(
            &|c: &PointConfiguration| edge_count(c, d),
            &bx,
            1.0,
            trials,
            seed,
            block as u64,
        )?;
        let exceed = values.iter().filter(|&&m| ((m - mean) / scale).abs() > epsilon).count();
        let p = exceed as f64 / trials as f64;
        let est = MCEstimate::from_values(&values);
        rows.push(ExceedanceRow {
            half_side,
            fraction: p,
            stderr: (p * (1.0 - p) / trials as f64).sqrt(),
            chebyshev: est.variance / (epsilon * epsilon * scale * scale),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn expected_m_examples() {
        let m = expected_m(2, 5.0, 0.5, 1.0).unwrap();
        assert!((m - 12.5 * PI).abs() < 1e-12);
        assert!((m - 39.269_908_2).abs() < 1e-6);
        assert_eq!(expected_m(2, 5.0, 0.5, 0.0).unwrap(), 0.0);
        let one = expected_m(3, 4.0, 0.7, 1.3).unwrap();
        let two = expected_m(3, 4.0, 0.7, 2.6).unwrap();
        assert!((two / one - 4.0).abs() < 1e-12);
        assert!(expected_m(2, 5.0, 5.0, 1.0).is_err());
        assert!(expected_m(2, 5.0, 0.5, -1.0).is_err());
    }

    #[test]
    fn bracket_examples() {
        let b = expected_m1_bracket(2, 5.0, 1.0 / PI.sqrt()).unwrap();
        assert!((b.lo - 6.766_764_2).abs() < 1e-6);
        assert!((b.hi - 18.393_972_1).abs() < 1e-6);
        let tiny = expected_m1_bracket(2, 5.0, 1e-7).unwrap();
        let m = expected_m(2, 5.0, 1e-7, 1.0).unwrap();
        assert!((tiny.lo / m - 1.0).abs() < 1e-12 && (tiny.hi / m - 1.0).abs() < 1e-12);
        for n in 1..4 {
            for d in [0.1, 0.5, 1.5] {
                let b = expected_m1_bracket(n, 3.0, d).unwrap();
                assert!(b.lo <= b.hi);
            }
        }
    }

    #[test]
    fn mc_estimate_examples() {
        let bx = BoxSpec::torus(2, 5.0).unwrap();
        let c = mc_estimate(|_| 4.0, &bx, 1.0, 50, 1).unwrap();
        assert_eq!(c.variance, 0.0);
        let count = mc_estimate(|c| c.len() as f64, &bx, 1.0, 400, 2).unwrap();
        assert!(count.within(100.0, 3.0), "{count:?}");
        let m = mc_estimate(|c| edge_count(c, 0.5), &bx, 1.0, 400, 3).unwrap();
        assert!(m.within(expected_m(2, 5.0, 0.5, 1.0).unwrap(), 3.0), "{m:?}");
        assert_eq!(m, mc_estimate(|c| edge_count(c, 0.5), &bx, 1.0, 400, 3).unwrap());
        assert!(mc_estimate(|_| 0.0, &bx, 1.0, 0, 3).is_err());
    }

    #[test]
    fn edge_count_mean_over_grid() {
        // n in {1, 2, 3}, d with v_n(d) in {0.5, 1}
        for n in 1..=3usize {
            for v in [0.5, 1.0] {
                let d = (v / ball_volume(n, 1.0).unwrap()).powf(1.0 / n as f64);
                let half_side = match n {
                    1 => 40.0,
                    2 => 5.0,
                    _ => 3.0,
                };
                let bx = BoxSpec::torus(n, half_side).unwrap();
                let m = mc_estimate(|c| edge_count(c, d), &bx, 1.0, 300, 10 + n as u64).unwrap();
                assert!(
                    m.within(expected_m(n, half_side, d, 1.0).unwrap(), 3.0),
                    "n={n} v={v} {m:?}"
                );
                let m1 = mc_estimate(|c| isolated_edges(c, d), &bx, 1.0, 300, 20 + n as u64).unwrap();
                let b = expected_m1_bracket(n, half_side, d).unwrap();
                assert!(
                    m1.mean >= b.lo - 3.0 * m1.stderr && m1.mean <= b.hi + 3.0 * m1.stderr,
                    "n={n} v={v} {m1:?} {b:?}"
                );
            }
        }
    }

    #[test]
    fn scaling_and_concentration_contracts() {
        assert!(variance_scaling_check(2, 0.5, &[4.0], 99, 1).is_err());
        let a = variance_scaling_check(2, 0.5, &[3.0, 4.0], 200, 1).unwrap();
        let b = variance_scaling_check(2, 0.5, &[3.0, 4.0], 200, 1).unwrap();
        assert_eq!(a, b);
        assert!(concentration_check(2, 0.5, &[4.0], 0.5, 1.0, 10, 1).is_err());
        assert!(concentration_check(2, 0.5, &[4.0], 0.7, 0.0, 10, 1).is_err());
        let over = concentration_check(2, 0.5, &[4.0], 1.0, 1.0, 300, 5).unwrap();
        assert_eq!(over[0].fraction, 0.0);
        let e1 = concentration_check(2, 0.5, &[4.0], 2.0 / 3.0, 1.0, 300, 6).unwrap();
        let e2 = concentration_check(2, 0.5, &[4.0], 2.0 / 3.0, 2.0, 300, 6).unwrap();
        assert!(e2[0].fraction <= e1[0].fraction);
    }
}
