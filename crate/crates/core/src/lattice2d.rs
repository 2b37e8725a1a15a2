//! Random planar lattices: Haar sampling on the modular domain
//! `F = {x^2 + y^2 >= 1, |x| <= 1/2}` and the law of the packing density.
//!
//! With the shortest basis vector fixed to 1 and the second basis vector at
//! `z = x + iy` in `F`, the lattice has density `pi / (4y)`. In coordinates
//! `(x, delta)` the Haar probability measure is flat with density `12/pi^2`,
//! so rejection from the rectangle `[-1/2, 1/2] x (0, pi/sqrt(12)]` is exact.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::quad::integrate;
use crate::rng::{stream_rng, StreamRng};

/// `pi / sqrt(12)`, the hexagonal packing density.
pub const MAX_DENSITY: f64 = 0.906_899_682_117_108_9;

const FLAT_DENSITY: f64 = 12.0 / (PI * PI);
const QUAD_TOL: f64 = 1e-10;

/// A point of the modular domain with its lattice packing density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModularSample {
    pub x: f64,
    pub y: f64,
    pub delta: f64,
}

impl ModularSample {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        Ok(ModularSample {
            x,
            y,
            delta: lattice_density(x, y)?,
        })
    }
}

fn in_domain(x: f64, y: f64) -> bool {
    x.abs() <= 0.5 && x * x + y * y >= 1.0 - 1e-12 && y > 0.0
}

/// `pi / (4y)` for `(x, y)` in the modular domain.
pub fn lattice_density(x: f64, y: f64) -> Result<f64> {
    if !(x.is_finite() && y.is_finite()) || !in_domain(x, y) {
        return Err(domain(format!("({x}, {y}) lies outside the modular domain")));
    }
    Ok(PI / (4.0 * y))
}

fn propose(rng: &mut StreamRng) -> (f64, f64) {
    let x = rng.random::<f64>() - 0.5;
    // (0, max] rather than [0, max)
    let delta = MAX_DENSITY * (1.0 - rng.random::<f64>());
    (x, delta)
}

fn accept(x: f64, delta: f64) -> bool {
    let y = PI / (4.0 * delta);
    x * x + y * y >= 1.0
}

fn draw(rng: &mut StreamRng) -> (ModularSample, u64) {
    let mut proposals = 0;
    loop {
        proposals += 1;
        let (x, delta) = propose(rng);
        if accept(x, delta) {
            let y = PI / (4.0 * delta);
            return (ModularSample { x, y, delta }, proposals);
        }
    }
}

/// One Haar-distributed lattice.
pub fn sample_modular(seed: u64) -> ModularSample {
    draw(&mut stream_rng(seed, 0)).0
}

/// `count` samples from one stream, with the number of proposals used.
pub fn sample_modular_batch(count: usize, seed: u64) -> (Vec<ModularSample>, u64) {
    let mut rng = stream_rng(seed, 0);
    let mut proposals = 0;
    let samples = (0..count)
        .map(|_| {
            let (s, p) = draw(&mut rng);
            proposals += p;
            s
        })
        .collect();
    (samples, proposals)
}

/// Fraction of `proposals` rectangle draws that land in the domain.
pub fn acceptance_rate(proposals: usize, seed: u64) -> f64 {
    let mut rng = stream_rng(seed, 1);
    let hits = (0..proposals)
        .filter(|_| {
            let (x, delta) = propose(&mut rng);
            accept(x, delta)
        })
        .count();
    hits as f64 / proposals as f64
}

/// Expected acceptance rate: domain area `pi^2/12` over rectangle area `pi/sqrt(12)`.
pub const ACCEPTANCE_RATE: f64 = MAX_DENSITY;

/// Density of the packing density of a Haar-random planar lattice.
pub fn pdf_delta(a: f64) -> Result<f64> {
    if !(a >= 0.0) {
        return Err(domain(format!("density argument must be nonnegative, got {a}")));
    }
    Ok(pdf_unchecked(a))
}

fn pdf_unchecked(a: f64) -> f64 {
    if a <= PI / 4.0 {
        FLAT_DENSITY
    } else if a < MAX_DENSITY {
        upper_branch(a)
    } else {
        0.0
    }
}

/// The density on `[pi/4, pi/sqrt(12)]`, where the horizontal slice of the
/// domain at height `y = pi/(4a)` is shorter than 1.
fn upper_branch(a: f64) -> f64 {
    let r = PI / (4.0 * a);
    FLAT_DENSITY * (1.0 - 2.0 * (1.0 - r * r).max(0.0).sqrt())
}

/// Gap between the two branches of the density at `pi/4`.
pub fn branch_gap_at_quarter_pi() -> f64 {
    (upper_branch(PI / 4.0) - FLAT_DENSITY).abs()
}

/// Distribution function, by adaptive quadrature of [`pdf_delta`].
pub fn cdf_delta(a: f64) -> Result<f64> {
    if !(a >= 0.0) {
        return Err(domain(format!("density argument must be nonnegative, got {a}")));
    }
    let flat_end = PI / 4.0;
    let v = if a <= flat_end {
        FLAT_DENSITY * a
    } else {
        FLAT_DENSITY * flat_end + integrate(pdf_unchecked, flat_end, a.min(MAX_DENSITY), QUAD_TOL)
    };
    Ok(v.clamp(0.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaMoments {
    /// `(3/8) ln 3`
    pub mean: f64,
    /// `pi/(8 sqrt 3) - (9/64) (ln 3)^2`
    pub variance: f64,
    /// `pi / sqrt 12`
    pub max: f64,
    pub mean_quadrature: f64,
    pub variance_quadrature: f64,
}

fn moment_quadrature(k: i32) -> f64 {
    let f = |a: f64| a.powi(k) * pdf_unchecked(a);
    integrate(f, 0.0, PI / 4.0, 1e-13) + integrate(f, PI / 4.0, MAX_DENSITY, 1e-13)
}

pub fn delta_moments() -> DeltaMoments {
    let ln3 = 3f64.ln();
    let mean_q = moment_quadrature(1);
    DeltaMoments {
        mean: 3.0 / 8.0 * ln3,
        variance: PI / (8.0 * 3f64.sqrt()) - 9.0 / 64.0 * ln3 * ln3,
        max: PI / 12f64.sqrt(),
        mean_quadrature: mean_q,
        variance_quadrature: moment_quadrature(2) - mean_q * mean_q,
    }
}

/// Normalization check: integral of the density over its support.
pub fn pdf_total_mass() -> f64 {
    moment_quadrature(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Oracle: closed-form antiderivative of the second branch,
    /// `int sqrt(1 - c^2/t^2) dt = sqrt(t^2 - c^2) - c arccos(c/t)`.
    fn cdf_closed_form(a: f64) -> f64 {
        let c = PI / 4.0;
        if a <= c {
            FLAT_DENSITY * a
        } else {
            let a = a.min(MAX_DENSITY);
            let g = |t: f64| (t * t - c * c).sqrt() - c * (c / t).acos();
            FLAT_DENSITY * (a - 2.0 * (g(a) - g(c)))
        }
    }

    #[test]
    fn max_density_constant() {
        assert_eq!(MAX_DENSITY, PI / 12f64.sqrt());
    }

    #[test]
    fn lattice_density_examples() {
        assert!((lattice_density(0.0, 1.0).unwrap() - PI / 4.0).abs() < 1e-15);
        assert!((lattice_density(0.5, 3f64.sqrt() / 2.0).unwrap() - 0.906_899_7).abs() < 1e-7);
        assert!((lattice_density(0.1, 2.0).unwrap() - PI / 8.0).abs() < 1e-15);
        assert!(lattice_density(0.6, 2.0).is_err());
        assert!(lattice_density(0.0, 0.9).is_err());
    }

    #[test]
    fn pdf_examples() {
        assert!((pdf_delta(0.5).unwrap() - 1.215_854_2).abs() < 1e-7);
        assert!((pdf_delta(0.9).unwrap() - 0.0284).abs() < 5e-5);
        assert_eq!(pdf_delta(MAX_DENSITY).unwrap(), 0.0);
        assert_eq!(pdf_delta(1.0).unwrap(), 0.0);
        assert!(pdf_delta(-0.1).is_err());
        // continuity where the square root vanishes
        assert!(branch_gap_at_quarter_pi() < 1e-12);
        assert!(upper_branch(MAX_DENSITY).abs() < 1e-12);
    }

    #[test]
    fn pdf_is_the_derivative_of_the_cdf() {
        let h = 1e-6;
        for a in [0.3, 0.8, 0.85, 0.9] {
            let fd = (cdf_delta(a + h).unwrap() - cdf_delta(a - h).unwrap()) / (2.0 * h);
            assert!((fd - pdf_delta(a).unwrap()).abs() < 1e-4, "a={a}");
        }
    }

    #[test]
    fn cdf_examples() {
        assert!((cdf_delta(PI / 4.0).unwrap() - 3.0 / PI).abs() < 1e-12);
        assert!((cdf_delta(PI / 4.0).unwrap() - 0.954_929_7).abs() < 1e-7);
        assert_eq!(cdf_delta(0.0).unwrap(), 0.0);
        assert!((cdf_delta(MAX_DENSITY).unwrap() - 1.0).abs() < 1e-9);
        assert!((cdf_delta(2.0).unwrap() - 1.0).abs() < 1e-9);
        assert!(cdf_delta(-1.0).is_err());
        for k in 0..=100 {
            let a = k as f64 / 100.0;
            assert!((cdf_delta(a).unwrap() - cdf_closed_form(a)).abs() < 1e-10, "a={a}");
        }
        let mut prev = 0.0;
        for k in 0..=500 {
            let v = cdf_delta(k as f64 * MAX_DENSITY / 500.0).unwrap();
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn moments_examples() {
        let m = delta_moments();
        assert!((m.mean - 0.411_979_6).abs() < 1e-7);
        assert!((m.variance - 0.056_997_7).abs() < 1e-7);
        assert!((m.max - 0.906_899_7).abs() < 1e-7);
        assert!((m.mean_quadrature - m.mean).abs() < 1e-8);
        assert!((m.variance_quadrature - m.variance).abs() < 1e-8);
        assert!((pdf_total_mass() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn samples_lie_in_the_domain() {
        let (samples, proposals) = sample_modular_batch(5000, 4);
        assert!(proposals >= 5000);
        for s in &samples {
            assert!(in_domain(s.x, s.y), "{s:?}");
            assert!(s.delta > 0.0 && s.delta <= MAX_DENSITY);
            assert!((s.delta - PI / (4.0 * s.y)).abs() < 1e-15);
        }
        assert_eq!(sample_modular(9), sample_modular(9));
    }

    #[test]
    fn acceptance_rate_is_the_area_ratio() {
        // oracle: domain area by quadrature of the flat (x, delta) density
        let region = integrate(
            |x: f64| {
                // delta ranges over (0, pi / (4 sqrt(1 - x^2))]
                PI / (4.0 * (1.0 - x * x).sqrt())
            },
            -0.5,
            0.5,
            1e-12,
        );
        let ratio = region / MAX_DENSITY;
        assert!((region - PI * PI / 12.0).abs() < 1e-10);
        assert!((ratio - ACCEPTANCE_RATE).abs() < 1e-10);
        let n = 100_000;
        let rate = acceptance_rate(n, 2);
        let se = (ratio * (1.0 - ratio) / n as f64).sqrt();
        assert!((rate - ratio).abs() < 3.0 * se, "{rate}");
    }
}
