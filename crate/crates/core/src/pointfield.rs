//! Boxes, metrics, ball volumes, packing densities and the Poisson sampler.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::rng::{stream_rng, StreamRng};

/// How distances are measured near the faces of the box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// Opposite faces are identified; distances use the minimal image.
    Torus,
    /// Plain Euclidean distance; balls are cut off at the box faces.
    Clipped,
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Convention::Torus => "torus",
            Convention::Clipped => "clipped",
        })
    }
}

impl FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "torus" => Ok(Convention::Torus),
            "clipped" => Ok(Convention::Clipped),
            other => Err(domain(format!("unknown convention `{other}`"))),
        }
    }
}

/// The cube `[-N, N)^n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxSpec {
    dim: usize,
    half_side: f64,
    convention: Convention,
}

impl BoxSpec {
    pub fn new(dim: usize, half_side: f64, convention: Convention) -> Result<Self> {
        if dim == 0 {
            return Err(domain("box dimension must be at least 1"));
        }
        if !(half_side > 0.0 && half_side.is_finite()) {
            return Err(domain(format!(
                "half side must be positive and finite, got {half_side}"
            )));
        }
        Ok(BoxSpec {
            dim,
            half_side,
            convention,
        })
    }

    pub fn torus(dim: usize, half_side: f64) -> Result<Self> {
        Self::new(dim, half_side, Convention::Torus)
    }

    pub fn clipped(dim: usize, half_side: f64) -> Result<Self> {
        Self::new(dim, half_side, Convention::Clipped)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_side(&self) -> f64 {
        self.half_side
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn side(&self) -> f64 {
        2.0 * self.half_side
    }

    /// `(2N)^n`.
    pub fn volume(&self) -> f64 {
        self.side().powi(self.dim as i32)
    }

    /// Same box with a different convention.
    pub fn with_convention(&self, convention: Convention) -> Self {
        BoxSpec { convention, ..*self }
    }

    /// Representative of `x` in `[-N, N)` modulo `2N`.
    pub fn wrap(&self, x: f64) -> f64 {
        let n = self.half_side;
        let side = self.side();
        let mut y = x - side * ((x + n) / side).floor();
        if y >= n {
            y -= side;
        }
        if y < -n {
            y = -n;
        }
        y
    }

    /// Distance under this box's convention.
    pub fn distance(&self, p: &[f64], q: &[f64]) -> f64 {
        match self.convention {
            Convention::Torus => self.torus_distance_unchecked(p, q),
            Convention::Clipped => euclidean(p, q),
        }
    }

    fn torus_distance_unchecked(&self, p: &[f64], q: &[f64]) -> f64 {
        let side = self.side();
        p.iter()
            .zip(q)
            .map(|(a, b)| {
                let diff = (a - b).abs() % side;
                let d = diff.min(side - diff);
                d * d
            })
            .sum::<f64>()
            .sqrt()
    }
}

fn euclidean(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// Volume of the unit ball in `R^n`, by the two-step recurrence
/// `v_n = v_{n-2} * 2 pi / n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    let mut v = if n.is_multiple_of(2) { 1.0 } else { 2.0 };
    let mut k = if n.is_multiple_of(2) { 2 } else { 3 };
    while k <= n {
        v *= 2.0 * PI / k as f64;
        k += 2;
    }
    v
}

/// `v_n(r) = r^n v_n(1)`.
pub fn ball_volume(n: usize, r: f64) -> Result<f64> {
    if n == 0 {
        return Err(domain("ball dimension must be at least 1"));
    }
    if !(r >= 0.0) {
        return Err(domain(format!("radius must be nonnegative, got {r}")));
    }
    Ok(unit_ball_volume(n) * r.powi(n as i32))
}

/// Minimal-image distance between `p` and `q` on the torus of `bx`.
pub fn torus_distance(p: &[f64], q: &[f64], bx: &BoxSpec) -> Result<f64> {
    if p.len() != bx.dim || q.len() != bx.dim {
        return Err(domain(format!(
            "dimension mismatch: box has {}, points have {} and {}",
            bx.dim,
            p.len(),
            q.len()
        )));
    }
    Ok(bx.torus_distance_unchecked(p, q))
}

/// A finite point set in a box, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointConfiguration {
    bx: BoxSpec,
    coords: Vec<f64>,
}

impl PointConfiguration {
    /// Builds a configuration from flat row-major coordinates.
    ///
    /// On the torus every coordinate is wrapped into `[-N, N)`. In the clipped
    /// convention a coordinate outside the box is an error.
    pub fn from_flat(bx: BoxSpec, mut coords: Vec<f64>) -> Result<Self> {
        if !coords.len().is_multiple_of(bx.dim) {
            return Err(domain(format!(
                "{} coordinates do not split into points of dimension {}",
                coords.len(),
                bx.dim
            )));
        }
        for c in coords.iter_mut() {
            if !c.is_finite() {
                return Err(domain("coordinates must be finite"));
            }
            match bx.convention {
                Convention::Torus => *c = bx.wrap(*c),
                Convention::Clipped => {
                    if !(-bx.half_side..bx.half_side).contains(c) {
                        return Err(domain(format!("coordinate {c} lies outside [-{0}, {0})", bx.half_side)));
                    }
                }
            }
        }
        Ok(PointConfiguration { bx, coords })
    }

    pub fn new(bx: BoxSpec, points: &[Vec<f64>]) -> Result<Self> {
        if let Some(p) = points.iter().find(|p| p.len() != bx.dim) {
            return Err(domain(format!(
                "point of dimension {} in a box of dimension {}",
                p.len(),
                bx.dim
            )));
        }
        Self::from_flat(bx, points.concat())
    }

    pub fn empty(bx: BoxSpec) -> Self {
        PointConfiguration { bx, coords: Vec::new() }
    }

    pub fn box_spec(&self) -> &BoxSpec {
        &self.bx
    }

    pub fn dim(&self) -> usize {
        self.bx.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.bx.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.bx.dim..(i + 1) * self.bx.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.bx.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.bx.distance(self.point(i), self.point(j))
    }

    /// Sub-configuration of the given indices, in the given order.
    pub fn select(&self, indices: &[usize]) -> Self {
        let mut coords = Vec::with_capacity(indices.len() * self.bx.dim);
        for &i in indices {
            coords.extend_from_slice(self.point(i));
        }
        PointConfiguration { bx: self.bx, coords }
    }

    /// Same points with the box convention switched (coordinates are already
    /// inside `[-N, N)` so no re-wrapping is needed).
    pub fn with_convention(&self, convention: Convention) -> Self {
        PointConfiguration {
            bx: self.bx.with_convention(convention),
            coords: self.coords.clone(),
        }
    }

    /// Serializes to the point-file format.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "# dim={} half_side={} convention={}\n",
            self.bx.dim, self.bx.half_side, self.bx.convention
        );
        for p in self.points() {
            let line: Vec<String> = p.iter().map(|c| format!("{c}")).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }

    /// Parses the point-file format.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "empty point file".into(),
        })?;
        let bx = parse_header(header)?;
        let mut coords = Vec::new();
        for (idx, line) in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let row: std::result::Result<Vec<f64>, _> = line.split_whitespace().map(str::parse::<f64>).collect();
            let row = row.map_err(|e| Error::Parse {
                line: idx + 1,
                msg: e.to_string(),
            })?;
            if row.len() != bx.dim {
                return Err(Error::Parse {
                    line: idx + 1,
                    msg: format!("expected {} coordinates, found {}", bx.dim, row.len()),
                });
            }
            coords.extend(row);
        }
        Self::from_flat(bx, coords)
    }
}

fn parse_header(header: &str) -> Result<BoxSpec> {
    let bad = |msg: String| Error::Parse { line: 1, msg };
    let body = header
        .strip_prefix('#')
        .ok_or_else(|| bad("header must start with `#`".into()))?;
    let (mut dim, mut half_side, mut convention) = (None, None, None);
    for field in body.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| bad(format!("malformed header field `{field}`")))?;
        match key {
            "dim" => dim = Some(value.parse::<usize>().map_err(|e| bad(e.to_string()))?),
            "half_side" => half_side = Some(value.parse::<f64>().map_err(|e| bad(e.to_string()))?),
            "convention" => convention = Some(value.parse::<Convention>().map_err(|e| bad(e.to_string()))?),
            _ => return Err(bad(format!("unknown header field `{key}`"))),
        }
    }
    match (dim, half_side, convention) {
        (Some(d), Some(n), Some(c)) => BoxSpec::new(d, n, c).map_err(|e| bad(e.to_string())),
        _ => Err(bad("header needs dim, half_side and convention".into())),
    }
}

/// Smallest pairwise distance `d(sigma_N)` under the box convention.
pub fn min_spacing(config: &PointConfiguration) -> Result<f64> {
    let n = config.len();
    if n < 2 {
        return Err(Error::UndefinedSpacing(n));
    }
    let mut best = f64::INFINITY;
    for i in 0..n {
        let p = config.point(i);
        for j in (i + 1)..n {
            let d = config.bx.distance(p, config.point(j));
            if d < best {
                best = d;
            }
        }
    }
    Ok(best)
}

/// Packing density on the torus: `|sigma| v_n(d/2) / (2N)^n`.
pub fn packing_density_torus(config: &PointConfiguration) -> Result<f64> {
    if config.bx.convention != Convention::Torus {
        return Err(domain("torus packing density needs a torus configuration"));
    }
    let d = min_spacing(config)?;
    density_from_spacing(&config.bx, config.len(), d)
}

/// `count * v_n(spacing / 2) / (2N)^n`.
pub fn density_from_spacing(bx: &BoxSpec, count: usize, spacing: f64) -> Result<f64> {
    Ok(count as f64 * ball_volume(bx.dim, spacing / 2.0)? / bx.volume())
}

/// Monte Carlo value with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub stderr: f64,
}

/// Hit-or-miss estimate of the clipped packing density: the fraction of the
/// box covered by balls of radius `d/2` around the points.
pub fn packing_density_clipped_mc(config: &PointConfiguration, samples: usize, seed: u64) -> Result<Estimate> {
    if config.bx.convention != Convention::Clipped {
        return Err(domain("clipped packing density needs a clipped configuration"));
    }
    if samples == 0 {
        return Err(domain("at least one sample is required"));
    }
    let radius = min_spacing(config)? / 2.0;
    let r2 = radius * radius;
    let dim = config.dim();
    let mut rng = stream_rng(seed, 0);
    let mut probe = vec![0.0; dim];
    let mut hits = 0usize;
    for _ in 0..samples {
        for c in probe.iter_mut() {
            *c = uniform_in(&mut rng, &config.bx);
        }
        let covered = config
            .points()
            .any(|p| p.iter().zip(&probe).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() <= r2);
        if covered {
            hits += 1;
        }
    }
    let p = hits as f64 / samples as f64;
    Ok(Estimate {
        value: p,
        stderr: (p * (1.0 - p) / samples as f64).sqrt(),
    })
}

fn uniform_in(rng: &mut StreamRng, bx: &BoxSpec) -> f64 {
    let u: f64 = rng.random();
    let x = -bx.half_side + bx.side() * u;
    if x >= bx.half_side {
        -bx.half_side
    } else {
        x
    }
}

/// Poisson field of intensity `lambda` in the box: a Poisson(lambda (2N)^n)
/// count, then that many independent uniform points.
pub fn sample_poisson(bx: &BoxSpec, lambda: f64, seed: u64) -> Result<PointConfiguration> {
    sample_poisson_stream(bx, lambda, seed, 0)
}

/// [`sample_poisson`] on an explicit random stream.
pub fn sample_poisson_stream(bx: &BoxSpec, lambda: f64, seed: u64, stream: u64) -> Result<PointConfiguration> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(domain(format!("intensity must be nonnegative, got {lambda}")));
    }
    let mean = lambda * bx.volume();
    if mean == 0.0 {
        return Ok(PointConfiguration::empty(*bx));
    }
    let mut rng = stream_rng(seed, stream);
    let poisson = Poisson::new(mean).map_err(|e| domain(e.to_string()))?;
    let count = poisson.sample(&mut rng) as usize;
    let coords = (0..count * bx.dim).map(|_| uniform_in(&mut rng, bx)).collect();
    Ok(PointConfiguration { bx: *bx, coords })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn torus(dim: usize, n: f64) -> BoxSpec {
        BoxSpec::torus(dim, n).unwrap()
    }

    #[test]
    fn ball_volume_examples() {
        assert_eq!(ball_volume(1, 1.0).unwrap(), 2.0);
        assert!((ball_volume(2, 1.0).unwrap() - PI).abs() < 1e-15);
        assert!((ball_volume(2, 0.5).unwrap() - PI / 4.0).abs() < 1e-15);
        assert!((ball_volume(3, 1.0).unwrap() - 4.0 * PI / 3.0).abs() < 1e-14);
        assert!(ball_volume(0, 1.0).is_err());
        assert!(ball_volume(2, -0.1).is_err());
    }

    #[test]
    fn ball_volume_scales_as_r_to_the_n() {
        for n in 1..=12 {
            for r in [0.5, 2.0] {
                let ratio = ball_volume(n, r).unwrap() / ball_volume(n, 1.0).unwrap();
                let expect = r.powi(n as i32);
                assert!(((ratio - expect) / expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn ball_volume_matches_gamma_formula() {
        // pi^(n/2) / Gamma(n/2 + 1) with Gamma evaluated at half integers by hand
        let gamma_half = |m: usize| -> f64 {
            // Gamma(m/2)
            if m.is_multiple_of(2) {
                (1..m / 2).map(|k| k as f64).product()
            } else {
                let mut g = PI.sqrt();
                let mut x = 0.5;
                while x < m as f64 / 2.0 - 0.25 {
                    g *= x;
                    x += 1.0;
                }
                g
            }
        };
        for n in 1..=20 {
            let expect = PI.powf(n as f64 / 2.0) / gamma_half(n + 2);
            let got = unit_ball_volume(n);
            assert!(((got - expect) / expect).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn torus_distance_examples() {
        let b1 = torus(1, 1.0);
        assert_eq!(torus_distance(&[0.3], &[0.3], &b1).unwrap(), 0.0);
        assert!((torus_distance(&[-0.9], &[0.9], &b1).unwrap() - 0.2).abs() < 1e-12);
        let b2 = torus(2, 1.0);
        let d = torus_distance(&[0.0, 0.0], &[1.0, 1.0], &b2).unwrap();
        assert!((d - 2f64.sqrt()).abs() < 1e-12);
        assert!(torus_distance(&[0.0], &[0.0, 1.0], &b2).is_err());
    }

    #[test]
    fn wrapping_canonicalizes() {
        let cfg = PointConfiguration::new(torus(1, 1.0), &[vec![1.7], vec![-1.0], vec![1.0]]).unwrap();
        assert!((cfg.point(0)[0] + 0.3).abs() < 1e-12);
        assert_eq!(cfg.point(1)[0], -1.0);
        assert_eq!(cfg.point(2)[0], -1.0);
        let clipped = BoxSpec::clipped(1, 1.0).unwrap();
        assert!(PointConfiguration::new(clipped, &[vec![1.0]]).is_err());
    }

    #[test]
    fn min_spacing_examples() {
        let cfg = PointConfiguration::new(torus(1, 1.0), &[vec![0.0], vec![0.5], vec![1.7]]).unwrap();
        assert!((min_spacing(&cfg).unwrap() - 0.3).abs() < 1e-12);

        let two = PointConfiguration::new(torus(2, 3.0), &[vec![0.0, 0.0], vec![0.3, 0.4]]).unwrap();
        assert!((min_spacing(&two).unwrap() - 0.5).abs() < 1e-12);

        let square = PointConfiguration::new(
            torus(2, 1.0),
            &[vec![0.5, 0.5], vec![-0.5, 0.5], vec![0.5, -0.5], vec![-0.5, -0.5]],
        )
        .unwrap();
        assert!((min_spacing(&square).unwrap() - 1.0).abs() < 1e-12);

        let one = PointConfiguration::new(torus(2, 1.0), &[vec![0.0, 0.0]]).unwrap();
        assert_eq!(min_spacing(&one), Err(Error::UndefinedSpacing(1)));
        assert_eq!(
            min_spacing(&PointConfiguration::empty(torus(2, 1.0))),
            Err(Error::UndefinedSpacing(0))
        );
    }

    #[test]
    fn torus_density_examples() {
        let pair = PointConfiguration::new(torus(2, 1.0), &[vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
        assert!((packing_density_torus(&pair).unwrap() - PI / 8.0).abs() < 1e-12);

        let line = PointConfiguration::new(torus(1, 1.0), &[vec![-0.5], vec![0.5]]).unwrap();
        assert!((packing_density_torus(&line).unwrap() - 1.0).abs() < 1e-12);

        let square = PointConfiguration::new(
            torus(2, 1.0),
            &[vec![0.5, 0.5], vec![-0.5, 0.5], vec![0.5, -0.5], vec![-0.5, -0.5]],
        )
        .unwrap();
        assert!((packing_density_torus(&square).unwrap() - PI / 4.0).abs() < 1e-12);

        assert!(packing_density_torus(&pair.with_convention(Convention::Clipped)).is_err());
    }

    #[test]
    fn torus_density_is_the_definitional_identity() {
        let bx = torus(3, 2.0);
        let cfg = sample_poisson(&bx, 1.5, 11).unwrap();
        let d = min_spacing(&cfg).unwrap();
        let expect = cfg.len() as f64 * ball_volume(3, d / 2.0).unwrap() / bx.volume();
        assert_eq!(packing_density_torus(&cfg).unwrap(), expect);
    }

    /// Midpoint-rule area of `{x in [-1,1)^2 : |x - c| <= r for some c}`.
    fn clipped_area_quadrature(centers: &[[f64; 2]], r: f64, cells: usize) -> f64 {
        let h = 2.0 / cells as f64;
        let mut covered = 0usize;
        for i in 0..cells {
            for j in 0..cells {
                let x = -1.0 + (i as f64 + 0.5) * h;
                let y = -1.0 + (j as f64 + 0.5) * h;
                if centers.iter().any(|c| (x - c[0]).powi(2) + (y - c[1]).powi(2) <= r * r) {
                    covered += 1;
                }
            }
        }
        covered as f64 * h * h
    }

    #[test]
    fn clipped_density_matches_half_disk_area() {
        // oracle: quadrature of the covered area, compared with the closed form
        let area = clipped_area_quadrature(&[[0.0, 0.0], [1.0, 0.0]], 0.5, 2000);
        let analytic = 3.0 * PI / 32.0;
        assert!((area / 4.0 - analytic).abs() < 1e-4);

        let cfg = PointConfiguration::new(
            BoxSpec::clipped(2, 1.0).unwrap(),
            &[vec![0.0, 0.0], vec![0.999_999_999_999, 0.0]],
        )
        .unwrap();
        let est = packing_density_clipped_mc(&cfg, 200_000, 3).unwrap();
        assert!((est.value - analytic).abs() < 3.0 * est.stderr + 1e-6, "{est:?}");
    }

    #[test]
    fn clipped_density_is_deterministic_and_matches_torus_inside() {
        let pts = vec![vec![-1.0, -1.0], vec![1.0, 1.0], vec![1.0, -1.0], vec![-0.5, 1.2]];
        let cfg = PointConfiguration::new(BoxSpec::clipped(2, 3.0).unwrap(), &pts).unwrap();
        let a = packing_density_clipped_mc(&cfg, 50_000, 9).unwrap();
        let b = packing_density_clipped_mc(&cfg, 50_000, 9).unwrap();
        assert_eq!(a, b);
        let t = packing_density_torus(&cfg.with_convention(Convention::Torus)).unwrap();
        assert!((a.value - t).abs() <= 3.0 * a.stderr, "{a:?} vs {t}");
    }

    #[test]
    fn poisson_examples() {
        let bx = torus(2, 5.0);
        assert!(sample_poisson(&bx, 0.0, 1).unwrap().is_empty());
        assert!(sample_poisson(&bx, -1.0, 1).is_err());
        assert_eq!(
            sample_poisson(&bx, 1.0, 42).unwrap(),
            sample_poisson(&bx, 1.0, 42).unwrap()
        );

        let counts: Vec<f64> = (0..400)
            .map(|s| sample_poisson_stream(&bx, 1.0, 5, s).unwrap().len() as f64)
            .collect();
        let est = crate::stats::MCEstimate::from_values(&counts);
        assert!(est.within(100.0, 3.0), "{est:?}");
    }

    #[test]
    fn disjoint_halves_have_uncorrelated_counts() {
        let bx = torus(2, 2.0);
        let (mut left, mut right) = (Vec::new(), Vec::new());
        for s in 0..10_000 {
            let cfg = sample_poisson_stream(&bx, 1.0, 77, s).unwrap();
            let l = cfg.points().filter(|p| p[0] < 0.0).count() as f64;
            left.push(l);
            right.push(cfg.len() as f64 - l);
        }
        let ml = left.iter().sum::<f64>() / left.len() as f64;
        let mr = right.iter().sum::<f64>() / right.len() as f64;
        let cov: f64 = left.iter().zip(&right).map(|(a, b)| (a - ml) * (b - mr)).sum();
        let vl: f64 = left.iter().map(|a| (a - ml).powi(2)).sum();
        let vr: f64 = right.iter().map(|b| (b - mr).powi(2)).sum();
        let rho = cov / (vl * vr).sqrt();
        assert!(rho.abs() < 0.05, "rho = {rho}");
    }

    #[test]
    fn point_file_round_trip() {
        let bx = torus(3, 2.5);
        let cfg = sample_poisson(&bx, 0.7, 8).unwrap();
        let text = cfg.to_text();
        assert!(text.starts_with("# dim=3 half_side=2.5 convention=torus\n"));
        assert_eq!(PointConfiguration::from_text(&text).unwrap(), cfg);
    }

    #[test]
    fn point_file_errors() {
        assert!(PointConfiguration::from_text("").is_err());
        assert!(PointConfiguration::from_text("dim=2\n").is_err());
        assert!(PointConfiguration::from_text("# dim=2 half_side=1 convention=torus\n0.1\n").is_err());
        assert!(PointConfiguration::from_text("# dim=2 half_side=1 convention=sphere\n").is_err());
    }

    proptest! {
        #[test]
        fn torus_metric_properties(
            a in prop::collection::vec(-3.0f64..3.0, 3),
            b in prop::collection::vec(-3.0f64..3.0, 3),
            c in prop::collection::vec(-3.0f64..3.0, 3),
        ) {
            let bx = torus(3, 3.0);
            let ab = torus_distance(&a, &b, &bx).unwrap();
            let bc = torus_distance(&b, &c, &bx).unwrap();
            let ac = torus_distance(&a, &c, &bx).unwrap();
            prop_assert!(ac <= ab + bc + 1e-12);
            prop_assert!((ab - torus_distance(&b, &a, &bx).unwrap()).abs() < 1e-15);
            prop_assert!(ab <= 3.0 * 3f64.sqrt() + 1e-12);
            prop_assert!(ab <= euclidean(&a, &b) + 1e-12);
        }

        #[test]
        fn round_trip_preserves_values(xs in prop::collection::vec(-10.0f64..10.0, 0..40)) {
            let bx = torus(2, 10.0);
            let even = xs.len() - xs.len() % 2;
            let cfg = PointConfiguration::from_flat(bx, xs[..even].to_vec()).unwrap();
            prop_assert_eq!(PointConfiguration::from_text(&cfg.to_text()).unwrap(), cfg);
        }
    }
}
