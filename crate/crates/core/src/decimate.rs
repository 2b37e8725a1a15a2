//! Decimation of a point configuration by vertex covers of `G_d`, the
//! cardinality bounds for the thinned set, the resulting density bounds as
//! functions of the kept fraction, and the exact small-instance dispersion
//! optimum.

use std::f64::consts::E;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::pointfield::{
    ball_volume, density_from_spacing, min_spacing, sample_poisson_stream, BoxSpec, PointConfiguration,
};
use crate::proxgraph::{build_graph, component_census, ComponentCensus, ProximityGraph};
use crate::rng::trial_stream;
use crate::stats::MCEstimate;
use crate::vcover::{constructive_cover, cover_number_masks, min_vertex_cover, SimpleGraph, EXACT_VERTEX_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecimationMode {
    /// Minimum covers everywhere; components above the exact cap are an error.
    Exact,
    /// The non-end-vertex construction everywhere.
    Constructive,
    /// Exact up to the cap, constructive above it.
    Auto,
}

impl std::str::FromStr for DecimationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(DecimationMode::Exact),
            "constructive" => Ok(DecimationMode::Constructive),
            "auto" => Ok(DecimationMode::Auto),
            other => Err(domain(format!("unknown decimation mode `{other}`"))),
        }
    }
}

/// Bounds on the size of a thinned set `tau` with `d(tau) > d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TauBounds {
    /// `|sigma| - M1`
    pub upper1: f64,
    /// `|sigma| - M1 - M2 - 2 M3`
    pub upper2: f64,
    /// `|sigma| - M1 - (2/3)(M - M1)`
    pub lower1: f64,
    /// `|sigma| - M1 - M2 - 2 M3 - (3/5)(M - M1 - 2 M2 - 3 M3)`
    pub lower2: f64,
    /// `false` when some residual component has 3 edges on 4 vertices; a
    /// 4-vertex path needs 2 cover vertices, more than 3/5 of its edges, so
    /// `lower2` is not guaranteed there.
    pub lower2_valid: bool,
}

pub fn tau_bounds(census: &ComponentCensus, sigma_count: usize) -> Result<TauBounds> {
    let ComponentCensus { m, m1, m2, m3, .. } = *census;
    if m < m1 + 2 * m2 + 3 * m3 {
        return Err(domain(format!(
            "inconsistent census: M = {m} < M1 + 2 M2 + 3 M3 = {}",
            m1 + 2 * m2 + 3 * m3
        )));
    }
    if 2 * m1 + 3 * (m2 + m3) > sigma_count {
        return Err(domain(format!("census needs more than {sigma_count} vertices")));
    }
    let s = sigma_count as f64;
    let (m, m1, m2, m3) = (m as f64, m1 as f64, m2 as f64, m3 as f64);
    let upper2 = s - m1 - m2 - 2.0 * m3;
    Ok(TauBounds {
        upper1: s - m1,
        upper2,
        lower1: s - m1 - 2.0 / 3.0 * (m - m1),
        lower2: upper2 - 3.0 / 5.0 * (m - m1 - 2.0 * m2 - 3.0 * m3),
        lower2_valid: !census.components.iter().any(|c| c.vertices.len() == 4 && c.edges == 3),
    })
}

/// A thinned configuration whose points are pairwise more than `d` apart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecimationResult {
    pub threshold: f64,
    pub tau: PointConfiguration,
    /// Indices into the original configuration of the points kept, ascending.
    pub kept: Vec<usize>,
    /// Indices of the removed cover vertices, ascending.
    pub removed: Vec<usize>,
    pub census: ComponentCensus,
    pub cover_total: usize,
    pub bounds: TauBounds,
    /// Every component was covered by an exact minimum cover.
    pub all_exact: bool,
}

/// Which of the cardinality bounds a decimation met.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundsCheck {
    pub within_lower1: bool,
    pub within_upper1: bool,
    pub within_upper2: bool,
    pub within_lower2: bool,
}

impl BoundsCheck {
    /// The certified bounds: `lower1 <= |tau| <= min(upper1, upper2)`.
    pub fn certified(&self) -> bool {
        self.within_lower1 && self.within_upper1 && self.within_upper2
    }
}

impl DecimationResult {
    pub fn tau_len(&self) -> usize {
        self.kept.len()
    }

    pub fn check_bounds(&self) -> BoundsCheck {
        let t = self.kept.len() as f64;
        // lower bounds carry thirds and fifths; compare with a hair of slack
        let eps = 1e-9;
        BoundsCheck {
            within_lower1: t >= self.bounds.lower1 - eps,
            within_upper1: t <= self.bounds.upper1,
            within_upper2: t <= self.bounds.upper2,
            within_lower2: t >= self.bounds.lower2 - eps,
        }
    }

    /// `|tau| v_n(d/2) / (2N)^n`, the density guaranteed by the threshold alone.
    pub fn guaranteed_density(&self) -> Result<f64> {
        density_from_spacing(self.tau.box_spec(), self.kept.len(), self.threshold)
    }
}

fn component_graph(graph: &ProximityGraph, vertices: &[usize]) -> SimpleGraph {
    let mut edges = Vec::new();
    for (k, &v) in vertices.iter().enumerate() {
        for &w in graph.neighbors(v) {
            if w > v {
                let j = vertices.binary_search(&w).expect("neighbor lies in the same component");
                edges.push((k, j));
            }
        }
    }
    SimpleGraph::new(vertices.len(), &edges).expect("component graphs are simple")
}

/// Removes a vertex cover of every component of `G_d(config)`.
pub fn decimate(config: &PointConfiguration, d: f64, mode: DecimationMode) -> Result<DecimationResult> {
    if config.len() < 2 {
        return Err(Error::UndefinedSpacing(config.len()));
    }
    let graph = build_graph(config, d)?;
    let census = component_census(&graph);
    let mut removed = Vec::new();
    let mut all_exact = true;
    for comp in census.nontrivial() {
        let local = component_graph(&graph, &comp.vertices);
        let exact = match mode {
            DecimationMode::Exact => true,
            DecimationMode::Constructive => false,
            DecimationMode::Auto => comp.vertices.len() <= EXACT_VERTEX_CAP,
        };
        let cover = if exact {
            min_vertex_cover(&local)?
        } else {
            all_exact = false;
            constructive_cover(&local)?
        };
        removed.extend(cover.cover.iter().map(|&k| comp.vertices[k]));
    }
    removed.sort_unstable();
    let mut is_removed = vec![false; config.len()];
    for &v in &removed {
        is_removed[v] = true;
    }
    let kept: Vec<usize> = (0..config.len()).filter(|&v| !is_removed[v]).collect();
    if kept.is_empty() {
        return Err(Error::FullyDecimated);
    }
    let bounds = tau_bounds(&census, config.len())?;
    Ok(DecimationResult {
        threshold: d,
        tau: config.select(&kept),
        kept,
        cover_total: removed.len(),
        removed,
        census,
        bounds,
        all_exact,
    })
}

// ---------------------------------------------------------------------------
// density bounds

/// `min over d of nu_2(d) = 1 - 1/(4e)`, attained where `v_n(d) = 1/2`.
pub const NU2_MIN: f64 = 1.0 - 1.0 / (4.0 * E);

/// The three fraction functions and the density bounds at distance `d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NuBounds {
    pub dim: usize,
    pub d: f64,
    /// `v_n(d)`
    pub volume: f64,
    pub nu1: f64,
    pub nu2: f64,
    pub nu3: f64,
    /// lower bound on `D(nu1)`; meaningful only when `nu1 > 0`
    pub rhs13: f64,
    /// upper bound on `D(nu2)`
    pub rhs14: f64,
    /// lower bound on `D(nu3)`; meaningful only when `nu3 > 0`
    pub rhs15: f64,
    pub rhs13_applicable: bool,
    pub rhs15_applicable: bool,
    /// Smallest value `nu2` takes over all `d`; the upper bound only speaks
    /// about fractions at or above it.
    pub nu2_min: f64,
}

pub fn nu_bounds(n: usize, d: f64) -> Result<NuBounds> {
    if !(d > 0.0 && d.is_finite()) {
        return Err(domain(format!("distance must be positive, got {d}")));
    }
    let v = ball_volume(n, d)?;
    let scale = 0.5f64.powi(n as i32) * v;
    let nu1 = 1.0 - 0.5 * v;
    let nu2 = 1.0 - 0.5 * v * (-2.0 * v).exp();
    let nu3 = 1.0 - v / 3.0 - v * (-v).exp() / 6.0;
    Ok(NuBounds {
        dim: n,
        d,
        volume: v,
        nu1,
        nu2,
        nu3,
        rhs13: scale * nu1,
        rhs14: scale * nu2,
        rhs15: scale * nu3,
        rhs13_applicable: nu1 > 0.0,
        rhs15_applicable: nu3 > 0.0,
        nu2_min: NU2_MIN,
    })
}

/// `2^(1-n) nu (1 - nu)`, the lower bound on `D(nu)` in explicit form.
pub fn explicit_lower(n: usize, nu: f64) -> Result<f64> {
    if n == 0 {
        return Err(domain("dimension must be at least 1"));
    }
    if !(nu > 0.0 && nu < 1.0) {
        return Err(domain(format!("fraction must lie in (0, 1), got {nu}")));
    }
    Ok(0.5f64.powi(n as i32 - 1) * nu * (1.0 - nu))
}

// ---------------------------------------------------------------------------
// exact dispersion

/// Largest configuration `delta_nu_exact` accepts.
pub const DISPERSION_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dispersion {
    pub best_min_distance: f64,
    /// Lexicographically smallest optimal subset.
    pub subset: Vec<usize>,
    pub density: f64,
}

/// Conflict masks: `i` and `j` conflict when closer than `t`.
fn conflict_masks(dist: &[Vec<f64>], t: f64) -> Vec<u64> {
    dist.iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .filter(|&(j, &x)| j != i && x < t)
                .fold(0u64, |m, (j, _)| m | (1 << j))
        })
        .collect()
}

fn max_independent(adj: &[u64], alive: u64) -> usize {
    (alive.count_ones() - cover_number_masks(adj, alive)) as usize
}

/// Best packing density over `k`-point subsets: the max-min dispersion
/// optimum, found by bisection over the sorted pairwise distances with an
/// independent-set feasibility check at each step.
pub fn delta_nu_exact(config: &PointConfiguration, k: usize) -> Result<Dispersion> {
    let n = config.len();
    if n > DISPERSION_LIMIT || k < 2 || k > n {
        return Err(Error::ExhaustiveLimit(format!(
            "need 2 <= k <= |sigma| <= {DISPERSION_LIMIT}, got k = {k}, |sigma| = {n}"
        )));
    }
    let dist: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| config.distance(i, j)).collect())
        .collect();
    let mut candidates: Vec<f64> = (0..n).flat_map(|i| dist[i][i + 1..].to_vec()).collect();
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    let full = (1u64 << n) - 1;
    let feasible = |t: f64| max_independent(&conflict_masks(&dist, t), full) >= k;

    // candidates[0] is always feasible (nothing conflicts below the minimum)
    let (mut lo, mut hi) = (0usize, candidates.len());
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if feasible(candidates[mid]) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let best = candidates[lo];

    let adj = conflict_masks(&dist, best);
    let mut chosen = Vec::with_capacity(k);
    let mut open = full;
    for v in 0..n {
        if chosen.len() == k {
            break;
        }
        if open & (1 << v) == 0 {
            continue;
        }
        let rest = open & !(1u64 << v) & !adj[v] & !((1u64 << (v + 1)) - 1);
        if 1 + max_independent(&adj, rest) >= k - chosen.len() {
            chosen.push(v);
            open = rest;
        } else {
            open &= !(1u64 << v);
        }
    }
    debug_assert_eq!(chosen.len(), k);
    Ok(Dispersion {
        best_min_distance: best,
        density: density_from_spacing(config.box_spec(), k, best)?,
        subset: chosen,
    })
}

// ---------------------------------------------------------------------------
// Monte Carlo estimate of D(nu)

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Lower13,
    Lower15,
}

impl BoundKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            BoundKind::Lower13 => "lower13",
            BoundKind::Lower15 => "lower15",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveParams {
    pub dim: usize,
    pub d_grid: Vec<f64>,
    pub half_side: f64,
    pub trials: usize,
    pub seed: u64,
    /// exponent slack in the band `nu |sigma| +- |sigma|^(1/2 + eps)`
    pub epsilon_band: f64,
    /// relative finite-size slack allowed below the bound
    pub slack: f64,
}

impl CurveParams {
    pub fn new(dim: usize, d_grid: Vec<f64>, half_side: f64, trials: usize, seed: u64) -> Self {
        CurveParams {
            dim,
            d_grid,
            half_side,
            trials,
            seed,
            epsilon_band: 0.1,
            slack: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub d: f64,
    pub nu_target: f64,
    pub bound_kind: BoundKind,
    pub rhs: f64,
    pub mean_density: f64,
    pub stderr: f64,
    pub trials: usize,
    /// trials whose thinned set fell below the band
    pub shortfalls: usize,
    /// `mean_density >= rhs (1 - slack)`
    pub satisfied: bool,
    pub applicable: bool,
}

impl CurveRow {
    pub fn flag(&self) -> String {
        if !self.applicable {
            return "inapplicable".into();
        }
        let mut parts = Vec::new();
        if !self.satisfied {
            parts.push("below_bound".to_string());
        }
        if self.shortfalls > 0 {
            parts.push(format!("shortfall={}", self.shortfalls));
        }
        if parts.is_empty() {
            "ok".into()
        } else {
            parts.join(";")
        }
    }
}

pub const CURVE_CSV_HEADER: &str = "d,nu_target,bound_kind,rhs,mean_density,stderr,trials,flag";

pub fn curve_to_csv(rows: &[CurveRow]) -> String {
    let mut out = String::from(CURVE_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.d,
            r.nu_target,
            r.bound_kind.as_str(),
            r.rhs,
            r.mean_density,
            r.stderr,
            r.trials,
            r.flag()
        ));
    }
    out
}

/// Outcome of trimming a decimated set towards `nu |sigma|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trimmed {
    pub kept: usize,
    pub shortfall: bool,
}

/// Keeps `|tau|` points if inside the band, trims to `ceil(nu |sigma|)` if above.
pub fn trim_target(tau_len: usize, sigma_len: usize, nu: f64, epsilon_band: f64) -> Trimmed {
    let s = sigma_len as f64;
    let band = s.powf(0.5 + epsilon_band);
    let t = tau_len as f64;
    if t > nu * s + band {
        Trimmed {
            kept: (nu * s).ceil() as usize,
            shortfall: false,
        }
    } else {
        Trimmed {
            kept: tau_len,
            shortfall: t < nu * s - band,
        }
    }
}

struct TrialOutcome {
    densities: [f64; 2],
    shortfalls: [bool; 2],
}

fn curve_trial(bx: &BoxSpec, d: f64, targets: [f64; 2], params: &CurveParams, stream: u64) -> Result<TrialOutcome> {
    let sigma = sample_poisson_stream(bx, 1.0, params.seed, stream)?;
    let dec = decimate(&sigma, d, DecimationMode::Auto)?;
    let mut out = TrialOutcome {
        densities: [0.0; 2],
        shortfalls: [false; 2],
    };
    for (slot, &nu) in targets.iter().enumerate() {
        if nu <= 0.0 {
            continue;
        }
        let trim = trim_target(dec.kept.len(), sigma.len(), nu, params.epsilon_band);
        out.shortfalls[slot] = trim.shortfall;
        // dropping the highest indices keeps every remaining pair > d apart
        let kept: Vec<usize> = (0..trim.kept.min(dec.kept.len())).collect();
        out.densities[slot] = if kept.len() >= 2 {
            let sub = dec.tau.select(&kept);
            density_from_spacing(bx, sub.len(), min_spacing(&sub)?)?
        } else {
            0.0
        };
    }
    Ok(out)
}

/// Finite-box estimate of the decimated density at the fractions `nu1(d)` and
/// `nu3(d)`, compared with the lower bounds at those fractions.
pub fn estimate_d_curve(params: &CurveParams) -> Result<Vec<CurveRow>> {
    if params.trials == 0 {
        return Err(domain("at least one trial is required"));
    }
    if !(params.epsilon_band > 0.0 && params.epsilon_band < 0.5) {
        return Err(domain("epsilon band must lie in (0, 1/2)"));
    }
    let bx = BoxSpec::torus(params.dim, params.half_side)?;
    let mut rows = Vec::new();
    for (block, &d) in params.d_grid.iter().enumerate() {
        let nb = nu_bounds(params.dim, d)?;
        let targets = [nb.nu1, nb.nu3];
        let outcomes: Vec<TrialOutcome> = (0..params.trials as u64)
            .into_par_iter()
            .map(|t| curve_trial(&bx, d, targets, params, trial_stream(block as u64, t)))
            .collect::<Result<_>>()?;
        for (slot, (kind, rhs, applicable)) in [
            (BoundKind::Lower13, nb.rhs13, nb.rhs13_applicable),
            (BoundKind::Lower15, nb.rhs15, nb.rhs15_applicable),
        ]
        .into_iter()
        .enumerate()
        {
            let densities: Vec<f64> = outcomes.iter().map(|o| o.densities[slot]).collect();
            let est = MCEstimate::from_values(&densities);
            let (mean, stderr) = if applicable {
                (est.mean, est.stderr)
            } else {
                (f64::NAN, f64::NAN)
            };
            rows.push(CurveRow {
                d,
                nu_target: targets[slot],
                bound_kind: kind,
                rhs,
                mean_density: mean,
                stderr,
                trials: params.trials,
                shortfalls: outcomes.iter().filter(|o| o.shortfalls[slot]).count(),
                satisfied: applicable && mean >= rhs * (1.0 - params.slack),
                applicable,
            });
        }
    }
    Ok(rows)
}
