use std::f64::consts::PI;
use std::fmt::Write as _;

use packlab_core::decimate::{curve_to_csv, estimate_d_curve, CurveParams, DecimationMode};
use packlab_core::lattice2d::{delta_moments, sample_modular_batch, MAX_DENSITY};
use packlab_core::moments::{concentration_check, edge_count, isolated_edges, variance_scaling_check};
use packlab_core::pointfield::{unit_ball_volume, Convention};
use packlab_core::schmidt::{schmidt_table, schmidt_to_csv};
use packlab_core::stats::{ks_test, variance_stderr};
use packlab_core::vcover::{constructive_cover, min_vertex_cover, CoverMode, CoverResult, SimpleGraph};
use packlab_core::{
    build_graph, cdf_delta, component_census, decimate, expected_m, expected_m1_bracket, mc_estimate, sample_poisson,
    BoxSpec, MCEstimate, PointConfiguration, ProximityGraph,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{ExperimentConfig, Params, Provenance};
use crate::fig1::emit_fig1_curves;
use crate::{Artifact, ArtifactKind, CliError, Report};

const DEFAULT_DIM: usize = 2;
const DEFAULT_HALF_SIDE: f64 = 5.0;
const DEFAULT_DISTANCE: f64 = 0.5;
const DEFAULT_TRIALS: usize = 100;
const DEFAULT_LATTICE_SAMPLES: usize = 100_000;
const KS_ALPHA: f64 = 0.01;

struct Ctx<'a> {
    p: &'a Params,
    seed: u64,
    provenance: Provenance,
}

impl Ctx<'_> {
    fn dim(&self) -> usize {
        self.p.dim.unwrap_or(DEFAULT_DIM)
    }

    fn half_side(&self) -> f64 {
        self.p.half_side.unwrap_or(DEFAULT_HALF_SIDE)
    }

    fn distance(&self) -> f64 {
        self.p.distance.unwrap_or(DEFAULT_DISTANCE)
    }

    fn intensity(&self) -> f64 {
        self.p.intensity.unwrap_or(1.0)
    }

    fn trials(&self) -> usize {
        self.p.trials.unwrap_or(DEFAULT_TRIALS)
    }

    fn convention(&self) -> Result<Convention, CliError> {
        Ok(self.p.convention.as_deref().unwrap_or("torus").parse()?)
    }

    fn half_sides(&self) -> Vec<f64> {
        self.p.half_sides.clone().unwrap_or_else(|| vec![4.0, 8.0, 16.0])
    }

    fn distances(&self) -> Vec<f64> {
        match (&self.p.distances, self.p.distance) {
            (Some(ds), _) => ds.clone(),
            (None, Some(d)) => vec![d],
            (None, None) => vec![1.0 / PI.sqrt()],
        }
    }

    fn read_input(&self) -> Result<Option<String>, CliError> {
        match &self.p.input {
            Some(path) => std::fs::read_to_string(path)
                .map(Some)
                .map_err(|e| CliError::io(path, e)),
            None => Ok(None),
        }
    }

    /// The input point file, or a fresh Poisson field when none is given.
    fn points(&self) -> Result<PointConfiguration, CliError> {
        match self.read_input()? {
            Some(text) => Ok(PointConfiguration::from_text(&text)?),
            None => {
                let bx = BoxSpec::new(self.dim(), self.half_side(), self.convention()?)?;
                Ok(sample_poisson(&bx, self.intensity(), self.seed)?)
            }
        }
    }

    fn json(&self, mut body: Value, passed: bool) -> Report {
        body["provenance"] = serde_json::to_value(&self.provenance).expect("provenance serializes");
        body["pass"] = Value::Bool(passed);
        self.report(ArtifactKind::Json, pretty(&body), passed)
    }

    fn report(&self, kind: ArtifactKind, text: String, passed: bool) -> Report {
        Report {
            main: Artifact { kind, text },
            dump: None,
            provenance: self.provenance.clone(),
            passed,
        }
    }
}

fn pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn record<T: Serialize, R: Serialize>(name: &str, params: Value, estimate: T, reference: R, pass: bool) -> Value {
    json!({ "name": name, "params": params, "estimate": estimate, "reference": reference, "pass": pass })
}

/// Runs `config` in memory. Nothing is written.
pub fn execute(config: &ExperimentConfig) -> Result<Report, CliError> {
    config.validate()?;
    let ctx = Ctx {
        p: &config.params,
        seed: config.seed(),
        provenance: Provenance::of(config),
    };
    match config.subcommand.as_str() {
        "sample-poisson" => sample_poisson_cmd(&ctx),
        "graph-census" => graph_census(&ctx),
        "cover" => cover(&ctx),
        "decimate" => decimate_cmd(&ctx),
        "moments-check" => moments_check(&ctx),
        "concentration" => concentration(&ctx),
        "d-curve" => d_curve(&ctx),
        "lattice2d" => lattice2d(&ctx),
        "schmidt-table" => schmidt(&ctx),
        "fig1" => fig1(&ctx),
        other => Err(CliError::UnknownSubcommand(other.to_string())),
    }
}

fn sample_poisson_cmd(ctx: &Ctx) -> Result<Report, CliError> {
    if ctx.p.input.is_some() {
        return Err(CliError::Validation(
            "sample-poisson does not take an input file".into(),
        ));
    }
    let cfg = ctx.points()?;
    Ok(ctx.report(ArtifactKind::Points, cfg.to_text(), true))
}

fn graph_census(ctx: &Ctx) -> Result<Report, CliError> {
    let cfg = ctx.points()?;
    let d = ctx.distance();
    let graph = build_graph(&cfg, d)?;
    let census = component_census(&graph);
    let nontrivial = census.nontrivial().count();
    let body = json!({
        "params": { "dim": cfg.dim(), "half_side": cfg.box_spec().half_side(), "distance": d,
                    "convention": cfg.box_spec().convention() },
        "vertices": graph.vertex_count(),
        "census": { "m": census.m, "m1": census.m1, "m2": census.m2, "m3": census.m3 },
        "components": census.components.len(),
        "nontrivial_components": nontrivial,
    });
    let mut report = ctx.json(body, true);
    report.dump = Some(Artifact {
        kind: ArtifactKind::Edges,
        text: graph.to_edge_list(),
    });
    Ok(report)
}

fn constructive_by_component(g: &SimpleGraph) -> Result<CoverResult, CliError> {
    let mut cover = Vec::new();
    for comp in g.components() {
        if comp.len() < 2 {
            continue;
        }
        let edges: Vec<(usize, usize)> = g
            .edges()
            .iter()
            .filter(|(a, _)| comp.binary_search(a).is_ok())
            .map(|&(a, b)| (comp.binary_search(&a).unwrap(), comp.binary_search(&b).unwrap()))
            .collect();
        let local = SimpleGraph::new(comp.len(), &edges)?;
        cover.extend(constructive_cover(&local)?.cover.into_iter().map(|k| comp[k]));
    }
    cover.sort_unstable();
    Ok(CoverResult {
        size: cover.len(),
        cover,
        mode: CoverMode::Constructive,
    })
}

fn cover(ctx: &Ctx) -> Result<Report, CliError> {
    let text = ctx
        .read_input()?
        .ok_or_else(|| CliError::Validation("cover needs --input <edge list>".into()))?;
    let graph = SimpleGraph::from(&ProximityGraph::from_edge_list(&text)?);
    let result = match ctx.p.mode.as_deref().unwrap_or("exact") {
        "exact" => min_vertex_cover(&graph)?,
        "constructive" => constructive_by_component(&graph)?,
        other => return Err(CliError::Validation(format!("unknown cover mode `{other}`"))),
    };
    let passed = graph.is_cover(&result.cover);
    let body = json!({ "size": result.size, "cover": result.cover, "mode": result.mode });
    Ok(ctx.json(body, passed))
}

fn decimate_cmd(ctx: &Ctx) -> Result<Report, CliError> {
    let cfg = ctx.points()?;
    let d = ctx.distance();
    let mode: DecimationMode = ctx.p.mode.as_deref().unwrap_or("auto").parse()?;
    let res = decimate(&cfg, d, mode)?;
    let check = res.check_bounds();
    // constructive covers only carry the two-thirds guarantee
    let passed = if res.all_exact {
        check.certified()
    } else {
        check.within_lower1
    };
    let body = json!({
        "params": { "dim": cfg.dim(), "half_side": cfg.box_spec().half_side(), "distance": d, "mode": ctx.p.mode.as_deref().unwrap_or("auto") },
        "sigma": cfg.len(),
        "tau": res.tau_len(),
        "census": { "m": res.census.m, "m1": res.census.m1, "m2": res.census.m2, "m3": res.census.m3 },
        "bounds": res.bounds,
        "check": check,
        "all_exact": res.all_exact,
        "guaranteed_density": res.guaranteed_density()?,
        "removed": res.removed,
    });
    let mut report = ctx.json(body, passed);
    report.dump = Some(Artifact {
        kind: ArtifactKind::Points,
        text: res.tau.to_text(),
    });
    Ok(report)
}

fn moments_check(ctx: &Ctx) -> Result<Report, CliError> {
    let (n, half_side, d, lambda, trials) = (
        ctx.dim(),
        ctx.half_side(),
        ctx.distance(),
        ctx.intensity(),
        ctx.trials(),
    );
    let bx = BoxSpec::torus(n, half_side)?;
    let params = json!({ "dim": n, "half_side": half_side, "distance": d, "intensity": lambda, "trials": trials });
    let mut records = Vec::new();

    let expected = expected_m(n, half_side, d, lambda)?;
    let m = mc_estimate(|c: &PointConfiguration| edge_count(c, d), &bx, lambda, trials, ctx.seed)?;
    records.push(record(
        "edge_count_mean",
        params.clone(),
        m,
        expected,
        m.within(expected, 3.0),
    ));

    if lambda == 1.0 {
        let bracket = expected_m1_bracket(n, half_side, d)?;
        let m1 = mc_estimate(
            |c: &PointConfiguration| isolated_edges(c, d),
            &bx,
            lambda,
            trials,
            ctx.seed,
        )?;
        let pass = m1.mean >= bracket.lo - 3.0 * m1.stderr && m1.mean <= bracket.hi + 3.0 * m1.stderr;
        records.push(record("isolated_edges_bracket", params.clone(), m1, bracket, pass));
    }

    if let Some(sides) = &ctx.p.half_sides {
        let scaling = variance_scaling_check(n, d, sides, trials, ctx.seed)?;
        let pass = scaling.spread <= 2.0;
        let p = json!({ "dim": n, "distance": d, "half_sides": sides, "trials": trials });
        records.push(record(
            "variance_scaling",
            p,
            &scaling,
            json!({ "max_spread": 2.0 }),
            pass,
        ));
    }

    let passed = records.iter().all(|r| r["pass"] == Value::Bool(true));
    Ok(ctx.json(json!({ "records": records }), passed))
}

fn concentration(ctx: &Ctx) -> Result<Report, CliError> {
    let (n, d, trials) = (ctx.dim(), ctx.distance(), ctx.trials());
    let delta = ctx.p.delta.unwrap_or(2.0 / 3.0);
    let epsilon = ctx.p.epsilon.unwrap_or(1.0);
    let sides = ctx.half_sides();
    let rows = concentration_check(n, d, &sides, delta, epsilon, trials, ctx.seed)?;
    let monotone = rows.windows(2).all(|w| w[1].fraction <= w[0].fraction);
    let chebyshev = rows.iter().all(|r| r.within_chebyshev());
    let params =
        json!({ "dim": n, "distance": d, "half_sides": sides, "delta": delta, "epsilon": epsilon, "trials": trials });
    let reference: Vec<f64> = rows.iter().map(|r| r.chebyshev).collect();
    let body = json!({
        "params": params,
        "estimate": rows,
        "reference": { "chebyshev": reference },
        "non_increasing": monotone,
        "within_chebyshev": chebyshev,
    });
    Ok(ctx.json(body, monotone && chebyshev))
}

fn d_curve(ctx: &Ctx) -> Result<Report, CliError> {
    let mut params = CurveParams::new(
        ctx.dim(),
        ctx.distances(),
        ctx.p.half_side.unwrap_or(16.0),
        ctx.trials(),
        ctx.seed,
    );
    if let Some(eps) = ctx.p.epsilon_band {
        params.epsilon_band = eps;
    }
    let rows = estimate_d_curve(&params)?;
    let passed = rows.iter().all(|r| !r.applicable || r.satisfied);
    Ok(ctx.report(ArtifactKind::Csv, curve_to_csv(&rows), passed))
}

#[derive(Serialize)]
struct LatticeEstimate {
    samples: usize,
    proposals: u64,
    acceptance: f64,
    mean: f64,
    mean_stderr: f64,
    variance: f64,
    variance_stderr: f64,
    max: f64,
    ks_statistic: f64,
    ks_p_value: f64,
}

fn lattice2d(ctx: &Ctx) -> Result<Report, CliError> {
    let count = ctx.p.trials.unwrap_or(DEFAULT_LATTICE_SAMPLES);
    if count < 2 {
        return Err(CliError::Validation("lattice2d needs at least 2 samples".into()));
    }
    let (samples, proposals) = sample_modular_batch(count, ctx.seed);
    let deltas: Vec<f64> = samples.iter().map(|s| s.delta).collect();
    let est = MCEstimate::from_values(&deltas);
    let var_se = variance_stderr(&deltas);
    let ks = ks_test(&deltas, |a| cdf_delta(a).expect("finite sample"));
    let max = deltas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let reference = delta_moments();
    let passed = ks.passes(KS_ALPHA)
        && est.within(reference.mean, 3.0)
        && (est.variance - reference.variance).abs() <= 3.0 * var_se
        && max <= MAX_DENSITY;
    let estimate = LatticeEstimate {
        samples: count,
        proposals,
        acceptance: count as f64 / proposals as f64,
        mean: est.mean,
        mean_stderr: est.stderr,
        variance: est.variance,
        variance_stderr: var_se,
        max,
        ks_statistic: ks.statistic,
        ks_p_value: ks.p_value,
    };
    let body = json!({
        "params": { "samples": count, "ks_alpha": KS_ALPHA },
        "estimate": estimate,
        "reference": { "mean": reference.mean, "variance": reference.variance, "max": reference.max, "acceptance": MAX_DENSITY },
    });
    let mut dump = String::from("x,y,delta\n");
    for s in &samples {
        let _ = writeln!(dump, "{},{},{}", s.x, s.y, s.delta);
    }
    let mut report = ctx.json(body, passed);
    report.dump = Some(Artifact {
        kind: ArtifactKind::Csv,
        text: dump,
    });
    Ok(report)
}

fn schmidt(ctx: &Ctx) -> Result<Report, CliError> {
    let dims = ctx.p.dims.clone().unwrap_or_else(|| vec![13, 20, 40, 80]);
    let xs = ctx.p.xs.clone().unwrap_or_else(|| vec![0.5, 1.0, 2.0]);
    let rows = schmidt_table(&dims, &xs)?;
    let mut sorted = dims.clone();
    sorted.sort_unstable();
    // widths must shrink as the dimension grows, at every x
    let passed = xs.iter().all(|&x| {
        let widths: Vec<f64> = sorted
            .iter()
            .filter_map(|&n| rows.iter().find(|r| r.n == n && r.x == x).map(|r| r.bracket.width))
            .collect();
        widths.windows(2).all(|w| w[1] < w[0])
    });
    Ok(ctx.report(ArtifactKind::Csv, schmidt_to_csv(&rows), passed))
}

fn default_fig1_grid(n: usize) -> Vec<f64> {
    // ball volumes 0.05, 0.10, ..., 3.00
    let unit = unit_ball_volume(n);
    (1..=60)
        .map(|k| (k as f64 * 0.05 / unit).powf(1.0 / n as f64))
        .collect()
}

fn fig1(ctx: &Ctx) -> Result<Report, CliError> {
    let n = ctx.dim();
    let grid = match (&ctx.p.distances, ctx.p.distance) {
        (Some(ds), _) => ds.clone(),
        (None, Some(d)) => vec![d],
        (None, None) => default_fig1_grid(n),
    };
    Ok(ctx.report(ArtifactKind::Csv, emit_fig1_curves(n, &grid)?, true))
}
