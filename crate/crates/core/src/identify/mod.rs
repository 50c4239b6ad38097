//! Parameter identification by Latin hypercube pools and least squares
//! against sensor traces.

mod lhs;

pub use lhs::{lhs_sample, lhs_sample_with_anchor, ParameterPrior, DEFAULT_COV};

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiment::{run_experiment, ClimateSeries, ExperimentOptions, SensorAccuracy, SensorLayout, Traces};
use crate::material::Model;
use crate::mesh::Mesh;

/// Forward problem of one identification stage.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub mesh: Mesh,
    pub climate: ClimateSeries,
    pub layout: SensorLayout,
    /// Parameters not being identified.
    pub model: Model,
    pub options: ExperimentOptions,
}

impl ExperimentSpec {
    /// Model with `names[i] = values[i]` applied.
    pub fn model_with(&self, names: &[String], values: &[f64]) -> Result<Model> {
        let mut m = self.model.clone();
        for (n, v) in names.iter().zip(values) {
            m.set(n, *v)?;
        }
        m.validate()?;
        Ok(m)
    }

    /// Simulated traces for one parameter vector.
    pub fn simulate(&self, names: &[String], values: &[f64]) -> Result<Traces> {
        let m = self.model_with(names, values)?;
        Ok(run_experiment(&self.mesh, &self.climate, &self.layout, &m, &self.options)?.traces)
    }
}

/// Per-sensor contribution to the objective.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorResidual {
    pub probe: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub id: usize,
    pub params: Vec<f64>,
    /// Sum of squared accuracy-normalized residuals; `inf` for failed runs.
    pub objective: f64,
    pub per_sensor: Vec<SensorResidual>,
    #[serde(default)]
    pub error: Option<String>,
}

/// Squared residuals of `simulated` against `observed`, each normalized by
/// the sensor accuracy. The simulation is resampled onto the observed times;
/// probes are matched by name.
pub fn objective(simulated: &Traces, observed: &Traces, accuracy: &SensorAccuracy) -> Result<(f64, Vec<SensorResidual>)> {
    let sim = simulated.resample(&observed.times);
    let mut terms = Vec::new();
    let mut per_sensor = Vec::new();
    for (po, name) in observed.probes.iter().enumerate() {
        let ps = sim
            .probe_index(name)
            .ok_or_else(|| Error::Sensor(format!("simulation lacks observed probe `{name}`")))?;
        let mut own = Vec::with_capacity(2 * observed.times.len());
        for k in 0..observed.times.len() {
            let (to, fo) = (observed.theta[k][po], observed.phi[k][po]);
            own.push(((sim.theta[k][ps] - to) / accuracy.theta_at(to)).powi(2));
            own.push(((sim.phi[k][ps] - fo) / accuracy.phi).powi(2));
        }
        let v = sorted_sum(&mut own);
        per_sensor.push(SensorResidual {
            probe: name.clone(),
            value: v,
        });
        terms.extend(own);
    }
    Ok((sorted_sum(&mut terms), per_sensor))
}

/// Summation in ascending order, so the result does not depend on the order
/// of sensors or time steps.
fn sorted_sum(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    v.iter().sum()
}

/// Runs every realization and scores it. Failures get an infinite objective;
/// `jobs` caps the worker threads.
pub fn evaluate_pool(
    names: &[String],
    samples: &[Vec<f64>],
    spec: &ExperimentSpec,
    observed: &Traces,
    jobs: Option<usize>,
) -> Result<Vec<FitResult>> {
    let run = || -> Vec<FitResult> {
        samples
            .par_iter()
            .enumerate()
            .map(|(id, params)| {
                let scored = spec
                    .simulate(names, params)
                    .and_then(|sim| objective(&sim, observed, &spec.layout.accuracy));
                match scored {
                    Ok((objective, per_sensor)) => FitResult {
                        id,
                        params: params.clone(),
                        objective,
                        per_sensor,
                        error: None,
                    },
                    Err(e) => {
                        log::warn!("realization {id} failed: {e}");
                        FitResult {
                            id,
                            params: params.clone(),
                            objective: f64::INFINITY,
                            per_sensor: Vec::new(),
                            error: Some(e.to_string()),
                        }
                    }
                }
            })
            .collect()
    };
    match jobs {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
            Ok(pool.install(run))
        }
        None => Ok(run()),
    }
}

/// Top-`k` realizations, ascending objective, ties by id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub best: Vec<FitResult>,
    /// Set when no realization produced a finite objective.
    pub all_failed: bool,
}

pub fn select_best(results: &[FitResult], k: usize) -> Selection {
    let mut sorted = results.to_vec();
    sorted.sort_by(|a, b| a.objective.total_cmp(&b.objective).then(a.id.cmp(&b.id)));
    let all_failed = sorted.iter().all(|r| !r.objective.is_finite());
    if all_failed {
        log::warn!("every realization failed");
    }
    sorted.truncate(k);
    Selection { best: sorted, all_failed }
}

/// One identification stage: priors, forward problem and observations.
#[derive(Debug, Clone)]
pub struct Stage {
    pub priors: Vec<ParameterPrior>,
    pub spec: ExperimentSpec,
    pub observed: Traces,
    /// Optional vector forced into the pool as realization 0.
    pub anchor: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageResult {
    pub names: Vec<String>,
    pub results: Vec<FitResult>,
    pub selection: Selection,
}

impl StageResult {
    /// Best parameter vector, if any realization succeeded.
    pub fn best(&self) -> Option<&FitResult> {
        self.selection.best.first().filter(|r| r.objective.is_finite())
    }
}

pub fn run_stage(stage: &Stage, n: usize, seed: u64, top_k: usize, jobs: Option<usize>) -> Result<StageResult> {
    let names: Vec<String> = stage.priors.iter().map(|p| p.name.clone()).collect();
    for name in &names {
        stage.spec.model.get(name)?;
    }
    let samples = match &stage.anchor {
        Some(a) => lhs_sample_with_anchor(&stage.priors, n, seed, a)?,
        None => lhs_sample(&stage.priors, n, seed)?,
    };
    let results = evaluate_pool(&names, &samples, &stage.spec, &stage.observed, jobs)?;
    let selection = select_best(&results, top_k);
    Ok(StageResult {
        names,
        results,
        selection,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineResult {
    pub stages: Vec<StageResult>,
    /// Model with every identified set applied.
    pub model: Model,
}

/// Runs the stages in order; each stage starts from its own base model with
/// the optima of all earlier stages fixed. Stage `i` samples with `seed + i`.
pub fn pipeline(stages: &[Stage], n: usize, seed: u64, jobs: Option<usize>) -> Result<PipelineResult> {
    let mut fixed: Vec<(String, f64)> = Vec::new();
    let mut results = Vec::with_capacity(stages.len());
    let mut model = None;
    for (i, stage) in stages.iter().enumerate() {
        let mut stage = stage.clone();
        for (name, v) in &fixed {
            stage.spec.model.set(name, *v)?;
        }
        let r = run_stage(&stage, n, seed.wrapping_add(i as u64), n, jobs)?;
        let best = r
            .best()
            .ok_or_else(|| Error::Sampling(format!("stage {}: every realization failed", i + 1)))?;
        fixed.extend(r.names.iter().cloned().zip(best.params.iter().copied()));
        model = Some(stage.spec.model_with(&r.names, &best.params)?);
        results.push(r);
    }
    let model = model.ok_or_else(|| Error::Config("identification needs at least one stage".into()))?;
    Ok(PipelineResult { stages: results, model })
}

/// Thermal parameters from the first experiment, then moisture parameters
/// from the second with the thermal set fixed at its optimum.
pub fn two_stage(thermal: &Stage, moisture: &Stage, n: usize, seed: u64, jobs: Option<usize>) -> Result<PipelineResult> {
    pipeline(&[thermal.clone(), moisture.clone()], n, seed, jobs)
}

/// Thermal set identified from the first experiment.
pub const THERMAL_PARAMETERS: [&str; 5] = [
    "mortar.lambda0",
    "brick.lambda0",
    "mortar.b_tcs",
    "brick.b_tcs",
    "interface.alpha_int",
];

/// Moisture set identified from the second experiment.
pub const MOISTURE_PARAMETERS: [&str; 9] = [
    "mortar.w_f",
    "brick.w_f",
    "mortar.w80",
    "brick.w80",
    "mortar.mu",
    "brick.mu",
    "mortar.a",
    "brick.a",
    "interface.beta_int",
];

/// Priors centred on the current values of `model`.
pub fn priors_around(model: &Model, names: &[&str], cov: f64) -> Result<Vec<ParameterPrior>> {
    names
        .iter()
        .map(|n| Ok(ParameterPrior::new(n, model.get(n)?).with_cov(cov)))
        .collect()
}

/// JSON summary of one stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageSummary {
    pub schema_version: u32,
    pub names: Vec<String>,
    pub priors: Vec<ParameterPrior>,
    pub pool_size: usize,
    pub failed: usize,
    pub best_id: Option<usize>,
    pub best_objective: Option<f64>,
    pub optimum: Option<Vec<f64>>,
    /// Optimum in `{x_m, x_b} = {.., ..}` form.
    pub formatted: Option<String>,
    pub top: Vec<FitResult>,
    pub all_failed: bool,
}

impl StageResult {
    pub fn summary(&self, priors: &[ParameterPrior]) -> StageSummary {
        let best = self.best();
        StageSummary {
            schema_version: 1,
            names: self.names.clone(),
            priors: priors.to_vec(),
            pool_size: self.results.len(),
            failed: self.results.iter().filter(|r| !r.objective.is_finite()).count(),
            best_id: best.map(|b| b.id),
            best_objective: best.map(|b| b.objective),
            optimum: best.map(|b| b.params.clone()),
            formatted: best.map(|b| format_parameters(&self.names, &b.params)),
            top: self.selection.best.clone(),
            all_failed: self.selection.all_failed,
        }
    }
}

/// Groups `mortar.x`/`brick.x` pairs as `{x_m, x_b} = {.., ..}` and lists the
/// rest as `name = value`, four significant digits.
pub fn format_parameters(names: &[String], values: &[f64]) -> String {
    let mut parts = Vec::new();
    let mut used = vec![false; names.len()];
    for i in 0..names.len() {
        if used[i] {
            continue;
        }
        if let Some(key) = names[i].strip_prefix("mortar.") {
            if let Some(j) = names.iter().position(|n| n == &format!("brick.{key}")) {
                parts.push(format!("{{{key}_m, {key}_b}} = {{{}, {}}}", sig4(values[i]), sig4(values[j])));
                used[i] = true;
                used[j] = true;
                continue;
            }
        }
        parts.push(format!("{} = {}", names[i].rsplit('.').next().unwrap_or(&names[i]), sig4(values[i])));
        used[i] = true;
    }
    parts.join(", ")
}

fn sig4(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return v.to_string();
    }
    let scale = 10f64.powi(3 - v.abs().log10().floor() as i32);
    let r = (v * scale).round() / scale;
    if r.abs() < 1e-3 || r.abs() >= 1e7 {
        format!("{r:e}")
    } else {
        r.to_string()
    }
}

/// One line per realization: `id`, parameters, objective, status.
pub fn write_results_csv<W: Write>(names: &[String], results: &[FitResult], mut out: W) -> Result<()> {
    writeln!(out, "# schema_version: 1")?;
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["id".to_string()];
    header.extend(names.iter().cloned());
    header.extend(["objective".to_string(), "status".to_string()]);
    w.write_record(&header)?;
    for r in results {
        let mut rec = vec![r.id.to_string()];
        rec.extend(r.params.iter().map(|v| v.to_string()));
        rec.push(r.objective.to_string());
        rec.push(r.error.as_ref().map_or("ok".to_string(), |e| format!("error: {e}")));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
