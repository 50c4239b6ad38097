//! Transient simulation of the laboratory wall block under recorded
//! climates, probe sampling and interface jump extraction.
//!
//! The interior climate drives the `Left` face (`x = 0`) and the exterior
//! climate the `Right` face.

mod climate;
mod sensors;

pub use climate::{ClimateSample, ClimateSeries, MAX_GAP};
pub use sensors::{JumpPair, Probe, SensorAccuracy, SensorLayout};

use std::collections::HashMap;
use std::io::{Read, Write};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fem::{BoundaryConditions, Dirichlet, Field, NewtonOptions, NodalState, Robin, TransientSolver};
use crate::material::{capillary_pressure, Model, PhysicalConstants, KELVIN_OFFSET};
use crate::mesh::{BoundaryMarker, Mesh};

/// Surface film coefficients replacing the Dirichlet faces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceFilm {
    /// W·m⁻²·K⁻¹.
    pub heat: f64,
    /// kg·m⁻²·s⁻¹ per unit `φ`.
    pub moisture: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentOptions {
    /// Time step, s.
    pub dt: f64,
    /// Simulated time from the first climate sample, s.
    pub duration: f64,
    /// Trace sampling interval, s.
    pub output_interval: f64,
    #[serde(default)]
    pub film: Option<SurfaceFilm>,
    #[serde(skip)]
    pub initial: Option<NodalState>,
    #[serde(skip, default)]
    pub newton: NewtonOptions,
}

impl ExperimentOptions {
    /// Defaults: `dt` 10 min, output every hour.
    pub fn new(duration: f64) -> Self {
        Self {
            dt: 600.0,
            duration,
            output_interval: 3600.0,
            film: None,
            initial: None,
            newton: NewtonOptions::default(),
        }
    }
}

/// Probe samples, indexed `[time][probe]`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Traces {
    pub times: Vec<f64>,
    pub probes: Vec<String>,
    pub theta: Vec<Vec<f64>>,
    pub phi: Vec<Vec<f64>>,
}

#[derive(Debug, Deserialize, Serialize)]
struct TraceRow {
    t_s: f64,
    probe_name: String,
    #[serde(rename = "theta_C")]
    theta: f64,
    phi: f64,
}

impl Traces {
    pub fn probe_index(&self, name: &str) -> Option<usize> {
        self.probes.iter().position(|p| p == name)
    }

    /// Long format `t_s,probe_name,theta_C,phi`.
    pub fn to_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# schema_version: 1")?;
        let mut w = csv::Writer::from_writer(out);
        for (k, t) in self.times.iter().enumerate() {
            for (p, name) in self.probes.iter().enumerate() {
                w.serialize(TraceRow {
                    t_s: *t,
                    probe_name: name.clone(),
                    theta: self.theta[k][p],
                    phi: self.phi[k][p],
                })?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Inverse of [`Traces::to_csv`]; rows may come in any order but every
    /// probe must be present at every time.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(reader);
        let mut rows = Vec::new();
        for (i, r) in rdr.deserialize::<TraceRow>().enumerate() {
            rows.push(r.map_err(|e| Error::Parse(format!("trace record {}: {e}", i + 1)))?);
        }
        let mut times: Vec<f64> = rows.iter().map(|r| r.t_s).collect();
        times.sort_by(f64::total_cmp);
        times.dedup();
        let mut probes: Vec<String> = Vec::new();
        for r in &rows {
            if !probes.contains(&r.probe_name) {
                probes.push(r.probe_name.clone());
            }
        }
        let mut theta = vec![vec![f64::NAN; probes.len()]; times.len()];
        let mut phi = theta.clone();
        for r in &rows {
            let k = times.binary_search_by(|t| t.total_cmp(&r.t_s)).unwrap();
            let p = probes.iter().position(|n| *n == r.probe_name).unwrap();
            theta[k][p] = r.theta;
            phi[k][p] = r.phi;
        }
        if theta.iter().flatten().any(|v| v.is_nan()) {
            return Err(Error::Parse("trace table is incomplete: some probe is missing at some time".into()));
        }
        Ok(Self {
            times,
            probes,
            theta,
            phi,
        })
    }

    /// Linear resampling onto `times` (constant outside the record).
    pub fn resample(&self, times: &[f64]) -> Traces {
        let interp = |series: &Vec<Vec<f64>>, t: f64, p: usize| {
            let k = self.times.partition_point(|x| *x <= t);
            if k == 0 {
                return series[0][p];
            }
            if k == self.times.len() {
                return series[k - 1][p];
            }
            let w = (t - self.times[k - 1]) / (self.times[k] - self.times[k - 1]);
            series[k - 1][p] + w * (series[k][p] - series[k - 1][p])
        };
        let np = self.probes.len();
        Traces {
            times: times.to_vec(),
            probes: self.probes.clone(),
            theta: times.iter().map(|&t| (0..np).map(|p| interp(&self.theta, t, p)).collect()).collect(),
            phi: times.iter().map(|&t| (0..np).map(|p| interp(&self.phi, t, p)).collect()).collect(),
        }
    }
}

/// Jumps `mortar − brick` per pair, indexed `[time][pair]`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct JumpSeries {
    pub times: Vec<f64>,
    pub pairs: Vec<String>,
    pub dtheta: Vec<Vec<f64>>,
    pub dphi: Vec<Vec<f64>>,
    /// Capillary pressure jump, `NaN` where a side has `φ ∉ (0, 1]`.
    pub dpc: Vec<Vec<f64>>,
    /// `[|Δθ| > band, |Δφ| > band]` against the sensor accuracy.
    pub exceeds_accuracy: Vec<Vec<[bool; 2]>>,
}

impl JumpSeries {
    /// `t_s,pair_name,dtheta_K,dphi,dpc_Pa`.
    pub fn to_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# schema_version: 1")?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t_s", "pair_name", "dtheta_K", "dphi", "dpc_Pa"])?;
        for (k, t) in self.times.iter().enumerate() {
            for (p, name) in self.pairs.iter().enumerate() {
                w.write_record([
                    t.to_string(),
                    name.clone(),
                    self.dtheta[k][p].to_string(),
                    self.dphi[k][p].to_string(),
                    self.dpc[k][p].to_string(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Largest absolute jumps `[Δθ, Δφ]` over all pairs and times.
    pub fn max_abs(&self) -> [f64; 2] {
        let m = |v: &Vec<Vec<f64>>| v.iter().flatten().fold(0.0f64, |a, b| a.max(b.abs()));
        [m(&self.dtheta), m(&self.dphi)]
    }
}

/// Solver statistics of a run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    pub steps: usize,
    pub substeps: usize,
    pub max_halvings: u32,
    pub max_iterations: usize,
    pub clamp_events: usize,
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub traces: Traces,
    pub jumps: JumpSeries,
    pub final_state: NodalState,
    pub stats: RunStats,
}

/// Boundary conditions from the interpolated climate: Dirichlet on the
/// interior (`Left`) and exterior (`Right`) faces, or surface films.
pub fn climate_bcs(climate: &Arc<ClimateSeries>, film: Option<SurfaceFilm>) -> BoundaryConditions {
    let mut bcs = BoundaryConditions::default();
    type Pick = fn(&ClimateSample) -> f64;
    let faces: [(BoundaryMarker, Field, Pick); 4] = [
        (BoundaryMarker::Left, Field::Theta, |s| s.theta_int),
        (BoundaryMarker::Left, Field::Phi, |s| s.phi_int),
        (BoundaryMarker::Right, Field::Theta, |s| s.theta_ext),
        (BoundaryMarker::Right, Field::Phi, |s| s.phi_ext),
    ];
    for (marker, field, pick) in faces {
        let c = climate.clone();
        match film {
            None => bcs.dirichlet.push(Dirichlet {
                marker,
                field,
                value: Arc::new(move |_, t| pick(&c.at(t))),
            }),
            Some(f) => bcs.robin.push(Robin {
                marker,
                field,
                coefficient: if field == Field::Theta { f.heat } else { f.moisture },
                ambient: Arc::new(move |t| pick(&c.at(t))),
            }),
        }
    }
    bcs
}

struct Sampler {
    names: Vec<String>,
    at: Vec<([usize; 3], [f64; 3])>,
}

impl Sampler {
    fn new(mesh: &Mesh, layout: &SensorLayout) -> Result<Self> {
        let mut at = Vec::new();
        for p in &layout.probes {
            let (t, l) = mesh
                .locate(p.x, p.phase)
                .ok_or_else(|| Error::Sensor(format!("probe `{}` lies outside the mesh", p.name)))?;
            at.push((mesh.triangles[t].nodes, l));
        }
        Ok(Self {
            names: layout.probes.iter().map(|p| p.name.clone()).collect(),
            at,
        })
    }

    fn sample(&self, s: &NodalState) -> (Vec<f64>, Vec<f64>) {
        let v = |f: &[f64], (n, l): &([usize; 3], [f64; 3])| (0..3).map(|i| l[i] * f[n[i]]).sum::<f64>();
        (
            self.at.iter().map(|a| v(&s.theta, a)).collect(),
            self.at.iter().map(|a| v(&s.phi, a)).collect(),
        )
    }
}

/// Marches the wall from the initial state (default: uniform at the first
/// interior climate sample) over `opts.duration`, sampling the probes every
/// `opts.output_interval`.
pub fn run_experiment(
    mesh: &Mesh,
    climate: &ClimateSeries,
    layout: &SensorLayout,
    model: &Model,
    opts: &ExperimentOptions,
) -> Result<ExperimentResult> {
    if !(opts.dt > 0.0 && opts.output_interval > 0.0 && opts.duration >= 0.0) {
        return Err(Error::Config(format!(
            "dt ({}), output interval ({}) must be positive and duration ({}) non-negative",
            opts.dt, opts.output_interval, opts.duration
        )));
    }
    model.validate()?;
    layout.validate(mesh)?;
    let t0 = climate.start();
    let t_end = t0 + opts.duration;
    climate.check_horizon(t0, t_end)?;
    let climate = Arc::new(climate.clone());
    let bcs = climate_bcs(&climate, opts.film);
    let mut solver = TransientSolver::new(mesh, model, &bcs)?;
    solver.newton = opts.newton;
    let sampler = Sampler::new(mesh, layout)?;

    let mut state = match &opts.initial {
        Some(s) if s.len() != mesh.num_nodes() => {
            return Err(Error::Config(format!(
                "initial state has {} nodes, mesh has {}",
                s.len(),
                mesh.num_nodes()
            )))
        }
        Some(s) => s.clone(),
        None => {
            let c = climate.at(t0);
            NodalState::uniform(mesh.num_nodes(), c.theta_int, c.phi_int)
        }
    };
    state.time = t0;
    if opts.film.is_none() {
        bcs.apply(mesh, &mut state, t0);
    }

    let mut traces = Traces {
        probes: sampler.names.clone(),
        ..Traces::default()
    };
    let record = |traces: &mut Traces, s: &NodalState| {
        let (th, ph) = sampler.sample(s);
        traces.times.push(s.time);
        traces.theta.push(th);
        traces.phi.push(ph);
    };
    record(&mut traces, &state);
    let mut stats = RunStats::default();
    let eps = 1e-9 * opts.dt;
    let mut next_output = t0 + opts.output_interval;
    while state.time < t_end - eps {
        let target = next_output.min(t_end);
        let dt = opts.dt.min(target - state.time);
        let (next, rep) = solver.step(&state, dt)?;
        stats.steps += 1;
        stats.substeps += rep.substeps;
        stats.max_halvings = stats.max_halvings.max(rep.halvings);
        stats.max_iterations = stats.max_iterations.max(rep.max_iterations);
        stats.clamp_events += rep.clamp_events;
        state = next;
        if (state.time - target).abs() <= eps {
            state.time = target;
            record(&mut traces, &state);
            next_output += opts.output_interval;
        }
    }
    log::info!(
        "experiment finished: {} steps, max {} Newton iterations, {} clamp events",
        stats.steps,
        stats.max_iterations,
        stats.clamp_events
    );
    let jumps = extract_jumps(&traces, layout, &model.constants)?;
    Ok(ExperimentResult {
        traces,
        jumps,
        final_state: state,
        stats,
    })
}

/// Probe values of a single state as a one-row trace table.
pub fn snapshot(mesh: &Mesh, layout: &SensorLayout, state: &NodalState) -> Result<Traces> {
    let sampler = Sampler::new(mesh, layout)?;
    let (th, ph) = sampler.sample(state);
    Ok(Traces {
        times: vec![state.time],
        probes: sampler.names,
        theta: vec![th],
        phi: vec![ph],
    })
}

/// Jump series `mortar − brick` for every pair of the layout.
pub fn extract_jumps(traces: &Traces, layout: &SensorLayout, c: &PhysicalConstants) -> Result<JumpSeries> {
    let index: HashMap<&str, usize> = traces.probes.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
    let mut cols = Vec::new();
    for pair in &layout.pairs {
        let find = |n: &str| {
            index
                .get(n)
                .copied()
                .ok_or_else(|| Error::Sensor(format!("pair `{}`: traces lack probe `{n}`", pair.name)))
        };
        cols.push((find(&pair.brick)?, find(&pair.mortar)?));
    }
    let pc = back_calculate_pc(traces, c);
    let acc = layout.accuracy;
    let mut out = JumpSeries {
        times: traces.times.clone(),
        pairs: layout.pairs.iter().map(|p| p.name.clone()).collect(),
        ..JumpSeries::default()
    };
    for k in 0..traces.times.len() {
        let (mut dt, mut dp, mut dpc, mut ex) = (vec![], vec![], vec![], vec![]);
        for &(b, m) in &cols {
            let jt = traces.theta[k][m] - traces.theta[k][b];
            let jp = traces.phi[k][m] - traces.phi[k][b];
            dt.push(jt);
            dp.push(jp);
            dpc.push(match (pc.values[k][m], pc.values[k][b]) {
                (Some(a), Some(bb)) => a - bb,
                _ => f64::NAN,
            });
            let band_t = acc.theta_at(traces.theta[k][b].min(traces.theta[k][m]));
            ex.push([jt.abs() > band_t, jp.abs() > acc.phi]);
        }
        out.dtheta.push(dt);
        out.dphi.push(dp);
        out.dpc.push(dpc);
        out.exceeds_accuracy.push(ex);
    }
    Ok(out)
}

/// Capillary pressure of every trace sample; samples with `φ ∉ (0, 1]` are
/// skipped (`None`) and counted.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CapillarySeries {
    pub values: Vec<Vec<Option<f64>>>,
    pub skipped: usize,
}

pub fn back_calculate_pc(traces: &Traces, c: &PhysicalConstants) -> CapillarySeries {
    let mut out = CapillarySeries::default();
    for k in 0..traces.times.len() {
        let row = (0..traces.probes.len())
            .map(|p| {
                let r = capillary_pressure(traces.theta[k][p] + KELVIN_OFFSET, traces.phi[k][p], c).ok();
                if r.is_none() {
                    log::warn!(
                        "probe `{}` at t = {} s: φ = {} has no capillary pressure, sample skipped",
                        traces.probes[p],
                        traces.times[k],
                        traces.phi[k][p]
                    );
                    out.skipped += 1;
                }
                r
            })
            .collect();
        out.values.push(row);
    }
    out
}
