use masonry_ham::experiment::{run_experiment, ClimateSeries, ExperimentOptions, SensorLayout};
use masonry_ham::identify::{priors_around, ExperimentSpec, Stage, MOISTURE_PARAMETERS, THERMAL_PARAMETERS};
use masonry_ham::mesh::{generate_wall_sample, WallSpec};
use masonry_ham::Model;

pub const POOL: usize = 50;
pub const SEED: u64 = 20;

pub fn coarse_wall() -> WallSpec {
    WallSpec {
        target_size: 0.04,
        ..WallSpec::default()
    }
}

fn spec(climate: ClimateSeries, model: &Model, hours: f64, dt: f64) -> ExperimentSpec {
    let wall = coarse_wall();
    let mesh = generate_wall_sample(&wall).unwrap();
    let layout = SensorLayout::wall_default(&wall);
    let options = ExperimentOptions {
        dt,
        output_interval: 3600.0,
        ..ExperimentOptions::new(hours * 3600.0)
    };
    ExperimentSpec {
        mesh,
        climate,
        layout,
        model: model.clone(),
        options,
    }
}

fn stage(spec: ExperimentSpec, truth: &Model, names: &[&str], prior_shift: f64) -> Stage {
    let observed = run_experiment(&spec.mesh, &spec.climate, &spec.layout, truth, &spec.options)
        .unwrap()
        .traces;
    let mut centre = truth.clone();
    for n in names {
        centre.set(n, truth.get(n).unwrap() * prior_shift).unwrap();
    }
    let priors = priors_around(&centre, names, 0.2).unwrap();
    let anchor = names.iter().map(|n| truth.get(n).unwrap()).collect();
    Stage {
        priors,
        spec,
        observed,
        anchor: Some(anchor),
    }
}

/// Synthetic first experiment generated by `truth`; the forward model starts
/// from `base`, priors are centred `prior_shift` away from the truth. The
/// thermal traces depend on the moisture set through `λ(w)`, so `base` must
/// carry the true moisture set for an exact round trip.
pub fn thermal_stage(truth: &Model, base: &Model, hours: f64, dt: f64, prior_shift: f64) -> Stage {
    let climate = ClimateSeries::experiment1(hours / 24.0 + 1.0).unwrap();
    stage(spec(climate, base, hours, dt), truth, &THERMAL_PARAMETERS, prior_shift)
}

pub fn moisture_stage(truth: &Model, base: &Model, hours: f64, dt: f64, prior_shift: f64) -> Stage {
    let climate = ClimateSeries::experiment2(hours / 24.0 + 1.0).unwrap();
    stage(spec(climate, base, hours, dt), truth, &MOISTURE_PARAMETERS, prior_shift)
}
