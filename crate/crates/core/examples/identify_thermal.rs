//! Thermal identification from synthetic first-experiment traces: a Latin
//! hypercube pool over log-normal priors, ranked by accuracy-normalized least
//! squares.
//!
//! `cargo run --release --example identify_thermal`

use masonry_ham::experiment::{run_experiment, ClimateSeries, ExperimentOptions, SensorLayout};
use masonry_ham::identify::{format_parameters, priors_around, run_stage, ExperimentSpec, Stage, THERMAL_PARAMETERS};
use masonry_ham::mesh::{generate_wall_sample, WallSpec};
use masonry_ham::Model;

fn main() -> masonry_ham::Result<()> {
    let wall = WallSpec {
        target_size: 0.04,
        ..WallSpec::default()
    };
    let mut truth = Model::default();
    truth.set("mortar.lambda0", 0.5)?;
    truth.set("brick.b_tcs", 8.0)?;

    let spec = ExperimentSpec {
        mesh: generate_wall_sample(&wall)?,
        climate: ClimateSeries::experiment1(2.0)?,
        layout: SensorLayout::wall_default(&wall),
        model: truth.clone(),
        options: ExperimentOptions {
            dt: 3600.0,
            ..ExperimentOptions::new(86_400.0)
        },
    };
    let observed = run_experiment(&spec.mesh, &spec.climate, &spec.layout, &truth, &spec.options)?.traces;

    // priors centred 10 % off the generating values
    let mut centre = truth.clone();
    for n in THERMAL_PARAMETERS {
        centre.set(n, 1.1 * truth.get(n)?)?;
    }
    let priors = priors_around(&centre, &THERMAL_PARAMETERS, 0.2)?;
    let anchor = THERMAL_PARAMETERS.iter().map(|n| truth.get(n)).collect::<masonry_ham::Result<Vec<_>>>()?;
    let stage = Stage {
        priors,
        spec,
        observed,
        anchor: Some(anchor),
    };

    let r = run_stage(&stage, 30, 1, 5, None)?;
    println!("top 5 of {} realizations (realization 0 holds the generating values):", r.results.len());
    for f in &r.selection.best {
        println!("  #{:<3} objective {:10.4e}  {}", f.id, f.objective, format_parameters(&r.names, &f.params));
    }
    Ok(())
}
