//! Two days of the first laboratory experiment on the wall block: sensor
//! traces and brick–mortar jumps.
//!
//! `cargo run --release --example wall_experiment [-- out_dir]`

use std::fs::File;
use std::path::PathBuf;

use masonry_ham::experiment::{run_experiment, ClimateSeries, ExperimentOptions, SensorLayout};
use masonry_ham::mesh::{generate_wall_sample, WallSpec};
use masonry_ham::Model;

fn main() -> masonry_ham::Result<()> {
    let spec = WallSpec {
        target_size: 0.03,
        ..WallSpec::default()
    };
    let mesh = generate_wall_sample(&spec)?;
    let layout = SensorLayout::wall_default(&spec);
    let climate = ClimateSeries::experiment1(3.0)?;
    let opts = ExperimentOptions {
        dt: 900.0,
        output_interval: 6.0 * 3600.0,
        ..ExperimentOptions::new(2.0 * 86_400.0)
    };
    let r = run_experiment(&mesh, &climate, &layout, &Model::default(), &opts)?;

    print!("   t[h]");
    for p in &r.traces.probes {
        print!("  {p:>12}");
    }
    println!();
    for (k, t) in r.traces.times.iter().enumerate() {
        print!("{:7.1}", t / 3600.0);
        for p in 0..r.traces.probes.len() {
            print!("  {:5.2}C/{:4.3}", r.traces.theta[k][p], r.traces.phi[k][p]);
        }
        println!();
    }
    let [dt, dp] = r.jumps.max_abs();
    println!("largest jumps: |dtheta| = {dt:.3e} K, |dphi| = {dp:.3e}");
    println!(
        "{} steps, {} substeps, max Newton iterations {}",
        r.stats.steps, r.stats.substeps, r.stats.max_iterations
    );

    if let Some(dir) = std::env::args().nth(1).map(PathBuf::from) {
        std::fs::create_dir_all(&dir)?;
        r.traces.to_csv(File::create(dir.join("traces.csv"))?)?;
        r.jumps.to_csv(File::create(dir.join("jumps.csv"))?)?;
        climate.write(&dir.join("climate.csv"))?;
        println!("written to {}", dir.display());
    }
    Ok(())
}
