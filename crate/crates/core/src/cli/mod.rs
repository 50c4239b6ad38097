//! Batch entry point: mesh generation, wall simulation, homogenization,
//! sweeps and identification with a manifest next to every output.
//!
//! Exit codes: `0` success, `2` usage or configuration error, `3` numerical
//! failure (diagnostics in `error.json`).

pub mod config;
mod manifest;

use std::ffi::OsString;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

pub use config::{
    HomogenizeConfig, IdentifyConfig, Laboratory, MeshFile, MeshSpec, RunConfig, SolveConfig, StageConfig,
    SweepConfig,
};
pub use manifest::{mesh_hash, RunManifest, MANIFEST_SCHEMA_VERSION};

use crate::error::{Error, Result};
use crate::experiment::{run_experiment, ClimateSeries, ExperimentOptions, RunStats, SensorLayout};
use crate::homogenization::{
    fluctuation_options, homogenize_with, sweep, write_sweep_csv, BcKind, MacroConductivity, MacroLoadCase, SweepRow,
};
use crate::identify::{
    pipeline, priors_around, write_results_csv, ExperimentSpec, Stage, StageSummary, MOISTURE_PARAMETERS,
    THERMAL_PARAMETERS,
};
use crate::material::config::ResolvedModel;
use crate::material::{InterfaceParams, Model};
use crate::mesh::{validate, Mesh, PucSpec, WallSpec};
use config::{read_toml, resolve_path};
use manifest::Clock;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "masonry-ham", version, about = "Heat and moisture transport in brick-mortar masonry")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Worker threads; all cores by default.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate and validate a mesh from a `[mesh]` spec file.
    Mesh(MeshArgs),
    /// Simulate a wall sample under a climate history.
    Solve(RunArgs),
    /// Homogenize the unit cell for one macroscopic load case.
    Homogenize(RunArgs),
    /// Homogenize over a grid of load cases and interface parameters.
    Sweep(RunArgs),
    /// Identify parameters from sensor traces.
    Identify(RunArgs),
}

#[derive(Debug, Args)]
pub struct MeshArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Mesh file; `.json` selects the JSON form.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BcArg {
    Dirichlet,
    Periodic,
}

impl From<BcArg> for BcKind {
    fn from(b: BcArg) -> Self {
        match b {
            BcArg::Dirichlet => BcKind::Dirichlet,
            BcArg::Periodic => BcKind::Periodic,
        }
    }
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Mesh file overriding the configured geometry.
    #[arg(long)]
    pub mesh: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub bc: Option<BcArg>,
    /// Continuous fields across every brick-mortar interface.
    #[arg(long)]
    pub perfect_contact: bool,
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let jobs = cli.jobs.unwrap_or_else(rayon::current_num_threads).max(1);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: thread pool: {e}");
            return EXIT_CONFIG;
        }
    };
    let out_dir = match &cli.command {
        Command::Mesh(_) => None,
        Command::Solve(a) | Command::Homogenize(a) | Command::Sweep(a) | Command::Identify(a) => Some(a.out.clone()),
    };
    match pool.install(|| dispatch(&cli.command, jobs)) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            let code = exit_code(&e);
            if code == EXIT_NUMERICAL {
                if let Some(dir) = out_dir {
                    write_diagnostics(&dir, &e);
                }
            }
            code
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_CONFIG
    }
}

fn write_diagnostics(dir: &Path, e: &Error) {
    let body = serde_json::json!({ "schema_version": 1, "error": e.to_string(), "numerical": e.is_numerical() });
    if std::fs::create_dir_all(dir).is_ok() {
        let _ = std::fs::write(dir.join("error.json"), body.to_string() + "\n");
    }
}

fn dispatch(cmd: &Command, jobs: usize) -> Result<()> {
    match cmd {
        Command::Mesh(a) => cmd_mesh(a, jobs),
        Command::Solve(a) => cmd_solve(a, jobs),
        Command::Homogenize(a) => cmd_homogenize(a, jobs),
        Command::Sweep(a) => cmd_sweep(a, jobs),
        Command::Identify(a) => cmd_identify(a, jobs),
    }
}

/// Everything a run command shares: config, model, mesh and manifest stub.
struct Context {
    config: RunConfig,
    base: PathBuf,
    resolved: ResolvedModel,
    model: Model,
    mesh: Mesh,
    /// Generated wall geometry, for the default sensor layout.
    wall: Option<WallSpec>,
    seed: Option<u64>,
    clock: Clock,
    notes: Vec<String>,
}

#[derive(Clone, Copy)]
enum DefaultMesh {
    Puc,
    Wall,
}

impl Context {
    fn load(a: &RunArgs, default_mesh: DefaultMesh) -> Result<Self> {
        let clock = Clock::start();
        let (config, base) = match &a.config {
            Some(p) => (
                read_toml::<RunConfig>(p)?,
                p.parent().map(Path::to_path_buf).unwrap_or_default(),
            ),
            None => (RunConfig::default(), PathBuf::from(".")),
        };
        let resolved = config.material.resolve()?;
        let mut model = resolved.model.clone();
        let mut notes = Vec::new();
        if a.perfect_contact {
            model.interface.perfect = true;
            notes.push("perfect contact forced from the command line".into());
        }
        let spec = match (&a.mesh, &config.mesh_file, &config.mesh) {
            (Some(_), _, _) | (None, Some(_), _) => None,
            (None, None, Some(s)) => Some(*s),
            (None, None, None) => Some(match default_mesh {
                DefaultMesh::Puc => MeshSpec::Puc(PucSpec::default()),
                DefaultMesh::Wall => MeshSpec::Wall(WallSpec::default()),
            }),
        };
        let mesh = match (&a.mesh, &config.mesh_file, &spec) {
            (Some(p), _, _) => Mesh::read(p)?,
            (None, Some(p), _) => Mesh::read(&resolve_path(&base, p))?,
            (_, _, Some(s)) => s.generate()?,
            _ => unreachable!(),
        };
        let report = validate(&mesh);
        if !report.is_empty() {
            return Err(Error::Mesh(report.to_string()));
        }
        let wall = match spec {
            Some(MeshSpec::Wall(w)) => Some(w),
            _ => None,
        };
        Ok(Self {
            seed: a.seed.or(config.seed),
            config,
            base,
            resolved,
            model,
            mesh,
            wall,
            clock,
            notes,
        })
    }

    fn manifest(&self, command: &str, config: &impl Serialize, jobs: usize, outputs: Vec<String>) -> RunManifest {
        let mut parameters = self.resolved.parameters.clone();
        for p in &mut parameters {
            if let Ok(v) = self.model.get(&p.name) {
                p.value = v;
            }
        }
        RunManifest {
            schema_version: MANIFEST_SCHEMA_VERSION,
            command: command.into(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            config: serde_json::to_value(config).unwrap_or(serde_json::Value::Null),
            mesh_sha256: Some(mesh_hash(&self.mesh)),
            parameters,
            seed: self.seed,
            jobs,
            started_unix_s: self.clock.unix_s(),
            wall_clock_s: self.clock.elapsed_s(),
            outputs,
            notes: self.notes.clone(),
        }
    }

    fn layout(&self, sensors: Option<&SensorLayout>) -> Result<SensorLayout> {
        match (sensors, self.wall) {
            (Some(s), _) => Ok(s.clone()),
            (None, Some(w)) => Ok(SensorLayout::wall_default(&w)),
            (None, None) => Err(Error::Config(
                "solve.sensors is required unless the mesh is a generated wall".into(),
            )),
        }
    }
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn write_json(dir: &Path, name: &str, value: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    std::fs::write(dir.join(name), text + "\n")?;
    Ok(())
}

fn prepare_out(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    Ok(())
}

pub fn cmd_mesh(a: &MeshArgs, jobs: usize) -> Result<()> {
    let clock = Clock::start();
    let spec: MeshFile = read_toml(&a.config)?;
    let mesh = spec.mesh.generate()?;
    let report = validate(&mesh);
    if !report.is_empty() {
        return Err(Error::Mesh(report.to_string()));
    }
    if let Some(dir) = a.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    mesh.write(&a.out)?;
    let manifest = RunManifest {
        schema_version: MANIFEST_SCHEMA_VERSION,
        command: "mesh".into(),
        tool_version: env!("CARGO_PKG_VERSION").into(),
        config: serde_json::to_value(&spec).unwrap_or(serde_json::Value::Null),
        mesh_sha256: Some(mesh_hash(&mesh)),
        parameters: Vec::new(),
        seed: None,
        jobs,
        started_unix_s: clock.unix_s(),
        wall_clock_s: clock.elapsed_s(),
        outputs: vec![file_name(&a.out)],
        notes: Vec::new(),
    };
    manifest.write(&manifest_path(&a.out))
}

/// `<out>.manifest.json` next to a single-file output.
pub fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

fn file_name(p: &Path) -> String {
    p.file_name().map_or_else(String::new, |n| n.to_string_lossy().into_owned())
}

fn laboratory_climate(lab: Laboratory, hours: f64) -> Result<ClimateSeries> {
    let days = hours / 24.0 + 1.0;
    match lab {
        Laboratory::Experiment1 => ClimateSeries::experiment1(days),
        Laboratory::Experiment2 => ClimateSeries::experiment2(days),
    }
}

#[derive(Serialize)]
struct SolveSummary {
    schema_version: u32,
    stats: RunStats,
    /// Largest `|Δθ|` and `|Δφ|` over all pairs and outputs.
    max_jump: [f64; 2],
    jump_exceeds_accuracy: bool,
}

pub fn cmd_solve(a: &RunArgs, jobs: usize) -> Result<()> {
    let ctx = Context::load(a, DefaultMesh::Wall)?;
    let cfg = ctx.config.solve.clone().unwrap_or_default();
    let climate = match &cfg.climate {
        Some(p) => ClimateSeries::read(&resolve_path(&ctx.base, p))?,
        None => laboratory_climate(cfg.experiment, cfg.hours)?,
    };
    let layout = ctx.layout(cfg.sensors.as_ref())?;
    let opts = ExperimentOptions {
        dt: cfg.dt,
        output_interval: cfg.output_interval,
        film: cfg.film,
        ..ExperimentOptions::new(cfg.hours * 3600.0)
    };
    prepare_out(&a.out)?;
    let r = run_experiment(&ctx.mesh, &climate, &layout, &ctx.model, &opts)?;
    r.traces.to_csv(create(&a.out, "traces.csv")?)?;
    r.jumps.to_csv(create(&a.out, "jumps.csv")?)?;
    let summary = SolveSummary {
        schema_version: 1,
        stats: r.stats.clone(),
        max_jump: r.jumps.max_abs(),
        jump_exceeds_accuracy: r.jumps.exceeds_accuracy.iter().flatten().any(|b| b.iter().any(|&x| x)),
    };
    write_json(&a.out, "summary.json", &summary)?;
    let resolved = serde_json::json!({ "solve": cfg, "sensors": layout, "mesh": ctx.config.mesh, "mesh_file": ctx.config.mesh_file });
    let outputs = ["traces.csv", "jumps.csv", "summary.json"].map(String::from).to_vec();
    ctx.manifest("solve", &resolved, jobs, outputs).write(&a.out.join("manifest.json"))
}

#[derive(Serialize)]
struct HomogenizeSummary<'a> {
    schema_version: u32,
    result: &'a MacroConductivity,
}

pub fn cmd_homogenize(a: &RunArgs, jobs: usize) -> Result<()> {
    let ctx = Context::load(a, DefaultMesh::Puc)?;
    let mut cfg = ctx.config.homogenize.clone().unwrap_or_default();
    if let Some(bc) = a.bc {
        cfg.bc = bc.into();
    }
    let mut lc = MacroLoadCase::centered(&ctx.mesh, cfg.theta0, cfg.phi0, cfg.bc).with_gradients(cfg.grad_theta, cfg.grad_phi);
    if let Some(x0) = cfg.x0 {
        lc.x0 = x0;
    }
    prepare_out(&a.out)?;
    let k = homogenize_with(&ctx.mesh, &lc, &ctx.model, &fluctuation_options())?;
    let row = SweepRow {
        case: 0,
        load: lc,
        interface: ctx.model.interface,
        result: Ok(k.clone()),
    };
    write_sweep_csv(&[row], create(&a.out, "homogenized.csv")?)?;
    write_json(
        &a.out,
        "summary.json",
        &HomogenizeSummary {
            schema_version: 1,
            result: &k,
        },
    )?;
    let resolved = serde_json::json!({ "homogenize": cfg, "load": lc, "mesh": ctx.config.mesh, "mesh_file": ctx.config.mesh_file });
    let outputs = ["homogenized.csv", "summary.json"].map(String::from).to_vec();
    ctx.manifest("homogenize", &resolved, jobs, outputs).write(&a.out.join("manifest.json"))
}

/// Load cases of a sweep in `θ0 × φ0 × ∇θ × ∇φ` order.
pub fn sweep_cases(mesh: &Mesh, cfg: &SweepConfig) -> Vec<MacroLoadCase> {
    let mut cases = Vec::new();
    for &t in &cfg.theta0 {
        for &p in &cfg.phi0 {
            for &gt in &cfg.grad_theta {
                for &gp in &cfg.grad_phi {
                    cases.push(MacroLoadCase::centered(mesh, t, p, cfg.bc).with_gradients(gt, gp));
                }
            }
        }
    }
    cases
}

/// Interface sets of a sweep in `α × β` order, perfect contact last.
pub fn sweep_interfaces(model: &Model, cfg: &SweepConfig) -> Vec<InterfaceParams> {
    let alphas = if cfg.alpha_int.is_empty() {
        vec![model.interface.alpha_int]
    } else {
        cfg.alpha_int.clone()
    };
    let betas = if cfg.beta_int.is_empty() {
        vec![model.interface.beta_int]
    } else {
        cfg.beta_int.clone()
    };
    let mut v: Vec<InterfaceParams> = alphas
        .iter()
        .flat_map(|&a| betas.iter().map(move |&b| InterfaceParams::imperfect(a, b)))
        .collect();
    if cfg.include_perfect {
        v.push(InterfaceParams::perfect());
    }
    v
}

#[derive(Serialize)]
struct SweepSummary {
    schema_version: u32,
    cases: usize,
    interfaces: usize,
    rows: usize,
    failed: usize,
}

pub fn cmd_sweep(a: &RunArgs, jobs: usize) -> Result<()> {
    let ctx = Context::load(a, DefaultMesh::Puc)?;
    let mut cfg = ctx.config.sweep.clone().unwrap_or_default();
    if let Some(bc) = a.bc {
        cfg.bc = bc.into();
    }
    let cases = sweep_cases(&ctx.mesh, &cfg);
    let interfaces = if a.perfect_contact {
        vec![InterfaceParams::perfect()]
    } else {
        sweep_interfaces(&ctx.model, &cfg)
    };
    for lc in &cases {
        lc.validate(&ctx.mesh)?;
    }
    for ip in &interfaces {
        ip.validate()?;
    }
    prepare_out(&a.out)?;
    let rows = sweep(&ctx.mesh, &cases, &interfaces, &ctx.model, &fluctuation_options());
    write_sweep_csv(&rows, create(&a.out, "sweep.csv")?)?;
    let failed = rows.iter().filter(|r| r.result.is_err()).count();
    write_json(
        &a.out,
        "summary.json",
        &SweepSummary {
            schema_version: 1,
            cases: cases.len(),
            interfaces: interfaces.len(),
            rows: rows.len(),
            failed,
        },
    )?;
    let resolved = serde_json::json!({ "sweep": cfg, "mesh": ctx.config.mesh, "mesh_file": ctx.config.mesh_file });
    let outputs = ["sweep.csv", "summary.json"].map(String::from).to_vec();
    ctx.manifest("sweep", &resolved, jobs, outputs).write(&a.out.join("manifest.json"))?;
    if failed == rows.len() && !rows.is_empty() {
        if let Some(Err(msg)) = rows.first().map(|r| &r.result) {
            return Err(Error::LinearSolver(format!("every sweep row failed; first: {msg}")));
        }
    }
    Ok(())
}

/// Thermal stage on the first experiment, moisture stage on the second.
pub fn default_stages() -> Vec<StageConfig> {
    let stage = |experiment, names: &[&str]| StageConfig {
        experiment,
        parameters: names.iter().map(|s| s.to_string()).collect(),
        priors: Vec::new(),
        observed: None,
        hours: 24.0,
        dt: 3600.0,
    };
    vec![
        stage(Laboratory::Experiment1, &THERMAL_PARAMETERS),
        stage(Laboratory::Experiment2, &MOISTURE_PARAMETERS),
    ]
}

#[derive(Serialize)]
struct IdentifyStageReport {
    experiment: Laboratory,
    synthetic: bool,
    /// Realization holding the generating parameters, for synthetic anchored pools.
    truth_id: Option<usize>,
    #[serde(flatten)]
    summary: StageSummary,
}

#[derive(Serialize)]
struct IdentifySummary {
    schema_version: u32,
    seed: u64,
    stages: Vec<IdentifyStageReport>,
    /// Identified values of every stage.
    optimum: Vec<(String, f64)>,
}

pub fn cmd_identify(a: &RunArgs, jobs: usize) -> Result<()> {
    let mut ctx = Context::load(a, DefaultMesh::Wall)?;
    let mut cfg = ctx.config.identify.clone().unwrap_or_default();
    if cfg.stages.is_empty() {
        cfg.stages = default_stages();
    }
    if cfg.pool == 0 {
        return Err(Error::Config("identify.pool must be at least 1".into()));
    }
    let seed = ctx.seed.unwrap_or(0);
    ctx.seed = Some(seed);
    let sensors = ctx.config.solve.as_ref().and_then(|s| s.sensors.clone());
    let layout = ctx.layout(sensors.as_ref())?;
    let truth = ctx.model.clone();
    let mut stages = Vec::new();
    let mut synthetic = Vec::new();
    for (i, sc) in cfg.stages.iter().enumerate() {
        let names: Vec<&str> = sc.parameters.iter().map(String::as_str).collect();
        let priors = if sc.priors.is_empty() {
            let mut centre = truth.clone();
            for n in &names {
                centre.set(n, truth.get(n)? * cfg.prior_shift)?;
            }
            ctx.notes.push(format!(
                "stage {}: generated priors with cov {} centred at {} x material values",
                i + 1,
                cfg.cov,
                cfg.prior_shift
            ));
            priors_around(&centre, &names, cfg.cov)?
        } else {
            let given: Vec<&str> = sc.priors.iter().map(|p| p.name.as_str()).collect();
            if given != names {
                return Err(Error::Config(format!(
                    "identify.stages[{i}].priors must list {names:?} in order, got {given:?}"
                )));
            }
            sc.priors.clone()
        };
        let spec = ExperimentSpec {
            mesh: ctx.mesh.clone(),
            climate: laboratory_climate(sc.experiment, sc.hours)?,
            layout: layout.clone(),
            model: truth.clone(),
            options: ExperimentOptions {
                dt: sc.dt,
                ..ExperimentOptions::new(sc.hours * 3600.0)
            },
        };
        let (observed, anchor) = match &sc.observed {
            Some(p) => (crate::experiment::Traces::from_csv(File::open(resolve_path(&ctx.base, p))?)?, None),
            None => {
                let obs = run_experiment(&spec.mesh, &spec.climate, &spec.layout, &truth, &spec.options)?.traces;
                let anchor = if cfg.anchor_truth {
                    Some(names.iter().map(|n| truth.get(n)).collect::<Result<Vec<f64>>>()?)
                } else {
                    None
                };
                (obs, anchor)
            }
        };
        synthetic.push((sc.experiment, sc.observed.is_none(), anchor.is_some()));
        stages.push(Stage {
            priors,
            spec,
            observed,
            anchor,
        });
    }
    prepare_out(&a.out)?;
    let result = pipeline(&stages, cfg.pool, seed, None)?;
    let mut outputs = Vec::new();
    let mut reports = Vec::new();
    let mut optimum = Vec::new();
    for (i, (r, stage)) in result.stages.iter().zip(&stages).enumerate() {
        let name = format!("stage{}_results.csv", i + 1);
        write_results_csv(&r.names, &r.results, create(&a.out, &name)?)?;
        outputs.push(name);
        let mut summary = r.summary(&stage.priors);
        summary.top.truncate(cfg.top_k);
        if let Some(best) = r.best() {
            optimum.extend(r.names.iter().cloned().zip(best.params.iter().copied()));
        }
        let (experiment, synth, anchored) = synthetic[i];
        reports.push(IdentifyStageReport {
            experiment,
            synthetic: synth,
            truth_id: anchored.then_some(0),
            summary,
        });
    }
    write_json(
        &a.out,
        "summary.json",
        &IdentifySummary {
            schema_version: 1,
            seed,
            stages: reports,
            optimum,
        },
    )?;
    outputs.push("summary.json".into());
    let resolved = serde_json::json!({ "identify": cfg, "sensors": layout, "mesh": ctx.config.mesh, "mesh_file": ctx.config.mesh_file });
    ctx.manifest("identify", &resolved, jobs, outputs).write(&a.out.join("manifest.json"))
}
