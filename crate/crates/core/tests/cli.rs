use masonry_ham::cli::{manifest_path, run, RunManifest, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OK};
use std::fs;
use std::path::Path;
use std::process::Command;

const BIN: &str = env!("CARGO_BIN_EXE_masonry-ham");

fn cli(args: &[&str]) -> i32 {
    let mut v = vec!["masonry-ham"];
    v.extend_from_slice(args);
    run(v)
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

const COARSE_PUC: &str = "[mesh]\nkind = \"puc\"\ntarget_size = 0.025\n";

/// Data rows of a CSV, skipping `#` comments and the header.
fn rows(file: &Path) -> Vec<Vec<String>> {
    let text = fs::read_to_string(file).unwrap();
    assert!(text.starts_with("# schema_version: 1"));
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    r.records().map(|x| x.unwrap().iter().map(String::from).collect()).collect()
}

fn header(file: &Path) -> Vec<String> {
    let text = fs::read_to_string(file).unwrap();
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    r.headers().unwrap().iter().map(String::from).collect()
}

#[test]
fn mesh_is_written_with_manifest_and_is_reproducible() {
    let d = tempfile::tempdir().unwrap();
    let spec = write(d.path(), "puc.toml", COARSE_PUC);
    let (a, b) = (path(d.path(), "a.mesh"), path(d.path(), "b.mesh"));
    assert_eq!(cli(&["mesh", "--config", &spec, "--out", &a]), EXIT_OK);
    assert_eq!(cli(&["mesh", "--config", &spec, "--out", &b]), EXIT_OK);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let m = RunManifest::read(&manifest_path(Path::new(&a))).unwrap();
    assert_eq!(m.command, "mesh");
    assert_eq!(m.mesh_sha256.unwrap().len(), 64);
    assert_eq!(m.outputs, vec!["a.mesh".to_string()]);
}

#[test]
fn degenerate_spec_exits_2_naming_the_dimension() {
    let d = tempfile::tempdir().unwrap();
    let spec = write(d.path(), "bad.toml", "[mesh]\nkind = \"wall\"\nbrick_height = 0.0\n");
    let out = Command::new(BIN)
        .args(["mesh", "--config", &spec, "--out", &path(d.path(), "m.mesh")])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_CONFIG));
    assert!(String::from_utf8_lossy(&out.stderr).contains("brick_height"));
    assert!(!d.path().join("m.mesh").exists());
}

#[test]
fn malformed_config_exits_2_with_location() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write(d.path(), "run.toml", "seed = 1\n[homogenize]\ntheta0 = 20.0\nphi_0 = 0.5\n");
    let out = Command::new(BIN)
        .args(["homogenize", "--config", &cfg, "--out", &path(d.path(), "o")])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_CONFIG));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("phi_0") && err.contains("line 4"), "{err}");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(cli(&["homogenize"]), EXIT_CONFIG);
    assert_eq!(cli(&["homogenize", "--out", "x", "--bc", "mixed"]), EXIT_CONFIG);
}

#[test]
fn homogeneous_cell_reproduces_local_tangent() {
    let d = tempfile::tempdir().unwrap();
    let cfg = format!(
        "{COARSE_PUC}[homogenize]\nphi0 = 0.6\ngrad_theta = [0.0, 0.0]\n\
         [material.mortar]\nlambda0 = 0.25\nb_tcs = 10.0\nmu = 16.8\nw_f = 229.3\nw80 = 141.68\na = 0.51\nrho_s = 1690.0\n"
    );
    let cfg = write(d.path(), "run.toml", &cfg);
    let out = path(d.path(), "o");
    assert_eq!(cli(&["homogenize", "--config", &cfg, "--out", &out, "--perfect-contact"]), EXIT_OK);
    let r = rows(&Path::new(&out).join("homogenized.csv"));
    let h = header(&Path::new(&out).join("homogenized.csv"));
    assert_eq!(r.len(), 1);
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(Path::new(&out).join("summary.json")).unwrap()).unwrap();
    let local = &summary["result"]["k_local"];
    for (b, (i0, j0)) in [("tt", (0, 0)), ("tp", (0, 2)), ("pt", (2, 0)), ("pp", (2, 2))] {
        for (r_, c_) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            let col = h.iter().position(|c| c == &format!("K_{b}_{}{}", r_ + 1, c_ + 1)).unwrap();
            let k: f64 = r[0][col].parse().unwrap();
            let l = local[i0 + r_][j0 + c_].as_f64().unwrap();
            assert!((k - l).abs() <= 1e-8 * l.abs().max(1e-12), "{b} {r_}{c_}: {k} vs {l}");
        }
    }
    let m = RunManifest::read(&Path::new(&out).join("manifest.json")).unwrap();
    assert!(m.parameters.iter().any(|p| p.name == "mortar.lambda0" && p.provenance == masonry_ham::material::config::Provenance::User));
    assert!(m.notes.iter().any(|n| n.contains("perfect contact")));
}

#[test]
fn sweep_grid_has_one_row_per_point_and_is_thread_count_free() {
    let d = tempfile::tempdir().unwrap();
    let cfg = format!(
        "{COARSE_PUC}[sweep]\ngrad_phi = [[0.0, 0.0], [0.5, 0.0]]\nalpha_int = [1e4, 1e5, 1e6]\nbeta_int = [5.25e-10, 5.25e-9, 5.25e-8]\n"
    );
    let cfg = write(d.path(), "run.toml", &cfg);
    let (o1, o2) = (path(d.path(), "o1"), path(d.path(), "o2"));
    assert_eq!(cli(&["sweep", "--config", &cfg, "--out", &o1, "--jobs", "1"]), EXIT_OK);
    assert_eq!(cli(&["sweep", "--config", &cfg, "--out", &o2, "--jobs", "3", "--bc", "dirichlet"]), EXIT_OK);
    let a = fs::read(Path::new(&o1).join("sweep.csv")).unwrap();
    assert_eq!(a, fs::read(Path::new(&o2).join("sweep.csv")).unwrap());
    let r = rows(&Path::new(&o1).join("sweep.csv"));
    assert_eq!(r.len(), 2 * 9);
    assert!(r.iter().all(|row| row.last().unwrap() == "ok"));
}

#[test]
fn numerical_failure_exits_3_with_diagnostics() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write(d.path(), "run.toml", &format!("{COARSE_PUC}[homogenize]\nphi0 = 0.8\ngrad_phi = [2.0, 0.0]\n"));
    let out = path(d.path(), "o");
    assert_eq!(cli(&["homogenize", "--config", &cfg, "--out", &out]), EXIT_NUMERICAL);
    let diag = fs::read_to_string(Path::new(&out).join("error.json")).unwrap();
    assert!(diag.contains("\"numerical\":true"));
}

#[test]
fn solve_writes_traces_jumps_and_manifest() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write(
        d.path(),
        "run.toml",
        "[mesh]\nkind = \"wall\"\ntarget_size = 0.04\n[solve]\nexperiment = \"experiment2\"\nhours = 4.0\ndt = 1800.0\n",
    );
    let out = path(d.path(), "o");
    assert_eq!(cli(&["solve", "--config", &cfg, "--out", &out]), EXIT_OK);
    let dir = Path::new(&out);
    assert_eq!(header(&dir.join("traces.csv")), ["t_s", "probe_name", "theta_C", "phi"]);
    assert_eq!(header(&dir.join("jumps.csv")), ["t_s", "pair_name", "dtheta_K", "dphi", "dpc_Pa"]);
    assert!(!rows(&dir.join("traces.csv")).is_empty());
    let m = RunManifest::read(&dir.join("manifest.json")).unwrap();
    assert_eq!(m.command, "solve");
    assert_eq!(m.config["solve"]["hours"], 4.0);
}

#[test]
fn synthetic_identification_names_the_truth() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write(
        d.path(),
        "run.toml",
        "seed = 7\n[mesh]\nkind = \"wall\"\ntarget_size = 0.04\n[identify]\npool = 12\nprior_shift = 1.1\n\
         [[identify.stages]]\nexperiment = \"experiment1\"\nparameters = [\"mortar.lambda0\", \"brick.lambda0\", \"interface.alpha_int\"]\nhours = 6.0\n",
    );
    let out = path(d.path(), "o");
    assert_eq!(cli(&["identify", "--config", &cfg, "--out", &out]), EXIT_OK);
    let s: serde_json::Value = serde_json::from_str(&fs::read_to_string(Path::new(&out).join("summary.json")).unwrap()).unwrap();
    let st = &s["stages"][0];
    assert_eq!(st["truth_id"], 0);
    assert_eq!(st["best_id"], 0);
    assert!(st["formatted"].as_str().unwrap().starts_with("{lambda0_m, lambda0_b} = {0.45, 0.25}"));
    assert_eq!(rows(&Path::new(&out).join("stage1_results.csv")).len(), 12);
    let m = RunManifest::read(&Path::new(&out).join("manifest.json")).unwrap();
    assert_eq!(m.seed, Some(7));
    assert!(m.notes.iter().any(|n| n.contains("cov 0.2")));
}

#[test]
fn bundled_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for entry in fs::read_dir(&dir).unwrap() {
        let p = entry.unwrap().path();
        let text = fs::read_to_string(&p).unwrap();
        if p.file_name().unwrap().to_string_lossy().ends_with("_mesh.toml") {
            let spec: masonry_ham::cli::MeshFile = toml::from_str(&text).unwrap();
            spec.mesh.generate().unwrap();
        } else {
            let c: masonry_ham::cli::RunConfig = toml::from_str(&text).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
            c.material.resolve().unwrap();
        }
        n += 1;
    }
    assert!(n >= 6);
}
