//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero on any FAIL.

mod common;

use common::identification::{moisture_stage, thermal_stage, POOL, SEED};
use common::*;
use masonry_ham::fem::{solve_steady, DofMap, NewtonOptions, Problem};
use masonry_ham::homogenization::{fluctuation_options, homogenize, sweep, BcKind, MacroLoadCase, SweepRow};
use masonry_ham::identify::{run_stage, two_stage, MOISTURE_PARAMETERS, THERMAL_PARAMETERS};
use masonry_ham::material::{local_coefficients, Coupling, HygroState, InterfaceParams, MaterialParams, Model};
use masonry_ham::mesh::{generate_puc, generate_wall_sample, BoundaryMarker, Layout, Mesh, PucSpec, Rect, WallSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::{Duration, Instant};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn patch_test() -> Outcome {
    let mesh = generate_wall_sample(&WallSpec::default()).map_err(|e| e.to_string())?;
    let model = frozen(homogeneous(MaterialParams::brick()), 10.0, 0.5).with_interface(InterfaceParams::perfect());
    let th = |x: [f64; 2]| 5.0 + 30.0 * x[0] - 12.0 * x[1];
    let ph = |x: [f64; 2]| 0.4 + 0.5 * x[0] + 0.3 * x[1];
    let (s, _) = solve_steady(&mesh, &model, &all_faces(th, ph), &uniform(&mesh, 0.0, 0.6), &NewtonOptions::default())
        .map_err(|e| e.to_string())?;
    let mut err: f64 = 0.0;
    for (n, x) in mesh.nodes.iter().enumerate() {
        err = err.max((s.theta[n] - th(*x)).abs()).max((s.phi[n] - ph(*x)).abs());
    }
    check(
        !mesh.interfaces.is_empty() && err <= 1e-10,
        format!("{} interface segments, max nodal error {err:.2e}", mesh.interfaces.len()),
    )
}

fn composite_slab() -> Outcome {
    let (l1, l2, height) = (0.05, 0.05, 0.02);
    let mesh = bilayer(l1, l2, height, 0.005);
    let alpha = 1e5;
    let model = decoupled().with_interface(InterfaceParams::imperfect(alpha, 5.25e-9));
    let phi0 = 0.5;
    let bcs = left_right((24.5, -9.5), (phi0, phi0));
    let (s, _) = solve_steady(&mesh, &model, &bcs, &uniform(&mesh, 10.0, phi0), &NewtonOptions::default())
        .map_err(|e| e.to_string())?;
    let lb = model.brick.thermal_conductivity(phi0).map_err(|e| e.to_string())?;
    let lm = model.mortar.thermal_conductivity(phi0).map_err(|e| e.to_string())?;
    let q = 34.0 / (l1 / lb + 1.0 / alpha + l2 / lm);
    let dofs = DofMap::new(&mesh, &bcs.constraints(&mesh, false)).map_err(|e| e.to_string())?;
    let r = Problem::new(&mesh, &model, &dofs).nodal_residual(&s).map_err(|e| e.to_string())?;
    let flux = nodes_on(&mesh, BoundaryMarker::Left).iter().map(|&n| r[n][0]).sum::<f64>() / height;
    let flux_err = rel(flux, q);
    let jump_err = mesh
        .interfaces
        .iter()
        .map(|seg| rel(s.theta[seg.nodes[0]] - s.theta[seg.nodes[2]], q / alpha))
        .fold(0.0, f64::max);
    check(
        flux_err <= 1e-6 && jump_err <= 1e-6,
        format!("q = {q:.6} W/m2, flux rel. error {flux_err:.1e}, jump rel. error {jump_err:.1e}"),
    )
}

fn convergence() -> Outcome {
    let space = common::convergence::spatial_orders();
    let time = common::convergence::temporal_orders();
    let ok = space.iter().flatten().all(|o| (o - 2.0).abs() <= 0.2) && time.iter().flatten().all(|o| (o - 1.0).abs() <= 0.2);
    let fmt = |v: &[[f64; 2]]| v.iter().map(|o| format!("{:.3}/{:.3}", o[0], o[1])).collect::<Vec<_>>().join(" ");
    check(ok, format!("spatial θ/φ orders {}; temporal {}", fmt(&space), fmt(&time)))
}

fn puc(h: f64) -> Mesh {
    generate_puc(&PucSpec {
        target_size: h,
        ..PucSpec::default()
    })
    .unwrap()
}

fn thermal() -> Model {
    frozen(Model::default(), 20.0, 0.5)
        .with_coupling(Coupling::Decoupled)
        .with_interface(InterfaceParams::perfect())
}

fn homogenization_oracles() -> Outcome {
    let mesh = puc(0.01);
    let model = homogeneous(MaterialParams::brick()).with_interface(InterfaceParams::perfect());
    let k = local_coefficients(&model.brick, HygroState::new(20.0, 0.5), &model).map_err(|e| e.to_string())?.k;
    let mut homog_err: f64 = 0.0;
    for bc in [BcKind::Dirichlet, BcKind::Periodic] {
        let r = homogenize(&mesh, &MacroLoadCase::centered(&mesh, 20.0, 0.5, bc), &model).map_err(|e| e.to_string())?;
        for i in 0..2 {
            for j in 0..2 {
                let b = r.block(i, j);
                let s = k[i][j].abs();
                homog_err = homog_err
                    .max((b[0][0] - k[i][j]).abs() / s)
                    .max((b[1][1] - k[i][j]).abs() / s)
                    .max(b[0][1].abs() / s)
                    .max(b[1][0].abs() / s);
            }
        }
    }

    let laminate = Layout {
        width: 0.1,
        height: 0.1,
        bricks: vec![Rect::new(0.0, 0.025, 0.1, 0.075)],
    }
    .mesh(0.0125, true)
    .unwrap();
    let lb = MaterialParams::brick().thermal_conductivity(0.5).unwrap();
    let lm = MaterialParams::mortar().thermal_conductivity(0.5).unwrap();
    let (mut par_err, mut nor_err): (f64, f64) = (0.0, 0.0);
    for bc in [BcKind::Dirichlet, BcKind::Periodic] {
        let lc = MacroLoadCase::centered(&laminate, 20.0, 0.5, bc).with_gradients([1.0, 1.0], [0.0, 0.0]);
        let kt = homogenize(&laminate, &lc, &thermal()).map_err(|e| e.to_string())?.theta_theta();
        par_err = par_err.max(rel(kt[0][0], 0.5 * (lb + lm)));
        if bc == BcKind::Periodic {
            nor_err = nor_err.max(rel(kt[1][1], 2.0 / (1.0 / lb + 1.0 / lm)));
        }
    }

    let fb = mesh.phase_area(masonry_ham::Phase::Brick) / mesh.total_area();
    let voigt = fb * lb + (1.0 - fb) * lm;
    let reuss = 1.0 / (fb / lb + (1.0 - fb) / lm);
    let mut bounds = true;
    let mut diag = Vec::new();
    for bc in [BcKind::Dirichlet, BcKind::Periodic] {
        let lc = MacroLoadCase::centered(&mesh, 20.0, 0.5, bc).with_gradients([1.0, 1.0], [0.0, 0.0]);
        let kt = homogenize(&mesh, &lc, &thermal()).map_err(|e| e.to_string())?.theta_theta();
        for d in 0..2 {
            bounds &= reuss < kt[d][d] && kt[d][d] < voigt;
            diag.push(kt[d][d]);
        }
    }
    check(
        homog_err <= 1e-10 && par_err <= 1e-6 && nor_err <= 1e-6 && bounds,
        format!(
            "homogeneous rel. error {homog_err:.1e}; laminate parallel {par_err:.1e}, normal {nor_err:.1e}; \
             Reuss {reuss:.4} < K_tt diagonals {diag:.4?} < Voigt {voigt:.4}"
        ),
    )
}

fn hill_mandel() -> Outcome {
    let mesh = puc(0.01);
    let model = Model::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let [x0, y0, x1, y1] = mesh.bounds;
    let (hw, hh) = ((x1 - x0) / 2.0, (y1 - y0) / 2.0);
    let mut worst: f64 = 0.0;
    let mut rejected = 0;
    let mut i = 0;
    while i < 10 {
        let bc = if i % 2 == 0 { BcKind::Dirichlet } else { BcKind::Periodic };
        let lc = MacroLoadCase::centered(&mesh, rng.random_range(5.0..30.0), rng.random_range(0.3..0.8), bc).with_gradients(
            [rng.random_range(-20.0..20.0), rng.random_range(-20.0..20.0)],
            [rng.random_range(-0.8..0.8), rng.random_range(-0.8..0.8)],
        );
        // background humidity kept within the hygroscopic range over the cell
        let reach = lc.grad_phi[0].abs() * hw + lc.grad_phi[1].abs() * hh;
        if lc.phi0 - reach < 0.2 || lc.phi0 + reach > 0.9 {
            rejected += 1;
            continue;
        }
        i += 1;
        let r = homogenize(&mesh, &lc, &model).map_err(|e| format!("case {i}: {e}"))?;
        worst = worst.max(r.hill_mandel);
    }
    check(
        worst <= 1e-8,
        format!("10 cases, {rejected} redrawn outside 0.2 ≤ φ ≤ 0.9, worst relative |<q> + K^M G| = {worst:.1e}"),
    )
}

const GRAD_PHI: [f64; 4] = [0.0, 0.25, 0.5, 1.0];
const PHI0: [f64; 3] = [0.3, 0.5, 0.8];
const ALPHA: f64 = 1e5;
const BETA: f64 = 5.25e-9;

fn k11(row: &SweepRow, block: (usize, usize)) -> Result<f64, String> {
    row.result.as_ref().map(|k| k.block(block.0, block.1)[0][0]).map_err(|e| e.clone())
}

/// `(max − min) / |mean|`.
fn spread(v: &[f64]) -> f64 {
    let max = v.iter().cloned().fold(f64::MIN, f64::max);
    let min = v.iter().cloned().fold(f64::MAX, f64::min);
    (max - min) / (v.iter().sum::<f64>() / v.len() as f64).abs()
}

fn cases(mesh: &Mesh, phi0: &[f64]) -> Vec<MacroLoadCase> {
    phi0.iter()
        .flat_map(|&p| {
            GRAD_PHI
                .iter()
                .map(move |&g| MacroLoadCase::centered(mesh, 20.0, p, BcKind::Dirichlet).with_gradients([10.0, 0.0], [g, 0.0]))
        })
        .collect()
}

fn fig8() -> Outcome {
    let mesh = puc(0.01);
    let interfaces: Vec<InterfaceParams> = [
        (ALPHA, BETA),
        (ALPHA / 10.0, BETA),
        (ALPHA * 10.0, BETA),
        (ALPHA, BETA / 10.0),
        (ALPHA, BETA * 10.0),
    ]
    .iter()
    .map(|&(a, b)| InterfaceParams::imperfect(a, b))
    .collect();
    let rows = sweep(&mesh, &cases(&mesh, &[0.5]), &interfaces, &Model::default(), &fluctuation_options());
    let n = interfaces.len();
    let (mut interface_tt, mut interface_pp) = (0.0f64, 0.0f64);
    let mut kpp_nominal = Vec::new();
    for g in 0..GRAD_PHI.len() {
        let r = &rows[g * n..(g + 1) * n];
        let tt: Vec<f64> = r.iter().map(|x| k11(x, (0, 0))).collect::<Result<_, _>>()?;
        let pp: Vec<f64> = r.iter().map(|x| k11(x, (1, 1))).collect::<Result<_, _>>()?;
        interface_tt = interface_tt.max(spread(&tt));
        interface_pp = interface_pp.max(spread(&pp));
        kpp_nominal.push(pp[0]);
    }
    let gradient_pp = spread(&kpp_nominal);
    let effect = interface_tt.max(interface_pp);
    check(
        interface_tt < 0.02 && interface_pp < 0.02 && gradient_pp > 10.0 * effect,
        format!(
            "interface ±1 decade: K_tt11 {:.3}%, K_pp11 {:.3}%; ∇Φ grid K_pp11 spread {:.1}% ({:.0}x)",
            100.0 * interface_tt,
            100.0 * interface_pp,
            100.0 * gradient_pp,
            gradient_pp / effect
        ),
    )
}

fn fig9() -> Outcome {
    let mesh = puc(0.01);
    let ip = [InterfaceParams::imperfect(ALPHA, BETA)];
    let rows = sweep(&mesh, &cases(&mesh, &PHI0), &ip, &Model::default(), &fluctuation_options());
    let ng = GRAD_PHI.len();
    let at = |p: usize, g: usize, b: (usize, usize)| k11(&rows[p * ng + g], b);
    let mut pp_over_phi0 = f64::MAX;
    let mut tt_over_phi0 = f64::MAX;
    for g in 0..ng {
        let pp: Vec<f64> = (0..PHI0.len()).map(|p| at(p, g, (1, 1))).collect::<Result<_, _>>()?;
        let tt: Vec<f64> = (0..PHI0.len()).map(|p| at(p, g, (0, 0))).collect::<Result<_, _>>()?;
        pp_over_phi0 = pp_over_phi0.min(spread(&pp));
        tt_over_phi0 = tt_over_phi0.min(spread(&tt));
    }
    let mut pp_over_grad = f64::MAX;
    let mut tt_over_grad: f64 = 0.0;
    for p in 0..PHI0.len() {
        let pp: Vec<f64> = (0..ng).map(|g| at(p, g, (1, 1))).collect::<Result<_, _>>()?;
        let tt: Vec<f64> = (0..ng).map(|g| at(p, g, (0, 0))).collect::<Result<_, _>>()?;
        pp_over_grad = pp_over_grad.min(spread(&pp));
        tt_over_grad = tt_over_grad.max(spread(&tt));
    }
    check(
        pp_over_phi0 > 0.1 && pp_over_grad > 0.1 && tt_over_grad < tt_over_phi0,
        format!(
            "K_pp11 spread over Φ0 ≥ {:.1}%, over ∇Φ ≥ {:.1}%; K_tt11 spread over ∇Φ ≤ {:.2}% < over Φ0 ≥ {:.2}%",
            100.0 * pp_over_phi0,
            100.0 * pp_over_grad,
            100.0 * tt_over_grad,
            100.0 * tt_over_phi0
        ),
    )
}

fn identification() -> Outcome {
    let mut truth = Model::default();
    for (n, v) in [
        ("mortar.lambda0", 0.5),
        ("brick.b_tcs", 8.0),
        ("interface.alpha_int", 2.0e5),
        ("brick.w80", 120.0),
        ("mortar.a", 0.7),
        ("interface.beta_int", 6.0e-9),
    ] {
        truth.set(n, v).map_err(|e| e.to_string())?;
    }
    let tol = NewtonOptions::default().tol;
    let thermal = thermal_stage(&truth, &truth, 24.0, 3600.0, 1.1);
    let first = run_stage(&thermal, POOL, SEED, 2, None).map_err(|e| e.to_string())?;
    let b1 = first.best().ok_or("thermal pool failed")?.clone();
    let moisture = moisture_stage(&truth, &Model::default(), 24.0, 3600.0, 0.9);
    let r = two_stage(&thermal, &moisture, POOL, SEED, None).map_err(|e| e.to_string())?;
    let b2 = r.stages[1].best().ok_or("moisture pool failed")?.clone();
    let recovered = THERMAL_PARAMETERS
        .iter()
        .chain(&MOISTURE_PARAMETERS)
        .all(|n| r.model.get(n).ok() == truth.get(n).ok());
    check(
        b1.id == 0 && b1.objective <= tol && b2.id == 0 && b2.objective <= tol && recovered,
        format!(
            "pool {POOL}: thermal argmin #{} objective {:.1e} (runner-up {:.1e}); moisture argmin #{} objective {:.1e}",
            b1.id, b1.objective, first.selection.best[1].objective, b2.id, b2.objective
        ),
    )
}

fn perfect_contact_limit() -> Outcome {
    let mesh = generate_wall_sample(&WallSpec {
        target_size: 0.03,
        ..WallSpec::default()
    })
    .unwrap();
    let (theta, phi) = ((24.5, -9.5), (0.9, 0.4));
    let bcs = left_right(theta, phi);
    let opts = NewtonOptions {
        tol: 1e-12,
        ..NewtonOptions::default()
    };
    let perfect = Model::default().with_interface(InterfaceParams::perfect());
    let (reference, _) = solve_steady(&mesh, &perfect, &bcs, &uniform(&mesh, 10.0, 0.6), &opts).map_err(|e| e.to_string())?;
    let stiff = Model::default().with_interface(InterfaceParams::imperfect(1e12, 1e12));
    let (s, _) = solve_steady(&mesh, &stiff, &bcs, &reference, &opts).map_err(|e| e.to_string())?;
    let d = s.max_abs_diff(&reference);
    let range = [theta.0 - theta.1, phi.0 - phi.1];
    let r = [d[0] / range[0], d[1] / range[1]];
    check(r[0] <= 1e-6 && r[1] <= 1e-6, format!("max |Δθ| / range {:.1e}, max |Δφ| / range {:.1e}", r[0], r[1]))
}

fn main() {
    let criteria: [(&str, Duration, fn() -> Outcome); 9] = [
        ("patch test", Duration::from_secs(1), patch_test),
        ("composite slab", Duration::from_secs(5), composite_slab),
        ("manufactured convergence", Duration::from_secs(120), convergence),
        ("homogenization oracles", Duration::from_secs(60), homogenization_oracles),
        ("Hill-Mandel consistency", Duration::from_secs(120), hill_mandel),
        ("interface insensitivity", Duration::from_secs(600), fig8),
        ("state and loading dependence", Duration::from_secs(600), fig9),
        ("identification round trip", Duration::from_secs(1800), identification),
        ("perfect-contact limit", Duration::from_secs(60), perfect_contact_limit),
    ];
    let mut failed = 0;
    for (i, (name, budget, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = f();
        let took = t.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) => (took <= *budget, d),
            Err(d) => (false, d),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "{} {}. {name}: {detail} [{:.2} s / {} s]",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            took.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
