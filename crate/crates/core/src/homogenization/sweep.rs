use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use super::{homogenize_with, MacroConductivity, MacroLoadCase};
use crate::error::Result;
use crate::fem::NewtonOptions;
use crate::material::{InterfaceParams, Model};
use crate::mesh::Mesh;

pub const SWEEP_SCHEMA_VERSION: u32 = 1;

/// One (load case × interface parameters) result. Failures are kept as the
/// error message.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub case: usize,
    pub load: MacroLoadCase,
    pub interface: InterfaceParams,
    pub result: std::result::Result<MacroConductivity, String>,
}

/// Runs every load case against every interface parameter set in parallel.
/// Rows come back in case-major order regardless of scheduling.
pub fn sweep(
    mesh: &Mesh,
    cases: &[MacroLoadCase],
    interfaces: &[InterfaceParams],
    model: &Model,
    opts: &NewtonOptions,
) -> Vec<SweepRow> {
    let jobs: Vec<(usize, MacroLoadCase, InterfaceParams)> = cases
        .iter()
        .enumerate()
        .flat_map(|(i, lc)| interfaces.iter().map(move |ip| (i, *lc, *ip)))
        .collect();
    jobs.into_par_iter()
        .map(|(case, load, interface)| {
            let m = model.clone().with_interface(interface);
            let result = homogenize_with(mesh, &load, &m, opts).map_err(|e| {
                log::warn!("sweep case {case} failed: {e}");
                e.to_string()
            });
            SweepRow {
                case,
                load,
                interface,
                result,
            }
        })
        .collect()
}

const BLOCKS: [(&str, usize, usize); 4] = [("tt", 0, 0), ("tp", 0, 1), ("pt", 1, 0), ("pp", 1, 1)];

/// CSV with one line per row: load case, interface parameters, the sixteen
/// `K^M` entries (`K_<block>_<r><c>`), Hill–Mandel residual and status.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut out = out;
    writeln!(out, "# schema_version: {SWEEP_SCHEMA_VERSION}")?;
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = [
        "case", "theta0", "phi0", "grad_theta_x", "grad_theta_y", "grad_phi_x", "grad_phi_y", "x0", "y0", "bc",
        "alpha_int", "beta_int", "perfect",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    for (name, _, _) in BLOCKS {
        for r in 1..=2 {
            for c in 1..=2 {
                header.push(format!("K_{name}_{r}{c}"));
            }
        }
    }
    header.extend(["hill_mandel".to_string(), "status".to_string()]);
    w.write_record(&header)?;
    for row in rows {
        let l = &row.load;
        let ip = &row.interface;
        let mut rec: Vec<String> = vec![
            row.case.to_string(),
            l.theta0.to_string(),
            l.phi0.to_string(),
            l.grad_theta[0].to_string(),
            l.grad_theta[1].to_string(),
            l.grad_phi[0].to_string(),
            l.grad_phi[1].to_string(),
            l.x0[0].to_string(),
            l.x0[1].to_string(),
            l.bc.name().to_string(),
            ip.alpha_int.to_string(),
            ip.beta_int.to_string(),
            ip.perfect.to_string(),
        ];
        match &row.result {
            Ok(k) => {
                for (_, i, j) in BLOCKS {
                    let b = k.block(i, j);
                    rec.extend([b[0][0], b[0][1], b[1][0], b[1][1]].iter().map(|v| format!("{v:e}")));
                }
                rec.push(format!("{:e}", k.hill_mandel));
                rec.push("ok".into());
            }
            Err(e) => {
                rec.extend(std::iter::repeat_n(String::new(), 17));
                rec.push(format!("error: {e}"));
            }
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
