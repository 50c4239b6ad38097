use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Gaps longer than this are flagged (one day, in seconds).
pub const MAX_GAP: f64 = 86_400.0;

/// Interior and exterior climate at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClimateSample {
    pub t: f64,
    pub theta_int: f64,
    pub phi_int: f64,
    pub theta_ext: f64,
    pub phi_ext: f64,
}

impl ClimateSample {
    pub fn new(t: f64, theta_int: f64, phi_int: f64, theta_ext: f64, phi_ext: f64) -> Self {
        Self {
            t,
            theta_int,
            phi_int,
            theta_ext,
            phi_ext,
        }
    }
}

/// Recorded climate history, linearly interpolated between samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClimateSeries {
    samples: Vec<ClimateSample>,
}

#[derive(Debug, Deserialize, Serialize)]
struct Row {
    t_s: f64,
    #[serde(rename = "theta_int_C")]
    theta_int: f64,
    phi_int: f64,
    #[serde(rename = "theta_ext_C")]
    theta_ext: f64,
    phi_ext: f64,
}

impl ClimateSeries {
    /// Checks strictly increasing times and `φ ∈ (0, 1]`.
    pub fn new(samples: Vec<ClimateSample>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Climate("empty series".into()));
        }
        for (i, s) in samples.iter().enumerate() {
            let vals = [s.t, s.theta_int, s.phi_int, s.theta_ext, s.phi_ext];
            if vals.iter().any(|v| !v.is_finite()) {
                return Err(Error::Climate(format!("non-finite value in sample {i} (t = {})", s.t)));
            }
            for (name, p) in [("phi_int", s.phi_int), ("phi_ext", s.phi_ext)] {
                if !(p > 0.0 && p <= 1.0) {
                    return Err(Error::Climate(format!("{name} = {p} at t = {} s is outside (0, 1]", s.t)));
                }
            }
            if i > 0 && !(s.t > samples[i - 1].t) {
                return Err(Error::Climate(format!(
                    "time stamps must increase strictly: {} s follows {} s",
                    s.t,
                    samples[i - 1].t
                )));
            }
        }
        let series = Self { samples };
        for (a, b) in series.gaps() {
            log::warn!("climate gap of {:.1} h between t = {a} s and t = {b} s", (b - a) / 3600.0);
        }
        Ok(series)
    }

    /// Constant climate sampled every `step` seconds over `[0, duration]`.
    pub fn constant(theta_int: f64, phi_int: f64, theta_ext: f64, phi_ext: f64, duration: f64, step: f64) -> Result<Self> {
        Self::from_fn(duration, step, |t| ClimateSample::new(t, theta_int, phi_int, theta_ext, phi_ext))
    }

    /// Samples `f` every `step` seconds over `[0, duration]`, end included.
    pub fn from_fn(duration: f64, step: f64, f: impl Fn(f64) -> ClimateSample) -> Result<Self> {
        if !(step > 0.0 && duration >= 0.0) {
            return Err(Error::Climate(format!("invalid sampling: duration {duration} s, step {step} s")));
        }
        let n = (duration / step).ceil() as usize;
        let mut samples = (0..=n).map(|i| f((i as f64 * step).min(duration))).collect::<Vec<_>>();
        samples.dedup_by(|b, a| b.t <= a.t);
        Self::new(samples)
    }

    /// First laboratory experiment: exterior held at −9.5 °C, interior at
    /// 24.5 °C, both at `φ = 0.5`, hourly samples.
    pub fn experiment1(days: f64) -> Result<Self> {
        Self::constant(24.5, 0.5, -9.5, 0.5, days * 86_400.0, 3600.0)
    }

    /// Second laboratory experiment: interior `φ = 0.95`, exterior `φ = 0.3`,
    /// both faces at 27 °C, hourly samples.
    pub fn experiment2(days: f64) -> Result<Self> {
        Self::constant(27.0, 0.95, 27.0, 0.3, days * 86_400.0, 3600.0)
    }

    pub fn samples(&self) -> &[ClimateSample] {
        &self.samples
    }

    pub fn start(&self) -> f64 {
        self.samples[0].t
    }

    pub fn end(&self) -> f64 {
        self.samples[self.samples.len() - 1].t
    }

    /// Intervals between consecutive samples longer than [`MAX_GAP`].
    pub fn gaps(&self) -> Vec<(f64, f64)> {
        self.samples
            .windows(2)
            .filter(|w| w[1].t - w[0].t > MAX_GAP)
            .map(|w| (w[0].t, w[1].t))
            .collect()
    }

    /// Errors unless the series covers `[t0, t1]` without flagged gaps.
    pub fn check_horizon(&self, t0: f64, t1: f64) -> Result<()> {
        if self.start() > t0 || self.end() < t1 {
            return Err(Error::Climate(format!(
                "series covers [{}, {}] s but the run needs [{t0}, {t1}] s",
                self.start(),
                self.end()
            )));
        }
        if let Some((a, b)) = self.gaps().into_iter().find(|&(a, b)| b > t0 && a < t1) {
            return Err(Error::Climate(format!(
                "gap of {:.1} h between t = {a} s and t = {b} s inside the simulation horizon",
                (b - a) / 3600.0
            )));
        }
        Ok(())
    }

    /// Linear interpolation; constant extrapolation outside the record.
    pub fn at(&self, t: f64) -> ClimateSample {
        let s = &self.samples;
        let k = s.partition_point(|x| x.t <= t);
        if k == 0 {
            return ClimateSample { t, ..s[0] };
        }
        if k == s.len() {
            return ClimateSample { t, ..s[k - 1] };
        }
        let (a, b) = (s[k - 1], s[k]);
        let w = (t - a.t) / (b.t - a.t);
        let lerp = |u: f64, v: f64| u + w * (v - u);
        ClimateSample {
            t,
            theta_int: lerp(a.theta_int, b.theta_int),
            phi_int: lerp(a.phi_int, b.phi_int),
            theta_ext: lerp(a.theta_ext, b.theta_ext),
            phi_ext: lerp(a.phi_ext, b.phi_ext),
        }
    }

    /// Reads `t_s,theta_int_C,phi_int,theta_ext_C,phi_ext` with header; lines
    /// starting with `#` are ignored.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(reader);
        let mut samples = Vec::new();
        for (i, row) in rdr.deserialize::<Row>().enumerate() {
            let r = row.map_err(|e| Error::Climate(format!("record {}: {e}", i + 1)))?;
            samples.push(ClimateSample::new(r.t_s, r.theta_int, r.phi_int, r.theta_ext, r.phi_ext));
        }
        Self::new(samples)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_csv(std::fs::File::open(path)?)
    }

    pub fn to_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# schema_version: 1")?;
        let mut w = csv::Writer::from_writer(out);
        for s in &self.samples {
            w.serialize(Row {
                t_s: s.t,
                theta_int: s.theta_int,
                phi_int: s.phi_int,
                theta_ext: s.theta_ext,
                phi_ext: s.phi_ext,
            })?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        self.to_csv(std::io::BufWriter::new(std::fs::File::create(path)?))
    }
}
