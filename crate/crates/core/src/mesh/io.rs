//! Mesh files: a versioned plain-text format and a JSON form.
//!
//! ```text
//! MESH 1
//! BOUNDS x_min y_min x_max y_max
//! PERIOD w h            (or: PERIOD none)
//! NODES n
//! x y
//! TRIANGLES n
//! a b c phase
//! INTERFACES n
//! a1 b1 a2 b2 id
//! BOUNDARY n
//! a b marker
//! PERIODIC n
//! master slave axis
//! END
//! ```
//!
//! Floats use shortest round-trip formatting, so write → read is bit exact.

use std::fmt::Write as _;
use std::path::Path;

use super::{BoundaryEdge, BoundaryMarker, InterfaceSegment, Mesh, PeriodicPair, Triangle};
use crate::error::{Error, Result};
use crate::material::Phase;

pub const MESH_FORMAT_VERSION: u32 = 1;

impl Mesh {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "MESH {MESH_FORMAT_VERSION}");
        let [a, b, c, d] = self.bounds;
        let _ = writeln!(s, "BOUNDS {a:?} {b:?} {c:?} {d:?}");
        match self.period {
            Some([w, h]) => {
                let _ = writeln!(s, "PERIOD {w:?} {h:?}");
            }
            None => s.push_str("PERIOD none\n"),
        }
        let _ = writeln!(s, "NODES {}", self.nodes.len());
        for [x, y] in &self.nodes {
            let _ = writeln!(s, "{x:?} {y:?}");
        }
        let _ = writeln!(s, "TRIANGLES {}", self.triangles.len());
        for t in &self.triangles {
            let [a, b, c] = t.nodes;
            let _ = writeln!(s, "{a} {b} {c} {}", t.phase.name());
        }
        let _ = writeln!(s, "INTERFACES {}", self.interfaces.len());
        for seg in &self.interfaces {
            let [a1, b1, a2, b2] = seg.nodes;
            let _ = writeln!(s, "{a1} {b1} {a2} {b2} {}", seg.id);
        }
        let _ = writeln!(s, "BOUNDARY {}", self.boundary.len());
        for e in &self.boundary {
            let _ = writeln!(s, "{} {} {}", e.nodes[0], e.nodes[1], e.marker.name());
        }
        let _ = writeln!(s, "PERIODIC {}", self.periodic.len());
        for p in &self.periodic {
            let _ = writeln!(s, "{} {} {}", p.master, p.slave, p.axis);
        }
        s.push_str("END\n");
        s
    }

    pub fn from_text(text: &str) -> Result<Mesh> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let mut next = |what: &str| {
            lines
                .next()
                .ok_or_else(|| Error::Parse(format!("unexpected end of mesh file, expected {what}")))
        };

        let (ln, header) = next("MESH header")?;
        let version: u32 = match header.split_whitespace().collect::<Vec<_>>()[..] {
            ["MESH", v] => num(v, ln)?,
            _ => return Err(perr(ln, "expected `MESH <version>`")),
        };
        if version != MESH_FORMAT_VERSION {
            return Err(perr(ln, &format!("unsupported mesh format version {version}")));
        }
        let (ln, l) = next("BOUNDS")?;
        let f = fields(l, "BOUNDS", 4, ln)?;
        let bounds = [num(f[0], ln)?, num(f[1], ln)?, num(f[2], ln)?, num(f[3], ln)?];
        let (ln, l) = next("PERIOD")?;
        let period = match l.split_whitespace().collect::<Vec<_>>()[..] {
            ["PERIOD", "none"] => None,
            ["PERIOD", w, h] => Some([num(w, ln)?, num(h, ln)?]),
            _ => return Err(perr(ln, "expected `PERIOD <w> <h>` or `PERIOD none`")),
        };

        let mut section = |name: &str, width: usize| -> Result<Vec<(usize, Vec<String>)>> {
            let (ln, l) = next(name)?;
            let f = fields(l, name, 1, ln)?;
            let count: usize = num(f[0], ln)?;
            let mut rows = Vec::with_capacity(count);
            for _ in 0..count {
                let (ln, l) = next(name)?;
                let row: Vec<String> = l.split_whitespace().map(str::to_string).collect();
                if row.len() != width {
                    return Err(perr(ln, &format!("{name} row needs {width} fields")));
                }
                rows.push((ln, row));
            }
            Ok(rows)
        };

        let nodes = section("NODES", 2)?
            .into_iter()
            .map(|(ln, r)| Ok([num(&r[0], ln)?, num(&r[1], ln)?]))
            .collect::<Result<Vec<_>>>()?;
        let triangles = section("TRIANGLES", 4)?
            .into_iter()
            .map(|(ln, r)| {
                Ok(Triangle {
                    nodes: [num(&r[0], ln)?, num(&r[1], ln)?, num(&r[2], ln)?],
                    phase: Phase::parse(&r[3]).map_err(|_| perr(ln, "unknown phase"))?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let interfaces = section("INTERFACES", 5)?
            .into_iter()
            .map(|(ln, r)| {
                Ok(InterfaceSegment {
                    nodes: [num(&r[0], ln)?, num(&r[1], ln)?, num(&r[2], ln)?, num(&r[3], ln)?],
                    id: num(&r[4], ln)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let boundary = section("BOUNDARY", 3)?
            .into_iter()
            .map(|(ln, r)| {
                let marker = BoundaryMarker::parse(&r[2]).ok_or_else(|| perr(ln, "unknown boundary marker"))?;
                Ok(BoundaryEdge {
                    nodes: [num(&r[0], ln)?, num(&r[1], ln)?],
                    marker,
                    normal: marker.outward_normal(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let periodic = section("PERIODIC", 3)?
            .into_iter()
            .map(|(ln, r)| {
                Ok(PeriodicPair {
                    master: num(&r[0], ln)?,
                    slave: num(&r[1], ln)?,
                    axis: num(&r[2], ln)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let (ln, l) = next("END")?;
        if l != "END" {
            return Err(perr(ln, "expected END"));
        }
        Ok(Mesh {
            nodes,
            triangles,
            interfaces,
            boundary,
            periodic,
            period,
            bounds,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("mesh serializes")
    }

    pub fn from_json(text: &str) -> Result<Mesh> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Reads a mesh file; `.json` selects the JSON form.
    pub fn read(path: &Path) -> Result<Mesh> {
        let text = std::fs::read_to_string(path)?;
        if path.extension().is_some_and(|e| e == "json") {
            Mesh::from_json(&text)
        } else {
            Mesh::from_text(&text)
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = if path.extension().is_some_and(|e| e == "json") {
            self.to_json()
        } else {
            self.to_text()
        };
        std::fs::write(path, text)?;
        Ok(())
    }
}

fn fields<'a>(line: &'a str, key: &str, n: usize, ln: usize) -> Result<Vec<&'a str>> {
    let f: Vec<&str> = line.split_whitespace().collect();
    if f.first() != Some(&key) || f.len() != n + 1 {
        return Err(perr(ln, &format!("expected `{key}` with {n} value(s)")));
    }
    Ok(f[1..].to_vec())
}

fn num<T: std::str::FromStr>(s: &str, ln: usize) -> Result<T> {
    s.parse().map_err(|_| perr(ln, &format!("cannot parse `{s}`")))
}

fn perr(ln: usize, msg: &str) -> Error {
    Error::Parse(format!("mesh line {ln}: {msg}"))
}
