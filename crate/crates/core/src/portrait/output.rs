use std::io::Write;

use serde::Serialize;
use serde_json::{json, Value};

use super::{OrbitCurve, Portrait};
use crate::integrate::fmt17;

/// CSV with header `X,Y,Z`.
pub fn write_curve_csv<W: Write>(curve: &OrbitCurve, mut w: W) -> std::io::Result<()> {
    writeln!(w, "X,Y,Z")?;
    for p in &curve.samples {
        writeln!(w, "{},{},{}", fmt17(p[0]), fmt17(p[1]), fmt17(p[2]))?;
    }
    Ok(())
}

/// Entry of the portrait index for one curve file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveFile {
    pub file: String,
    pub kind: &'static str,
    pub separatrix: bool,
    pub h_level: f64,
    pub samples: usize,
}

/// Index JSON: surface, equilibria, singularities, connections and the curve
/// files named by `file_name(i)`.
pub fn portrait_index(p: &Portrait, file_name: impl Fn(usize) -> String) -> Value {
    let files: Vec<CurveFile> = p
        .curves
        .iter()
        .enumerate()
        .map(|(i, c)| CurveFile {
            file: file_name(i),
            kind: c.kind.name(),
            separatrix: c.separatrix,
            h_level: c.h_level,
            samples: c.samples.len(),
        })
        .collect();
    let equilibria: Vec<Value> = p
        .equilibria
        .iter()
        .map(|e| {
            json!({
                "X": e.state.x, "Y": e.state.y, "Z": e.state.z,
                "kind": e.kind, "stability": e.classification.to_string(), "r": e.r,
            })
        })
        .collect();
    json!({
        "circulations": p.circulations,
        "theta": p.theta,
        "surface": p.surface.kind,
        "projection": p.projection,
        "equilibria": equilibria,
        "singularities": p.singularities,
        "singular_rays": p.singular_rays,
        "connections": p.connections,
        "warnings": p.warnings,
        "curves": files,
    })
}
