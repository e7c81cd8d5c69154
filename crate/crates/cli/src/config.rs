use std::path::Path;

use anyhow::{bail, Context, Result};
use num_complex::Complex64;
use serde::Deserialize;
use vortex3_core::circulation::{deserialize_real, parse_rational, rational_to_f64};
use vortex3_core::portrait::{OutputFormat, Projection};

/// A number or a `"p/q"` string.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(transparent)]
pub struct Real(#[serde(deserialize_with = "deserialize_real")] pub f64);

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub circulations: Option<Vec<Real>>,
    pub theta: Option<Real>,
    pub tol: Option<f64>,
    /// `[[x1, y1], [x2, y2], ...]`
    pub positions: Option<Vec<[f64; 2]>>,
    pub t_end: Option<f64>,
    pub samples: Option<usize>,
    pub portrait: Option<PortraitConfig>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PortraitConfig {
    pub projection: Option<Projection>,
    pub orbit_count: Option<usize>,
    pub separatrices: Option<bool>,
    pub outputs: Option<Vec<OutputFormat>>,
    pub zoom: Option<f64>,
    pub epsilon: Option<f64>,
    pub escape: Option<f64>,
    pub arrival: Option<f64>,
    pub time_limit: Option<f64>,
}

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Config> {
        let Some(path) = path else { return Ok(Config::default()) };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

/// One real from a decimal or `p/q`.
pub fn parse_real(text: &str) -> Result<f64> {
    let q = parse_rational(text.trim())?;
    Ok(rational_to_f64(&q))
}

pub fn parse_list(text: &str) -> Result<Vec<f64>> {
    text.split(',').map(parse_real).collect()
}

/// `x1,y1;x2,y2;...`
pub fn parse_positions(text: &str) -> Result<Vec<Complex64>> {
    text.split(';')
        .map(|pair| {
            let v = parse_list(pair)?;
            if v.len() != 2 {
                bail!("position {pair:?} needs two coordinates");
            }
            Ok(Complex64::new(v[0], v[1]))
        })
        .collect()
}

/// `start:stop:step`, inclusive of `stop` up to rounding.
pub fn parse_range(text: &str) -> Result<Vec<f64>> {
    let v: Vec<f64> = text.split(':').map(parse_real).collect::<Result<_>>()?;
    let [a, b, step] = v[..] else { bail!("range {text:?} must be start:stop:step") };
    if !(step > 0.0) || !(b >= a) {
        bail!("range {text:?} needs start <= stop and a positive step");
    }
    let n = ((b - a) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| ((a + k as f64 * step) * 1e12).round() / 1e12).collect())
}
