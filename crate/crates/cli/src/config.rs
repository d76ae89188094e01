//! Run parameters: command-line flags merged over an optional JSON config.

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, ValueEnum};
use diraclab_core::spectrum::{
    load_spectrum, make_flat_torus, make_round_sphere, make_twisted_torus, BoundaryCondition, ChiralSpectrum,
};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Model,
    Density,
    Index,
    Isospectral,
    Family,
    Validate,
}

/// Every tunable. Unset flags fall back to the config file, then to the
/// documented defaults.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    /// Boundary spectrum document (JSON)
    #[arg(long, global = true)]
    pub spectrum: Option<PathBuf>,
    /// Analytic model: flat-torus, twisted-torus or sphere
    #[arg(long, global = true)]
    pub model: Option<String>,
    /// Flux quanta of the twisted torus
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub flux: Option<i64>,
    /// Torus area (twisted torus)
    #[arg(long, global = true)]
    pub area: Option<f64>,
    /// Sphere radius
    #[arg(long, global = true)]
    pub radius: Option<f64>,
    /// First flat-torus side
    #[arg(long, global = true)]
    pub l1: Option<f64>,
    /// Second flat-torus side
    #[arg(long, global = true)]
    pub l2: Option<f64>,
    /// Spin-structure shifts, e.g. "0.5,0.5"
    #[arg(long, global = true)]
    pub shift: Option<String>,
    /// Spectral cutoff Λ
    #[arg(long, global = true)]
    pub cutoff: Option<f64>,

    /// t grid: "a:b:n", "a:b:n:log" (or "a:b:nlog"), or a comma list
    #[arg(long = "t-grid", global = true)]
    pub t_grid: Option<String>,
    /// u grid, same syntax
    #[arg(long = "u-grid", global = true)]
    pub u_grid: Option<String>,
    /// Cylinder length
    #[arg(long = "L", global = true)]
    #[serde(rename = "L", alias = "length")]
    pub length: Option<f64>,
    /// Condition at u = 0: plus, minus or aps
    #[arg(long, global = true)]
    pub eps0: Option<BoundaryCondition>,
    /// Condition at u = L
    #[arg(long, global = true)]
    pub eps1: Option<BoundaryCondition>,
    /// Swapped condition at u = 0 (isospectral)
    #[arg(long = "eps0-prime", global = true)]
    pub eps0_prime: Option<BoundaryCondition>,
    /// Swapped condition at u = L (isospectral)
    #[arg(long = "eps1-prime", global = true)]
    pub eps1_prime: Option<BoundaryCondition>,
    /// Spectral (APS) density instead of the local one
    #[arg(long, global = true)]
    pub aps: bool,
    /// Orientation of the boundary component: inward or reversed
    #[arg(long, global = true)]
    pub orientation: Option<String>,
    /// Mode pairing for the APS density: adjoint or mirrored
    #[arg(long, global = true)]
    pub pairing: Option<String>,
    /// Upper limit U of the density integral
    #[arg(long, global = true)]
    pub upper: Option<f64>,
    /// Also run the cylinder kernel oracle
    #[arg(long, global = true)]
    pub oracle: bool,
    /// Zero modes at a reversed APS end: killed or free
    #[arg(long = "reversed-aps-zero-modes", global = true)]
    pub reversed_aps_zero_modes: Option<String>,
    /// Interval modes per trace
    #[arg(long, global = true)]
    pub budget: Option<usize>,
    /// Tolerance for constant extraction
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Output path; the JSON summary goes next to it with extension .json
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Family document (JSON)
    #[arg(long, global = true)]
    pub family: Option<PathBuf>,
    /// Built-in QWZ family: chiral or hermitian
    #[arg(long, global = true)]
    pub qwz: Option<String>,
    /// Grid size n of the parameter torus
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// QWZ mass m
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub mass: Option<f64>,
}

/// Config file layout: the parameters plus an optional command.
#[derive(Debug, Default)]
pub struct ConfigFile {
    pub command: Option<Command>,
    pub params: Params,
}

pub fn load_config(path: &Path) -> Result<ConfigFile> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    parse_config(&text).with_context(|| format!("parsing config {}", path.display()))
}

// `flatten` would silently drop unknown keys, so the command is split off by hand.
fn parse_config(text: &str) -> Result<ConfigFile> {
    let mut value: serde_json::Value = serde_json::from_str(text)?;
    let Some(obj) = value.as_object_mut() else {
        bail!("expected a JSON object");
    };
    let command = match obj.remove("command") {
        Some(c) => Some(serde_json::from_value(c).context("command")?),
        None => None,
    };
    Ok(ConfigFile { command, params: serde_json::from_value(value)? })
}

macro_rules! merge_fields {
    ($flags:ident, $file:ident; $($field:ident),*) => {
        $( if $flags.$field.is_none() { $flags.$field = $file.$field; } )*
    };
}

impl Params {
    /// Flags win; the config fills the gaps.
    pub fn merged_over(mut self, file: Params) -> Params {
        merge_fields!(self, file; spectrum, model, flux, area, radius, l1, l2, shift, cutoff, t_grid, u_grid,
            length, eps0, eps1, eps0_prime, eps1_prime, orientation, pairing, upper, reversed_aps_zero_modes,
            budget, tol, out, family, qwz, n, mass);
        self.aps |= file.aps;
        self.oracle |= file.oracle;
        self
    }

    pub fn tol(&self, default: f64) -> Result<f64> {
        let tol = self.tol.unwrap_or(default);
        if !(tol > 0.0) {
            bail!("--tol must be positive, got {tol}");
        }
        Ok(tol)
    }

    pub fn length(&self) -> Result<f64> {
        let l = self.length.unwrap_or(1.0);
        if !(l > 0.0 && l.is_finite()) {
            bail!("--L must be positive, got {l}");
        }
        Ok(l)
    }

    /// The boundary spectrum: a document if given, otherwise an analytic
    /// model (default: twisted torus, c = 3, area 2π).
    pub fn boundary_spectrum(&self) -> Result<ChiralSpectrum> {
        if let Some(path) = &self.spectrum {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            return load_spectrum(&text).map_err(|e| anyhow!("{}: {e}", path.display()));
        }
        let cutoff = self.cutoff.unwrap_or(40.0);
        let model = self.model.as_deref().unwrap_or("twisted-torus");
        let spec = match model {
            "twisted-torus" => make_twisted_torus(self.flux.unwrap_or(3), self.area.unwrap_or(2.0 * PI), cutoff)?,
            "flat-torus" => {
                let shift = parse_shift(self.shift.as_deref().unwrap_or("0,0"))?;
                make_flat_torus(self.l1.unwrap_or(2.0 * PI), self.l2.unwrap_or(2.0 * PI), shift, cutoff)?
            }
            "sphere" => make_round_sphere(self.radius.unwrap_or(1.0), cutoff)?,
            other => bail!("unknown model '{other}' (expected flat-torus, twisted-torus or sphere)"),
        };
        Ok(spec)
    }
}

fn parse_shift(s: &str) -> Result<[f64; 2]> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        bail!("--shift expects two comma-separated values, got '{s}'");
    }
    Ok([parts[0].parse().context("--shift")?, parts[1].parse().context("--shift")?])
}

/// Parses `a:b:n`, `a:b:n:log`, `a:b:nlog` or `x1,x2,...`; the result must
/// be nonempty and strictly increasing.
pub fn parse_grid(spec: &str, name: &str) -> Result<Vec<f64>> {
    let spec = spec.trim();
    let values: Vec<f64> = if spec.contains(':') {
        let mut parts: Vec<&str> = spec.split(':').map(str::trim).collect();
        let mut log = false;
        if parts.last() == Some(&"log") {
            log = true;
            parts.pop();
        }
        if parts.len() != 3 {
            bail!("{name}: expected a:b:n or a:b:n:log, got '{spec}'");
        }
        let count = parts[2].strip_suffix("log").map_or(parts[2], |c| {
            log = true;
            c
        });
        let a: f64 = parts[0].parse().with_context(|| format!("{name}: bad start"))?;
        let b: f64 = parts[1].parse().with_context(|| format!("{name}: bad end"))?;
        let n: usize = count.parse().with_context(|| format!("{name}: bad count"))?;
        if n == 0 {
            bail!("{name}: grid is empty");
        }
        if log && !(a > 0.0 && b > 0.0) {
            bail!("{name}: log grid needs positive endpoints");
        }
        (0..n)
            .map(|k| {
                let s = if n == 1 { 0.0 } else { k as f64 / (n - 1) as f64 };
                if log {
                    a * (b / a).powf(s)
                } else {
                    a + (b - a) * s
                }
            })
            .collect()
    } else {
        spec.split(',')
            .map(|x| x.trim().parse::<f64>().with_context(|| format!("{name}: bad value '{x}'")))
            .collect::<Result<_>>()?
    };
    if values.is_empty() {
        bail!("{name}: grid is empty");
    }
    if values.iter().any(|x| !x.is_finite()) || values.windows(2).any(|w| w[0] >= w[1]) {
        bail!("{name}: grid must be finite and strictly increasing");
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_rejects_unknown_keys() {
        assert!(parse_config(r#"{"command": "index", "bogus": 1}"#).is_err());
        let c = parse_config(r#"{"command": "family", "L": 2.0, "eps0": "aps"}"#).unwrap();
        assert_eq!(c.command, Some(Command::Family));
        assert_eq!((c.params.length, c.params.eps0), (Some(2.0), Some(BoundaryCondition::Aps)));
    }

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0:1:3", "g").unwrap(), vec![0.0, 0.5, 1.0]);
        let g = parse_grid("0.01:1:3log", "g").unwrap();
        assert!((g[1] - 0.1).abs() < 1e-15);
        assert_eq!(parse_grid("0.01:1:3:log", "g").unwrap(), g);
        assert_eq!(parse_grid("0.1, 0.2", "g").unwrap(), vec![0.1, 0.2]);
        assert!(parse_grid("1:0:3", "g").is_err());
        assert!(parse_grid("0.2,0.1", "g").is_err());
        assert!(parse_grid("0:1:0", "g").is_err());
    }

    #[test]
    fn flags_win() {
        let flags = Params { tol: Some(1e-6), ..Default::default() };
        let file = Params { tol: Some(1e-3), length: Some(2.0), oracle: true, ..Default::default() };
        let m = flags.merged_over(file);
        assert_eq!((m.tol, m.length, m.oracle), (Some(1e-6), Some(2.0), true));
    }
}
