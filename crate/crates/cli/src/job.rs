//! Parsing of command-line values and the job description echoed into JSON output.

use std::path::PathBuf;
use std::str::FromStr;

use clap::ValueEnum;
use pseudoanalytic::bers::IntegrationCfg;
use pseudoanalytic::contexts::Builtin;
use pseudoanalytic::fields::BoundingBox;
use pseudoanalytic::quadrature::QuadratureCfg;
use pseudoanalytic::transplant::TransplantConfig;
use pseudoanalytic::{Domain, Point, Signature};
use serde::Serialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// `x,y`
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct XY {
    pub x: f64,
    pub y: f64,
}

impl XY {
    pub fn point(self) -> Point<f64> {
        Point::new(self.x, self.y)
    }
}

impl FromStr for XY {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let v = floats(s, 2)?;
        Ok(XY { x: v[0], y: v[1] })
    }
}

/// `NxM`, both at least 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GridSize {
    pub nx: usize,
    pub ny: usize,
}

impl FromStr for GridSize {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected NxM, got {s:?}"))?;
        let nx: usize = a.trim().parse().map_err(|_| format!("bad grid width {a:?}"))?;
        let ny: usize = b.trim().parse().map_err(|_| format!("bad grid height {b:?}"))?;
        if nx < 2 || ny < 2 {
            return Err(format!("grid must be at least 2x2, got {nx}x{ny}"));
        }
        Ok(GridSize { nx, ny })
    }
}

/// `x_min,x_max,y_min,y_max`
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Box2 {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Box2 {
    pub fn bounding_box(self) -> BoundingBox<f64> {
        BoundingBox::new(self.x_min, self.x_max, self.y_min, self.y_max)
    }
}

impl FromStr for Box2 {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let v = floats(s, 4)?;
        if !(v[0] < v[1] && v[2] < v[3]) {
            return Err(format!("empty box {s:?}"));
        }
        Ok(Box2 { x_min: v[0], x_max: v[1], y_min: v[2], y_max: v[3] })
    }
}

/// A binumber coefficient: `1`, `i` (or `u`, `j`), or `re,im`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Coeff {
    pub re: f64,
    pub im: f64,
}

impl Coeff {
    pub fn value(self, sig: Signature) -> pseudoanalytic::Binumber<f64> {
        pseudoanalytic::Binumber::new(self.re, self.im, sig)
    }
}

impl FromStr for Coeff {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "i" | "u" | "j" => Ok(Coeff { re: 0.0, im: 1.0 }),
            "-i" | "-u" | "-j" => Ok(Coeff { re: 0.0, im: -1.0 }),
            t if t.contains(',') => {
                let v = floats(t, 2)?;
                Ok(Coeff { re: v[0], im: v[1] })
            }
            t => t.parse().map(|re| Coeff { re, im: 0.0 }).map_err(|_| format!("bad coefficient {s:?}")),
        }
    }
}

fn floats(s: &str, n: usize) -> Result<Vec<f64>, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("bad number {t:?} in {s:?}")))
        .collect::<Result<_, _>>()?;
    if v.len() != n {
        return Err(format!("expected {n} comma-separated numbers, got {s:?}"));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(format!("non-finite value in {s:?}"));
    }
    Ok(v)
}

/// Numerical settings shared by every subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Pass threshold for oracle comparisons and verification checks.
    pub tol: Option<f64>,
    pub quad_order: usize,
    pub quad_tol: f64,
    /// Finite-difference step for the derivative checks of `verify`.
    pub h: Option<f64>,
}

impl Tolerances {
    pub fn validate(&self) -> CliResult<()> {
        self.quad().validate()?;
        if let Some(t) = self.tol {
            if !(t > 0.0) {
                return Err(CliError::Usage(format!("--tol must be positive, got {t}")));
            }
        }
        if let Some(h) = self.h {
            if !(h > 0.0 && h < 0.1) {
                return Err(CliError::Usage(format!("--h must lie in (0, 0.1), got {h}")));
            }
        }
        Ok(())
    }

    pub fn limit(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    pub fn quad(&self) -> QuadratureCfg<f64> {
        QuadratureCfg::gauss(self.quad_order).with_rel_tol(self.quad_tol)
    }

    pub fn integration(&self) -> IntegrationCfg<f64> {
        IntegrationCfg { quad: self.quad(), ..IntegrationCfg::default() }
    }

    pub fn transplant(&self) -> TransplantConfig<f64> {
        TransplantConfig::default().with_quad(self.quad())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Output {
    pub path: Option<PathBuf>,
    pub format: Format,
}

/// Everything that determines a run's output, echoed into JSON files.
#[derive(Debug, Clone, Serialize)]
pub struct JobSpec {
    pub command: &'static str,
    pub context: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSize>,
    #[serde(rename = "box", skip_serializing_if = "Option::is_none")]
    pub bbox: Option<Box2>,
    pub output: Output,
    pub tolerances: Tolerances,
    /// Subcommand-specific parameters.
    pub params: serde_json::Value,
}

pub fn context(name: &str) -> CliResult<Builtin> {
    name.parse::<Builtin>().map_err(|_| {
        let known: Vec<&str> = Builtin::ALL.iter().map(|b| b.name()).collect();
        CliError::Usage(format!("unknown context {name:?}; expected one of {}", known.join(", ")))
    })
}

/// Default plotting box: `[0.5, 3]²` in the quadrant, `[−1, 1]²` otherwise.
pub fn default_box(ctx: Builtin) -> Box2 {
    match ctx {
        Builtin::Unit | Builtin::HyperbolicUnit => Box2 { x_min: -1.0, x_max: 1.0, y_min: -1.0, y_max: 1.0 },
        _ => Box2 { x_min: 0.5, x_max: 3.0, y_min: 0.5, y_max: 3.0 },
    }
}

/// Row-major grid (x fastest) after checking that it lies in `domain`.
pub fn grid_in(domain: &Domain<f64>, size: GridSize, b: Box2) -> CliResult<Vec<Point<f64>>> {
    let points = b.bounding_box().grid(size.nx, size.ny);
    if let Some(p) = points.iter().find(|p| !domain.contains(**p)) {
        return Err(CliError::Usage(format!(
            "box {},{},{},{} leaves the {} domain at ({}, {})",
            b.x_min, b.x_max, b.y_min, b.y_max, domain.label, p.x, p.y
        )));
    }
    Ok(points)
}

pub fn point_in(domain: &Domain<f64>, p: XY, what: &str) -> CliResult<Point<f64>> {
    let q = p.point();
    if !domain.contains(q) {
        return Err(CliError::Usage(format!("{what} ({}, {}) is outside the {} domain", p.x, p.y, domain.label)));
    }
    Ok(q)
}
