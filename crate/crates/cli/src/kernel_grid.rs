use clap::Args;
use pseudoanalytic::contexts::Builtin;
use pseudoanalytic::oracles;
use pseudoanalytic::transplant::{cauchy_kernel, TransplantConfig};
use pseudoanalytic::{Binumber, Point, Signature};
use rayon::prelude::*;
use serde_json::json;

use crate::error::{CliError, CliResult};
use crate::job::{self, Box2, Coeff, Format, GridSize, JobSpec, Output, Tolerances, XY};
use crate::output::{Cell, Table};

/// Samples the Cauchy kernel `Z^(−1)(a, z0; ·)` and `H = |(z − z0) Z^(−1)| / |a|`.
#[derive(Debug, Args)]
pub struct Opts {
    /// Builtin context; its generator must solve the free equation.
    #[arg(long, default_value = "g_xy")]
    ctx: String,
    #[arg(short = 'a', long = "coeff", default_value = "1", allow_hyphen_values = true)]
    a: Coeff,
    #[arg(long, default_value = "1,5", allow_hyphen_values = true)]
    center: XY,
    #[arg(long, default_value = "100x100")]
    grid: GridSize,
    #[arg(long = "box", default_value = "0.1,4,0.1,8", allow_hyphen_values = true)]
    bbox: Box2,
    /// Start of every integration path.
    #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
    base: XY,
    /// Radius of the disc around z0 left empty in the output.
    #[arg(long, default_value_t = 0.05)]
    disc: f64,
    /// Add the closed form and the relative error against it.
    #[arg(long)]
    closed_form: bool,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

const CLOSED_FORM_TOL: f64 = 1e-6;

pub fn run(opts: Opts, tol: Tolerances) -> CliResult<()> {
    let ctx = job::context(&opts.ctx)?;
    if !(opts.disc > 0.0) {
        return Err(CliError::Usage(format!("--disc must be positive, got {}", opts.disc)));
    }
    let domain = ctx.domain::<f64>();
    let points = job::grid_in(&domain, opts.grid, opts.bbox)?;
    let z0 = job::point_in(&domain, opts.center, "center")?;
    let base = opts.base.point();
    if !domain.contains_closed(base) {
        return Err(CliError::Usage(format!("base ({}, {}) is outside the {} domain", base.x, base.y, domain.label)));
    }
    if base.dist(z0) <= opts.disc {
        return Err(CliError::Usage("base point lies inside the excluded disc".into()));
    }
    let sig = ctx.sig();
    if sig == Signature::Hyperbolic {
        return Err(CliError::Usage(format!("{ctx}: the kernel is singular on the whole null cone through z0")));
    }
    let a = opts.a.value(sig);
    if !(a.norm() > 0.0) {
        return Err(CliError::Usage("coefficient must be nonzero".into()));
    }

    let cfg = TransplantConfig::for_kernel(base, opts.disc).with_quad(tol.quad());
    let kernel = cauchy_kernel(&ctx.context()?, a, z0, &cfg)?;
    let exact = if opts.closed_form {
        Some(closed_form(ctx, opts.a, z0, base).ok_or_else(|| {
            CliError::Usage(format!(
                "no closed form for the kernel of {ctx} with a = {},{} and this base",
                opts.a.re, opts.a.im
            ))
        })?)
    } else {
        None
    };

    let rows: Vec<Row> = points
        .par_iter()
        .map(|&p| {
            if p.dist(z0) <= opts.disc {
                return Row::default();
            }
            let v = kernel.eval(p);
            let h = ((p.to_binumber(sig) - z0.to_binumber(sig)) * v).norm() / a.norm();
            let e = exact.as_ref().map(|f| f(p));
            Row { value: Some(v), h: Some(h), exact: e }
        })
        .collect();

    let mut columns = vec!["x", "y", "re", "im", "H"];
    if exact.is_some() {
        columns.extend(["exact_re", "exact_im", "rel_err"]);
    }
    let mut table = Table::new(columns);
    let mut worst = 0.0f64;
    let mut broken = 0usize;
    let (mut near_lo, mut near_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (p, r) in points.iter().zip(&rows) {
        let mut row = vec![
            Cell::from(p.x),
            Cell::from(p.y),
            Cell::from(r.value.map(|v| v.re)),
            Cell::from(r.value.map(|v| v.im)),
            Cell::from(r.h),
        ];
        if let Some(h) = r.h {
            if !h.is_finite() {
                broken += 1;
            } else if p.dist(z0) <= 2.0 * opts.disc {
                near_lo = near_lo.min(h);
                near_hi = near_hi.max(h);
            }
        }
        if exact.is_some() {
            let err = match (r.value, r.exact) {
                (Some(v), Some(e)) => Some((v - e).norm() / e.norm()),
                _ => None,
            };
            if let Some(e) = err {
                worst = if e.is_nan() { f64::NAN } else { worst.max(e) };
            }
            row.extend([Cell::from(r.exact.map(|e| e.re)), Cell::from(r.exact.map(|e| e.im)), Cell::from(err)]);
        }
        table.push(row);
    }

    let spec = JobSpec {
        command: "kernel-grid",
        context: ctx.name().into(),
        grid: Some(opts.grid),
        bbox: Some(opts.bbox),
        output: Output { path: opts.out, format: opts.format },
        tolerances: tol,
        params: json!({
            "a": opts.a,
            "center": opts.center,
            "base": opts.base,
            "disc": opts.disc,
            "closed_form": opts.closed_form,
        }),
    };
    table.emit(&spec)?;

    if near_lo <= near_hi {
        eprintln!("H for {} < |z - z0| <= {}: [{near_lo:.6}, {near_hi:.6}]", opts.disc, 2.0 * opts.disc);
    }
    if broken > 0 {
        return Err(CliError::Numerical(pseudoanalytic::Error::Quadrature(format!(
            "{broken} grid values are not finite"
        ))));
    }
    if exact.is_some() {
        let limit = tol.limit(CLOSED_FORM_TOL);
        eprintln!("max rel err against the closed form: {worst:e}");
        if !(worst <= limit) {
            return Err(CliError::Verification(format!("max rel err {worst:e} exceeds {limit:e}")));
        }
    }
    Ok(())
}

#[derive(Default)]
struct Row {
    value: Option<Binumber<f64>>,
    h: Option<f64>,
    exact: Option<Binumber<f64>>,
}

type Exact = Box<dyn Fn(Point<f64>) -> Binumber<f64> + Sync>;

/// `g = xy` has a closed form for `a = 1` with paths from the origin; the
/// elliptic unit generator gives `a/(z − z0)`.
fn closed_form(ctx: Builtin, a: Coeff, z0: Point<f64>, base: Point<f64>) -> Option<Exact> {
    match ctx {
        Builtin::GXy if a.re == 1.0 && a.im == 0.0 && base == Point::new(0.0, 0.0) => {
            Some(Box::new(move |p| oracles::z_minus1(z0, p)))
        }
        Builtin::Unit => {
            let sig = ctx.sig();
            let c = a.value(sig);
            Some(Box::new(move |p| c / (p.to_binumber(sig) - z0.to_binumber(sig))))
        }
        _ => None,
    }
}
