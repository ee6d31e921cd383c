use clap::Args;
use pseudoanalytic::bers::{formal_power, FormalPower};
use pseudoanalytic::contexts::Builtin;
use pseudoanalytic::oracles::{self, Unit};
use pseudoanalytic::transplant::transplant_formal_power;
use pseudoanalytic::{Binumber, Point, Signature};
use rayon::prelude::*;
use serde_json::json;

use crate::error::{CliError, CliResult};
use crate::job::{self, Box2, Coeff, Format, GridSize, JobSpec, Output, Tolerances, XY};
use crate::output::{Cell, Table};

/// Evaluates a formal power `Z^(n)(a, z0; ·)` on a grid.
#[derive(Debug, Args)]
pub struct Opts {
    /// Builtin context.
    #[arg(long)]
    ctx: String,
    /// Order of the power.
    #[arg(short = 'n', long = "order")]
    n: u32,
    /// Coefficient: 1, i, or re,im.
    #[arg(short = 'a', long = "coeff", default_value = "1", allow_hyphen_values = true)]
    a: Coeff,
    /// Center z0 as x,y.
    #[arg(long, allow_hyphen_values = true)]
    center: XY,
    #[arg(long, default_value = "50x50")]
    grid: GridSize,
    /// x_min,x_max,y_min,y_max; defaults to a box suited to the context.
    #[arg(long = "box", allow_hyphen_values = true)]
    bbox: Option<Box2>,
    /// Build the power for this context and transplant it. Contexts without a
    /// known generating sequence use their companion by default.
    #[arg(long)]
    via_transplant: Option<String>,
    /// Compare against the closed form and report the max relative error.
    #[arg(long)]
    oracle: bool,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

const ORACLE_TOL: f64 = 1e-6;

pub fn run(opts: Opts, tol: Tolerances) -> CliResult<()> {
    let ctx = job::context(&opts.ctx)?;
    let source = match &opts.via_transplant {
        Some(name) => Some(job::context(name)?),
        None if ctx.known_sequence::<f64>().is_none() => ctx.companion(),
        None => None,
    };
    let bbox = opts.bbox.unwrap_or_else(|| job::default_box(ctx));
    let domain = ctx.domain::<f64>();
    let points = job::grid_in(&domain, opts.grid, bbox)?;
    let z0 = job::point_in(&domain, opts.center, "center")?;

    let power = build(ctx, source, opts.n, opts.a.value(ctx.sig()), z0, &tol)?;
    let values = power.eval_grid(&points);

    let oracle = if opts.oracle {
        let exact = closed_form(ctx, opts.n, opts.a, z0)
            .ok_or_else(|| CliError::Usage(format!("no closed form for order {} in context {}", opts.n, ctx)))?;
        Some(points.par_iter().map(|p| exact(*p)).collect::<Vec<_>>())
    } else {
        None
    };

    let mut columns = vec!["x", "y", "re", "im"];
    if oracle.is_some() {
        columns.extend(["exact_re", "exact_im", "rel_err"]);
    }
    let mut table = Table::new(columns);
    let mut worst: Option<f64> = Some(0.0);
    for (i, (p, v)) in points.iter().zip(values.iter()).enumerate() {
        let mut row = vec![Cell::from(p.x), Cell::from(p.y), Cell::from(v.re), Cell::from(v.im)];
        if let Some(exact) = &oracle {
            let e = exact[i];
            let err = relative_error(*v, e);
            worst = match (worst, err.is_nan()) {
                (Some(w), false) => Some(w.max(err)),
                _ => None,
            };
            row.extend([Cell::from(e.re), Cell::from(e.im), Cell::from(err)]);
        }
        table.push(row);
    }

    let spec = JobSpec {
        command: "formal-power",
        context: ctx.name().into(),
        grid: Some(opts.grid),
        bbox: Some(bbox),
        output: Output { path: opts.out, format: opts.format },
        tolerances: tol,
        params: json!({
            "n": opts.n,
            "a": opts.a,
            "center": opts.center,
            "via_transplant": source.map(|s| s.name()),
            "oracle": opts.oracle,
        }),
    };
    table.emit(&spec)?;

    let bad = values.iter().filter(|v| !v.is_finite()).count();
    if bad > 0 {
        return Err(CliError::Numerical(pseudoanalytic::Error::Quadrature(format!(
            "{bad} of {} grid values are not finite",
            values.len()
        ))));
    }
    if oracle.is_some() {
        let limit = tol.limit(ORACLE_TOL);
        match worst {
            Some(w) => {
                eprintln!("max rel err: {w:e}");
                if w > limit {
                    return Err(CliError::Verification(format!("max rel err {w:e} exceeds {limit:e}")));
                }
            }
            None => return Err(CliError::Verification("closed form comparison produced NaN".into())),
        }
    }
    Ok(())
}

fn build(
    ctx: Builtin,
    source: Option<Builtin>,
    n: u32,
    a: Binumber<f64>,
    z0: Point<f64>,
    tol: &Tolerances,
) -> CliResult<FormalPower<f64>> {
    let from = source.unwrap_or(ctx);
    let seq = from.known_sequence::<f64>().ok_or_else(|| {
        CliError::Usage(format!("context {from} has no known generating sequence; pass --via-transplant"))
    })?;
    if from.sig() != ctx.sig() {
        return Err(CliError::Usage(format!("{from} and {ctx} have different signatures")));
    }
    let zf = formal_power(&seq, n, a, z0, 0, &tol.integration())?;
    match source {
        Some(s) if s != ctx => {
            let (f_ctx, g_ctx) = (s.context()?, ctx.context()?);
            Ok(transplant_formal_power(&f_ctx, &g_ctx, &zf, &tol.transplant())?)
        }
        _ => Ok(zf),
    }
}

type Exact = Box<dyn Fn(Point<f64>) -> Binumber<f64> + Sync>;

/// Closed forms are linear in the real and imaginary parts of `a`.
fn closed_form(ctx: Builtin, n: u32, a: Coeff, z0: Point<f64>) -> Option<Exact> {
    let combine = move |f: fn(u32, Unit, Point<f64>, Point<f64>) -> Option<Binumber<f64>>| -> Option<Exact> {
        f(n, Unit::One, z0, z0)?;
        Some(Box::new(move |p| {
            let one = f(n, Unit::One, z0, p).unwrap();
            let unit = f(n, Unit::I, z0, p).unwrap();
            one.scale(a.re) + unit.scale(a.im)
        }))
    };
    match ctx {
        Builtin::FY2 => combine(oracles::z_f),
        Builtin::G1xy3 => combine(oracles::z_g),
        Builtin::Unit | Builtin::HyperbolicUnit => {
            let sig: Signature = ctx.sig();
            let c = a.value(sig);
            Some(Box::new(move |p| {
                let d = p.to_binumber(sig) - z0.to_binumber(sig);
                c * d.powi(n as i32).unwrap_or(Binumber::zero(sig))
            }))
        }
        Builtin::GXy => None,
    }
}

/// `|got − exact| / |exact|`, falling back to the absolute error where the
/// exact value vanishes.
fn relative_error(got: Binumber<f64>, exact: Binumber<f64>) -> f64 {
    let d = (got - exact).norm();
    let e = exact.norm();
    if e > 0.0 {
        d / e
    } else {
        d
    }
}
