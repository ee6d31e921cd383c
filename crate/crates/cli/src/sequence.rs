use clap::Args;
use pseudoanalytic::bers::{
    equivalence_defect, formal_power, successor_from_powers, GeneratingPair, GeneratingSequence,
};
use pseudoanalytic::contexts::Builtin;
use pseudoanalytic::transplant::sequence_via_transplant;
use pseudoanalytic::{Binumber, Error, Point};
use rayon::prelude::*;
use serde_json::json;

use crate::error::{CliError, CliResult};
use crate::job::{self, Box2, Format, GridSize, JobSpec, Output, Tolerances, XY};
use crate::output::{Cell, Table};

/// Samples the generating pairs `(F_m, G_m)`, `m = 0..=M`, and checks that
/// each is a successor of the previous one.
#[derive(Debug, Args)]
pub struct Opts {
    #[arg(long)]
    ctx: String,
    /// Index of the last pair.
    #[arg(short = 'm', long = "count", default_value_t = 2)]
    m: usize,
    /// Center of the formal powers whose derivatives give the successors.
    #[arg(long, allow_hyphen_values = true)]
    center: Option<XY>,
    /// Companion used to build the sequence; defaults to the builtin companion.
    #[arg(long)]
    via_transplant: Option<String>,
    #[arg(long, default_value = "8x8")]
    grid: GridSize,
    #[arg(long = "box", allow_hyphen_values = true)]
    bbox: Option<Box2>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

/// Successor and equivalence residuals difference finite-difference fields
/// twice, so they get a looser default than the closed-form comparisons.
const RESIDUAL_TOL: f64 = 1e-4;
const CLOSED_FORM_TOL: f64 = 1e-6;
const PROBES: usize = 3;

struct Residual {
    name: String,
    value: f64,
    /// Upper bound; `None` means the value must be positive.
    limit: Option<f64>,
}

impl Residual {
    fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Residual { name: name.into(), value, limit: Some(limit) }
    }

    fn passed(&self) -> bool {
        match self.limit {
            Some(l) => self.value <= l,
            None => self.value > 0.0,
        }
    }
}

pub fn run(opts: Opts, tol: Tolerances) -> CliResult<()> {
    let ctx = job::context(&opts.ctx)?;
    let bbox = opts.bbox.unwrap_or_else(|| job::default_box(ctx));
    let domain = ctx.domain::<f64>();
    let points = job::grid_in(&domain, opts.grid, bbox)?;
    let center = opts.center.unwrap_or(match ctx {
        Builtin::Unit | Builtin::HyperbolicUnit => XY { x: 0.0, y: 0.0 },
        _ => XY { x: 1.0, y: 2.0 },
    });
    let z0 = job::point_in(&domain, center, "center")?;
    let source = match &opts.via_transplant {
        Some(name) => Some(job::context(name)?),
        None if ctx.known_sequence::<f64>().is_none() => ctx.companion(),
        None => None,
    };
    let probes = bbox.bounding_box().grid(PROBES, PROBES);

    let (pairs, failure) = build(ctx, source, z0, opts.m, &tol)?;
    let mut residuals = Vec::new();
    for (m, pair) in pairs.iter().enumerate() {
        let im = probes.iter().map(|p| im_fbar_g(pair, *p)).fold(f64::INFINITY, f64::min);
        residuals.push(Residual { name: format!("min Im(conj(F_{m}) G_{m})"), value: im, limit: None });
    }
    for m in 1..pairs.len() {
        let r = successor_residual(&pairs[m - 1], &pairs[m], &probes);
        residuals.push(Residual::at_most(format!("successor residual {}->{m}", m - 1), r, tol.limit(RESIDUAL_TOL)));
    }
    if source.is_none() {
        residuals.extend(recomputed_successors(ctx, z0, &pairs, &probes, &tol)?);
    }
    if ctx == Builtin::G1xy3 && source == Some(Builtin::FY2) {
        residuals.extend(closed_forms(&pairs, z0, &probes, &tol));
    }

    let mut table = Table::new(vec!["m", "x", "y", "F_re", "F_im", "G_re", "G_im", "status"]);
    for (m, pair) in pairs.iter().enumerate() {
        let values: Vec<(Binumber<f64>, Binumber<f64>)> =
            points.par_iter().map(|p| (pair.f.value(*p), pair.g.value(*p))).collect();
        for (p, (f, g)) in points.iter().zip(values) {
            table.push(vec![
                Cell::Int(m as i64),
                Cell::from(p.x),
                Cell::from(p.y),
                Cell::from(f.re),
                Cell::from(f.im),
                Cell::from(g.re),
                Cell::from(g.im),
                Cell::Text("ok".into()),
            ]);
        }
    }
    if let Some((m, e)) = &failure {
        let mut row = vec![Cell::Int(*m as i64)];
        row.extend(std::iter::repeat_n(Cell::Null, 6));
        row.push(Cell::Text(e.to_string()));
        table.push(row);
    }

    let spec = JobSpec {
        command: "sequence",
        context: ctx.name().into(),
        grid: Some(opts.grid),
        bbox: Some(bbox),
        output: Output { path: opts.out, format: opts.format },
        tolerances: tol,
        params: json!({
            "m": opts.m,
            "center": center,
            "via_transplant": source.map(|s| s.name()),
        }),
    };
    table.emit(&spec)?;

    let mut failed = Vec::new();
    for r in &residuals {
        let ok = r.passed();
        let bound = r.limit.map_or_else(|| "must be positive".to_string(), |l| format!("limit {l:e}"));
        eprintln!("{} {}: {:e} ({bound})", if ok { "ok  " } else { "FAIL" }, r.name, r.value);
        if !ok {
            failed.push(r.name.clone());
        }
    }
    if let Some((m, e)) = failure {
        return Err(CliError::Verification(format!("pair {m} could not be built: {e}")));
    }
    if !failed.is_empty() {
        return Err(CliError::Verification(failed.join(", ")));
    }
    Ok(())
}

/// Pairs `0..=m`, stopping at the first one that is not a generating pair.
fn build(
    ctx: Builtin,
    source: Option<Builtin>,
    z0: Point<f64>,
    m: usize,
    tol: &Tolerances,
) -> CliResult<(Vec<GeneratingPair<f64>>, Option<(usize, Error)>)> {
    let Some(src) = source.filter(|s| *s != ctx) else {
        let seq = ctx.known_sequence::<f64>().ok_or_else(|| {
            CliError::Usage(format!("context {ctx} has no known generating sequence; pass --via-transplant"))
        })?;
        let pairs = (0..=m as i64).map(|k| seq.pair(k).cloned()).collect::<Result<Vec<_>, _>>()?;
        return Ok((pairs, None));
    };
    let f_seq = src
        .known_sequence::<f64>()
        .ok_or_else(|| CliError::Usage(format!("companion {src} has no known generating sequence")))?;
    let (f_ctx, g_ctx) = (src.context()?, ctx.context()?);
    let attempt =
        |count| sequence_via_transplant(&f_ctx, &g_ctx, &f_seq, z0, count, &tol.transplant(), &tol.integration());
    match attempt(m) {
        Ok(seq) => Ok((seq.pairs, None)),
        Err(e @ (Error::NotGeneratingPair { .. } | Error::DegeneratePair { .. })) => {
            // Locate the first pair that fails; every earlier count succeeds.
            let mut good = attempt(0)?.pairs;
            for count in 1..m {
                match attempt(count) {
                    Ok(seq) => good = seq.pairs,
                    Err(_) => break,
                }
            }
            let at = good.len();
            Ok((good, Some((at, e))))
        }
        Err(e) => Err(e.into()),
    }
}

fn im_fbar_g(pair: &GeneratingPair<f64>, p: Point<f64>) -> f64 {
    (pair.f.value(p).conj() * pair.g.value(p)).im
}

/// `(F', G')` is a successor of `(F, G)` iff `a' = a` and `b' = −B`.
fn successor_residual(prev: &GeneratingPair<f64>, next: &GeneratingPair<f64>, probes: &[Point<f64>]) -> f64 {
    probes
        .par_iter()
        .map(|p| match (prev.char_coeffs(*p), next.char_coeffs(*p)) {
            (Ok(c), Ok(n)) => {
                let scale = 1.0 + c.a.norm() + c.big_b.norm();
                ((n.a - c.a).norm() + (n.b + c.big_b).norm()) / scale
            }
            _ => f64::NAN,
        })
        .reduce(|| 0.0, |a, b| if a.is_nan() || b.is_nan() { f64::NAN } else { a.max(b) })
}

/// For a known sequence, successors rebuilt from `Z_m^(1)` must be real
/// multiples of the stored pairs.
fn recomputed_successors(
    ctx: Builtin,
    z0: Point<f64>,
    pairs: &[GeneratingPair<f64>],
    probes: &[Point<f64>],
    tol: &Tolerances,
) -> CliResult<Vec<Residual>> {
    let seq = GeneratingSequence::periodic(ctx.known_sequence::<f64>().map(|s| s.pairs).unwrap_or_default());
    let sig = ctx.sig();
    let mut out = Vec::new();
    for m in 1..pairs.len() {
        let k = m as i64 - 1;
        let one = formal_power(&seq, 1, Binumber::one(sig), z0, k, &tol.integration())?;
        let unit = formal_power(&seq, 1, Binumber::unit(sig), z0, k, &tol.integration())?;
        let rebuilt = successor_from_powers(&pairs[m - 1], &one, &unit)?;
        out.push(Residual::at_most(
            format!("pair {m} against the successor rebuilt from Z_{k}^(1)"),
            equivalence_defect(&pairs[m], &rebuilt, probes),
            tol.limit(RESIDUAL_TOL),
        ));
    }
    Ok(out)
}

/// `F_1, G_1` in closed form; `F_2 (y0/y)²` and `G_2 y²/(u y0²)` real and constant.
fn closed_forms(
    pairs: &[GeneratingPair<f64>],
    z0: Point<f64>,
    probes: &[Point<f64>],
    tol: &Tolerances,
) -> Vec<Residual> {
    use pseudoanalytic::oracles;
    let limit = tol.limit(CLOSED_FORM_TOL);
    let mut out = Vec::new();
    if let Some(p1) = pairs.get(1) {
        let rel = |got: Binumber<f64>, exact: Binumber<f64>| (got - exact).norm() / exact.norm();
        let (mut ef, mut eg) = (0.0f64, 0.0f64);
        for &p in probes {
            ef = ef.max(rel(p1.f.value(p), oracles::f1(z0, p)));
            eg = eg.max(rel(p1.g.value(p), oracles::g1(z0, p)));
        }
        out.push(Residual::at_most("F_1 against its closed form", ef, limit));
        out.push(Residual::at_most("G_1 against its closed form", eg, limit));
    }
    if let Some(p2) = pairs.get(2) {
        let samples: Vec<(Binumber<f64>, Binumber<f64>)> = probes
            .par_iter()
            .map(|&p| {
                let r = (p.y / z0.y).powi(2);
                (p2.f.value(p).scale(1.0 / r), p2.g.value(p).scale(r))
            })
            .collect();
        let spread = |v: &[f64]| {
            let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            hi - lo
        };
        let f_re: Vec<f64> = samples.iter().map(|s| s.0.re).collect();
        let g_im: Vec<f64> = samples.iter().map(|s| s.1.im).collect();
        let f_im = samples.iter().map(|s| s.0.im.abs()).fold(0.0, f64::max);
        let g_re = samples.iter().map(|s| s.1.re.abs()).fold(0.0, f64::max);
        out.push(Residual::at_most("Im F_2 (y0/y)^2", f_im, limit));
        out.push(Residual::at_most("spread of F_2 (y0/y)^2", spread(&f_re), limit));
        out.push(Residual::at_most("Re G_2 (y/y0)^2", g_re, limit));
        out.push(Residual::at_most("spread of G_2 (y/y0)^2", spread(&g_im), limit));
    }
    out
}
