//! Named invariants over the builtin contexts, each with a measured value and
//! a limit. `--perturb NAME` injects a fault into one invariant's inputs so
//! the report can be checked to flag it.

use std::io::Write;
use std::sync::Arc;

use clap::{Args, ValueEnum};
use pseudoanalytic::antigradient::{antigradient_field, AntigradientCfg};
use pseudoanalytic::bers::{descend, formal_power, FormalPower, GeneratingPair};
use pseudoanalytic::contexts::{hyperbolic, Builtin};
use pseudoanalytic::fields::{make_context, BoundingBox, Potential, SchrodingerContext};
use pseudoanalytic::oracles::{self, Unit};
use pseudoanalytic::quadrature::QuadratureCfg;
use pseudoanalytic::transplant::{cauchy_kernel, transplant, transplant_formal_power, TransplantConfig};
use pseudoanalytic::vekua::{
    apply_b, conjugate_imag, conjugate_real, factorization_residual, vekua_residual, BDirection, MainVekua,
};
use pseudoanalytic::{BiField, Binumber, Domain, Jet, Point, Result, Signature};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::error::{CliError, CliResult};
use crate::job::{self, Format, JobSpec, Output, Tolerances};
use crate::output::{Cell, Table};

/// Runs the invariant suite and reports one row per invariant.
#[derive(Debug, Args)]
pub struct Opts {
    /// Only invariants involving this builtin context.
    #[arg(long)]
    ctx: Option<String>,
    /// Inject a fault into the named invariant (negative control).
    #[arg(long, value_name = "NAME")]
    perturb: Option<String>,
    /// Print the invariant names and exit.
    #[arg(long)]
    list: bool,
    /// Seed for the random test functions.
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, value_enum, default_value = "text")]
    format: ReportFormat,
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Text,
    Csv,
    Json,
}

/// Size of the injected fault.
const PERTURBATION: f64 = 1e-3;

pub struct Env {
    /// `PERTURBATION` for the perturbed invariant, 0 otherwise.
    eps: f64,
    h: Option<f64>,
    quad: QuadratureCfg<f64>,
    seed: u64,
}

type Check = Box<dyn Fn(&Env) -> Result<f64> + Send + Sync>;

pub struct Invariant {
    pub name: String,
    pub contexts: Vec<Builtin>,
    pub limit: f64,
    check: Check,
}

fn inv(
    name: impl Into<String>,
    contexts: &[Builtin],
    limit: f64,
    check: impl Fn(&Env) -> Result<f64> + Send + Sync + 'static,
) -> Invariant {
    Invariant { name: name.into(), contexts: contexts.to_vec(), limit, check: Box::new(check) }
}

struct Outcome {
    value: Option<f64>,
    passed: bool,
    error: Option<String>,
}

pub fn run(opts: Opts, tol: Tolerances) -> CliResult<()> {
    let all = registry();
    if opts.list {
        for i in &all {
            println!("{}", i.name);
        }
        return Ok(());
    }
    let only = opts.ctx.as_deref().map(job::context).transpose()?;
    let selected: Vec<&Invariant> = all.iter().filter(|i| only.is_none_or(|c| i.contexts.contains(&c))).collect();
    if let Some(name) = &opts.perturb {
        if !selected.iter().any(|i| &i.name == name) {
            return Err(CliError::Usage(format!("no selected invariant named {name:?}; see --list")));
        }
    }

    let outcomes: Vec<Outcome> = selected
        .par_iter()
        .map(|i| {
            let env = Env {
                eps: if opts.perturb.as_deref() == Some(i.name.as_str()) { PERTURBATION } else { 0.0 },
                h: tol.h,
                quad: tol.quad(),
                seed: opts.seed,
            };
            let limit = tol.limit(i.limit);
            match std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| (i.check)(&env))) {
                Ok(Ok(v)) => Outcome { value: Some(v), passed: v <= limit, error: None },
                Ok(Err(e)) => Outcome { value: None, passed: false, error: Some(e.to_string()) },
                Err(_) => Outcome { value: None, passed: false, error: Some("check panicked".into()) },
            }
        })
        .collect();

    let mut table = Table::new(vec!["name", "value", "limit", "passed", "error"]);
    for (i, o) in selected.iter().zip(&outcomes) {
        table.push(vec![
            Cell::Text(i.name.clone()),
            Cell::from(o.value),
            Cell::from(tol.limit(i.limit)),
            Cell::Bool(o.passed),
            o.error.clone().map_or(Cell::Null, Cell::Text),
        ]);
    }
    let failed: Vec<&str> =
        selected.iter().zip(&outcomes).filter(|(_, o)| !o.passed).map(|(i, _)| i.name.as_str()).collect();

    match opts.format {
        ReportFormat::Text => {
            let mut text = Vec::new();
            for (i, o) in selected.iter().zip(&outcomes) {
                let shown = match (&o.value, &o.error) {
                    (Some(v), _) => format!("{v:.3e}"),
                    (None, Some(e)) => format!("error: {e}"),
                    (None, None) => "-".into(),
                };
                writeln!(
                    text,
                    "{} {:<48} {shown} (limit {:.1e})",
                    if o.passed { "PASS" } else { "FAIL" },
                    i.name,
                    tol.limit(i.limit)
                )?;
            }
            writeln!(text, "{} of {} invariants passed", selected.len() - failed.len(), selected.len())?;
            match &opts.out {
                Some(p) => std::fs::write(p, text)?,
                None => std::io::stdout().write_all(&text)?,
            }
        }
        ReportFormat::Csv | ReportFormat::Json => {
            let spec = JobSpec {
                command: "verify",
                context: only.map_or("all".into(), |c| c.name().to_string()),
                grid: None,
                bbox: None,
                output: Output {
                    path: opts.out.clone(),
                    format: if opts.format == ReportFormat::Csv { Format::Csv } else { Format::Json },
                },
                tolerances: tol,
                params: json!({ "seed": opts.seed, "perturb": opts.perturb }),
            };
            table.emit(&spec)?;
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(failed.join(", ")))
    }
}

const ELLIPTIC: [Builtin; 4] = [Builtin::FY2, Builtin::G1xy3, Builtin::GXy, Builtin::Unit];
const HYPERBOLIC: [Builtin; 1] = [Builtin::HyperbolicUnit];

fn contexts_of(sig: Signature) -> &'static [Builtin] {
    match sig {
        Signature::Elliptic => &ELLIPTIC,
        Signature::Hyperbolic => &HYPERBOLIC,
    }
}

fn sig_name(sig: Signature) -> &'static str {
    match sig {
        Signature::Elliptic => "elliptic",
        Signature::Hyperbolic => "hyperbolic",
    }
}

pub fn registry() -> Vec<Invariant> {
    let mut out = Vec::new();
    for sig in [Signature::Elliptic, Signature::Hyperbolic] {
        generic(sig, &mut out);
    }
    for ctx in Builtin::ALL {
        per_context(ctx, &mut out);
    }
    transplants(&mut out);
    hyperbolic_suite(&mut out);
    out
}

fn generic(sig: Signature, out: &mut Vec<Invariant>) {
    let tag = contexts_of(sig);
    let s = sig_name(sig);
    out.push(inv(format!("algebra.{s}.conjugate_product"), tag, 1e-13, move |env| {
        let mut r = rng(env.seed);
        Ok((0..100)
            .map(|_| {
                let z = random_number(&mut r, sig);
                ((z.scale(1.0 + env.eps) * z.conj()).re - z.modulus_sq()).abs() / (1.0 + z.norm().powi(2))
            })
            .fold(0.0, worst))
    }));
    out.push(inv(format!("algebra.{s}.inverse"), tag, 1e-13, move |env| {
        let mut r = rng(env.seed);
        let mut acc = 0.0f64;
        for _ in 0..100 {
            let z = random_number(&mut r, sig);
            if (z.re.abs() - z.im.abs()).abs() < 0.1 {
                continue;
            }
            acc = worst(acc, (z.scale(1.0 + env.eps) * z.inverse()? - Binumber::one(sig)).norm());
        }
        Ok(acc)
    }));
    out.push(inv(format!("fields.{s}.wirtinger_fd"), tag, 1e-6, move |env| {
        let dom = Arc::new(Domain::rectangle(BoundingBox::new(-2.0, 2.0, -2.0, 2.0)));
        let z = BiField::identity(sig, dom.clone());
        let exact = z.mul(&z).mul(&z.conj()).add(&z.scale(3.0));
        let fd = bump(&exact, env.eps).to_finite_difference(env.h);
        max_over(&grid(4, (-0.9, 0.9)), |p| {
            let (a, b) = (exact.jet(p), fd.jet(p));
            Ok((a.dz - b.dz).norm().max((a.dzbar - b.dzbar).norm()))
        })
    }));
    out.push(inv(format!("antigradient.{s}.exactness"), tag, 1e-9, move |env| {
        let dom = Arc::new(Domain::rectangle(BoundingBox::new(-1.0, 1.0, -1.0, 1.0)));
        let phi = match sig {
            Signature::Elliptic => BiField::real_from_gradient(sig, dom.clone(), |p: Point<f64>| {
                let (e, s, c) = (p.x.exp(), p.y.sin(), p.y.cos());
                (e * s + p.x * p.y * p.y, e * s + p.y * p.y, e * c + 2.0 * p.x * p.y)
            }),
            Signature::Hyperbolic => BiField::real_from_gradient(sig, dom.clone(), |p: Point<f64>| {
                (p.x.cosh() * p.y + p.x * p.x * p.y, p.x.sinh() * p.y + 2.0 * p.x * p.y, p.x.cosh() + p.x * p.x)
            }),
        };
        let eps = env.eps;
        let big_phi = phi.map(move |j| Jet::constant(j.dzbar + Binumber::real(eps, sig))).to_finite_difference(env.h);
        let z0 = Point::new(0.2, -0.3);
        let a = antigradient_field(&big_phi, AntigradientCfg::new(z0).with_quad(env.quad))?;
        let base = phi.value(z0).re;
        max_over(&grid(4, (-0.9, 0.9)), |p| {
            let want = phi.value(p).re - base;
            Ok((a.value(p).re - want).abs() / (1.0 + want.abs()))
        })
    }));
}

fn per_context(ctx: Builtin, out: &mut Vec<Invariant>) {
    let name = ctx.name();
    let tag = [ctx];
    let sig = ctx.sig();

    out.push(inv(format!("{name}.potential"), &tag, 1e-6, move |env| {
        let c = ctx.context::<f64>()?;
        max_over(&samples(ctx), |p| {
            let exact = match ctx {
                Builtin::FY2 | Builtin::G1xy3 => 2.0 / (p.y * p.y),
                _ => 0.0,
            } + env.eps;
            Ok((c.q.value(p).re - exact).abs() / (1.0 + exact.abs()))
        })
    }));
    out.push(inv(format!("{name}.vekua_residual"), &tag, 1e-8, move |env| {
        let eq = MainVekua::new(ctx.context()?);
        let w = bump(&first_power(ctx, env)?.value, env.eps);
        max_over(&samples(ctx), |p| vekua_residual(&eq, &w, p))
    }));
    for (part, which) in [("real", Potential::Q), ("imag", Potential::Q1)] {
        out.push(inv(format!("{name}.schrodinger_{part}"), &tag, 1e-5, move |env| {
            let c = ctx.context()?;
            let w = bump(&first_power(ctx, env)?.value, env.eps);
            let phi = match which {
                Potential::Q => w.real_part(),
                Potential::Q1 => w.imag_part(),
            };
            let phi = match env.h {
                Some(h) => phi.to_finite_difference(Some(h)),
                None => phi,
            };
            max_over(&samples(ctx), |p| c.relative_residual(&phi, which, p))
        }));
    }
    out.push(inv(format!("{name}.factorization"), &tag, 1e-7, move |env| {
        let c = shifted_potential(ctx.context()?, env.eps);
        let mut r = rng(env.seed);
        let pts = samples(ctx);
        let mut acc = 0.0f64;
        for p in pts.iter().take(10) {
            let phi = random_cubic(&mut r, sig, ctx.domain::<f64>());
            acc = worst(acc, factorization_residual(&c, &phi, *p)?);
        }
        Ok(acc)
    }));
    if sig == Signature::Elliptic {
        out.push(inv(format!("{name}.vb_equals_pi"), &tag, 1e-7, move |env| {
            let f = ctx.generator::<f64>();
            let fp = f.scale(1.0 + env.eps);
            let mut r = rng(env.seed);
            let mut acc = 0.0f64;
            for p in samples(ctx).iter().take(10) {
                let omega = random_polynomial(&mut r, Arc::new(ctx.domain()));
                acc = worst(acc, relation_defect(&f, &fp, &omega, *p)?);
            }
            Ok(acc)
        }));
    }
    out.push(inv(format!("{name}.conjugate_round_trip"), &tag, 1e-7, move |env| {
        let c = ctx.context()?;
        let z0 = center(ctx);
        let w1 = first_power(ctx, env)?.value.real_part();
        let target = bump(&w1, env.eps).real_part();
        let w2 = conjugate_imag(&c, &w1, z0)?;
        let back = conjugate_real(&c, &w2, z0)?;
        let pts = samples(ctx);
        let p0 = pts[0];
        let k = (back.value(p0).re - w1.value(p0).re) / c.f.value(p0).re;
        max_over(&pts, |p| Ok((back.value(p).re - target.value(p).re - k * c.f.value(p).re).abs()))
    }));
    out.push(inv(format!("{name}.adjoint_involution"), &tag, 1e-10, move |env| {
        let pair = GeneratingPair::from_generator(&ctx.generator());
        let twice = pair.adjoint()?.adjoint()?;
        let g = bump(&pair.g, env.eps);
        max_over(&samples(ctx), |p| {
            Ok((twice.f.value(p) - pair.f.value(p)).norm().max((twice.g.value(p) - g.value(p)).norm()))
        })
    }));
    if let Some(seq) = ctx.known_sequence::<f64>() {
        out.push(inv(format!("{name}.descend"), &tag, 1e-6, move |env| {
            let z0 = center(ctx);
            let one = Binumber::one(sig);
            let z1 = formal_power(&seq, 1, one, z0, 0, &integration(env))?;
            let z1 = FormalPower::new(1, z1.center, z1.coeff, bump(&z1.value, env.eps), z1.pair_index);
            let d = descend(seq.pair(0)?, &z1)?;
            let z0th = formal_power(&seq, 0, one, z0, 1, &integration(env))?;
            max_over(&samples(ctx), |p| Ok((d.eval(p) - z0th.eval(p)).norm()))
        }));
    }
    out.push(inv(format!("{name}.order_of_zero"), &tag, 0.1, move |env| {
        let z = first_power(ctx, env)?;
        let w = bump(&z.value, env.eps);
        let radii = [1e-2, 1e-3, 1e-4];
        let mut acc = 0.0f64;
        for (dx, dy) in [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)] {
            let vals: Vec<f64> = radii.iter().map(|r| w.value(z.center.offset(r * dx, r * dy)).norm()).collect();
            acc = worst(acc, (loglog_slope(&radii, &vals) - 1.0).abs());
        }
        Ok(acc)
    }));
}

fn transplants(out: &mut Vec<Invariant>) {
    let pair = [Builtin::G1xy3, Builtin::FY2];
    let free = [Builtin::GXy, Builtin::Unit];
    out.push(inv("transplant.g_1xy3.closed_form", &pair, 1e-6, |env| {
        let z0 = center(Builtin::G1xy3);
        let shifted = z0.offset(env.eps, 0.0);
        let mut acc = 0.0f64;
        for (a, unit) in [(Binumber::elliptic(1.0, 0.0), Unit::One), (Binumber::elliptic(0.0, 1.0), Unit::I)] {
            let z = transplanted_power(Builtin::G1xy3, a, env)?;
            acc = worst(
                acc,
                max_over(&samples(Builtin::G1xy3), |p| {
                    let e = oracles::z_g(1, unit, shifted, p).unwrap();
                    Ok((z.eval(p) - e).norm() / e.norm())
                })?,
            );
        }
        Ok(acc)
    }));
    out.push(inv("transplant.g_1xy3.round_trip", &pair, 1e-7, |env| {
        let (f, g) = (Builtin::FY2.context()?, Builtin::G1xy3.context()?);
        let w = first_power(Builtin::FY2, env)?.value;
        let cfg = TransplantConfig::from_base(center(Builtin::FY2)).with_quad(env.quad);
        let back = transplant(&g, &f, &transplant(&f, &g, &w, &cfg)?, &cfg)?;
        let target = bump(&w, env.eps);
        max_over(&samples(Builtin::FY2), |p| Ok((back.value(p) - target.value(p)).norm()))
    }));
    out.push(inv("transplant.g_xy.kernel_closed_form", &free[..1], 1e-6, |env| {
        let k = xy_kernel(env)?;
        let z0 = KERNEL_CENTER.offset(env.eps, 0.0);
        max_over(&kernel_samples(), |p| {
            let e = oracles::z_minus1(z0, p);
            Ok((k.eval(p) - e).norm() / e.norm())
        })
    }));
    out.push(inv("transplant.g_xy.kernel_vekua", &free[..1], 1e-8, |env| {
        let eq = MainVekua::new(Builtin::GXy.context()?);
        let k = bump(&xy_kernel(env)?.value, env.eps);
        max_over(&kernel_samples(), |p| vekua_residual(&eq, &k, p))
    }));
    out.push(inv("transplant.g_xy.kernel_limit", &free[..1], 1e-3, |env| {
        let k = xy_kernel(env)?;
        let z0 = KERNEL_CENTER.offset(env.eps, 0.0);
        let r = 1e-4;
        let ring: Vec<Point<f64>> = (0..16)
            .map(|j| {
                let t = std::f64::consts::TAU * (j as f64 + 0.5) / 16.0;
                KERNEL_CENTER.offset(r * t.cos(), r * t.sin())
            })
            .collect();
        max_over(&ring, |p| {
            let h = ((p.to_binumber(Signature::Elliptic) - z0.to_binumber(Signature::Elliptic)) * k.eval(p)).norm();
            Ok((h - 1.0).abs())
        })
    }));
    out.push(inv("transplant.unit.kernel_is_pole", &free[1..], 1e-9, |env| {
        let sig = Signature::Elliptic;
        let z0 = Point::new(0.2, -0.3);
        let base = Point::new(-1.0, -1.0);
        let cfg = TransplantConfig::for_kernel(base, 0.05).with_quad(env.quad);
        let k = cauchy_kernel(&Builtin::Unit.context()?, Binumber::one(sig), z0, &cfg)?;
        let k = bump(&k.value, env.eps);
        let pole = |p: Point<f64>| Binumber::one(sig) / (p.to_binumber(sig) - z0.to_binumber(sig));
        max_over(&grid(4, (-0.9, 0.9)), |p| {
            let e = pole(p);
            Ok((k.value(p) - e).norm() / e.norm())
        })
    }));
}

fn hyperbolic_suite(out: &mut Vec<Invariant>) {
    let tag = [Builtin::HyperbolicUnit];
    let sig = Signature::Hyperbolic;
    let z0 = Point::new(0.2, -0.3);
    let xt = move || BiField::real_from_gradient(sig, hyperbolic::domain(), |p| (p.x * p.y, p.y, p.x));
    out.push(inv("hyperbolic.conjugate_closed_form", &tag, 1e-10, move |env| {
        let unit = make_context(hyperbolic::unit())?;
        let w2 = bump(&conjugate_imag(&unit, &xt(), z0)?, env.eps);
        let c0 = w2.value(z0).re - 0.5 * (z0.x * z0.x + z0.y * z0.y);
        max_over(&grid(4, (-0.9, 0.9)), |p| Ok((w2.value(p).re - 0.5 * (p.x * p.x + p.y * p.y) - c0).abs()))
    }));
    out.push(inv("hyperbolic.cauchy_riemann", &tag, 1e-10, move |env| {
        let unit = make_context(hyperbolic::unit())?;
        let w1 = xt();
        let w = bump(&BiField::compose(&w1, &conjugate_imag(&unit, &w1, z0)?), env.eps);
        let eq = MainVekua::new(unit);
        max_over(&grid(4, (-0.9, 0.9)), |p| vekua_residual(&eq, &w, p))
    }));
    out.push(inv("hyperbolic.transplant_round_trip", &tag, 1e-7, move |env| {
        let (fc, gc) = (make_context(hyperbolic::exp_x_plus_t())?, make_context(hyperbolic::two_plus_xt())?);
        let w1 = BiField::real_from_gradient(sig, hyperbolic::domain(), |p| {
            (p.x * p.x + p.y * p.y + 3.0 * p.x, 2.0 * p.x + 3.0, 2.0 * p.y)
        });
        let w = BiField::compose(&w1, &conjugate_imag(&fc, &w1, z0)?);
        let cfg = TransplantConfig::from_base(z0).with_quad(env.quad);
        let back = transplant(&gc, &fc, &transplant(&fc, &gc, &w, &cfg)?, &cfg)?;
        let target = bump(&w, env.eps);
        let off_cone: Vec<Point<f64>> = grid(7, (-0.9, 0.9))
            .into_iter()
            .filter(|p| ((p.x - z0.x).abs() - (p.y - z0.y).abs()).abs() > 0.05)
            .collect();
        max_over(&off_cone, |p| Ok((back.value(p) - target.value(p)).norm()))
    }));
    out.push(inv("hyperbolic.klein_gordon_factorization", &tag, 1e-5, move |env| {
        let c = shifted_potential(make_context(hyperbolic::cosh_x())?, env.eps);
        let mut r = rng(env.seed);
        let mut acc = 0.0f64;
        for p in grid(3, (-0.8, 0.8)) {
            let phi = random_cubic(&mut r, sig, (*hyperbolic::domain::<f64>()).clone());
            acc = worst(acc, factorization_residual(&c, &phi, p)?);
        }
        Ok(acc)
    }));
}

const KERNEL_CENTER: Point<f64> = Point { x: 1.0, y: 5.0 };

fn xy_kernel(env: &Env) -> Result<FormalPower<f64>> {
    let cfg = TransplantConfig::for_kernel(Point::new(0.0, 0.0), 0.05).with_quad(env.quad);
    cauchy_kernel(&Builtin::GXy.context()?, Binumber::elliptic(1.0, 0.0), KERNEL_CENTER, &cfg)
}

fn kernel_samples() -> Vec<Point<f64>> {
    BoundingBox::new(0.3, 3.8, 0.3, 7.8).grid(4, 4).into_iter().filter(|p| p.dist(KERNEL_CENTER) > 0.05).collect()
}

fn center(ctx: Builtin) -> Point<f64> {
    match ctx {
        Builtin::Unit | Builtin::HyperbolicUnit => Point::new(0.2, -0.3),
        _ => Point::new(1.0, 2.0),
    }
}

fn samples(ctx: Builtin) -> Vec<Point<f64>> {
    match ctx {
        Builtin::Unit | Builtin::HyperbolicUnit => grid(4, (-0.9, 0.9)),
        _ => grid(4, (0.6, 2.8)),
    }
}

fn grid(n: usize, range: (f64, f64)) -> Vec<Point<f64>> {
    BoundingBox::new(range.0, range.1, range.0, range.1).grid(n, n)
}

fn integration(env: &Env) -> pseudoanalytic::bers::IntegrationCfg<f64> {
    pseudoanalytic::bers::IntegrationCfg { quad: env.quad, ..Default::default() }
}

/// `Z^(1)(1, z0; ·)`, transplanted from the companion when the context has
/// no known generating sequence.
fn first_power(ctx: Builtin, env: &Env) -> Result<FormalPower<f64>> {
    match ctx.known_sequence::<f64>() {
        Some(seq) => formal_power(&seq, 1, Binumber::one(ctx.sig()), center(ctx), 0, &integration(env)),
        None => transplanted_power(ctx, Binumber::one(ctx.sig()), env),
    }
}

fn transplanted_power(ctx: Builtin, a: Binumber<f64>, env: &Env) -> Result<FormalPower<f64>> {
    let src = ctx.companion().expect("contexts without a known sequence have a companion");
    let seq = src.known_sequence::<f64>().expect("companions have known sequences");
    let zf = formal_power(&seq, 1, a, center(ctx), 0, &integration(env))?;
    let cfg = TransplantConfig::default().with_quad(env.quad);
    transplant_formal_power(&src.context()?, &ctx.context()?, &zf, &cfg)
}

/// Adds `eps·(1 + u)(1 + x²y)`, which solves none of the equations involved.
fn bump(w: &BiField<f64>, eps: f64) -> BiField<f64> {
    if eps == 0.0 {
        return w.clone();
    }
    let sig = w.sig();
    let b = BiField::real_from_gradient(sig, w.domain().clone(), move |p| {
        (eps * (1.0 + p.x * p.x * p.y), eps * 2.0 * p.x * p.y, eps * p.x * p.x)
    });
    w.add(&b.times(Binumber::new(1.0, 1.0, sig)))
}

/// The context with `q` replaced by `(1 + eps) q + eps`.
fn shifted_potential(c: SchrodingerContext<f64>, eps: f64) -> SchrodingerContext<f64> {
    if eps == 0.0 {
        return c;
    }
    let sig = c.sig();
    let q = c.q.scale(1.0 + eps).add(&BiField::constant(sig, c.domain().clone(), Binumber::real(eps, sig)));
    SchrodingerContext { q, ..c }
}

/// `|𝒱B[ω] − Π[ω]|` with `B` built from `f` and `Π` from `fp`.
fn relation_defect(f: &BiField<f64>, fp: &BiField<f64>, omega: &BiField<f64>, at: Point<f64>) -> Result<f64> {
    let b = apply_b(omega, f, BDirection::Forward);
    let jb = b.try_jet(at)?;
    let jf = f.jet(at);
    let v = jb.dzbar - jf.dzbar / jf.value * jb.value.conj();
    let jo = omega.try_jet(at)?;
    let plus = jo.real_part();
    let minus = (jo - jo.conj()).scale(0.5);
    let fv = fp.value(at);
    let pi = fv * plus.dzbar + minus.dzbar / fv;
    Ok((v - pi).norm())
}

fn max_over(points: &[Point<f64>], f: impl Fn(Point<f64>) -> Result<f64> + Sync) -> Result<f64> {
    let vals: Vec<f64> = points.par_iter().map(|p| f(*p)).collect::<Result<_>>()?;
    Ok(vals.into_iter().fold(0.0, worst))
}

/// `max` that keeps NaN.
fn worst(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

fn loglog_slope(radii: &[f64], values: &[f64]) -> f64 {
    let xs: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_number(r: &mut ChaCha8Rng, sig: Signature) -> Binumber<f64> {
    Binumber::new(r.gen_range(-3.0..3.0), r.gen_range(-3.0..3.0), sig)
}

/// Random real cubic in `x, y` with exact gradient.
fn random_cubic(r: &mut ChaCha8Rng, sig: Signature, domain: Domain<f64>) -> BiField<f64> {
    let k: [f64; 10] = std::array::from_fn(|_| r.gen_range(-1.0..1.0));
    BiField::real_from_gradient(sig, Arc::new(domain), move |p| {
        let (x, y) = (p.x, p.y);
        let v = k[0]
            + k[1] * x
            + k[2] * y
            + k[3] * x * x
            + k[4] * x * y
            + k[5] * y * y
            + k[6] * x.powi(3)
            + k[7] * x * x * y
            + k[8] * x * y * y
            + k[9] * y.powi(3);
        let vx = k[1] + 2.0 * k[3] * x + k[4] * y + 3.0 * k[6] * x * x + 2.0 * k[7] * x * y + k[8] * y * y;
        let vy = k[2] + k[4] * x + 2.0 * k[5] * y + k[7] * x * x + 2.0 * k[8] * x * y + 3.0 * k[9] * y * y;
        (v, vx, vy)
    })
}

/// Random `a z² + b z̄² + c z z̄ + d z̄` with exact jet.
fn random_polynomial(r: &mut ChaCha8Rng, domain: Arc<Domain<f64>>) -> BiField<f64> {
    let sig = Signature::Elliptic;
    let mut coeff = || Binumber::elliptic(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
    let (a, b, c, d) = (coeff(), coeff(), coeff(), coeff());
    let z = BiField::identity(sig, domain);
    let zb = z.conj();
    z.mul(&z).times(a).add(&zb.mul(&zb).times(b)).add(&z.mul(&zb).times(c)).add(&zb.times(d))
}
