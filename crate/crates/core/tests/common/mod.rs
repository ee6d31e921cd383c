#![allow(dead_code)]

use std::sync::Arc;

use pseudoanalytic::fields::BoundingBox;
use pseudoanalytic::{BiField, Binumber, Domain, Jet, Point, Signature};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type C = Binumber<f64>;

pub fn c(re: f64, im: f64) -> C {
    Binumber::elliptic(re, im)
}

pub fn grid(nx: usize, ny: usize, x: (f64, f64), y: (f64, f64)) -> Vec<Point<f64>> {
    BoundingBox::new(x.0, x.1, y.0, y.1).grid(nx, ny)
}

/// The 50×50 grid over `[0.5, 3]²`.
pub fn oracle_grid() -> Vec<Point<f64>> {
    grid(50, 50, (0.5, 3.0), (0.5, 3.0))
}

pub fn rel_err(got: C, exact: C) -> f64 {
    (got - exact).norm() / exact.norm()
}

pub fn max_rel_err(got: &[C], exact: &[C]) -> f64 {
    got.iter().zip(exact).map(|(g, e)| rel_err(*g, *e)).fold(0.0, worst)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random real cubic in `x, y` with exact gradient.
pub fn random_cubic(rng: &mut ChaCha8Rng, sig: Signature, domain: Arc<Domain<f64>>) -> BiField<f64> {
    let k: [f64; 10] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
    BiField::real_from_gradient(sig, domain, move |p| {
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

/// Random `Σ a_k z^k + b_k z̄^k`, `k ≤ 3`, with exact jets.
pub fn random_polynomial(rng: &mut ChaCha8Rng, domain: Arc<Domain<f64>>) -> BiField<f64> {
    let a: [C; 4] = std::array::from_fn(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let b: [C; 4] = std::array::from_fn(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    BiField::analytic(Signature::Elliptic, domain, move |p| {
        let z = p.to_binumber(Signature::Elliptic);
        let zb = z.conj();
        let mut j = Jet::constant(c(0.0, 0.0));
        let (mut zk, mut zbk) = (c(1.0, 0.0), c(1.0, 0.0));
        for k in 0..4 {
            let kf = k as f64;
            let (dzk, dzbk) = if k == 0 {
                (c(0.0, 0.0), c(0.0, 0.0))
            } else {
                (z.powi(k - 1).unwrap().scale(kf), zb.powi(k - 1).unwrap().scale(kf))
            };
            j = j + Jet::new(a[k as usize] * zk, a[k as usize] * dzk, c(0.0, 0.0));
            j = j + Jet::new(b[k as usize] * zbk, c(0.0, 0.0), b[k as usize] * dzbk);
            zk *= z;
            zbk *= zb;
        }
        j
    })
}

/// Least-squares slope of `ln|v|` against `ln r`.
pub fn loglog_slope(radii: &[f64], values: &[f64]) -> f64 {
    let xs: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// `max` that keeps NaN, so a broken evaluation can't hide inside a fold.
pub fn worst(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}
