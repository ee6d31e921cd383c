//! Closed-form reference values for the builtin examples.
//!
//! Every function takes the center `z0` and the evaluation point `z`. Where a
//! widely quoted expression turned out to be wrong, both variants are kept: the
//! `_uncorrected` one as quoted and the plain one as verified by the numerical
//! constructions. The oracles are plain `f64` code, independent of the field
//! machinery they are compared against.

use std::f64::consts::PI;

use crate::algebra::Binumber;
use crate::fields::Point;

type C = Binumber<f64>;

fn c(re: f64, im: f64) -> C {
    Binumber::elliptic(re, im)
}

/// Which of the two basis coefficients `1` or `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Unit {
    One,
    I,
}

impl Unit {
    pub fn value(self) -> C {
        match self {
            Unit::One => c(1.0, 0.0),
            Unit::I => c(0.0, 1.0),
        }
    }
}

/// `Z_f^(n)(a, z0; z)` for `f = y²`, `n ≤ 2`.
pub fn z_f(n: u32, a: Unit, z0: Point<f64>, z: Point<f64>) -> Option<C> {
    let (x0, y0, x, y) = (z0.x, z0.y, z.x, z.y);
    let dx = x - x0;
    Some(match (n, a) {
        (0, Unit::One) => c((y / y0).powi(2), 0.0),
        (0, Unit::I) => c(0.0, (y0 / y).powi(2)),
        (1, Unit::One) => c(dx * (y / y0).powi(2), (y.powi(5) - y0.powi(5)) / (5.0 * (y0 * y).powi(2))),
        (1, Unit::I) => c(-(y.powi(3) - y0.powi(3)) / (3.0 * y0 * y), dx * (y0 / y).powi(2)),
        (2, Unit::One) => zf2_one(z0, z, y0.powi(5) * y),
        (2, Unit::I) => {
            let d = 15.0 * y0 * y * y;
            c(
                -10.0 * dx * y * (y.powi(3) - y0.powi(3)) / d,
                (15.0 * y0.powi(3) * dx * dx + 5.0 * y0.powi(3) * y * y - 2.0 * y.powi(5) - 3.0 * y0.powi(5)) / d,
            )
        }
        _ => return None,
    })
}

fn zf2_one(z0: Point<f64>, z: Point<f64>, last: f64) -> C {
    let (x0, y0, x, y) = (z0.x, z0.y, z.x, z.y);
    let dx = x - x0;
    let d = 15.0 * (y0 * y).powi(2);
    c(
        (15.0 * dx * dx * y.powi(4) - 3.0 * y.powi(6) + 5.0 * y0 * y0 * y.powi(4) - 2.0 * last) / d,
        6.0 * dx * (y.powi(5) - y0.powi(5)) / d,
    )
}

/// `Z_f^(2)(1, z0; z)` with the uncorrected real-part term `−2y0·y`.
pub fn zf2_one_uncorrected(z0: Point<f64>, z: Point<f64>) -> C {
    zf2_one(z0, z, z0.y * z.y)
}

/// `g = (1 + xy³)/y`.
pub fn g_1xy3(z: Point<f64>) -> f64 {
    (1.0 + z.x * z.y.powi(3)) / z.y
}

/// `Z_g^(n)(a, z0; z)` for `g = (1 + xy³)/y`, `n ≤ 2`.
pub fn z_g(n: u32, a: Unit, z0: Point<f64>, z: Point<f64>) -> Option<C> {
    let (x0, y0, x, y) = (z0.x, z0.y, z.x, z.y);
    let dx = x - x0;
    let s = 1.0 + x * y.powi(3);
    let k0 = 1.0 / g_1xy3(z0);
    Some(match (n, a) {
        (0, Unit::One) => c(k0 * g_1xy3(z), 0.0),
        (0, Unit::I) => c(0.0, 1.0 / (k0 * g_1xy3(z))),
        (1, Unit::One) => c(
            dx * (y / y0).powi(2),
            (5.0 * (y * y - y0 * y0) + 2.0 * x0 * (y.powi(5) - y0.powi(5)) - 15.0 * dx * dx) * y / (10.0 * y0 * y0 * s),
        ),
        (1, Unit::I) => c(
            -(y.powi(3) - y0.powi(3)) / (3.0 * y0 * y),
            (30.0 * dx + 15.0 * y0.powi(3) * (x * x - x0 * x0) - 5.0 * y0.powi(3) * y * y
                + 2.0 * y.powi(5)
                + 3.0 * y0.powi(5))
                * y
                / (30.0 * y0 * s),
        ),
        (2, Unit::One) => {
            let bracket = 315.0 * x0 * x * dx + 105.0 * dx * (y * y - y0 * y0) - 105.0 * (x.powi(3) - x0.powi(3))
                + 21.0 * (x * x - x0 * x0) * (y.powi(5) - y0.powi(5))
                - 7.0 * (y0 * y).powi(2) * (y.powi(3) - y0.powi(3))
                + 3.0 * (y.powi(7) - y0.powi(7));
            c(
                (15.0 * dx * dx * y.powi(4) - 3.0 * y.powi(6) + 5.0 * y0 * y0 * y.powi(4) - 2.0 * y0.powi(5) * y)
                    / (15.0 * (y0 * y).powi(2)),
                y * bracket / (105.0 * y0 * y0 * s),
            )
        }
        (2, Unit::I) => {
            let y03 = y0.powi(3);
            let bracket = 15.0 * dx * dx * y + 10.0 * y03 * x.powi(3) * y - 15.0 * x0 * y03 * x * x * y
                + 5.0 * x0.powi(3) * y03 * y
                - 2.0 * x0 * y.powi(6)
                - 5.0 * y.powi(3)
                + 5.0 * x0 * y03 * y.powi(3)
                - 10.0 * y03
                - 3.0 * x0 * y0.powi(5) * y
                + 15.0 * y0 * y0 * y;
            c(-2.0 * dx * y * (y.powi(3) - y03) / (3.0 * y0 * y * y), bracket / (15.0 * y0 * s))
        }
        _ => return None,
    })
}

/// Potential of the imaginary parts for `g = (1 + xy³)/y`, `g·Δ(1/g)`.
pub fn q2(z: Point<f64>) -> f64 {
    2.0 * q2_uncorrected(z)
}

/// The uncorrected potential, half the true value.
pub fn q2_uncorrected(z: Point<f64>) -> f64 {
    let (x, y) = (z.x, z.y);
    y * (y.powi(5) + 3.0 * x * x * y.powi(3) - 6.0 * x) / (1.0 + x * y.powi(3)).powi(2)
}

/// `B` of the pair `(g, i/g)`; its `A` vanishes.
pub fn b_g(z: Point<f64>) -> C {
    let (x, y) = (z.x, z.y);
    let d = 2.0 * y * (1.0 + x * y.powi(3));
    c(y.powi(4) / d, (1.0 - 2.0 * x * y.powi(3)) / d)
}

/// `F_1` of the sequence through `(g, i/g)`.
pub fn f1(z0: Point<f64>, z: Point<f64>) -> C {
    let (x0, y0, x, y) = (z0.x, z0.y, z.x, z.y);
    let k = y / (y0 * y0 * (1.0 + x * y.powi(3)));
    c(k * y * (1.0 + x0 * y.powi(3)), -3.0 * k * (x - x0))
}

/// `G_1` of the sequence through `(g, i/g)`.
pub fn g1(z0: Point<f64>, z: Point<f64>) -> C {
    let (y0, x, y) = (z0.y, z.x, z.y);
    let k = y / (3.0 * y0 * (1.0 + x * y.powi(3)));
    c(k * y * (y.powi(3) - y0.powi(3)), 3.0 * k * (1.0 + x * y0.powi(3)))
}

/// `A` of `(F_1, G_1)`.
pub fn a_f1g1(z: Point<f64>) -> C {
    let (x, y) = (z.x, z.y);
    let d = 2.0 * y * (1.0 + x * y.powi(3));
    c(-y.powi(4) / d, -3.0 / d)
}

/// `B` of `(F_1, G_1)`.
pub fn b_f1g1(z: Point<f64>) -> C {
    c(0.0, -1.0 / z.y)
}

/// `Im(F̄_1 G_1) = (y/y0)² g(z0)/g(z)`.
pub fn im_f1bar_g1(z0: Point<f64>, z: Point<f64>) -> f64 {
    (z.y / z0.y).powi(2) * g_1xy3(z0) / g_1xy3(z)
}

/// The uncorrected form of [`im_f1bar_g1`], which carries an extra factor ½.
pub fn im_f1bar_g1_uncorrected(z0: Point<f64>, z: Point<f64>) -> f64 {
    0.5 * im_f1bar_g1(z0, z)
}

/// `Z_1^(1)(a, z0; z)` uncorrected: `d_{(g,i/g)} Z_g^(2)`, which is twice the
/// normalized first power of index 1.
pub fn z1_first_uncorrected(a: Unit, z0: Point<f64>, z: Point<f64>) -> C {
    let (x0, y0, x, y) = (z0.x, z0.y, z.x, z.y);
    let dx = x - x0;
    let s = 1.0 + x * y.powi(3);
    match a {
        Unit::One => {
            let k = y / (15.0 * y0 * y0 * s);
            c(
                k * y
                    * (15.0 * y.powi(3) * (x * x - x0 * x0) + 30.0 * dx + 3.0 * y.powi(5) - 5.0 * y0 * y0 * y.powi(3)
                        + 2.0 * y0.powi(5)),
                k * (15.0 * (y * y - y0 * y0) + 6.0 * x * (y.powi(5) - y0.powi(5)) - 45.0 * dx * dx),
            )
        }
        Unit::I => {
            let k = 2.0 / (3.0 * y0 * y * s);
            c(-k * (y.powi(3) - y0.powi(3)) * (1.0 + x0 * y.powi(3)), 3.0 * k * dx * y * y * (1.0 + x * y0.powi(3)))
        }
    }
}

/// Uncorrected `(F_2, G_2)`, `(2(y/y0)², 2i(y0/y)²)`.
pub fn f2g2_uncorrected(z0: Point<f64>, z: Point<f64>) -> (C, C) {
    let r = (z.y / z0.y).powi(2);
    (c(2.0 * r, 0.0), c(0.0, 2.0 / r))
}

/// `(F_2, G_2)` from normalized first powers, `((y/y0)², i(y0/y)²)`.
pub fn f2g2(z0: Point<f64>, z: Point<f64>) -> (C, C) {
    let r = (z.y / z0.y).powi(2);
    (c(r, 0.0), c(0.0, 1.0 / r))
}

fn kernel(z0: Point<f64>, z: Point<f64>, log_arg: f64, branch: f64) -> C {
    let (x0, y0, x, y) = (z0.x, z0.y, z.x, z.y);
    let r2 = (x - x0).powi(2) + (y - y0).powi(2);
    let p1 = 2.0 * x0 * x0 * y0 - 4.0 * y0 * y0 * y - 4.0 * x0 * y0 * x
        + 2.0 * y0 * y * y
        + 2.0 * y0.powi(3)
        + 2.0 * y0 * x * x;
    let p2 = -2.0 * x0 * x0 * x + x0 * x * x + x0.powi(3) + x0 * y * y + x0 * y0 * y0 - 2.0 * x0 * y0 * y;
    let p4 = -2.0 * y0 * x * y + 2.0 * x0 * x0 * x + 2.0 * y0 * y0 * x + 2.0 * x.powi(3) - 4.0 * x0 * x * x;
    let braces = p1 * (y0 / x0).atan() + p2 * (r2 / log_arg).ln() - p1 * ((y - y0) / (x - x0)).atan() + p4;
    let abar = braces / (2.0 * r2) + branch;
    c((x - x0) / r2, abar / (x * y))
}

/// `Z_g^(−1)(1, z0; z)` for `g = xy` uncorrected, with `ln|(z − z0)/z|²`.
pub fn z_minus1_uncorrected(z0: Point<f64>, z: Point<f64>) -> C {
    kernel(z0, z, z.x * z.x + z.y * z.y, 0.0)
}

/// `Z_g^(−1)(1, z0; z)` for `g = xy` with integrals from the origin along
/// paths that pass above the pole for `y > y0` and below it for `y < y0`.
pub fn z_minus1(z0: Point<f64>, z: Point<f64>) -> C {
    let branch = if z.x > z0.x { PI * z0.y * (z.y - z0.y).signum() } else { 0.0 };
    kernel(z0, z, z0.x * z0.x + z0.y * z0.y, branch)
}

/// `|(z − z0) W(z)|`.
pub fn h_value(z0: Point<f64>, z: Point<f64>, w: C) -> f64 {
    (c(z.x - z0.x, z.y - z0.y) * w).norm()
}
