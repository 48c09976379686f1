//! Closed-form roots of real quartics.
//!
//! Ferrari's method on the depressed quartic with the resolvent cubic solved
//! by Cardano, all in complex arithmetic, followed by Newton polishing on the
//! original polynomial.

use num_complex::Complex64;

/// Evaluates `c[4] x^4 + c[3] x^3 + c[2] x^2 + c[1] x + c[0]` and its derivative.
fn eval(c: &[f64; 5], x: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::from(c[4]);
    let mut dp = Complex64::from(0.0);
    for &ci in c[..4].iter().rev() {
        dp = dp * x + p;
        p = p * x + ci;
    }
    (p, dp)
}

fn cbrt(z: Complex64) -> Complex64 {
    if z.norm() == 0.0 {
        return z;
    }
    Complex64::from_polar(z.norm().cbrt(), z.arg() / 3.0)
}

/// Roots of the monic cubic `x^3 + a x^2 + b x + c`.
fn cubic_roots(a: Complex64, b: Complex64, c: Complex64) -> [Complex64; 3] {
    let shift = a / 3.0;
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let disc = (q * q / 4.0 + p * p * p / 27.0).sqrt();
    let mut u = cbrt(-q / 2.0 + disc);
    if u.norm() < 1e-300 {
        u = cbrt(-q / 2.0 - disc);
    }
    let omega = Complex64::new(-0.5, 3f64.sqrt() / 2.0);
    let mut roots = [Complex64::from(0.0); 3];
    let mut w = Complex64::from(1.0);
    for r in roots.iter_mut() {
        let uk = u * w;
        let t = if uk.norm() < 1e-300 {
            Complex64::from(0.0)
        } else {
            uk - p / (3.0 * uk)
        };
        *r = t - shift;
        w *= omega;
    }
    roots
}

/// All four complex roots of `c[4] x^4 + ... + c[0]`, `c[4] != 0`.
pub fn quartic_roots(c: [f64; 5]) -> [Complex64; 4] {
    let a4 = c[4];
    let (b, cc, d, e) = (c[3] / a4, c[2] / a4, c[1] / a4, c[0] / a4);

    // x = y - b/4  =>  y^4 + p y^2 + q y + r
    let p = cc - 3.0 * b * b / 8.0;
    let q = d - b * cc / 2.0 + b * b * b / 8.0;
    let r = e - b * d / 4.0 + b * b * cc / 16.0 - 3.0 * b.powi(4) / 256.0;

    let ys: [Complex64; 4] = if q.abs() < 1e-14 * (1.0 + p.abs() + r.abs()) {
        // biquadratic
        let disc = Complex64::from(p * p - 4.0 * r).sqrt();
        let z1 = (-p + disc) / 2.0;
        let z2 = (-p - disc) / 2.0;
        [z1.sqrt(), -z1.sqrt(), z2.sqrt(), -z2.sqrt()]
    } else {
        // 8 m^3 + 8 p m^2 + (2 p^2 - 8 r) m - q^2 = 0
        let ms = cubic_roots(
            Complex64::from(p),
            Complex64::from((2.0 * p * p - 8.0 * r) / 8.0),
            Complex64::from(-q * q / 8.0),
        );
        let m = ms
            .into_iter()
            .max_by(|a, b| a.norm().total_cmp(&b.norm()))
            .unwrap();
        let s = (2.0 * m).sqrt();
        let t1 = (-(2.0 * p + 2.0 * m) - 2.0 * q / s).sqrt();
        let t2 = (-(2.0 * p + 2.0 * m) + 2.0 * q / s).sqrt();
        [
            (s + t1) / 2.0,
            (s - t1) / 2.0,
            (-s + t2) / 2.0,
            (-s - t2) / 2.0,
        ]
    };

    ys.map(|y| polish(&c, y - b / 4.0))
}

/// Newton steps on the original polynomial while they reduce the residual.
fn polish(c: &[f64; 5], mut x: Complex64) -> Complex64 {
    let (mut fx, _) = eval(c, x);
    for _ in 0..12 {
        let (_, dfx) = eval(c, x);
        if dfx.norm() == 0.0 {
            break;
        }
        let next = x - fx / dfx;
        let (fnext, _) = eval(c, next);
        if fnext.norm() < fx.norm() {
            x = next;
            fx = fnext;
        } else {
            break;
        }
    }
    x
}

/// Real value of `c[4] x^4 + ... + c[0]`.
pub fn eval_real(c: &[f64; 5], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci)
}

/// Bisection-safeguarded Newton for a root of `c` on `[lo, hi]` with a sign change.
pub fn bracketed_root(c: &[f64; 5], mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = eval_real(c, lo);
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let fx = eval_real(c, x);
        if fx == 0.0 {
            return x;
        }
        if (fx < 0.0) == (flo < 0.0) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
        }
        let dfx = eval(c, Complex64::from(x)).1.re;
        let newton = x - fx / dfx;
        x = if dfx != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo < 1e-16 * (1.0 + hi.abs()) {
            break;
        }
    }
    x
}
