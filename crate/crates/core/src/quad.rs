//! Closed-form and Gauss-Legendre integrals of radial powers `|y|^γ`.
//!
//! Every routine returns `f64::INFINITY` when the integral diverges, which the
//! norm layer turns into a divergence verdict.

use std::f64::consts::{FRAC_PI_4, PI};
use std::sync::OnceLock;

/// `∫_a^b |t|^γ dt` for `a <= b`.
pub fn power_interval(gamma: f64, a: f64, b: f64) -> f64 {
    debug_assert!(a <= b, "reversed interval [{a}, {b}]");
    if b <= a {
        return 0.0;
    }
    let touches_origin = a <= 0.0 && b >= 0.0;
    if touches_origin {
        if gamma <= -1.0 {
            return f64::INFINITY;
        }
        let e = gamma + 1.0;
        return ((-a).powf(e) + b.powf(e)) / e;
    }
    // Same sign from here on; fold onto the positive axis.
    let (lo, hi) = if b < 0.0 { (-b, -a) } else { (a, b) };
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    let u = half / mid;
    if u < 5e-3 {
        // Binomial series around the midpoint; avoids cancellation in F(b) - F(a).
        let g = gamma;
        let u2 = u * u;
        let c1 = g * (g - 1.0) / 2.0 / 3.0;
        let c2 = g * (g - 1.0) * (g - 2.0) * (g - 3.0) / 24.0 / 5.0;
        let c3 = g * (g - 1.0) * (g - 2.0) * (g - 3.0) * (g - 4.0) * (g - 5.0) / 720.0 / 7.0;
        return 2.0 * half * mid.powf(g) * (1.0 + u2 * (c1 + u2 * (c2 + u2 * c3)));
    }
    power_difference(gamma + 1.0, lo, hi)
}

/// `(hi^e − lo^e)/e` for `0 < lo < hi`, continuous through `e = 0`.
fn power_difference(e: f64, lo: f64, hi: f64) -> f64 {
    let l = (hi / lo).ln();
    let x = e * l;
    let exprel = if x == 0.0 { 1.0 } else { x.exp_m1() / x };
    lo.powf(e) * l * exprel
}

/// `∫_{B(0,r)} |y|^γ dy` in dimension `n`.
pub fn power_ball(gamma: f64, r: f64, n: usize) -> f64 {
    power_annulus(gamma, 0.0, r, n)
}

/// `∫_{inner <= |y| < outer} |y|^γ dy` in dimension `n`.
pub fn power_annulus(gamma: f64, inner: f64, outer: f64, n: usize) -> f64 {
    if outer <= inner {
        return 0.0;
    }
    let nf = n as f64;
    let sphere = match n {
        1 => 2.0,
        2 => 2.0 * PI,
        _ => unreachable!("dimension checked by callers"),
    };
    if inner == 0.0 && gamma <= -nf {
        return f64::INFINITY;
    }
    let e = gamma + nf;
    if inner == 0.0 {
        return sphere * outer.powf(e) / e;
    }
    sphere * power_difference(e, inner, outer)
}

/// `∫_{[0,h]^2} |y|^γ dy`, the mass of a grid cell with a corner at the origin.
pub fn power_corner_square(gamma: f64, h: f64) -> f64 {
    if gamma <= -2.0 {
        return f64::INFINITY;
    }
    h.powf(gamma + 2.0) * corner_square_constant(gamma)
}

/// `∫_{[0,1]^2} |y|^γ dy = 2/(γ+2) ∫_0^{π/4} sec(φ)^{γ+2} dφ`.
fn corner_square_constant(gamma: f64) -> f64 {
    let e = gamma + 2.0;
    let (nodes, weights) = gauss_legendre_32();
    let half = 0.5 * FRAC_PI_4;
    let s: f64 = nodes
        .iter()
        .zip(weights)
        .map(|(x, w)| {
            let phi = half * (x + 1.0);
            w * phi.cos().powf(-e)
        })
        .sum();
    2.0 / e * half * s
}

/// Nodes and weights of the 32-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre_32() -> (&'static [f64], &'static [f64]) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    let (x, w) = RULE.get_or_init(|| gauss_legendre(32));
    (x, w)
}

/// Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    let nf = order as f64;
    for i in 0..order.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=order {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[order - 1 - i] = x;
        weights[i] = w;
        weights[order - 1 - i] = w;
    }
    (nodes, weights)
}
