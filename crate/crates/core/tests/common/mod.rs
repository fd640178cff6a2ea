//! Independent oracles for integration tests. Nothing here calls the crate's
//! own quadrature or special functions.
#![allow(dead_code)]

use dgg::dist::{DoubleGGParams, GGParams};

pub fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

/// Composite Simpson rule on [a, b] with n (even) panels.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// ∫₀^∞ g(x) dx by Simpson in s = ln x over [lo, hi].
pub fn simpson_log<F: Fn(f64) -> f64>(g: F, lo: f64, hi: f64, n: usize) -> f64 {
    simpson(
        |s| {
            let x = s.exp();
            g(x) * x
        },
        lo,
        hi,
        n,
    )
}

pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// K_ν(x) = ∫₀^∞ e^{−x cosh t} cosh(νt) dt.
pub fn bessel_k(nu: f64, x: f64) -> f64 {
    // integrand below e^{-745} once x cosh t > 745 + ν t
    let mut t_max = 1.0;
    while x * f64::cosh(t_max) - nu.abs() * t_max < 760.0 {
        t_max += 0.5;
    }
    simpson(|t| (-x * t.cosh()).exp() * (nu * t).cosh(), 0.0, t_max, 20_000)
}

/// Gamma-Gamma density with shape parameters a, b (unit mean).
pub fn gamma_gamma_pdf(i: f64, a: f64, b: f64) -> f64 {
    2.0 * (0.5 * (a + b) * (a * b).ln() + (0.5 * (a + b) - 1.0) * i.ln() - ln_gamma(a) - ln_gamma(b)).exp()
        * bessel_k(a - b, 2.0 * (a * b * i).sqrt())
}

/// K-channel cdf 1 − 2(αI)^{α/2} K_α(2√(αI)) / Γ(α).
pub fn k_channel_cdf(i: f64, alpha: f64) -> f64 {
    let z = alpha * i;
    1.0 - 2.0 * (0.5 * alpha * z.ln() - ln_gamma(alpha)).exp() * bessel_k(alpha, 2.0 * z.sqrt())
}

/// GG density written out directly.
pub fn gg_density(x: f64, g: &GGParams) -> f64 {
    let (gm, m, o) = (g.gamma, g.m, g.omega);
    (gm.ln() + (m * gm - 1.0) * x.ln() - (m / o) * x.powf(gm) - m * (o / m).ln() - ln_gamma(m)).exp()
}

/// Product density ∫ f_X(I/y) f_Y(y) / y dy by Simpson in ln y.
pub fn product_pdf(i: f64, p: &DoubleGGParams) -> f64 {
    let (x, y) = (p.large(), p.small());
    simpson_log(|t| gg_density(i / t, x) * gg_density(t, y) / t, -40.0, 8.0, 40_000)
}

/// Simpson nodes and weights on [a, b] with n (even) panels.
pub fn simpson_nodes(a: f64, b: f64, n: usize) -> Vec<(f64, f64)> {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    (0..=n)
        .map(|i| {
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            (a + i as f64 * h, w * h / 3.0)
        })
        .collect()
}

/// E[h(I)] = E[h(Ix Iy)] as a double Simpson sum in the log variables.
pub fn expectation<H: Fn(f64) -> f64>(p: &DoubleGGParams, h: H, n: usize) -> f64 {
    let weighted = |g: &GGParams| -> Vec<(f64, f64)> {
        simpson_nodes(-40.0, 6.0, n)
            .into_iter()
            .map(|(u, w)| (u, w * gg_density(u.exp(), g) * u.exp()))
            .filter(|&(_, w)| w > 0.0)
            .collect()
    };
    let xs = weighted(p.large());
    let ys = weighted(p.small());
    let mut total = 0.0;
    for &(u, wy) in &ys {
        let mut inner = 0.0;
        for &(t, wx) in &xs {
            inner += wx * h((t + u).exp());
        }
        total += wy * inner;
    }
    total
}
