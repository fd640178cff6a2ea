/// Complementary error function, erfc(x) = 2/√π ∫ₓ^∞ e^{−t²} dt.
///
/// Delegates to the musl-derived implementation in `libm`, which is within
/// one ulp over the whole real line. Non-finite input passes through:
/// erfc(NaN) = NaN, erfc(±∞) = 0 / 2.
#[inline]
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// ln erfc(x), finite far beyond the point where erfc(x) underflows.
pub fn ln_erfc(x: f64) -> f64 {
    if x < 20.0 {
        return libm::erfc(x).ln();
    }
    // erfc x = e^{−x²}/√π · 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
    let mut frac = x;
    for k in (1..60).rev() {
        frac = x + (k as f64 / 2.0) / frac;
    }
    -x * x - 0.5 * std::f64::consts::PI.ln() - frac.ln()
}
