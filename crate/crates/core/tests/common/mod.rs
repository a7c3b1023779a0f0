//! Oracles shared by the acceptance and property targets.
#![allow(dead_code)]

use rug::ops::Pow;
use rug::Float;
use seczeta::engine::agreed_digits_real;
use seczeta::format::{parse_complex, parse_float, significant_digits};
use seczeta::mpcontext::digits_to_bits;
use seczeta::zeta_zeros::count_estimate;
use seczeta::ApComplex;

/// Decimal literal at more bits than it has digits.
pub fn lit(x: &str) -> Float {
    parse_float(x, digits_to_bits(significant_digits(x) as u32 + 30)).expect("literal")
}

pub fn point(x: &str, digits: u32) -> ApComplex {
    parse_complex(x, digits_to_bits(digits + 30)).expect("literal")
}

/// Whether `x` lies within `units` (plus half a unit for the literal's own
/// rounding) of `published` in its `sig`-th significant digit, with the
/// number of leading digits shared.
pub fn near_published(x: &Float, published: &str, sig: usize, units: u32) -> (bool, u32) {
    let p = lit(published);
    let e = p.clone().abs().log10().to_f64().floor() as i32;
    let unit = Float::with_val(p.prec(), 10).pow(e - sig as i32 + 1);
    let diff = Float::with_val(p.prec(), x - &p).abs();
    (diff <= unit * (f64::from(units) + 0.5), agreed_digits_real(x, &p, 80))
}

/// Upper bound on `Σ_{n>N} γₙ^{-σ}` for `T = γ_N`, from
/// `N(t) ≤ main(t) + remainder_bound(t)` and partial summation:
/// `Σ_{n>N} γₙ^{-σ} = −N T^{-σ} + σ ∫_T^∞ t^{-σ-1} N(t) dt`.
pub fn dirichlet_tail_bound(sigma: f64, t: f64, n: usize) -> f64 {
    // t = T e^u; the integrand decays like u e^{-(σ-1)u}.
    let upper = 60.0 / (sigma - 1.0);
    let steps = 20_000;
    let h = upper / steps as f64;
    let f = |u: f64| {
        let tt = t * u.exp();
        let c = count_estimate(tt);
        tt.powf(-sigma) * (c.main + c.remainder_bound)
    };
    let mut acc = f(0.0) + f(upper);
    for i in 1..steps {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(i as f64 * h);
    }
    sigma * acc * h / 3.0 - n as f64 * t.powf(-sigma)
}
