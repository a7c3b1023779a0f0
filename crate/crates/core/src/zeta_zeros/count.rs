//! Zero counting `N(T) = θ(T)/π + 1 + S(T)`, with `S(T) = arg ζ(1/2+iT)/π`
//! tracked continuously along the horizontal segment from `2 + iT`.

use std::f64::consts::PI;

use rug::Float;

use super::hardy::{theta, theta_f64, zeta, MAX_T};
use crate::complex::ApComplex;
use crate::error::{Error, Result};
use crate::mpcontext::{digits_to_bits, PrecisionContext};

/// Digits used for the argument tracking; only the integer part of N(T)
/// matters.
const COUNT_DIGITS: u32 = 20;

/// Main term of the zero-counting function and an explicit bound on the rest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountEstimate {
    pub t: f64,
    /// `(T/2π) log(T/2π) − T/2π`.
    pub main: f64,
    /// Bound on `|N(T) − main|`.
    pub remainder_bound: f64,
}

/// `N(T)` split into the smooth part and a bound on the remainder, using
/// `|N(T) − main − 7/8| ≤ 0.112 log T + 0.278 log log T + 2.510 + 0.2/T`.
pub fn count_estimate(t: f64) -> CountEstimate {
    let x = t / (2.0 * PI);
    let main = x * x.ln() - x;
    let lt = t.max(std::f64::consts::E).ln();
    let remainder_bound = 0.875 + 0.112 * lt + 0.278 * lt.ln().max(0.0) + 2.510 + 0.2 / t.max(1.0);
    CountEstimate {
        t,
        main,
        remainder_bound,
    }
}

/// Gram point `g_n` with `θ(g_n) = nπ`, for `n ≥ −1`.
pub fn gram_point(n: i64) -> f64 {
    let target = n as f64 * PI;
    // Leading-order inverse: g_n ≈ 2π exp(1 + W((8n + 1) / 8e)).
    let w = lambert_w((8.0 * n as f64 + 1.0) / (8.0 * std::f64::consts::E));
    let mut t = 2.0 * PI * (1.0 + w).exp();
    for _ in 0..60 {
        let f = theta_f64(t) - target;
        let step = f / (0.5 * (t / (2.0 * PI)).ln());
        t -= step;
        if step.abs() < 1e-13 * t {
            break;
        }
    }
    t
}

fn lambert_w(x: f64) -> f64 {
    let mut w = if x < 1.0 { x } else { x.ln() - x.ln().ln().max(0.0) };
    for _ in 0..50 {
        let e = w.exp();
        let f = w * e - x;
        let step = f / (e * (w + 1.0));
        w -= step;
        if step.abs() < 1e-15 * w.abs().max(1e-300) {
            break;
        }
    }
    w
}

/// Number of zeros with `0 < γ ≤ T`.
pub fn count_zeros(t: &Float, ctx: &PrecisionContext) -> Result<u64> {
    let tf = t.to_f64();
    if !(tf.is_finite() && tf > 0.0) {
        return Err(Error::InvalidArgument(format!("count_zeros needs T > 0, got {tf}")));
    }
    if tf > MAX_T {
        return Err(Error::Range(format!("T = {tf} exceeds {MAX_T}")));
    }
    if tf < 14.0 {
        // No ordinate lies below 14; the argument principle is only needed above.
        return Ok(0);
    }
    let digits = COUNT_DIGITS.max(ctx.target_digits().min(40));
    let prec = digits_to_bits(digits);
    let th = theta(t, prec).to_f64();
    let arg = arg_zeta_on_line(t, prec)?;
    let n = th / PI + 1.0 + arg / PI;
    let r = n.round();
    if (n - r).abs() > 0.2 {
        return Err(Error::Precision(format!(
            "N({tf}) = {n:.4} is not near an integer; T is too close to an ordinate"
        )));
    }
    Ok(r.max(0.0) as u64)
}

/// Continuous variation of `arg ζ(σ + iT)` from σ = 2 down to σ = 1/2.
fn arg_zeta_on_line(t: &Float, prec: u32) -> Result<f64> {
    let eval = |sigma: f64| -> Result<ApComplex> {
        let s = ApComplex::new(Float::with_val(prec, sigma), Float::with_val(prec, t));
        zeta(&s, prec)
    };
    let mut prev = eval(2.0)?;
    // |ζ(2+iT) − 1| < ζ(2) − 1 < 1, so the principal argument is the right one.
    let mut total = prev.arg().to_f64();
    let steps = 12;
    for k in 1..=steps {
        let a = 2.0 - 1.5 * (k - 1) as f64 / steps as f64;
        let b = 2.0 - 1.5 * k as f64 / steps as f64;
        let zb = eval(b)?;
        total += track(&eval, a, &prev, b, &zb, 0)?;
        prev = zb;
    }
    Ok(total)
}

/// Change of argument from `a` to `b`, bisecting until each step is small.
fn track<F>(eval: &F, a: f64, za: &ApComplex, b: f64, zb: &ApComplex, depth: u32) -> Result<f64>
where
    F: Fn(f64) -> Result<ApComplex>,
{
    let d = (zb / za).arg().to_f64();
    if d.abs() <= PI / 4.0 {
        return Ok(d);
    }
    if depth > 40 {
        return Err(Error::Precision(
            "argument of ζ varies too fast; T is essentially an ordinate".into(),
        ));
    }
    let m = 0.5 * (a + b);
    let zm = eval(m)?;
    Ok(track(eval, a, za, m, &zm, depth + 1)? + track(eval, m, &zm, b, zb, depth + 1)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(15).unwrap()
    }

    #[test]
    fn counts_at_desk_heights() {
        let c = ctx();
        assert_eq!(count_zeros(&Float::with_val(64, 14), &c).unwrap(), 0);
        assert_eq!(count_zeros(&Float::with_val(64, 20), &c).unwrap(), 1);
        assert_eq!(count_zeros(&Float::with_val(64, 100), &c).unwrap(), 29);
        assert_eq!(count_zeros(&Float::with_val(64, 50), &c).unwrap(), 10);
    }

    #[test]
    fn gram_points() {
        assert!((gram_point(0) - 17.845_599_8).abs() < 1e-6);
        assert!((gram_point(-1) - 9.666_908_0).abs() < 1e-4);
        assert!((gram_point(1) - 23.170_282_8).abs() < 1e-6);
        for n in 0..200 {
            assert!(gram_point(n + 1) > gram_point(n));
        }
    }

    #[test]
    fn estimate_brackets_true_count() {
        for &(t, n) in &[(100.0, 29.0), (50.0, 10.0), (200.0, 79.0)] {
            let e = count_estimate(t);
            assert!((n - e.main).abs() <= e.remainder_bound, "T = {t}");
            assert!(e.remainder_bound >= 0.0);
        }
    }
}
