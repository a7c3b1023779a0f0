//! Numerical witnesses of the modular relation
//! `Σ e^{−γₙ²x} = −(1/2√(πx)) Σ Λ(n) n^{−1/2} e^{−log²n/4x} + e^{x/4} − Φ(x)`
//! and of the agreement of the two expressions for `Φ`.

use std::f64::consts::LN_10;

use rug::float::Constant;
use rug::{Float, Integer};

use crate::arith::{bernoulli_poly_three_quarters, MangoldtTable};
use crate::complex::{float_log10, ApComplex};
use crate::error::{Error, Result};
use crate::mpcontext::PrecisionContext;
use crate::quad::tanh_sinh;
use crate::specials::digamma;
use crate::zeta_zeros::ZeroTable;

const QUAD_LEVELS: u32 = 14;
/// Below this `u` the integrand `1/u − e^{3u/4}/(e^u − 1)` is taken from its
/// Taylor series, which avoids the cancellation at the origin.
const SERIES_CUTOFF: f64 = 0.5;

#[derive(Debug, Clone)]
pub struct ModularCheck {
    pub x: Float,
    pub lhs: Float,
    pub rhs: Float,
    /// Digits of `|lhs − rhs|` below the largest quantity in the identity.
    pub digits_agreed: u32,
    pub zeros_used: usize,
    pub prime_limit: u64,
}

fn check_x(x: &Float) -> Result<()> {
    if !(*x >= 0.01 && *x <= 1) {
        return Err(Error::InvalidArgument(format!(
            "x must lie in [0.01, 1], got {}",
            crate::format::format_sig(x, 6)
        )));
    }
    Ok(())
}

fn pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi)
}

/// `(C₀ + log 16π²x) / (8√(πx))`.
fn log_part(x: &Float, prec: u32) -> Float {
    let mut l = pi(prec);
    l.square_mut();
    l *= 16u32;
    l *= x;
    l.ln_mut();
    l += Float::with_val(prec, Constant::Euler);
    let mut d = Float::with_val(prec, &pi(prec) * x);
    d.sqrt_mut();
    d *= 8u32;
    l / d
}

/// Taylor coefficients of `1/u − e^{3u/4}/(e^u − 1) = −Σ_{n≥1} Bₙ(3/4) u^{n−1}/n!`.
fn kernel_series(prec: u32, digits: u32) -> Vec<Float> {
    // Radius 2π: at u ≤ 1/2 each term gains about one digit.
    let count = digits as usize + 12;
    let mut fact = Integer::from(1);
    (1..=count as u32)
        .map(|n| {
            fact *= n;
            -Float::with_val(prec, bernoulli_poly_three_quarters(n) / &fact)
        })
        .collect()
}

/// `Φ(x)` from the closed expression
/// `(C₀ + log 16π²x)/(8√(πx)) − (1/4√(πx)) ∫₀^∞ e^{−u²/16x}(1/u − e^{3u/4}/(e^u−1)) du`.
pub fn phi_closed(x: &Float, ctx: &PrecisionContext) -> Result<Float> {
    check_x(x)?;
    let prec = ctx.bits() + 16;
    let x = Float::with_val(prec, x);
    let digits = ctx.work_digits();
    let coeffs = kernel_series(prec, digits);
    let sixteen_x = Float::with_val(prec, &x * 16u32);
    let kernel = |u: &Float| -> Float {
        let gauss = Float::with_val(prec, Float::with_val(prec, -Float::with_val(prec, u.square_ref()) / &sixteen_x).exp_ref());
        let g = if u.to_f64() < SERIES_CUTOFF {
            let mut acc = Float::new(prec);
            for c in coeffs.iter().rev() {
                acc *= u;
                acc += c;
            }
            acc
        } else {
            // e^{3u/4}/(e^u − 1) = e^{−u/4}/(1 − e^{−u})
            let em = Float::with_val(prec, Float::with_val(prec, -u).exp_m1_ref());
            let num = Float::with_val(prec, (Float::with_val(prec, -u) / 4u32).exp_ref());
            Float::with_val(prec, u.recip_ref()) + num / em
        };
        gauss * g
    };
    let upper = 4.0 * (x.to_f64() * (digits as f64 * LN_10 + 20.0)).sqrt();
    let mut breaks = vec![0.0, SERIES_CUTOFF];
    let mut b = 1.0;
    while b < upper {
        breaks.push(b);
        b *= 2.0;
    }
    breaks.push(upper);
    let mut integral = Float::new(prec);
    for w in breaks.windows(2) {
        let r = tanh_sinh(
            |n| ApComplex::from_real(kernel(n.x)),
            &Float::with_val(prec, w[0]),
            &Float::with_val(prec, w[1]),
            prec,
            QUAD_LEVELS,
        )?;
        integral += r.value.re;
    }
    let mut d = Float::with_val(prec, &pi(prec) * &x);
    d.sqrt_mut();
    d *= 4u32;
    let v = log_part(&x, prec) - integral / d;
    Ok(Float::with_val(ctx.bits(), v))
}

/// `Ψ(t) = log 2π + π/(2 cosh πt) − Re ψ(1/2 + it)`.
pub fn psi_kernel(t: &Float, prec: u32) -> Result<Float> {
    let p = pi(prec);
    let mut v = Float::with_val(prec, Float::with_val(prec, &p * 2u32).ln_ref());
    let ch = Float::with_val(prec, Float::with_val(prec, &p * t).cosh_ref());
    v += Float::with_val(prec, &p / ch) / 2u32;
    let z = ApComplex::new(Float::with_val(prec, 0.5), Float::with_val(prec, t));
    v -= digamma(&z, prec)?.re;
    Ok(v)
}

/// `Φ(x) = (1/2π) ∫₀^∞ e^{−xt²} Ψ(t) dt` by quadrature on `[0, T]` with
/// `e^{−xT²}` below the working epsilon.
pub fn phi_integral(x: &Float, ctx: &PrecisionContext) -> Result<Float> {
    check_x(x)?;
    let prec = ctx.bits() + 16;
    let x = Float::with_val(prec, x);
    let digits = ctx.work_digits() as f64;
    let upper = ((digits * LN_10 + 20.0 + 10.0) / x.to_f64()).sqrt();
    let mut breaks = vec![0.0];
    let mut b = 1.0;
    while b < upper {
        breaks.push(b);
        b *= 2.0;
    }
    breaks.push(upper);
    let mut total = Float::new(prec);
    for w in breaks.windows(2) {
        let failed = std::cell::Cell::new(None);
        let r = tanh_sinh(
            |n| {
                let tt = Float::with_val(prec, n.x.square_ref());
                let g = Float::with_val(prec, (-tt * &x).exp_ref());
                match psi_kernel(n.x, prec) {
                    Ok(v) => ApComplex::from_real(v * g),
                    Err(e) => {
                        failed.set(Some(e.to_string()));
                        ApComplex::zero(prec)
                    }
                }
            },
            &Float::with_val(prec, w[0]),
            &Float::with_val(prec, w[1]),
            prec,
            QUAD_LEVELS,
        )?;
        if let Some(msg) = failed.take() {
            return Err(Error::Quadrature(msg));
        }
        total += r.value.re;
    }
    total /= Float::with_val(prec, &pi(prec) * 2u32);
    Ok(Float::with_val(ctx.bits(), total))
}

/// Agreement of [`phi_integral`] and [`phi_closed`] in significant digits.
pub fn check_phi_equality(x: &Float, ctx: &PrecisionContext) -> Result<u32> {
    let a = phi_integral(x, ctx)?;
    let b = phi_closed(x, ctx)?;
    Ok(crate::engine::agreed_digits_real(&a, &b, ctx.work_digits()))
}

/// Evaluate both sides of the modular relation with `n_zeros` ordinates and
/// the prime sum over `n ≤ prime_limit`.
pub fn check_modular(
    x: &Float,
    n_zeros: usize,
    prime_limit: u64,
    ctx: &PrecisionContext,
) -> Result<ModularCheck> {
    check_modular_with(x, n_zeros, prime_limit, ctx, ZeroTable::global())
}

pub fn check_modular_with(
    x: &Float,
    n_zeros: usize,
    prime_limit: u64,
    ctx: &PrecisionContext,
    zeros: &ZeroTable,
) -> Result<ModularCheck> {
    check_x(x)?;
    let prec = ctx.bits() + 16;
    let xw = Float::with_val(prec, x);
    let xf = xw.to_f64();
    let eps_log = -(ctx.work_digits() as f64);

    // Zero side. Tail: Σ_{n>N} e^{−γₙ²x} ≤ e^{−γ_N²x}(1 + log(γ_N)/(4π γ_N x)).
    let gammas = zeros.ordinates(n_zeros.max(1), ctx.work_digits() + 4)?;
    let mut lhs = Float::new(prec);
    for g in gammas.iter().take(n_zeros) {
        let e = Float::with_val(prec, -Float::with_val(prec, Float::with_val(prec, g).square_ref()) * &xw);
        lhs += e.exp();
    }
    let gn = gammas[n_zeros.max(1) - 1].to_f64();
    let zero_tail = (-gn * gn * xf) / LN_10 + (1.0 + gn.ln() / (4.0 * std::f64::consts::PI * gn * xf)).log10();
    if n_zeros == 0 || zero_tail > eps_log {
        return Err(Error::TailTooLarge(format!(
            "{n_zeros} zeros leave a tail near 1e{zero_tail:.1} for x = {xf}"
        )));
    }

    // Prime side. Tail beyond L: the integrand log u · u^{−1/2} e^{−log²u/4x}
    // decays like u^{−1/2 − log L/4x}; bound by its value at L times L·4x/log L.
    let lf = prime_limit.max(2) as f64;
    let ll = lf.ln();
    let prime_tail = (ll.ln() - 0.5 * ll - ll * ll / (4.0 * xf)) / LN_10 + (lf * 4.0 * xf / ll).log10();
    if prime_limit < 2 || prime_tail > eps_log {
        return Err(Error::TailTooLarge(format!(
            "prime sum to {prime_limit} leaves a tail near 1e{prime_tail:.1} for x = {xf}"
        )));
    }
    let table = MangoldtTable::new(prime_limit.max(16));
    let four_x = Float::with_val(prec, &xw * 4u32);
    let mut psum = Float::new(prec);
    for n in 2..=prime_limit {
        if let Some((p, _)) = table.lookup(n) {
            let nf = Float::with_val(prec, n);
            let ln_n = Float::with_val(prec, nf.ln_ref());
            let mut e = Float::with_val(prec, ln_n.square_ref()) / &four_x;
            e = -e;
            e.exp_mut();
            e *= Float::with_val(prec, Float::with_val(prec, p).ln_ref());
            e /= Float::with_val(prec, nf.sqrt_ref());
            psum += e;
        }
    }
    let mut front = Float::with_val(prec, &pi(prec) * &xw);
    front.sqrt_mut();
    front *= 2u32;
    let prime_part = psum / &front;
    let exp_part = Float::with_val(prec, Float::with_val(prec, &xw / 4u32).exp_ref());
    let phi = Float::with_val(prec, phi_closed(x, ctx)?);
    let rhs = Float::with_val(prec, &exp_part - &prime_part) - &phi;

    let scale = [lhs.clone(), prime_part, exp_part, phi]
        .into_iter()
        .map(|v| v.abs())
        .fold(Float::new(prec), |m, v| if v > m { v } else { m });
    let diff = Float::with_val(prec, &lhs - &rhs).abs();
    let digits_agreed = if diff.is_zero() {
        ctx.work_digits()
    } else {
        ((float_log10(&scale) - float_log10(&diff)).floor().max(0.0) as u32).min(ctx.work_digits())
    };
    Ok(ModularCheck {
        x: Float::with_val(ctx.bits(), x),
        lhs: Float::with_val(ctx.bits(), lhs),
        rhs: Float::with_val(ctx.bits(), rhs),
        digits_agreed,
        zeros_used: n_zeros,
        prime_limit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_forms_agree_at_a_quarter() {
        let ctx = PrecisionContext::with_policy(30, 0, 200).unwrap();
        let d = check_phi_equality(&Float::with_val(128, 0.25), &ctx).unwrap();
        assert!(d >= 20, "{d}");
    }

    #[test]
    fn modular_relation_at_a_tenth() {
        let ctx = PrecisionContext::with_policy(40, 0, 200).unwrap();
        let r = check_modular(&Float::with_val(160, 0.1), 200, 10_000, &ctx).unwrap();
        assert!(r.digits_agreed >= 25, "{r:?}");
    }

    #[test]
    fn short_truncations_are_refused() {
        let ctx = PrecisionContext::with_policy(40, 0, 200).unwrap();
        let x = Float::with_val(160, 0.1);
        assert!(matches!(check_modular(&x, 2, 10_000, &ctx), Err(Error::TailTooLarge(_))));
        assert!(matches!(check_modular(&x, 200, 20, &ctx), Err(Error::TailTooLarge(_))));
        assert!(check_modular(&Float::with_val(64, 0.0), 200, 10_000, &ctx).is_err());
    }
}
