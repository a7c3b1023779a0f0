//! Gamma-family functions at arbitrary precision: complex log-gamma, the
//! reciprocal gamma function, digamma, and the upper incomplete gamma
//! function `Γ(s, x)` for complex `s` and positive real `x`.
//!
//! Low-level routines take a binary precision; the ctx-taking wrappers use
//! the context's working precision.

use std::collections::HashMap;
use std::f64::consts::{LN_2, PI};
use std::sync::{Arc, Mutex, OnceLock};

use rug::float::Constant;
use rug::{Float, Integer};

use crate::arith::bernoulli_number;
use crate::complex::{float_log10, ApComplex};
use crate::error::{Error, PoleInfo, Result};
use crate::mpcontext::PrecisionContext;

/// `B_{2k} / (2k (2k - 1))` for k = 1.., rounded to `prec` bits.
fn stirling_coefficients(prec: u32, count: usize) -> Arc<Vec<Float>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<Float>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let mut g = cache.lock().unwrap();
    if let Some(v) = g.get(&prec) {
        if v.len() >= count {
            return v.clone();
        }
    }
    let v: Vec<Float> = (1..=count as u32)
        .map(|k| {
            let b = bernoulli_number(2 * k);
            let d = Integer::from(2 * k) * Integer::from(2 * k - 1);
            Float::with_val(prec, b / d)
        })
        .collect();
    let v = Arc::new(v);
    g.insert(prec, v.clone());
    v
}

/// `B_{2k} / (2k)` for the digamma asymptotic series.
fn digamma_coefficients(prec: u32, count: usize) -> Vec<Float> {
    (1..=count as u32)
        .map(|k| Float::with_val(prec, bernoulli_number(2 * k) / Integer::from(2 * k)))
        .collect()
}

/// The non-positive integer `-m` when `z` is exactly one.
fn nonpositive_integer(z: &ApComplex) -> Option<Integer> {
    if !z.im.is_zero() || !z.re.is_integer() || z.re.is_sign_positive() && !z.re.is_zero() {
        return None;
    }
    z.re.to_integer()
}

/// Radius beyond which the Stirling series reaches `prec` bits.
fn stirling_radius(prec: u32) -> f64 {
    0.12 * prec as f64 + 8.0
}

/// Shift count `m` so that `|z + m| >= r` and `Re(z + m) >= 1`.
fn shift_count(z: &ApComplex, r: f64) -> u64 {
    let x = z.re.to_f64();
    let y = z.im.to_f64().abs();
    let need = if y >= r { 1.0 } else { (r * r - y * y).sqrt().max(1.0) };
    if x >= need {
        0
    } else {
        (need - x).ceil() as u64
    }
}

/// Principal `ln Γ(z)` at `prec` bits (continuous off the negative real axis).
pub fn ln_gamma_prec(z: &ApComplex, prec: u32) -> Result<ApComplex> {
    if let Some(m) = nonpositive_integer(z) {
        return Err(Error::Pole(PoleInfo {
            location: m.to_i64().unwrap_or(i64::MIN),
            order: 1,
        }));
    }
    if z.im.is_zero() && z.re.is_sign_positive() {
        let v = Float::with_val(prec, z.re.ln_gamma_ref());
        return Ok(ApComplex::from_real(v));
    }
    let mag = z.abs().to_f64().max(1.0);
    let wp = prec + 16 + (mag.log2().ceil() as u32);
    let zw = z.with_prec(wp);
    let m = shift_count(&zw, stirling_radius(wp));
    let mut w = zw.clone();
    let mut product = ApComplex::one(wp);
    let mut arg_sum = 0.0f64;
    let yf = zw.im.to_f64();
    for k in 0..m {
        product = &product * &w;
        arg_sum += yf.atan2(zw.re.to_f64() + k as f64);
        w = w.add_real(&Float::with_val(wp, 1));
    }
    let mut value = stirling_ln_gamma(&w, wp);
    if m > 0 {
        let mut lp = product.ln();
        // The sum of principal logs differs from the log of the product by 2πk.
        let k = ((arg_sum - lp.im.to_f64()) / (2.0 * PI)).round();
        if k != 0.0 {
            let two_pi = Float::with_val(wp, Constant::Pi) * 2u32;
            lp.im += Float::with_val(wp, &two_pi * k);
        }
        value = &value - &lp;
    }
    Ok(value.with_prec(prec))
}

/// Stirling series for `ln Γ(w)`, valid once `|w|` exceeds the radius.
fn stirling_ln_gamma(w: &ApComplex, prec: u32) -> ApComplex {
    let ln_w = w.ln();
    let half = Float::with_val(prec, 0.5);
    let mut v = &(&w.add_real(&-half.clone()) * &ln_w) - w;
    let ln_2pi = {
        let mut t = Float::with_val(prec, Constant::Pi);
        t *= 2u32;
        t.ln()
    };
    v = v.add_real(&(ln_2pi / 2u32));
    let inv = w.recip();
    let inv2 = inv.square();
    let mut pw = inv.clone();
    let eps_log2 = -(prec as f64) + float_log10(&v.abs()).max(0.0) / std::f64::consts::LOG10_2;
    let mut count = 16usize;
    let mut coeffs = stirling_coefficients(prec, count);
    let mut k = 0usize;
    let mut last = f64::INFINITY;
    loop {
        if k >= coeffs.len() {
            count = coeffs.len() * 2;
            coeffs = stirling_coefficients(prec, count);
        }
        let term = pw.scale(&coeffs[k]);
        let tl = float_log10(&term.abs()) / std::f64::consts::LOG10_2;
        if tl > last {
            // Asymptotic divergence before the tolerance; the radius choice
            // keeps this from happening at the requested precision.
            break;
        }
        v += &term;
        if tl < eps_log2 {
            break;
        }
        last = tl;
        pw = &pw * &inv2;
        k += 1;
    }
    v
}

/// `ln Γ(z)` at the context's working precision.
pub fn log_gamma(z: &ApComplex, ctx: &PrecisionContext) -> Result<ApComplex> {
    ln_gamma_prec(&z.with_prec(ctx.bits()), ctx.bits())
}

/// `sin(π z)` with the argument reduced exactly by the nearest integer.
pub fn sin_pi(z: &ApComplex, prec: u32) -> ApComplex {
    let (k, d) = z.split_nearest_integer();
    let pi = ApComplex::pi(d.prec());
    let s = d.scale(&pi).sin().with_prec(prec);
    if k.is_odd() {
        -&s
    } else {
        s
    }
}

/// `cos(π z)` with exact argument reduction.
pub fn cos_pi(z: &ApComplex, prec: u32) -> ApComplex {
    let (k, d) = z.split_nearest_integer();
    let pi = ApComplex::pi(d.prec());
    let c = d.scale(&pi).cos().with_prec(prec);
    if k.is_odd() {
        -&c
    } else {
        c
    }
}

/// Reciprocal gamma function `1/Γ(z)`, entire; exactly zero at non-positive
/// integers.
pub fn rgamma(z: &ApComplex, prec: u32) -> ApComplex {
    if nonpositive_integer(z).is_some() {
        return ApComplex::zero(prec);
    }
    if z.im.is_zero() {
        let wp = prec + 10;
        let g = Float::with_val(wp, z.re.gamma_ref());
        return ApComplex::from_real(Float::with_val(prec, g.recip_ref()));
    }
    let mag = z.abs().to_f64().max(2.0);
    let wp = prec + 20 + (mag * mag.ln()).log2().max(0.0).ceil() as u32;
    let zw = z.with_prec(wp);
    let v = if zw.re < 0.5 {
        // 1/Γ(z) = Γ(1 - z) sin(πz) / π
        let one_minus = &ApComplex::one(wp) - &zw;
        let lg = ln_gamma_prec(&one_minus, wp).expect("1 - z is off the poles");
        let s = sin_pi(&zw, wp);
        let pi = ApComplex::pi(wp);
        (&lg.exp() * &s).scale(&Float::with_val(wp, pi.recip_ref()))
    } else {
        let lg = ln_gamma_prec(&zw, wp).expect("Re z >= 1/2");
        (-&lg).exp()
    };
    v.with_prec(prec)
}

/// `Γ(z)`; a pole error at non-positive integers.
pub fn gamma(z: &ApComplex, prec: u32) -> Result<ApComplex> {
    if let Some(m) = nonpositive_integer(z) {
        return Err(Error::Pole(PoleInfo {
            location: m.to_i64().unwrap_or(i64::MIN),
            order: 1,
        }));
    }
    Ok(rgamma(z, prec + 4).recip().with_prec(prec))
}

/// Digamma `ψ(z) = Γ'(z)/Γ(z)`.
pub fn digamma(z: &ApComplex, prec: u32) -> Result<ApComplex> {
    if let Some(m) = nonpositive_integer(z) {
        return Err(Error::Pole(PoleInfo {
            location: m.to_i64().unwrap_or(i64::MIN),
            order: 1,
        }));
    }
    let wp = prec + 16;
    if z.im.is_zero() && z.re.is_sign_positive() {
        let v = Float::with_val(wp, z.re.digamma_ref());
        return Ok(ApComplex::from_real(Float::with_val(prec, v)));
    }
    let zw = z.with_prec(wp);
    if zw.re < 0.5 {
        // ψ(z) = ψ(1 - z) - π cot(πz)
        let one_minus = &ApComplex::one(wp) - &zw;
        let p = digamma(&one_minus, wp)?;
        let pi = ApComplex::pi(wp);
        let cot = &cos_pi(&zw, wp) / &sin_pi(&zw, wp);
        return Ok((&p - &cot.scale(&pi)).with_prec(prec));
    }
    let m = shift_count(&zw, stirling_radius(wp));
    let mut w = zw.clone();
    let mut corr = ApComplex::zero(wp);
    let one = Float::with_val(wp, 1);
    for _ in 0..m {
        corr += &w.recip();
        w = w.add_real(&one);
    }
    let inv = w.recip();
    let inv2 = inv.square();
    let mut v = &w.ln() - &inv.scale(&Float::with_val(wp, 0.5));
    let mut pw = inv2.clone();
    let mut count = 16;
    let mut coeffs = digamma_coefficients(wp, count);
    let mut k = 0;
    loop {
        if k >= coeffs.len() {
            count = coeffs.len() * 2;
            coeffs = digamma_coefficients(wp, count);
        }
        let term = pw.scale(&coeffs[k]);
        v -= &term;
        if term.abs_log10() < -(wp as f64) * std::f64::consts::LOG10_2 {
            break;
        }
        pw = &pw * &inv2;
        k += 1;
    }
    Ok((&v - &corr).with_prec(prec))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IncGammaMethod {
    ContinuedFraction,
    Series,
}

/// `Γ(s, x)` (or its regularized form) with a flag raised when `e^{-x}`
/// underflows and the value is reported as an exact zero.
#[derive(Debug, Clone)]
pub struct IncompleteGamma {
    pub value: ApComplex,
    pub underflow: bool,
    pub method: IncGammaMethod,
}

/// Within this distance of a non-positive integer `s` takes the
/// continued-fraction route, where `Γ(s)` is too large to subtract from.
const LATTICE_RADIUS: f64 = 0.25;

fn near_lattice(s: &ApComplex) -> bool {
    let x = s.re.to_f64();
    let y = s.im.to_f64();
    if x > LATTICE_RADIUS {
        return false;
    }
    let k = x.round().min(0.0);
    (x - k).hypot(y) < LATTICE_RADIUS
}

/// Upper incomplete gamma `Γ(s, x) = ∫_x^∞ t^{s-1} e^{-t} dt` at the context's precision.
pub fn upper_gamma(s: &ApComplex, x: &Float, ctx: &PrecisionContext) -> Result<IncompleteGamma> {
    upper_gamma_prec(s, x, ctx.bits(), false)
}

/// `Γ(s, x)`, or `Γ(s, x)/Γ(s)` when `regularized`, at `prec` bits.
pub fn upper_gamma_prec(
    s: &ApComplex,
    x: &Float,
    prec: u32,
    regularized: bool,
) -> Result<IncompleteGamma> {
    if !(x.is_finite() && x.is_sign_positive() && !x.is_zero()) {
        return Err(Error::InvalidArgument(format!(
            "incomplete gamma needs x > 0, got {}",
            crate::format::format_sig(x, 10)
        )));
    }
    let xf = x.to_f64();
    let threshold = s.abs().to_f64() + prec as f64 * LN_2 / 2.0;
    let method = if xf >= threshold || near_lattice(s) {
        IncGammaMethod::ContinuedFraction
    } else {
        IncGammaMethod::Series
    };
    let (value, underflow) = match method {
        IncGammaMethod::ContinuedFraction => {
            let (g, uf) = continued_fraction(s, x, prec)?;
            if regularized {
                (&g * &rgamma(s, prec + 8), uf)
            } else {
                (g, uf)
            }
        }
        IncGammaMethod::Series => {
            let q = complement_series(s, x, prec)?;
            if regularized {
                (q, false)
            } else {
                let r = rgamma(s, prec + 8);
                (&q / &r, false)
            }
        }
    };
    Ok(IncompleteGamma {
        value: value.with_prec(prec),
        underflow,
        method,
    })
}

/// `x^s e^{-x}` at `prec` bits; `None` when it underflows.
fn power_exp(s: &ApComplex, x: &Float, prec: u32) -> Option<ApComplex> {
    let lx = Float::with_val(prec, x.ln_ref());
    let mut e = s.with_prec(prec).scale(&lx);
    e.re -= x;
    let v = e.exp();
    if v.is_zero() {
        None
    } else {
        Some(v)
    }
}

/// Legendre continued fraction for `Γ(s, x)` by the modified Lentz method.
fn continued_fraction(s: &ApComplex, x: &Float, prec: u32) -> Result<(ApComplex, bool)> {
    let wp = prec + 24;
    let s = s.with_prec(wp);
    let Some(front) = power_exp(&s, x, wp) else {
        return Ok((ApComplex::zero(prec), true));
    };
    let tiny = Float::with_val(wp, Float::i_exp(1, -(2 * wp as i32)));
    let fix = |v: ApComplex| {
        if v.is_zero() {
            ApComplex::from_real(tiny.clone())
        } else {
            v
        }
    };
    // b_n = x + 2n + 1 - s,  a_n = -n (n - s)
    let xs = (-&s).add_real(x);
    let one = Float::with_val(wp, 1);
    let mut f = fix(xs.add_real(&one));
    let mut c = f.clone();
    let mut d = ApComplex::zero(wp);
    let tol2 = Float::with_val(wp, Float::i_exp(1, -2 * (wp as i32 - 4)));
    let max_iter = 2_000_000u64;
    for n in 1..=max_iter {
        let nf = Float::with_val(wp, n);
        let b = xs.add_real(&Float::with_val(wp, 2 * n + 1));
        let a = (-&s).add_real(&nf).scale(&nf);
        let a = -&a;
        d = fix(&b + &(&a * &d)).recip();
        c = fix(&b + &(&a / &c));
        let delta = &c * &d;
        f = &f * &delta;
        let dev = delta.add_real(&-one.clone()).norm();
        if dev < tol2 {
            return Ok(((&front / &f).with_prec(prec), false));
        }
    }
    Err(Error::Precision(format!(
        "incomplete gamma continued fraction did not converge at x = {}",
        x.to_f64()
    )))
}

/// `Q(s, x) = 1 - x^s e^{-x} Σ_n x^n / Γ(s + n + 1)`.
///
/// The terms are formed from `1/Γ(s+1)` by downward division, which stays
/// relatively accurate even when `s + n + 1` passes near a pole. The loss of
/// the final subtraction is measured and the sum repeated at a higher
/// precision when it exceeds the guard.
fn complement_series(s: &ApComplex, x: &Float, prec: u32) -> Result<ApComplex> {
    let mut wp = prec + 24;
    for _ in 0..4 {
        let sw = s.with_prec(wp);
        let Some(front) = power_exp(&sw, x, wp) else {
            return Ok(ApComplex::one(prec));
        };
        let one = Float::with_val(wp, 1);
        let xs = Float::with_val(wp, x);
        let mut term = rgamma(&sw.add_real(&one), wp);
        let mut sum = term.clone();
        let mut max_log = term.abs_log10();
        let xf = x.to_f64();
        let eps_log = -(wp as f64) * std::f64::consts::LOG10_2;
        let mut n = 0u64;
        loop {
            n += 1;
            let denom = sw.add_real(&Float::with_val(wp, n));
            term = (&term.scale(&xs)) / &denom;
            sum += &term;
            let tl = term.abs_log10();
            max_log = max_log.max(tl);
            let past_hump = denom.abs().to_f64() > 2.0 * xf;
            if past_hump && (tl < sum.abs_log10() + eps_log || term.is_zero()) {
                break;
            }
            if n > 10_000_000 {
                return Err(Error::Precision("incomplete gamma series too long".into()));
            }
        }
        let gs = &front * &sum;
        let q = (-&gs).add_real(&one);
        let front_log = front.abs_log10();
        let q_log = q.abs_log10();
        let loss_digits = (max_log + front_log).max(0.0) - q_log.min(0.0);
        let loss_bits = (loss_digits.max(0.0) / std::f64::consts::LOG10_2).ceil() as u32;
        if prec + loss_bits + 16 <= wp || q.is_zero() && wp > 8 * prec {
            return Ok(q.with_prec(prec));
        }
        wp = prec + loss_bits + 32;
    }
    Err(Error::Precision(
        "incomplete gamma complement lost all digits".into(),
    ))
}
