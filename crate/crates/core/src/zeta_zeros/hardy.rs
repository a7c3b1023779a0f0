//! ζ(s) by Euler–Maclaurin summation, the Riemann–Siegel theta function,
//! and the Hardy function `Z(t) = e^{iθ(t)} ζ(1/2 + it)`.

use std::collections::HashMap;
use std::f64::consts::{LN_10, PI};
use std::sync::{Arc, Mutex, OnceLock};

use rug::float::Constant;
use rug::{Float, Integer};

use crate::arith::bernoulli_number;
use crate::complex::ApComplex;
use crate::error::{Error, Result};
use crate::mpcontext::PrecisionContext;
use crate::specials::ln_gamma_prec;

/// Largest supported ordinate.
pub const MAX_T: f64 = 1.0e6;

/// `B_{2k} / (2k)!` for k = 1..=count at `prec` bits.
fn em_coefficients(prec: u32, count: usize) -> Arc<Vec<Float>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<Float>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let mut g = cache.lock().unwrap();
    if let Some(v) = g.get(&prec) {
        if v.len() >= count {
            return v.clone();
        }
    }
    let mut fact = Integer::from(1);
    let mut v = Vec::with_capacity(count);
    for k in 1..=count as u32 {
        fact *= Integer::from(2 * k - 1) * Integer::from(2 * k);
        v.push(Float::with_val(prec, bernoulli_number(2 * k) / &fact));
    }
    let v = Arc::new(v);
    g.insert(prec, v.clone());
    v
}

/// Smallest `N` such that the Euler–Maclaurin corrections can reach
/// `digits` before they start to grow at height `t`.
fn choose_n(t: f64, digits: f64) -> u64 {
    let need = digits * LN_10 + 10.0;
    let mut n = 1u64;
    loop {
        let two_pi_n = 2.0 * PI * n as f64;
        let r = (t / two_pi_n).min(1.0);
        let gain = if r > 0.0 { 1.0 + r * r.ln() - r } else { 1.0 };
        if two_pi_n * gain >= need {
            return n;
        }
        n += 1 + n / 8;
    }
}

/// ζ(s) for `s ≠ 1` at `prec` bits.
pub fn zeta(s: &ApComplex, prec: u32) -> Result<ApComplex> {
    let one = Float::with_val(prec, 1);
    if s.im.is_zero() && s.re == one {
        return Err(Error::Pole(crate::error::PoleInfo {
            location: 1,
            order: 1,
        }));
    }
    let digits = prec as f64 * std::f64::consts::LOG10_2;
    let t = s.im.to_f64().abs();
    let sigma = s.re.to_f64();
    if sigma < -1.0 {
        return Err(Error::Range(
            "Euler–Maclaurin ζ is only used for Re s >= -1".into(),
        ));
    }
    let mut n = choose_n(t + sigma.abs(), digits);
    for _ in 0..8 {
        if let Some(v) = zeta_em(s, n, prec) {
            return Ok(v);
        }
        n *= 2;
    }
    Err(Error::Precision("Euler–Maclaurin corrections never reached the tolerance".into()))
}

fn zeta_em(s: &ApComplex, n: u64, prec: u32) -> Option<ApComplex> {
    let wp = prec + 12 + (64 - n.leading_zeros());
    let s = s.with_prec(wp);
    let neg_s = -&s;
    let mut sum = ApComplex::one(wp);
    for k in 2..n {
        sum += &ApComplex::real_pow(&Float::with_val(wp, k), &neg_s);
    }
    let nf = Float::with_val(wp, n);
    let ns = ApComplex::real_pow(&nf, &neg_s);
    let one = Float::with_val(wp, 1);
    // N^{1-s}/(s-1) + N^{-s}/2
    let s_minus_1 = s.add_real(&-one.clone());
    sum += &(&ns.scale(&nf) / &s_minus_1);
    sum += &ns.scale(&Float::with_val(wp, 0.5));
    let tol_log = -(prec as f64 + 4.0) * std::f64::consts::LOG10_2;
    let n2 = Float::with_val(wp, nf.square_ref());
    // P_k = s (s+1) ... (s+2k-2) / N^{2k-1}
    let mut pk = &s / &ApComplex::from_real(nf.clone());
    let mut count = 64usize;
    let mut coeffs = em_coefficients(wp, count);
    let mut prev = f64::INFINITY;
    let mut k = 1usize;
    loop {
        if k > coeffs.len() {
            count = coeffs.len() * 2;
            coeffs = em_coefficients(wp, count);
        }
        let term = (&pk * &ns).scale(&coeffs[k - 1]);
        let tl = term.abs_log10();
        if tl > prev && k > 2 {
            return None;
        }
        sum += &term;
        if tl < tol_log {
            return Some(sum.with_prec(prec));
        }
        prev = tl;
        let a = s.add_real(&Float::with_val(wp, 2 * k - 1));
        let b = s.add_real(&Float::with_val(wp, 2 * k));
        pk = &(&(&pk * &a) * &b) / &ApComplex::from_real(n2.clone());
        k += 1;
    }
}

/// Riemann–Siegel theta `θ(t) = Im ln Γ(1/4 + it/2) − (t/2) ln π`.
pub fn theta(t: &Float, prec: u32) -> Float {
    let wp = prec + 10 + (t.to_f64().abs().max(2.0).log2().ceil() as u32);
    let z = ApComplex::new(Float::with_val(wp, 0.25), Float::with_val(wp, t / 2u32));
    let lg = ln_gamma_prec(&z, wp).expect("1/4 + it/2 is never a pole");
    let ln_pi = Float::with_val(wp, Float::with_val(wp, Constant::Pi).ln_ref());
    let mut v = lg.im;
    v -= Float::with_val(wp, t * &ln_pi) / 2u32;
    Float::with_val(prec, v)
}

/// Asymptotic θ(t) in f64, adequate for locating Gram points.
pub fn theta_f64(t: f64) -> f64 {
    t / 2.0 * (t / (2.0 * PI)).ln() - t / 2.0 - PI / 8.0 + 1.0 / (48.0 * t) + 7.0 / (5760.0 * t.powi(3))
}

fn check_range(t: &Float) -> Result<()> {
    let tf = t.to_f64();
    if !(tf > 0.0) {
        return Err(Error::Range(format!("Hardy Z needs t > 0, got {tf}")));
    }
    if tf > MAX_T {
        return Err(Error::Range(format!("t = {tf} exceeds the supported maximum {MAX_T}")));
    }
    Ok(())
}

/// Hardy function at `prec` bits.
pub fn hardy_z_prec(t: &Float, prec: u32) -> Result<Float> {
    check_range(t)?;
    let wp = prec + 8;
    let s = ApComplex::new(Float::with_val(wp, 0.5), Float::with_val(wp, t));
    let z = zeta(&s, wp)?;
    let th = theta(t, wp);
    let rot = ApComplex::new(Float::new(wp), th).exp();
    Ok(Float::with_val(prec, (&rot * &z).re))
}

/// Hardy `Z(t)`, real, at the context's working precision.
pub fn hardy_z(t: &Float, ctx: &PrecisionContext) -> Result<Float> {
    hardy_z_prec(t, ctx.bits())
}
