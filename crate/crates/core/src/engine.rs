//! Full evaluation of `Z(s)`: parameter choice, magnitude probe, precision
//! escalation, the four terms, and their combination; plus the two-`a`
//! cross-check and the pole diagnostics (finite parts, residues, the double
//! pole at `s = 1`).

use rug::float::Constant;
use rug::Float;

use crate::arith::MangoldtTable;
use crate::complex::{float_log10, ApComplex};
use crate::error::{Error, PoleInfo, Result};
use crate::format::format_sig;
use crate::mpcontext::PrecisionContext;
use crate::terms::{self, EvalParams, TermResult, TruncationReason};
use crate::zeta_zeros::ZeroTable;

/// Default splitting parameter.
pub const DEFAULT_A: f64 = 0.015;
/// Parameters tried in turn when the singular series cannot reach the target.
pub const FALLBACK_A: [f64; 3] = [0.015, 0.005, 0.0025];
/// Digits of the magnitude probe; only the exponent of `E` is needed.
const PROBE_DIGITS: u32 = 20;

#[derive(Debug, Clone)]
pub struct EvalOptions {
    /// Retry with smaller `a` when the singular series stalls (only when `a`
    /// was not given explicitly).
    pub fallback: bool,
    /// Second parameter for the two-`a` agreement check.
    pub verify_a: Option<Float>,
    /// Also compute the explicit prime-tail bound.
    pub rigorous_prime_bound: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            fallback: true,
            verify_a: None,
            rigorous_prime_bound: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TermBreakdown {
    pub a: Float,
    pub main: ApComplex,
    pub prime: ApComplex,
    pub exponential: ApComplex,
    pub singular: ApComplex,
    /// Index of the first zero left out of the main sum.
    pub zeros_used: usize,
    /// Index of the first prime power left out of the prime sum.
    pub lambdas_used: usize,
    pub singular_terms: usize,
    pub error_main: Float,
    pub error_prime: Float,
    pub error_exponential: Float,
    pub error_singular: Float,
    pub prime_tail_bound: Option<Float>,
    pub singular_reason: TruncationReason,
}

#[derive(Debug, Clone)]
pub struct EvalResult {
    pub s: ApComplex,
    pub target_digits: u32,
    pub work_digits: u32,
    pub z: ApComplex,
    pub breakdown: TermBreakdown,
    /// Sum of the per-term truncation estimates and a rounding allowance.
    pub error_estimate: Float,
    pub agreed_digits: Option<u32>,
}

impl EvalResult {
    /// True when the error estimate is within `10^-target_digits` of `|Z|`
    /// (absolute below `|Z| = 1`).
    pub fn meets_target(&self) -> bool {
        let scale = self.z.abs_log10().max(0.0);
        float_log10(&self.error_estimate) <= scale - self.target_digits as f64
    }
}

/// Pole of `Z` within `radius_log10` (in log10) of `s`, if any.
pub fn pole_near(s: &ApComplex, radius_log10: f64) -> Option<PoleInfo> {
    let re = s.re.to_f64();
    let k = if re >= 0.0 {
        1.0
    } else {
        let odd = 2.0 * ((re - 1.0) / 2.0).round() + 1.0;
        odd.min(-1.0)
    };
    let p = Float::with_val(s.prec().max(64), k);
    let d = ApComplex::new(Float::with_val(s.prec(), &s.re - &p), s.im.clone());
    let dist = d.abs_log10();
    (dist < radius_log10).then_some(PoleInfo {
        location: k as i64,
        order: if k == 1.0 { 2 } else { 1 },
    })
}

/// `Z(s)` to `target_digits` digits.
pub fn secondzeta(
    s: &ApComplex,
    target_digits: u32,
    a: Option<&Float>,
    options: &EvalOptions,
) -> Result<EvalResult> {
    secondzeta_with(s, target_digits, a, options, ZeroTable::global(), MangoldtTable::global())
}

/// Same as [`secondzeta`] with explicit zero and prime-power tables.
pub fn secondzeta_with(
    s: &ApComplex,
    target_digits: u32,
    a: Option<&Float>,
    options: &EvalOptions,
    zeros: &ZeroTable,
    mangoldt: &MangoldtTable,
) -> Result<EvalResult> {
    if target_digits == 0 {
        return Err(Error::InvalidArgument("target digits must be positive".into()));
    }
    if !s.is_finite() {
        return Err(Error::InvalidArgument("s must be finite".into()));
    }
    if let Some(p) = pole_near(s, -(target_digits as f64)) {
        return Err(Error::Pole(p));
    }
    let base = PrecisionContext::new(target_digits)?;
    let candidates: Vec<Float> = match a {
        Some(a) => vec![a.clone()],
        None if options.fallback => FALLBACK_A.iter().map(|&x| Float::with_val(64, x)).collect(),
        None => vec![Float::with_val(64, DEFAULT_A)],
    };
    let mut last_err = None;
    for a in &candidates {
        match evaluate_at(s, a, &base, options, zeros, mangoldt) {
            Err(e @ Error::AsymptoticFailure { .. }) => last_err = Some(e),
            other => {
                let mut r = other?;
                if let Some(a2) = &options.verify_a {
                    let second = evaluate_at(s, a2, &base, options, zeros, mangoldt)?;
                    r.agreed_digits = Some(agreed_digits(&r.z, &second.z, target_digits));
                }
                return Ok(r);
            }
        }
    }
    Err(last_err.expect("at least one candidate"))
}

/// log10 magnitudes of `E(s)` and of the singular prefactor at low precision.
fn probe(s: &ApComplex, a: &Float) -> Result<(f64, f64)> {
    let ctx = PrecisionContext::with_policy(PROBE_DIGITS, 0, u32::MAX)?;
    let prec = ctx.bits();
    let p = EvalParams::new(&s.with_prec(prec), a, ctx)?;
    let e = terms::term_e(&p)?.value.abs_log10();
    let sc = terms::singular_scale_log10(&p.s, &p.a, prec);
    Ok((e, sc))
}

fn evaluate_at(
    s: &ApComplex,
    a: &Float,
    base: &PrecisionContext,
    options: &EvalOptions,
    zeros: &ZeroTable,
    mangoldt: &MangoldtTable,
) -> Result<EvalResult> {
    let (mag_e, mag_s) = probe(s, a)?;
    let mag = mag_e.max(mag_s).max(0.0);
    let ctx = base.escalate(mag)?;
    let p = EvalParams::new(s, a, ctx.clone())?;
    let (ra, rest) = rayon::join(
        || terms::term_a(&p, zeros),
        || -> Result<(TermResult, TermResult, TermResult)> {
            let rp = terms::term_p(&p, mangoldt, options.rigorous_prime_bound)?;
            let re = terms::term_e(&p)?;
            let rs = terms::term_s(&p)?;
            Ok((rp, re, rs))
        },
    );
    let (rs_p, rs_e, rs_s) = rest?;
    let ra = ra?;
    // A − P + E − S, left to right.
    let mut z = ra.value.clone();
    z -= &rs_p.value;
    z += &rs_e.value;
    z -= &rs_s.value;

    let mut err = Float::with_val(64, &ra.error_estimate);
    err += &rs_p.error_estimate;
    err += &rs_e.error_estimate;
    err += &rs_s.error_estimate;
    let rounding_log = mag.ceil() + 1.0 - ctx.work_digits() as f64;
    err += Float::with_val(64, 10).pow_ref_f64(rounding_log);

    Ok(EvalResult {
        s: p.s.clone(),
        target_digits: base.target_digits(),
        work_digits: ctx.work_digits(),
        z,
        breakdown: TermBreakdown {
            a: p.a.clone(),
            main: ra.value,
            prime: rs_p.value,
            exponential: rs_e.value,
            singular: rs_s.value,
            zeros_used: ra.terms_used,
            lambdas_used: rs_p.terms_used,
            singular_terms: rs_s.terms_used,
            error_main: ra.error_estimate,
            error_prime: rs_p.error_estimate,
            error_exponential: rs_e.error_estimate,
            error_singular: rs_s.error_estimate,
            prime_tail_bound: rs_p.rigorous_bound,
            singular_reason: rs_s.truncation_reason,
        },
        error_estimate: err,
        agreed_digits: None,
    })
}

trait PowRefF64 {
    fn pow_ref_f64(&self, e: f64) -> Float;
}

impl PowRefF64 for Float {
    fn pow_ref_f64(&self, e: f64) -> Float {
        let l = Float::with_val(self.prec(), self.ln_ref()) * e;
        l.exp()
    }
}

/// Leading significant digits shared by `x` and `y`, capped at `cap`.
pub fn agreed_digits_real(x: &Float, y: &Float, cap: u32) -> u32 {
    let scale = x.clone().abs().max(&y.clone().abs());
    if scale.is_zero() {
        return cap;
    }
    let diff = Float::with_val(x.prec().max(y.prec()), x - y).abs();
    if diff.is_zero() {
        return cap;
    }
    let rel = float_log10(&diff) - float_log10(&scale);
    ((-rel).floor().max(0.0) as u32).min(cap)
}

/// Minimum over the real and imaginary parts; a part that is zero in both is
/// skipped.
pub fn agreed_digits(x: &ApComplex, y: &ApComplex, cap: u32) -> u32 {
    agreed_digits_real(&x.re, &y.re, cap).min(agreed_digits_real(&x.im, &y.im, cap))
}

/// Evaluate with two parameters and count the leading digits both share.
pub fn verify_two_a(s: &ApComplex, target_digits: u32, a1: &Float, a2: &Float) -> Result<u32> {
    if a1 == a2 {
        return Err(Error::InvalidArgument("the two values of a must differ".into()));
    }
    let opts = EvalOptions {
        fallback: false,
        ..Default::default()
    };
    let (r1, r2) = rayon::join(
        || secondzeta(s, target_digits, Some(a1), &opts),
        || secondzeta(s, target_digits, Some(a2), &opts),
    );
    Ok(agreed_digits(&r1?.z, &r2?.z, target_digits))
}

/// Value with an extrapolation error estimate.
#[derive(Debug, Clone)]
pub struct Extrapolated {
    pub value: Float,
    pub error: Float,
}

/// Richardson steps used near poles.
const RICHARDSON_STEPS: [i32; 3] = [3, 4, 5];
/// Extra digits for evaluations close to a pole.
const NEAR_POLE_EXTRA: u32 = 20;

/// Real `Z(x)` for real `x` at `digits` target digits.
fn z_real(x: &Float, digits: u32) -> Result<Float> {
    let s = ApComplex::from_real(x.clone());
    Ok(secondzeta(&s, digits, None, &EvalOptions::default())?.z.re)
}

/// Richardson extrapolation of samples `f(h_k)` with `h_k = 10^-k`, for an
/// expansion in powers of `h²`.
fn richardson_h2(samples: &[Float]) -> Extrapolated {
    let prec = samples[0].prec();
    let mut col: Vec<Float> = samples.to_vec();
    let mut last_diff = Float::with_val(prec, 0);
    let mut factor = Float::with_val(prec, 1);
    while col.len() > 1 {
        factor *= 100u32;
        let denom = Float::with_val(prec, &factor - 1u32);
        let next: Vec<Float> = (1..col.len())
            .map(|k| {
                let mut v = Float::with_val(prec, &col[k] * &factor);
                v -= &col[k - 1];
                v / &denom
            })
            .collect();
        last_diff = Float::with_val(prec, &next[next.len() - 1] - &col[col.len() - 1]).abs();
        col = next;
    }
    Extrapolated {
        value: col.pop().expect("non-empty"),
        error: Float::with_val(64, last_diff),
    }
}

fn check_pole(location: i64) -> Result<()> {
    if location == 1 || (location < 0 && location % 2 != 0) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "Z is regular at s = {location}; poles are s = 1 and s = -1, -3, -5, ..."
        )))
    }
}

fn near_pole_samples<F>(location: i64, digits: u32, f: F) -> Result<Vec<Float>>
where
    F: Fn(&Float, &Float, &Float) -> Float,
{
    let wd = digits + NEAR_POLE_EXTRA;
    let prec = crate::mpcontext::digits_to_bits(wd);
    let p = Float::with_val(prec, location);
    RICHARDSON_STEPS
        .iter()
        .map(|&k| {
            let h = crate::format::parse_float(&format!("1e-{k}"), prec)?;
            let plus = z_real(&Float::with_val(prec, &p + &h), wd)?;
            let minus = z_real(&Float::with_val(prec, &p - &h), wd)?;
            Ok(f(&plus, &minus, &h))
        })
        .collect()
}

/// Finite part at a pole: the symmetric mean `(Z(p+h) + Z(p−h))/2` as
/// `h → 0`. At the double pole `s = 1` the known `1/(2π h²)` is removed first.
pub fn finite_part(location: i64, digits: u32) -> Result<Extrapolated> {
    check_pole(location)?;
    let samples = near_pole_samples(location, digits, |plus, minus, h| {
        let prec = plus.prec();
        let mut m = Float::with_val(prec, plus + minus) / 2u32;
        if location == 1 {
            let mut c2 = Float::with_val(prec, Constant::Pi) * 2u32;
            c2 *= Float::with_val(prec, h.square_ref());
            m -= c2.recip();
        }
        m
    })?;
    Ok(richardson_h2(&samples))
}

/// Closed-form residue at `s = 1 − 2n`: `(−1)ⁿ(1 − 2^{1−2n}) B_{2n} / (2π·2n)`.
pub fn residue_closed_form(n: u32, prec: u32) -> Float {
    let b = crate::arith::bernoulli_number(2 * n);
    let pow = rug::Rational::from((1, rug::Integer::from(1) << (2 * n - 1)));
    let mut r = rug::Rational::from(1) - pow;
    r *= b;
    r /= 2 * n;
    if n % 2 == 1 {
        r = -r;
    }
    Float::with_val(prec, r) / (Float::with_val(prec, Constant::Pi) * 2u32)
}

/// Residue at the simple pole `location = 1 − 2n`, from
/// `(h/2)(Z(p+h) − Z(p−h))` extrapolated to `h = 0`.
pub fn residue_at(location: i64, digits: u32) -> Result<Extrapolated> {
    check_pole(location)?;
    if location == 1 {
        return Err(Error::InvalidArgument(
            "s = 1 is a double pole; use double_pole_main_part".into(),
        ));
    }
    let samples = near_pole_samples(location, digits, |plus, minus, h| {
        let prec = plus.prec();
        Float::with_val(prec, plus - minus) * h / 2u32
    })?;
    let r = richardson_h2(&samples);
    check_extrapolation(&r, digits)?;
    Ok(r)
}

/// `(c₂, c₁)` of `Z(s) = c₂/(s−1)² + c₁/(s−1) + O(1)`.
pub fn double_pole_main_part(digits: u32) -> Result<(Extrapolated, Extrapolated)> {
    let c2 = near_pole_samples(1, digits, |plus, minus, h| {
        let prec = plus.prec();
        let mut m = Float::with_val(prec, plus + minus) / 2u32;
        m *= Float::with_val(prec, h.square_ref());
        m
    })?;
    let c1 = near_pole_samples(1, digits, |plus, minus, h| {
        let prec = plus.prec();
        Float::with_val(prec, plus - minus) * h / 2u32
    })?;
    let (c2, c1) = (richardson_h2(&c2), richardson_h2(&c1));
    check_extrapolation(&c2, digits)?;
    check_extrapolation(&c1, digits)?;
    Ok((c2, c1))
}

fn check_extrapolation(r: &Extrapolated, digits: u32) -> Result<()> {
    let scale = float_log10(&r.value.clone().abs()).max(0.0);
    if float_log10(&r.error) > scale - digits as f64 + 2.0 {
        return Err(Error::Extrapolation(format!(
            "last Richardson correction {} exceeds the {digits}-digit target",
            format_sig(&r.error, 3)
        )));
    }
    Ok(())
}
