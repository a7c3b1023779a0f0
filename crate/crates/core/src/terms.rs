//! The four pieces of `Z(s) = A(s) − P(s) + E(s) − S(s)` for a splitting
//! parameter `0 < a < 1`.
//!
//! - `A` sums regularized incomplete gammas over the zero ordinates.
//! - `P` sums over prime powers with von Mangoldt weights.
//! - `E` is a rapidly convergent power series in `a`.
//! - `S` is an asymptotic expansion in `√a` whose coefficients involve
//!   `Bₙ(3/4)`.
//!
//! Every series runs in increasing index order and stops at the first term
//! below the truncation tolerance `10^-(work_digits - guard_digits)`. Factors
//! `1/Γ(s/2 + k)/(s/2 + k)` that would be `0·∞` on the lattice `s = −2m` are
//! rewritten through `1/Γ(z)/(z+m) = z(z+1)…(z+m−1)/Γ(z+m+1)`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rug::float::Constant;
use rug::{Float, Integer};

use crate::arith::{bernoulli_poly_three_quarters, MangoldtTable};
use crate::complex::{float_log10, ApComplex};
use crate::error::{Error, Result};
use crate::mpcontext::PrecisionContext;
use crate::specials::{rgamma, upper_gamma_prec};
use crate::zeta_zeros::ZeroTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TruncationReason {
    BelowEpsilon,
    TermsIncreasing,
    /// Closed form or an identically vanishing series.
    Exhausted,
}

#[derive(Debug, Clone)]
pub struct TermResult {
    pub value: ApComplex,
    pub terms_used: usize,
    /// Heuristic absolute error.
    pub error_estimate: Float,
    pub truncation_reason: TruncationReason,
    /// Explicit tail bound, when requested (prime term only).
    pub rigorous_bound: Option<Float>,
}

#[derive(Debug, Clone)]
pub struct EvalParams {
    pub s: ApComplex,
    pub a: Float,
    pub ctx: PrecisionContext,
}

impl EvalParams {
    pub fn new(s: &ApComplex, a: &Float, ctx: PrecisionContext) -> Result<Self> {
        if !(*a > 0 && *a < 1) {
            return Err(Error::InvalidArgument(format!(
                "a must lie in (0, 1), got {}",
                crate::format::format_sig(a, 10)
            )));
        }
        let prec = ctx.bits();
        Ok(EvalParams {
            s: s.with_prec(prec),
            a: Float::with_val(prec, a),
            ctx,
        })
    }

    pub fn prec(&self) -> u32 {
        self.ctx.bits()
    }

    /// log10 of the truncation tolerance: terms are carried down to the
    /// working precision less the guard digits.
    pub fn tolerance_log10(&self) -> f64 {
        -((self.ctx.work_digits() - self.ctx.guard_digits()) as f64)
    }

    fn half_s(&self) -> ApComplex {
        self.s.scale(&Float::with_val(self.prec(), 0.5))
    }
}

fn low(x: &Float) -> Float {
    Float::with_val(64, x)
}

/// `1/Γ(z) / (z + k)`, finite as `z → −k`.
pub fn rgamma_over_shift(z: &ApComplex, k: u64, prec: u32) -> ApComplex {
    let zk = z.add_real(&Float::with_val(prec, k));
    if zk.abs().to_f64() > 0.5 {
        return &rgamma(z, prec) / &zk;
    }
    let mut prod = ApComplex::one(prec);
    for j in 0..k {
        prod = &prod * &z.add_real(&Float::with_val(prec, j));
    }
    &prod * &rgamma(&zk.add_real(&Float::with_val(prec, 1)), prec)
}

/// log10 of `|a^{(s−1)/2} / (4√π Γ(s/2))|`, the scale of the singular term.
pub fn singular_scale_log10(s: &ApComplex, a: &Float, prec: u32) -> f64 {
    let la = Float::with_val(prec, a.ln_ref()).to_f64();
    let sigma = s.re.to_f64();
    let rg = rgamma(&s.scale(&Float::with_val(prec, 0.5)), prec);
    let rl = rg.abs_log10().max(0.0);
    let pi = std::f64::consts::PI;
    ((sigma - 1.0) / 2.0 * la) / std::f64::consts::LN_10 - (4.0 * pi.sqrt()).log10() + rl
}

/// `A(s) = Σₙ Γ(s/2, aγₙ²)/Γ(s/2) · γₙ^{−s}`.
pub fn term_a(p: &EvalParams, zeros: &ZeroTable) -> Result<TermResult> {
    let prec = p.prec();
    let digits = p.ctx.work_digits();
    let z = p.half_s();
    let sigma = p.s.re.to_f64();
    let neg_s = -&p.s;
    let tol = p.tolerance_log10();
    let a_f = p.a.to_f64();
    let mut sum = ApComplex::zero(prec);
    let mut ordinates: Vec<Float> = Vec::new();
    let mut n = 0usize;
    let last_used = loop {
        if n >= ordinates.len() {
            let want = (ordinates.len() + 16).max(ordinates.len() * 5 / 4);
            ordinates = zeros.ordinates(want, digits)?;
        }
        let g = Float::with_val(prec, &ordinates[n]);
        let g2 = Float::with_val(prec, g.square_ref());
        let x = Float::with_val(prec, &g2 * &p.a);
        let q = upper_gamma_prec(&z, &x, prec, true)?;
        let term = &q.value * &ApComplex::real_pow(&g, &neg_s);
        let past_hump = a_f * (g2.to_f64() - 0.25) > sigma / 2.0;
        if past_hump && (term.abs_log10() < tol || term.is_zero()) {
            break n;
        }
        sum += &term;
        n += 1;
    };
    // Tail estimate at the last used ordinate.
    let gn = ordinates[last_used.saturating_sub(1)].to_f64();
    let error = main_tail_estimate(p, gn)?;
    Ok(TermResult {
        value: sum,
        terms_used: last_used + 1,
        error_estimate: error,
        truncation_reason: TruncationReason::BelowEpsilon,
        rigorous_bound: None,
    })
}

/// `μ a^{(σ−1)/2} e^{a/4} / (2π) · Γ(−1/2, aγ_N²)/|Γ(s/2)| · log(γ_N/2π)`,
/// with `μ = max(σ/2, 1)`.
fn main_tail_estimate(p: &EvalParams, gamma_n: f64) -> Result<Float> {
    let lp = 96;
    let sigma = p.s.re.to_f64();
    let mu = (sigma / 2.0).max(1.0);
    let a = low(&p.a);
    let x = Float::with_val(lp, &a * (gamma_n * gamma_n));
    let g = upper_gamma_prec(&ApComplex::from_f64(lp, -0.5, 0.0), &x, lp, false)?
        .value
        .re;
    let rg = rgamma(&p.half_s().with_prec(lp), lp).abs();
    let pow = Float::with_val(lp, a.ln_ref()) * ((sigma - 1.0) / 2.0);
    let mut e = Float::with_val(lp, pow.exp_ref());
    e *= Float::with_val(lp, (Float::with_val(lp, &a / 4u32)).exp_ref());
    e *= mu;
    e /= Float::with_val(lp, Constant::Pi) * 2u32;
    e *= &g;
    e *= &rg;
    e *= (gamma_n / (2.0 * std::f64::consts::PI)).ln().max(0.0);
    Ok(e.abs())
}

/// Below this index prime-power terms are always included.
const PRIME_MIN_INDEX: u64 = 9;

/// `P(s) = (1/2√π) Σ Λ(n)/√n · Γ((1−s)/2, log²n/4a)/Γ(s/2) · (2/log n)^{1−s}`.
pub fn term_p(p: &EvalParams, mangoldt: &MangoldtTable, rigorous: bool) -> Result<TermResult> {
    let prec = p.prec();
    let tol = p.tolerance_log10();
    let one = ApComplex::one(prec);
    let w = (&one - &p.s).scale(&Float::with_val(prec, 0.5));
    let one_minus_s = &one - &p.s;
    let rg = rgamma(&p.half_s(), prec);
    let mut front = Float::with_val(prec, Constant::Pi).sqrt() * 2u32;
    front.recip_mut();
    let four_a = Float::with_val(prec, &p.a * 4u32);
    let mut sum = ApComplex::zero(prec);
    let mut n = 1u64;
    let omitted = loop {
        n += 1;
        let Some((prime, _)) = mangoldt.lookup(n) else {
            continue;
        };
        let nf = Float::with_val(prec, n);
        let ln_n = Float::with_val(prec, nf.ln_ref());
        let x = Float::with_val(prec, ln_n.square_ref()) / &four_a;
        let g = upper_gamma_prec(&w, &x, prec, false)?;
        let lam = Float::with_val(prec, Float::with_val(prec, prime).ln_ref());
        let mut coef = lam / Float::with_val(prec, nf.sqrt_ref());
        coef *= &front;
        let ratio = Float::with_val(prec, 2u32) / &ln_n;
        let pw = ApComplex::real_pow(&ratio, &one_minus_s);
        let term = (&(&g.value * &rg) * &pw).scale(&coef);
        if n >= PRIME_MIN_INDEX && (term.abs_log10() < tol || term.is_zero()) {
            break term;
        }
        sum += &term;
    };
    let rigorous_bound = if rigorous { Some(prime_tail_bound(p, n)) } else { None };
    Ok(TermResult {
        value: sum,
        terms_used: n as usize,
        error_estimate: low(&omitted.abs()),
        truncation_reason: if rg.is_zero() {
            TruncationReason::Exhausted
        } else {
            TruncationReason::BelowEpsilon
        },
        rigorous_bound,
    })
}

/// Explicit tail bound for the prime series after `N` terms:
/// `δ · 2a^{(1+σ)/2} / (√π |Γ(s/2)|) · 6/log²N · e^{−log²N/16a}`,
/// `δ = max(1, (1−σ)/2)`, valid for `N ≥ 8`.
pub fn prime_tail_bound(p: &EvalParams, n: u64) -> Float {
    let lp = 96;
    let sigma = p.s.re.to_f64();
    let delta = ((1.0 - sigma) / 2.0).max(1.0);
    let a = low(&p.a);
    let ln_n = (n.max(8) as f64).ln();
    let rg = rgamma(&p.half_s().with_prec(lp), lp).abs();
    let mut v = Float::with_val(lp, Float::with_val(lp, a.ln_ref()) * ((1.0 + sigma) / 2.0)).exp();
    v *= 2.0 * delta * 6.0 / (std::f64::consts::PI.sqrt() * ln_n * ln_n);
    v *= &rg;
    let expo = Float::with_val(lp, -ln_n * ln_n / 16.0) / &a;
    v *= Float::with_val(lp, expo.exp_ref());
    v
}

/// `E(s) = a^{s/2} Σ (a/4)ⁿ/n! · 1/(Γ(s/2)(n + s/2))`; the closed form
/// `(−1)^m/4^m` on the lattice `s = −2m`.
pub fn term_e(p: &EvalParams) -> Result<TermResult> {
    let prec = p.prec();
    if let Some(m) = even_lattice_point(&p.s) {
        let mut v = Float::with_val(prec, Integer::from(1) << (2 * m as u32)).recip();
        if m % 2 == 1 {
            v = -v;
        }
        return Ok(TermResult {
            value: ApComplex::from_real(v),
            terms_used: 0,
            error_estimate: Float::new(64),
            truncation_reason: TruncationReason::Exhausted,
            rigorous_bound: None,
        });
    }
    let z = p.half_s();
    let tol = p.tolerance_log10();
    let front = ApComplex::real_pow(&p.a, &z);
    let quarter_a = Float::with_val(prec, &p.a / 4u32);
    let rg = rgamma(&z, prec);
    let mut coef = Float::with_val(prec, 1);
    let mut sum = ApComplex::zero(prec);
    let front_log = front.abs_log10();
    let mut n = 0u64;
    loop {
        let zn = z.add_real(&Float::with_val(prec, n));
        let ratio = if zn.abs().to_f64() < 0.5 {
            rgamma_over_shift(&z, n, prec)
        } else {
            &rg / &zn
        };
        let term = ratio.scale(&coef);
        sum += &term;
        n += 1;
        if term.abs_log10() + front_log < tol && (n as f64) > z.abs().to_f64() {
            break;
        }
        coef *= &quarter_a;
        coef /= n;
    }
    Ok(TermResult {
        value: &front * &sum,
        terms_used: n as usize,
        error_estimate: Float::new(64),
        truncation_reason: TruncationReason::BelowEpsilon,
        rigorous_bound: None,
    })
}

/// `m` when `s = −2m` exactly (m ≥ 0).
fn even_lattice_point(s: &ApComplex) -> Option<u64> {
    if !s.im.is_zero() || !s.re.is_integer() || s.re > 0 {
        return None;
    }
    let k = s.re.to_integer()?;
    let m = -k;
    if m.is_odd() {
        return None;
    }
    Some(m.to_u64()? / 2)
}

/// `c_n = Bₙ(3/4)/n! · 4ⁿ · Γ(n/2)` for n = 1..=count at `prec` bits.
fn singular_coefficients(prec: u32, count: usize) -> Arc<Vec<Float>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<Float>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let mut g = cache.lock().unwrap();
    if let Some(v) = g.get(&prec) {
        if v.len() >= count {
            return v.clone();
        }
    }
    let mut v = Vec::with_capacity(count);
    let mut fact = Integer::from(1);
    for n in 1..=count as u32 {
        fact *= n;
        let exact = bernoulli_poly_three_quarters(n) * (Integer::from(1) << (2 * n)) / &fact;
        let gamma_half = Float::with_val(prec, Float::with_val(prec, n) / 2u32).gamma();
        v.push(Float::with_val(prec, exact) * gamma_half);
    }
    let v = Arc::new(v);
    g.insert(prec, v.clone());
    v
}

/// `S(s)` from the asymptotic expansion in `√a`.
///
/// Odd-indexed terms dominate the even ones, so terms are taken in pairs and
/// the sum stops once an odd term times the prefactor falls below the
/// tolerance, or when odd terms start to grow (the expansion's optimal
/// truncation point).
pub fn term_s(p: &EvalParams) -> Result<TermResult> {
    let prec = p.prec();
    let s = &p.s;
    let z = p.half_s();
    let one = Float::with_val(prec, 1);
    let s1 = s.add_real(&-one.clone());
    if s1.is_zero() {
        return Err(Error::Pole(crate::error::PoleInfo { location: 1, order: 2 }));
    }
    let rg = rgamma(&z, prec);
    let sqrt_pi = Float::with_val(prec, Constant::Pi).sqrt();
    let prefactor = ApComplex::real_pow(&p.a, &s1.scale(&Float::with_val(prec, 0.5)))
        .scale(&Float::with_val(prec, (sqrt_pi.clone() * 4u32).recip_ref()));
    let pref_log = prefactor.abs_log10();
    let tol = p.tolerance_log10();
    let target_log = -(p.ctx.target_digits() as f64);

    // 1/Γ(s/2) · [−2/(s−1)² + (C₀ + log 16π²a)/(s−1)]
    let inv = s1.recip();
    let mut c = Float::with_val(prec, Constant::Pi);
    c.square_mut();
    c *= 16u32;
    c *= &p.a;
    c.ln_mut();
    c += Float::with_val(prec, Constant::Euler);
    let bracket = &inv.scale(&c) - &inv.square().scale(&Float::with_val(prec, 2));
    let lead = &rg * &bracket;

    let sqrt_a = Float::with_val(prec, p.a.sqrt_ref());
    let mut count = 64usize;
    let mut coeffs = singular_coefficients(prec, count);
    let mut pow_a = Float::with_val(prec, 1);
    let term = |n: usize, coeffs: &[Float], pow_a: &Float| -> Result<ApComplex> {
        // (√a)ⁿ cₙ / (Γ(s/2)(s + n − 1))
        let g = if n % 2 == 1 {
            rgamma_over_shift(&z, (n as u64 - 1) / 2, prec).scale(&Float::with_val(prec, 0.5))
        } else {
            let d = s.add_real(&Float::with_val(prec, n as u64 - 1));
            if d.is_zero() {
                return Err(Error::Pole(crate::error::PoleInfo {
                    location: 1 - n as i64,
                    order: 1,
                }));
            }
            &rg / &d
        };
        Ok(g.scale(&Float::with_val(prec, &coeffs[n - 1] * pow_a)))
    };
    let mut sum = ApComplex::zero(prec);
    let mut n = 1usize;
    pow_a *= &sqrt_a;
    let mut t = term(1, &coeffs, &pow_a)?;
    // Odd terms before n = 2m + 1, m = ⌈−Re s/2⌉, carry 1/Γ(s/2)/(s/2 + k)
    // for k < m, which vanishes on the lattice and is tiny next to it; the
    // stopping tests start after them.
    let m = (-s.re.to_f64() / 2.0).max(0.0).ceil() as usize;
    let first_live = 2 * m + 1;
    let mut mg1 = f64::INFINITY;
    let mut mg2 = t.abs_log10();
    let reason;
    loop {
        if n < first_live {
            mg2 = f64::INFINITY;
        } else if mg2 + pref_log < tol {
            // The odd term that met the tolerance is kept.
            sum += &t;
            reason = TruncationReason::BelowEpsilon;
            break;
        } else if mg2 > mg1 {
            reason = TruncationReason::TermsIncreasing;
            break;
        }
        sum += &t;
        if n + 2 > coeffs.len() {
            count = coeffs.len() * 2;
            coeffs = singular_coefficients(prec, count);
        }
        n += 1;
        pow_a *= &sqrt_a;
        sum += &term(n, &coeffs, &pow_a)?;
        n += 1;
        pow_a *= &sqrt_a;
        t = term(n, &coeffs, &pow_a)?;
        mg1 = mg2;
        mg2 = t.abs_log10();
    }
    let error_log = match reason {
        TruncationReason::BelowEpsilon => {
            // First omitted odd term.
            let mut pa = pow_a.clone();
            pa *= &sqrt_a;
            pa *= &sqrt_a;
            if n + 2 > coeffs.len() {
                coeffs = singular_coefficients(prec, coeffs.len() * 2);
            }
            term(n + 2, &coeffs, &pa)?.abs_log10() + pref_log
        }
        _ => {
            let min_term = mg1 + pref_log;
            if min_term > target_log {
                return Err(Error::AsymptoticFailure {
                    min_term_log10: min_term,
                    tolerance_log10: target_log,
                });
            }
            min_term
        }
    };
    let value = &prefactor * &(&lead + &sum);
    let error_estimate = if error_log.is_finite() {
        Float::with_val(64, 10).pow_f64(error_log)
    } else {
        Float::new(64)
    };
    Ok(TermResult {
        value,
        terms_used: n,
        error_estimate,
        truncation_reason: reason,
        rigorous_bound: None,
    })
}

trait PowF64 {
    fn pow_f64(self, e: f64) -> Float;
}

impl PowF64 for Float {
    fn pow_f64(self, e: f64) -> Float {
        let p = self.prec();
        let l = Float::with_val(p, self.ln_ref()) * e;
        l.exp()
    }
}

/// `log10 |x|` helper re-exported for the engine's magnitude probe.
pub fn magnitude_log10(x: &ApComplex) -> f64 {
    float_log10(&x.abs())
}
