//! Ordinates `γₙ` of the nontrivial zeros of ζ on the critical line.
//!
//! Zeros are bracketed by sign changes of the Hardy function at
//! Gram-point-guided nodes, and a block of brackets is accepted only when its
//! size matches the count `N(T)` at the block's upper Gram point. Brackets are
//! then refined on demand to any precision (Illinois, then Newton with a
//! central-difference derivative and precision doubling).

pub mod cache;
pub mod count;
pub mod hardy;

use std::sync::{OnceLock, RwLock};

use rayon::prelude::*;
use rug::Float;

pub use cache::{load_cache, load_cache_for, save_cache};
pub use count::{count_estimate, count_zeros, gram_point, CountEstimate};
pub use hardy::{hardy_z, hardy_z_prec, theta, zeta};

use crate::error::{Error, Result};
use crate::format::format_sig;
use crate::mpcontext::{digits_to_bits, PrecisionContext};

/// Digits used while scanning for sign changes.
const SCAN_DIGITS: u32 = 20;
const MAX_SUBDIVISION: u32 = 64;
/// Stored digits relative to the largest request.
const CACHE_HEADROOM: f64 = 1.2;
/// The scan starts below the first ordinate.
const SCAN_START: f64 = 10.0;

#[derive(Debug, Clone)]
struct Entry {
    lo: f64,
    hi: f64,
    /// Canonical decimal-rounded ordinate and its significant digits.
    value: Option<(Float, u32)>,
    /// The sign change at ±10^(−digits+2) around `value` has been checked.
    verified: bool,
}

#[derive(Debug, Default)]
struct State {
    entries: Vec<Entry>,
    certified_through: f64,
    next_gram: i64,
    /// Ordinates read from a cache file, waiting for their brackets.
    loaded: Vec<(Float, u32)>,
}

/// Shared, append-only table of certified zeros.
#[derive(Debug, Default)]
pub struct ZeroTable {
    state: RwLock<State>,
}

impl ZeroTable {
    pub fn new() -> Self {
        ZeroTable {
            state: RwLock::new(State {
                next_gram: -1,
                certified_through: SCAN_START,
                ..Default::default()
            }),
        }
    }

    /// Process-wide table used when no table is supplied explicitly.
    pub fn global() -> &'static ZeroTable {
        static TABLE: OnceLock<ZeroTable> = OnceLock::new();
        TABLE.get_or_init(ZeroTable::new)
    }

    /// Table seeded with previously computed ordinates; each is checked against
    /// its certified bracket and its own sign change before being served.
    pub(crate) fn from_loaded(values: Vec<(Float, u32)>) -> Self {
        let t = ZeroTable::new();
        t.state.write().unwrap().loaded = values;
        t
    }

    /// Largest `T` up to which the stored brackets are certified complete.
    pub fn certified_through(&self) -> f64 {
        self.state.read().unwrap().certified_through
    }

    /// Number of certified brackets.
    pub fn certified_count(&self) -> usize {
        self.state.read().unwrap().entries.len()
    }

    /// Number of ordinates available without computation (refined or loaded).
    pub fn len(&self) -> usize {
        let g = self.state.read().unwrap();
        let refined = g.entries.iter().take_while(|e| e.value.is_some()).count();
        refined.max(g.loaded.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Leading stored ordinates and the smallest digit count among them.
    pub fn stored(&self) -> (Vec<Float>, u32) {
        let g = self.state.read().unwrap();
        let refined: Vec<&(Float, u32)> = g.entries.iter().map_while(|e| e.value.as_ref()).collect();
        let list: Vec<&(Float, u32)> = if refined.len() >= g.loaded.len() {
            refined
        } else {
            g.loaded.iter().collect()
        };
        let digits = list.iter().map(|v| v.1).min().unwrap_or(0);
        (list.into_iter().map(|v| v.0.clone()).collect(), digits)
    }

    /// Extend certification until at least `n` zeros are bracketed.
    pub fn certify_to(&self, n: usize) -> Result<()> {
        loop {
            let mut g = self.state.write().unwrap();
            if g.entries.len() >= n {
                return Ok(());
            }
            let have = g.entries.len();
            // N(g_m) ≈ m + 1; overshoot a little to amortize the counting.
            let want = n.max(have + 8) + 4;
            let mut end = (want as i64 - 1).max(g.next_gram + 2);
            let start_t = g.certified_through;
            let block = loop {
                match scan_block(start_t, g.next_gram, end, have) {
                    Ok(b) => break b,
                    Err(Error::Precision(_)) => end += 1,
                    Err(e) => return Err(e),
                }
                if end > g.next_gram + 100_000 {
                    return Err(Error::Certification("could not find a countable Gram point".into()));
                }
            };
            for (i, (lo, hi)) in block.brackets.into_iter().enumerate() {
                let idx = have + i;
                let mut entry = Entry {
                    lo,
                    hi,
                    value: None,
                    verified: false,
                };
                if let Some((v, d)) = g.loaded.get(idx) {
                    let vf = v.to_f64();
                    if !(vf > lo && vf < hi) {
                        return Err(Error::Certification(format!(
                            "cached ordinate #{} = {} lies outside its bracket ({lo}, {hi})",
                            idx + 1,
                            format_sig(v, 20)
                        )));
                    }
                    entry.value = Some((v.clone(), *d));
                }
                g.entries.push(entry);
            }
            g.certified_through = block.t_end;
            g.next_gram = block.gram_end;
        }
    }

    /// `γₙ` to the context's working digits; 1-based.
    pub fn ordinate(&self, n: usize, ctx: &PrecisionContext) -> Result<Float> {
        let v = self.ordinates(n, ctx.work_digits())?;
        Ok(Float::with_val(ctx.bits(), &v[n - 1]))
    }

    /// `γ₁ … γ_count`, each correct to `digits` significant digits.
    pub fn ordinates(&self, count: usize, digits: u32) -> Result<Vec<Float>> {
        if count == 0 {
            return Ok(Vec::new());
        }
        self.certify_to(count)?;
        let store_digits = ((digits as f64) * CACHE_HEADROOM).ceil() as u32;
        let jobs: Vec<(usize, Entry)> = {
            let g = self.state.read().unwrap();
            g.entries[..count]
                .iter()
                .enumerate()
                .filter(|(_, e)| !matches!(&e.value, Some((_, d)) if *d >= digits) || !e.verified)
                .map(|(i, e)| (i, e.clone()))
                .collect()
        };
        let results: Vec<Result<(usize, Float, u32)>> = jobs
            .into_par_iter()
            .map(|(i, e)| match &e.value {
                Some((v, d)) if *d >= digits => {
                    verify_sign_change(v, *d, i + 1)?;
                    Ok((i, v.clone(), *d))
                }
                _ => {
                    let v = refine(e.lo, e.hi, e.value.as_ref(), store_digits, i + 1)?;
                    Ok((i, v, store_digits))
                }
            })
            .collect();
        let mut g = self.state.write().unwrap();
        for r in results {
            let (i, v, d) = r?;
            let e = &mut g.entries[i];
            let better = match &e.value {
                Some((_, old)) => d >= *old,
                None => true,
            };
            if better {
                e.value = Some((v, d));
            }
            e.verified = true;
        }
        Ok(g.entries[..count]
            .iter()
            .map(|e| e.value.as_ref().expect("refined above").0.clone())
            .collect())
    }
}

/// `γₙ` from the process-wide table.
pub fn zero_ordinate(n: usize, ctx: &PrecisionContext) -> Result<Float> {
    if n == 0 {
        return Err(Error::InvalidArgument("zero indices start at 1".into()));
    }
    ZeroTable::global().ordinate(n, ctx)
}

struct Block {
    brackets: Vec<(f64, f64)>,
    t_end: f64,
    gram_end: i64,
}

/// Sign changes of Hardy Z on `(start_t, g_end]`, subdivided until their
/// number matches `N(g_end) − have`.
fn scan_block(start_t: f64, gram_start: i64, gram_end: i64, have: usize) -> Result<Block> {
    let prec = digits_to_bits(SCAN_DIGITS);
    let ctx = PrecisionContext::new(SCAN_DIGITS)?;
    let t_end = gram_point(gram_end);
    let expected = count_zeros(&Float::with_val(prec, t_end), &ctx)? as usize;
    if expected < have {
        return Err(Error::Certification(format!(
            "N({t_end}) = {expected} is below the {have} zeros already certified"
        )));
    }
    let mut knots = vec![start_t];
    for j in gram_start..=gram_end {
        let g = gram_point(j);
        if g > start_t + 1e-9 {
            knots.push(g);
        }
    }
    let mut sub = 2u32;
    loop {
        let mut nodes = Vec::new();
        for w in knots.windows(2) {
            for k in 0..sub {
                nodes.push(w[0] + (w[1] - w[0]) * k as f64 / sub as f64);
            }
        }
        nodes.push(t_end);
        let signs: Vec<bool> = nodes
            .par_iter()
            .map(|&t| hardy_z_prec(&Float::with_val(prec, t), prec).map(|v| v.is_sign_negative()))
            .collect::<Result<_>>()?;
        let brackets: Vec<(f64, f64)> = (1..nodes.len())
            .filter(|&i| signs[i] != signs[i - 1])
            .map(|i| (nodes[i - 1], nodes[i]))
            .collect();
        let total = have + brackets.len();
        if total == expected {
            return Ok(Block {
                brackets,
                t_end,
                gram_end,
            });
        }
        if total > expected {
            return Err(Error::Certification(format!(
                "{total} sign changes below {t_end} but N(T) = {expected}"
            )));
        }
        sub *= 2;
        if sub > MAX_SUBDIVISION {
            return Err(Error::Certification(format!(
                "only {total} of {expected} zeros below {t_end} found at the finest subdivision"
            )));
        }
    }
}

fn integer_digits(x: f64) -> i32 {
    x.abs().log10().floor() as i32 + 1
}

fn hz(t: &Float, digits: u32) -> Result<Float> {
    let prec = digits_to_bits(digits);
    hardy_z_prec(&Float::with_val(prec, t), prec)
}

/// Refine the zero in `(lo, hi)` to `digits` significant digits, returning
/// the canonical decimal-rounded value.
fn refine(lo: f64, hi: f64, start: Option<&(Float, u32)>, digits: u32, index: usize) -> Result<Float> {
    let intd = integer_digits(hi).max(1) as u32;
    let sig = digits + 3;
    let (mut x, mut have) = match start {
        Some((v, d)) if *d >= 12 => (v.clone(), *d),
        _ => (illinois(lo, hi)?, 14),
    };
    let mut final_pass = false;
    loop {
        let p = if have >= sig {
            final_pass = true;
            sig
        } else {
            (2 * have).min(sig)
        };
        let eval_digits = p + 8;
        let prec = digits_to_bits(eval_digits);
        let xw = Float::with_val(prec, &x);
        let h_exp = (p.saturating_sub(intd)) / 2 + 1;
        let h = Float::with_val(prec, Float::parse(format!("1e-{h_exp}")).unwrap());
        let f0 = hz(&xw, eval_digits)?;
        let fp = hz(&Float::with_val(prec, &xw + &h), eval_digits)?;
        let fm = hz(&Float::with_val(prec, &xw - &h), eval_digits)?;
        let mut d = Float::with_val(prec, &fp - &fm);
        d /= Float::with_val(prec, &h * 2u32);
        if d.is_zero() {
            return Err(Error::Certification(format!("flat Hardy Z at zero #{index}")));
        }
        let step = Float::with_val(prec, &f0 / &d);
        x = Float::with_val(prec, &xw - &step);
        have = p;
        if final_pass {
            break;
        }
    }
    let xf = x.to_f64();
    if !(xf > lo && xf < hi) {
        return Err(Error::Certification(format!(
            "Newton left the bracket ({lo}, {hi}) of zero #{index}"
        )));
    }
    let canonical = canonicalize(&x, digits);
    verify_sign_change(&canonical, digits, index)?;
    Ok(canonical)
}

/// Round to `digits` significant decimal digits and re-read, so that the
/// stored value is exactly what a cache file would hold.
pub(crate) fn canonicalize(x: &Float, digits: u32) -> Float {
    let s = format_sig(x, digits as usize);
    Float::with_val(digits_to_bits(digits), Float::parse(&s).expect("own output parses"))
}

/// Hardy Z changes sign across `[x − δ, x + δ]`, `δ = ½·10^(−digits+2)`
/// measured in units of the leading digit.
fn verify_sign_change(x: &Float, digits: u32, index: usize) -> Result<()> {
    let intd = integer_digits(x.to_f64());
    let eval_digits = digits + 6;
    let prec = digits_to_bits(eval_digits);
    let exp = intd - digits as i32 + 2;
    let delta = Float::with_val(prec, Float::parse(format!("5e{}", exp - 1)).unwrap());
    let a = hz(&Float::with_val(prec, x - &delta), eval_digits)?;
    let b = hz(&Float::with_val(prec, x + &delta), eval_digits)?;
    if a.is_sign_negative() == b.is_sign_negative() || a.is_zero() || b.is_zero() {
        return Err(Error::Certification(format!(
            "no sign change of Hardy Z around zero #{index} at {}",
            format_sig(x, 25)
        )));
    }
    Ok(())
}

/// Illinois-modified regula falsi to about 14 significant digits.
fn illinois(lo: f64, hi: f64) -> Result<Float> {
    let digits = SCAN_DIGITS + 6;
    let prec = digits_to_bits(digits);
    let f = |t: f64| -> Result<f64> { Ok(hz(&Float::with_val(prec, t), digits)?.to_f64()) };
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a)?, f(b)?);
    if fa.signum() == fb.signum() {
        return Err(Error::Certification(format!("bracket ({lo}, {hi}) lost its sign change")));
    }
    let mut side = 0i8;
    for _ in 0..200 {
        let c = (a * fb - b * fa) / (fb - fa);
        if (b - a).abs() < 1e-14 * b.abs() {
            break;
        }
        let fc = f(c)?;
        if fc == 0.0 {
            return Ok(Float::with_val(prec, c));
        }
        if fc.signum() == fb.signum() {
            b = c;
            fb = fc;
            if side == -1 {
                fa /= 2.0;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb /= 2.0;
            }
            side = 1;
        }
    }
    Ok(Float::with_val(prec, 0.5 * (a + b)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_two_ordinates() {
        let t = ZeroTable::new();
        let ctx = PrecisionContext::with_policy(30, 0, 10_000).unwrap();
        let g1 = t.ordinate(1, &ctx).unwrap();
        assert_eq!(format_sig(&g1, 30), "14.1347251417346937904572519836");
        let g2 = t.ordinate(2, &ctx).unwrap();
        assert_eq!(format_sig(&g2, 12), "21.0220396388");
    }

    #[test]
    fn twenty_nine_zeros_below_one_hundred() {
        let t = ZeroTable::new();
        let v = t.ordinates(30, 15).unwrap();
        assert!(v[28] < 100.0 && v[29] > 100.0);
        assert!(v.windows(2).all(|w| w[0] < w[1]));
        assert!(v[0] > 14.0 && v[0] < 14.2);
        assert!(t.certified_through() > v[29].to_f64() - 1e-9 || t.certified_count() >= 30);
    }

    #[test]
    fn counts_just_above_each_ordinate() {
        let t = ZeroTable::new();
        let v = t.ordinates(12, 12).unwrap();
        let ctx = PrecisionContext::new(15).unwrap();
        for (i, g) in v.iter().enumerate() {
            let above = Float::with_val(80, g + 1e-6);
            assert_eq!(count_zeros(&above, &ctx).unwrap(), i as u64 + 1);
        }
    }

    #[test]
    fn higher_precision_request_refines_existing_values() {
        let t = ZeroTable::new();
        let low = t.ordinates(3, 20).unwrap();
        let high = t.ordinates(3, 50).unwrap();
        for (a, b) in low.iter().zip(&high) {
            assert!(Float::with_val(200, a - b).abs().to_f64() < 1e-19);
        }
        let (_, d) = t.stored();
        assert_eq!(d, 60);
    }
}
