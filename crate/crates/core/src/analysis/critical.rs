//! Real zeros and extrema of `Z` on the real axis.
//!
//! Near the odd negative integers `Z` has a simple pole next to a zero (and,
//! at −5 and −9, a pair of extrema), all packed within `10^-3` or less. Scans
//! therefore sample geometrically towards every integer in the window as well
//! as on a uniform grid, and never accept a bracket that straddles a pole.

use rayon::prelude::*;
use rug::Float;
use serde::Serialize;

use crate::complex::{float_log10, ApComplex};
use crate::engine::{secondzeta, EvalOptions};
use crate::error::{Error, Result};
use crate::format::format_sig;
use crate::mpcontext::digits_to_bits;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CriticalKind {
    ZeroOfZ,
    ExtremumMin,
    ExtremumMax,
    DerivativeZero,
}

#[derive(Debug, Clone)]
pub struct CriticalPoint {
    pub kind: CriticalKind,
    /// Carried with more digits than requested; round for display.
    pub location: Float,
    pub value: Float,
    pub digits: u32,
}

/// Digits used while scanning for brackets.
const SCAN_DIGITS: u32 = 20;
const WINDOW: f64 = 0.5;
const GRID_STEP: f64 = 0.02;
/// Geometric approach to integers: offsets 10^-1 … 10^-GEOMETRIC_DEPTH.
const GEOMETRIC_DEPTH: i32 = 14;
const MAX_ILLINOIS: usize = 400;

/// `Z(x)` for real `x`, to `digits` digits.
pub fn z_real(x: &Float, digits: u32) -> Result<Float> {
    let s = ApComplex::from_real(x.clone());
    Ok(secondzeta(&s, digits, None, &EvalOptions::default())?.z.re)
}

fn is_pole(m: i64) -> bool {
    m == 1 || (m < 0 && m % 2 != 0)
}

/// Largest integer pole strictly between `lo` and `hi`, if any.
fn pole_between(lo: f64, hi: f64) -> bool {
    let mut m = lo.ceil() as i64;
    while (m as f64) <= hi {
        if is_pole(m) && (m as f64) > lo && (m as f64) < hi {
            return true;
        }
        m += 1;
    }
    false
}

fn scan_points(x0: f64) -> Vec<Float> {
    let prec = digits_to_bits(SCAN_DIGITS + 20);
    let mut pts: Vec<Float> = Vec::new();
    let n = (WINDOW / GRID_STEP).round() as i64;
    for k in -n..=n {
        let x = x0 + k as f64 * GRID_STEP;
        if !is_pole(x.round() as i64) || (x - x.round()).abs() > 1e-12 {
            pts.push(Float::with_val(prec, x));
        }
    }
    let lo = (x0 - WINDOW).ceil() as i64;
    let hi = (x0 + WINDOW).floor() as i64;
    for m in lo..=hi {
        let mf = Float::with_val(prec, m);
        if !is_pole(m) {
            pts.push(mf.clone());
        }
        for k in 1..=GEOMETRIC_DEPTH {
            let off = crate::format::parse_float(&format!("1e-{k}"), prec).expect("literal");
            pts.push(Float::with_val(prec, &mf + &off));
            pts.push(Float::with_val(prec, &mf - &off));
        }
    }
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    pts.dedup();
    pts
}

/// Sign-change brackets of `f` over the sorted `pts`, skipping intervals that
/// contain a pole; nearest to `x0` first.
fn brackets<F>(pts: &[Float], x0: f64, f: F) -> Result<Vec<(Float, Float, Float, Float)>>
where
    F: Fn(&Float) -> Result<Float> + Sync,
{
    let vals: Vec<Result<Float>> = pts.par_iter().map(&f).collect();
    let vals: Vec<Float> = vals.into_iter().collect::<Result<_>>()?;
    let mut out = Vec::new();
    for i in 1..pts.len() {
        let (a, b) = (&pts[i - 1], &pts[i]);
        if pole_between(a.to_f64(), b.to_f64()) {
            continue;
        }
        if vals[i - 1].is_sign_negative() != vals[i].is_sign_negative() {
            out.push((a.clone(), b.clone(), vals[i - 1].clone(), vals[i].clone()));
        }
    }
    out.sort_by(|p, q| {
        let dp = (0.5 * (p.0.to_f64() + p.1.to_f64()) - x0).abs();
        let dq = (0.5 * (q.0.to_f64() + q.1.to_f64()) - x0).abs();
        dp.partial_cmp(&dq).expect("finite")
    });
    Ok(out)
}

/// Illinois iteration on a bracket until the bracket is narrower than
/// `10^-width_digits` relative and `|f| < 10^value_log10`.
fn illinois<F>(
    f: F,
    mut a: Float,
    mut b: Float,
    mut fa: Float,
    mut fb: Float,
    width_digits: u32,
    value_log10: f64,
) -> Result<(Float, Float)>
where
    F: Fn(&Float) -> Result<Float>,
{
    let prec = a.prec().max(b.prec());
    let mut side = 0i8;
    let mut best = (a.clone(), fa.clone());
    for _ in 0..MAX_ILLINOIS {
        let width = Float::with_val(prec, &b - &a).abs();
        let scale = float_log10(&a.clone().abs()).max(0.0);
        let narrow = float_log10(&width) < scale - width_digits as f64;
        if fa.clone().abs() < best.1.clone().abs() {
            best = (a.clone(), fa.clone());
        }
        if fb.clone().abs() < best.1.clone().abs() {
            best = (b.clone(), fb.clone());
        }
        if narrow && float_log10(&best.1.clone().abs()) < value_log10 {
            return Ok(best);
        }
        if narrow && width.is_zero() {
            return Ok(best);
        }
        // Regula falsi point, falling back to bisection when it degenerates.
        let denom = Float::with_val(prec, &fb - &fa);
        let mut c = if denom.is_zero() {
            Float::with_val(prec, &a + &b) / 2u32
        } else {
            let t = Float::with_val(prec, &fb * Float::with_val(prec, &b - &a)) / &denom;
            Float::with_val(prec, &b - &t)
        };
        if !(c > a.clone().min(&b) && c < a.clone().max(&b)) {
            c = Float::with_val(prec, &a + &b) / 2u32;
        }
        let fc = f(&c)?;
        if fc.is_zero() {
            return Ok((c, fc));
        }
        if fc.is_sign_negative() == fb.is_sign_negative() {
            b = c;
            fb = fc;
            if side == -1 {
                fa /= 2u32;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb /= 2u32;
            }
            side = 1;
        }
    }
    Err(Error::Precision("root refinement did not converge".into()))
}

fn lift(x: &Float, prec: u32) -> Float {
    Float::with_val(prec, x)
}

/// Real zero of `Z` near `x0`, refined to `digits` significant digits.
pub fn find_real_zero_near(x0: f64, digits: u32) -> Result<CriticalPoint> {
    let pts = scan_points(x0);
    let found = brackets(&pts, x0, |x| z_real(x, SCAN_DIGITS))?;
    let Some((a, b, fa, fb)) = found.into_iter().next() else {
        return Err(Error::NoBracket(format!("{x0}")));
    };
    // Coarse pass at scan precision, then the full pass.
    let (c, _) = illinois(|x| z_real(x, SCAN_DIGITS), a, b, fa, fb, SCAN_DIGITS.min(digits).saturating_sub(6), f64::INFINITY)?;
    let eval_digits = digits + 6;
    let prec = digits_to_bits(eval_digits + 24);
    let fz = |x: &Float| z_real(x, eval_digits);
    let (lo, hi) = expand_bracket(&fz, &lift(&c, prec), SCAN_DIGITS.min(digits).saturating_sub(8), prec)?;
    let (flo, fhi) = (fz(&lo)?, fz(&hi)?);
    let (loc, _) = illinois(fz, lo, hi, flo, fhi, digits + 3, -(digits as f64) - 1.0)?;
    let value = z_real(&loc, digits + 10)?;
    Ok(CriticalPoint {
        kind: CriticalKind::ZeroOfZ,
        location: loc,
        value,
        digits,
    })
}

/// A sign-change bracket of `f` around `c`, starting at relative width
/// `10^-start_digits` and widening.
fn expand_bracket<F>(f: &F, c: &Float, start_digits: u32, prec: u32) -> Result<(Float, Float)>
where
    F: Fn(&Float) -> Result<Float>,
{
    let cf = c.to_f64();
    let scale = cf.abs().max(1.0);
    // A side never reaches past half the distance to the nearest pole on it.
    let (pl, pr) = neighbouring_poles(cf);
    let (dl, dr) = ((cf - pl) / 2.0, (pr - cf) / 2.0);
    let mut d = scale * 10f64.powi(-(start_digits as i32));
    for _ in 0..30 {
        let lo = Float::with_val(prec, c - d.min(dl));
        let hi = Float::with_val(prec, c + d.min(dr));
        if !pole_between(lo.to_f64(), hi.to_f64()) {
            let (fl, fh) = (f(&lo)?, f(&hi)?);
            if fl.is_sign_negative() != fh.is_sign_negative() {
                return Ok((lo, hi));
            }
        }
        d *= 10.0;
    }
    Err(Error::NoBracket(format!("lost the bracket near {}", format_sig(c, 20))))
}

/// Central difference `(Z(x+h) − Z(x−h)) / 2h`.
fn derivative(x: &Float, h: &Float, digits: u32) -> Result<Float> {
    let prec = x.prec();
    let p = z_real(&Float::with_val(prec, x + h), digits)?;
    let m = z_real(&Float::with_val(prec, x - h), digits)?;
    Ok(Float::with_val(prec, &p - &m) / Float::with_val(prec, h * 2u32))
}

fn step(work_digits: u32, prec: u32) -> Float {
    let k = (work_digits / 3).max(2);
    crate::format::parse_float(&format!("1e-{k}"), prec).expect("literal")
}

/// Nearest pole of `Z` below and above `x`.
fn neighbouring_poles(x: f64) -> (f64, f64) {
    let mut lo = x.floor() as i64;
    while !is_pole(lo) {
        lo -= 1;
    }
    let mut hi = x.ceil() as i64;
    if hi as f64 == x {
        hi += 1;
    }
    while !is_pole(hi) {
        hi += 1;
        if hi > 1 {
            return (lo as f64, f64::INFINITY);
        }
    }
    (lo as f64, hi as f64)
}

/// Extremum of `Z` near `x0`: a zero of the central-difference derivative,
/// refined to `digits` significant digits and classified by the second
/// difference.
pub fn find_extremum_near(x0: f64, digits: u32) -> Result<CriticalPoint> {
    let (pl, ph) = neighbouring_poles(x0);
    let dist = (x0 - pl).min(ph - x0);
    if dist <= 0.0 {
        return Err(Error::InvalidArgument(format!("{x0} is a pole")));
    }
    // Coarse bracket at scan precision.
    let scan_work = SCAN_DIGITS + 10;
    let sprec = digits_to_bits(scan_work + 10);
    let sh = step(scan_work, sprec);
    let dz = |x: &Float| derivative(x, &sh, scan_work);
    let delta = (dist / 8.0).min(1e-3);
    let mut pts = vec![Float::with_val(sprec, x0)];
    let mut r = delta;
    while r < WINDOW {
        for x in [x0 - r, x0 + r] {
            if x > pl && x < ph && (x - pl).min(ph - x) > 1e-12 {
                pts.push(Float::with_val(sprec, x));
            }
        }
        r *= 1.6;
    }
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let Some((a, b, fa, fb)) = brackets(&pts, x0, dz)?.into_iter().next() else {
        return Err(Error::NoBracket(format!("no derivative sign change near {x0}")));
    };
    let (c, _) = illinois(dz, a, b, fa, fb, 12, f64::INFINITY)?;

    // Full precision: Z to W digits, step 10^-(W/3).
    let work = (digits * 3 / 2 + 12).max(scan_work);
    let prec = digits_to_bits(work + 10);
    let h = step(work, prec);
    let dz_full = |x: &Float| derivative(x, &h, work);
    let (lo, hi) = expand_bracket(&dz_full, &lift(&c, prec), 11, prec)?;
    let (flo, fhi) = (dz_full(&lo)?, dz_full(&hi)?);
    let (loc, _) = illinois(dz_full, lo, hi, flo, fhi, digits + 2, f64::INFINITY)?;

    let value = z_real(&loc, digits + 6)?;
    let h2 = crate::format::parse_float(&format!("1e-{}", (work / 4).max(3)), prec)?;
    let zp = z_real(&Float::with_val(prec, &loc + &h2), work)?;
    let zm = z_real(&Float::with_val(prec, &loc - &h2), work)?;
    let second = Float::with_val(prec, &zp + &zm) - Float::with_val(prec, &value * 2u32);
    let kind = if second.is_zero() {
        CriticalKind::DerivativeZero
    } else if second.is_sign_positive() {
        CriticalKind::ExtremumMin
    } else {
        CriticalKind::ExtremumMax
    };
    Ok(CriticalPoint {
        kind,
        location: loc,
        value,
        digits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_near_minus_two() {
        let p = find_real_zero_near(-2.0, 18).unwrap();
        assert_eq!(format_sig(&p.location, 18), "-1.87934753430942316");
        assert!(float_log10(&p.value.clone().abs()) < -16.0);
    }

    #[test]
    fn pole_between_skips_odd_negatives() {
        assert!(pole_between(-5.1, -4.9));
        assert!(!pole_between(-4.1, -3.9 + 0.8));
        assert!(pole_between(0.5, 1.5));
        assert!(!pole_between(-2.5, -1.5));
    }
}
