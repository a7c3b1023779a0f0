//! Precision bookkeeping shared by every numerical routine.
//!
//! Callers speak in decimal digits. A [`PrecisionContext`] records the digits
//! the caller wants back (`target_digits`) and the digits the arithmetic is
//! actually carried at (`work_digits`). The four terms of the decomposition
//! are routinely thirty orders of magnitude larger than their sum, so the
//! working precision is raised by the base-10 magnitude of the largest
//! intermediate before anything is summed; see [`PrecisionContext::escalate`].

use rug::ops::Pow;
use rug::Float;

use crate::error::{Error, Result};

pub const DEFAULT_GUARD_DIGITS: u32 = 10;
pub const DEFAULT_MAX_DIGITS: u32 = 10_000;
pub const MAX_DIGITS_ENV: &str = "SECZETA_MAX_DIGITS";

const LOG2_10: f64 = std::f64::consts::LOG2_10;

/// Binary precision used internally for `digits` decimal digits.
pub fn digits_to_bits(digits: u32) -> u32 {
    (digits as f64 * LOG2_10).ceil() as u32 + 4
}

/// Decimal digits represented by `bits` of binary precision (inverse of
/// [`digits_to_bits`], rounded down).
pub fn bits_to_digits(bits: u32) -> u32 {
    ((bits.saturating_sub(4)) as f64 / LOG2_10).floor() as u32
}

/// Hard cap on working digits: `SECZETA_MAX_DIGITS` when set and valid,
/// otherwise [`DEFAULT_MAX_DIGITS`].
pub fn max_digits_from_env() -> u32 {
    std::env::var(MAX_DIGITS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<u32>().ok())
        .filter(|&v| v > 0)
        .unwrap_or(DEFAULT_MAX_DIGITS)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrecisionContext {
    target_digits: u32,
    work_digits: u32,
    guard_digits: u32,
    max_digits: u32,
    epsilon: Float,
}

impl PrecisionContext {
    /// Context with the default guard and the cap from the environment.
    pub fn new(target_digits: u32) -> Result<Self> {
        Self::with_policy(target_digits, DEFAULT_GUARD_DIGITS, max_digits_from_env())
    }

    pub fn with_policy(target_digits: u32, guard_digits: u32, max_digits: u32) -> Result<Self> {
        if target_digits == 0 {
            return Err(Error::InvalidArgument("target digits must be positive".into()));
        }
        Self::build(target_digits, target_digits + guard_digits, guard_digits, max_digits)
    }

    fn build(target: u32, work: u32, guard: u32, cap: u32) -> Result<Self> {
        if work > cap {
            return Err(Error::InfeasiblePrecision {
                requested: work,
                cap,
            });
        }
        let bits = digits_to_bits(work);
        let epsilon = Float::with_val(bits, 10).pow(-(work as i32));
        Ok(PrecisionContext {
            target_digits: target,
            work_digits: work,
            guard_digits: guard,
            max_digits: cap,
            epsilon,
        })
    }

    /// Raise the working precision so that intermediates of size
    /// `10^magnitude_log10` still leave `target_digits + guard_digits` digits
    /// below the unit place. Never lowers the current working precision.
    pub fn escalate(&self, magnitude_log10: f64) -> Result<Self> {
        let extra = if magnitude_log10.is_finite() && magnitude_log10 > 0.0 {
            magnitude_log10.ceil() as u32
        } else if magnitude_log10 == f64::INFINITY {
            return Err(Error::InfeasiblePrecision {
                requested: u32::MAX,
                cap: self.max_digits,
            });
        } else {
            0
        };
        let required = self.target_digits + extra + self.guard_digits;
        if required <= self.work_digits {
            return Ok(self.clone());
        }
        Self::build(self.target_digits, required, self.guard_digits, self.max_digits)
    }

    /// Same policy, different target; the working digits are recomputed from
    /// scratch (target plus guard).
    pub fn retarget(&self, target_digits: u32) -> Result<Self> {
        Self::with_policy(target_digits, self.guard_digits, self.max_digits)
    }

    pub fn target_digits(&self) -> u32 {
        self.target_digits
    }

    pub fn work_digits(&self) -> u32 {
        self.work_digits
    }

    pub fn guard_digits(&self) -> u32 {
        self.guard_digits
    }

    pub fn max_digits(&self) -> u32 {
        self.max_digits
    }

    /// `10^-work_digits`.
    pub fn epsilon(&self) -> &Float {
        &self.epsilon
    }

    pub fn bits(&self) -> u32 {
        digits_to_bits(self.work_digits)
    }

    /// Base-10 logarithm of the epsilon, i.e. `-work_digits`.
    pub fn epsilon_log10(&self) -> f64 {
        -(self.work_digits as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(target: u32) -> PrecisionContext {
        PrecisionContext::with_policy(target, DEFAULT_GUARD_DIGITS, DEFAULT_MAX_DIGITS).unwrap()
    }

    #[test]
    fn escalate_examples() {
        // log10 of the printed Re(E) = 1.8001556e31 at s = 0.5+100i, a = 0.015.
        let mag = 18001556143696111321715567598902.961_f64.log10();
        assert!((mag - 31.2553).abs() < 1e-3);
        assert_eq!(ctx(15).escalate(mag).unwrap().work_digits(), 57);
        assert_eq!(ctx(15).escalate(0.0).unwrap().work_digits(), 25);
        assert_eq!(ctx(15).escalate(-5.0).unwrap().work_digits(), 25);
    }

    #[test]
    fn escalate_is_idempotent() {
        let once = ctx(15).escalate(31.3).unwrap();
        let twice = once.escalate(31.3).unwrap();
        assert_eq!(once, twice);
        assert_eq!(once.escalate(3.0).unwrap().work_digits(), 57);
    }

    #[test]
    fn epsilon_matches_work_digits() {
        let c = ctx(20);
        assert_eq!(c.work_digits(), 30);
        let expected = Float::with_val(c.bits(), Float::parse("1e-30").unwrap());
        assert_eq!(*c.epsilon(), expected);
        assert_eq!(c.bits(), 104);
    }

    #[test]
    fn cap_is_enforced() {
        let c = PrecisionContext::with_policy(15, 10, 40).unwrap();
        match c.escalate(31.0) {
            Err(Error::InfeasiblePrecision { requested, cap }) => {
                assert_eq!(requested, 56);
                assert_eq!(cap, 40);
            }
            other => panic!("expected cap error, got {other:?}"),
        }
        assert!(PrecisionContext::with_policy(100, 10, 20).is_err());
    }

    #[test]
    fn zero_target_rejected() {
        assert!(PrecisionContext::with_policy(0, 10, 100).is_err());
    }

    #[test]
    fn monotone_in_target() {
        let mut last = 0;
        for t in 1..200 {
            let w = ctx(t).escalate(12.5).unwrap().work_digits();
            assert!(w >= last);
            last = w;
        }
    }

    #[test]
    fn bit_conversion_round_trip() {
        for d in 1..500 {
            assert!(bits_to_digits(digits_to_bits(d)) >= d);
        }
    }
}
