//! Numerical explorations of `Z`: identity checks, special values, real
//! zeros and extrema, the pole-free form `2Z(s)cos(πs/2)` and X-ray curves.

pub mod critical;
pub mod modular;
pub mod xray;

use rug::{Integer, Rational};

use crate::arith::euler_number;
use crate::complex::ApComplex;
use crate::engine::{pole_near, residue_closed_form, secondzeta, EvalOptions};
use crate::error::{Error, PoleInfo, Result};
use crate::specials::cos_pi;

pub use critical::{find_extremum_near, find_real_zero_near, z_real, CriticalKind, CriticalPoint};
pub use modular::{check_modular, check_modular_with, check_phi_equality, phi_closed, phi_integral, ModularCheck};
pub use xray::{trace_xray, Polyline, Region, XRayCurves};

/// `(−1)ⁿ (8 − E_{2n}) / 2^{2n+3}`.
pub fn special_value_exact(n: u32) -> Rational {
    let mut r = Rational::from((Integer::from(8), Integer::from(1))) - euler_number(2 * n);
    r /= Integer::from(1) << (2 * n + 3);
    if n % 2 == 1 {
        r = -r;
    }
    r
}

/// `Z(−2n)` through the four-term evaluation, next to its exact value.
pub fn special_value_check(n: u32, digits: u32) -> Result<(ApComplex, Rational)> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let prec = crate::mpcontext::digits_to_bits(digits + 10);
    let s = ApComplex::from_real(rug::Float::with_val(prec, -2 * n as i64));
    let r = secondzeta(&s, digits, None, &EvalOptions::default())?;
    Ok((r.z, special_value_exact(n)))
}

/// `2 Z(s) cos(πs/2)`, continued through the simple poles at `s = 1 − 2n`
/// by its limit `−π (−1)ⁿ Res_{1−2n} Z`.
pub fn z_cos_form(s: &ApComplex, digits: u32) -> Result<ApComplex> {
    let prec = crate::mpcontext::digits_to_bits(digits + 10);
    if let Some(p) = pole_near(s, -(digits as f64)) {
        if p.location == 1 {
            return Err(Error::Pole(PoleInfo { location: 1, order: 2 }));
        }
        let n = ((1 - p.location) / 2) as u32;
        let res = residue_closed_form(n, prec);
        let mut v = res * rug::Float::with_val(prec, rug::float::Constant::Pi);
        if n.is_multiple_of(2) {
            v = -v;
        }
        return Ok(ApComplex::from_real(v));
    }
    let z = secondzeta(s, digits, None, &EvalOptions::default())?.z;
    let half = s.with_prec(prec).scale(&rug::Float::with_val(prec, 0.5));
    let c = cos_pi(&half, prec);
    Ok((&z * &c).scale(&rug::Float::with_val(prec, 2)))
}
