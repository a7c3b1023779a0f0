//! Decimal rendering and the JSON record types. Every numeric field is a
//! decimal string; key order is the struct field order.

use rug::ops::Pow;
use rug::Float;
use serde::{Deserialize, Serialize};

use seczeta::complex::float_log10;
use seczeta::format::{format_fixed, format_sig};
use seczeta::ApComplex;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonComplex {
    pub re: String,
    pub im: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonTerms {
    #[serde(rename = "A")]
    pub main: JsonComplex,
    #[serde(rename = "P")]
    pub prime: JsonComplex,
    #[serde(rename = "E")]
    pub exponential: JsonComplex,
    #[serde(rename = "S")]
    pub singular: JsonComplex,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalJson {
    pub s: JsonComplex,
    pub a: String,
    pub digits: u32,
    pub z: JsonComplex,
    pub terms: JsonTerms,
    pub zeros_used: usize,
    pub lambdas_used: usize,
    pub error_estimate: String,
    pub agreed_digits: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriticalJson {
    pub kind: String,
    pub location: String,
    pub value: String,
    pub digits: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZeroJson {
    pub index: usize,
    pub ordinate: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZerosJson {
    pub digits: u32,
    pub zeros: Vec<ZeroJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModularJson {
    pub x: String,
    pub lhs: String,
    pub rhs: String,
    pub digits_agreed: u32,
    pub zeros_used: usize,
    pub prime_limit: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhiJson {
    pub x: String,
    pub digits_agreed: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoleJson {
    pub pole: i64,
    pub order: u8,
    pub finite_part: String,
    pub finite_part_error: String,
    /// Coefficient of (s−p)^{-1}.
    pub residue: String,
    pub residue_closed_form: String,
    /// Coefficient of (s−1)^{-2}; only at the double pole.
    pub c2: Option<String>,
    pub c2_closed_form: Option<String>,
}

pub fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain data");
    s.push('\n');
    s
}

/// Both parts of `z` at a common absolute precision, giving `digits`
/// significant digits to the larger part.
pub fn complex_parts(z: &ApComplex, digits: u32) -> JsonComplex {
    let mag = z.abs_log10();
    let decimals = if mag.is_finite() {
        (digits as i64 - 1 - mag.floor() as i64).max(0) as usize
    } else {
        digits as usize
    };
    JsonComplex {
        re: format_fixed(&z.re, decimals),
        im: format_fixed(&z.im, decimals),
    }
}

/// Parts of a term at `decimals` places after the point.
pub fn term_parts(z: &ApComplex, decimals: usize) -> JsonComplex {
    JsonComplex {
        re: format_fixed(&z.re, decimals),
        im: format_fixed(&z.im, decimals),
    }
}

/// Shortest decimal that reads back to `x` at `sig` significant digits:
/// trailing zeros after the point are dropped.
pub fn exact_decimal(x: &Float, sig: usize) -> String {
    let s = format_sig(x, sig);
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Three significant digits in exponent notation.
pub fn sci(x: &Float) -> String {
    if x.is_zero() {
        return "0".into();
    }
    let l = float_log10(x);
    if !l.is_finite() {
        return format_sig(x, 3);
    }
    // Mantissa from the exact value so tiny magnitudes do not underflow f64.
    let e = l.floor() as i32;
    let prec = x.prec().max(64);
    let scale = Float::with_val(prec, 10).pow(-e);
    let m = Float::with_val(prec, x) * scale;
    let mut mant = m.to_f64();
    let mut e = e;
    if mant.abs() >= 9.995 {
        mant /= 10.0;
        e += 1;
    }
    format!("{mant:.2}e{e}")
}

/// `re+imj` for the text output.
pub fn complex_text(c: &JsonComplex) -> String {
    match c.im.strip_prefix('-') {
        Some(rest) => format!("{} - {}i", c.re, rest),
        None => format!("{} + {}i", c.re, c.im),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_notation() {
        let x = Float::with_val(64, 1.234e-20);
        assert_eq!(sci(&x), "1.23e-20");
        let y = Float::with_val(64, 9.999e5);
        assert_eq!(sci(&y), "1.00e6");
        assert_eq!(sci(&Float::with_val(64, 0)), "0");
    }

    #[test]
    fn common_precision() {
        let z = ApComplex::new(Float::with_val(64, -0.28125), Float::with_val(64, 0));
        let c = complex_parts(&z, 5);
        assert_eq!(c.re, "-0.28125");
        assert_eq!(c.im, "0.00000");
    }

    #[test]
    fn trailing_zeros_dropped() {
        assert_eq!(exact_decimal(&Float::with_val(64, 0.5), 6), "0.5");
        assert_eq!(exact_decimal(&Float::with_val(64, 100), 6), "100");
    }
}
