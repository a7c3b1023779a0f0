//! Decimal rendering and parsing that never passes through machine floats.

use rug::float::Round;
use rug::Float;

use crate::complex::ApComplex;
use crate::error::{Error, Result};

/// Positional decimal with exactly `digits` significant digits (rounded to
/// nearest). Large integers are padded with zeros rather than switching to
/// exponent notation.
pub fn format_sig(x: &Float, digits: usize) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x.is_sign_negative() { "-inf" } else { "inf" }.into();
    }
    let digits = digits.max(1);
    if x.is_zero() {
        return if digits == 1 {
            "0".into()
        } else {
            format!("0.{}", "0".repeat(digits - 1))
        };
    }
    let raw = x.to_string_radix_round(10, Some(digits), Round::Nearest);
    let (neg, body) = match raw.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, raw.as_str()),
    };
    let (mant, exp) = match body.find('e') {
        Some(i) => (&body[..i], body[i + 1..].parse::<i64>().unwrap_or(0)),
        None => (body, 0),
    };
    let int_len = mant.find('.').unwrap_or(mant.len()) as i64;
    let mut mantissa: String = mant.chars().filter(|c| c.is_ascii_digit()).collect();
    // Position of the decimal point relative to the first mantissa digit.
    let mut point = int_len + exp;
    while mantissa.len() > 1 && mantissa.starts_with('0') {
        mantissa.remove(0);
        point -= 1;
    }
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    if point <= 0 {
        out.push_str("0.");
        out.push_str(&"0".repeat((-point) as usize));
        out.push_str(&mantissa);
    } else if point as usize >= mantissa.len() {
        out.push_str(&mantissa);
        out.push_str(&"0".repeat(point as usize - mantissa.len()));
    } else {
        out.push_str(&mantissa[..point as usize]);
        out.push('.');
        out.push_str(&mantissa[point as usize..]);
    }
    out
}

/// Fixed-point rendering with `decimals` digits after the point.
pub fn format_fixed(x: &Float, decimals: usize) -> String {
    let mag = crate::complex::float_log10(x);
    if !mag.is_finite() {
        return format_sig(x, decimals + 1);
    }
    let int_digits = (mag.floor() as i64 + 1).max(0) as usize;
    let sig = int_digits + decimals;
    if sig == 0 {
        return format!("0.{}", "0".repeat(decimals));
    }
    let s = format_sig(x, sig);
    // Rounding up can add one integer digit (e.g. 9.99 -> 10.0); recompute.
    match s.find('.') {
        Some(i) if s.len() - i - 1 > decimals => format_sig(x, sig - (s.len() - i - 1 - decimals)),
        Some(i) if s.len() - i - 1 < decimals => format_sig(x, sig + (decimals - (s.len() - i - 1))),
        _ => s,
    }
}

/// Number of significant decimal digits written in a decimal literal.
pub fn significant_digits(lit: &str) -> usize {
    let mant = lit
        .trim()
        .trim_start_matches(['+', '-'])
        .split(['e', 'E'])
        .next()
        .unwrap_or("");
    let digits: String = mant.chars().filter(|c| c.is_ascii_digit()).collect();
    let trimmed = digits.trim_start_matches('0');
    trimmed.len().max(1)
}

/// Parse a decimal literal at `prec` bits.
pub fn parse_float(lit: &str, prec: u32) -> Result<Float> {
    let lit = lit.trim();
    let parsed = Float::parse(lit)
        .map_err(|e| Error::InvalidArgument(format!("cannot parse number {lit:?}: {e}")))?;
    Ok(Float::with_val(prec, parsed))
}

/// Parse a complex literal `RE`, `IMj`, `RE+IMj` or `RE-IMj` (also `i` instead
/// of `j`). Parts are read at `prec` bits.
pub fn parse_complex(lit: &str, prec: u32) -> Result<ApComplex> {
    let s: String = lit.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(Error::InvalidArgument("empty complex literal".into()));
    }
    let Some(body) = s.strip_suffix(['j', 'J', 'i', 'I']) else {
        return Ok(ApComplex::from_real(parse_float(&s, prec)?));
    };
    // Split at the last sign that does not start the literal or an exponent.
    let bytes = body.as_bytes();
    let mut split = None;
    for i in (1..bytes.len()).rev() {
        if (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E') {
            split = Some(i);
            break;
        }
    }
    let (re_part, im_part) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("0", body),
    };
    let im_part = match im_part {
        "" | "+" => "1",
        "-" => "-1",
        other => other,
    };
    Ok(ApComplex::new(
        parse_float(re_part, prec)?,
        parse_float(im_part.trim_start_matches('+'), prec)?,
    ))
}
