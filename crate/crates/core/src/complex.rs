//! Arbitrary-precision complex numbers over MPFR reals.
//!
//! Every operation rounds to the precision of its left operand, so a
//! computation that starts from values at one precision stays there.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub, Div};

use rug::float::Constant;
use rug::Float;

#[derive(Clone, Debug, PartialEq)]
pub struct ApComplex {
    pub re: Float,
    pub im: Float,
}

impl ApComplex {
    pub fn zero(prec: u32) -> Self {
        ApComplex {
            re: Float::new(prec),
            im: Float::new(prec),
        }
    }

    pub fn one(prec: u32) -> Self {
        Self::from_real(Float::with_val(prec, 1))
    }

    pub fn new(re: Float, im: Float) -> Self {
        ApComplex { re, im }
    }

    pub fn from_real(re: Float) -> Self {
        let im = Float::new(re.prec());
        ApComplex { re, im }
    }

    pub fn from_f64(prec: u32, re: f64, im: f64) -> Self {
        ApComplex {
            re: Float::with_val(prec, re),
            im: Float::with_val(prec, im),
        }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    /// Decimal digits carried by both parts.
    pub fn precision_digits(&self) -> u32 {
        crate::mpcontext::bits_to_digits(self.re.prec().min(self.im.prec()))
    }

    /// Copy rounded (or padded) to `prec` bits.
    pub fn with_prec(&self, prec: u32) -> Self {
        ApComplex {
            re: Float::with_val(prec, &self.re),
            im: Float::with_val(prec, &self.im),
        }
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn conj(&self) -> Self {
        ApComplex {
            re: self.re.clone(),
            im: Float::with_val(self.prec(), -&self.im),
        }
    }

    pub fn abs(&self) -> Float {
        let mut r = self.re.clone();
        r.hypot_mut(&self.im);
        r
    }

    /// `|z|^2`.
    pub fn norm(&self) -> Float {
        let p = self.prec();
        let mut r = Float::with_val(p, self.re.square_ref());
        r += Float::with_val(p, self.im.square_ref());
        r
    }

    /// Principal argument in (-pi, pi].
    pub fn arg(&self) -> Float {
        let mut y = self.im.clone();
        y.atan2_mut(&self.re);
        y
    }

    /// Base-10 logarithm of the modulus, as f64. `-inf` for zero.
    pub fn abs_log10(&self) -> f64 {
        float_log10(&self.abs())
    }

    pub fn scale(&self, k: &Float) -> Self {
        let p = self.prec();
        ApComplex {
            re: Float::with_val(p, &self.re * k),
            im: Float::with_val(p, &self.im * k),
        }
    }

    pub fn add_real(&self, k: &Float) -> Self {
        ApComplex {
            re: Float::with_val(self.prec(), &self.re + k),
            im: self.im.clone(),
        }
    }

    pub fn recip(&self) -> Self {
        let p = self.prec();
        if self.im.is_zero() {
            return Self::from_real(Float::with_val(p, self.re.recip_ref()));
        }
        let n = self.norm();
        ApComplex {
            re: Float::with_val(p, &self.re / &n),
            im: Float::with_val(p, -(Float::with_val(p, &self.im / &n))),
        }
    }

    pub fn square(&self) -> Self {
        self * self
    }

    pub fn exp(&self) -> Self {
        let p = self.prec();
        let m = Float::with_val(p, self.re.exp_ref());
        if self.im.is_zero() {
            return Self::from_real(m);
        }
        let mut s = self.im.clone();
        let mut c = Float::new(p);
        s.sin_cos_mut(&mut c);
        ApComplex {
            re: Float::with_val(p, &m * &c),
            im: Float::with_val(p, &m * &s),
        }
    }

    /// Principal logarithm. A real negative argument is taken on the upper
    /// side of the cut (imaginary part +pi).
    pub fn ln(&self) -> Self {
        let p = self.prec();
        if self.im.is_zero() && self.re.is_sign_positive() {
            return Self::from_real(Float::with_val(p, self.re.ln_ref()));
        }
        let r = self.abs();
        ApComplex {
            re: r.ln(),
            im: self.arg(),
        }
    }

    pub fn sqrt(&self) -> Self {
        let p = self.prec();
        if self.im.is_zero() && self.re.is_sign_positive() {
            return Self::from_real(Float::with_val(p, self.re.sqrt_ref()));
        }
        // Stable half-angle form: the larger component comes from sqrt((r + |x|)/2).
        let r = self.abs();
        let mut t = Float::with_val(p, self.re.abs_ref());
        t += &r;
        t /= 2u32;
        let big = t.sqrt();
        let mut small = Float::with_val(p, self.im.abs_ref());
        small /= &big;
        small /= 2u32;
        if self.re.is_sign_positive() {
            if self.im.is_sign_negative() {
                small = -small;
            }
            ApComplex { re: big, im: small }
        } else {
            let im = if self.im.is_sign_negative() { -big } else { big };
            ApComplex { re: small, im }
        }
    }

    /// `self^w` on the principal branch.
    pub fn pow(&self, w: &ApComplex) -> Self {
        (&self.ln() * w).exp()
    }

    /// `x^w` for a positive real base.
    pub fn real_pow(x: &Float, w: &ApComplex) -> Self {
        let p = w.prec();
        let l = Float::with_val(p, x.ln_ref());
        w.scale(&l).exp()
    }

    pub fn sin(&self) -> Self {
        let p = self.prec();
        let mut s = self.re.clone();
        let mut c = Float::new(p);
        s.sin_cos_mut(&mut c);
        if self.im.is_zero() {
            return Self::from_real(s);
        }
        let mut sh = self.im.clone();
        let mut ch = Float::new(p);
        sh.sinh_cosh_mut(&mut ch);
        ApComplex {
            re: Float::with_val(p, &s * &ch),
            im: Float::with_val(p, &c * &sh),
        }
    }

    pub fn cos(&self) -> Self {
        let p = self.prec();
        let mut s = self.re.clone();
        let mut c = Float::new(p);
        s.sin_cos_mut(&mut c);
        if self.im.is_zero() {
            return Self::from_real(c);
        }
        let mut sh = self.im.clone();
        let mut ch = Float::new(p);
        sh.sinh_cosh_mut(&mut ch);
        ApComplex {
            re: Float::with_val(p, &c * &ch),
            im: Float::with_val(p, -(Float::with_val(p, &s * &sh))),
        }
    }

    /// Nearest integer to the real part and the exact remainder `self - k`.
    pub fn split_nearest_integer(&self) -> (rug::Integer, ApComplex) {
        let k = self
            .re
            .to_integer()
            .unwrap_or_default();
        // Subtracting a nearby integer is exact once the exponent of the
        // remainder is below that of the value, so pad by the integer's size.
        let p = self.prec() + k.significant_bits() + 2;
        let re = Float::with_val(p, &self.re - &k);
        (
            k,
            ApComplex {
                re,
                im: self.im.clone(),
            },
        )
    }

    pub fn pi(prec: u32) -> Float {
        Float::with_val(prec, Constant::Pi)
    }
}

/// Base-10 logarithm of `|x|` as f64, robust to exponents outside f64 range.
pub fn float_log10(x: &Float) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    if !x.is_finite() {
        return f64::INFINITY;
    }
    let (m, e) = x.to_f64_exp();
    m.abs().log10() + e as f64 * std::f64::consts::LOG10_2
}

impl fmt::Display for ApComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.precision_digits().max(1) as usize;
        let re = crate::format::format_sig(&self.re, d);
        let im = crate::format::format_sig(&self.im, d);
        if im.starts_with('-') {
            write!(f, "{re}{im}j")
        } else {
            write!(f, "{re}+{im}j")
        }
    }
}

impl<'a> Add<&'a ApComplex> for &'a ApComplex {
    type Output = ApComplex;
    fn add(self, o: &ApComplex) -> ApComplex {
        let p = self.prec();
        ApComplex {
            re: Float::with_val(p, &self.re + &o.re),
            im: Float::with_val(p, &self.im + &o.im),
        }
    }
}

impl<'a> Sub<&'a ApComplex> for &'a ApComplex {
    type Output = ApComplex;
    fn sub(self, o: &ApComplex) -> ApComplex {
        let p = self.prec();
        ApComplex {
            re: Float::with_val(p, &self.re - &o.re),
            im: Float::with_val(p, &self.im - &o.im),
        }
    }
}

impl<'a> Mul<&'a ApComplex> for &'a ApComplex {
    type Output = ApComplex;
    fn mul(self, o: &ApComplex) -> ApComplex {
        let p = self.prec();
        if self.im.is_zero() && o.im.is_zero() {
            return ApComplex::from_real(Float::with_val(p, &self.re * &o.re));
        }
        let mut re = Float::with_val(p, &self.re * &o.re);
        re -= Float::with_val(p, &self.im * &o.im);
        let mut im = Float::with_val(p, &self.re * &o.im);
        im += Float::with_val(p, &self.im * &o.re);
        ApComplex { re, im }
    }
}

impl<'a> Div<&'a ApComplex> for &'a ApComplex {
    type Output = ApComplex;
    fn div(self, o: &ApComplex) -> ApComplex {
        let p = self.prec();
        if o.im.is_zero() {
            return ApComplex {
                re: Float::with_val(p, &self.re / &o.re),
                im: Float::with_val(p, &self.im / &o.re),
            };
        }
        self * &o.recip()
    }
}

impl Neg for &ApComplex {
    type Output = ApComplex;
    fn neg(self) -> ApComplex {
        let p = self.prec();
        ApComplex {
            re: Float::with_val(p, -&self.re),
            im: Float::with_val(p, -&self.im),
        }
    }
}

impl std::ops::AddAssign<&ApComplex> for ApComplex {
    fn add_assign(&mut self, o: &ApComplex) {
        self.re += &o.re;
        self.im += &o.im;
    }
}

impl std::ops::SubAssign<&ApComplex> for ApComplex {
    fn sub_assign(&mut self, o: &ApComplex) {
        self.re -= &o.re;
        self.im -= &o.im;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 200;

    fn c(re: f64, im: f64) -> ApComplex {
        ApComplex::from_f64(P, re, im)
    }

    fn close(a: &ApComplex, b: &ApComplex, tol: f64) -> bool {
        (a - b).abs().to_f64() <= tol * (1.0 + b.abs().to_f64())
    }

    #[test]
    fn exp_ln_inverse() {
        for &(x, y) in &[(0.3, 0.7), (-2.0, 5.0), (10.0, -3.0), (-0.5, -0.1)] {
            let z = c(x, y);
            assert!(close(&z.ln().exp(), &z, 1e-55));
        }
    }

    #[test]
    fn ln_on_negative_axis_takes_upper_side() {
        let l = c(-2.0, 0.0).ln();
        assert!((l.im.to_f64() - std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn sqrt_squares_back() {
        for &(x, y) in &[(4.0, 0.0), (-4.0, 0.0), (-3.0, -4.0), (0.25, 9.0)] {
            let z = c(x, y);
            let r = z.sqrt();
            assert!(close(&r.square(), &z, 1e-55));
            assert!(r.re.is_sign_positive());
        }
    }

    #[test]
    fn trig_identity() {
        let z = c(1.3, -0.4);
        let s = z.sin();
        let k = z.cos();
        let one = &s.square() + &k.square();
        assert!(close(&one, &c(1.0, 0.0), 1e-55));
    }

    #[test]
    fn division_and_recip() {
        let a = c(3.0, 4.0);
        let b = c(-1.0, 2.0);
        let q = &a / &b;
        assert!(close(&(&q * &b), &a, 1e-55));
        assert!(close(&a.recip(), &c(0.12, -0.16), 1e-15));
    }

    #[test]
    fn nearest_integer_split_is_exact() {
        let z = ApComplex::new(
            Float::with_val(P, Float::parse("-3.0000000000000000000001").unwrap()),
            Float::with_val(P, 0.5),
        );
        let (k, d) = z.split_nearest_integer();
        assert_eq!(k, -3);
        let back = Float::with_val(P + 8, &d.re + &k);
        assert_eq!(back, z.re);
    }

    #[test]
    fn log10_of_huge_values() {
        let x = Float::with_val(64, Float::parse("1e-400000").unwrap());
        assert!((float_log10(&x) + 400000.0).abs() < 1e-6);
    }
}
