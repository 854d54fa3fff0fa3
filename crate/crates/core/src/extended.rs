//! Extended-precision floating point helpers on top of `astro-float`.
//!
//! Exact rationals are converted into binary floats of a chosen bit count,
//! complex values are carried as a pair of such floats, and results are
//! rounded back to `f64` only at the very end.

use astro_float::{BigFloat, Consts, RoundingMode, Sign};
use num_bigint::{BigInt, Sign as IntSign};
use num_complex::Complex64;
use num_rational::BigRational;

pub(crate) const RM: RoundingMode = RoundingMode::ToEven;

/// Default bit count for extended evaluation.
pub const DEFAULT_EXTENDED_BITS: usize = 256;

/// Arithmetic used when a polynomial is evaluated at a complex point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Precision {
    /// IEEE-754 binary64 Horner evaluation.
    #[default]
    Double,
    /// Binary floating point with the given mantissa bit count.
    Extended { bits: usize },
}

impl Precision {
    pub fn extended() -> Self {
        Precision::Extended {
            bits: DEFAULT_EXTENDED_BITS,
        }
    }
}

pub fn int_to_float(x: &BigInt, bits: usize) -> BigFloat {
    let (sign, digits) = x.to_u64_digits();
    if digits.is_empty() {
        return BigFloat::from_word(0, bits);
    }
    let s = if sign == IntSign::Minus { Sign::Neg } else { Sign::Pos };
    // astro-float mantissas are fractions in [1/2, 1); scaling the word
    // sequence by 2^(64·len) makes it the integer value.
    let exponent = 64 * digits.len() as i32;
    let mut f = BigFloat::from_words(&digits, s, exponent);
    // from_words keeps every supplied bit; only the rounding to `bits` can lose information.
    if f.set_precision(bits.max(64), RM).is_err() {
        return BigFloat::nan(None);
    }
    f
}

pub fn rational_to_float(x: &BigRational, bits: usize) -> BigFloat {
    let work = bits + 64;
    let num = int_to_float(x.numer(), work);
    let den = int_to_float(x.denom(), work);
    num.div(&den, bits, RM)
}

/// Rounds an extended float to the nearest `f64` (ties resolved by truncating the low words).
pub fn float_to_f64(x: &BigFloat) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x.is_inf_pos() {
        return f64::INFINITY;
    }
    if x.is_inf_neg() {
        return f64::NEG_INFINITY;
    }
    if x.is_zero() {
        return 0.0;
    }
    let Some((words, _, sign, exponent, _)) = x.as_raw_parts() else {
        return f64::NAN;
    };
    let Some(&top) = words.last() else {
        return 0.0;
    };
    // Fold the next word into the sticky position so rounding to 53 bits sees it.
    let sticky = words.len() > 1 && words[..words.len() - 1].iter().any(|&w| w != 0);
    let top = if sticky { top | 1 } else { top };
    let magnitude = scale_by_pow2(top as f64, exponent as i64 - 64);
    if sign == Sign::Neg {
        -magnitude
    } else {
        magnitude
    }
}

fn scale_by_pow2(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
        if x.is_infinite() {
            return x;
        }
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
        if x == 0.0 {
            return x;
        }
    }
    x * 2f64.powi(e as i32)
}

/// Complex number with extended-precision real and imaginary parts.
#[derive(Debug, Clone)]
pub struct ExtComplex {
    pub re: BigFloat,
    pub im: BigFloat,
}

impl ExtComplex {
    pub fn zero(bits: usize) -> Self {
        ExtComplex {
            re: BigFloat::from_word(0, bits),
            im: BigFloat::from_word(0, bits),
        }
    }

    /// Exact promotion of a double-precision complex number.
    pub fn from_c64(z: Complex64, bits: usize) -> Self {
        ExtComplex {
            re: BigFloat::from_f64(z.re, bits.max(64)),
            im: BigFloat::from_f64(z.im, bits.max(64)),
        }
    }

    /// `r·e^{iθ}` with `θ = 2π·j/count`, computed at the working precision.
    pub fn on_circle(r: f64, j: usize, count: usize, bits: usize, consts: &mut Consts) -> Self {
        let work = bits + 32;
        let pi = consts.pi(work, RM);
        let two_pi = pi.mul(&BigFloat::from_word(2, work), work, RM);
        let theta = two_pi.mul(&BigFloat::from_u64(j as u64, work), work, RM).div(
            &BigFloat::from_u64(count as u64, work),
            work,
            RM,
        );
        let radius = BigFloat::from_f64(r, work);
        ExtComplex {
            re: radius.mul(&theta.cos(work, RM, consts), bits, RM),
            im: radius.mul(&theta.sin(work, RM, consts), bits, RM),
        }
    }

    pub fn add(&self, other: &Self, bits: usize) -> Self {
        ExtComplex {
            re: self.re.add(&other.re, bits, RM),
            im: self.im.add(&other.im, bits, RM),
        }
    }

    pub fn mul(&self, other: &Self, bits: usize) -> Self {
        let rr = self.re.mul(&other.re, bits, RM);
        let ii = self.im.mul(&other.im, bits, RM);
        let ri = self.re.mul(&other.im, bits, RM);
        let ir = self.im.mul(&other.re, bits, RM);
        ExtComplex {
            re: rr.sub(&ii, bits, RM),
            im: ri.add(&ir, bits, RM),
        }
    }

    pub fn add_real(&self, x: &BigFloat, bits: usize) -> Self {
        ExtComplex {
            re: self.re.add(x, bits, RM),
            im: self.im.clone(),
        }
    }

    pub fn to_c64(&self) -> Complex64 {
        Complex64::new(float_to_f64(&self.re), float_to_f64(&self.im))
    }
}
