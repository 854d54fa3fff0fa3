//! Dense univariate polynomials with exact arbitrary-precision rational coefficients.
//!
//! `RationalPoly` stores coefficients in ascending degree order. The vector is
//! empty for the zero polynomial and its last entry is nonzero otherwise, so
//! `degree()` is always the index of the last stored coefficient.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::extended::{rational_to_float, ExtComplex, Precision};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct RationalPoly {
    coeffs: Vec<BigRational>,
}

impl RationalPoly {
    fn normalize(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn zero() -> Self {
        RationalPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    /// The identity `e_1(z) = z`.
    pub fn x() -> Self {
        Self::monomial(BigRational::one(), 1)
    }

    pub fn constant(c: BigRational) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// `c·z^power`.
    pub fn monomial(c: BigRational, power: usize) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![BigRational::zero(); power + 1];
        coeffs[power] = c;
        RationalPoly { coeffs }
    }

    /// Builds a polynomial from ascending coefficients; trailing zeros are stripped.
    pub fn from_coeffs(coeffs: Vec<BigRational>) -> Self {
        let mut p = RationalPoly { coeffs };
        p.normalize();
        p
    }

    pub fn from_integers(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| BigRational::from_integer(c.into())).collect())
    }

    /// Builds from `(numerator, denominator)` pairs in ascending order.
    pub fn from_ratios(coeffs: &[(i64, i64)]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&(p, q)| ratio(p, q)).collect())
    }

    /// Degree, with the zero polynomial having degree −1.
    pub fn degree(&self) -> isize {
        self.coeffs.len() as isize - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Coefficient of `z^power`, zero beyond the degree.
    pub fn coeff(&self, power: usize) -> BigRational {
        self.coeffs.get(power).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|i| match (self.coeffs.get(i), other.coeffs.get(i)) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            })
            .collect();
        Self::from_coeffs(coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        RationalPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    /// Multiplies every coefficient by `c`.
    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        RationalPoly {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    /// Convolution product.
    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Self::from_coeffs(coeffs)
    }

    /// Multiplication by `z^shift`.
    pub fn shift(&self, shift: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![BigRational::zero(); shift];
        coeffs.extend(self.coeffs.iter().cloned());
        RationalPoly { coeffs }
    }

    /// Formal derivative.
    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * BigInt::from(i))
            .collect();
        Self::from_coeffs(coeffs)
    }

    pub fn nth_derivative(&self, order: usize) -> Self {
        (0..order).fold(self.clone(), |p, _| p.derivative())
    }

    /// Exact value at a rational point.
    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        self.coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    /// Coefficients rounded to the nearest doubles.
    pub fn to_f64_coeffs(&self) -> Vec<f64> {
        self.coeffs.iter().map(rational_to_f64).collect()
    }

    /// Double-precision Horner evaluation.
    pub fn eval_f64(&self, z: Complex64) -> Complex64 {
        horner_f64(&self.to_f64_coeffs(), z)
    }

    /// Horner evaluation with `bits`-bit floats; each coefficient is rounded once.
    pub fn eval_ext(&self, z: &ExtComplex, bits: usize) -> ExtComplex {
        let mut acc = ExtComplex::zero(bits);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(z, bits).add_real(&rational_to_float(c, bits), bits);
        }
        acc
    }

    /// Evaluates at `z` with the requested arithmetic, rounding the result to doubles.
    pub fn eval(&self, z: Complex64, precision: Precision) -> Complex64 {
        match precision {
            Precision::Double => self.eval_f64(z),
            Precision::Extended { bits } => self.eval_ext(&ExtComplex::from_c64(z, bits), bits).to_c64(),
        }
    }

    /// `Σ |c_k|·r^k`, which dominates `|p(z)|` on `|z| <= r` and scales Horner round-off.
    pub fn abs_majorant(&self, r: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * r + rational_to_f64(&c.abs()))
    }

    /// Debug dump: one `power:numerator/denominator` line per nonzero coefficient.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (power, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                out.push_str(&format!("{power}:{}/{}\n", c.numer(), c.denom()));
            }
        }
        out
    }

    /// Inverse of [`RationalPoly::dump`].
    pub fn parse_dump(text: &str) -> Result<Self> {
        let mut coeffs: Vec<BigRational> = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let (power, value) = line
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("expected power:value, got {line:?}")))?;
            let power: usize = power
                .parse()
                .map_err(|_| Error::Parse(format!("bad power in {line:?}")))?;
            let value = parse_rational(value)?;
            if coeffs.len() <= power {
                coeffs.resize(power + 1, BigRational::zero());
            }
            coeffs[power] += value;
        }
        Ok(Self::from_coeffs(coeffs))
    }

    /// Decimal rendering with 17 significant digits per coefficient.
    pub fn to_decimal_string(&self) -> String {
        render_terms(self.coeffs.iter().map(|c| {
            let v = rational_to_f64(c);
            (c.is_zero(), v < 0.0, format!("{:.16e}", v.abs()), v.abs() == 1.0)
        }))
    }
}

/// Exact rational `p/q`.
pub fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(p.into(), q.into())
}

pub fn rational_to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Parses `p/q`, an integer, or a finite decimal such as `0.25` into an exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let text = text.trim();
    let bad = || Error::Parse(format!("not a rational number: {text:?}"));
    if let Some((p, q)) = text.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {text:?}")));
        }
        return Ok(BigRational::new(p, q));
    }
    if let Some((int, frac)) = text.split_once('.') {
        let negative = int.trim_start().starts_with('-');
        let int_digits = int.trim_start_matches(['-', '+']);
        if !frac.chars().all(|c| c.is_ascii_digit()) || frac.is_empty() {
            return Err(bad());
        }
        let int: BigInt = if int_digits.is_empty() {
            BigInt::zero()
        } else {
            int_digits.parse().map_err(|_| bad())?
        };
        let frac_val: BigInt = frac.parse().map_err(|_| bad())?;
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let magnitude = BigRational::new(int * &scale + frac_val, scale);
        return Ok(if negative { -magnitude } else { magnitude });
    }
    let p: BigInt = text.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(p))
}

pub(crate) fn horner_f64(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

// (is zero, negative, magnitude text, magnitude is one) per ascending power.
fn render_terms(terms: impl Iterator<Item = (bool, bool, String, bool)>) -> String {
    let terms: Vec<_> = terms.collect();
    let mut out = String::new();
    for (power, (zero, negative, magnitude, unit)) in terms.iter().enumerate().rev() {
        if *zero {
            continue;
        }
        match (out.is_empty(), negative) {
            (true, true) => out.push('-'),
            (true, false) => {}
            (false, true) => out.push_str(" - "),
            (false, false) => out.push_str(" + "),
        }
        let var = match power {
            0 => String::new(),
            1 => "z".to_string(),
            _ => format!("z^{power}"),
        };
        if power == 0 {
            out.push_str(magnitude);
        } else if *unit {
            out.push_str(&var);
        } else {
            out.push_str(&format!("{magnitude} {var}"));
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

impl fmt::Display for RationalPoly {
    /// Descending-power exact form, e.g. `11/10 z^2 + 1/5 z`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text = render_terms(self.coeffs.iter().map(|c| {
            let a = c.abs();
            (c.is_zero(), c.is_negative(), a.to_string(), a.is_one())
        }));
        f.write_str(&text)
    }
}

impl Add for &RationalPoly {
    type Output = RationalPoly;
    fn add(self, rhs: Self) -> RationalPoly {
        RationalPoly::add(self, rhs)
    }
}

impl Sub for &RationalPoly {
    type Output = RationalPoly;
    fn sub(self, rhs: Self) -> RationalPoly {
        RationalPoly::sub(self, rhs)
    }
}

impl Mul for &RationalPoly {
    type Output = RationalPoly;
    fn mul(self, rhs: Self) -> RationalPoly {
        RationalPoly::mul(self, rhs)
    }
}

impl Neg for &RationalPoly {
    type Output = RationalPoly;
    fn neg(self) -> RationalPoly {
        RationalPoly::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(c: &[(i64, i64)]) -> RationalPoly {
        RationalPoly::from_ratios(c)
    }

    #[test]
    fn add_examples() {
        let sum = &p(&[(1, 1), (1, 1)]) + &p(&[(0, 1), (-1, 1)]);
        assert_eq!(sum, RationalPoly::one());
        assert_eq!(sum.degree(), 0);
        let q = p(&[(3, 1), (0, 1), (2, 7)]);
        assert_eq!(&RationalPoly::zero() + &q, q);
        let lhs = p(&[(0, 1), (1, 2), (1, 1)]);
        assert_eq!(&lhs + &p(&[(0, 1), (1, 2)]), p(&[(0, 1), (1, 1), (1, 1)]));
    }

    #[test]
    fn scale_examples() {
        let z2 = RationalPoly::monomial(ratio(1, 1), 2);
        assert_eq!(z2.scale(&ratio(1, 1)), z2);
        assert!(p(&[(1, 1), (1, 1)]).scale(&ratio(0, 1)).is_zero());
        assert_eq!(
            p(&[(0, 1), (4, 1), (2, 1)]).scale(&ratio(1, 2)),
            p(&[(0, 1), (2, 1), (1, 1)])
        );
    }

    #[test]
    fn mul_examples() {
        let one_plus_z = p(&[(1, 1), (1, 1)]);
        assert_eq!(&RationalPoly::x() * &one_plus_z, p(&[(0, 1), (1, 1), (1, 1)]));
        assert_eq!(&one_plus_z * &RationalPoly::one(), one_plus_z);
        assert_eq!(&one_plus_z * &one_plus_z, p(&[(1, 1), (2, 1), (1, 1)]));
        assert!((&one_plus_z * &RationalPoly::zero()).is_zero());
    }

    #[test]
    fn derivative_examples() {
        let z3 = RationalPoly::monomial(ratio(1, 1), 3);
        assert_eq!(z3.derivative(), RationalPoly::monomial(ratio(3, 1), 2));
        assert!(RationalPoly::constant(ratio(5, 3)).derivative().is_zero());
        // T_{10,2} = 11/10 z^2 + 1/5 z
        let t = p(&[(0, 1), (1, 5), (11, 10)]);
        assert_eq!(t.derivative(), p(&[(1, 5), (11, 5)]));
    }

    #[test]
    fn eval_examples() {
        let i = Complex64::new(0.0, 1.0);
        let z2 = RationalPoly::monomial(ratio(1, 1), 2);
        assert_eq!(z2.eval(i, Precision::Double), Complex64::new(-1.0, 0.0));
        assert_eq!(z2.eval(i, Precision::extended()), Complex64::new(-1.0, 0.0));
        let one_plus_z = p(&[(1, 1), (1, 1)]);
        assert_eq!(one_plus_z.eval(Complex64::new(0.0, 0.0), Precision::Double).re, 1.0);
        let t = p(&[(0, 1), (1, 5), (11, 10)]);
        assert!((t.eval(Complex64::new(1.0, 0.0), Precision::Double).re - 1.3).abs() < 1e-15);
        assert_eq!(t.eval(Complex64::new(1.0, 0.0), Precision::extended()).re, 1.3);
        assert_eq!(t.eval_rational(&ratio(1, 1)), ratio(13, 10));
    }

    #[test]
    fn zero_polynomial_has_degree_minus_one() {
        assert_eq!(RationalPoly::zero().degree(), -1);
        assert_eq!(RationalPoly::from_integers(&[0, 0, 0]).degree(), -1);
        assert_eq!(RationalPoly::from_integers(&[0, 1, 0]).degree(), 1);
    }

    #[test]
    fn extended_evaluation_resolves_cancellation() {
        // (z - 1)^8 expanded: double Horner near z = 1 loses everything to round-off.
        let mut q = RationalPoly::one();
        let factor = p(&[(-1, 1), (1, 1)]);
        for _ in 0..8 {
            q = &q * &factor;
        }
        let z = Complex64::new(1.0 + 1e-3, 0.0);
        let exact = (1e-3f64).powi(8);
        let ext = q.eval(z, Precision::Extended { bits: 256 }).re;
        assert!((ext / exact - 1.0).abs() < 1e-10, "{ext} vs {exact}");
    }

    #[test]
    fn display_and_dump() {
        let t = p(&[(0, 1), (1, 5), (11, 10)]);
        assert_eq!(t.to_string(), "11/10 z^2 + 1/5 z");
        assert_eq!(RationalPoly::one().to_string(), "1");
        assert_eq!(RationalPoly::x().to_string(), "z");
        assert_eq!(RationalPoly::zero().to_string(), "0");
        assert_eq!(p(&[(-1, 2), (0, 1), (-1, 1)]).to_string(), "-z^2 - 1/2");
        assert_eq!(t.dump(), "1:1/5\n2:11/10\n");
        assert_eq!(RationalPoly::parse_dump(&t.dump()).unwrap(), t);
        assert_eq!(RationalPoly::x().to_decimal_string(), "z");
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("1/2").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational("-3/6").unwrap(), ratio(-1, 2));
        assert_eq!(parse_rational("0.25").unwrap(), ratio(1, 4));
        assert_eq!(parse_rational("-1.5").unwrap(), ratio(-3, 2));
        assert_eq!(parse_rational("7").unwrap(), ratio(7, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1.").is_err());
    }

    fn small_poly() -> impl Strategy<Value = RationalPoly> {
        prop::collection::vec((-20i64..20, 1i64..9), 0..7).prop_map(|c| RationalPoly::from_ratios(&c))
    }

    proptest! {
        #[test]
        fn evaluation_is_additive(a in small_poly(), b in small_poly(), re in -2.0f64..2.0, im in -2.0f64..2.0) {
            let z = Complex64::new(re, im);
            let lhs = (&a + &b).eval_f64(z);
            let rhs = a.eval_f64(z) + b.eval_f64(z);
            let scale = 1.0 + a.abs_majorant(z.norm()) + b.abs_majorant(z.norm());
            prop_assert!((lhs - rhs).norm() <= 1e-12 * scale);
        }

        #[test]
        fn degree_of_product_is_additive(a in small_poly(), b in small_poly()) {
            let prod = &a * &b;
            if a.is_zero() || b.is_zero() {
                prop_assert!(prod.is_zero());
            } else {
                prop_assert_eq!(prod.degree(), a.degree() + b.degree());
            }
            // normalization: no stored leading zero
            prop_assert!(prod.coeffs().last().map_or(true, |c| !c.is_zero()));
        }
    }
}
