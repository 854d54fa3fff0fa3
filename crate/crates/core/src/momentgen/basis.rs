//! Baskakov basis functions and the Szász-weighted moment integrals.

use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::ratpoly::RationalPoly;

/// `∫_0^∞ s_{n,v-1}(t)·t^k dt = (v+k-1)! / ((v-1)!·n^{k+1})`, exactly.
pub fn moment_integral(n: u64, v: u64, k: u64) -> Result<BigRational> {
    if n == 0 {
        return Err(Error::InvalidArgument("operator index n must be >= 1".into()));
    }
    if v == 0 {
        return Err(Error::InvalidArgument("basis index v must be >= 1".into()));
    }
    let rising: BigInt = (v..v + k).map(BigInt::from).product();
    Ok(BigRational::new(rising, BigInt::from(n).pow(k as u32 + 1)))
}

/// `b_{n,v}(z) = C(n+v-1, v)·z^v / (1+z)^{n+v}`, held as numerator polynomial and denominator power.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisFunction {
    pub n: u64,
    pub v: u64,
    pub numerator: RationalPoly,
    pub denominator_exponent: u64,
}

impl BasisFunction {
    pub fn new(n: u64, v: u64) -> Self {
        let c = binomial(BigInt::from(n + v - 1), BigInt::from(v));
        BasisFunction {
            n,
            v,
            numerator: RationalPoly::monomial(BigRational::from_integer(c), v as usize),
            denominator_exponent: n + v,
        }
    }

    /// Exact value at a rational point `x != -1`.
    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        let one_plus = BigRational::one() + x;
        self.numerator.eval_rational(x) / one_plus.pow(self.denominator_exponent as i32)
    }
}

/// Checks `z(1+z)·b'_{n,v}(z) = (v - nz)·b_{n,v}(z)` as a polynomial identity.
///
/// With `b = P/(1+z)^{n+v}` both sides are multiplied by `(1+z)^{n+v+1}`:
/// `z(1+z)·[P'(1+z) - (n+v)P] = (v - nz)·P·(1+z)`.
pub fn basis_identity_check(n: u64, v: u64) -> bool {
    if n == 0 || v == 0 {
        return false;
    }
    let b = BasisFunction::new(n, v);
    let p = &b.numerator;
    let one_plus_z = RationalPoly::from_integers(&[1, 1]);
    let z_one_plus_z = RationalPoly::from_integers(&[0, 1, 1]);
    let m = BigRational::from_integer(BigInt::from(b.denominator_exponent));
    let bracket = &(&p.derivative() * &one_plus_z) - &p.scale(&m);
    let lhs = &z_one_plus_z * &bracket;
    let v_minus_nz = RationalPoly::from_integers(&[v as i64, -(n as i64)]);
    let rhs = &(&v_minus_nz * p) * &one_plus_z;
    lhs == rhs
}
