//! Recurrence-free reconstruction of `T_{n,k}`.
//!
//! The operator series `n·Σ_{v>=1} b_{n,v}(x)·∫ s_{n,v-1}(t) t^k dt` is summed at
//! `k+1` positive rational abscissae in extended precision with a certified
//! geometric tail; the interpolating polynomial is then recovered from the
//! Vandermonde system and each coefficient is snapped to the nearest rational
//! whose denominator divides `n^k·k!`.

use astro_float::BigFloat;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::basis::{moment_integral, BasisFunction};
use crate::error::{Error, Result};
use crate::extended::{float_to_f64, int_to_float, rational_to_float, RM};
use crate::ratpoly::RationalPoly;
use crate::series::RATIO_CUTOFF;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    /// Working precision of the series sums and the linear solve (>= 512).
    pub precision_bits: usize,
    /// Target for the certified truncation tail of each series value.
    pub tail_tol: f64,
    /// Term budget per series before giving up.
    pub max_terms: usize,
    /// A coefficient is accepted as rational when it lies this close to it.
    pub accept_tol: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            precision_bits: 512,
            tail_tol: 1e-60,
            max_terms: 200_000,
            accept_tol: 1e-30,
        }
    }
}

/// Outcome of [`oracle_t`].
#[derive(Debug, Clone)]
pub struct OracleResult {
    pub n: u64,
    pub k: usize,
    /// Interpolated coefficients in ascending order.
    pub approx: Vec<BigFloat>,
    /// The rational polynomial, when every coefficient was certified exact.
    pub exact: Option<RationalPoly>,
    /// Largest distance between an interpolated coefficient and its rational snap.
    pub max_snap_gap: f64,
    /// A priori error bound on the interpolated coefficients.
    pub error_bound: f64,
}

impl OracleResult {
    /// Agreement with `p`: exact equality when certified, else within `tol` coefficientwise.
    pub fn agrees_with(&self, p: &RationalPoly, tol: f64) -> bool {
        if let Some(exact) = &self.exact {
            return exact == p;
        }
        if p.degree() > self.k as isize {
            return false;
        }
        let bits = self
            .approx
            .first()
            .and_then(|a| a.mantissa_max_bit_len())
            .unwrap_or(512);
        self.approx.iter().enumerate().all(|(i, a)| {
            let diff = a.sub(&rational_to_float(&p.coeff(i), bits), bits, RM);
            float_to_f64(&diff).abs() <= tol
        })
    }
}

/// Abscissae `x_j = 1 + j/7`, `j = 0..=k`.
pub fn oracle_abscissae(k: usize) -> Vec<BigRational> {
    (0..=k)
        .map(|j| BigRational::new(BigInt::from(7 + j), BigInt::from(7)))
        .collect()
}

/// Value of the operator series for `e_k` at a real point `x > 0`, plus its certified tail.
pub fn operator_series_at(n: u64, k: usize, x: &BigRational, config: &OracleConfig) -> Result<(BigFloat, f64)> {
    let p = config.precision_bits;
    // First term: n·b_{n,1}(x)·m_1.
    let first = BasisFunction::new(n, 1).eval_rational(x)
        * moment_integral(n, 1, k as u64)?
        * BigRational::from_integer(BigInt::from(n));
    let mut term = rational_to_float(&first, p);
    let mut sum = term.clone();
    let t = x / (BigRational::one() + x);
    let (t_num, t_den) = (t.numer().clone(), t.denom().clone());
    let t_f64 = t.to_f64().unwrap_or(1.0);
    for v in 1..config.max_terms as u64 {
        // term(v+1)/term(v) = ((n+v)/(v+1))·t·((v+k)/v); nonincreasing in v.
        let num = BigInt::from((n + v) * (v + k as u64)) * &t_num;
        let den = BigInt::from((v + 1) * v) * &t_den;
        let ratio_f64 = (n + v) as f64 * (v + k as u64) as f64 / ((v + 1) as f64 * v as f64) * t_f64;
        term = term
            .mul(&int_to_float(&num, p + 64), p, RM)
            .div(&int_to_float(&den, p + 64), p, RM);
        sum = sum.add(&term, p, RM);
        // Ratio for the step after the one just taken bounds every later ratio.
        let v1 = v + 1;
        let q = (n + v1) as f64 * (v1 + k as u64) as f64 / ((v1 + 1) as f64 * v1 as f64) * t_f64;
        if ratio_f64 < RATIO_CUTOFF && q < RATIO_CUTOFF {
            let next = float_to_f64(&term) * q;
            let tail = next / (1.0 - q);
            if tail <= config.tail_tol {
                return Ok((sum, tail));
            }
        }
    }
    Err(Error::Truncation(format!(
        "operator series for n={n}, k={k} at x={x} did not reach tail {:e} within {} terms",
        config.tail_tol, config.max_terms
    )))
}

/// Reconstructs `T_{n,k}` without using the moment recurrence.
pub fn oracle_t(n: u64, k: usize, config: &OracleConfig) -> Result<OracleResult> {
    if n == 0 {
        return Err(Error::InvalidArgument("operator index n must be >= 1".into()));
    }
    let p = config.precision_bits;
    if k == 0 {
        // The full operator includes (1+z)^{-n} f(0), which restores Σ_v b_{n,v} = 1.
        return Ok(OracleResult {
            n,
            k,
            approx: vec![BigFloat::from_word(1, p)],
            exact: Some(RationalPoly::one()),
            max_snap_gap: 0.0,
            error_bound: 0.0,
        });
    }
    let xs = oracle_abscissae(k);
    let mut values = Vec::with_capacity(k + 1);
    let mut worst_tail = 0.0f64;
    for x in &xs {
        let (s, tail) = operator_series_at(n, k, x, config)?;
        worst_tail = worst_tail.max(tail);
        values.push(s);
    }
    let vander: Vec<Vec<BigFloat>> = xs
        .iter()
        .map(|x| (0..=k).map(|i| rational_to_float(&x.pow(i as i32), p)).collect())
        .collect();
    let inverse = invert(vander.clone(), p)?;
    let coeffs: Vec<BigFloat> = inverse
        .iter()
        .map(|row| {
            row.iter().zip(&values).fold(BigFloat::from_word(0, p), |acc, (a, s)| {
                acc.add(&a.mul(s, p, RM), p, RM)
            })
        })
        .collect();

    let norm_inf = |m: &[Vec<BigFloat>]| {
        m.iter()
            .map(|row| row.iter().map(|a| float_to_f64(a).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    };
    let inv_norm = norm_inf(&inverse);
    let cond = norm_inf(&vander) * inv_norm;
    let max_value = values.iter().map(|s| float_to_f64(s).abs()).fold(0.0, f64::max);
    let max_coeff = coeffs.iter().map(|c| float_to_f64(c).abs()).fold(0.0, f64::max);
    let unit = 2f64.powi(-(p as i32 - 32));
    let error_bound = inv_norm * (worst_tail + unit * max_value) + cond * unit * max_coeff;
    if !(error_bound < config.accept_tol / 10.0) {
        return Err(Error::Conditioning(format!(
            "coefficient error bound {error_bound:e} (condition ~{cond:e}) exceeds {:e}",
            config.accept_tol / 10.0
        )));
    }

    let denominator = BigInt::from(n).pow(k as u32) * (1..=k).map(BigInt::from).product::<BigInt>();
    let den_float = int_to_float(&denominator, p + 64);
    let mut snapped = Vec::with_capacity(k + 1);
    let mut max_gap = 0.0f64;
    let mut all_exact = true;
    for c in &coeffs {
        let scaled = c.mul(&den_float, p + 64, RM);
        let numer = round_to_int(&scaled);
        let candidate = BigRational::new(numer, denominator.clone());
        let gap = float_to_f64(&c.sub(&rational_to_float(&candidate, p), p, RM)).abs();
        max_gap = max_gap.max(gap);
        if gap > config.accept_tol {
            all_exact = false;
        }
        snapped.push(candidate);
    }
    Ok(OracleResult {
        n,
        k,
        approx: coeffs,
        exact: all_exact.then(|| RationalPoly::from_coeffs(snapped)),
        max_snap_gap: max_gap,
        error_bound,
    })
}

/// Nearest integer to an extended float.
fn round_to_int(x: &BigFloat) -> BigInt {
    let Some((words, _, sign, exponent, _)) = x.as_raw_parts() else {
        return BigInt::zero();
    };
    if x.is_zero() {
        return BigInt::zero();
    }
    let mantissa = BigUint::from_slice(
        &words
            .iter()
            .flat_map(|&w| [w as u32, (w >> 32) as u32])
            .collect::<Vec<_>>(),
    );
    // value = mantissa · 2^(exponent - 64·len)
    let shift = exponent as i64 - 64 * words.len() as i64;
    let magnitude = if shift >= 0 {
        BigInt::from(mantissa << shift as usize)
    } else {
        let s = (-shift) as usize;
        let half = BigUint::one() << (s - 1);
        BigInt::from((mantissa + half) >> s)
    };
    if sign == astro_float::Sign::Neg {
        -magnitude
    } else {
        magnitude
    }
}

/// Gauss–Jordan inverse with partial pivoting.
fn invert(mut a: Vec<Vec<BigFloat>>, p: usize) -> Result<Vec<Vec<BigFloat>>> {
    let size = a.len();
    let mut inv: Vec<Vec<BigFloat>> = (0..size)
        .map(|i| (0..size).map(|j| BigFloat::from_word(u64::from(i == j), p)).collect())
        .collect();
    for col in 0..size {
        let pivot = (col..size)
            .max_by(|&i, &j| {
                let (x, y) = (a[i][col].abs(), a[j][col].abs());
                x.cmp(&y).unwrap_or(0).cmp(&0)
            })
            .expect("nonempty column");
        if a[pivot][col].is_zero() {
            return Err(Error::Conditioning("singular Vandermonde matrix".into()));
        }
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let pv = a[col][col].clone();
        for j in 0..size {
            a[col][j] = a[col][j].div(&pv, p, RM);
            inv[col][j] = inv[col][j].div(&pv, p, RM);
        }
        for i in 0..size {
            if i == col {
                continue;
            }
            let factor = a[i][col].clone();
            if factor.is_zero() {
                continue;
            }
            for j in 0..size {
                let da = factor.mul(&a[col][j], p, RM);
                a[i][j] = a[i][j].sub(&da, p, RM);
                let di = factor.mul(&inv[col][j], p, RM);
                inv[i][j] = inv[i][j].sub(&di, p, RM);
            }
        }
    }
    Ok(inv)
}
