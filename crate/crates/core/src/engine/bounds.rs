//! Closed forms and certified sums for the theoretical error constants.

use serde::Serialize;

use crate::analytic::GrowthEnvelope;
use crate::error::{Error, Result};
use crate::momentgen::remainder_bound_b;
use crate::series::sum_positive_series;

/// Relative size of the neglected tail of the constant's first series.
const SERIES_REL_TOL: f64 = 1e-15;

/// `(M(r+2)/r)·Σ_{k>=2}(k+1)u^k` with `u = rA`, via `Σ_{k>=2}(k+1)u^k = 1/(1-u)² - 1 - 2u`.
pub fn theoretical_c1(m: f64, a: f64, r: f64) -> Result<f64> {
    let u = r * a;
    if !(u < 1.0) {
        return Err(Error::divergence("rA < 1", u));
    }
    if !(r > 0.0) {
        return Err(Error::hypothesis("r > 0", r));
    }
    let s = 1.0 / ((1.0 - u) * (1.0 - u)) - 1.0 - 2.0 * u;
    Ok(m * (r + 2.0) / r * s)
}

/// `p!·r₁·C1(M, A, r₁)/(r₁ - r)^{p+1}`, the derivative bound numerator.
pub fn theoretical_cderiv(m: f64, a: f64, p: usize, r: f64, r1: f64) -> Result<f64> {
    if !(r1 > r) {
        return Err(Error::InvalidArgument(format!(
            "requires r < r1; got r = {r}, r1 = {r1}"
        )));
    }
    let c1 = theoretical_c1(m, a, r1).map_err(|e| match e {
        Error::Divergence { got, .. } => Error::divergence("r1·A < 1", got),
        other => other,
    })?;
    let p_fact: f64 = (1..=p).map(|i| i as f64).product();
    Ok(p_fact * r1 * c1 / (r1 - r).powi(p as i32 + 1))
}

/// `MΣ_{k>=2}((k-1)/k!)·v^k·B_{k,r} + (4M(r+2)/r)·(1/ln²(1/ρ))·(1/(1-ρ)² + 4/(1-ρ))`
/// with `v = A(r+1)` and `ρ = Ar`.
///
/// `B_{k,r}` splits into a cubic in `k` and `(r+1)(r+2)(k+1)!`; each part is
/// summed separately since both have eventually decreasing term ratios.
pub fn theoretical_c2(m: f64, a: f64, r: f64) -> Result<f64> {
    let v = a * (r + 1.0);
    if !(v < 1.0) {
        return Err(Error::divergence("A(r+1) < 1", v));
    }
    if !(r >= 1.0) {
        return Err(Error::hypothesis("r >= 1", r));
    }
    let rho = a * r;
    let cubic = |k: usize| -> f64 {
        let b = remainder_bound_b(k, r).unwrap_or(0.0) - (r + 1.0) * (r + 2.0) * factorial(k + 1);
        (k as f64 - 1.0) / factorial(k) * v.powi(k as i32) * b
    };
    let factorial_part =
        |k: usize| -> f64 { (r + 1.0) * (r + 2.0) * (k as f64 - 1.0) * (k as f64 + 1.0) * v.powi(k as i32) };
    let s1 = sum_positive_series(cubic, 3, SERIES_REL_TOL, 1_000_000)?;
    let s2 = sum_positive_series(factorial_part, 2, SERIES_REL_TOL, 1_000_000)?;
    let l = (1.0 / rho).ln();
    let second = 4.0 * (r + 2.0) / r / (l * l) * (1.0 / ((1.0 - rho) * (1.0 - rho)) + 4.0 / (1.0 - rho));
    Ok(m * (s1.upper() + s2.upper() + second))
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// The constants of the three error bounds for one envelope and radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundConstants {
    pub m: f64,
    pub a: f64,
    pub r: f64,
    /// Bound on `n·‖L*_n f - f‖_r`.
    pub c1: f64,
    /// Bound on `n²·‖L*_n f - f - z(z+2)f″/(2n)‖_r`; `None` unless `A(r+1) < 1`.
    pub c2: Option<f64>,
    /// The `ρ` inside `1/ln²(1/ρ)`, taken as `Ar`.
    pub rho: f64,
}

impl BoundConstants {
    pub fn new(envelope: &GrowthEnvelope, r: f64) -> Result<Self> {
        let (m, a) = (envelope.m(), envelope.a());
        let c1 = theoretical_c1(m, a, r)?;
        let c2 = if a * (r + 1.0) < 1.0 && r >= 1.0 {
            Some(theoretical_c2(m, a, r)?)
        } else {
            None
        };
        Ok(BoundConstants {
            m,
            a,
            r,
            c1,
            c2,
            rho: a * r,
        })
    }

    /// `p!·r₁·C1(r₁)/(r₁ - r)^{p+1}`.
    pub fn cderiv(&self, p: usize, r1: f64) -> Result<f64> {
        theoretical_cderiv(self.m, self.a, p, self.r, r1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c1_examples() {
        assert_eq!(theoretical_c1(1.0, 0.5, 1.0).unwrap(), 6.0);
        assert_eq!(theoretical_c1(2.0, 0.5, 1.0).unwrap(), 12.0);
        assert!((theoretical_c1(1.0, 0.5, 1.5).unwrap() - 31.5).abs() < 1e-12);
        assert!(theoretical_c1(1.0, 1e-9, 1.0).unwrap() < 1e-15);
        assert!(matches!(theoretical_c1(1.0, 0.5, 2.0), Err(Error::Divergence { .. })));
    }

    #[test]
    fn c1_matches_direct_sum() {
        for &(a, r) in &[(0.5, 1.0), (0.25, 3.0), (0.1, 1.5)] {
            let u: f64 = a * r;
            let direct: f64 = (2..2000).map(|k| (k as f64 + 1.0) * u.powi(k)).sum();
            let expected = (r + 2.0) / r * direct;
            assert!((theoretical_c1(1.0, a, r).unwrap() - expected).abs() < 1e-12 * expected);
        }
    }

    #[test]
    fn c2_examples() {
        let c2 = theoretical_c2(1.0, 0.4, 1.0).unwrap();
        assert!(c2.is_finite() && c2 > 0.0);
        // k = 2 term of the first series: (1/2)·0.8²·36
        let k2 = 0.5 * 0.8f64.powi(2) * remainder_bound_b(2, 1.0).unwrap();
        assert!((k2 - 11.52).abs() < 1e-12);
        assert!(c2 > k2);
        assert!((theoretical_c2(2.0, 0.4, 1.0).unwrap() - 2.0 * c2).abs() < 1e-12 * c2);
        assert!(matches!(theoretical_c2(1.0, 0.5, 1.0), Err(Error::Divergence { .. })));
    }

    #[test]
    fn c2_matches_direct_sum() {
        let (a, r) = (0.25, 1.0);
        let v: f64 = a * (r + 1.0);
        let direct: f64 = (2..150)
            .map(|k| (k as f64 - 1.0) / factorial(k) * v.powi(k as i32) * remainder_bound_b(k, r).unwrap())
            .sum();
        let rho: f64 = a * r;
        let l = (1.0 / rho).ln();
        let second = 4.0 * (r + 2.0) / r / (l * l) * (1.0 / (1.0 - rho).powi(2) + 4.0 / (1.0 - rho));
        let c2 = theoretical_c2(1.0, a, r).unwrap();
        assert!(c2 >= direct + second);
        assert!((c2 - direct - second).abs() < 1e-12 * c2);
    }

    #[test]
    fn cderiv_examples() {
        // 2!·1.5·31.5/0.5³
        let c = theoretical_cderiv(1.0, 0.5, 2, 1.0, 1.5).unwrap();
        assert!((c - 756.0).abs() < 1e-9);
        assert!(theoretical_cderiv(1.0, 0.5, 1, 1.5, 1.5).is_err());
        assert!(theoretical_cderiv(1.0, 0.5, 1, 1.0, 2.5).is_err());
    }
}
