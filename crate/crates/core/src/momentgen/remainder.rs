//! Voronovskaja remainder polynomials and the moment error bounds.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use super::table::{generate_t, MomentTable};
use crate::error::{Error, Result};
use crate::ratpoly::RationalPoly;

/// `E_{k,n}` together with its forcing term `X_{k,n}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RemainderPoly {
    pub k: usize,
    pub n: u64,
    /// `T_{n,k} - e_k - k(k-1)(z+2)z^{k-1}/(2n)`.
    pub e: RationalPoly,
    /// `X_{k,n}`.
    pub x: RationalPoly,
}

fn q(p: i64, d: &BigInt) -> BigRational {
    BigRational::new(BigInt::from(p), d.clone())
}

/// `k(k-1)(z+2)z^{k-1}/(2n)`, the first-order term of `T_{n,k} - e_k`.
pub fn voronovskaja_term(n: u64, k: usize) -> RationalPoly {
    if k < 2 {
        return RationalPoly::zero();
    }
    let c = (k * (k - 1)) as i64;
    let den = BigInt::from(2 * n);
    RationalPoly::from_coeffs(vec![q(2 * c, &den), q(c, &den)]).shift(k - 1)
}

/// `X_{k,n} = z^{k-2}/(2n²)·[(k-1)²(k-2)z² + 2(k-1)(k-2)(2k-3)z + 2(k-1)(k-2)(2k-3)]`,
/// zero for `k <= 2`.
pub fn forcing_term(n: u64, k: usize) -> RationalPoly {
    if k <= 2 {
        return RationalPoly::zero();
    }
    let k = k as i64;
    let quad = (k - 1) * (k - 1) * (k - 2);
    let lin = 2 * (k - 1) * (k - 2) * (2 * k - 3);
    let den = BigInt::from(2 * n * n);
    RationalPoly::from_coeffs(vec![q(lin, &den), q(lin, &den), q(quad, &den)]).shift(k as usize - 2)
}

impl RemainderPoly {
    pub fn from_table(table: &MomentTable, k: usize) -> Self {
        let n = table.n();
        let e_k = RationalPoly::monomial(BigRational::from_integer(1.into()), k);
        let e = &(table.get(k) - &e_k) - &voronovskaja_term(n, k);
        RemainderPoly {
            k,
            n,
            e,
            x: forcing_term(n, k),
        }
    }

    /// Checks `E_k = z(1+z)/n·E'_{k-1} + (nz+k-1)/n·E_{k-1} + X_k` exactly.
    pub fn follows_from(&self, prev: &RemainderPoly) -> bool {
        if prev.n != self.n || prev.k + 1 != self.k {
            return false;
        }
        let n = self.n;
        let inv_n = BigRational::new(1.into(), BigInt::from(n));
        let z_one_plus_z = RationalPoly::from_integers(&[0, 1, 1]);
        let linear = RationalPoly::from_integers(&[prev.k as i64, n as i64]);
        let rhs = &(&(&z_one_plus_z * &prev.e.derivative()) + &(&linear * &prev.e)).scale(&inv_n) + &self.x;
        rhs == self.e
    }
}

/// `E_{k,n}` and `X_{k,n}` from a freshly generated moment table.
pub fn build_remainder(n: u64, k: usize) -> Result<RemainderPoly> {
    Ok(RemainderPoly::from_table(&generate_t(n, k)?, k))
}

fn factorial(m: usize) -> f64 {
    (1..=m)
        .map(BigInt::from)
        .product::<BigInt>()
        .to_f64()
        .unwrap_or(f64::INFINITY)
}

/// `(r+2)·(k+1)!·r^{k-1}/n`, the induction bound on `‖T_{n,k} - e_k‖_r`.
pub fn lemma_bound(n: u64, k: usize, r: f64) -> Result<f64> {
    if !(n as f64 > r + 2.0) {
        return Err(Error::hypothesis("n > r + 2", format!("n = {n}, r = {r}")));
    }
    if k == 0 {
        return Err(Error::InvalidArgument("lemma bound needs k >= 1".into()));
    }
    if r < 1.0 {
        return Err(Error::hypothesis("r >= 1", r));
    }
    Ok((r + 2.0) * factorial(k + 1) * r.powi(k as i32 - 1) / n as f64)
}

/// `B_{k,r} = (k-1)²(k-2)r² + 2(k-1)(k-2)(2k-3)(r+1) + (r+1)(r+2)(k+1)!`.
pub fn remainder_bound_b(k: usize, r: f64) -> Result<f64> {
    if k < 2 {
        return Err(Error::InvalidArgument("B_{k,r} needs k >= 2".into()));
    }
    let kf = k as f64;
    let a = (kf - 1.0).powi(2) * (kf - 2.0) * r * r + 2.0 * (kf - 1.0) * (kf - 2.0) * (2.0 * kf - 3.0) * (r + 1.0);
    Ok(a + (r + 1.0) * (r + 2.0) * factorial(k + 1))
}

/// `(k-1)(r+1)^k·B_{k,r}/n²`, the bound on `‖E_{k,n}‖_r` for `2 <= k <= n+1`.
pub fn remainder_norm_bound(n: u64, k: usize, r: f64) -> Result<f64> {
    if !(n as f64 > r + 2.0) {
        return Err(Error::hypothesis("n > r + 2", format!("n = {n}, r = {r}")));
    }
    if k as u64 > n + 1 {
        return Err(Error::hypothesis("k <= n + 1", format!("k = {k}, n = {n}")));
    }
    let b = remainder_bound_b(k, r)?;
    Ok((k as f64 - 1.0) * (r + 1.0).powi(k as i32) * b / (n as f64 * n as f64))
}

/// Both sides of `ρ^n <= 2/(n²·ln²(1/ρ))` for `0 < ρ < 1`.
pub fn tail_inequality(rho: f64, n: u64) -> Result<(f64, f64)> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::hypothesis("0 < ρ < 1", rho));
    }
    let nf = n as f64;
    let l = (1.0 / rho).ln();
    Ok((rho.powi(n as i32), 2.0 / (nf * nf * l * l)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratpoly::ratio;

    #[test]
    fn quadratic_remainder_vanishes() {
        for n in [1, 3, 10, 57] {
            let rem = build_remainder(n, 2).unwrap();
            assert!(rem.e.is_zero());
            assert!(rem.x.is_zero());
        }
        assert!(build_remainder(4, 0).unwrap().e.is_zero());
        assert!(build_remainder(4, 1).unwrap().e.is_zero());
    }

    #[test]
    fn cubic_remainder_closed_form() {
        for n in [3i64, 10, 100] {
            let n2 = n * n;
            let expected = RationalPoly::from_ratios(&[(0, 1), (6, n2), (6, n2), (2, n2)]);
            let rem = build_remainder(n as u64, 3).unwrap();
            assert_eq!(rem.e, expected);
            // X_{3,n} = z/(2n²)·(4z² + 12z + 12), equal to E_{3,n} because E_{2,n} = 0
            assert_eq!(rem.x, expected);
        }
    }

    #[test]
    fn remainder_recurrence_is_exact() {
        for n in 3..=12u64 {
            let table = generate_t(n, 20).unwrap();
            let mut prev = RemainderPoly::from_table(&table, 1);
            for k in 2..=20 {
                let cur = RemainderPoly::from_table(&table, k);
                assert!(cur.follows_from(&prev), "n={n} k={k}");
                assert!(cur.e.degree() <= k as isize);
                prev = cur;
            }
        }
    }

    #[test]
    fn lemma_bound_examples() {
        assert!((lemma_bound(10, 1, 1.0).unwrap() - 0.6).abs() < 1e-15);
        assert!((lemma_bound(10, 2, 1.0).unwrap() - 1.8).abs() < 1e-15);
        assert!(lemma_bound(3, 2, 1.0).is_err());
        assert!(lemma_bound(4, 2, 2.0).is_err());
    }

    #[test]
    fn b_constant_examples() {
        assert_eq!(remainder_bound_b(2, 1.0).unwrap(), 36.0);
        assert_eq!(remainder_bound_b(3, 1.0).unwrap(), 172.0);
        let r = 1.7;
        assert!((remainder_bound_b(2, r).unwrap() - 6.0 * (r + 1.0) * (r + 2.0)).abs() < 1e-12);
        for k in 2..30 {
            for r in [1.0, 1.5, 2.0, 5.0] {
                assert!(remainder_bound_b(k, r).unwrap() > 0.0);
            }
        }
        assert!(remainder_bound_b(1, 1.0).is_err());
    }

    #[test]
    fn tail_inequality_grid() {
        for rho in [0.1, 0.5, 0.9] {
            for n in 1..=200 {
                let (lhs, rhs) = tail_inequality(rho, n).unwrap();
                assert!(lhs <= rhs, "rho={rho} n={n}");
            }
        }
        assert!(tail_inequality(1.0, 3).is_err());
    }

    #[test]
    fn voronovskaja_term_shape() {
        // k = 3, n = 4: 6(z+2)z²/8 = 3/4 z³ + 3/2 z²
        assert_eq!(
            voronovskaja_term(4, 3),
            RationalPoly::from_coeffs(vec![ratio(0, 1), ratio(0, 1), ratio(3, 2), ratio(3, 4)])
        );
    }
}
