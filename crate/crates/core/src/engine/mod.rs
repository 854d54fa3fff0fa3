//! The truncated operator `L*_n(f) = Σ_{k<=K} c_k T_{n,k}` applied to analytic
//! functions, with errors measured on circles and reported upper-faithfully:
//! every reported error is the sampled sup-norm plus a certified bound on the
//! neglected terms `k > K`.

mod bounds;
mod study;

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::analytic::{check_operator_hypotheses, derivative_fn, operator_truncation_index, AnalyticFunction};
use crate::circle::{sup_norm_poly, SamplingConfig, SupNorm};
use crate::error::{Error, Result};
use crate::extended::{Precision, DEFAULT_EXTENDED_BITS};
use crate::momentgen::{MomentCache, MomentTable, DEFAULT_MAX_INDEX};
use crate::ratpoly::RationalPoly;
use crate::series::{exponential_tail, linear_geometric_tail, sum_positive_series};

pub use bounds::{theoretical_c1, theoretical_c2, theoretical_cderiv, BoundConstants};
pub use study::{
    format_float, order_estimate, ConvergenceRow, ConvergenceTable, DerivativeRow, DerivativeTable, OrderEstimate,
    StudyMeta, CSV_HEADER, DERIVATIVE_CSV_HEADER,
};

/// Which arithmetic evaluates difference polynomials on the circle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrecisionPolicy {
    /// Double precision, redone in extended precision when the result is
    /// within a factor 10 of the Horner round-off estimate.
    #[default]
    Auto,
    Double,
    Extended,
}

#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct EngineConfig {
    pub sampling: SamplingConfig,
    /// Absolute truncation tolerance; `None` selects `relative_tol·C1/n`.
    pub truncation_tol: Option<f64>,
    pub relative_tol: f64,
    /// Largest moment index that may be generated.
    pub max_index: usize,
    pub precision: PrecisionPolicy,
    pub extended_bits: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            sampling: SamplingConfig::default(),
            truncation_tol: None,
            relative_tol: 1e-14,
            max_index: DEFAULT_MAX_INDEX,
            precision: PrecisionPolicy::Auto,
            extended_bits: DEFAULT_EXTENDED_BITS,
        }
    }
}

/// `L*_n(f)` truncated at `K`, with a bound on `Σ_{k>K} |c_k|·‖T_{n,k}‖_r`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorImage {
    pub poly: RationalPoly,
    pub truncation: usize,
    pub tail: f64,
}

/// A sup-norm on `|z| = r` of an exactly formed polynomial plus a truncation tail.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    pub sampled: f64,
    pub tail: f64,
    pub truncation: usize,
    pub points: usize,
    pub converged: bool,
    pub precision: Precision,
    /// The measured polynomial is identically zero and nothing was truncated.
    pub exact_zero: bool,
}

impl Measurement {
    /// `sampled + tail`.
    pub fn value(&self) -> f64 {
        self.sampled + self.tail
    }
}

/// `n·‖L*_n f - f‖_r / ‖z(z+2)f″/2‖_r`.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitCheck {
    pub ratio: f64,
    pub scaled_error: f64,
    pub limit_norm: f64,
}

#[derive(Debug, Clone, Copy)]
enum Tail {
    Error,
    Residual,
    Derivative(usize),
}

#[derive(Debug)]
pub struct ApproxEngine {
    config: EngineConfig,
    cache: Arc<MomentCache>,
}

impl Default for ApproxEngine {
    fn default() -> Self {
        Self::new(EngineConfig::default())
    }
}

impl ApproxEngine {
    pub fn new(config: EngineConfig) -> Self {
        let cache = Arc::new(MomentCache::new(config.max_index));
        ApproxEngine { config, cache }
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn cache(&self) -> &Arc<MomentCache> {
        &self.cache
    }

    /// The absolute truncation tolerance used at `(r, n)`.
    pub fn truncation_tol(&self, f: &AnalyticFunction, r: f64, n: u64) -> Result<f64> {
        if let Some(tol) = self.config.truncation_tol {
            return Ok(tol);
        }
        let env = f.envelope();
        Ok(self.config.relative_tol * theoretical_c1(env.m(), env.a(), r)? / n as f64)
    }

    fn table(&self, n: u64, k: usize) -> Result<Arc<MomentTable>> {
        self.cache.table(n, k)
    }

    /// Truncation index and the certified tail of the requested kind.
    fn truncation(&self, f: &AnalyticFunction, r: f64, n: u64, kind: Option<Tail>) -> Result<(usize, f64)> {
        check_operator_hypotheses(f.envelope(), r, n)?;
        if let Some(deg) = f.polynomial_degree() {
            return Ok((deg.unwrap_or(0), 0.0));
        }
        let tol = self.truncation_tol(f, r, n)?;
        let env = f.envelope();
        let start = operator_truncation_index(env, r, n, tol)?;
        let tail_at = |k: usize| -> Result<f64> {
            let u = env.a() * r;
            let lin = env.m() * (r + 2.0) / (n as f64 * r);
            Ok(match kind {
                None => crate::analytic::operator_tail(env, r, n, k),
                Some(Tail::Error) => lin * linear_geometric_tail(u, k + 1),
                // ‖E_{k,n}‖ <= ‖T_{n,k} - e_k‖ + k(k-1)(r+2)r^{k-1}/(2n) <= 2·lemma bound
                Some(Tail::Residual) => 2.0 * lin * linear_geometric_tail(u, k + 1),
                // Bernstein: ‖P^{(p)}‖_r <= (k/r)^p‖P‖_r for deg P <= k
                Some(Tail::Derivative(p)) => {
                    let term = |j: usize| (j as f64).powi(p as i32) * (j as f64 + 1.0) * u.powi(j as i32);
                    lin / r.powi(p as i32) * sum_positive_series(term, k + 1, 1e-3, 1_000_000)?.upper()
                }
            })
        };
        for k in start..=self.config.max_index {
            let tail = tail_at(k)?;
            if tail < tol {
                return Ok((k, tail));
            }
        }
        Err(Error::Truncation(format!(
            "tail above {tol:e} at the moment index cap {}",
            self.config.max_index
        )))
    }

    /// `P = Σ_{k<=K} c_k T_{n,k}` with `K` from [`operator_truncation_index`].
    pub fn apply_operator(&self, f: &AnalyticFunction, n: u64, r: f64) -> Result<OperatorImage> {
        let (k_max, tail) = self.truncation(f, r, n, None)?;
        let table = self.table(n, k_max)?;
        let poly = combine(f, &table, k_max, Part::Image);
        Ok(OperatorImage {
            poly,
            truncation: k_max,
            tail,
        })
    }

    /// `Σ_{k<=K} c_k (T_{n,k} - e_k)`, the exact truncated error polynomial.
    pub fn error_poly(&self, f: &AnalyticFunction, n: u64, k_max: usize) -> Result<RationalPoly> {
        Ok(combine(f, &*self.table(n, k_max)?, k_max, Part::Error))
    }

    /// `Σ_{k<=K} c_k E_{k,n}`, the exact truncated Voronovskaja residual polynomial.
    pub fn residual_poly(&self, f: &AnalyticFunction, n: u64, k_max: usize) -> Result<RationalPoly> {
        Ok(combine(f, &*self.table(n, k_max)?, k_max, Part::Residual))
    }

    /// Sup-norm on `|z| = r` under the configured precision policy.
    pub fn measure(&self, p: &RationalPoly, r: f64) -> Result<(SupNorm, Precision)> {
        let ext = Precision::Extended {
            bits: self.config.extended_bits,
        };
        match self.config.precision {
            PrecisionPolicy::Double => Ok((
                sup_norm_poly(p, r, &self.config.sampling, Precision::Double)?,
                Precision::Double,
            )),
            PrecisionPolicy::Extended => Ok((sup_norm_poly(p, r, &self.config.sampling, ext)?, ext)),
            PrecisionPolicy::Auto => {
                let s = sup_norm_poly(p, r, &self.config.sampling, Precision::Double)?;
                let roundoff = 4.0 * (p.degree().max(0) as f64 + 1.0) * f64::EPSILON * p.abs_majorant(r);
                if !p.is_zero() && s.value < 10.0 * roundoff {
                    Ok((sup_norm_poly(p, r, &self.config.sampling, ext)?, ext))
                } else {
                    Ok((s, Precision::Double))
                }
            }
        }
    }

    fn measurement(&self, p: &RationalPoly, r: f64, truncation: usize, tail: f64) -> Result<Measurement> {
        let (s, precision) = self.measure(p, r)?;
        Ok(Measurement {
            sampled: s.value,
            tail,
            truncation,
            points: s.points,
            converged: s.converged,
            precision,
            exact_zero: p.is_zero() && tail == 0.0,
        })
    }

    /// `‖L*_n f - f‖_r`, upper-faithful.
    pub fn approx_error(&self, f: &AnalyticFunction, n: u64, r: f64) -> Result<Measurement> {
        let (k_max, tail) = self.truncation(f, r, n, Some(Tail::Error))?;
        let d = self.error_poly(f, n, k_max)?;
        self.measurement(&d, r, k_max, tail)
    }

    /// `‖L*_n f - f - z(z+2)f″/(2n)‖_r`; requires `A(r+1) < 1`.
    pub fn voronovskaja_residual(&self, f: &AnalyticFunction, n: u64, r: f64) -> Result<Measurement> {
        let v = f.envelope().a() * (r + 1.0);
        if !(v < 1.0) {
            return Err(Error::hypothesis("A(r+1) < 1", v));
        }
        self.residual_unchecked(f, n, r)
    }

    /// The residual without the `A(r+1) < 1` hypothesis of its bound; only `rA < 1` is needed to measure it.
    pub fn residual_unchecked(&self, f: &AnalyticFunction, n: u64, r: f64) -> Result<Measurement> {
        let (k_max, tail) = self.truncation(f, r, n, Some(Tail::Residual))?;
        let e = self.residual_poly(f, n, k_max)?;
        self.measurement(&e, r, k_max, tail)
    }

    /// `‖[L*_n f]^{(p)} - f^{(p)}‖_r`; requires `1 <= r < r1 < 1/A` and `p >= 1`.
    pub fn derivative_error(&self, f: &AnalyticFunction, n: u64, p: usize, r: f64, r1: f64) -> Result<Measurement> {
        check_derivative_hypotheses(f, p, r, r1)?;
        let (k_max, tail) = self.truncation(f, r, n, Some(Tail::Derivative(p)))?;
        let d = self.error_poly(f, n, k_max)?.nth_derivative(p);
        self.measurement(&d, r, k_max, tail)
    }

    /// `n·approx_error / ‖z(z+2)f″/2‖_r`, which tends to 1.
    pub fn limit_check(&self, f: &AnalyticFunction, n: u64, r: f64) -> Result<LimitCheck> {
        if f.is_polynomial_of_degree_at_most(1) {
            return Err(Error::Degenerate(format!("{} has f″ = 0", f.label())));
        }
        let err = self.approx_error(f, n, r)?;
        let limit_norm = self.limit_norm(f, r)?;
        if limit_norm == 0.0 {
            return Err(Error::Degenerate(format!("‖z(z+2)f″/2‖ vanishes for {}", f.label())));
        }
        let scaled_error = n as f64 * err.value();
        Ok(LimitCheck {
            ratio: scaled_error / limit_norm,
            scaled_error,
            limit_norm,
        })
    }

    /// Sampled `‖z(z+2)f″(z)/2‖_r`, with `f″` truncated far below double precision.
    pub fn limit_norm(&self, f: &AnalyticFunction, r: f64) -> Result<f64> {
        let f2 = derivative_fn(f, 2)?;
        let k_max = match f2.polynomial_degree() {
            Some(deg) => deg.unwrap_or(0),
            None => {
                let env = f2.envelope();
                let scale = r * (r + 2.0) / 2.0 * env.m();
                (0..=self.config.max_index)
                    .find(|&k| scale * exponential_tail(env.a() * r, k + 1) < 1e-20)
                    .ok_or_else(|| Error::Truncation("f″ series does not settle".into()))?
            }
        };
        let half_z_z2 = RationalPoly::from_ratios(&[(0, 1), (1, 1), (1, 2)]);
        let g = &half_z_z2 * &f2.taylor_poly(k_max);
        Ok(self.measure(&g, r)?.0.value)
    }
}

/// Checks `p >= 1`, `1 <= r < r1` and `r1·A < 1`.
pub fn check_derivative_hypotheses(f: &AnalyticFunction, p: usize, r: f64, r1: f64) -> Result<()> {
    if p == 0 {
        return Err(Error::InvalidArgument("derivative order p must be >= 1".into()));
    }
    if !(r >= 1.0) {
        return Err(Error::hypothesis("r >= 1", r));
    }
    if !(r1 > r) {
        return Err(Error::InvalidArgument(format!(
            "requires r < r1; got r = {r}, r1 = {r1}"
        )));
    }
    let u1 = f.envelope().a() * r1;
    if !(u1 < 1.0) {
        return Err(Error::hypothesis("r1 < 1/A", format!("r1·A = {u1}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Part {
    /// `T_{n,k}`
    Image,
    /// `T_{n,k} - e_k`
    Error,
    /// `E_{k,n} = T_{n,k} - e_k - k(k-1)(z+2)z^{k-1}/(2n)`
    Residual,
}

/// `Σ_{k<=K} c_k·part_k`, accumulated over the common denominator `lcm(den c_k)·n^K`
/// from the integer tables `n^k·T_{n,k}`.
fn combine(f: &AnalyticFunction, table: &MomentTable, k_max: usize, part: Part) -> RationalPoly {
    let n = BigInt::from(table.n());
    let coeffs: Vec<BigRational> = (0..=k_max).map(|k| f.coeff(k)).collect();
    let lcm = coeffs
        .iter()
        .filter(|c| !c.is_zero())
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let mut n_pows = vec![BigInt::one()];
    for k in 1..=k_max {
        let next = &n_pows[k - 1] * &n;
        n_pows.push(next);
    }
    let mut acc = vec![BigInt::zero(); k_max + 1];
    for (k, c) in coeffs.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let w = c.numer() * (&lcm / c.denom()) * &n_pows[k_max - k];
        for (j, u) in table.scaled(k).iter().enumerate() {
            if !u.is_zero() {
                acc[j] += &w * u;
            }
        }
        if part != Part::Image {
            acc[k] -= &w * &n_pows[k];
        }
        if part == Part::Residual && k >= 2 {
            // n^k·k(k-1)(z+2)z^{k-1}/(2n) = (k(k-1)/2)·n^{k-1}·(z^k + 2z^{k-1})
            let v = &w * BigInt::from(k * (k - 1) / 2) * &n_pows[k - 1];
            acc[k - 1] -= &v * 2;
            acc[k] -= v;
        }
    }
    let den = lcm * &n_pows[k_max];
    RationalPoly::from_coeffs(acc.into_iter().map(|a| BigRational::new(a, den.clone())).collect())
}
