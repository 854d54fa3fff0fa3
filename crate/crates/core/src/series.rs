//! Certified tails of positive series.

use crate::error::{Error, Result};

/// Partial sum of a positive series plus a rigorous bound on what was left out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesSum {
    pub partial: f64,
    pub tail: f64,
    /// Number of explicitly summed terms.
    pub terms: usize,
}

impl SeriesSum {
    pub fn upper(&self) -> f64 {
        self.partial + self.tail
    }
}

/// Ratio below which a term-ratio recurrence is treated as settled.
pub const RATIO_CUTOFF: f64 = 0.9;

/// Sums `term(start) + term(start+1) + …` for a positive series whose term ratio
/// `term(k+1)/term(k)` is nonincreasing once it has dropped below one.
///
/// Summation stops at the first `k` with ratio `q < 1` and geometric tail
/// `term(k+1)/(1-q)` below `rel_tol` times the partial sum.
pub fn sum_positive_series<F>(term: F, start: usize, rel_tol: f64, max_terms: usize) -> Result<SeriesSum>
where
    F: Fn(usize) -> f64,
{
    let mut partial = 0.0;
    let mut current = term(start);
    for k in start..start + max_terms {
        partial += current;
        let next = term(k + 1);
        if !next.is_finite() || next < 0.0 {
            return Err(Error::Truncation(format!("term {} is {next}", k + 1)));
        }
        if next == 0.0 {
            return Ok(SeriesSum {
                partial,
                tail: 0.0,
                terms: k + 1 - start,
            });
        }
        if current > 0.0 {
            let q = next / current;
            if q < 1.0 {
                let tail = next / (1.0 - q);
                if tail <= rel_tol * partial {
                    return Ok(SeriesSum {
                        partial,
                        tail,
                        terms: k + 1 - start,
                    });
                }
            }
        }
        current = next;
    }
    Err(Error::Truncation(format!(
        "tail not below {rel_tol:e} of the partial sum within {max_terms} terms"
    )))
}

/// `Σ_{k >= from} (k+1)·u^k` for `0 <= u < 1`, in closed form.
pub fn linear_geometric_tail(u: f64, from: usize) -> f64 {
    debug_assert!((0.0..1.0).contains(&u));
    let head = u.powi(from as i32);
    head * ((from as f64 + 1.0) / (1.0 - u) + u / ((1.0 - u) * (1.0 - u)))
}

/// Majorant `x^from/from!·e^x` of `Σ_{k >= from} x^k/k!` for `x >= 0`.
pub fn exponential_tail(x: f64, from: usize) -> f64 {
    let mut t = 1.0;
    for k in 1..=from {
        t *= x / k as f64;
    }
    t * x.exp()
}
