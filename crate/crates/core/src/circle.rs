//! Sup-norm estimation on circles `|z| = r`.
//!
//! For a function analytic on the closed disk the maximum modulus is attained
//! on the boundary, so `‖f‖_r` is estimated as the maximum of `|f|` over an
//! equispaced angular grid. The grid is doubled until the estimate settles.
//! The result is always a lower estimate of the true maximum.

use std::f64::consts::TAU;

use astro_float::Consts;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::extended::{ExtComplex, Precision};
use crate::ratpoly::{horner_f64, RationalPoly};

/// A sample point `r·e^{iθ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CirclePoint {
    pub radius: f64,
    pub angle: f64,
    pub value: Complex64,
}

impl CirclePoint {
    pub fn new(radius: f64, angle: f64) -> Self {
        let angle = angle.rem_euclid(TAU);
        CirclePoint {
            radius,
            angle,
            value: Complex64::from_polar(radius, angle),
        }
    }

    /// The `j`-th of `count` equispaced points; `j = 0` is exactly `r + 0i`.
    pub fn grid(radius: f64, j: usize, count: usize) -> Self {
        Self::new(radius, TAU * j as f64 / count as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SamplingConfig {
    /// Number of points in the first grid.
    pub initial_points: usize,
    /// Stop once successive estimates differ by less than this, relatively.
    pub rel_tol: f64,
    /// Upper limit on the grid size.
    pub max_points: usize,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        SamplingConfig {
            initial_points: 1024,
            rel_tol: 1e-9,
            max_points: 1 << 20,
        }
    }
}

/// Result of a sampled sup-norm.
#[derive(Debug, Clone, PartialEq)]
pub struct SupNorm {
    pub value: f64,
    /// Grid size of the final estimate.
    pub points: usize,
    /// Whether the relative-change criterion was met before `max_points`.
    pub converged: bool,
    /// Estimate after each grid size, starting from `initial_points`.
    pub history: Vec<f64>,
}

/// Estimates `max_{|z|=r} |f(z)|` by grid refinement.
pub fn sup_norm_on_circle<F>(f: F, r: f64, config: &SamplingConfig) -> Result<SupNorm>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    refine(r, config, |j, count| f(CirclePoint::grid(r, j, count).value))
}

/// Sup-norm of an exact polynomial on `|z| = r`, evaluated with the given arithmetic.
pub fn sup_norm_poly(p: &RationalPoly, r: f64, config: &SamplingConfig, precision: Precision) -> Result<SupNorm> {
    if p.is_zero() {
        check_radius(r)?;
        return Ok(SupNorm {
            value: 0.0,
            points: config.initial_points,
            converged: true,
            history: vec![0.0],
        });
    }
    match precision {
        Precision::Double => {
            let coeffs = p.to_f64_coeffs();
            sup_norm_on_circle(|z| horner_f64(&coeffs, z), r, config)
        }
        Precision::Extended { bits } => refine_ext(r, config, |z| p.eval_ext(z, bits), bits),
    }
}

fn check_radius(r: f64) -> Result<()> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "circle radius must be positive, got {r}"
        )));
    }
    Ok(())
}

fn refine<G>(r: f64, config: &SamplingConfig, sample: G) -> Result<SupNorm>
where
    G: Fn(usize, usize) -> Complex64 + Sync,
{
    check_radius(r)?;
    let modulus = |j: usize, count: usize| -> Result<f64> {
        let w = sample(j, count);
        if w.re.is_finite() && w.im.is_finite() {
            Ok(w.norm())
        } else {
            let z = CirclePoint::grid(r, j, count).value;
            Err(Error::EvaluationFailure { re: z.re, im: z.im })
        }
    };
    refine_with(config, |indices, count| {
        let values: Vec<Result<f64>> = indices.into_par_iter().map(|j| modulus(j, count)).collect();
        max_of(values)
    })
}

fn refine_ext<G>(r: f64, config: &SamplingConfig, eval: G, bits: usize) -> Result<SupNorm>
where
    G: Fn(&ExtComplex) -> ExtComplex + Sync,
{
    check_radius(r)?;
    refine_with(config, |indices, count| {
        let values: Vec<Result<f64>> = indices
            .into_par_iter()
            .map_init(
                || Consts::new().expect("astro-float constant cache"),
                |cc, j| {
                    let z = ExtComplex::on_circle(r, j, count, bits, cc);
                    let w = eval(&z).to_c64();
                    if w.re.is_finite() && w.im.is_finite() {
                        Ok(w.norm())
                    } else {
                        let z = z.to_c64();
                        Err(Error::EvaluationFailure { re: z.re, im: z.im })
                    }
                },
            )
            .collect();
        max_of(values)
    })
}

// The first failing index wins so errors are reproducible under parallel evaluation.
fn max_of(values: Vec<Result<f64>>) -> Result<f64> {
    let mut best = 0.0f64;
    for v in values {
        best = best.max(v?);
    }
    Ok(best)
}

/// Doubling driver; `max_over(indices, count)` returns the max over the given
/// indices of the `count`-point grid. Each doubling only samples the new odd indices.
fn refine_with<M>(config: &SamplingConfig, max_over: M) -> Result<SupNorm>
where
    M: Fn(Vec<usize>, usize) -> Result<f64>,
{
    let mut count = config.initial_points.max(1);
    let mut value = max_over((0..count).collect(), count)?;
    let mut history = vec![value];
    loop {
        let next = count * 2;
        if next > config.max_points {
            return Ok(SupNorm {
                value,
                points: count,
                converged: false,
                history,
            });
        }
        let fresh = max_over((1..next).step_by(2).collect(), next)?;
        let refined = value.max(fresh);
        history.push(refined);
        let change = if refined == 0.0 {
            0.0
        } else {
            (refined - value) / refined
        };
        value = refined;
        count = next;
        if change < config.rel_tol {
            return Ok(SupNorm {
                value,
                points: count,
                converged: true,
                history,
            });
        }
    }
}
