//! Convergence studies over a grid of `n`, their serializations, and log-log order fits.

use rayon::prelude::*;
use serde::Serialize;

use super::bounds::BoundConstants;
use super::ApproxEngine;
use crate::analytic::{check_operator_hypotheses, AnalyticFunction};
use crate::error::{Error, Result};

pub const CSV_HEADER: &str = "n,sup_error,n_error,resid,n2_resid,bound_thm1,bound_thm2,K";
pub const DERIVATIVE_CSV_HEADER: &str = "n,deriv_error,n_error,bound,K";

/// Study parameters and bound constants shared by every row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyMeta {
    pub function: String,
    pub spec: String,
    pub r: f64,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "M")]
    pub m: f64,
    pub p: Option<usize>,
    pub r1: Option<f64>,
    /// Either an absolute value or the relative rule `<c>·C1/n`.
    pub truncation_tol: String,
    /// The `ρ` in the second-order constant, fixed to `Ar`.
    pub rho: f64,
    #[serde(rename = "C1")]
    pub c1: f64,
    #[serde(rename = "C2")]
    pub c2: Option<f64>,
    #[serde(rename = "Cderiv")]
    pub cderiv: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: u64,
    pub sup_error: f64,
    pub n_error: f64,
    pub resid: f64,
    pub n2_resid: f64,
    pub bound_thm1: f64,
    /// `C2/n²`, absent unless `A(r+1) < 1`.
    pub bound_thm2: Option<f64>,
    #[serde(rename = "K")]
    pub k: usize,
    /// Both the error and the residual polynomial vanish identically.
    pub exact: bool,
}

/// Rows sorted by `n`, each with `n > r + 2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceTable {
    pub meta: StudyMeta,
    pub rows: Vec<ConvergenceRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivativeRow {
    pub n: u64,
    pub deriv_error: f64,
    pub n_error: f64,
    /// `Cderiv/n`.
    pub bound: f64,
    #[serde(rename = "K")]
    pub k: usize,
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivativeTable {
    pub meta: StudyMeta,
    pub rows: Vec<DerivativeRow>,
}

/// Fit of `log(error)` against `log(n)`, or the signal that some error vanished exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OrderEstimate {
    Fit { slope: f64, r_squared: f64, points: usize },
    ExactReproduction,
}

/// 17 significant digits, `nan` for missing values.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:.16e}")
    }
}

fn opt(x: Option<f64>) -> f64 {
    x.unwrap_or(f64::NAN)
}

fn sorted_grid(f: &AnalyticFunction, r: f64, ns: &[u64]) -> Result<Vec<u64>> {
    let mut ns = ns.to_vec();
    ns.sort_unstable();
    ns.dedup();
    if ns.is_empty() {
        return Err(Error::InvalidArgument("empty n grid".into()));
    }
    for &n in &ns {
        check_operator_hypotheses(f.envelope(), r, n)?;
    }
    Ok(ns)
}

fn row_context(n: u64) -> impl Fn(Error) -> Error {
    move |e| Error::Row { n, source: Box::new(e) }
}

impl ApproxEngine {
    fn tol_label(&self) -> String {
        match self.config().truncation_tol {
            Some(t) => format_float(t),
            None => format!("{:e}·C1/n", self.config().relative_tol),
        }
    }

    fn meta(&self, f: &AnalyticFunction, r: f64, derivative: Option<(usize, f64)>) -> Result<StudyMeta> {
        let b = BoundConstants::new(f.envelope(), r)?;
        let cderiv = derivative.map(|(p, r1)| b.cderiv(p, r1)).transpose()?;
        Ok(StudyMeta {
            function: f.label().to_string(),
            spec: f.spec().to_string(),
            r,
            a: b.a,
            m: b.m,
            p: derivative.map(|(p, _)| p),
            r1: derivative.map(|(_, r1)| r1),
            truncation_tol: self.tol_label(),
            rho: b.rho,
            c1: b.c1,
            c2: b.c2,
            cderiv,
        })
    }

    /// One row per distinct `n`, computed in parallel; assembly is in ascending `n`.
    pub fn convergence_study(&self, f: &AnalyticFunction, r: f64, ns: &[u64]) -> Result<ConvergenceTable> {
        let ns = sorted_grid(f, r, ns)?;
        let meta = self.meta(f, r, None)?;
        let rows = ns
            .par_iter()
            .map(|&n| {
                let err = self.approx_error(f, n, r).map_err(row_context(n))?;
                let res = self.residual_unchecked(f, n, r).map_err(row_context(n))?;
                let nf = n as f64;
                Ok(ConvergenceRow {
                    n,
                    sup_error: err.value(),
                    n_error: nf * err.value(),
                    resid: res.value(),
                    n2_resid: nf * nf * res.value(),
                    bound_thm1: meta.c1 / nf,
                    bound_thm2: meta.c2.map(|c2| c2 / (nf * nf)),
                    k: err.truncation.max(res.truncation),
                    exact: err.exact_zero && res.exact_zero,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ConvergenceTable { meta, rows })
    }

    /// Per-`n` errors of the `p`-th derivative against `Cderiv/n`.
    pub fn derivative_study(
        &self,
        f: &AnalyticFunction,
        p: usize,
        r: f64,
        r1: f64,
        ns: &[u64],
    ) -> Result<DerivativeTable> {
        super::check_derivative_hypotheses(f, p, r, r1)?;
        let ns = sorted_grid(f, r, ns)?;
        let meta = self.meta(f, r, Some((p, r1)))?;
        let cderiv = meta.cderiv.unwrap_or(f64::NAN);
        let rows = ns
            .par_iter()
            .map(|&n| {
                let m = self.derivative_error(f, n, p, r, r1).map_err(row_context(n))?;
                Ok(DerivativeRow {
                    n,
                    deriv_error: m.value(),
                    n_error: n as f64 * m.value(),
                    bound: cderiv / n as f64,
                    k: m.truncation,
                    exact: m.exact_zero,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(DerivativeTable { meta, rows })
    }
}

fn plot_blocks(series: &[(&str, Vec<(u64, f64)>)]) -> String {
    let blocks: Vec<String> = series
        .iter()
        .map(|(name, points)| {
            let mut block = format!("# {name}\n");
            for (n, v) in points {
                block.push_str(&format!("{n} {}\n", format_float(*v)));
            }
            block
        })
        .collect();
    blocks.join("\n")
}

impl ConvergenceTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            let fields = [
                row.sup_error,
                row.n_error,
                row.resid,
                row.n2_resid,
                row.bound_thm1,
                opt(row.bound_thm2),
            ]
            .map(format_float)
            .join(",");
            out.push_str(&format!("{},{fields},{}\n", row.n, row.k));
        }
        out
    }

    /// JSON mirror of the table; `extra` is attached verbatim under `"config"`.
    pub fn to_json(&self, extra: Option<&serde_json::Value>) -> String {
        to_json_doc(self, extra)
    }

    pub fn to_plot(&self) -> String {
        let col = |g: fn(&ConvergenceRow) -> f64| self.rows.iter().map(|r| (r.n, g(r))).collect::<Vec<_>>();
        plot_blocks(&[
            ("sup_error", col(|r| r.sup_error)),
            ("n_error", col(|r| r.n_error)),
            ("resid", col(|r| r.resid)),
            ("n2_resid", col(|r| r.n2_resid)),
            ("bound_thm1", col(|r| r.bound_thm1)),
            ("bound_thm2", col(|r| opt(r.bound_thm2))),
        ])
    }

    /// `(n, sup_error)` pairs.
    pub fn error_points(&self) -> Vec<(u64, f64)> {
        self.rows.iter().map(|r| (r.n, r.sup_error)).collect()
    }

    pub fn residual_points(&self) -> Vec<(u64, f64)> {
        self.rows.iter().map(|r| (r.n, r.resid)).collect()
    }
}

impl DerivativeTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(DERIVATIVE_CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            let fields = [row.deriv_error, row.n_error, row.bound].map(format_float).join(",");
            out.push_str(&format!("{},{fields},{}\n", row.n, row.k));
        }
        out
    }

    pub fn to_json(&self, extra: Option<&serde_json::Value>) -> String {
        to_json_doc(self, extra)
    }

    pub fn to_plot(&self) -> String {
        let col = |g: fn(&DerivativeRow) -> f64| self.rows.iter().map(|r| (r.n, g(r))).collect::<Vec<_>>();
        plot_blocks(&[
            ("deriv_error", col(|r| r.deriv_error)),
            ("n_error", col(|r| r.n_error)),
            ("bound", col(|r| r.bound)),
        ])
    }

    pub fn error_points(&self) -> Vec<(u64, f64)> {
        self.rows.iter().map(|r| (r.n, r.deriv_error)).collect()
    }
}

fn to_json_doc<T: Serialize>(table: &T, extra: Option<&serde_json::Value>) -> String {
    let mut doc = serde_json::to_value(table).expect("tables serialize");
    if let (Some(extra), Some(obj)) = (extra, doc.as_object_mut()) {
        obj.insert("config".into(), extra.clone());
    }
    serde_json::to_string_pretty(&doc).expect("tables serialize")
}

/// Unweighted least squares of `log(error)` on `log(n)`.
///
/// With `exclude_below = Some(r)` rows with `n < 8(r+2)` are dropped first.
pub fn order_estimate(points: &[(u64, f64)], exclude_below: Option<f64>) -> Result<OrderEstimate> {
    if points.iter().any(|&(_, e)| e == 0.0) {
        return Ok(OrderEstimate::ExactReproduction);
    }
    let kept: Vec<(f64, f64)> = points
        .iter()
        .filter(|(n, _)| exclude_below.map_or(true, |r| *n as f64 >= 8.0 * (r + 2.0)))
        .map(|&(n, e)| ((n as f64).ln(), e.ln()))
        .collect();
    if kept.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "order fit needs at least 3 rows, got {}",
            kept.len()
        )));
    }
    if kept.iter().any(|(_, y)| !y.is_finite()) {
        return Err(Error::InvalidArgument("order fit needs positive finite errors".into()));
    }
    let len = kept.len() as f64;
    let mx = kept.iter().map(|p| p.0).sum::<f64>() / len;
    let my = kept.iter().map(|p| p.1).sum::<f64>() / len;
    let sxx: f64 = kept.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    let sxy: f64 = kept.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = kept.iter().map(|(_, y)| (y - my) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("order fit needs distinct n".into()));
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(OrderEstimate::Fit {
        slope,
        r_squared,
        points: kept.len(),
    })
}
