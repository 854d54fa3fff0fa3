//! Invariant suites over parameter grids, reported case by case.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::circle::{sup_norm_poly, SamplingConfig};
use crate::error::{Error, Result};
use crate::extended::Precision;
use crate::momentgen::{
    basis_identity_check, generate_t, lemma_bound, oracle_t, remainder_norm_bound, tail_inequality, OracleConfig,
    RemainderPoly,
};
use crate::ratpoly::{ratio, RationalPoly};

/// Relative slack allowed on the bound side of floating comparisons.
pub const BOUND_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    LemmaBound,
    Remainder,
    BasisIdentity,
    Oracle,
    TailInequality,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::LemmaBound,
        Suite::Remainder,
        Suite::BasisIdentity,
        Suite::Oracle,
        Suite::TailInequality,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::LemmaBound => "lemma-bound",
            Suite::Remainder => "remainder",
            Suite::BasisIdentity => "basis-identity",
            Suite::Oracle => "oracle",
            Suite::TailInequality => "tail-inequality",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown suite {s:?}")))
    }
}

/// Grid overrides; `None` selects the suite's default grid.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SuiteGrid {
    pub n: Option<Vec<u64>>,
    pub k: Option<Vec<usize>>,
    pub r: Option<Vec<f64>>,
    pub rho: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseResult {
    pub suite: Suite,
    /// The violating tuple on failure, e.g. `n=4 k=2 r=1`.
    pub case: String,
    pub passed: bool,
    /// Both sides of the checked relation.
    pub detail: String,
}

impl fmt::Display for CaseResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{verdict} {} {}: {}", self.suite.name(), self.case, self.detail)
    }
}

fn case(suite: Suite, case: String, passed: bool, detail: String) -> CaseResult {
    CaseResult {
        suite,
        case,
        passed,
        detail,
    }
}

fn inequality(suite: Suite, label: String, lhs: f64, rhs: f64) -> CaseResult {
    let passed = lhs <= rhs * (1.0 + BOUND_SLACK);
    case(suite, label, passed, format!("{lhs:.16e} <= {rhs:.16e}"))
}

fn e_k(k: usize) -> RationalPoly {
    RationalPoly::monomial(ratio(1, 1), k)
}

/// Runs one suite; cases come back in grid order.
pub fn run_suite(suite: Suite, grid: &SuiteGrid, sampling: &SamplingConfig) -> Result<Vec<CaseResult>> {
    match suite {
        Suite::LemmaBound => lemma_suite(grid, sampling),
        Suite::Remainder => remainder_suite(grid, sampling),
        Suite::BasisIdentity => Ok(basis_suite(grid)),
        Suite::Oracle => oracle_suite(grid),
        Suite::TailInequality => tail_suite(grid),
    }
}

fn radii(grid: &SuiteGrid) -> Vec<f64> {
    grid.r.clone().unwrap_or_else(|| vec![1.0, 1.5, 2.0])
}

/// `(n, r)` pairs with `n > r + 2`.
fn admissible(ns: &[u64], rs: &[f64]) -> Vec<(u64, f64)> {
    rs.iter()
        .flat_map(|&r| ns.iter().filter(move |&&n| n as f64 > r + 2.0).map(move |&n| (n, r)))
        .collect()
}

/// `‖T_{n,k} - e_k‖_r <= (r+2)(k+1)!r^{k-1}/n`.
fn lemma_suite(grid: &SuiteGrid, sampling: &SamplingConfig) -> Result<Vec<CaseResult>> {
    let ns = grid.n.clone().unwrap_or_else(|| (4..=20).collect());
    let ks = grid.k.clone().unwrap_or_else(|| (1..=10).collect());
    let k_max = ks.iter().copied().max().unwrap_or(0);
    let pairs = admissible(&ns, &radii(grid));
    let per_pair: Vec<Result<Vec<CaseResult>>> = pairs
        .par_iter()
        .map(|&(n, r)| {
            let table = generate_t(n, k_max)?;
            ks.iter()
                .filter(|&&k| k >= 1)
                .map(|&k| {
                    let d = table.get(k) - &e_k(k);
                    let lhs = sup_norm_poly(&d, r, sampling, Precision::Double)?.value;
                    Ok(inequality(
                        Suite::LemmaBound,
                        format!("n={n} k={k} r={r}"),
                        lhs,
                        lemma_bound(n, k, r)?,
                    ))
                })
                .collect()
        })
        .collect();
    flatten(per_pair)
}

/// The forced recurrence for `E_{k,n}` (exact) and `‖E_{k,n}‖_r <= (k-1)(r+1)^k B_{k,r}/n²`.
fn remainder_suite(grid: &SuiteGrid, sampling: &SamplingConfig) -> Result<Vec<CaseResult>> {
    let ns = grid.n.clone().unwrap_or_else(|| (3..=12).collect());
    let ks = grid.k.clone().unwrap_or_else(|| (2..=20).collect());
    let k_max = ks.iter().copied().max().unwrap_or(0);
    let rs = radii(grid);
    let per_n: Vec<Result<Vec<CaseResult>>> = ns
        .par_iter()
        .map(|&n| {
            let table = generate_t(n, k_max)?;
            let mut out = Vec::new();
            for &k in ks.iter().filter(|&&k| k >= 2) {
                let cur = RemainderPoly::from_table(&table, k);
                let prev = RemainderPoly::from_table(&table, k - 1);
                let ok = cur.follows_from(&prev);
                out.push(case(
                    Suite::Remainder,
                    format!("recurrence n={n} k={k}"),
                    ok,
                    if ok {
                        "exact"
                    } else {
                        "E_k differs from its recurrence image"
                    }
                    .into(),
                ));
                if k as u64 > n + 1 {
                    continue;
                }
                for &r in rs.iter().filter(|&&r| n as f64 > r + 2.0) {
                    let lhs = sup_norm_poly(&cur.e, r, sampling, Precision::Double)?.value;
                    let rhs = remainder_norm_bound(n, k, r)?;
                    out.push(inequality(
                        Suite::Remainder,
                        format!("bound n={n} k={k} r={r}"),
                        lhs,
                        rhs,
                    ));
                }
            }
            Ok(out)
        })
        .collect();
    flatten(per_n)
}

fn basis_suite(grid: &SuiteGrid) -> Vec<CaseResult> {
    let ns = grid.n.clone().unwrap_or_else(|| (1..=10).collect());
    let vs: Vec<u64> = grid
        .k
        .clone()
        .map(|k| k.into_iter().map(|v| v as u64).collect())
        .unwrap_or_else(|| (1..=10).collect());
    ns.iter()
        .flat_map(|&n| vs.iter().map(move |&v| (n, v)))
        .map(|(n, v)| {
            let ok = basis_identity_check(n, v);
            case(
                Suite::BasisIdentity,
                format!("n={n} v={v}"),
                ok,
                if ok { "identity holds" } else { "identity fails" }.into(),
            )
        })
        .collect()
}

fn oracle_suite(grid: &SuiteGrid) -> Result<Vec<CaseResult>> {
    let ns = grid.n.clone().unwrap_or_else(|| (3..=10).collect());
    let ks = grid.k.clone().unwrap_or_else(|| (0..=8).collect());
    let k_max = ks.iter().copied().max().unwrap_or(0);
    let cfg = OracleConfig::default();
    let per_n: Vec<Result<Vec<CaseResult>>> = ns
        .par_iter()
        .map(|&n| {
            let table = generate_t(n, k_max)?;
            ks.iter()
                .map(|&k| {
                    let o = oracle_t(n, k, &cfg)?;
                    let t = table.get(k);
                    let (ok, how) = match &o.exact {
                        Some(exact) => (exact == t, "exact rational match".to_string()),
                        None => (
                            o.agrees_with(t, cfg.accept_tol),
                            format!("agreement within {:e}", cfg.accept_tol),
                        ),
                    };
                    let detail = if ok {
                        how
                    } else {
                        format!("mismatch: oracle {:?} vs recurrence {t}", o.exact)
                    };
                    Ok(case(Suite::Oracle, format!("n={n} k={k}"), ok, detail))
                })
                .collect()
        })
        .collect();
    flatten(per_n)
}

fn tail_suite(grid: &SuiteGrid) -> Result<Vec<CaseResult>> {
    let rhos = grid.rho.clone().unwrap_or_else(|| vec![0.1, 0.5, 0.9]);
    let ns = grid.n.clone().unwrap_or_else(|| (1..=200).collect());
    let mut out = Vec::new();
    for &rho in &rhos {
        for &n in &ns {
            let (lhs, rhs) = tail_inequality(rho, n)?;
            let ok = lhs <= rhs;
            out.push(case(
                Suite::TailInequality,
                format!("rho={rho} n={n}"),
                ok,
                format!("{lhs:.16e} <= {rhs:.16e}"),
            ));
        }
    }
    Ok(out)
}

fn flatten(parts: Vec<Result<Vec<CaseResult>>>) -> Result<Vec<CaseResult>> {
    let mut out = Vec::new();
    for part in parts {
        out.extend(part?);
    }
    Ok(out)
}
