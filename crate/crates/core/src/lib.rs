//! Complex Baskakov–Szász–Durrmeyer operators on compact disks.
//!
//! The moment polynomials `T_{n,k} = L_n(e_k)` are generated exactly over the
//! rationals, the truncated operator `L*_n(f) = Σ c_k T_{n,k}` is applied to
//! analytic functions with an exponential-growth envelope, and the resulting
//! errors are measured on circles and compared with the theoretical bounds.

// `!(x < y)` is deliberate: NaN parameters must fail hypothesis checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod circle;
pub mod engine;
pub mod error;
pub mod extended;
pub mod momentgen;
pub mod ratpoly;
pub mod series;
pub mod suites;

pub use analytic::{AnalyticFunction, GrowthEnvelope};
pub use circle::{sup_norm_on_circle, sup_norm_poly, CirclePoint, SamplingConfig, SupNorm};
pub use engine::{ApproxEngine, BoundConstants, ConvergenceTable, EngineConfig, OrderEstimate};
pub use error::{Error, Result};
pub use extended::Precision;
pub use momentgen::{generate_t, oracle_t, MomentCache, MomentTable};
pub use ratpoly::RationalPoly;
