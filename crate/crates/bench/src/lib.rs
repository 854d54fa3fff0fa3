//! Criterion benchmarks for moment generation and operator application.
//!
//! The shared fixtures live here so the bench targets stay declarative.

use baskakov_core::analytic::make_exponential;
use baskakov_core::ratpoly::ratio;
use baskakov_core::{AnalyticFunction, ApproxEngine, EngineConfig};

/// `(n, K)` pairs covering the small, typical and largest tables the experiments build.
pub const TABLE_SIZES: [(u64, usize); 4] = [(8, 16), (64, 32), (256, 64), (2048, 64)];

/// `n` values used for whole-pipeline error measurements.
pub const ERROR_GRID: [u64; 3] = [16, 128, 1024];

pub fn exp_half() -> AnalyticFunction {
    make_exponential(ratio(1, 2)).expect("1/2 is an admissible rate")
}

/// An engine with no shared table cache, so each iteration pays for generation.
pub fn cold_engine() -> ApproxEngine {
    ApproxEngine::new(EngineConfig::default())
}
