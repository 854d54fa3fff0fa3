//! Exact generation of the moment polynomials `T_{n,k} = L_n(e_k)`, the
//! recurrence-free oracle used to cross-check them, and the Voronovskaja
//! remainder objects with their bound constants.

mod basis;
mod oracle;
mod remainder;
mod table;

pub use basis::{basis_identity_check, moment_integral, BasisFunction};
pub use oracle::{operator_series_at, oracle_abscissae, oracle_t, OracleConfig, OracleResult};
pub use remainder::{
    build_remainder, forcing_term, lemma_bound, remainder_bound_b, remainder_norm_bound, tail_inequality,
    voronovskaja_term, RemainderPoly,
};
pub use table::{generate_t, recurrence_step, MomentCache, MomentTable, DEFAULT_MAX_INDEX};
