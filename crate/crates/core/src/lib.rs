//! Computable pieces of the measure-theoretic constructions behind
//! tau-topologies on the real line.
//!
//! * [`measures`]: CDFs, quantile transforms, exact `L^1` distances and
//!   characteristic functions of finitely represented measures.
//! * [`product_measures`]: parameter sequences in `(0, 1/4)^N`, the product
//!   measures on `{-1, 0, 1}^N`, their dyadic pushforwards and enclosed
//!   characteristic functions.
//! * [`tau_metrics`]: the metrics `d_a`, dyadic series bounds and topology
//!   separation searches.
//! * [`faw_params`]: pointwise symbols of the parameter pair `(J, T_mu)`.

pub mod bracket;
pub mod error;
pub mod faw_params;
pub mod fixtures;
pub mod measures;
pub mod oracle;
pub mod product_measures;
pub mod real;
pub mod slack;
pub mod suite;
pub mod tau_metrics;

pub use bracket::{Bracket, Decision};
pub use error::{Error, Result};
pub use faw_params::{build_faw_symbol, check_domain_relations, FawSymbol};
pub use measures::{l1_quantile_distance, mix, Atom, Measure, Piece};
pub use product_measures::{
    char_fn_product, mu_a_sample, sample_nu, ParamSeq, TailRule, TritPrefix,
};
pub use tau_metrics::{
    d_a, d_a_dyadic_sq, d_z, find_null_dyadic, l1_param_distance, phi0, separation_witness,
    two_sided_bounds,
};
