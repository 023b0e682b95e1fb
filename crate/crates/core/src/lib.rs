//! Exact arithmetic for Lubin-Tate formal groups over p-adic fields,
//! Weil-number decision procedures, and torsion-finiteness verdicts.

pub mod arith;
pub mod poly;
mod qmat;
pub mod factor;
mod isolate;
pub mod padic;
pub mod series;
pub mod algebraic;
pub mod lubin_tate;
pub mod finiteness;
pub mod json;

pub use padic::{
    galois_closure_degree, make_field, norm_to_qp, q_p, teichmuller, LocalFieldModel, PadicError,
    PadicNumber, Valuation,
};
