//! Sparse-resultant solver generator for polynomial systems.
//!
//! The offline part ([`resgen`]) turns a [`poly::SystemTemplate`] into a
//! [`resgen::SolverPlan`]; the online part ([`runtime`]) fills the plan with
//! numeric coefficients and solves a small eigenvalue problem.

pub mod bridge;
pub mod geom;
pub mod oracle;
pub mod library;
pub mod linalg;
pub mod poly;
pub mod resgen;
pub mod runtime;
