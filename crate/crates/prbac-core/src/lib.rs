//! Parameterized role-based access control over an XACML 1.0 subset.
//!
//! The pipeline: a declarative model document (users, parameterized
//! roles, services, assignments) is validated ([`model`]), compiled
//! into layered PolicySets ([`compiler`]), serialized to XML
//! ([`xml`]), and evaluated by the built-in decision point ([`pdp`]).
//! The [`model`] module also carries a brute-force oracle that defines
//! the intended decisions independently of the compiled policies — the
//! two are checked against each other exhaustively in tests. The
//! optional two-phase activation flow with keyed-hash tokens lives in
//! [`actor`].

pub mod actor;
pub mod batch;
pub mod compiler;
pub mod ir;
pub mod loader;
pub mod model;
pub mod pdp;
pub mod sample;
pub mod xml;

pub use ir::{Decision, RequestCtx, ResponseCtx, Status};
pub use model::ModelDocument;
pub use pdp::{decide, PolicyStore};
