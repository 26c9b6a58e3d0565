//! Doubly transitive equiangular tight frames from finite-group data.
//!
//! The pipeline runs bottom-up: finite fields and matrix groups ([`field`],
//! [`group`]), exact arithmetic in `Z[C_r]` ([`cycalg`]), roux matrices and
//! their idempotents ([`roux`]), radicalization and Higman pairs
//! ([`radical`]), numeric certification of the resulting lines ([`lines`]),
//! and the built-in group families ([`families`]).

pub mod cycalg;
pub mod families;
pub mod field;
pub mod group;
pub mod lines;
pub mod radical;
pub mod roux;
