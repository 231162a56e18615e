//! The presheaf model of dependent type theory over finite base categories.
//!
//! Everything is tabulated: categories carry explicit composition tables,
//! presheaves carry per-arrow restriction tables, and types and terms in
//! context are finite families. Every law is therefore decidable, and the
//! [`rules`] module checks the structural and type-former rules of the model
//! exhaustively on small instances.

pub mod catcore;
pub mod cwf;
mod error;
pub mod formers;
pub mod io;
pub mod mutation;
pub mod par;
pub mod presheaf;
pub mod report;
pub mod rules;
pub mod surface;

pub use error::{Error, Result};
