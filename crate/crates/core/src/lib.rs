//! A kernel and term generator for CaTT, the dependent type theory of weak
//! globular ω-categories.
//!
//! The crate is organised bottom-up:
//!
//! * [`syntax`]: hash-consed terms, types, contexts and substitutions;
//! * [`pasting`]: Batanin trees, boundaries and canonical composites;
//! * [`kernel`]: the typing judgements;
//! * [`metaops`]: suspension, opposites, inverses and lifting;
//! * [`padding`]: filtrations, paddings, repaddings and their coherences;
//! * [`eckmann_hilton`]: the Eckmann-Hilton cells;
//! * [`cli`]: the `.catt` script language and its printers.

// Terms carry lazily filled caches but hash and compare by identity.
#![allow(clippy::mutable_key_type)]

pub mod cli;
pub mod eckmann_hilton;
pub mod kernel;
pub mod metaops;
pub mod padding;
pub mod pasting;
pub mod syntax;
