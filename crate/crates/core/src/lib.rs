//! Decision procedures for mixed real/integer linear arithmetic and for the
//! existence of infinite chains in transitive mixed linear relations.
//!
//! The pipeline for [`omega::has_omega_chain`]: separate the relation into
//! pure dense and pure discrete constraints over `x = x.int + x.frac`,
//! eliminate congruences by residue classes, then search per disjunct for a
//! mode vector whose dense limit formula and discrete Presburger formula are
//! both satisfiable.

pub mod budget;
pub mod error;
pub mod formula;
pub mod harness;
pub mod omega;
pub mod parser;
pub mod poly;
pub mod presburger;
pub(crate) mod qe;
pub mod real_qe;
pub(crate) mod sat;
pub mod separation;
pub mod relation;

pub use error::{Error, ParseError, Result};
pub use formula::{Assignment, Atom, Formula, LinTerm, RatTerm, Sort, Var};
pub use relation::Relation;
