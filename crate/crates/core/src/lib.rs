//! Cyclotomic strongly regular graphs and Gauss sums over finite fields.

pub mod construct;
pub mod cycint;
pub mod error;
pub mod gauss;
pub mod gf;
pub mod relgauss;
pub mod residue;
pub mod verify;

pub use construct::{ConnectionSpec, HSet, Meta};
pub use cycint::CycInt;
pub use error::{Error, Result};
pub use gauss::TraceCountTable;
pub use gf::{build_field, FieldElement, FieldSpec, SubfieldEmbedding};
pub use verify::{CharProfile, SrgParams, Verdict, VerdictKind, VerifyOptions};
