//! Inclusion dependencies over databases whose tuples carry weights from a
//! positive commutative monoid.

pub mod chase;
pub mod entail;
pub mod error;
pub mod ind;
pub mod infer;
pub mod kdb;
pub mod monoid;
pub mod oracle;

pub use error::{Error, Result};
pub use ind::Ind;
pub use kdb::{KDatabase, KRelation, Schema, Tuple};
pub use monoid::{Element, MonoidSpec};
