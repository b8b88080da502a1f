//! Exact symbolic engine for derivations and 1-foliations on affine space
//! over prime fields F_p: classification of vector fields, rings of
//! constants, blow-up pullbacks and discrepancies, log-canonicity and
//! F-purity tests, quotient singularity-class bookkeeping, and fiberwise
//! analysis of one-parameter families.

pub mod error;
pub mod field;
pub mod linalg;
pub mod parse;
pub mod sampling;
pub mod poly;

pub mod birational;
pub mod constants;
pub mod corpus;
pub mod derivation;
pub mod families;
pub mod ledger;
pub mod singularity;

pub use error::{EngineError, Result};
pub use field::FpScalar;
pub use poly::{monomial_content, monomials_up_to, ExponentVec, Poly, Ring};

pub use derivation::{Classification, CoactionKind, Derivation, PClosure};
