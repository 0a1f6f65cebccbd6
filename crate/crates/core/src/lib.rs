//! Binary Berman and Dual Berman codes, their star products, and the
//! star-product t-private information retrieval scheme built from them.
//!
//! * [`gf2`]: packed bit vectors and matrices with row reduction.
//! * [`codes`]: linear codes kept in canonical generator form.
//! * [`berman`]: the two code families, their bases and parameters.
//! * [`star`]: star products and the family case analysis.
//! * [`pir`]: scheme derivation, scheduling, the simulated protocol and
//!   privacy checks.
//! * [`tables`] and [`verify`]: parameter tables and the invariant sweep used
//!   by the command-line tool.

pub mod berman;
pub mod codes;
pub mod error;
pub mod gf2;
pub mod pir;
pub mod star;
pub mod tables;
pub mod verify;

pub use berman::{BermanKind, BermanParams, IndexTuple};
pub use codes::LinearCode;
pub use error::{Error, Result};
pub use gf2::{BitMatrix, BitVector};
