//! Basic Horn functions H6 and H7: scalar q-calculus, truncated series
//! evaluation, and a numerical audit of their contiguous relations,
//! q-derivative formulas and q-difference equations.

pub mod cli;
pub mod error;
pub mod identities;
pub mod qcore;
pub mod report;
pub mod series;

pub use error::{QError, Result};
pub use qcore::{ComplexValue, QContext};
