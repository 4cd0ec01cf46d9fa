// Negated comparisons are used on purpose so NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod csv;
pub mod designer;
pub mod dynamics;
pub mod error;
pub mod ion_map;
pub mod ode;
pub mod quadrature;
pub mod sensitivity;
pub mod schedules;
pub mod spatial;
pub mod spinor;

pub use error::{Error, Result};
