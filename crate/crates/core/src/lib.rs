//! Exact computations around Stickelberger elements, Fitting ideals of class
//! groups and Eisenstein series over Q.

pub mod algebra;
pub mod arith;
pub mod cyclotomic;
pub mod eisenstein;
pub mod error;
pub mod fitting;
pub mod linalg;
pub mod quadratic;
pub mod ring;
pub mod stickelberger;
pub mod verify;

pub use error::{Error, Result};
