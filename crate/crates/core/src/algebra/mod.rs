//! Finite fields, extension towers, series and linear algebra.

pub mod ext;
pub mod field;
pub mod linalg;
pub mod poly;
pub mod series;
pub mod wide;

pub use ext::{extension_tower, Backend, BigField, BinaryExt, ExtField, PolyExt};
pub use field::{Fe, Field};
pub use linalg::{AffineSpace, Matrix};
pub use series::{Laurent, Scalars, Series};
pub use wide::{WideExtension, WideField};
