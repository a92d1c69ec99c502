pub mod algebra;
pub mod code;
pub mod decoder;
pub mod error;
pub mod hse;
pub mod periodic;
pub mod pipeline;
pub mod tower;

pub use error::{Error, Result};
