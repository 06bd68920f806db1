pub mod cli;
pub mod cocycle;
pub mod decomposition;
pub mod error;
pub mod hodge;
pub mod isogeny;
pub mod json;
pub mod kuga_satake;
pub mod linalg;
pub mod sampling;
pub mod witness;

pub use error::{Error, Result};
