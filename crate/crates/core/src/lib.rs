pub mod cli;
pub mod error;
pub mod frame;
pub mod json;
pub mod marginality;
pub mod measurement;
pub mod operator;
pub mod tolerance;

pub use error::{Error, Result};
pub use tolerance::Tolerances;
