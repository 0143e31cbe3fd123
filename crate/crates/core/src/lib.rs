pub mod error;
pub mod fake;
pub mod game;
pub mod noise;
pub mod sampling;
pub mod scan;
pub mod states;
pub mod tensor;
pub mod thresholds;
pub mod tol;
pub mod verify;
pub mod witness;

pub use error::{Error, Result};
