pub mod correspondence;
pub mod error;
pub mod frames;
pub mod io;
pub mod linalg;
pub mod povm;
pub mod random;
pub mod reconstruction;

pub use error::{Error, Result};
