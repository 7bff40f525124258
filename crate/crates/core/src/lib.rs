pub mod enharmonic;
pub mod error;
pub mod gallery;
pub mod grid;
pub mod harmonic;
pub mod io;
pub mod jacobian;
pub(crate) mod linalg;
pub mod network;
pub mod numtheory;
pub mod planar;

pub use error::{Error, Result};
pub use network::*;
