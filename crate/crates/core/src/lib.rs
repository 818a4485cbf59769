pub mod airy;
pub mod cone;
pub mod error;
pub mod geom;
pub mod interior;
pub mod mixed;
pub mod nnls;
pub mod proj3d;
pub mod samples;
pub mod statics;
pub mod web;

pub use error::{Error, Result};
