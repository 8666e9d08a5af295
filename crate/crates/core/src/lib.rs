//! Construction and analysis of moment-like maps over colored arrangements of
//! real polynomial hypersurfaces.

pub mod arrangement;
pub mod doubler;
pub mod error;
pub mod interval;
pub mod io;
pub mod pipeline;
pub mod polynomial;
pub mod reeb;
pub mod scenarios;
pub mod singular;
pub mod slicer;
pub mod validator;

pub use error::{Error, Result};
