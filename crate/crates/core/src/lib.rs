pub mod circuit;
pub mod error;
pub mod oracle;
pub mod pit;
pub mod polyring;
pub mod slp;
pub mod wreath;

pub use error::{Error, ParseError, Result};
