pub mod claims;
pub mod error;
pub mod families;
pub mod props;
pub mod fgmonoid;
pub mod ratcore;

pub use error::{Error, Result};
pub use ratcore::Rat;
