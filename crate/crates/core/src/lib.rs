pub mod config;
pub mod error;
pub mod exact;
pub mod flag;
pub mod group;
pub mod php;
pub mod position;
pub mod proj;
pub mod proximal;

pub use error::{Error, Result};
