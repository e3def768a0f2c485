//! Command line and HTTP front end.

pub mod commands;
pub mod error;
pub mod http;
pub mod provider;
pub mod render;
pub mod store;

pub use commands::{run, Cli, Io};
pub use error::{exit, AppError};
