//! Travel itinerary planning over a static sandbox database.

pub mod data;
pub mod encoder;
pub mod num;
pub mod plan;
pub mod query;
pub mod repair;
pub mod scenario;
pub mod vocab;

pub use tripsolve_engine::Rational;
