pub mod algebra;
pub mod blowup;
pub mod detector;
pub mod driver;
pub mod error;
pub mod limits;
pub mod report;
pub mod scene;
pub mod staircase;

pub use error::{Error, Result};
pub use limits::Limits;
