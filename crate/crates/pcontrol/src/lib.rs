//! Run files, analysis reports and the `pcontrol` command line on top of
//! [`pcontrol_core`].

pub mod analysis;
pub mod cli;
pub mod config;
mod error;
pub mod parallel;
pub mod report;
pub mod runfile;

pub use error::{Error, Result};
