//! Command implementations behind the `attrest` binary.

pub mod commands;
pub mod error;
pub mod io;
pub mod report;
