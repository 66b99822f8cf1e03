//! File formats and the command-line front end for `sigenc`.

pub mod app;
pub mod formats;

pub use app::run;
