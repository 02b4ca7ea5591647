//! Building blocks of the `mrga` command-line tool.

pub mod bench;
pub mod config;
pub mod run;
