//! Command-line front end for `qcorr`. The binary is a thin wrapper over
//! [`commands::run`], which returns the text and exit code instead of
//! printing so the commands can be driven from tests.

pub mod args;
pub mod commands;
pub mod format;
