//! Command-line front end and HTTP service for the sketch-to-BIM workbench.

pub mod commands;
pub mod server;
