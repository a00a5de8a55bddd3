//! Experiment presets, configuration files and artifact emission for the
//! `sbrsma` command-line tool.

pub mod config;
pub mod csvio;
pub mod gain;
pub mod plot;
pub mod presets;
