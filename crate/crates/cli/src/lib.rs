//! Config-driven experiment runner for `elastic-schro`.

pub mod config;
pub mod output;
pub mod pipeline;
pub mod sweep;
pub mod validate;
