//! Turn-based co-painting sessions: configuration, profile storage, the
//! shared turn pipeline, the HTTP API and the command line.

pub mod api;
pub mod cli;
pub mod config;
pub mod engine;
pub mod repro;
pub mod session;
pub mod store;
