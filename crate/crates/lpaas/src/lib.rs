//! HTTP service, client SDK and command-line front end for `lpaas-core`.

pub mod auth;
pub mod client;
pub mod server;
pub mod settings;
pub mod wire;
pub mod cli;
pub mod scenario;
