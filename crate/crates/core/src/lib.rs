pub mod access;
pub mod clock;
pub mod kb;
pub mod logic;
pub mod persistence;
pub mod service;
