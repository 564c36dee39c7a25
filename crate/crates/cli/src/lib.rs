pub mod config;
pub mod suite;
