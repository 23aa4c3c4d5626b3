//! Command-line front end: CSV and WKT ingestion, index files, map rendering
//! and subcommand dispatch for the `geoswarm` binary.

pub mod cli;
pub mod config;
pub mod geocode;
pub mod ingest;
pub mod render;
pub mod store;
