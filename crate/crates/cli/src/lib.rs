//! Experiment runner around `twinbench-core`: classifier registry, config
//! parsing, the lattice scheduler, and table/curve emission.

pub mod config;
pub mod curves;
pub mod models;
pub mod runner;
pub mod store;
pub mod svg;
pub mod tables;
