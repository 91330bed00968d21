//! Batch driver for `pva-core`: job files, index-table files and report
//! rendering. The `pva` binary is a thin layer over [`jobs`].

pub mod config;
pub mod error;
pub mod jobs;
pub mod output;
pub mod table_file;
