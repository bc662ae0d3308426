//! File formats, parallel execution and the command-line front end for
//! [`raterpower_core`].

pub mod cli;
pub mod dataio;
pub mod parallel;

pub use raterpower_core;
pub use parallel::RayonExecutor;
