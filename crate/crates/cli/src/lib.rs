//! Library side of the `rs3` command-line tool: instance generation, file
//! formats, benchmarking and exhaustive verification.

pub mod bench;
pub mod format;
pub mod gen;
pub mod verify;
