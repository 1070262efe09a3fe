//! Library surface of the command-line front end. The binary in `main.rs`
//! is a thin argument-parsing layer over these modules; the integration
//! tests drive them directly as well as through the executable.

pub mod emit;
pub mod error;
pub mod json;
pub mod report;
pub mod verify;
