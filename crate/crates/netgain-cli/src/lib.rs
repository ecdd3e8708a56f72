//! Library side of the command-line front end: file schema and report
//! rendering, kept separate from `main` so they can be tested directly.

pub mod input;
pub mod report;
