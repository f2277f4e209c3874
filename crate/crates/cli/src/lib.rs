//! Command-line front end for the radialkit toolkit, plus the toy face
//! comparator used for desk-scale recognition experiments.

pub mod args;
pub mod commands;
pub mod compare;
pub mod embedding;

use std::process::ExitCode;

pub use args::Cli;
pub use commands::run;
pub use embedding::ToyEmbedding;

/// Process exit code for an error: 2 usage/schema, 3 I/O, 4 numeric domain.
pub fn exit_code(err: &radialkit::Error) -> ExitCode {
    match err.class() {
        radialkit::ErrorClass::Usage => ExitCode::from(2),
        radialkit::ErrorClass::Io => ExitCode::from(3),
        radialkit::ErrorClass::Domain => ExitCode::from(4),
    }
}
