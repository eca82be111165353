//! Library side of the `pweight` command: file formats, scheme dispatch,
//! the testing pipeline and the simulation experiments.

pub mod experiments;
pub mod manifest;
pub mod pipeline;
pub mod scheme;
pub mod tsv;
