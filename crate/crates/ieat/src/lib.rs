//! File formats, parallel execution and the `ieat` command-line tool built on
//! [`ieat_core`].

pub mod cli;
pub mod config;
pub mod embeddings;
mod error;
pub mod parallel;
pub mod render;

pub use config::{load_battery, load_manifest, load_norms, Battery};
pub use embeddings::{load_embeddings, sniff_format, write_embeddings, EmbeddingFormat};
pub use error::{Error, Result};
pub use ieat_core;
pub use parallel::Parallel;
pub use render::{render_results, OutputFormat};
