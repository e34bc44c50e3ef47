//! Persistence and interchange: a BIF-subset parser and emitter for
//! reference networks, and CSV datasets with optional level declarations.

mod bif;
mod dataset;

pub use bif::{emit_bif, parse_bif, parse_bif_document, BifDocument, BifError, BifProbability,
    BifVariable, ProbabilityEntries};
pub use dataset::{read_csv_dataset, write_csv_dataset, CsvError, LoadedDataset, Schema};
