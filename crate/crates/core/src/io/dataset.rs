//! CSV datasets with an optional sidecar schema declaring each variable's
//! level set.
//!
//! Without a schema, levels are the sorted distinct observed values and a
//! warning is attached: data-derived cardinalities silently change every
//! score's prior cell mass, so declared schemas are preferred everywhere it
//! matters.

use thiserror::Error;

use crate::data::{DataError, Dataset, Variable};

#[derive(Debug, Error)]
pub enum CsvError {
    #[error("empty cell at data row {row}, column {column}")]
    MissingCell { row: usize, column: usize },
    #[error("data row {row}, column {column}: level {value:?} not declared in the schema")]
    UnknownLevel {
        row: usize,
        column: usize,
        value: String,
    },
    #[error("header mismatch: {detail}")]
    HeaderMismatch { detail: String },
    #[error("schema line {line}: expected `name:level1,level2,...`")]
    MalformedSchema { line: usize },
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Declared level sets, one line per variable: `name:level1,level2,...`.
#[derive(Debug, Clone, PartialEq)]
pub struct Schema {
    pub entries: Vec<(String, Vec<String>)>,
}

impl Schema {
    pub fn parse(text: &str) -> Result<Schema, CsvError> {
        let mut entries = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (name, levels) = line
                .split_once(':')
                .ok_or(CsvError::MalformedSchema { line: i + 1 })?;
            let levels: Vec<String> = levels
                .split(',')
                .map(|l| l.trim().to_string())
                .filter(|l| !l.is_empty())
                .collect();
            if name.trim().is_empty() || levels.is_empty() {
                return Err(CsvError::MalformedSchema { line: i + 1 });
            }
            entries.push((name.trim().to_string(), levels));
        }
        Ok(Schema { entries })
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (name, levels) in &self.entries {
            out.push_str(&format!("{name}:{}\n", levels.join(",")));
        }
        out
    }

    pub fn from_variables(variables: &[Variable]) -> Schema {
        Schema {
            entries: variables
                .iter()
                .map(|v| (v.name.clone(), v.levels.clone()))
                .collect(),
        }
    }

    fn levels_for(&self, name: &str) -> Option<&[String]> {
        self.entries
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, levels)| levels.as_slice())
    }
}

/// A loaded dataset plus any warnings raised while interpreting it.
#[derive(Debug, Clone)]
pub struct LoadedDataset {
    pub dataset: Dataset,
    pub warnings: Vec<String>,
}

/// Reads a header-first CSV of level labels. With a schema, declared levels
/// win (unseen declared levels keep their slot in the cardinality, unseen
/// observed levels are an error); without one, levels are the sorted
/// distinct observed values.
pub fn read_csv_dataset(text: &str, schema: Option<&Schema>) -> Result<LoadedDataset, CsvError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(text.as_bytes());
    let headers: Vec<String> = reader
        .headers()?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    if headers.is_empty() || headers.iter().all(|h| h.is_empty()) {
        return Err(CsvError::HeaderMismatch {
            detail: "no header row".into(),
        });
    }
    for (i, h) in headers.iter().enumerate() {
        if headers[..i].contains(h) {
            return Err(CsvError::HeaderMismatch {
                detail: format!("duplicate column {h:?}"),
            });
        }
    }

    let mut cells: Vec<Vec<String>> = Vec::new();
    for (r, record) in reader.records().enumerate() {
        let record = record?;
        let mut row = Vec::with_capacity(headers.len());
        for (c, value) in record.iter().enumerate() {
            let value = value.trim();
            if value.is_empty() {
                return Err(CsvError::MissingCell {
                    row: r + 1,
                    column: c + 1,
                });
            }
            row.push(value.to_string());
        }
        cells.push(row);
    }

    let mut warnings = Vec::new();
    let mut variables = Vec::with_capacity(headers.len());
    match schema {
        Some(schema) => {
            for name in &headers {
                let levels = schema.levels_for(name).ok_or_else(|| {
                    CsvError::HeaderMismatch {
                        detail: format!("column {name:?} missing from the schema"),
                    }
                })?;
                variables.push(Variable::new(name.clone(), levels.to_vec())?);
            }
        }
        None => {
            for (c, name) in headers.iter().enumerate() {
                let mut levels: Vec<String> =
                    cells.iter().map(|row| row[c].clone()).collect();
                levels.sort();
                levels.dedup();
                if levels.is_empty() {
                    levels.push("0".to_string());
                }
                variables.push(Variable::new(name.clone(), levels)?);
            }
            warnings.push(
                "no schema supplied: cardinalities are data-derived, which changes every \
                 score's per-cell prior mass"
                    .to_string(),
            );
        }
    }

    let mut rows = Vec::with_capacity(cells.len());
    for (r, row) in cells.iter().enumerate() {
        let mut indices = Vec::with_capacity(row.len());
        for (c, value) in row.iter().enumerate() {
            match variables[c].level_index(value) {
                Some(level) => indices.push(level),
                None => {
                    return Err(CsvError::UnknownLevel {
                        row: r + 1,
                        column: c + 1,
                        value: value.clone(),
                    })
                }
            }
        }
        rows.push(indices);
    }

    Ok(LoadedDataset {
        dataset: Dataset::new(variables, rows)?,
        warnings,
    })
}

/// Header plus one level label per cell; `read_csv_dataset` with the same
/// schema reproduces the dataset exactly.
pub fn write_csv_dataset(data: &Dataset) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let headers: Vec<&str> = data.variables().iter().map(|v| v.name.as_str()).collect();
    writer.write_record(&headers).expect("in-memory write");
    for row in 0..data.n_rows() {
        let record: Vec<&str> = (0..data.variable_count())
            .map(|v| data.variables()[v].levels[data.value(row, v)].as_str())
            .collect();
        writer.write_record(&record).expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory write")).expect("csv output is utf-8")
}
