//! Matrix file I/O.
//!
//! The on-disk format is a JSON object
//! `{"rows": r, "cols": c, "entries": [[re, im], ...]}` with entries in
//! row-major order. Values survive a write/read round trip bit-identically.

use std::path::Path;

use serde::{Deserialize, Serialize};

use channelcut::matcore::{ComplexMatrix, C64};

use crate::CliError;

/// The serialized form of a complex matrix.
#[derive(Serialize, Deserialize)]
pub(crate) struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<(f64, f64)>,
}

impl MatrixFile {
    #[cfg(test)]
    pub(crate) fn from_matrix(m: &ComplexMatrix) -> Self {
        let mut entries = Vec::with_capacity(m.nrows() * m.ncols());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                entries.push((m[(i, j)].re, m[(i, j)].im));
            }
        }
        Self {
            rows: m.nrows(),
            cols: m.ncols(),
            entries,
        }
    }

    pub(crate) fn to_matrix(&self) -> Result<ComplexMatrix, CliError> {
        if self.rows == 0 || self.cols == 0 {
            return Err(CliError::Validation(
                "matrix must have at least one row and one column".into(),
            ));
        }
        if self.entries.len() != self.rows * self.cols {
            return Err(CliError::Validation(format!(
                "matrix declares {}x{} = {} entries but provides {}",
                self.rows,
                self.cols,
                self.rows * self.cols,
                self.entries.len()
            )));
        }
        Ok(ComplexMatrix::from_fn(self.rows, self.cols, |i, j| {
            let (re, im) = self.entries[i * self.cols + j];
            C64::new(re, im)
        }))
    }
}

/// Reads a matrix file, classifying unreadable or malformed input as a
/// validation failure.
pub(crate) fn read_matrix(path: &Path) -> Result<ComplexMatrix, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|err| CliError::Validation(format!("cannot read {}: {err}", path.display())))?;
    let file: MatrixFile = serde_json::from_str(&text).map_err(|err| {
        CliError::Validation(format!("invalid matrix file {}: {err}", path.display()))
    })?;
    file.to_matrix()
}
