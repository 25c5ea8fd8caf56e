//! JSON file formats.
//!
//! * group: `{"order": n, "table": [[...]]}`
//! * representation: `{"group": <group>, "dim": d, "matrices": [M_0, ...]}`
//!   with each matrix a list of rows of `[re, im]` pairs
//! * exponent: `{"group": <group>, "entries": [[{"num", "den"} | {"angle"}]]}`,
//!   exact phases in turns (`δ = 2π·num/den`)
//! * matrix: `{"dim": d, "matrix": [[[re, im]]]}`
//! * SU(2) preset: `{"radius", "samples", "seed", "alpha", "section"}`

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cohomology::ExponentTable;
use crate::group::{validate_group, FiniteGroup, GroupFile};
use crate::phase::{Phase, PhaseRepr};
use crate::rep::RayRepresentation;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot read {path}: {reason}")]
    Read { path: String, reason: String },
    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("validation failed: {0}")]
    Validation(String),
}

pub type Entry = [f64; 2];
pub type MatrixRows = Vec<Vec<Entry>>;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RepFile {
    pub group: GroupFile,
    pub dim: usize,
    pub matrices: Vec<MatrixRows>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ExponentFile {
    pub group: GroupFile,
    pub entries: Vec<Vec<PhaseRepr>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MatrixFile {
    pub dim: usize,
    pub matrix: MatrixRows,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum SectionName {
    Su2,
    So3,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Su2Preset {
    pub radius: f64,
    pub samples: usize,
    pub seed: u64,
    pub alpha: f64,
    pub section: SectionName,
}

pub fn read_text(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|e| IoError::Read {
        path: path.display().to_string(),
        reason: e.to_string(),
    })
}

pub fn parse<T: DeserializeOwned>(text: &str) -> Result<T, IoError> {
    serde_json::from_str(text).map_err(|e| IoError::Parse {
        line: e.line(),
        reason: e.to_string(),
    })
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable")
}

pub fn matrix_to_rows(m: &DMatrix<Complex64>) -> MatrixRows {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn rows_to_matrix(rows: &MatrixRows, dim: usize) -> Result<DMatrix<Complex64>, IoError> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(IoError::Validation(format!("matrix is not {dim}×{dim}")));
    }
    Ok(DMatrix::from_fn(dim, dim, |i, j| Complex64::new(rows[i][j][0], rows[i][j][1])))
}

pub fn group_from_file(f: &GroupFile) -> Result<FiniteGroup, IoError> {
    if f.table.len() != f.order {
        return Err(IoError::Validation(format!(
            "order {} but table has {} rows",
            f.order,
            f.table.len()
        )));
    }
    validate_group(&f.table).map_err(|e| IoError::Validation(e.to_string()))
}

pub fn rep_from_file(f: &RepFile) -> Result<RayRepresentation, IoError> {
    let g = group_from_file(&f.group)?;
    let ms = f
        .matrices
        .iter()
        .map(|m| rows_to_matrix(m, f.dim))
        .collect::<Result<Vec<_>, _>>()?;
    RayRepresentation::new(g, ms).map_err(|e| IoError::Validation(e.to_string()))
}

pub fn rep_to_file(rep: &RayRepresentation) -> RepFile {
    RepFile {
        group: GroupFile::from(rep.group()),
        dim: rep.dim(),
        matrices: rep.operators().iter().map(|o| matrix_to_rows(o.matrix())).collect(),
    }
}

pub fn exponent_from_file(f: &ExponentFile) -> Result<ExponentTable, IoError> {
    let g = group_from_file(&f.group)?;
    let entries = f
        .entries
        .iter()
        .map(|row| {
            row.iter()
                .map(|p| Phase::try_from(p.clone()).map_err(IoError::Validation))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    ExponentTable::new(g, entries).map_err(|e| IoError::Validation(e.to_string()))
}

pub fn exponent_to_file(d: &ExponentTable) -> ExponentFile {
    ExponentFile {
        group: GroupFile::from(d.group()),
        entries: d
            .entries()
            .iter()
            .map(|row| row.iter().map(|&p| PhaseRepr::from(p)).collect())
            .collect(),
    }
}

pub fn load_group(path: &Path) -> Result<FiniteGroup, IoError> {
    group_from_file(&parse(&read_text(path)?)?)
}

pub fn load_rep(path: &Path) -> Result<RayRepresentation, IoError> {
    rep_from_file(&parse(&read_text(path)?)?)
}

pub fn load_exponent(path: &Path) -> Result<ExponentTable, IoError> {
    exponent_from_file(&parse(&read_text(path)?)?)
}

pub fn load_matrix(path: &Path) -> Result<DMatrix<Complex64>, IoError> {
    let f: MatrixFile = parse(&read_text(path)?)?;
    rows_to_matrix(&f.matrix, f.dim)
}

pub fn load_preset(path: &Path) -> Result<Su2Preset, IoError> {
    parse(&read_text(path)?)
}

/// What a JSON document holds, judged by its keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileKind {
    Group,
    Rep,
    Exponent,
    Matrix,
    Preset,
}

pub fn detect_kind(text: &str) -> Result<FileKind, IoError> {
    let v: serde_json::Value = parse(text)?;
    let has = |k: &str| v.get(k).is_some();
    if has("matrices") {
        Ok(FileKind::Rep)
    } else if has("entries") {
        Ok(FileKind::Exponent)
    } else if has("matrix") {
        Ok(FileKind::Matrix)
    } else if has("table") {
        Ok(FileKind::Group)
    } else if has("radius") {
        Ok(FileKind::Preset)
    } else {
        Err(IoError::Parse { line: 1, reason: "unrecognized document".into() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn minimal_group() {
        let f: GroupFile = parse(r#"{"order": 2, "table": [[0, 1], [1, 0]]}"#).unwrap();
        assert_eq!(group_from_file(&f).unwrap().order(), 2);
    }

    #[test]
    fn parse_error_has_line() {
        let err = parse::<GroupFile>("{\n\"order\": 2,\n\"table\": [[0, 1], [1 0]]}").unwrap_err();
        match err {
            IoError::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rep_round_trip() {
        let rep = fixtures::clock_shift(3);
        let text = to_json(&rep_to_file(&rep));
        let back = rep_from_file(&parse(&text).unwrap()).unwrap();
        assert_eq!(back, rep);
        assert_eq!(detect_kind(&text).unwrap(), FileKind::Rep);
    }

    #[test]
    fn non_unitary_names_element() {
        let mut f = rep_to_file(&fixtures::clock_shift(2));
        f.matrices[3][0][0] = [2.0, 0.0];
        match rep_from_file(&f) {
            Err(IoError::Validation(msg)) => assert!(msg.contains("element 3"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn exponent_round_trip() {
        let mut d = ExponentTable::zero(crate::group::make_cyclic(2));
        d.set(1, 1, Phase::exact(1, 2));
        let text = to_json(&exponent_to_file(&d));
        assert!(text.contains("\"num\": 1"));
        assert_eq!(exponent_from_file(&parse(&text).unwrap()).unwrap(), d);
    }
}
