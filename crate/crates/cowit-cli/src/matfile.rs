//! Matrix interchange files: JSON documents holding a dimension, split
//! real/imaginary parts (no complex literals), and a kind tag saying
//! which invariants the matrix is supposed to satisfy.
//!
//! Parsing checks shape and hermiticity in split form — `re` symmetric
//! and `im` antisymmetric within 1e-9 — and reports violations with the
//! offending field path. Entries are then symmetrized exactly, so the
//! in-memory matrix is Hermitian to the last bit regardless of roundoff
//! in the file.

use std::fmt;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::Deserialize;

use cowit::HermitianMatrix;

use crate::canonical::Value;

/// Largest tolerated asymmetry between mirrored entries in a file.
pub const HERMITICITY_TOL: f64 = 1e-9;

/// Largest accepted dimension; the dense solvers are built for desk
/// scale and degrade beyond this.
pub const MAX_DIM: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    State,
    Witness,
    Hermitian,
}

impl Kind {
    pub fn label(self) -> &'static str {
        match self {
            Kind::State => "state",
            Kind::Witness => "witness",
            Kind::Hermitian => "hermitian",
        }
    }

    pub fn parse(text: &str) -> Option<Kind> {
        match text {
            "state" => Some(Kind::State),
            "witness" => Some(Kind::Witness),
            "hermitian" => Some(Kind::Hermitian),
            _ => None,
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug)]
pub struct MatrixFile {
    pub kind: Kind,
    pub mat: HermitianMatrix,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMatrixFile {
    dim: usize,
    kind: String,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

/// Parses a matrix file, reporting problems with the field path of the
/// first offending entry.
pub fn parse(text: &str) -> Result<MatrixFile, String> {
    let raw: RawMatrixFile =
        serde_json::from_str(text).map_err(|e| format!("malformed matrix file: {e}"))?;
    let kind = Kind::parse(&raw.kind).ok_or_else(|| {
        format!("kind: expected \"state\", \"witness\", or \"hermitian\", got \"{}\"", raw.kind)
    })?;
    if raw.dim == 0 {
        return Err("dim: must be at least 1".into());
    }
    if raw.dim > MAX_DIM {
        return Err(format!("dim: must be at most {MAX_DIM}, got {}", raw.dim));
    }
    let dim = raw.dim;
    for (name, part) in [("re", &raw.re), ("im", &raw.im)] {
        if part.len() != dim {
            return Err(format!("{name}: expected {dim} rows, got {}", part.len()));
        }
        for (i, row) in part.iter().enumerate() {
            if row.len() != dim {
                return Err(format!("{name}[{i}]: expected {dim} entries, got {}", row.len()));
            }
            for (j, &x) in row.iter().enumerate() {
                if !x.is_finite() {
                    return Err(format!("{name}[{i}][{j}]: not a finite number"));
                }
            }
        }
    }
    for i in 0..dim {
        let drift = raw.im[i][i].abs();
        if drift > HERMITICITY_TOL {
            return Err(format!("im[{i}][{i}]: diagonal imaginary part {drift:.3e} exceeds 1e-9"));
        }
        for j in i + 1..dim {
            let sym = (raw.re[i][j] - raw.re[j][i]).abs();
            if sym > HERMITICITY_TOL {
                return Err(format!(
                    "re[{j}][{i}]: breaks symmetry with re[{i}][{j}] by {sym:.3e}"
                ));
            }
            let asym = (raw.im[i][j] + raw.im[j][i]).abs();
            if asym > HERMITICITY_TOL {
                return Err(format!(
                    "im[{j}][{i}]: breaks antisymmetry with im[{i}][{j}] by {asym:.3e}"
                ));
            }
        }
    }
    // Average mirrored entries so the matrix is exactly Hermitian even
    // when the file carries roundoff-sized asymmetries.
    let rows: Vec<Vec<Complex64>> = (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| {
                    Complex64::new(
                        0.5 * (raw.re[i][j] + raw.re[j][i]),
                        0.5 * (raw.im[i][j] - raw.im[j][i]),
                    )
                })
                .collect()
        })
        .collect();
    let mat = HermitianMatrix::from_rows(&rows).expect("symmetrized square matrix");
    Ok(MatrixFile { kind, mat })
}

/// Reads and parses a matrix file, prefixing errors with the path.
pub fn read(path: &Path) -> Result<MatrixFile, String> {
    let text =
        fs::read_to_string(path).map_err(|e| format!("{}: cannot read: {e}", path.display()))?;
    parse(&text).map_err(|e| format!("{}: {e}", path.display()))
}

/// The canonical JSON form of a matrix under a kind tag.
pub fn to_value(kind: Kind, mat: &HermitianMatrix) -> Value {
    let dim = mat.dim();
    let part = |pick: fn(Complex64) -> f64| {
        Value::Array(
            (0..dim)
                .map(|i| Value::floats((0..dim).map(|j| pick(mat.get(i, j)))))
                .collect(),
        )
    };
    Value::object([
        ("dim", Value::Int(dim as i64)),
        ("im", part(|z| z.im)),
        ("kind", Value::string(kind.label())),
        ("re", part(|z| z.re)),
    ])
}
