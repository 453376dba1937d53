//! JSON encodings shared by the library and the CLI.
//!
//! Matrices are `{"rows": r, "cols": c, "re": [...], "im": [...]}` in
//! row-major order. Density operators add `"dim"`, pure states are
//! `{"dim": d, "re": [...], "im": [...]}`.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;
use crate::linalg::{ComplexMatrix, DensityOperator, PureState};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<f64>,
    #[serde(default)]
    pub im: Vec<f64>,
}

impl From<&ComplexMatrix> for MatrixJson {
    fn from(m: &ComplexMatrix) -> Self {
        Self {
            dim: None,
            rows: m.rows(),
            cols: m.cols(),
            re: m.as_slice().iter().map(|z| z.re).collect(),
            im: m.as_slice().iter().map(|z| z.im).collect(),
        }
    }
}

impl TryFrom<MatrixJson> for ComplexMatrix {
    type Error = Error;

    /// An empty `im` array means a real matrix.
    fn try_from(j: MatrixJson) -> Result<Self, Error> {
        let n = j.rows * j.cols;
        if j.re.len() != n || !(j.im.is_empty() || j.im.len() == n) {
            return Err(Error::BadShape {
                rows: j.rows,
                cols: j.cols,
                len: j.re.len().max(j.im.len()),
            });
        }
        let data = if j.im.is_empty() {
            j.re.iter().map(|&r| Complex64::new(r, 0.0)).collect()
        } else {
            j.re.iter().zip(&j.im).map(|(&r, &i)| Complex64::new(r, i)).collect()
        };
        ComplexMatrix::from_vec(j.rows, j.cols, data)
    }
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MatrixJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = MatrixJson::deserialize(d)?;
        ComplexMatrix::try_from(j).map_err(serde::de::Error::custom)
    }
}

impl Serialize for DensityOperator {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut j = MatrixJson::from(self.matrix());
        j.dim = Some(self.dim());
        j.serialize(s)
    }
}

impl<'de> Deserialize<'de> for DensityOperator {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = MatrixJson::deserialize(d)?;
        density_from_json(j, crate::linalg::DENSITY_TOL).map_err(serde::de::Error::custom)
    }
}

/// Parses and validates a density operator with an explicit tolerance.
pub fn density_from_json(j: MatrixJson, tol: f64) -> Result<DensityOperator, Error> {
    if let Some(dim) = j.dim {
        if dim != j.rows || dim != j.cols {
            return Err(Error::DimensionMismatch {
                expected: format!("{dim}x{dim}"),
                found: format!("{}x{}", j.rows, j.cols),
            });
        }
    }
    let m = ComplexMatrix::try_from(j)?;
    crate::linalg::validate_density(m, tol)
}

#[derive(Serialize, Deserialize)]
struct PureJson {
    dim: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl Serialize for PureState {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PureJson {
            dim: self.dim(),
            re: self.amplitudes().iter().map(|z| z.re).collect(),
            im: self.amplitudes().iter().map(|z| z.im).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PureState {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = PureJson::deserialize(d)?;
        if j.re.len() != j.dim || j.im.len() != j.dim {
            return Err(serde::de::Error::custom("amplitude arrays must have length dim"));
        }
        let amps = j.re.iter().zip(&j.im).map(|(&r, &i)| Complex64::new(r, i)).collect();
        PureState::new(amps).map_err(serde::de::Error::custom)
    }
}
