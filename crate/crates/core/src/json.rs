//! JSON wire format for matrices and vectors.
//!
//! Complex scalars are always `[re, im]` pairs; a matrix is a row-major
//! nested array of such pairs. Ragged rows and empty matrices are rejected
//! on parse.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{CMatrix, CVector};

/// Row-major nested array of `[re, im]` pairs.
pub type MatrixDto = Vec<Vec<[f64; 2]>>;

/// Flat array of `[re, im]` pairs.
pub type VectorDto = Vec<[f64; 2]>;

pub fn matrix_to_dto(m: &CMatrix) -> MatrixDto {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn matrix_from_dto(dto: &MatrixDto) -> Result<CMatrix> {
    let rows = dto.len();
    if rows == 0 {
        return Err(Error::EmptyInput("matrix with no rows".into()));
    }
    let cols = dto[0].len();
    if cols == 0 {
        return Err(Error::EmptyInput("matrix with no columns".into()));
    }
    for (i, row) in dto.iter().enumerate() {
        if row.len() != cols {
            return Err(Error::ShapeMismatch(format!(
                "ragged matrix: row {i} has {} entries, expected {cols}",
                row.len()
            )));
        }
    }
    Ok(CMatrix::from_fn(rows, cols, |i, j| {
        Complex64::new(dto[i][j][0], dto[i][j][1])
    }))
}

pub fn vector_to_dto(v: &CVector) -> VectorDto {
    v.iter().map(|z| [z.re, z.im]).collect()
}

pub fn vector_from_dto(dto: &VectorDto) -> Result<CVector> {
    if dto.is_empty() {
        return Err(Error::EmptyInput("empty vector".into()));
    }
    Ok(CVector::from_iterator(
        dto.len(),
        dto.iter().map(|p| Complex64::new(p[0], p[1])),
    ))
}

/// Serde adapter for `CMatrix` fields.
pub mod cmatrix {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &CMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
        matrix_to_dto(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<CMatrix, D::Error> {
        let dto = MatrixDto::deserialize(d)?;
        matrix_from_dto(&dto).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for `Vec<CMatrix>` fields.
pub mod cmatrix_list {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[CMatrix], s: S) -> std::result::Result<S::Ok, S::Error> {
        v.iter().map(matrix_to_dto).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<CMatrix>, D::Error> {
        let dtos = Vec::<MatrixDto>::deserialize(d)?;
        dtos.iter()
            .map(|m| matrix_from_dto(m).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// Serde adapter for `Vec<CVector>` fields.
pub mod cvector_list {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[CVector], s: S) -> std::result::Result<S::Ok, S::Error> {
        v.iter().map(vector_to_dto).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> std::result::Result<Vec<CVector>, D::Error> {
        let dtos = Vec::<VectorDto>::deserialize(d)?;
        dtos.iter()
            .map(|v| vector_from_dto(v).map_err(serde::de::Error::custom))
            .collect()
    }
}
