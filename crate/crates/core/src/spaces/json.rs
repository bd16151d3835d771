use serde::{Deserialize, Serialize};

use super::AffineMatrixSpace;
use crate::error::{Error, Result};
use crate::exactfield::{expect_field, Field, FieldCtx};
use crate::linalg::{Matrix, MatrixJson};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceJson {
    pub field: String,
    pub shape: [usize; 2],
    pub alternating: bool,
    pub base: MatrixJson,
    pub basis: Vec<MatrixJson>,
}

impl SpaceJson {
    pub fn field_ctx(&self) -> Result<FieldCtx> {
        self.field.parse()
    }
}

impl<F: Field> AffineMatrixSpace<F> {
    pub fn to_json(&self) -> SpaceJson {
        let (r, c) = self.shape();
        SpaceJson {
            field: self.field().ctx().to_string(),
            shape: [r, c],
            alternating: self.is_alternating(),
            base: self.base().to_json(),
            basis: self.basis().iter().map(Matrix::to_json).collect(),
        }
    }

    /// Rejects a claimed `alternating` flag that the data contradicts.
    pub fn from_json(field: &F, json: &SpaceJson) -> Result<Self> {
        expect_field(field, &json.field)?;
        let base = Matrix::from_json(field, &json.base)?;
        if base.shape() != (json.shape[0], json.shape[1]) {
            return Err(Error::shape("base does not match declared shape"));
        }
        let basis = json
            .basis
            .iter()
            .map(|m| Matrix::from_json(field, m))
            .collect::<Result<Vec<_>>>()?;
        if json.alternating {
            Self::new_alternating(base, basis)
        } else {
            Self::new(base, basis)
        }
    }
}
