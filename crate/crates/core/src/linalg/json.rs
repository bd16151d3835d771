use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactfield::{expect_field, Field, FieldCtx};
use crate::linalg::Matrix;

/// Wire form of a matrix:
/// `{"field": "Fp:5", "rows": 2, "cols": 2, "data": [["0","1"],["4","0"]]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub field: String,
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Vec<String>>,
}

impl MatrixJson {
    pub fn field_ctx(&self) -> Result<FieldCtx> {
        self.field.parse()
    }
}

impl<F: Field> Matrix<F> {
    pub fn to_json(&self) -> MatrixJson {
        MatrixJson {
            field: self.field().ctx().to_string(),
            rows: self.rows(),
            cols: self.cols(),
            data: (0..self.rows()).map(|i| encode_vector(self.field(), self.row(i))).collect(),
        }
    }

    pub fn from_json(field: &F, json: &MatrixJson) -> Result<Self> {
        expect_field(field, &json.field)?;
        if json.data.len() != json.rows || json.data.iter().any(|r| r.len() != json.cols) {
            return Err(Error::shape(format!(
                "data does not match declared {}x{} shape",
                json.rows, json.cols
            )));
        }
        let rows = json
            .data
            .iter()
            .map(|r| decode_vector(field, r))
            .collect::<Result<Vec<_>>>()?;
        let mut m = Matrix::from_rows(field, rows)?;
        if json.rows == 0 {
            m = Matrix::zeros(field, 0, json.cols);
        }
        Ok(m)
    }
}

pub fn encode_vector<F: Field>(field: &F, v: &[F::Elem]) -> Vec<String> {
    v.iter().map(|x| field.format(x)).collect()
}

pub fn decode_vector<F: Field>(field: &F, v: &[String]) -> Result<Vec<F::Elem>> {
    v.iter().map(|s| field.parse(s)).collect()
}
