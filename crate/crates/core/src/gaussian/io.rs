use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{Matrix, C64};

/// JSON form of a complex square matrix: `{"m": M, "re": [[..]], "im": [[..]]}`,
/// rows first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitaryJson {
    pub m: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl UnitaryJson {
    pub fn from_matrix(u: &Matrix) -> Self {
        let m = u.nrows();
        let row = |i: usize, f: fn(&C64) -> f64| (0..u.ncols()).map(|j| f(&u[(i, j)])).collect();
        Self {
            m,
            re: (0..m).map(|i| row(i, |z| z.re)).collect(),
            im: (0..m).map(|i| row(i, |z| z.im)).collect(),
        }
    }

    pub fn to_matrix(&self) -> Result<Matrix> {
        let m = self.m;
        let shape_ok = |rows: &Vec<Vec<f64>>| rows.len() == m && rows.iter().all(|r| r.len() == m);
        if !shape_ok(&self.re) || !shape_ok(&self.im) {
            return Err(Error::DimensionMismatch(format!("unitary JSON rows do not form a {m}x{m} matrix")));
        }
        let out = Matrix::from_fn(m, m, |i, j| C64::new(self.re[i][j], self.im[i][j]));
        if out.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter("non-finite matrix entry".into()));
        }
        Ok(out)
    }
}

pub fn unitary_to_json(u: &Matrix) -> Result<String> {
    Ok(serde_json::to_string(&UnitaryJson::from_matrix(u))?)
}

pub fn unitary_from_json(text: &str) -> Result<Matrix> {
    serde_json::from_str::<UnitaryJson>(text)?.to_matrix()
}

/// Serde adapter so matrices embed as [`UnitaryJson`] inside other types.
pub mod matrix_serde {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(u: &Matrix, s: S) -> std::result::Result<S::Ok, S::Error> {
        UnitaryJson::from_matrix(u).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Matrix, D::Error> {
        UnitaryJson::deserialize(d)?.to_matrix().map_err(serde::de::Error::custom)
    }
}
