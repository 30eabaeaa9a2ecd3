//! JSON formats. Complex numbers are `[re, im]` pairs and matrices are row-major
//! nested arrays of them.
//!
//! Resource file: `{"d", "D", "tensors", "left", "right", "n_sites"}` with
//! `tensors` a list of `d` matrices of size `D x D` and `n_sites` optional.
//! Channel file: `{"dim", "kraus"}`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::channels::KrausChannel;
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::resource::{ResourceMps, DEFAULT_SITES};

pub type JsonComplex = [f64; 2];
pub type JsonMatrix = Vec<Vec<JsonComplex>>;

pub fn complex_to_json(z: Complex<f64>) -> JsonComplex {
    [z.re, z.im]
}

pub fn matrix_to_json(m: &Matrix) -> JsonMatrix {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| complex_to_json(m[(i, j)])).collect())
        .collect()
}

pub fn vector_to_json(v: &Vector) -> Vec<JsonComplex> {
    v.entries().iter().map(|&z| complex_to_json(z)).collect()
}

pub fn matrix_from_json(rows: &JsonMatrix, what: &str) -> Result<Matrix> {
    let n_rows = rows.len();
    let n_cols = rows.first().map_or(0, Vec::len);
    if n_rows == 0 || n_cols == 0 {
        return Err(Error::Format(format!("{what}: empty matrix")));
    }
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n_cols) {
        return Err(Error::Format(format!(
            "{what}: row {i} has {} entries, expected {n_cols}",
            r.len()
        )));
    }
    let data = rows.iter().flatten().map(|&[re, im]| Complex::new(re, im)).collect();
    Matrix::new(n_rows, n_cols, data).map_err(|e| Error::Format(format!("{what}: {e}")))
}

pub fn vector_from_json(entries: &[JsonComplex], what: &str) -> Result<Vector> {
    Vector::new(entries.iter().map(|&[re, im]| Complex::new(re, im)).collect())
        .map_err(|e| Error::Format(format!("{what}: {e}")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResourceFile {
    pub d: usize,
    #[serde(rename = "D")]
    pub bond_dim: usize,
    pub tensors: Vec<JsonMatrix>,
    pub left: Vec<JsonComplex>,
    pub right: Vec<JsonComplex>,
    #[serde(default)]
    pub n_sites: Option<usize>,
}

impl ResourceFile {
    pub fn from_resource(mps: &ResourceMps) -> Self {
        Self {
            d: mps.d(),
            bond_dim: mps.bond_dim(),
            tensors: mps.tensors().iter().map(matrix_to_json).collect(),
            left: vector_to_json(mps.left()),
            right: vector_to_json(mps.right()),
            n_sites: Some(mps.n_sites()),
        }
    }

    pub fn into_resource(self) -> Result<ResourceMps> {
        if self.tensors.len() != self.d {
            return Err(Error::Format(format!(
                "resource: \"d\" is {} but {} tensors were given",
                self.d,
                self.tensors.len()
            )));
        }
        let tensors = self
            .tensors
            .iter()
            .enumerate()
            .map(|(k, t)| {
                let m = matrix_from_json(t, &format!("resource tensor {k}"))?;
                if m.rows() != self.bond_dim || m.cols() != self.bond_dim {
                    return Err(Error::Format(format!(
                        "resource tensor {k}: shape {}x{}, expected {}x{}",
                        m.rows(),
                        m.cols(),
                        self.bond_dim,
                        self.bond_dim
                    )));
                }
                Ok(m)
            })
            .collect::<Result<Vec<_>>>()?;
        let left = vector_from_json(&self.left, "resource left")?;
        let right = vector_from_json(&self.right, "resource right")?;
        ResourceMps::new(tensors, left, right, self.n_sites.unwrap_or(DEFAULT_SITES))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelFile {
    pub dim: usize,
    pub kraus: Vec<JsonMatrix>,
}

impl ChannelFile {
    pub fn from_channel(ch: &KrausChannel) -> Self {
        Self {
            dim: ch.dim(),
            kraus: ch.kraus().iter().map(matrix_to_json).collect(),
        }
    }

    pub fn into_channel(self) -> Result<KrausChannel> {
        let ops = self
            .kraus
            .iter()
            .enumerate()
            .map(|(j, k)| matrix_from_json(k, &format!("kraus operator {j}")))
            .collect::<Result<Vec<_>>>()?;
        if let Some(m) = ops.iter().find(|m| m.rows() != self.dim || m.cols() != self.dim) {
            return Err(Error::Format(format!(
                "channel: operator of shape {}x{} in a channel of dim {}",
                m.rows(),
                m.cols(),
                self.dim
            )));
        }
        KrausChannel::new(ops)
    }
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Format(format!("{what}: {e}")))
}

pub fn parse_resource(text: &str) -> Result<ResourceMps> {
    parse::<ResourceFile>(text, "resource file")?.into_resource()
}

pub fn parse_channel(text: &str) -> Result<KrausChannel> {
    parse::<ChannelFile>(text, "channel file")?.into_channel()
}

pub fn resource_to_string(mps: &ResourceMps) -> String {
    serde_json::to_string_pretty(&ResourceFile::from_resource(mps)).expect("resource serializes")
}

pub fn channel_to_string(ch: &KrausChannel) -> String {
    serde_json::to_string_pretty(&ChannelFile::from_channel(ch)).expect("channel serializes")
}
