//! Global descriptors and the `RBDESC1` descriptor-set file format.
//!
//! A file is one UTF-8 JSON header line followed by `count * dim`
//! little-endian f32 values, row-major:
//!
//! ```text
//! {"magic":"RBDESC1","dim":256,"count":N,"dtype":"f32le","modality":"range","ids":[...]}\n
//! <payload>
//! ```

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::binfmt;
use crate::error::{Error, Result};

pub const DESCRIPTOR_DIM: usize = 256;
pub const DESCRIPTOR_MAGIC: &str = "RBDESC1";

/// Rows whose norm is already within this of 1 are left untouched, which
/// makes normalization idempotent on its own output.
pub const UNIT_NORM_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Modality {
    Rgb,
    Range,
    CameraBev,
    LidarBev,
}

impl Modality {
    pub const ALL: [Modality; 4] = [
        Modality::Rgb,
        Modality::Range,
        Modality::CameraBev,
        Modality::LidarBev,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Modality::Rgb => "rgb",
            Modality::Range => "range",
            Modality::CameraBev => "camera_bev",
            Modality::LidarBev => "lidar_bev",
        }
    }
}

impl fmt::Display for Modality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Modality {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Modality::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::Argument(format!("unknown modality {s:?}")))
    }
}

/// Scales `row` to unit L2 norm in place. Returns false for a zero row.
pub fn normalize_in_place(row: &mut [f32]) -> bool {
    let norm = row.iter().map(|&v| f64::from(v) * f64::from(v)).sum::<f64>().sqrt();
    if norm == 0.0 || !norm.is_finite() {
        return false;
    }
    if (norm - 1.0).abs() > UNIT_NORM_TOL {
        for v in row.iter_mut() {
            *v = (f64::from(*v) / norm) as f32;
        }
    }
    true
}

pub fn l2_norm(row: &[f32]) -> f64 {
    row.iter().map(|&v| f64::from(v) * f64::from(v)).sum::<f64>().sqrt()
}

/// Inner product accumulated in f64, left to right.
#[inline]
pub fn dot(a: &[f32], b: &[f32]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| f64::from(x) * f64::from(y)).sum()
}

/// A single unit-norm global descriptor.
#[derive(Debug, Clone, PartialEq)]
pub struct Descriptor {
    vector: Vec<f32>,
    frame_id: String,
    modality: Modality,
}

impl Descriptor {
    pub fn new(mut vector: Vec<f32>, frame_id: impl Into<String>, modality: Modality) -> Result<Self> {
        let frame_id = frame_id.into();
        if vector.iter().any(|v| !v.is_finite()) {
            return Err(Error::Data(format!("descriptor {frame_id} has non-finite values")));
        }
        if !normalize_in_place(&mut vector) {
            return Err(Error::Normalization { row: 0, id: frame_id });
        }
        Ok(Self {
            vector,
            frame_id,
            modality,
        })
    }

    pub fn vector(&self) -> &[f32] {
        &self.vector
    }

    pub fn frame_id(&self) -> &str {
        &self.frame_id
    }

    pub fn modality(&self) -> Modality {
        self.modality
    }

    pub fn dim(&self) -> usize {
        self.vector.len()
    }
}

/// An ordered collection of unit-norm descriptors of one modality.
#[derive(Debug, Clone)]
pub struct DescriptorSet {
    dim: usize,
    modality: Modality,
    ids: Vec<String>,
    data: Vec<f32>,
    lookup: HashMap<String, usize>,
}

impl PartialEq for DescriptorSet {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.modality == other.modality
            && self.ids == other.ids
            && self.data.len() == other.data.len()
            && self
                .data
                .iter()
                .zip(&other.data)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

impl DescriptorSet {
    /// Validates and L2-normalizes every row.
    pub fn new(modality: Modality, dim: usize, ids: Vec<String>, mut data: Vec<f32>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Argument("descriptor dimension must be positive".into()));
        }
        if data.len() != ids.len() * dim {
            return Err(Error::Dimension {
                expected: ids.len() * dim,
                found: data.len(),
            });
        }
        let mut lookup = HashMap::with_capacity(ids.len());
        for (row, id) in ids.iter().enumerate() {
            if lookup.insert(id.clone(), row).is_some() {
                return Err(Error::DuplicateId(id.clone()));
            }
        }
        for (row, chunk) in data.chunks_exact_mut(dim).enumerate() {
            if let Some(col) = chunk.iter().position(|v| !v.is_finite()) {
                return Err(Error::Data(format!(
                    "non-finite value at row {row}, column {col} ({})",
                    ids[row]
                )));
            }
            if !normalize_in_place(chunk) {
                return Err(Error::Normalization {
                    row,
                    id: ids[row].clone(),
                });
            }
        }
        Ok(Self {
            dim,
            modality,
            ids,
            data,
            lookup,
        })
    }

    pub fn from_descriptors(modality: Modality, descriptors: &[Descriptor]) -> Result<Self> {
        let dim = descriptors.first().map_or(DESCRIPTOR_DIM, Descriptor::dim);
        let mut ids = Vec::with_capacity(descriptors.len());
        let mut data = Vec::with_capacity(descriptors.len() * dim);
        for d in descriptors {
            if d.dim() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    found: d.dim(),
                });
            }
            ids.push(d.frame_id.clone());
            data.extend_from_slice(&d.vector);
        }
        Self::new(modality, dim, ids, data)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn modality(&self) -> Modality {
        self.modality
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.lookup.get(id).copied()
    }

    pub fn get(&self, id: &str) -> Option<&[f32]> {
        self.position(id).map(|i| self.row(i))
    }

    pub fn descriptor(&self, i: usize) -> Descriptor {
        Descriptor {
            vector: self.row(i).to_vec(),
            frame_id: self.ids[i].clone(),
            modality: self.modality,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f32])> {
        self.ids.iter().map(String::as_str).zip(self.data.chunks_exact(self.dim))
    }

    /// First position where the id sequences of `self` and `other` differ.
    pub fn first_id_mismatch<'a>(&'a self, other: &'a DescriptorSet) -> Option<&'a str> {
        for (a, b) in self.ids.iter().zip(&other.ids) {
            if a != b {
                return Some(a);
            }
        }
        match self.len().cmp(&other.len()) {
            std::cmp::Ordering::Greater => Some(&self.ids[other.len()]),
            std::cmp::Ordering::Less => Some(&other.ids[self.len()]),
            std::cmp::Ordering::Equal => None,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct DescriptorHeader {
    magic: String,
    dim: usize,
    count: usize,
    dtype: String,
    modality: Modality,
    ids: Vec<String>,
}

pub fn encode_descriptor_set(set: &DescriptorSet) -> Vec<u8> {
    let header = DescriptorHeader {
        magic: DESCRIPTOR_MAGIC.into(),
        dim: set.dim,
        count: set.len(),
        dtype: "f32le".into(),
        modality: set.modality,
        ids: set.ids.clone(),
    };
    let json = serde_json::to_string(&header).expect("header serializes");
    binfmt::encode(&json, set.data.iter().copied())
}

/// Parses a descriptor file. `expected_dim` of `None` accepts any
/// dimension recorded in the header.
pub fn decode_descriptor_set(bytes: &[u8], expected_dim: Option<usize>) -> Result<DescriptorSet> {
    let (header, offset): (DescriptorHeader, usize) = binfmt::split_header(bytes)?;
    if header.magic != DESCRIPTOR_MAGIC {
        return Err(Error::Format {
            offset: 0,
            message: format!("bad magic {:?}", header.magic),
        });
    }
    if header.dtype != "f32le" {
        return Err(Error::Format {
            offset: 0,
            message: format!("unsupported dtype {:?}", header.dtype),
        });
    }
    if header.ids.len() != header.count {
        return Err(Error::Format {
            offset: 0,
            message: format!("count {} but {} ids", header.count, header.ids.len()),
        });
    }
    if let Some(dim) = expected_dim {
        if header.dim != dim {
            return Err(Error::Dimension {
                expected: dim,
                found: header.dim,
            });
        }
    }
    let data = binfmt::read_f32_payload(bytes, offset, header.count * header.dim)?;
    DescriptorSet::new(header.modality, header.dim, header.ids, data)
}

/// Loads a 256-dimensional descriptor set, normalizing every row.
pub fn load_descriptor_set(path: impl AsRef<Path>) -> Result<DescriptorSet> {
    load_descriptor_set_with_dim(path, Some(DESCRIPTOR_DIM))
}

pub fn load_descriptor_set_with_dim(path: impl AsRef<Path>, expected_dim: Option<usize>) -> Result<DescriptorSet> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_descriptor_set(&bytes, expected_dim)
}

pub fn save_descriptor_set(set: &DescriptorSet, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, encode_descriptor_set(set)).map_err(|e| Error::io(path, e))
}
