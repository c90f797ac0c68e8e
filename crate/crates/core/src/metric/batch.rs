use crate::error::{Error, Result};

/// `B × d` embeddings stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingBatch {
    dim: usize,
    data: Vec<f64>,
    frame_ids: Vec<String>,
}

impl EmbeddingBatch {
    pub fn new(dim: usize, data: Vec<f64>, frame_ids: Vec<String>) -> Result<Self> {
        if dim == 0 || frame_ids.is_empty() {
            return Err(Error::Argument("batch needs B >= 1 and d >= 1".into()));
        }
        if data.len() != dim * frame_ids.len() {
            return Err(Error::Dimension {
                expected: dim * frame_ids.len(),
                found: data.len(),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Data("batch contains non-finite values".into()));
        }
        Ok(Self { dim, data, frame_ids })
    }

    /// Batch with generated ids `0..B`.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::Dimension {
                expected: dim,
                found: bad.len(),
            });
        }
        let ids = (0..rows.len()).map(|i| i.to_string()).collect();
        Self::new(dim, rows.concat(), ids)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.frame_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frame_ids.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn frame_ids(&self) -> &[String] {
        &self.frame_ids
    }

    /// Same ids and shape with replaced values.
    pub fn with_data(&self, data: Vec<f64>) -> Result<Self> {
        Self::new(self.dim, data, self.frame_ids.clone())
    }
}
