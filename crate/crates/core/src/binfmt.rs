//! Shared framing for the JSON-header + little-endian f32 payload files.

use serde::de::DeserializeOwned;

use crate::error::{Error, Result};

/// Splits `bytes` at the first newline and parses the header line.
/// Returns the header and the byte offset where the payload starts.
pub(crate) fn split_header<H: DeserializeOwned>(bytes: &[u8]) -> Result<(H, usize)> {
    let Some(nl) = bytes.iter().position(|&b| b == b'\n') else {
        return Err(Error::Format {
            offset: bytes.len() as u64,
            message: "header line is not newline-terminated".into(),
        });
    };
    let line = std::str::from_utf8(&bytes[..nl]).map_err(|e| Error::Format {
        offset: e.valid_up_to() as u64,
        message: "header is not valid UTF-8".into(),
    })?;
    let header = serde_json::from_str(line).map_err(|e| Error::Format {
        // single-line header: column is 1-based byte position
        offset: e.column().saturating_sub(1) as u64,
        message: format!("malformed header: {e}"),
    })?;
    Ok((header, nl + 1))
}

/// Decodes exactly `count` f32 values starting at `offset`.
pub(crate) fn read_f32_payload(bytes: &[u8], offset: usize, count: usize) -> Result<Vec<f32>> {
    let expected = count
        .checked_mul(4)
        .and_then(|n| n.checked_add(offset))
        .ok_or_else(|| Error::Format {
            offset: offset as u64,
            message: "payload size overflows".into(),
        })?;
    if bytes.len() < expected {
        return Err(Error::Format {
            offset: bytes.len() as u64,
            message: format!(
                "payload truncated: expected {} bytes, found {}",
                expected - offset,
                bytes.len() - offset
            ),
        });
    }
    if bytes.len() > expected {
        return Err(Error::Format {
            offset: expected as u64,
            message: format!("{} trailing bytes after payload", bytes.len() - expected),
        });
    }
    Ok(bytes[offset..expected]
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect())
}

pub(crate) fn encode(header_json: &str, payload: impl Iterator<Item = f32>) -> Vec<u8> {
    let mut out = Vec::with_capacity(header_json.len() + 1);
    out.extend_from_slice(header_json.as_bytes());
    out.push(b'\n');
    for v in payload {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}
