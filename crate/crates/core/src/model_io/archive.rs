use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::ModelMeta;

pub const MAGIC: &[u8; 8] = b"RELGRAPH";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ArchiveError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("file does not start with the RELGRAPH magic")]
    BadMagic,
    #[error("archive truncated: need {expected} bytes, found {actual}")]
    TruncatedPayload { expected: u64, actual: u64 },
    #[error("cannot parse manifest: {0}")]
    ManifestParse(String),
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u32),
    #[error("tensor {name}: shape {shape:?} needs {expected} scalars, payload holds {actual}")]
    ShapeMismatch {
        name: String,
        shape: Vec<usize>,
        expected: usize,
        actual: usize,
    },
    #[error("tensor {0} appears more than once")]
    DuplicateTensor(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DType {
    #[serde(rename = "float32")]
    F32,
    #[serde(rename = "float64")]
    F64,
}

impl DType {
    pub fn as_str(self) -> &'static str {
        match self {
            DType::F32 => "float32",
            DType::F64 => "float64",
        }
    }

    pub fn size(self) -> usize {
        match self {
            DType::F32 => 4,
            DType::F64 => 8,
        }
    }
}

/// Row-major scalar buffer.
#[derive(Debug, Clone, PartialEq)]
pub enum TensorData {
    F32(Vec<f32>),
    F64(Vec<f64>),
}

impl TensorData {
    pub fn len(&self) -> usize {
        match self {
            TensorData::F32(v) => v.len(),
            TensorData::F64(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dtype(&self) -> DType {
        match self {
            TensorData::F32(_) => DType::F32,
            TensorData::F64(_) => DType::F64,
        }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        match self {
            TensorData::F32(v) => v.iter().map(|&x| x as f64).collect(),
            TensorData::F64(v) => v.clone(),
        }
    }

    fn write_le(&self, out: &mut Vec<u8>) {
        match self {
            TensorData::F32(v) => v
                .iter()
                .for_each(|x| out.extend_from_slice(&x.to_le_bytes())),
            TensorData::F64(v) => v
                .iter()
                .for_each(|x| out.extend_from_slice(&x.to_le_bytes())),
        }
    }

    fn read_le(dtype: DType, bytes: &[u8]) -> Self {
        match dtype {
            DType::F32 => TensorData::F32(
                bytes
                    .chunks_exact(4)
                    .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
                    .collect(),
            ),
            DType::F64 => TensorData::F64(
                bytes
                    .chunks_exact(8)
                    .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
                    .collect(),
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TensorRecord {
    name: String,
    shape: Vec<usize>,
    data: TensorData,
}

impl TensorRecord {
    /// Fails with [`ArchiveError::ShapeMismatch`] when `shape` does not
    /// account for every scalar in `data`.
    pub fn new(
        name: impl Into<String>,
        shape: Vec<usize>,
        data: TensorData,
    ) -> Result<Self, ArchiveError> {
        let name = name.into();
        let expected: usize = shape.iter().product();
        if expected != data.len() {
            return Err(ArchiveError::ShapeMismatch {
                name,
                shape,
                expected,
                actual: data.len(),
            });
        }
        Ok(Self { name, shape, data })
    }

    /// Two-dimensional float32 tensor from an `ndarray` matrix.
    pub fn from_matrix_f32(name: impl Into<String>, m: &Array2<f64>) -> Self {
        let (r, c) = m.dim();
        let data = m.iter().map(|&x| x as f32).collect();
        Self::new(name, vec![r, c], TensorData::F32(data)).expect("shape matches by construction")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn dtype(&self) -> DType {
        self.data.dtype()
    }

    pub fn data(&self) -> &TensorData {
        &self.data
    }

    /// The tensor as an `f64` matrix when it is two-dimensional.
    pub fn to_matrix(&self) -> Option<Array2<f64>> {
        match self.shape[..] {
            [r, c] => Array2::from_shape_vec((r, c), self.data.to_f64()).ok(),
            _ => None,
        }
    }
}

/// Metadata plus named tensors of one checkpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelArchive {
    pub meta: ModelMeta,
    /// Training epoch, when the exporter recorded one.
    pub epoch: Option<u64>,
    tensors: Vec<TensorRecord>,
}

impl ModelArchive {
    pub fn new(meta: ModelMeta) -> Self {
        Self {
            meta,
            epoch: None,
            tensors: Vec::new(),
        }
    }

    pub fn push(&mut self, tensor: TensorRecord) -> Result<(), ArchiveError> {
        if self.get(tensor.name()).is_some() {
            return Err(ArchiveError::DuplicateTensor(tensor.name));
        }
        self.tensors.push(tensor);
        Ok(())
    }

    /// Builder form of [`push`](Self::push).
    pub fn with_tensor(mut self, tensor: TensorRecord) -> Result<Self, ArchiveError> {
        self.push(tensor)?;
        Ok(self)
    }

    pub fn get(&self, name: &str) -> Option<&TensorRecord> {
        self.tensors.iter().find(|t| t.name == name)
    }

    pub fn tensors(&self) -> &[TensorRecord] {
        &self.tensors
    }

    /// Serializes the archive. Output depends only on the archive contents.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut payload = Vec::new();
        let mut entries = Vec::with_capacity(self.tensors.len());
        for t in &self.tensors {
            let offset = payload.len() as u64;
            t.data.write_le(&mut payload);
            entries.push(ManifestEntry {
                name: t.name.clone(),
                dtype: t.dtype(),
                shape: t.shape.clone(),
                byte_offset: offset,
                byte_length: payload.len() as u64 - offset,
            });
        }
        let manifest = Manifest {
            format_version: FORMAT_VERSION,
            meta: self.meta.clone(),
            epoch: self.epoch,
            tensors: entries,
        };
        let manifest = serde_json::to_vec(&manifest).expect("manifest is always serializable");
        let mut out = Vec::with_capacity(16 + manifest.len() + payload.len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&(manifest.len() as u64).to_le_bytes());
        out.extend_from_slice(&manifest);
        out.extend_from_slice(&payload);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ArchiveError> {
        if bytes.len() < MAGIC.len() || &bytes[..MAGIC.len()] != MAGIC {
            return Err(ArchiveError::BadMagic);
        }
        let truncated = |expected: u64| ArchiveError::TruncatedPayload {
            expected,
            actual: bytes.len() as u64,
        };
        let len_bytes = bytes.get(8..16).ok_or_else(|| truncated(16))?;
        let manifest_len = u64::from_le_bytes(len_bytes.try_into().unwrap());
        let payload_start = 16u64.saturating_add(manifest_len);
        if payload_start > bytes.len() as u64 {
            return Err(truncated(payload_start));
        }
        let manifest: Manifest = serde_json::from_slice(&bytes[16..payload_start as usize])
            .map_err(|e| ArchiveError::ManifestParse(e.to_string()))?;
        if manifest.format_version != FORMAT_VERSION {
            return Err(ArchiveError::UnsupportedVersion(manifest.format_version));
        }

        let payload = &bytes[payload_start as usize..];
        let mut archive = ModelArchive::new(manifest.meta);
        archive.epoch = manifest.epoch;
        let mut payload_end = 0u64;
        for entry in manifest.tensors {
            let expected: usize = entry.shape.iter().product();
            let size = entry.dtype.size() as u64;
            if entry.byte_length % size != 0 || entry.byte_length / size != expected as u64 {
                return Err(ArchiveError::ShapeMismatch {
                    name: entry.name,
                    shape: entry.shape,
                    expected,
                    actual: (entry.byte_length / size) as usize,
                });
            }
            let end = entry.byte_offset.saturating_add(entry.byte_length);
            if end > payload.len() as u64 {
                return Err(truncated(payload_start.saturating_add(end)));
            }
            payload_end = payload_end.max(end);
            let data = TensorData::read_le(
                entry.dtype,
                &payload[entry.byte_offset as usize..end as usize],
            );
            archive.push(TensorRecord::new(entry.name, entry.shape, data)?)?;
        }
        if payload_end < payload.len() as u64 {
            return Err(ArchiveError::ManifestParse(format!(
                "{} trailing payload bytes not described by the manifest",
                payload.len() as u64 - payload_end
            )));
        }
        Ok(archive)
    }
}

#[derive(Serialize, Deserialize)]
struct Manifest {
    format_version: u32,
    meta: ModelMeta,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    epoch: Option<u64>,
    tensors: Vec<ManifestEntry>,
}

#[derive(Serialize, Deserialize)]
struct ManifestEntry {
    name: String,
    dtype: DType,
    shape: Vec<usize>,
    byte_offset: u64,
    byte_length: u64,
}

pub fn read_archive(path: impl AsRef<Path>) -> Result<ModelArchive, ArchiveError> {
    ModelArchive::from_bytes(&std::fs::read(path)?)
}

pub fn write_archive(archive: &ModelArchive, path: impl AsRef<Path>) -> Result<(), ArchiveError> {
    std::fs::write(path, archive.to_bytes())?;
    Ok(())
}
