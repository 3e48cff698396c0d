//! Reading and writing model archives and connectome edge lists.
//!
//! A `.rga` archive is one file:
//!
//! ```text
//! +----------------------+
//! | "RELGRAPH"  8 bytes  |
//! | manifest len  u64 LE |
//! | manifest  UTF-8 JSON |
//! | payload   raw LE     |
//! +----------------------+
//! ```
//!
//! The manifest carries `format_version`, the [`ModelMeta`] object, an optional
//! `epoch`, and one entry per tensor with `name`, `dtype`, `shape`,
//! `byte_offset` and `byte_length`. Offsets are relative to the first payload
//! byte.

mod archive;
mod connectome;
mod meta;
mod validate;

pub use archive::{
    read_archive, write_archive, ArchiveError, DType, ModelArchive, TensorData, TensorRecord,
    FORMAT_VERSION, MAGIC,
};
pub use connectome::{
    parse_connectome, read_connectome, write_connectome, ConnectomeError, ConnectomeGraph,
};
pub use meta::{layer_tensor_name, Family, ModelMeta};
pub use validate::{validate_archive, LayerInfo, ValidatedModel, ValidationError};
