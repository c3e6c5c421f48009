//! Flat-file artifact storage.
//!
//! Small artifacts are JSON envelopes named `<name>.v<version>.json` carrying
//! a SHA-256 of the canonical payload. Similarity matrices use a little-endian
//! binary layout named `<name>.v<version>.bin`:
//!
//! ```text
//! magic    8 bytes   b"MSIMMTRX"
//! version  u32
//! n        u64
//! values   n*n f64, row-major
//! ids      n x (u32 byte length, UTF-8 bytes)
//! meta     u32 byte length, JSON {provenance, flagged}
//! digest   32 bytes, SHA-256 of everything above
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::similarity::{Provenance, SimilarityMatrix};

pub const JSON_FORMAT_VERSION: u32 = 1;
pub const MATRIX_FORMAT_VERSION: u32 = 1;

const MATRIX_MAGIC: &[u8; 8] = b"MSIMMTRX";
const ENVELOPE_FORMAT: &str = "moviesim-artifact";

#[derive(Serialize, Deserialize)]
struct Envelope {
    format: String,
    version: u32,
    name: String,
    sha256: String,
    payload: serde_json::Value,
}

#[derive(Serialize, Deserialize)]
struct MatrixMeta {
    provenance: Provenance,
    flagged: Vec<bool>,
}

#[derive(Debug, Clone)]
pub struct ArtifactStore {
    dir: PathBuf,
}

impl ArtifactStore {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        Ok(ArtifactStore { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn json_path(&self, name: &str) -> PathBuf {
        self.dir.join(format!("{name}.v{JSON_FORMAT_VERSION}.json"))
    }

    pub fn matrix_path(&self, name: &str) -> PathBuf {
        self.dir.join(format!("{name}.v{MATRIX_FORMAT_VERSION}.bin"))
    }

    pub fn has_json(&self, name: &str) -> bool {
        self.json_path(name).is_file()
    }

    pub fn has_matrix(&self, name: &str) -> bool {
        self.matrix_path(name).is_file()
    }

    pub fn save_json<T: Serialize>(&self, name: &str, value: &T) -> Result<PathBuf> {
        let payload = serde_json::to_value(value)?;
        let envelope = Envelope {
            format: ENVELOPE_FORMAT.into(),
            version: JSON_FORMAT_VERSION,
            name: name.into(),
            sha256: digest_hex(serde_json::to_string(&payload)?.as_bytes()),
            payload,
        };
        let path = self.json_path(name);
        write_atomic(&path, &serde_json::to_vec(&envelope)?)?;
        Ok(path)
    }

    pub fn load_json<T: DeserializeOwned>(&self, name: &str) -> Result<T> {
        let path = self.json_path(name);
        if !path.is_file() {
            if let Some(other) = self.other_version(name, "json") {
                return Err(Error::Version {
                    found: other,
                    expected: JSON_FORMAT_VERSION.to_string(),
                });
            }
        }
        let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
        decode_envelope(&bytes, name)
    }

    pub fn save_matrix(&self, name: &str, matrix: &SimilarityMatrix) -> Result<PathBuf> {
        let path = self.matrix_path(name);
        write_atomic(&path, &encode_matrix(matrix)?)?;
        Ok(path)
    }

    pub fn load_matrix(&self, name: &str) -> Result<SimilarityMatrix> {
        let path = self.matrix_path(name);
        if !path.is_file() {
            if let Some(other) = self.other_version(name, "bin") {
                return Err(Error::Version {
                    found: other,
                    expected: MATRIX_FORMAT_VERSION.to_string(),
                });
            }
        }
        let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
        decode_matrix(&bytes)
    }

    /// Removes the JSON and binary forms of `name`, ignoring absent files.
    pub fn remove(&self, name: &str) -> Result<()> {
        for p in [self.json_path(name), self.matrix_path(name)] {
            match fs::remove_file(&p) {
                Ok(()) => {}
                Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
                Err(e) => return Err(Error::io(p, e)),
            }
        }
        Ok(())
    }

    fn other_version(&self, name: &str, ext: &str) -> Option<String> {
        let prefix = format!("{name}.v");
        let suffix = format!(".{ext}");
        fs::read_dir(&self.dir).ok()?.flatten().find_map(|entry| {
            let file = entry.file_name().into_string().ok()?;
            let version = file.strip_prefix(&prefix)?.strip_suffix(&suffix)?;
            version.chars().all(|c| c.is_ascii_digit()).then(|| version.to_string())
        })
    }
}

fn digest_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("partial");
    fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

fn decode_envelope<T: DeserializeOwned>(bytes: &[u8], name: &str) -> Result<T> {
    let envelope: Envelope =
        serde_json::from_slice(bytes).map_err(|e| Error::Integrity(format!("{name}: unreadable envelope: {e}")))?;
    if envelope.format != ENVELOPE_FORMAT {
        return Err(Error::Integrity(format!(
            "{name}: unknown envelope format {:?}",
            envelope.format
        )));
    }
    if envelope.version != JSON_FORMAT_VERSION {
        return Err(Error::Version {
            found: envelope.version.to_string(),
            expected: JSON_FORMAT_VERSION.to_string(),
        });
    }
    let actual = digest_hex(serde_json::to_string(&envelope.payload)?.as_bytes());
    if actual != envelope.sha256 {
        return Err(Error::Integrity(format!("{name}: payload checksum mismatch")));
    }
    serde_json::from_value(envelope.payload)
        .map_err(|e| Error::Integrity(format!("{name}: payload does not match artifact kind: {e}")))
}

pub(crate) fn encode_matrix(m: &SimilarityMatrix) -> Result<Vec<u8>> {
    let n = m.len();
    let mut out = Vec::with_capacity(8 + 4 + 8 + n * n * 8 + n * 16 + 64);
    out.extend_from_slice(MATRIX_MAGIC);
    out.extend_from_slice(&MATRIX_FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&(n as u64).to_le_bytes());
    for v in m.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for id in m.movie_order() {
        out.extend_from_slice(&(id.len() as u32).to_le_bytes());
        out.extend_from_slice(id.as_bytes());
    }
    let meta = serde_json::to_vec(&MatrixMeta {
        provenance: m.provenance().clone(),
        flagged: m.flagged().to_vec(),
    })?;
    out.extend_from_slice(&(meta.len() as u32).to_le_bytes());
    out.extend_from_slice(&meta);
    let digest = Sha256::digest(&out);
    out.extend_from_slice(&digest);
    Ok(out)
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(len)
            .filter(|&end| end <= self.bytes.len())
            .ok_or_else(|| Error::Integrity(format!("matrix truncated at byte {}", self.pos)))?;
        let slice = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(slice)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

pub(crate) fn decode_matrix(bytes: &[u8]) -> Result<SimilarityMatrix> {
    if bytes.len() < 8 + 4 + 8 + 32 || &bytes[..8] != MATRIX_MAGIC {
        return Err(Error::Integrity("not a similarity matrix file".into()));
    }
    let body = &bytes[..bytes.len() - 32];
    let mut cur = Cursor { bytes: body, pos: 8 };
    let version = cur.u32()?;
    if version != MATRIX_FORMAT_VERSION {
        return Err(Error::Version {
            found: version.to_string(),
            expected: MATRIX_FORMAT_VERSION.to_string(),
        });
    }
    if Sha256::digest(body).as_slice() != &bytes[bytes.len() - 32..] {
        return Err(Error::Integrity("matrix checksum mismatch".into()));
    }
    let n = usize::try_from(cur.u64()?).map_err(|_| Error::Integrity("matrix dimension overflow".into()))?;
    let cells = n
        .checked_mul(n)
        .and_then(|c| c.checked_mul(8))
        .ok_or_else(|| Error::Integrity("matrix dimension overflow".into()))?;
    let values = cur
        .take(cells)?
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let mut ids = Vec::with_capacity(n);
    for _ in 0..n {
        let len = cur.u32()? as usize;
        let raw = cur.take(len)?;
        ids.push(String::from_utf8(raw.to_vec()).map_err(|_| Error::Integrity("movie id is not UTF-8".into()))?);
    }
    let meta_len = cur.u32()? as usize;
    let meta: MatrixMeta =
        serde_json::from_slice(cur.take(meta_len)?).map_err(|e| Error::Integrity(format!("matrix metadata: {e}")))?;
    if cur.pos != body.len() {
        return Err(Error::Integrity("trailing bytes in matrix file".into()));
    }
    SimilarityMatrix::from_parts(values, ids, meta.provenance, meta.flagged)
        .map_err(|e| Error::Integrity(e.to_string()))
}
