//! The `MKD1` dictionary container: a directory of named, checksummed
//! sections.
//!
//! ```text
//! "MKD1" | version u16 | section_count u16
//! per section: name_len u8 | name | offset u32 | length u32 | crc32 u32
//! section bodies, in directory order
//! ```
//!
//! Offsets are absolute. All integers are little-endian.

use thiserror::Error;

const MAGIC: &[u8; 4] = b"MKD1";
pub const CONTAINER_VERSION: u16 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Section {
    pub name: String,
    pub body: Vec<u8>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ContainerError {
    #[error("not a dictionary container (bad magic)")]
    BadMagic,
    #[error("unsupported container version {0}")]
    BadVersion(u16),
    #[error("container truncated in {0}")]
    Truncated(String),
    #[error("section {0:?} is out of bounds")]
    OutOfBounds(String),
    #[error("checksum mismatch in section {0:?}")]
    Checksum(String),
    #[error("duplicate section {0:?}")]
    Duplicate(String),
    #[error("missing section {0:?}")]
    Missing(String),
    #[error("section {section:?}: {reason}")]
    Section { section: String, reason: String },
}

pub fn write_container(sections: &[Section]) -> Vec<u8> {
    let header_len: usize = 8 + sections
        .iter()
        .map(|s| 1 + s.name.len() + 12)
        .sum::<usize>();
    let mut out = Vec::with_capacity(header_len + sections.iter().map(|s| s.body.len()).sum::<usize>());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&CONTAINER_VERSION.to_le_bytes());
    out.extend_from_slice(&(sections.len() as u16).to_le_bytes());
    let mut offset = header_len as u32;
    for s in sections {
        out.push(s.name.len() as u8);
        out.extend_from_slice(s.name.as_bytes());
        out.extend_from_slice(&offset.to_le_bytes());
        out.extend_from_slice(&(s.body.len() as u32).to_le_bytes());
        out.extend_from_slice(&crc32fast::hash(&s.body).to_le_bytes());
        offset += s.body.len() as u32;
    }
    for s in sections {
        out.extend_from_slice(&s.body);
    }
    out
}

pub fn read_container(bytes: &[u8]) -> Result<Vec<Section>, ContainerError> {
    let dir = || ContainerError::Truncated("directory".into());
    if bytes.len() < 4 {
        return Err(dir());
    }
    if &bytes[..4] != MAGIC {
        return Err(ContainerError::BadMagic);
    }
    let header = bytes.get(4..8).ok_or_else(dir)?;
    let version = u16::from_le_bytes([header[0], header[1]]);
    if version != CONTAINER_VERSION {
        return Err(ContainerError::BadVersion(version));
    }
    let count = u16::from_le_bytes([header[2], header[3]]) as usize;
    let mut pos = 8;
    let mut entries = Vec::with_capacity(count);
    for _ in 0..count {
        let name_len = *bytes.get(pos).ok_or_else(dir)? as usize;
        pos += 1;
        let name = bytes.get(pos..pos + name_len).ok_or_else(dir)?;
        let name = String::from_utf8(name.to_vec()).map_err(|_| ContainerError::Section {
            section: String::from_utf8_lossy(name).into_owned(),
            reason: "section name is not UTF-8".into(),
        })?;
        pos += name_len;
        let fields = bytes.get(pos..pos + 12).ok_or_else(dir)?;
        pos += 12;
        let word = |i: usize| u32::from_le_bytes(fields[i..i + 4].try_into().unwrap());
        entries.push((name, word(0) as usize, word(4) as usize, word(8)));
    }
    let mut sections: Vec<Section> = Vec::with_capacity(count);
    for (name, offset, length, crc) in entries {
        if sections.iter().any(|s| s.name == name) {
            return Err(ContainerError::Duplicate(name));
        }
        if offset < pos || offset.checked_add(length).is_none_or(|end| end > bytes.len()) {
            return Err(if offset <= bytes.len() && offset >= pos {
                ContainerError::Truncated(name)
            } else {
                ContainerError::OutOfBounds(name)
            });
        }
        let body = &bytes[offset..offset + length];
        if crc32fast::hash(body) != crc {
            return Err(ContainerError::Checksum(name));
        }
        sections.push(Section {
            name,
            body: body.to_vec(),
        });
    }
    Ok(sections)
}
