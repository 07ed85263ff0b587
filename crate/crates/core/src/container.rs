//! Flat binary container shared by model checkpoints (`LRNN`) and cached datasets (`DATA`).
//!
//! Layout, all integers and floats little-endian:
//!
//! ```text
//! magic      [u8; 4]
//! version    u32
//! n_dims     u32
//! dims       u64 × n_dims
//! n_blocks   u32
//! blocks     { name_len u32, name utf-8, count u64, values f64 × count } × n_blocks
//! ```

use std::io::Write;

use crate::error::{Error, Result};

pub const CONTAINER_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub name: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Container {
    pub magic: [u8; 4],
    pub version: u32,
    pub dims: Vec<u64>,
    pub blocks: Vec<Block>,
}

impl Container {
    pub fn new(magic: [u8; 4], dims: Vec<u64>) -> Self {
        Self {
            magic,
            version: CONTAINER_VERSION,
            dims,
            blocks: Vec::new(),
        }
    }

    pub fn push(&mut self, name: impl Into<String>, values: Vec<f64>) {
        self.blocks.push(Block {
            name: name.into(),
            values,
        });
    }

    pub fn block(&self, name: &str) -> Result<&[f64]> {
        self.blocks
            .iter()
            .find(|b| b.name == name)
            .map(|b| b.values.as_slice())
            .ok_or_else(|| Error::format(0, format!("missing block `{name}`")))
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(&self.magic);
        out.extend_from_slice(&self.version.to_le_bytes());
        out.extend_from_slice(&(self.dims.len() as u32).to_le_bytes());
        for d in &self.dims {
            out.extend_from_slice(&d.to_le_bytes());
        }
        out.extend_from_slice(&(self.blocks.len() as u32).to_le_bytes());
        for b in &self.blocks {
            out.extend_from_slice(&(b.name.len() as u32).to_le_bytes());
            out.extend_from_slice(b.name.as_bytes());
            out.extend_from_slice(&(b.values.len() as u64).to_le_bytes());
            for v in &b.values {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out
    }

    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        w.write_all(&self.to_bytes())?;
        Ok(())
    }

    pub fn from_bytes(bytes: &[u8], expected_magic: [u8; 4]) -> Result<Self> {
        let mut r = Reader { bytes, pos: 0 };
        let magic: [u8; 4] = r.take(4)?.try_into().expect("4 bytes");
        if magic != expected_magic {
            return Err(Error::format(
                0,
                format!(
                    "bad magic {:?}, expected {:?}",
                    String::from_utf8_lossy(&magic),
                    String::from_utf8_lossy(&expected_magic)
                ),
            ));
        }
        let version = r.u32()?;
        if version != CONTAINER_VERSION {
            return Err(Error::format(4, format!("unsupported version {version}")));
        }
        let n_dims = r.u32()? as usize;
        let dims = (0..n_dims).map(|_| r.u64()).collect::<Result<Vec<_>>>()?;
        let n_blocks = r.u32()? as usize;
        let mut blocks = Vec::with_capacity(n_blocks.min(1024));
        for _ in 0..n_blocks {
            let name_len = r.u32()? as usize;
            let at = r.pos;
            let name = String::from_utf8(r.take(name_len)?.to_vec())
                .map_err(|_| Error::format(at as u64, "block name is not utf-8"))?;
            let count = r.u64()? as usize;
            let raw = r.take(count.checked_mul(8).ok_or_else(|| Error::format(r.pos as u64, "block too large"))?)?;
            let values = raw
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
                .collect();
            blocks.push(Block { name, values });
        }
        if r.pos != bytes.len() {
            return Err(Error::format(r.pos as u64, "trailing bytes after last block"));
        }
        Ok(Self {
            magic,
            version,
            dims,
            blocks,
        })
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| {
                Error::format(
                    self.pos as u64,
                    format!("truncated: need {n} bytes, {} left", self.bytes.len() - self.pos),
                )
            })?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
}
