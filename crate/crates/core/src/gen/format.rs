//! Binary dataset files.
//!
//! Little-endian layout: magic `ISRT`, version `1` (u8), key width in bits
//! (u8, 32 or 64), payload width in bytes (u8, 0, 4 or 8), one reserved
//! byte, record count (u64), then each record's key followed by its payload.

use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use thiserror::Error;

pub const MAGIC: &[u8; 4] = b"ISRT";
pub const VERSION: u8 = 1;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("bad magic {0:?}")]
    Magic([u8; 4]),
    #[error("unsupported version {0}")]
    Version(u8),
    #[error("unsupported key width {0}")]
    KeyWidth(u8),
    #[error("unsupported payload width {0}")]
    PayloadWidth(u8),
    #[error("{what} length {got} does not match record count {want}")]
    Length { what: &'static str, got: usize, want: usize },
}

/// Keys and payloads held column-wise; `payloads` is empty when the
/// payload width is 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dataset {
    pub key_bits: u8,
    pub payload_bytes: u8,
    pub keys: Vec<u64>,
    pub payloads: Vec<u64>,
}

impl Dataset {
    /// Keys with their original index as an 8-byte payload.
    pub fn indexed(key_bits: u8, keys: Vec<u64>) -> Self {
        let payloads = (0..keys.len() as u64).collect();
        Dataset {
            key_bits,
            payload_bytes: 8,
            keys,
            payloads,
        }
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    fn check(&self) -> Result<(), FormatError> {
        if self.key_bits != 32 && self.key_bits != 64 {
            return Err(FormatError::KeyWidth(self.key_bits));
        }
        if ![0, 4, 8].contains(&self.payload_bytes) {
            return Err(FormatError::PayloadWidth(self.payload_bytes));
        }
        let want = if self.payload_bytes == 0 { 0 } else { self.keys.len() };
        if self.payloads.len() != want {
            return Err(FormatError::Length {
                what: "payload",
                got: self.payloads.len(),
                want,
            });
        }
        Ok(())
    }

    pub fn write_to<W: Write>(&self, w: W) -> Result<(), FormatError> {
        self.check()?;
        let mut w = BufWriter::new(w);
        w.write_all(MAGIC)?;
        w.write_all(&[VERSION, self.key_bits, self.payload_bytes, 0])?;
        w.write_all(&(self.keys.len() as u64).to_le_bytes())?;
        for (i, &k) in self.keys.iter().enumerate() {
            match self.key_bits {
                32 => w.write_all(&(k as u32).to_le_bytes())?,
                _ => w.write_all(&k.to_le_bytes())?,
            }
            match self.payload_bytes {
                4 => w.write_all(&(self.payloads[i] as u32).to_le_bytes())?,
                8 => w.write_all(&self.payloads[i].to_le_bytes())?,
                _ => {}
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_from<R: Read>(r: R) -> Result<Self, FormatError> {
        let mut r = BufReader::new(r);
        let mut head = [0u8; 16];
        r.read_exact(&mut head)?;
        let magic: [u8; 4] = head[..4].try_into().unwrap();
        if &magic != MAGIC {
            return Err(FormatError::Magic(magic));
        }
        if head[4] != VERSION {
            return Err(FormatError::Version(head[4]));
        }
        let (key_bits, payload_bytes) = (head[5], head[6]);
        if key_bits != 32 && key_bits != 64 {
            return Err(FormatError::KeyWidth(key_bits));
        }
        if ![0, 4, 8].contains(&payload_bytes) {
            return Err(FormatError::PayloadWidth(payload_bytes));
        }
        let count = u64::from_le_bytes(head[8..16].try_into().unwrap()) as usize;
        let kb = key_bits as usize / 8;
        let rec = kb + payload_bytes as usize;
        let mut buf = Vec::new();
        r.read_to_end(&mut buf)?;
        if buf.len() != count * rec {
            return Err(FormatError::Length {
                what: "body",
                got: buf.len(),
                want: count * rec,
            });
        }
        let mut keys = Vec::with_capacity(count);
        let mut payloads = Vec::with_capacity(if payload_bytes == 0 { 0 } else { count });
        for chunk in buf.chunks_exact(rec) {
            keys.push(le(&chunk[..kb]));
            if payload_bytes > 0 {
                payloads.push(le(&chunk[kb..]));
            }
        }
        Ok(Dataset {
            key_bits,
            payload_bytes,
            keys,
            payloads,
        })
    }

    pub fn write_file(&self, path: impl AsRef<Path>) -> Result<(), FormatError> {
        self.write_to(std::fs::File::create(path)?)
    }

    pub fn read_file(path: impl AsRef<Path>) -> Result<Self, FormatError> {
        Self::read_from(std::fs::File::open(path)?)
    }
}

fn le(b: &[u8]) -> u64 {
    let mut x = [0u8; 8];
    x[..b.len()].copy_from_slice(b);
    u64::from_le_bytes(x)
}
