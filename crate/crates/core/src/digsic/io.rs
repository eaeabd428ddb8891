//! Binary IQ stream format: 8-byte magic `FDEIQ001` followed by
//! interleaved little-endian float64 (re, im) pairs.

use num_complex::Complex64;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub const IQ_MAGIC: &[u8; 8] = b"FDEIQ001";

pub fn store_iq(samples: &[Complex64], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let io_err = |source| Error::Io {
        path: path.display().to_string(),
        source,
    };
    let mut file = std::fs::File::create(path).map_err(io_err)?;
    let mut buf = Vec::with_capacity(8 + samples.len() * 16);
    buf.extend_from_slice(IQ_MAGIC);
    for v in samples {
        buf.extend_from_slice(&v.re.to_le_bytes());
        buf.extend_from_slice(&v.im.to_le_bytes());
    }
    file.write_all(&buf).map_err(io_err)
}

pub fn load_iq(path: impl AsRef<Path>) -> Result<Vec<Complex64>> {
    let path = path.as_ref();
    let io_err = |source| Error::Io {
        path: path.display().to_string(),
        source,
    };
    let mut file = std::fs::File::open(path).map_err(io_err)?;
    let mut buf = Vec::new();
    file.read_to_end(&mut buf).map_err(io_err)?;
    if buf.len() < 8 || &buf[..8] != IQ_MAGIC {
        return Err(Error::Parse {
            line: 0,
            msg: "missing FDEIQ001 magic header".into(),
        });
    }
    let payload = &buf[8..];
    if payload.len() % 16 != 0 {
        return Err(Error::Parse {
            line: 0,
            msg: format!("truncated IQ payload of {} bytes", payload.len()),
        });
    }
    Ok(payload
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..].try_into().unwrap()),
            )
        })
        .collect())
}
