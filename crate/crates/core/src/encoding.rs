//! On-disk bit formats.
//!
//! - `ascii`: one `'0'`/`'1'` byte per bit, no separators. A single trailing
//!   newline is tolerated on input and never written.
//! - `packed`: an 8-byte little-endian bit count, then the bits packed
//!   LSB-first within each byte. The final partial byte is zero-padded.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

pub const PACKED_HEADER_LEN: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BitEncoding {
    Ascii,
    Packed,
}

impl FromStr for BitEncoding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ascii" => Ok(BitEncoding::Ascii),
            "packed" => Ok(BitEncoding::Packed),
            other => Err(Error::Config(format!("unknown bit encoding {other:?}"))),
        }
    }
}

impl fmt::Display for BitEncoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BitEncoding::Ascii => "ascii",
            BitEncoding::Packed => "packed",
        })
    }
}

pub fn encode(bits: &[bool], encoding: BitEncoding) -> Vec<u8> {
    match encoding {
        BitEncoding::Ascii => encode_ascii(bits),
        BitEncoding::Packed => encode_packed(bits),
    }
}

pub fn decode(bytes: &[u8], encoding: BitEncoding) -> Result<Vec<bool>> {
    match encoding {
        BitEncoding::Ascii => decode_ascii(bytes),
        BitEncoding::Packed => decode_packed(bytes),
    }
}

pub fn encode_ascii(bits: &[bool]) -> Vec<u8> {
    bits.iter().map(|&b| if b { b'1' } else { b'0' }).collect()
}

pub fn decode_ascii(bytes: &[u8]) -> Result<Vec<bool>> {
    let body = bytes
        .strip_suffix(b"\r\n")
        .or_else(|| bytes.strip_suffix(b"\n"))
        .unwrap_or(bytes);
    body.iter()
        .enumerate()
        .map(|(offset, &c)| match c {
            b'0' => Ok(false),
            b'1' => Ok(true),
            other => Err(Error::Parse {
                offset,
                message: format!("expected '0' or '1', found byte 0x{other:02x}"),
            }),
        })
        .collect()
}

pub fn encode_packed(bits: &[bool]) -> Vec<u8> {
    let mut out = Vec::with_capacity(PACKED_HEADER_LEN + bits.len().div_ceil(8));
    out.extend_from_slice(&(bits.len() as u64).to_le_bytes());
    for chunk in bits.chunks(8) {
        let byte = chunk
            .iter()
            .enumerate()
            .fold(0u8, |acc, (i, &b)| acc | ((b as u8) << i));
        out.push(byte);
    }
    out
}

pub fn decode_packed(bytes: &[u8]) -> Result<Vec<bool>> {
    if bytes.len() < PACKED_HEADER_LEN {
        return Err(Error::Parse {
            offset: bytes.len(),
            message: format!(
                "truncated header: need {PACKED_HEADER_LEN} bytes, found {}",
                bytes.len()
            ),
        });
    }
    let (header, payload) = bytes.split_at(PACKED_HEADER_LEN);
    let count = u64::from_le_bytes(header.try_into().expect("8-byte header"));
    let expected = usize::try_from(count)
        .ok()
        .and_then(|c| c.checked_add(7))
        .map(|c| c / 8)
        .ok_or_else(|| Error::Parse {
            offset: 0,
            message: format!("bit count {count} is not addressable"),
        })?;
    if payload.len() != expected {
        let offset = PACKED_HEADER_LEN + payload.len().min(expected);
        return Err(Error::Parse {
            offset,
            message: format!(
                "header declares {count} bits ({expected} payload bytes), found {} payload bytes",
                payload.len()
            ),
        });
    }
    let count = count as usize;
    let tail_bits = count % 8;
    if tail_bits != 0 {
        let last = payload[expected - 1];
        if last >> tail_bits != 0 {
            return Err(Error::Parse {
                offset: PACKED_HEADER_LEN + expected - 1,
                message: "nonzero padding bits in final byte".into(),
            });
        }
    }
    Ok((0..count).map(|i| (payload[i / 8] >> (i % 8)) & 1 == 1).collect())
}
