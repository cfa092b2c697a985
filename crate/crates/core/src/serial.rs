//! Little-endian fixed-width framing helpers.

use std::io::{self, Read, Write};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use crate::error::{Error, Result};

fn map_eof(e: io::Error) -> Error {
    if e.kind() == io::ErrorKind::UnexpectedEof {
        Error::Format("truncated input".into())
    } else {
        Error::Io(e)
    }
}

pub fn write_u64<W: Write>(out: &mut W, v: u64) -> Result<()> {
    out.write_u64::<LittleEndian>(v)?;
    Ok(())
}

pub fn write_u32<W: Write>(out: &mut W, v: u32) -> Result<()> {
    out.write_u32::<LittleEndian>(v)?;
    Ok(())
}

pub fn write_u8<W: Write>(out: &mut W, v: u8) -> Result<()> {
    out.write_u8(v)?;
    Ok(())
}

pub fn read_u64<R: Read>(input: &mut R) -> Result<u64> {
    input.read_u64::<LittleEndian>().map_err(map_eof)
}

pub fn read_u32<R: Read>(input: &mut R) -> Result<u32> {
    input.read_u32::<LittleEndian>().map_err(map_eof)
}

pub fn read_u8<R: Read>(input: &mut R) -> Result<u8> {
    input.read_u8().map_err(map_eof)
}

/// Reads a u64 that must fit in memory as a length.
pub fn read_len<R: Read>(input: &mut R) -> Result<usize> {
    let v = read_u64(input)?;
    usize::try_from(v)
        .ok()
        .filter(|&v| v <= isize::MAX as usize)
        .ok_or_else(|| Error::Format(format!("length {v} too large")))
}

pub fn read_bytes<R: Read>(input: &mut R, n: usize) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    input.take(n as u64).read_to_end(&mut buf)?;
    if buf.len() != n {
        return Err(Error::Format("truncated input".into()));
    }
    Ok(buf)
}

/// Writes `body` prefixed by its byte length.
pub fn write_section<W: Write>(out: &mut W, body: &[u8]) -> Result<()> {
    write_u64(out, body.len() as u64)?;
    out.write_all(body)?;
    Ok(())
}

pub fn read_section<R: Read>(input: &mut R) -> Result<Vec<u8>> {
    let len = read_len(input)?;
    read_bytes(input, len)
}
