//! Binary time-tag files: the 8-byte magic `CFITAG01`, the tick length in
//! picoseconds as a little-endian u64, then 9-byte records of channel code
//! (u8) and tick (u64 LE) in time order. The acquisition is taken to end
//! after the last record.

use std::io::{BufWriter, Write};
use std::path::Path;

use cfi_core::sim::{Channel, Tag, TimeTagStream};

use crate::error::{Result, ToolError};

pub const MAGIC: &[u8; 8] = b"CFITAG01";
pub const HEADER_LEN: usize = 16;
pub const RECORD_LEN: usize = 9;

pub fn encode(stream: &TimeTagStream) -> Result<Vec<u8>> {
    let tick_ps = (stream.tick() * 1e12).round();
    if !(tick_ps >= 1.0) || (tick_ps * 1e-12 - stream.tick()).abs() > 1e-9 * stream.tick() {
        return Err(ToolError::Validation(format!(
            "tick {} s is not a whole number of picoseconds",
            stream.tick()
        )));
    }
    let mut out = Vec::with_capacity(HEADER_LEN + RECORD_LEN * stream.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(tick_ps as u64).to_le_bytes());
    for t in stream.records() {
        out.push(t.channel.code());
        out.extend_from_slice(&t.tick.to_le_bytes());
    }
    Ok(out)
}

/// Parses a tag file; errors name the byte offset of the offending field.
pub fn decode(bytes: &[u8]) -> std::result::Result<TimeTagStream, String> {
    if bytes.len() < HEADER_LEN {
        return Err(format!(
            "byte {}: header needs {HEADER_LEN} bytes, file has {}",
            bytes.len(),
            bytes.len()
        ));
    }
    if &bytes[..8] != MAGIC {
        return Err("byte 0: missing CFITAG01 magic".into());
    }
    let tick_ps = u64::from_le_bytes(bytes[8..16].try_into().expect("8 bytes"));
    if tick_ps == 0 {
        return Err("byte 8: tick length must be positive".into());
    }
    let body = &bytes[HEADER_LEN..];
    let whole = body.len() / RECORD_LEN * RECORD_LEN;
    if whole != body.len() {
        return Err(format!(
            "byte {}: truncated record ({} of {RECORD_LEN} bytes)",
            HEADER_LEN + whole,
            body.len() - whole
        ));
    }
    let mut records = Vec::with_capacity(body.len() / RECORD_LEN);
    for (k, rec) in body.chunks_exact(RECORD_LEN).enumerate() {
        let offset = HEADER_LEN + k * RECORD_LEN;
        let channel = Channel::from_code(rec[0])
            .ok_or_else(|| format!("byte {offset}: unknown channel code {}", rec[0]))?;
        let tick = u64::from_le_bytes(rec[1..].try_into().expect("8 bytes"));
        if records.last().is_some_and(|prev: &Tag| tick < prev.tick) {
            return Err(format!("byte {}: tick is earlier than the previous record", offset + 1));
        }
        records.push(Tag { tick, channel });
    }
    let tick = tick_ps as f64 * 1e-12;
    let duration = records.last().map_or(0.0, |r| (r.tick + 1) as f64 * tick);
    TimeTagStream::new(records, tick, duration).map_err(|e| e.to_string())
}

pub fn write_tags(path: &Path, stream: &TimeTagStream) -> Result<()> {
    let bytes = encode(stream)?;
    let file = std::fs::File::create(path).map_err(|e| ToolError::io(path, e))?;
    let mut w = BufWriter::new(file);
    w.write_all(&bytes).and_then(|_| w.flush()).map_err(|e| ToolError::io(path, e))
}

pub fn read_tags(path: &Path) -> Result<TimeTagStream> {
    let bytes = std::fs::read(path).map_err(|e| ToolError::io(path, e))?;
    decode(&bytes).map_err(|m| ToolError::format(path, m))
}
