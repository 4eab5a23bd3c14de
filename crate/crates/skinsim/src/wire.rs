//! Byte-exact wire protocol for streaming frames, with encoder and
//! resynchronizing incremental parser.
//!
//! Frame layout on the wire:
//!
//! ```text
//! ,------+------+---------+---+--------------------+-------,
//! | 0xAA | 0x55 | seq     | K | values             | CRC-8 |
//! | sync | sync | u16 LE  | u8| K x u16 LE         |       |
//! '------+------+---------+---+--------------------+-------'
//! ```
//!
//! The CRC-8 (polynomial 0x07, initial value 0x00, no reflection, no final
//! xor) covers the `seq..values` bytes. 10-bit ADC codes are zero-extended
//! to 16 bits. Timestamps are not carried on the wire; the parser
//! reconstructs them from the unwrapped sequence number and the configured
//! scan rate, which reproduces scanner-produced timestamps exactly.
//!
//! The parser accepts arbitrary garbage. A failed checksum yields a
//! [`ParseEvent::CorruptFrame`] and a rescan for the next sync pair starting
//! just past the failed sync; a jump in sequence numbers yields a
//! [`ParseEvent::Gap`]. Input may be split at any byte boundary without
//! changing the emitted event sequence.

use crate::daq::Frame;
use crate::error::{Error, Result};

pub const SYNC: [u8; 2] = [0xAA, 0x55];

/// Plain CRC-8: polynomial 0x07, init 0x00, no reflection, no final xor.
pub fn crc8(bytes: &[u8]) -> u8 {
    let mut crc: u8 = 0;
    for &b in bytes {
        crc ^= b;
        for _ in 0..8 {
            crc = if crc & 0x80 != 0 {
                (crc << 1) ^ 0x07
            } else {
                crc << 1
            };
        }
    }
    crc
}

/// Serialize one frame. Arrays wider than 255 taxels do not fit the one-byte
/// count field and must be split into multiple logical arrays upstream.
pub fn encode_frame(frame: &Frame) -> Result<Vec<u8>> {
    if frame.values.len() > 255 {
        return Err(Error::unsupported(format!(
            "{} taxels exceed the one-byte count field; split into multiple logical arrays",
            frame.values.len()
        )));
    }
    let k = frame.values.len() as u8;
    let mut out = Vec::with_capacity(8 + 2 * frame.values.len());
    out.extend_from_slice(&SYNC);
    out.extend_from_slice(&frame.seq.to_le_bytes());
    out.push(k);
    for v in &frame.values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    let crc = crc8(&out[2..]);
    out.push(crc);
    Ok(out)
}

/// Serialize a whole stream of frames back to back.
pub fn encode_stream(frames: &[Frame]) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    for frame in frames {
        out.extend_from_slice(&encode_frame(frame)?);
    }
    Ok(out)
}

/// Everything the parser can report. Anomalies are events, never failures.
#[derive(Debug, Clone, PartialEq)]
pub enum ParseEvent {
    Frame(Frame),
    /// A sync pair was found but the checksum did not match.
    CorruptFrame,
    /// Valid frames arrived with a discontinuity in sequence numbers; carries
    /// the number of missing frames (mod 2^16).
    Gap(u16),
}

/// Incremental, resynchronizing stream parser.
#[derive(Debug, Clone)]
pub struct StreamParser {
    buf: Vec<u8>,
    pos: usize,
    scan_rate: f64,
    last_seq: Option<u16>,
    unwrapped: u64,
}

impl StreamParser {
    /// `scan_rate` is used only to reconstruct timestamps.
    pub fn new(scan_rate: f64) -> StreamParser {
        StreamParser {
            buf: Vec::new(),
            pos: 0,
            scan_rate,
            last_seq: None,
            unwrapped: 0,
        }
    }

    /// Feed a chunk of bytes; returns the events it completes, in order.
    pub fn push(&mut self, bytes: &[u8]) -> Vec<ParseEvent> {
        self.buf.extend_from_slice(bytes);
        let mut events = Vec::new();
        loop {
            // Hunt for the sync pair.
            while self.pos + 1 < self.buf.len()
                && !(self.buf[self.pos] == SYNC[0] && self.buf[self.pos + 1] == SYNC[1])
            {
                self.pos += 1;
            }
            if self.pos + 1 >= self.buf.len() {
                break;
            }
            // Candidate frame: need the count byte to know the full length.
            let Some(&k) = self.buf.get(self.pos + 4) else {
                break;
            };
            // sync(2) + seq(2) + count(1) + values(2K) + crc(1)
            let total = 6 + 2 * k as usize;
            if self.buf.len() < self.pos + total {
                break;
            }
            let body = &self.buf[self.pos + 2..self.pos + total - 1];
            let crc = self.buf[self.pos + total - 1];
            if crc8(body) != crc {
                events.push(ParseEvent::CorruptFrame);
                // Rescan just past the failed sync so a real frame start
                // hiding inside the candidate is not skipped.
                self.pos += 2;
                continue;
            }
            let seq = u16::from_le_bytes([body[0], body[1]]);
            let mut values = Vec::with_capacity(k as usize);
            for i in 0..k as usize {
                values.push(u16::from_le_bytes([body[3 + 2 * i], body[4 + 2 * i]]));
            }
            match self.last_seq {
                None => self.unwrapped = seq as u64,
                Some(prev) => {
                    let delta = seq.wrapping_sub(prev);
                    let missing = delta.wrapping_sub(1);
                    if missing != 0 {
                        events.push(ParseEvent::Gap(missing));
                    }
                    self.unwrapped += if delta == 0 { 65_536 } else { delta as u64 };
                }
            }
            self.last_seq = Some(seq);
            let t = self.unwrapped as f64 / self.scan_rate;
            events.push(ParseEvent::Frame(Frame { seq, t, values }));
            self.pos += total;

            // Drop consumed prefix now and then so the buffer stays bounded.
            if self.pos > 4_096 {
                self.buf.drain(..self.pos);
                self.pos = 0;
            }
        }
        events
    }

    /// Signal end of stream. A candidate frame still waiting for bytes can
    /// never complete; it is reported corrupt and the remainder rescanned,
    /// so frames whose length field was mangled cannot hold later data
    /// hostage. Call once, after the last `push`.
    pub fn finish(&mut self) -> Vec<ParseEvent> {
        let mut events = Vec::new();
        loop {
            events.extend(self.push(&[]));
            let stuck_on_candidate = self.pos + 1 < self.buf.len()
                && self.buf[self.pos] == SYNC[0]
                && self.buf[self.pos + 1] == SYNC[1];
            if stuck_on_candidate {
                events.push(ParseEvent::CorruptFrame);
                self.pos += 2;
            } else {
                break;
            }
        }
        events
    }

    /// Bytes held back waiting for a complete candidate frame.
    pub fn pending_bytes(&self) -> usize {
        self.buf.len() - self.pos.min(self.buf.len())
    }
}

/// Parse a complete in-memory stream in one go.
pub fn parse_all(bytes: &[u8], scan_rate: f64) -> Vec<ParseEvent> {
    let mut parser = StreamParser::new(scan_rate);
    let mut events = parser.push(bytes);
    events.extend(parser.finish());
    events
}
