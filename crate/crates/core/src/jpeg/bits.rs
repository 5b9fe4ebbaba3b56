//! Bit-level access to entropy-coded segments with JPEG byte stuffing.

use crate::error::{Error, Result};

/// MSB-first reader over a stuffed entropy-coded segment.
///
/// `0xFF 0x00` pairs are read as a single `0xFF`. Peeking past the end yields
/// 1-bits (the padding convention); consuming them is an error.
pub struct BitReader<'a> {
    data: &'a [u8],
    pos: usize,
    acc: u64,
    nbits: u32,
    // Number of synthetic 1-bits appended after the end of the data.
    padded: u32,
}

impl<'a> BitReader<'a> {
    pub fn new(data: &'a [u8]) -> Self {
        BitReader { data, pos: 0, acc: 0, nbits: 0, padded: 0 }
    }

    fn refill(&mut self) -> Result<()> {
        while self.nbits <= 56 {
            let byte = if self.pos < self.data.len() {
                let b = self.data[self.pos];
                self.pos += 1;
                if b == 0xFF {
                    match self.data.get(self.pos) {
                        Some(0x00) => self.pos += 1,
                        Some(m) => return Err(Error::InvalidMarker(format!("0xFF{m:02X} inside scan"))),
                        None => return Err(Error::TruncatedStream("dangling 0xFF in scan")),
                    }
                }
                b
            } else {
                self.padded += 8;
                0xFF
            };
            self.acc |= (byte as u64) << (56 - self.nbits);
            self.nbits += 8;
        }
        Ok(())
    }

    pub fn peek(&mut self, n: u32) -> Result<u32> {
        debug_assert!(n > 0 && n <= 32);
        if self.nbits < n {
            self.refill()?;
        }
        Ok((self.acc >> (64 - n)) as u32)
    }

    pub fn consume(&mut self, n: u32) -> Result<()> {
        if self.nbits < n {
            self.refill()?;
        }
        self.acc <<= n;
        self.nbits -= n;
        if self.padded > self.nbits {
            return Err(Error::TruncatedStream("entropy-coded data"));
        }
        Ok(())
    }

    pub fn read_bits(&mut self, n: u32) -> Result<u32> {
        if n == 0 {
            return Ok(0);
        }
        let v = self.peek(n)?;
        self.consume(n)?;
        Ok(v)
    }

    pub fn read_bit(&mut self) -> Result<u32> {
        self.read_bits(1)
    }
}

/// MSB-first writer that applies byte stuffing and pads the final byte with
/// 1-bits.
#[derive(Default)]
pub struct BitWriter {
    out: Vec<u8>,
    acc: u64,
    nbits: u32,
    written: u64,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bytes: usize) -> Self {
        BitWriter { out: Vec::with_capacity(bytes), ..Self::default() }
    }

    pub fn put(&mut self, bits: u32, n: u32) {
        debug_assert!(n <= 32);
        if n == 0 {
            return;
        }
        let bits = (bits as u64) & ((1u64 << n) - 1);
        self.acc = (self.acc << n) | bits;
        self.nbits += n;
        self.written += n as u64;
        while self.nbits >= 8 {
            let b = (self.acc >> (self.nbits - 8)) as u8;
            self.out.push(b);
            if b == 0xFF {
                self.out.push(0x00);
            }
            self.nbits -= 8;
        }
    }

    /// Payload bits written so far, excluding stuffing and padding.
    pub fn bit_len(&self) -> u64 {
        self.written
    }

    pub fn finish(mut self) -> Vec<u8> {
        if self.nbits > 0 {
            let pad = 8 - self.nbits;
            self.put((1 << pad) - 1, pad);
        }
        self.out
    }
}
