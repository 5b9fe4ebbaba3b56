//! Huffman table specifications (DHT contents) and canonical code construction.

use crate::error::{Error, Result};

use super::bits::BitReader;

/// Number of run/length symbols in a complete baseline AC table.
pub const AC_SYMBOL_COUNT: usize = 162;

/// End-of-block run/length symbol (0/0).
pub const EOB: u8 = 0x00;
/// Zero-run-length symbol (F/0): sixteen zeros.
pub const ZRL: u8 = 0xF0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TableClass {
    Dc,
    Ac,
}

impl TableClass {
    pub fn from_nibble(n: u8) -> Option<Self> {
        match n {
            0 => Some(TableClass::Dc),
            1 => Some(TableClass::Ac),
            _ => None,
        }
    }

    pub fn nibble(self) -> u8 {
        match self {
            TableClass::Dc => 0,
            TableClass::Ac => 1,
        }
    }
}

/// Contents of one DHT table definition.
///
/// `counts[i]` is the number of codes of length `i + 1`; `symbols` lists the
/// symbols in code order. The index of a symbol in `symbols` is its *slot*:
/// the code bit pattern belongs to the slot, not to the symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HuffmanSpec {
    pub class: TableClass,
    pub id: u8,
    pub counts: [u8; 16],
    pub symbols: Vec<u8>,
}

const STD_DC_COUNTS: [u8; 16] = [0, 1, 5, 1, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0];
const STD_DC_SYMBOLS: [u8; 12] = [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11];

const STD_AC_COUNTS: [u8; 16] = [0, 2, 1, 3, 3, 2, 4, 3, 5, 5, 4, 4, 0, 0, 1, 0x7d];
#[rustfmt::skip]
const STD_AC_SYMBOLS: [u8; AC_SYMBOL_COUNT] = [
    0x01, 0x02, 0x03, 0x00, 0x04, 0x11, 0x05, 0x12,
    0x21, 0x31, 0x41, 0x06, 0x13, 0x51, 0x61, 0x07,
    0x22, 0x71, 0x14, 0x32, 0x81, 0x91, 0xa1, 0x08,
    0x23, 0x42, 0xb1, 0xc1, 0x15, 0x52, 0xd1, 0xf0,
    0x24, 0x33, 0x62, 0x72, 0x82, 0x09, 0x0a, 0x16,
    0x17, 0x18, 0x19, 0x1a, 0x25, 0x26, 0x27, 0x28,
    0x29, 0x2a, 0x34, 0x35, 0x36, 0x37, 0x38, 0x39,
    0x3a, 0x43, 0x44, 0x45, 0x46, 0x47, 0x48, 0x49,
    0x4a, 0x53, 0x54, 0x55, 0x56, 0x57, 0x58, 0x59,
    0x5a, 0x63, 0x64, 0x65, 0x66, 0x67, 0x68, 0x69,
    0x6a, 0x73, 0x74, 0x75, 0x76, 0x77, 0x78, 0x79,
    0x7a, 0x83, 0x84, 0x85, 0x86, 0x87, 0x88, 0x89,
    0x8a, 0x92, 0x93, 0x94, 0x95, 0x96, 0x97, 0x98,
    0x99, 0x9a, 0xa2, 0xa3, 0xa4, 0xa5, 0xa6, 0xa7,
    0xa8, 0xa9, 0xaa, 0xb2, 0xb3, 0xb4, 0xb5, 0xb6,
    0xb7, 0xb8, 0xb9, 0xba, 0xc2, 0xc3, 0xc4, 0xc5,
    0xc6, 0xc7, 0xc8, 0xc9, 0xca, 0xd2, 0xd3, 0xd4,
    0xd5, 0xd6, 0xd7, 0xd8, 0xd9, 0xda, 0xe1, 0xe2,
    0xe3, 0xe4, 0xe5, 0xe6, 0xe7, 0xe8, 0xe9, 0xea,
    0xf1, 0xf2, 0xf3, 0xf4, 0xf5, 0xf6, 0xf7, 0xf8,
    0xf9, 0xfa,
];

impl HuffmanSpec {
    /// Annex K luminance DC table (class 0, id 0).
    pub fn standard_dc() -> Self {
        HuffmanSpec {
            class: TableClass::Dc,
            id: 0,
            counts: STD_DC_COUNTS,
            symbols: STD_DC_SYMBOLS.to_vec(),
        }
    }

    /// Annex K luminance AC table (class 1, id 0).
    pub fn standard_ac() -> Self {
        HuffmanSpec {
            class: TableClass::Ac,
            id: 0,
            counts: STD_AC_COUNTS,
            symbols: STD_AC_SYMBOLS.to_vec(),
        }
    }

    /// Same counts and symbol order as the Annex K luminance AC table,
    /// ignoring the table id.
    pub fn is_standard_ac(&self) -> bool {
        self.class == TableClass::Ac && self.counts == STD_AC_COUNTS && self.symbols == STD_AC_SYMBOLS
    }

    /// Code length of every slot, in slot order.
    pub fn slot_lengths(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.symbols.len());
        for (i, &n) in self.counts.iter().enumerate() {
            out.extend(std::iter::repeat_n(i as u8 + 1, n as usize));
        }
        out
    }

    /// Size of the table body in a DHT segment (class/id byte, counts, symbols).
    pub fn encoded_len(&self) -> usize {
        1 + 16 + self.symbols.len()
    }

    /// Appends the DHT table body.
    pub fn write_to(&self, out: &mut Vec<u8>) {
        out.push((self.class.nibble() << 4) | self.id);
        out.extend_from_slice(&self.counts);
        out.extend_from_slice(&self.symbols);
    }

    /// Parses one table body, returning it and the number of bytes consumed.
    pub fn read_from(data: &[u8]) -> Result<(Self, usize)> {
        if data.len() < 17 {
            return Err(Error::TruncatedStream("DHT table header"));
        }
        let class = TableClass::from_nibble(data[0] >> 4)
            .ok_or_else(|| Error::InvalidMarker(format!("DHT table class {}", data[0] >> 4)))?;
        let id = data[0] & 0x0F;
        if id > 3 {
            return Err(Error::InvalidMarker(format!("DHT table id {id}")));
        }
        let mut counts = [0u8; 16];
        counts.copy_from_slice(&data[1..17]);
        let total: usize = counts.iter().map(|&c| c as usize).sum();
        if total > 256 {
            return Err(Error::InvalidMarker(format!("DHT declares {total} symbols")));
        }
        if data.len() < 17 + total {
            return Err(Error::TruncatedStream("DHT symbols"));
        }
        let spec = HuffmanSpec {
            class,
            id,
            counts,
            symbols: data[17..17 + total].to_vec(),
        };
        Ok((spec, 17 + total))
    }
}

const LOOKAHEAD: u32 = 9;

/// Canonical code assignment derived from a [`HuffmanSpec`].
///
/// Slots receive codes in increasing numeric order, shortest lengths first.
/// A symbol may occupy more than one slot (a marked table); lookups by symbol
/// return its first slot.
#[derive(Debug, Clone)]
pub struct CodeAssignment {
    symbols: Vec<u8>,
    codes: Vec<u16>,
    lengths: Vec<u8>,
    first_slot: [Option<u8>; 256],
    // Decoding tables, indexed by code length 1..=16.
    maxcode: [i32; 18],
    valptr: [i32; 17],
    mincode: [i32; 17],
    // (slot + 1, length) for every LOOKAHEAD-bit prefix; zero when longer.
    fast: Vec<(u16, u8)>,
}

impl CodeAssignment {
    pub fn new(spec: &HuffmanSpec) -> Result<Self> {
        let total: usize = spec.counts.iter().map(|&c| c as usize).sum();
        if total != spec.symbols.len() {
            return Err(Error::InvalidMarker(format!(
                "Huffman counts sum to {total} but {} symbols given",
                spec.symbols.len()
            )));
        }
        let mut codes = Vec::with_capacity(total);
        let mut lengths = Vec::with_capacity(total);
        let mut maxcode = [-1i32; 18];
        let mut valptr = [0i32; 17];
        let mut mincode = [0i32; 17];
        let mut code: u32 = 0;
        let mut slot = 0usize;
        for len in 1..=16usize {
            let n = spec.counts[len - 1] as usize;
            valptr[len] = slot as i32;
            mincode[len] = code as i32;
            for _ in 0..n {
                if code >= (1 << len) {
                    return Err(Error::KraftViolation);
                }
                codes.push(code as u16);
                lengths.push(len as u8);
                code += 1;
                slot += 1;
            }
            if n > 0 {
                maxcode[len] = code as i32 - 1;
            }
            if code > (1 << len) {
                return Err(Error::KraftViolation);
            }
            code <<= 1;
        }
        maxcode[17] = i32::MAX;

        let mut first_slot = [None; 256];
        for (i, &s) in spec.symbols.iter().enumerate() {
            if first_slot[s as usize].is_none() {
                first_slot[s as usize] = Some(i as u8);
            }
        }

        let mut fast = vec![(0u16, 0u8); 1 << LOOKAHEAD];
        for i in 0..total {
            let len = lengths[i] as u32;
            if len > LOOKAHEAD {
                continue;
            }
            let shift = LOOKAHEAD - len;
            let base = (codes[i] as usize) << shift;
            for e in &mut fast[base..base + (1 << shift)] {
                *e = (i as u16 + 1, len as u8);
            }
        }

        Ok(CodeAssignment {
            symbols: spec.symbols.clone(),
            codes,
            lengths,
            first_slot,
            maxcode,
            valptr,
            mincode,
            fast,
        })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbol(&self, slot: usize) -> u8 {
        self.symbols[slot]
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    /// Code bits (right-aligned) and length of a slot.
    pub fn code(&self, slot: usize) -> (u16, u8) {
        (self.codes[slot], self.lengths[slot])
    }

    pub fn length(&self, slot: usize) -> u8 {
        self.lengths[slot]
    }

    pub fn slot_of(&self, symbol: u8) -> Option<usize> {
        self.first_slot[symbol as usize].map(usize::from)
    }

    /// Code of the first slot holding `symbol`.
    pub fn code_for(&self, symbol: u8) -> Option<(u16, u8)> {
        self.slot_of(symbol).map(|s| self.code(s))
    }

    /// Reads one code from the stream and returns its slot.
    pub(crate) fn decode_slot(&self, reader: &mut BitReader<'_>) -> Result<usize> {
        let peek = reader.peek(LOOKAHEAD)?;
        let (slot1, len) = self.fast[peek as usize];
        if slot1 != 0 {
            reader.consume(len as u32)?;
            return Ok(slot1 as usize - 1);
        }
        let mut code = 0i32;
        for len in 1..=16usize {
            code = (code << 1) | reader.read_bit()? as i32;
            if self.maxcode[len] >= 0 && code <= self.maxcode[len] && code >= self.mincode[len] {
                return Ok((self.valptr[len] + code - self.mincode[len]) as usize);
            }
        }
        Err(Error::InvalidCode)
    }
}

/// Renders a code as a string of '0'/'1' characters.
pub fn code_string(code: u16, len: u8) -> String {
    (0..len)
        .rev()
        .map(|i| if (code >> i) & 1 == 1 { '1' } else { '0' })
        .collect()
}
