//! Entropy decoding and encoding of a single-component baseline scan.
//!
//! The scan is represented as a token stream: per block, one DC difference
//! token followed by run/length AC tokens. Each AC token records the slot
//! (DHT position) whose code was used to emit it, so a stream can be
//! re-encoded bit-exactly even under a table where one symbol owns two codes.

use crate::error::{Error, Result};

use super::bits::{BitReader, BitWriter};
use super::file::JpegFile;
use super::huffman::{CodeAssignment, HuffmanSpec, EOB, ZRL};

/// `ZIGZAG[i]` is the natural (row-major) index of zigzag position `i`.
#[rustfmt::skip]
pub const ZIGZAG: [usize; 64] = [
     0,  1,  8, 16,  9,  2,  3, 10,
    17, 24, 32, 25, 18, 11,  4,  5,
    12, 19, 26, 33, 40, 48, 41, 34,
    27, 20, 13,  6,  7, 14, 21, 28,
    35, 42, 49, 56, 57, 50, 43, 36,
    29, 22, 15, 23, 30, 37, 44, 51,
    58, 59, 52, 45, 38, 31, 39, 46,
    53, 60, 61, 54, 47, 55, 62, 63,
];

/// Largest AC magnitude a baseline scan can carry (size category 10).
pub const MAX_AC_MAGNITUDE: i32 = 1023;

/// One 8x8 block of quantized coefficients in zigzag order; index 0 is DC.
pub type Block = [i16; 64];

/// Quantized DCT coefficients of a grayscale image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientImage {
    pub width: usize,
    pub height: usize,
    pub blocks: Vec<Block>,
    /// Quantization steps in zigzag order.
    pub quant: [u16; 64],
    pub dc_spec: HuffmanSpec,
    pub ac_spec: HuffmanSpec,
}

impl CoefficientImage {
    pub fn blocks_wide(&self) -> usize {
        self.width.div_ceil(8)
    }

    pub fn blocks_high(&self) -> usize {
        self.height.div_ceil(8)
    }

    /// Number of zero-valued AC coefficients in each block.
    pub fn zero_ac_counts(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b[1..].iter().filter(|&&c| c == 0).count()).collect()
    }

    pub fn nonzero_ac_count(&self) -> usize {
        self.blocks.iter().map(|b| b[1..].iter().filter(|&&c| c != 0).count()).sum()
    }
}

/// Magnitude category (number of VLI bits) of a value.
pub fn size_category(v: i32) -> u8 {
    (32 - v.unsigned_abs().leading_zeros()) as u8
}

fn vli_bits(v: i32, size: u8) -> u32 {
    if v >= 0 {
        v as u32
    } else {
        (v + (1 << size) - 1) as u32
    }
}

fn vli_value(bits: u32, size: u8) -> i32 {
    if size == 0 {
        0
    } else if bits < (1 << (size - 1)) {
        bits as i32 - (1 << size) + 1
    } else {
        bits as i32
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DcToken {
    pub size: u8,
    pub diff: i16,
}

/// One run/length/value (RLV) token of the AC stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AcToken {
    /// Zeros preceding the coefficient within this token (0..=15).
    pub run: u8,
    /// VLI size category; zero only for EOB and ZRL.
    pub size: u8,
    pub value: i16,
    /// DHT slot whose code represents this token in the scan.
    pub slot: u8,
    /// Zigzag index of the coefficient (EOB: index after the last nonzero;
    /// ZRL: index of the sixteenth zero).
    pub position: u8,
}

impl AcToken {
    pub fn symbol(&self) -> u8 {
        (self.run << 4) | self.size
    }

    pub fn is_eob(&self) -> bool {
        self.symbol() == EOB
    }

    pub fn is_zrl(&self) -> bool {
        self.symbol() == ZRL
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockTokens {
    pub dc: DcToken,
    pub ac: Vec<AcToken>,
}

/// Token stream of a whole scan, one entry per block in scan order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanTokens {
    pub blocks: Vec<BlockTokens>,
}

impl ScanTokens {
    /// Run-length codes coefficient blocks, assigning each token the first
    /// slot of its symbol.
    pub fn from_blocks(blocks: &[Block], dc: &CodeAssignment, ac: &CodeAssignment) -> Result<Self> {
        let mut out = Vec::with_capacity(blocks.len());
        let mut pred = 0i32;
        for block in blocks {
            let diff = block[0] as i32 - pred;
            pred = block[0] as i32;
            let dsize = size_category(diff);
            if dsize > 11 {
                return Err(Error::CoefficientRange(diff));
            }
            if dc.slot_of(dsize).is_none() {
                return Err(Error::UnmappableSymbol(dsize));
            }
            let mut tokens = Vec::new();
            let mut run = 0u8;
            let last = (1..64).rev().find(|&i| block[i] != 0).unwrap_or(0);
            for (i, &c) in block.iter().enumerate().take(last + 1).skip(1) {
                let v = c as i32;
                if v == 0 {
                    run += 1;
                    continue;
                }
                while run >= 16 {
                    tokens.push(ac_token(ac, 15, 0, 0, (i - run as usize + 15) as u8)?);
                    run -= 16;
                }
                if v.abs() > MAX_AC_MAGNITUDE {
                    return Err(Error::CoefficientRange(v));
                }
                tokens.push(ac_token(ac, run, size_category(v), v as i16, i as u8)?);
                run = 0;
            }
            if last < 63 {
                tokens.push(ac_token(ac, 0, 0, 0, (last + 1) as u8)?);
            }
            out.push(BlockTokens {
                dc: DcToken { size: dsize, diff: diff as i16 },
                ac: tokens,
            });
        }
        Ok(ScanTokens { blocks: out })
    }

    /// Rebuilds coefficient blocks from the tokens.
    pub fn to_blocks(&self) -> Vec<Block> {
        let mut pred = 0i32;
        self.blocks
            .iter()
            .map(|bt| {
                let mut b = [0i16; 64];
                pred += bt.dc.diff as i32;
                b[0] = pred as i16;
                for t in &bt.ac {
                    if t.size > 0 {
                        b[t.position as usize] = t.value;
                    }
                }
                b
            })
            .collect()
    }

    /// Points every AC token at the first slot of its symbol under `ac`.
    pub fn retarget(&mut self, ac: &CodeAssignment) -> Result<()> {
        for t in self.ac_tokens_mut() {
            t.slot = ac.slot_of(t.symbol()).ok_or(Error::UnmappableSymbol(t.symbol()))? as u8;
        }
        Ok(())
    }

    pub fn ac_tokens(&self) -> impl Iterator<Item = &AcToken> {
        self.blocks.iter().flat_map(|b| b.ac.iter())
    }

    pub fn ac_tokens_mut(&mut self) -> impl Iterator<Item = &mut AcToken> {
        self.blocks.iter_mut().flat_map(|b| b.ac.iter_mut())
    }

    /// Occurrences of each slot in the AC stream.
    pub fn slot_counts(&self, slots: usize) -> Vec<u64> {
        let mut counts = vec![0u64; slots];
        for t in self.ac_tokens() {
            counts[t.slot as usize] += 1;
        }
        counts
    }
}

fn ac_token(ac: &CodeAssignment, run: u8, size: u8, value: i16, position: u8) -> Result<AcToken> {
    let symbol = (run << 4) | size;
    let slot = ac.slot_of(symbol).ok_or(Error::UnmappableSymbol(symbol))?;
    Ok(AcToken { run, size, value, slot: slot as u8, position })
}

/// Decodes `nblocks` blocks from a stuffed entropy-coded segment.
pub fn decode_tokens(
    scan: &[u8],
    dc: &CodeAssignment,
    ac: &CodeAssignment,
    nblocks: usize,
) -> Result<ScanTokens> {
    let mut r = BitReader::new(scan);
    let mut blocks = Vec::with_capacity(nblocks);
    for _ in 0..nblocks {
        let dslot = dc.decode_slot(&mut r)?;
        let dsize = dc.symbol(dslot);
        if dsize > 11 {
            return Err(Error::InvalidCode);
        }
        let diff = vli_value(r.read_bits(dsize as u32)?, dsize);
        let mut tokens = Vec::new();
        let mut k = 1usize;
        while k < 64 {
            let slot = ac.decode_slot(&mut r)?;
            let sym = ac.symbol(slot);
            let (run, size) = (sym >> 4, sym & 0x0F);
            if size == 0 {
                match run {
                    0 => {
                        tokens.push(AcToken { run, size, value: 0, slot: slot as u8, position: k as u8 });
                        break;
                    }
                    15 => {
                        if k + 16 > 64 {
                            return Err(Error::BlockOverflow);
                        }
                        tokens.push(AcToken { run, size, value: 0, slot: slot as u8, position: (k + 15) as u8 });
                        k += 16;
                        continue;
                    }
                    _ => return Err(Error::InvalidCode),
                }
            }
            if size > 10 {
                return Err(Error::InvalidCode);
            }
            k += run as usize;
            if k > 63 {
                return Err(Error::BlockOverflow);
            }
            let value = vli_value(r.read_bits(size as u32)?, size);
            tokens.push(AcToken { run, size, value: value as i16, slot: slot as u8, position: k as u8 });
            k += 1;
        }
        blocks.push(BlockTokens {
            dc: DcToken { size: dsize, diff: diff as i16 },
            ac: tokens,
        });
    }
    Ok(ScanTokens { blocks })
}

fn check_ac(ac: &CodeAssignment, t: &AcToken) -> Result<(u16, u8)> {
    let slot = t.slot as usize;
    if slot >= ac.len() || ac.symbol(slot) != t.symbol() {
        return Err(Error::UnmappableSymbol(t.symbol()));
    }
    Ok(ac.code(slot))
}

/// Encodes a token stream; the final byte is padded with 1-bits.
pub fn encode_tokens(tokens: &ScanTokens, dc: &CodeAssignment, ac: &CodeAssignment) -> Result<Vec<u8>> {
    let mut w = BitWriter::with_capacity(tokens.blocks.len() * 16);
    for bt in &tokens.blocks {
        let (code, len) = dc.code_for(bt.dc.size).ok_or(Error::UnmappableSymbol(bt.dc.size))?;
        w.put(code as u32, len as u32);
        w.put(vli_bits(bt.dc.diff as i32, bt.dc.size), bt.dc.size as u32);
        for t in &bt.ac {
            let (code, len) = check_ac(ac, t)?;
            w.put(code as u32, len as u32);
            w.put(vli_bits(t.value as i32, t.size), t.size as u32);
        }
    }
    Ok(w.finish())
}

/// Exact number of entropy-coded bits (codes plus VLI bits) the stream
/// occupies, excluding byte stuffing and final padding.
pub fn scan_bit_length(tokens: &ScanTokens, dc: &CodeAssignment, ac: &CodeAssignment) -> Result<u64> {
    let mut bits = 0u64;
    for bt in &tokens.blocks {
        let (_, len) = dc.code_for(bt.dc.size).ok_or(Error::UnmappableSymbol(bt.dc.size))?;
        bits += len as u64 + bt.dc.size as u64;
        for t in &bt.ac {
            let (_, len) = check_ac(ac, t)?;
            bits += len as u64 + t.size as u64;
        }
    }
    Ok(bits)
}

/// Decodes the scan of a parsed file into coefficients and tokens.
pub fn entropy_decode(file: &JpegFile) -> Result<(CoefficientImage, ScanTokens)> {
    let frame = file.frame();
    let (dc_spec, ac_spec) = file.scan_tables()?;
    let dc = CodeAssignment::new(&dc_spec)?;
    let ac = CodeAssignment::new(&ac_spec)?;
    let (width, height) = (frame.width as usize, frame.height as usize);
    let nblocks = width.div_ceil(8) * height.div_ceil(8);
    let tokens = decode_tokens(&file.scan, &dc, &ac, nblocks)?;
    let image = CoefficientImage {
        width,
        height,
        blocks: tokens.to_blocks(),
        quant: file.quant_table()?,
        dc_spec,
        ac_spec,
    };
    Ok((image, tokens))
}

/// Encodes coefficient blocks under the given tables.
pub fn entropy_encode(image: &CoefficientImage, dc_spec: &HuffmanSpec, ac_spec: &HuffmanSpec) -> Result<Vec<u8>> {
    let dc = CodeAssignment::new(dc_spec)?;
    let ac = CodeAssignment::new(ac_spec)?;
    let tokens = ScanTokens::from_blocks(&image.blocks, &dc, &ac)?;
    encode_tokens(&tokens, &dc, &ac)
}
