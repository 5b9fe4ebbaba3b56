//! Baseline grayscale JPEG: segment parsing, Huffman coding, scan tokens and
//! pixel reconstruction.

pub mod bits;
pub mod file;
pub mod huffman;
pub mod marker;
pub mod pixels;
pub mod scan;

pub use file::{FrameHeader, JpegFile, ScanHeader, Segment};
pub use huffman::{code_string, CodeAssignment, HuffmanSpec, TableClass, AC_SYMBOL_COUNT, EOB, ZRL};
pub use pixels::{decode_pixels, PixelImage};
pub use scan::{
    decode_tokens, encode_tokens, entropy_decode, entropy_encode, scan_bit_length, size_category, AcToken, Block,
    BlockTokens, CoefficientImage, DcToken, ScanTokens, ZIGZAG,
};
