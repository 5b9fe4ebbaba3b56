//! File-size change and pixel fidelity between an original and a marked file.

use std::fmt;

use crate::error::{Error, Result};
use crate::jpeg::{decode_pixels, entropy_decode, JpegFile, PixelImage};
use crate::side_info::SideInfo;

/// Size change in bits; negative when the marked file is smaller.
pub fn file_expansion(original: &[u8], marked: &[u8]) -> i64 {
    (marked.len() as i64 - original.len() as i64) * 8
}

/// Peak signal-to-noise ratio in dB; `f64::INFINITY` for identical images.
pub fn psnr(a: &PixelImage, b: &PixelImage) -> Result<f64> {
    if (a.width, a.height) != (b.width, b.height) {
        return Err(Error::DimensionMismatch(a.width, a.height, b.width, b.height));
    }
    let sse: u64 = a
        .samples
        .iter()
        .zip(&b.samples)
        .map(|(&x, &y)| {
            let d = x as i64 - y as i64;
            (d * d) as u64
        })
        .sum();
    if sse == 0 {
        return Ok(f64::INFINITY);
    }
    let mse = sse as f64 / a.samples.len() as f64;
    Ok(10.0 * (255.0f64 * 255.0 / mse).log10())
}

/// Renders a PSNR value, with `inf` for identical images.
pub fn format_psnr(db: f64) -> String {
    if db.is_infinite() {
        "inf".to_string()
    } else {
        format!("{db:.4}")
    }
}

pub fn decode_file_pixels(bytes: &[u8]) -> Result<PixelImage> {
    let file = JpegFile::parse(bytes)?;
    let (image, _) = entropy_decode(&file)?;
    Ok(decode_pixels(&image))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub expansion_bits: i64,
    pub expansion_excl_sideinfo_bits: i64,
    pub psnr_db: f64,
    pub payload_bits: usize,
    pub qf_label: String,
}

impl EvalReport {
    pub fn evaluate(original: &[u8], marked: &[u8], payload_bits: usize, qf_label: &str) -> Result<Self> {
        let expansion_bits = file_expansion(original, marked);
        let marked_file = JpegFile::parse(marked)?;
        let side_bytes: usize = marked_file
            .segments_before_scan()
            .iter()
            .filter(|s| SideInfo::is_side_info(s))
            .map(|s| s.encoded_len())
            .sum();
        let psnr_db = psnr(&decode_file_pixels(original)?, &decode_file_pixels(marked)?)?;
        Ok(EvalReport {
            expansion_bits,
            expansion_excl_sideinfo_bits: expansion_bits - 8 * side_bytes as i64,
            psnr_db,
            payload_bits,
            qf_label: qf_label.to_string(),
        })
    }
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "qf={} payload={} expansion={} expansion_excl_side_info={} psnr={}",
            self.qf_label,
            self.payload_bits,
            self.expansion_bits,
            self.expansion_excl_sideinfo_bits,
            format_psnr(self.psnr_db)
        )
    }
}
