//! Reference floating-point decoding of coefficients to 8-bit samples.

use std::f64::consts::PI;
use std::sync::OnceLock;

use super::scan::{Block, CoefficientImage, ZIGZAG};

/// 8-bit grayscale raster, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PixelImage {
    pub width: usize,
    pub height: usize,
    pub samples: Vec<u8>,
}

impl PixelImage {
    pub fn new(width: usize, height: usize, samples: Vec<u8>) -> Self {
        assert_eq!(samples.len(), width * height);
        PixelImage { width, height, samples }
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.samples[y * self.width + x]
    }
}

// basis[x][u] = C(u)/2 * cos((2x+1)u pi / 16)
fn basis() -> &'static [[f64; 8]; 8] {
    static BASIS: OnceLock<[[f64; 8]; 8]> = OnceLock::new();
    BASIS.get_or_init(|| {
        let mut t = [[0.0; 8]; 8];
        for (x, row) in t.iter_mut().enumerate() {
            for (u, v) in row.iter_mut().enumerate() {
                let c = if u == 0 { std::f64::consts::FRAC_1_SQRT_2 } else { 1.0 };
                *v = 0.5 * c * ((2 * x + 1) as f64 * u as f64 * PI / 16.0).cos();
            }
        }
        t
    })
}

/// Dequantizes and inverse-transforms one zigzag-ordered block.
pub fn idct_block(block: &Block, quant: &[u16; 64]) -> [u8; 64] {
    if block[1..].iter().all(|&c| c == 0) {
        let dc = block[0] as f64 * quant[0] as f64 / 8.0;
        return [(dc + 128.0).round().clamp(0.0, 255.0) as u8; 64];
    }
    let mut f = [0.0f64; 64];
    for i in 0..64 {
        f[ZIGZAG[i]] = block[i] as f64 * quant[i] as f64;
    }
    let b = basis();
    // rows of f are v (vertical frequency), columns u
    let mut tmp = [0.0f64; 64];
    for v in 0..8 {
        for x in 0..8 {
            let mut s = 0.0;
            for u in 0..8 {
                s += b[x][u] * f[v * 8 + u];
            }
            tmp[v * 8 + x] = s;
        }
    }
    let mut out = [0u8; 64];
    for y in 0..8 {
        for x in 0..8 {
            let mut s = 0.0;
            for v in 0..8 {
                s += b[y][v] * tmp[v * 8 + x];
            }
            out[y * 8 + x] = (s + 128.0).round().clamp(0.0, 255.0) as u8;
        }
    }
    out
}

pub fn decode_pixels(image: &CoefficientImage) -> PixelImage {
    let (w, h) = (image.width, image.height);
    let bw = image.blocks_wide();
    let mut samples = vec![0u8; w * h];
    for (i, block) in image.blocks.iter().enumerate() {
        let (bx, by) = (i % bw, i / bw);
        let px = idct_block(block, &image.quant);
        for y in 0..8 {
            let yy = by * 8 + y;
            if yy >= h {
                break;
            }
            for x in 0..8 {
                let xx = bx * 8 + x;
                if xx < w {
                    samples[yy * w + xx] = px[y * 8 + x];
                }
            }
        }
    }
    PixelImage { width: w, height: h, samples }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_block_is_mid_gray() {
        assert_eq!(idct_block(&[0; 64], &[1; 64]), [128; 64]);
    }

    #[test]
    fn pure_dc_is_uniform() {
        let mut b = [0i16; 64];
        b[0] = 2;
        let mut q = [1u16; 64];
        q[0] = 4;
        assert_eq!(idct_block(&b, &q), [129; 64]);
    }

    #[test]
    fn output_clamped() {
        let mut b = [0i16; 64];
        b[0] = 2047;
        assert_eq!(idct_block(&b, &[8; 64]), [255; 64]);
        b[0] = -2047;
        assert_eq!(idct_block(&b, &[8; 64]), [0; 64]);
    }

    #[test]
    fn zigzag_is_permutation() {
        let mut seen = [false; 64];
        for &n in ZIGZAG.iter() {
            assert!(!seen[n]);
            seen[n] = true;
        }
        assert_eq!(ZIGZAG[2], 8);
    }
}
