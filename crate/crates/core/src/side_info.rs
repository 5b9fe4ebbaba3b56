//! Parameters the extractor needs, carried in an APP15 segment placed just
//! before the scan.
//!
//! Layout after the 6-byte identifier, all integers big-endian:
//! version (1), L1 (4), L2 (4), frequency bitmap (8), block count (4),
//! final zero run (1), payload length (4).

use crate::error::{Error, Result};
use crate::jpeg::marker::APP15;
use crate::jpeg::{JpegFile, Segment};

pub const IDENTIFIER: &[u8; 6] = b"MDRDH\0";
pub const VERSION: u8 = 1;
pub const RECORD_LEN: usize = 26;
/// Bytes the segment adds to a file: marker, length field, identifier and
/// record.
pub const SEGMENT_LEN: usize = 4 + IDENTIFIER.len() + RECORD_LEN;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SideInfo {
    pub l1: u32,
    pub l2: u32,
    /// Bit `k` set for each selected zigzag index `k` (bit 0 always clear).
    pub freq_bitmap: u64,
    pub n_bar: u32,
    pub run_bar: u8,
    pub payload_len: u32,
}

impl SideInfo {
    pub fn to_segment(&self) -> Segment {
        let mut p = Vec::with_capacity(IDENTIFIER.len() + RECORD_LEN);
        p.extend_from_slice(IDENTIFIER);
        p.push(VERSION);
        p.extend_from_slice(&self.l1.to_be_bytes());
        p.extend_from_slice(&self.l2.to_be_bytes());
        p.extend_from_slice(&self.freq_bitmap.to_be_bytes());
        p.extend_from_slice(&self.n_bar.to_be_bytes());
        p.push(self.run_bar);
        p.extend_from_slice(&self.payload_len.to_be_bytes());
        Segment::new(APP15, p)
    }

    pub fn is_side_info(seg: &Segment) -> bool {
        seg.marker == APP15 && seg.payload.starts_with(IDENTIFIER)
    }

    pub fn from_segment(seg: &Segment) -> Result<Self> {
        if !Self::is_side_info(seg) {
            return Err(Error::NotMarked);
        }
        let r = &seg.payload[IDENTIFIER.len()..];
        if r.len() != RECORD_LEN {
            return Err(Error::IntegrityFailure("side information record has the wrong size"));
        }
        if r[0] != VERSION {
            return Err(Error::IntegrityFailure("unknown side information version"));
        }
        let u32_at = |i: usize| u32::from_be_bytes(r[i..i + 4].try_into().unwrap());
        let info = SideInfo {
            l1: u32_at(1),
            l2: u32_at(5),
            freq_bitmap: u64::from_be_bytes(r[9..17].try_into().unwrap()),
            n_bar: u32_at(17),
            run_bar: r[21],
            payload_len: u32_at(22),
        };
        info.validate()?;
        Ok(info)
    }

    fn validate(&self) -> Result<()> {
        if self.l1 as u64 + self.l2 as u64 != self.payload_len as u64 {
            return Err(Error::IntegrityFailure("domain budgets do not sum to the payload length"));
        }
        if self.freq_bitmap & 1 != 0 {
            return Err(Error::IntegrityFailure("frequency set includes the DC coefficient"));
        }
        if self.l1 > 0 && (self.freq_bitmap == 0 || self.n_bar == 0) {
            return Err(Error::IntegrityFailure("coefficient payload without frequencies or blocks"));
        }
        Ok(())
    }

    /// Reads the side information of a marked file.
    pub fn find(file: &JpegFile) -> Result<Self> {
        let mut found = file.segments_before_scan().iter().filter(|s| Self::is_side_info(s));
        let seg = found.next().ok_or(Error::NotMarked)?;
        if found.next().is_some() {
            return Err(Error::IntegrityFailure("more than one side information segment"));
        }
        Self::from_segment(seg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_round_trip() {
        let info = SideInfo { l1: 1234, l2: 766, freq_bitmap: 0b1010_0110, n_bar: 4096, run_bar: 17, payload_len: 2000 };
        let seg = info.to_segment();
        assert_eq!(seg.payload.len(), IDENTIFIER.len() + RECORD_LEN);
        assert_eq!(seg.encoded_len(), SEGMENT_LEN);
        assert_eq!(SideInfo::from_segment(&seg).unwrap(), info);
    }

    #[test]
    fn inconsistent_budget_rejected() {
        let info = SideInfo { l1: 10, l2: 5, freq_bitmap: 2, n_bar: 1, run_bar: 0, payload_len: 16 };
        assert!(matches!(SideInfo::from_segment(&info.to_segment()), Err(Error::IntegrityFailure(_))));
    }

    #[test]
    fn foreign_app15_is_not_side_info() {
        let seg = Segment::new(APP15, b"OTHER\0".to_vec());
        assert_eq!(SideInfo::from_segment(&seg), Err(Error::NotMarked));
    }
}
