//! Marker-level JPEG structure: parse into segments, serialize bit-exactly.

use crate::error::{Error, Result};

use super::huffman::{HuffmanSpec, TableClass};
use super::marker;

/// One marker segment. `payload` excludes the marker and the length field;
/// SOI and EOI have no payload and no length field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub marker: u8,
    pub payload: Vec<u8>,
}

impl Segment {
    pub fn new(marker: u8, payload: Vec<u8>) -> Self {
        Segment { marker, payload }
    }

    fn has_length(&self) -> bool {
        !marker::is_standalone(self.marker)
    }

    /// Encoded size in bytes, including marker and length field.
    pub fn encoded_len(&self) -> usize {
        if self.has_length() {
            4 + self.payload.len()
        } else {
            2
        }
    }
}

/// Frame parameters from SOF0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameHeader {
    pub width: u16,
    pub height: u16,
    pub component_id: u8,
    pub quant_table_id: u8,
}

/// Table selectors from SOS.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScanHeader {
    pub component_id: u8,
    pub dc_table: u8,
    pub ac_table: u8,
}

/// A parsed baseline grayscale JPEG file.
///
/// Segments are kept in file order with their original payload bytes, and
/// the entropy-coded data following SOS is kept with its byte stuffing, so
/// [`JpegFile::serialize`] reproduces the input exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JpegFile {
    pub segments: Vec<Segment>,
    /// Index of the SOS segment in `segments`.
    sos_index: usize,
    /// Entropy-coded segment, byte-stuffed, as it appears after SOS.
    pub scan: Vec<u8>,
    /// Bytes after EOI, preserved verbatim.
    pub trailer: Vec<u8>,
}

fn be16(b: &[u8], at: usize) -> u16 {
    u16::from_be_bytes([b[at], b[at + 1]])
}

impl JpegFile {
    pub fn parse(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 2 {
            return Err(Error::TruncatedStream("missing SOI"));
        }
        if bytes[0] != 0xFF || bytes[1] != marker::SOI {
            return Err(Error::InvalidMarker("file does not start with SOI".into()));
        }
        let mut segments = vec![Segment::new(marker::SOI, Vec::new())];
        let mut pos = 2;
        let mut sos_index = None;
        let mut scan = Vec::new();
        let mut sof_seen = false;

        loop {
            if pos + 2 > bytes.len() {
                return Err(Error::TruncatedStream("missing EOI"));
            }
            if bytes[pos] != 0xFF {
                return Err(Error::InvalidMarker(format!("expected marker at offset {pos}")));
            }
            let m = bytes[pos + 1];
            pos += 2;
            if m == marker::EOI {
                segments.push(Segment::new(m, Vec::new()));
                break;
            }
            if m == 0xFF || m == 0x00 || marker::is_standalone(m) {
                return Err(Error::InvalidMarker(format!("0xFF{m:02X} at offset {}", pos - 2)));
            }
            if pos + 2 > bytes.len() {
                return Err(Error::TruncatedStream("segment length"));
            }
            let len = be16(bytes, pos) as usize;
            if len < 2 {
                return Err(Error::InvalidMarker(format!("segment 0xFF{m:02X} length {len}")));
            }
            if pos + len > bytes.len() {
                return Err(Error::TruncatedStream("segment payload"));
            }
            let payload = bytes[pos + 2..pos + len].to_vec();
            pos += len;

            match m {
                marker::SOF0 => {
                    if sof_seen {
                        return Err(Error::InvalidMarker("second SOF segment".into()));
                    }
                    sof_seen = true;
                    check_sof0(&payload)?;
                }
                marker::DAC => return Err(Error::ArithmeticCoding),
                m if marker::is_sof(m) => {
                    return Err(if marker::is_arithmetic_sof(m) {
                        Error::ArithmeticCoding
                    } else {
                        Error::NotBaseline(m)
                    })
                }
                marker::DRI => {
                    if payload.len() < 2 {
                        return Err(Error::TruncatedStream("DRI payload"));
                    }
                    if be16(&payload, 0) != 0 {
                        return Err(Error::RestartIntervalsPresent);
                    }
                }
                marker::SOS => {
                    if sos_index.is_some() {
                        return Err(Error::InvalidMarker("more than one scan".into()));
                    }
                    if !sof_seen {
                        return Err(Error::InvalidMarker("SOS before SOF".into()));
                    }
                    check_sos(&payload)?;
                    sos_index = Some(segments.len());
                    segments.push(Segment::new(m, payload));
                    let end = scan_end(bytes, pos)?;
                    scan = bytes[pos..end].to_vec();
                    pos = end;
                    continue;
                }
                _ => {}
            }
            segments.push(Segment::new(m, payload));
        }

        let sos_index = sos_index.ok_or(Error::InvalidMarker("no SOS segment".into()))?;
        Ok(JpegFile {
            segments,
            sos_index,
            scan,
            trailer: bytes[pos..].to_vec(),
        })
    }

    pub fn serialize(&self) -> Vec<u8> {
        let size = self.segments.iter().map(Segment::encoded_len).sum::<usize>()
            + self.scan.len()
            + self.trailer.len();
        let mut out = Vec::with_capacity(size);
        for (i, seg) in self.segments.iter().enumerate() {
            out.push(0xFF);
            out.push(seg.marker);
            if seg.has_length() {
                out.extend_from_slice(&((seg.payload.len() + 2) as u16).to_be_bytes());
                out.extend_from_slice(&seg.payload);
            }
            if i == self.sos_index {
                out.extend_from_slice(&self.scan);
            }
        }
        out.extend_from_slice(&self.trailer);
        out
    }

    pub fn frame(&self) -> FrameHeader {
        let p = &self
            .segments
            .iter()
            .find(|s| s.marker == marker::SOF0)
            .expect("parse guarantees SOF0")
            .payload;
        FrameHeader {
            height: be16(p, 1),
            width: be16(p, 3),
            component_id: p[6],
            quant_table_id: p[8] & 0x0F,
        }
    }

    pub fn scan_header(&self) -> ScanHeader {
        let p = &self.segments[self.sos_index].payload;
        ScanHeader {
            component_id: p[1],
            dc_table: p[2] >> 4,
            ac_table: p[2] & 0x0F,
        }
    }

    /// Quantization table (zigzag order) in effect for the scan.
    pub fn quant_table(&self) -> Result<[u16; 64]> {
        let want = self.frame().quant_table_id;
        let mut found = None;
        for seg in self.segments[..self.sos_index].iter().filter(|s| s.marker == marker::DQT) {
            let p = &seg.payload;
            let mut at = 0;
            while at < p.len() {
                let precision = p[at] >> 4;
                let id = p[at] & 0x0F;
                let size = if precision == 0 { 64 } else { 128 };
                if at + 1 + size > p.len() {
                    return Err(Error::TruncatedStream("DQT table"));
                }
                if id == want {
                    let mut q = [0u16; 64];
                    for (i, v) in q.iter_mut().enumerate() {
                        *v = if precision == 0 {
                            p[at + 1 + i] as u16
                        } else {
                            be16(p, at + 1 + 2 * i)
                        };
                    }
                    found = Some(q);
                }
                at += 1 + size;
            }
        }
        found.ok_or(Error::MissingTable("quantization table"))
    }

    /// Locates the last definition of a Huffman table before the scan:
    /// (segment index, byte offset of the table body within the payload).
    fn locate_table(&self, class: TableClass, id: u8) -> Result<Option<(usize, usize)>> {
        let mut found = None;
        for (si, seg) in self.segments[..self.sos_index].iter().enumerate() {
            if seg.marker != marker::DHT {
                continue;
            }
            let mut at = 0;
            while at < seg.payload.len() {
                let (spec, used) = HuffmanSpec::read_from(&seg.payload[at..])?;
                if spec.class == class && spec.id == id {
                    found = Some((si, at));
                }
                at += used;
            }
        }
        Ok(found)
    }

    pub fn huffman_spec(&self, class: TableClass, id: u8) -> Result<HuffmanSpec> {
        let (si, at) = self.locate_table(class, id)?.ok_or(Error::MissingTable(match class {
            TableClass::Dc => "DC Huffman table",
            TableClass::Ac => "AC Huffman table",
        }))?;
        Ok(HuffmanSpec::read_from(&self.segments[si].payload[at..])?.0)
    }

    /// DC and AC table specifications selected by the scan header.
    pub fn scan_tables(&self) -> Result<(HuffmanSpec, HuffmanSpec)> {
        let sh = self.scan_header();
        Ok((
            self.huffman_spec(TableClass::Dc, sh.dc_table)?,
            self.huffman_spec(TableClass::Ac, sh.ac_table)?,
        ))
    }

    /// Rewrites the table definition with the same class and id in place.
    /// The DHT segment length changes only if the symbol count does.
    pub fn replace_huffman_spec(&mut self, spec: &HuffmanSpec) -> Result<()> {
        let (si, at) = self.locate_table(spec.class, spec.id)?.ok_or(Error::MissingTable(
            "Huffman table to replace",
        ))?;
        let payload = &mut self.segments[si].payload;
        let (_, old_len) = HuffmanSpec::read_from(&payload[at..])?;
        let mut body = Vec::with_capacity(spec.encoded_len());
        spec.write_to(&mut body);
        payload.splice(at..at + old_len, body);
        Ok(())
    }

    /// Inserts a segment immediately before SOS.
    pub fn insert_before_scan(&mut self, seg: Segment) {
        self.segments.insert(self.sos_index, seg);
        self.sos_index += 1;
    }

    /// Removes and returns every segment matching `pred` that precedes SOS.
    pub fn remove_segments<F: Fn(&Segment) -> bool>(&mut self, pred: F) -> Vec<Segment> {
        let mut removed = Vec::new();
        let mut i = 0;
        while i < self.sos_index {
            if pred(&self.segments[i]) {
                removed.push(self.segments.remove(i));
                self.sos_index -= 1;
            } else {
                i += 1;
            }
        }
        removed
    }

    pub fn segments_before_scan(&self) -> &[Segment] {
        &self.segments[..self.sos_index]
    }
}

fn check_sof0(p: &[u8]) -> Result<()> {
    if p.len() < 6 {
        return Err(Error::TruncatedStream("SOF0 payload"));
    }
    if p[0] != 8 {
        return Err(Error::NotBaseline(marker::SOF0));
    }
    let nc = p[5];
    if nc != 1 {
        return Err(Error::NotGrayscale(nc));
    }
    if p.len() < 6 + 3 {
        return Err(Error::TruncatedStream("SOF0 component"));
    }
    if be16(p, 1) == 0 || be16(p, 3) == 0 {
        return Err(Error::InvalidMarker("zero frame dimension".into()));
    }
    Ok(())
}

fn check_sos(p: &[u8]) -> Result<()> {
    if p.is_empty() {
        return Err(Error::TruncatedStream("SOS payload"));
    }
    let ns = p[0];
    if ns != 1 {
        return Err(Error::NotGrayscale(ns));
    }
    if p.len() < 6 {
        return Err(Error::TruncatedStream("SOS payload"));
    }
    let (ss, se, ahal) = (p[3], p[4], p[5]);
    if ss != 0 || se != 63 || ahal != 0 {
        return Err(Error::NotBaseline(marker::SOS));
    }
    Ok(())
}

/// Offset of the marker terminating the entropy-coded segment at `start`.
fn scan_end(bytes: &[u8], start: usize) -> Result<usize> {
    let mut i = start;
    while i + 1 < bytes.len() {
        if bytes[i] == 0xFF {
            let next = bytes[i + 1];
            if next == 0x00 {
                i += 2;
                continue;
            }
            if marker::is_rst(next) {
                return Err(Error::RestartIntervalsPresent);
            }
            if next == 0xFF {
                return Err(Error::InvalidMarker("fill bytes after scan".into()));
            }
            return Ok(i);
        }
        i += 1;
    }
    Err(Error::TruncatedStream("entropy-coded segment"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal(sof: u8, components: u8) -> Vec<u8> {
        let mut b = vec![0xFF, 0xD8];
        b.extend_from_slice(&[0xFF, sof, 0x00, 8 + 3 * components, 8, 0, 8, 0, 8, components]);
        for c in 0..components {
            b.extend_from_slice(&[c + 1, 0x11, 0]);
        }
        b.extend_from_slice(&[0xFF, 0xDA, 0, 8, 1, 1, 0, 0, 63, 0]);
        b.extend_from_slice(&[0x12, 0x34]);
        b.extend_from_slice(&[0xFF, 0xD9]);
        b
    }

    #[test]
    fn parses_minimal_and_round_trips() {
        let b = minimal(marker::SOF0, 1);
        let f = JpegFile::parse(&b).unwrap();
        assert_eq!(f.segments.first().unwrap().marker, marker::SOI);
        assert_eq!(f.segments.last().unwrap().marker, marker::EOI);
        assert_eq!(f.scan, vec![0x12, 0x34]);
        assert_eq!(f.serialize(), b);
        assert_eq!(f.frame().width, 8);
    }

    #[test]
    fn progressive_rejected() {
        assert_eq!(JpegFile::parse(&minimal(0xC2, 1)).unwrap_err(), Error::NotBaseline(0xC2));
    }

    #[test]
    fn arithmetic_rejected() {
        assert_eq!(JpegFile::parse(&minimal(0xC9, 1)).unwrap_err(), Error::ArithmeticCoding);
    }

    #[test]
    fn color_rejected() {
        assert_eq!(JpegFile::parse(&minimal(marker::SOF0, 3)).unwrap_err(), Error::NotGrayscale(3));
    }

    #[test]
    fn restart_interval_rejected() {
        let mut b = minimal(marker::SOF0, 1);
        b.splice(2..2, [0xFF, 0xDD, 0, 4, 0, 8]);
        assert_eq!(JpegFile::parse(&b).unwrap_err(), Error::RestartIntervalsPresent);
        let mut b = minimal(marker::SOF0, 1);
        b.splice(2..2, [0xFF, 0xDD, 0, 4, 0, 0]);
        assert!(JpegFile::parse(&b).is_ok());
    }

    #[test]
    fn truncation_detected() {
        let b = minimal(marker::SOF0, 1);
        for cut in [1, 5, b.len() - 2, b.len() - 1] {
            let e = JpegFile::parse(&b[..cut]).unwrap_err();
            assert!(matches!(e, Error::TruncatedStream(_)), "cut {cut}: {e:?}");
        }
    }

    #[test]
    fn stuffed_ff_stays_in_scan() {
        let mut b = minimal(marker::SOF0, 1);
        let at = b.len() - 4;
        b.splice(at..at + 2, [0xFF, 0x00, 0x7F]);
        let f = JpegFile::parse(&b).unwrap();
        assert_eq!(f.scan, vec![0xFF, 0x00, 0x7F]);
        assert_eq!(f.serialize(), b);
    }
}
