// Marker codes (second byte after 0xFF), ITU T.81 Table B.1.

pub const SOF0: u8 = 0xC0;
pub const DHT: u8 = 0xC4;
pub const DAC: u8 = 0xCC;
pub const SOI: u8 = 0xD8;
pub const EOI: u8 = 0xD9;
pub const SOS: u8 = 0xDA;
pub const DQT: u8 = 0xDB;
pub const DRI: u8 = 0xDD;
pub const APP15: u8 = 0xEF;
pub const COM: u8 = 0xFE;

/// Any start-of-frame marker (SOF0..SOF15 minus DHT, JPG and DAC).
pub fn is_sof(m: u8) -> bool {
    (0xC0..=0xCF).contains(&m) && m != DHT && m != 0xC8 && m != DAC
}

pub fn is_arithmetic_sof(m: u8) -> bool {
    is_sof(m) && m >= 0xC9
}

pub fn is_rst(m: u8) -> bool {
    (0xD0..=0xD7).contains(&m)
}

/// Markers without a length field.
pub fn is_standalone(m: u8) -> bool {
    m == SOI || m == EOI || is_rst(m) || m == 0x01
}
