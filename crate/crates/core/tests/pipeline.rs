mod common;

use mdrdh::pipeline::{embed, extract, Mode};
use mdrdh::side_info::SideInfo;
use mdrdh::jpeg::JpegFile;
use mdrdh::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_bits(n: usize, seed: u64) -> Vec<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen()).collect()
}

fn round_trip(bytes: &[u8], bits: &[bool], mode: Mode) -> mdrdh::pipeline::EmbedReport {
    let (marked, report) = embed(bytes, bits, mode).unwrap_or_else(|e| panic!("{mode} {}: {e}", bits.len()));
    let (payload, restored) = extract(&marked).unwrap_or_else(|e| panic!("{mode} {}: {e}", bits.len()));
    assert_eq!(payload, bits, "{mode}");
    assert!(restored == bytes, "{mode}: restored file differs");
    report
}

#[test]
fn every_mode_round_trips_on_portrait() {
    let bytes = common::fixture(50, "portrait");
    for n in [0, 1, 2000, 5000] {
        let bits = random_bits(n, 7);
        for mode in [Mode::Multi, Mode::DctOnly, Mode::EntropyOnly] {
            round_trip(&bytes, &bits, mode);
        }
    }
    let r = round_trip(&bytes, &[], Mode::HuffoptOnly);
    assert_eq!((r.l1(), r.l2()), (0, 0));
}

#[test]
fn multi_splits_between_domains() {
    let bytes = common::fixture(50, "portrait");
    let bits = random_bits(5000, 1);
    let r = round_trip(&bytes, &bits, Mode::Multi);
    assert_eq!(r.l1() + r.l2(), 5000);
    let d = r.distribution.clone().unwrap();
    if let Some(sym) = d.peak {
        assert_eq!(r.peak_symbol, Some(sym));
    }
    eprintln!("portrait multi 5000: L1={} L2={} rounds={} judgment={:?}", r.l1(), r.l2(), r.refine_rounds, d.judgment);
}

#[test]
fn dct_only_keeps_entropy_budget_empty() {
    let bytes = common::fixture(70, "texture");
    let r = round_trip(&bytes, &random_bits(3000, 3), Mode::DctOnly);
    assert_eq!(r.l2(), 0);
}

#[test]
fn entropy_only_beyond_peak_is_capacity_error() {
    let bytes = common::fixture(50, "portrait");
    let err = embed(&bytes, &random_bits(200_000, 1), Mode::EntropyOnly).unwrap_err();
    assert!(matches!(err, Error::InsufficientTotalCapacity { .. }));
    assert_eq!(err.name(), "CapacityError");
}

#[test]
fn unmarked_file_is_rejected() {
    let bytes = common::fixture(50, "portrait");
    assert_eq!(extract(&bytes).unwrap_err(), Error::NotMarked);
}

#[test]
fn side_info_segment_precedes_scan() {
    let bytes = common::fixture(90, "camera");
    let (marked, report) = embed(&bytes, &random_bits(2000, 9), Mode::Multi).unwrap();
    let file = JpegFile::parse(&marked).unwrap();
    let before = file.segments_before_scan();
    assert!(SideInfo::is_side_info(before.last().unwrap()));
    assert_eq!(SideInfo::find(&file).unwrap(), report.side_info);
}
