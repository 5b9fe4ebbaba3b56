mod common;

use mdrdh::jpeg::PixelImage;
use mdrdh::metrics::{psnr, EvalReport};
use mdrdh::pipeline::{embed, Mode};
use mdrdh::side_info::SEGMENT_LEN;

fn pgm(name: &str) -> PixelImage {
    let (w, h, samples) = common::read_pgm(&common::fixtures().join("reference").join(name));
    PixelImage::new(w, h, samples)
}

#[test]
fn psnr_agrees_with_reference_values() {
    let listing = std::fs::read_to_string(common::fixtures().join("reference/psnr.txt")).unwrap();
    let mut checked = 0;
    for line in listing.lines().filter(|l| !l.trim().is_empty()) {
        let f: Vec<&str> = line.split_whitespace().collect();
        let expected: f64 = f[2].parse().unwrap();
        let got = psnr(&pgm(f[0]), &pgm(f[1])).unwrap();
        assert!((got - expected).abs() < 0.01, "{line}: got {got}");
        checked += 1;
    }
    assert_eq!(checked, 2);
}

#[test]
fn side_info_accounting() {
    let bytes = common::fixture(50, "portrait");
    let (marked, _) = embed(&bytes, &[true; 300], Mode::EntropyOnly).unwrap();
    let r = EvalReport::evaluate(&bytes, &marked, 300, "50").unwrap();
    assert_eq!(r.expansion_bits - r.expansion_excl_sideinfo_bits, 8 * SEGMENT_LEN as i64);
    assert_eq!(r.psnr_db, f64::INFINITY);

    let (marked, _) = embed(&bytes, &[true; 300], Mode::DctOnly).unwrap();
    let r = EvalReport::evaluate(&bytes, &marked, 300, "50").unwrap();
    assert!(r.psnr_db.is_finite() && r.psnr_db > 40.0);
}
