#![no_main]
use libfuzzer_sys::fuzz_target;
use susy_spectra::parse::parse_rect;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(r) = parse_rect(text) {
        assert!(r.re0 < r.re1 && r.im0 < r.im1);
        assert!(r.contains(r.center()));
    }
});
