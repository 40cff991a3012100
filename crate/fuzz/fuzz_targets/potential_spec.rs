#![no_main]
use libfuzzer_sys::fuzz_target;
use susy_spectra::potentials::{eval_potential, PotentialSpec};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(spec) = PotentialSpec::from_json(text) else { return };
    // Anything accepted must survive a round trip unchanged.
    let back = PotentialSpec::from_json(&spec.to_json()).expect("re-parse of canonical JSON");
    assert_eq!(back, spec);
    assert_eq!(back.digest(), spec.digest());
    if spec.is_catalog() {
        for x in [0.25, 1.0, 4.0] {
            let _ = eval_potential(&spec, x);
        }
    }
});
