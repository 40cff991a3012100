#![no_main]
use libfuzzer_sys::fuzz_target;
use susy_spectra::darboux::{inverse_steps, steps_from_json};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(steps) = steps_from_json(text) else { return };
    let json = serde_json::to_string(&steps).unwrap();
    assert_eq!(steps_from_json(&json).unwrap(), steps);
    let _ = inverse_steps(&steps);
});
