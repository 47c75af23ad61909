#![no_main]

use libfuzzer_sys::fuzz_target;
use phaseless_core::io::parse_intensity_csv;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok((omegas, rows)) = parse_intensity_csv(text) {
            assert_eq!(omegas.len(), rows.len());
        }
    }
});
