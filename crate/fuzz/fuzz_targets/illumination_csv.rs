#![no_main]

use libfuzzer_sys::fuzz_target;
use phaseless_core::io::{parse_illumination_csv, parse_intensity_data};

// Input is `intensity \0 illumination`; a lone illumination file is tried too.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    match text.split_once('\0') {
        Some((intensity, illumination)) => {
            let _ = parse_intensity_data(intensity, illumination);
        }
        None => {
            if let Ok((_, omegas, values)) = parse_illumination_csv(text) {
                assert_eq!(omegas.len(), values.len());
            }
        }
    }
});
