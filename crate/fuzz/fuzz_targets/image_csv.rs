#![no_main]

use libfuzzer_sys::fuzz_target;
use phaseless_core::migrate::parse_image_csv;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = parse_image_csv(text);
    }
});
