#![no_main]

use libfuzzer_sys::fuzz_target;
use phaseless_core::io::{parse_recovered_csv, recovered_csv};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok((omegas, fields)) = parse_recovered_csv(text) {
        let again = parse_recovered_csv(&recovered_csv(&omegas, &fields)).expect("emitted fields reparse");
        assert_eq!(again.0.len(), omegas.len());
    }
});
