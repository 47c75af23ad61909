#![no_main]

use libfuzzer_sys::fuzz_target;
use phaseless_core::scene::{emit_scene, parse_scene};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(scene) = parse_scene(text) {
        // Whatever parses must survive a round trip unchanged.
        let again = parse_scene(&emit_scene(&scene)).expect("emitted scene reparses");
        assert_eq!(scene.hash(), again.hash());
    }
});
