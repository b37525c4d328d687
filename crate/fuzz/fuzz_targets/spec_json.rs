#![no_main]

use libfuzzer_sys::fuzz_target;
use polylrc::construction::build_matroid;
use polylrc::formats::parse_spec;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(spec) = parse_spec(text) {
        // invalid specs must come back as errors, never panics
        let _ = build_matroid(&spec);
    }
});
