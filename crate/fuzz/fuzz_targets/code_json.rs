#![no_main]

use libfuzzer_sys::fuzz_target;
use polylrc::formats::{code_to_json, parse_code};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(code) = parse_code(text) {
        // round trip
        let again = parse_code(&code_to_json(&code)).expect("re-parse");
        assert_eq!(again.size(), code.size());
    }
});
