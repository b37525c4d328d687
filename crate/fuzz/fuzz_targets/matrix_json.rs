#![no_main]

use libfuzzer_sys::fuzz_target;
use polylrc::formats::{matrix_to_json, parse_matrix};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(m) = parse_matrix(text) {
        let again = parse_matrix(&matrix_to_json(&m)).expect("re-parse");
        assert_eq!(again.to_rows(), m.to_rows());
    }
});
