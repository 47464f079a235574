#![no_main]

use defect_tune::dataset::parse_manifest;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    for entry in parse_manifest(text) {
        assert!(!entry.is_empty());
        assert!(!entry.starts_with('#'));
    }
});
