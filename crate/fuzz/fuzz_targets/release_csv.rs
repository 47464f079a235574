#![no_main]

use defect_tune::dataset::{parse_release, Schema};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(release) = parse_release(data, &Schema::default(), "fuzz", 0) {
        assert!(release.defective_count() <= release.len());
        assert_eq!(release.labels().len(), release.len());
    }
});
