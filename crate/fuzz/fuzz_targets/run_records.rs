#![no_main]

use defect_tune::harness::{parse_records, records_to_jsonl};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    if let Ok(records) = parse_records(text) {
        let text = records_to_jsonl(&records).unwrap();
        assert_eq!(parse_records(&text).unwrap().len(), records.len());
    }
});
