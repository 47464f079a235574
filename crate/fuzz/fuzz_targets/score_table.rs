#![no_main]

use defect_tune::harness::{parse_score_table, score_table_csv};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    if let Ok(table) = parse_score_table(text) {
        let again = parse_score_table(&score_table_csv(&table).unwrap()).unwrap();
        assert_eq!(again.columns, table.columns);
        assert_eq!(again.rows.len(), table.rows.len());
    }
});
