#![no_main]

use defect_tune::learners::Model;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    if let Ok(model) = Model::from_json(text) {
        let again = Model::from_json(&model.to_json().unwrap()).unwrap();
        assert_eq!(again.features_used(), model.features_used());
    }
});
