#![no_main]

use libfuzzer_sys::fuzz_target;
use ohg::document::Document;

// Validators must report, never panic, on any document that resolves.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(doc) = Document::from_json(text) {
        for (_, report) in doc.validate() {
            let _ = report.to_string();
        }
    }
    let _ = Document::parse(text);
});
