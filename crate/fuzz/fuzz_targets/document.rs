#![no_main]

use libfuzzer_sys::fuzz_target;
use ohg::document::Document;

// Anything that resolves must print and re-read to the same document.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(doc) = Document::from_json(text) {
        let out = doc.to_json();
        let back = Document::from_json(&out).expect("printed documents parse");
        assert_eq!(back, doc);
        assert_eq!(back.to_json(), out);
    }
});
