mod common;

use std::collections::BTreeMap;
use std::path::PathBuf;

use ohg::document::{gallery_document, Document, DocumentError, FORMAT_VERSION};
use ohg::gallery::{Structure, GALLERY_NAMES};
use ohg::gen::{self, GenConfig};
use ohg::hypergraph::Registry;
use ohg::shell::{Polarity, ShellKind};
use proptest::prelude::*;

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{name}.ohg.json"))
}

/// Set `OHG_BLESS=1` to rewrite the golden files from the current gallery.
#[test]
fn gallery_matches_golden_files() {
    let bless = std::env::var_os("OHG_BLESS").is_some();
    for &name in GALLERY_NAMES {
        let text = gallery_document(name).unwrap().to_json();
        let path = golden(name);
        if bless {
            std::fs::create_dir_all(path.parent().unwrap()).unwrap();
            std::fs::write(&path, &text).unwrap();
        }
        let want = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert!(text == want, "{name}: output differs from {}", path.display());
    }
}

#[test]
fn golden_files_round_trip_byte_for_byte() {
    for &name in GALLERY_NAMES {
        let text = std::fs::read_to_string(golden(name)).unwrap();
        let doc = Document::parse(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(doc, gallery_document(name).unwrap(), "{name}");
        assert!(doc.to_json() == text, "{name}: re-serialized text differs");
    }
}

#[test]
fn save_and_load() {
    let dir = std::env::temp_dir().join(format!("ohg-doc-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("globe2.ohg.json");
    let doc = gallery_document("globe2").unwrap();
    doc.save(&path).unwrap();
    assert_eq!(Document::load(&path).unwrap(), doc);
    std::fs::remove_dir_all(&dir).unwrap();
}

fn globe0_text() -> String {
    gallery_document("globe0").unwrap().to_json()
}

#[test]
fn syntax_errors_carry_a_position() {
    let err = Document::from_json("{\n  \"name\": \"x\",\n  oops\n}").unwrap_err();
    let DocumentError::Parse { line, message, .. } = &err else { panic!("{err}") };
    assert_eq!(*line, 3);
    assert!(!message.contains(" at line"), "{message}");
}

#[test]
fn unknown_fields_are_rejected() {
    let text = globe0_text().replacen("\"name\"", "\"colour\": 1,\n  \"name\"", 1);
    assert!(matches!(Document::from_json(&text), Err(DocumentError::Parse { .. })));
}

#[test]
fn other_versions_are_rejected() {
    let text = globe0_text().replacen(&format!("\"format_version\": {FORMAT_VERSION}"), "\"format_version\": 9", 1);
    assert!(matches!(Document::from_json(&text), Err(DocumentError::Version(9))));
}

#[test]
fn dangling_references_are_named() {
    let text = globe0_text().replacen("\"conjugate\": 1", "\"conjugate\": 7", 1);
    let err = Document::from_json(&text).unwrap_err();
    assert!(matches!(err, DocumentError::Reference { .. }), "{err}");
    assert!(err.to_string().contains("c7"), "{err}");
}

#[test]
fn invalid_structures_fail_parse_but_not_from_json() {
    let text = gallery_document("globe1").unwrap().to_json();
    let start = text.find("\"structures\"").unwrap();
    let (head, tail) = text.split_at(start);
    let bad = format!("{head}{}", tail.replacen("\"-\"", "\"+\"", 1));
    assert!(Document::from_json(&bad).is_ok());
    let err = Document::parse(&bad).unwrap_err();
    let DocumentError::Invalid { path, report } = &err else { panic!("{err}") };
    assert!(path.starts_with("structure"), "{path}");
    assert!(!report.is_ok());
}

#[test]
fn witness_tables_survive_the_trip() {
    let doc = gallery_document("globe2-weak").unwrap();
    let back = Document::parse(&doc.to_json()).unwrap();
    assert_eq!(back.witnesses, doc.witnesses);
    assert!(back.witnesses.unwrap().weak_n.is_some());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn generated_documents_round_trip(seed in any::<u64>(), n in 0usize..4) {
        let mut rng = gen::rng(seed);
        let mut reg = Registry::new();
        let z = gen::frame(&mut rng, &mut reg, n, &GenConfig::default(), "c");
        let xi = gen::pasting_shell(&mut rng, n, Polarity::Neg, &GenConfig::default());
        let structures = BTreeMap::from([
            ("frame".to_string(), Structure::Diagram { kind: ShellKind::Frame, diagram: z }),
            ("shell".to_string(), Structure::Shell { kind: ShellKind::Pasting, shell: xi }),
        ]);
        let doc = Document { name: format!("gen{seed}"), registry: reg, structures, witnesses: None };
        let text = doc.to_json();
        let back = Document::parse(&text).unwrap();
        prop_assert_eq!(&back, &doc);
        prop_assert_eq!(back.to_json(), text);
    }
}
