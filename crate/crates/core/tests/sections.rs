mod common;

use acquis_core::tei::classify_sections;
use common::read_fixture;

struct Labeled {
    id: String,
    paragraphs: Vec<String>,
    signature: Option<u32>,
    annex: Option<u32>,
}

/// Reads the `=== celex lang` blocks; `S>` and `A>` prefixes mark the first
/// signature and annex paragraph, numbered from 2.
fn labeled_set() -> Vec<Labeled> {
    let mut docs: Vec<Labeled> = Vec::new();
    for line in read_fixture("sections/labeled.txt").lines() {
        if let Some(id) = line.strip_prefix("=== ") {
            docs.push(Labeled { id: id.to_owned(), paragraphs: Vec::new(), signature: None, annex: None });
            continue;
        }
        let Some(doc) = docs.last_mut() else { continue };
        if line.trim().is_empty() {
            continue;
        }
        let n = doc.paragraphs.len() as u32 + 2;
        let text = if let Some(t) = line.strip_prefix("S>") {
            doc.signature.get_or_insert(n);
            t
        } else if let Some(t) = line.strip_prefix("A>") {
            doc.annex.get_or_insert(n);
            t
        } else {
            line
        };
        doc.paragraphs.push(text.to_owned());
    }
    docs
}

#[test]
fn classifier_agrees_with_hand_labels() {
    let docs = labeled_set();
    assert_eq!(docs.len(), 50);
    let misses: Vec<String> = docs
        .iter()
        .filter_map(|d| {
            let got = classify_sections(&d.paragraphs);
            let want = (d.signature, d.annex);
            (want != (got.signature_start, got.annex_start))
                .then(|| format!("{}: want {want:?}, got {:?}", d.id, (got.signature_start, got.annex_start)))
        })
        .collect();
    let agreement = 1.0 - misses.len() as f64 / docs.len() as f64;
    println!("section agreement {agreement:.2}; misses: {misses:#?}");
    assert!(agreement >= 0.90, "agreement {agreement:.2}, misses {misses:#?}");
}

#[test]
fn every_language_with_markers_is_labeled() {
    let langs: std::collections::BTreeSet<String> =
        labeled_set().iter().map(|d| d.id.split_once(' ').unwrap().1.to_owned()).collect();
    assert!(langs.len() >= 20, "{langs:?}");
}
