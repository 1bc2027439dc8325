use std::io::Write;

use screenal::corpus::{build_vocabulary, load_corpus, read_corpus, GoldOracle, Label, VocabularyConfig};
use screenal::Error;

fn preds() -> Vec<String> {
    vec!["positive".into(), "about_kitchen".into()]
}

/// Review-style export: extra metadata column, quoted text with commas,
/// quotes and newlines, predicate columns after the text.
fn write_reviews(n: usize, n_in: [usize; 2]) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "id,stars,text,positive,about_kitchen").unwrap();
    for i in 0..n {
        // spread IN labels evenly instead of in a block
        let a = (i * n_in[0]) / n != ((i + 1) * n_in[0]) / n;
        let b = (i * n_in[1]) / n != ((i + 1) * n_in[1]) / n;
        writeln!(
            f,
            "r{i:05},{},\"Review {i}, says \"\"great\"\"\nsecond line\",{},{}",
            i % 5 + 1,
            a as u8,
            b as u8
        )
        .unwrap();
    }
    f.flush().unwrap();
    f
}

#[test]
fn review_export_loads_with_expected_selectivities() {
    let file = write_reviews(5000, [3050, 500]);
    let corpus = load_corpus(file.path(), &preds()).unwrap();
    assert_eq!(corpus.len(), 5000);
    assert!((corpus.selectivity(0) - 0.61).abs() < 1e-12);
    assert!((corpus.selectivity(1) - 0.10).abs() < 1e-12);
    let d = &corpus.documents()[42];
    assert_eq!(d.id, "r00042");
    assert_eq!(d.text, "Review 42, says \"great\"\nsecond line");

    // only the listed predicates are read, in the requested order
    let swapped = load_corpus(file.path(), &["about_kitchen".to_string(), "positive".to_string()]).unwrap();
    assert_eq!(swapped.selectivity(0), corpus.selectivity(1));
}

#[test]
fn write_then_read_round_trips() {
    let file = write_reviews(200, [80, 30]);
    let corpus = load_corpus(file.path(), &preds()).unwrap();
    let mut buf = Vec::new();
    corpus.write_csv(&mut buf).unwrap();
    let again = read_corpus(buf.as_slice(), &preds()).unwrap();
    assert_eq!(again.len(), corpus.len());
    for (a, b) in corpus.documents().iter().zip(again.documents()) {
        assert_eq!(a.id, b.id);
        assert_eq!(a.text, b.text);
    }
    for i in 0..corpus.len() {
        assert_eq!(corpus.gold_item(i), again.gold_item(i));
    }
    let cfg = VocabularyConfig::default();
    assert_eq!(
        build_vocabulary(&corpus, cfg).unwrap().len(),
        build_vocabulary(&again, cfg).unwrap().len()
    );
}

#[test]
fn malformed_rows_are_reported() {
    let bad = "id,text,positive,about_kitchen\na,hello,1,0\nb,world,yes,0\n";
    match read_corpus(bad.as_bytes(), &preds()) {
        Err(Error::BadLabel { row, column, value }) => {
            assert_eq!((row, column.as_str(), value.as_str()), (3, "positive", "yes"));
        }
        other => panic!("expected BadLabel, got {other:?}"),
    }
    let missing = "id,text,positive\na,hello,1\n";
    assert!(matches!(read_corpus(missing.as_bytes(), &preds()), Err(Error::MissingColumn(_))));
    let dup = "id,text,positive,about_kitchen\na,x,1,0\na,y,0,0\n";
    assert!(matches!(read_corpus(dup.as_bytes(), &preds()), Err(Error::DuplicateId(_))));
    assert!(matches!(load_corpus("/nonexistent/file.csv", &preds()), Err(Error::Io { .. })));
}

#[test]
fn labels_accept_words_and_digits() {
    let text = "id,text,positive,about_kitchen\na,x,IN,out\nb,y,0,1\n";
    let c = read_corpus(text.as_bytes(), &preds()).unwrap();
    assert_eq!(c.gold_item(0), Label::Out);
    assert_eq!(c.gold(0, 0), Label::In);
}
