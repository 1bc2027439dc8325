//! Builds a TF-IDF vocabulary over a toy corpus and prints each document's
//! L2-normalized sparse vector.

use screenal::corpus::{build_vocabulary, tokenize, vectorize};
use screenal::{Corpus, Document, Label, VocabularyConfig};

fn main() -> screenal::Result<()> {
    let texts = [
        "The blender is loud but crushes ice well",
        "Great blender, quiet motor",
        "Battery died after a week",
        "Quiet fan, great battery life",
    ];
    let docs = texts
        .iter()
        .enumerate()
        .map(|(i, t)| Document::new(format!("r{i}"), *t, vec![Label::In]))
        .collect();
    let corpus = Corpus::new(docs, vec!["relevant".into()])?;

    let vocab = build_vocabulary(
        &corpus,
        VocabularyConfig {
            min_df: 1,
            ..Default::default()
        },
    )?;
    println!("{} terms", vocab.len());
    for doc in corpus.documents() {
        println!("{}: {:?}", doc.id, tokenize(&doc.text));
        for &(j, w) in vectorize(doc, &vocab).entries() {
            println!("    {:<8} idf={:.3} w={:.4}", vocab.term(j), vocab.idf(vocab.term(j)).unwrap(), w);
        }
    }
    Ok(())
}
