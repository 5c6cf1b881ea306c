//! Seeded random vocabularies and corpora.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha12Rng;

use vocrel::corpus::{Corpus, PublicationRecord, QualifierIdx, TermAnnotation};
use vocrel::vocab::{Term, TermIdx, TreeNumber, VocabularyIndex};

/// Random vocabulary of up to `max_terms` terms (at least 2).
///
/// Each term extends an existing tree number or starts a fresh category, and
/// some terms take a second tree number, giving multi-parent diamonds. Since
/// a tree number is only ever extended after its owner exists, the derived
/// hierarchy is acyclic by construction.
pub fn random_vocabulary(rng: &mut ChaCha12Rng, max_terms: usize) -> VocabularyIndex {
    let n = rng.gen_range(2..=max_terms.max(2));
    let mut pool: Vec<TreeNumber> = Vec::new();
    let mut terms = Vec::with_capacity(n);
    let mut fresh = 0u32;
    for i in 0..n {
        let mut tns = Vec::new();
        let primary = new_tree_number(rng, &pool, &mut fresh);
        tns.push(primary);
        if !pool.is_empty() && rng.gen_bool(0.25) {
            tns.push(new_tree_number(rng, &pool, &mut fresh));
        }
        pool.extend(tns.iter().cloned());
        terms.push(Term::new(format!("M{i:03}"), format!("term {i}"), tns).unwrap());
    }
    VocabularyIndex::new(terms).expect("generated vocabulary is valid")
}

fn new_tree_number(rng: &mut ChaCha12Rng, pool: &[TreeNumber], fresh: &mut u32) -> TreeNumber {
    *fresh += 1;
    let text = if pool.is_empty() || rng.gen_bool(0.15) {
        format!("C{fresh}")
    } else {
        let base = pool.choose(rng).unwrap();
        format!("{base}.{fresh}")
    };
    TreeNumber::parse(&text).unwrap()
}

/// Random corpus over `vocab` with up to `max_docs` records (possibly zero).
/// Records carry 1..=8 distinct terms, random major flags, and qualifiers
/// from a fixed pool of four.
pub fn random_corpus(rng: &mut ChaCha12Rng, vocab: &VocabularyIndex, max_docs: usize) -> Corpus {
    let qualifiers: Vec<String> = ["qa", "qb", "qc", "qd"].iter().map(|s| s.to_string()).collect();
    let n = rng.gen_range(0..=max_docs);
    let mut records = Vec::with_capacity(n);
    for d in 0..n {
        records.push(random_record(rng, vocab, format!("doc{d:04}"), qualifiers.len()));
    }
    Corpus::new(records, qualifiers).expect("generated corpus is valid")
}

/// One random record with distinct terms drawn from `vocab`.
pub fn random_record(
    rng: &mut ChaCha12Rng,
    vocab: &VocabularyIndex,
    doc_id: String,
    qualifier_count: usize,
) -> PublicationRecord {
    let max_terms = vocab.len().min(8);
    let k = rng.gen_range(1..=max_terms);
    let mut all: Vec<u32> = (0..vocab.len() as u32).collect();
    all.shuffle(rng);
    let annotations = all[..k]
        .iter()
        .map(|&t| {
            let mut quals = Vec::new();
            for q in 0..qualifier_count as u32 {
                if rng.gen_bool(0.15) {
                    quals.push(QualifierIdx(q));
                }
            }
            TermAnnotation {
                term: TermIdx(t),
                major: rng.gen_bool(0.3),
                qualifiers: quals,
            }
        })
        .collect();
    PublicationRecord::new(doc_id, annotations).expect("generated record is valid")
}

/// A corpus with at least one record, for tests that need non-empty data.
pub fn random_nonempty_corpus(
    rng: &mut ChaCha12Rng,
    vocab: &VocabularyIndex,
    max_docs: usize,
) -> Corpus {
    loop {
        let corpus = random_corpus(rng, vocab, max_docs);
        if !corpus.is_empty() {
            return corpus;
        }
    }
}
