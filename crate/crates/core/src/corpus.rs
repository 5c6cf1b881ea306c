//! Publication records: per-document term annotations with major flags and
//! qualifiers.

use std::collections::{HashMap, HashSet};
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vocab::{TermIdx, VocabularyIndex, ILLEGAL_ID_CHARS};

/// Qualifier handle inside one [`Corpus`]; indices follow the lexicographic
/// order of qualifier strings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QualifierIdx(pub u32);

impl QualifierIdx {
    #[inline]
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

/// One term attached to a publication.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermAnnotation {
    pub term: TermIdx,
    pub major: bool,
    /// Sorted, deduplicated; possibly empty.
    pub qualifiers: Vec<QualifierIdx>,
}

/// A publication and its term annotations, at most one per term, never empty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PublicationRecord {
    pub doc_id: String,
    /// Sorted by term index.
    annotations: Vec<TermAnnotation>,
}

impl PublicationRecord {
    pub fn new(doc_id: impl Into<String>, mut annotations: Vec<TermAnnotation>) -> Result<Self> {
        let doc_id = doc_id.into();
        if annotations.is_empty() {
            return Err(Error::EmptyRecord { doc_id });
        }
        annotations.sort_by_key(|a| a.term);
        if annotations.windows(2).any(|p| p[0].term == p[1].term) {
            return Err(Error::DuplicateAnnotation { doc_id });
        }
        for ann in &mut annotations {
            ann.qualifiers.sort();
            ann.qualifiers.dedup();
        }
        Ok(Self { doc_id, annotations })
    }

    pub fn annotations(&self) -> &[TermAnnotation] {
        &self.annotations
    }

    /// Sorted term indices of all annotations.
    pub fn term_set(&self) -> Vec<TermIdx> {
        self.annotations.iter().map(|a| a.term).collect()
    }

    /// Sorted term indices of the major annotations only.
    pub fn major_term_set(&self) -> Vec<TermIdx> {
        self.annotations
            .iter()
            .filter(|a| a.major)
            .map(|a| a.term)
            .collect()
    }
}

/// Dense handle for a record inside one [`Corpus`], in file order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DocIdx(pub u32);

impl DocIdx {
    #[inline]
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

/// An indexed publication set plus the qualifier universe it mentions.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    records: Vec<PublicationRecord>,
    by_doc_id: HashMap<String, DocIdx>,
    qualifiers: Vec<String>,
}

impl Corpus {
    pub fn new(records: Vec<PublicationRecord>, qualifiers: Vec<String>) -> Result<Self> {
        let mut by_doc_id = HashMap::with_capacity(records.len());
        for (i, rec) in records.iter().enumerate() {
            if by_doc_id.insert(rec.doc_id.clone(), DocIdx(i as u32)).is_some() {
                return Err(Error::DuplicateDocId {
                    doc_id: rec.doc_id.clone(),
                });
            }
        }
        Ok(Self {
            records,
            by_doc_id,
            qualifiers,
        })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[PublicationRecord] {
        &self.records
    }

    pub fn record(&self, idx: DocIdx) -> &PublicationRecord {
        &self.records[idx.idx()]
    }

    pub fn resolve(&self, doc_id: &str) -> Option<DocIdx> {
        self.by_doc_id.get(doc_id).copied()
    }

    pub fn require(&self, doc_id: &str) -> Result<DocIdx> {
        self.resolve(doc_id).ok_or_else(|| Error::UnknownDocument {
            doc_id: doc_id.to_owned(),
        })
    }

    /// Sorted qualifier universe observed at ingestion.
    pub fn qualifiers(&self) -> &[String] {
        &self.qualifiers
    }

    pub fn qualifier(&self, idx: QualifierIdx) -> &str {
        &self.qualifiers[idx.idx()]
    }

    /// Canonical text form; see [`parse_corpus`] for the grammar. Entries and
    /// qualifiers are written sorted, so re-parsing yields an equal corpus.
    pub fn to_tsv(&self, vocab: &VocabularyIndex) -> String {
        let mut out = String::new();
        for rec in &self.records {
            out.push_str(&rec.doc_id);
            out.push('\t');
            let entries: Vec<String> = rec
                .annotations
                .iter()
                .map(|ann| {
                    let mut e = vocab.term(ann.term).id.clone();
                    if ann.major {
                        e.push('*');
                    }
                    if !ann.qualifiers.is_empty() {
                        e.push('/');
                        let quals: Vec<&str> =
                            ann.qualifiers.iter().map(|&q| self.qualifier(q)).collect();
                        e.push_str(&quals.join(","));
                    }
                    e
                })
                .collect();
            out.push_str(&entries.join(";"));
            out.push('\n');
        }
        out
    }
}

/// A term entry before qualifier interning.
struct RawEntry {
    term: TermIdx,
    major: bool,
    qualifiers: Vec<String>,
}

/// Parses the corpus file format: one record per line,
/// `doc_id<TAB>term_entry(;term_entry)*` where a term entry is
/// `term_id[*][/qualifier(,qualifier)*]` and the trailing `*` on the term id
/// marks it major. Lines starting with `#` and blank lines are skipped.
///
/// A term listed several times in one raw record (e.g. once per qualifier) is
/// merged into a single annotation: qualifier sets are unioned and the major
/// flag is the OR of the occurrences.
pub fn parse_corpus<R: BufRead>(reader: R, vocab: &VocabularyIndex) -> Result<Corpus> {
    let mut raw_records: Vec<(String, Vec<RawEntry>)> = Vec::new();
    let mut qualifier_set: Vec<String> = Vec::new();
    let mut qualifier_seen: HashSet<String> = HashSet::new();

    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = lineno + 1;
        let trimmed = line.trim_end_matches(['\r', '\n']);
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (doc_id, rest) = match trimmed.split_once('\t') {
            Some((d, r)) => (d, r),
            None => (trimmed, ""),
        };
        if doc_id.is_empty() || doc_id.contains('\t') {
            return Err(Error::MalformedLine {
                line: lineno,
                reason: "missing document id".into(),
            });
        }
        if rest.is_empty() {
            return Err(Error::EmptyRecord {
                doc_id: doc_id.to_owned(),
            });
        }
        let mut entries = Vec::new();
        for entry in rest.split(';') {
            entries.push(parse_entry(entry, doc_id, vocab, lineno)?);
        }
        for e in &entries {
            for q in &e.qualifiers {
                if qualifier_seen.insert(q.clone()) {
                    qualifier_set.push(q.clone());
                }
            }
        }
        raw_records.push((doc_id.to_owned(), entries));
    }

    qualifier_set.sort();
    let qualifier_ids: HashMap<&str, QualifierIdx> = qualifier_set
        .iter()
        .enumerate()
        .map(|(i, q)| (q.as_str(), QualifierIdx(i as u32)))
        .collect();

    let mut records = Vec::with_capacity(raw_records.len());
    for (doc_id, entries) in raw_records {
        // Merge duplicate terms: major = OR, qualifiers = union.
        let mut merged: HashMap<TermIdx, TermAnnotation> = HashMap::new();
        for e in entries {
            let ann = merged.entry(e.term).or_insert_with(|| TermAnnotation {
                term: e.term,
                major: false,
                qualifiers: Vec::new(),
            });
            ann.major |= e.major;
            ann.qualifiers
                .extend(e.qualifiers.iter().map(|q| qualifier_ids[q.as_str()]));
        }
        let annotations: Vec<TermAnnotation> = merged.into_values().collect();
        records.push(PublicationRecord::new(doc_id, annotations)?);
    }

    Corpus::new(records, qualifier_set)
}

fn parse_entry(
    entry: &str,
    doc_id: &str,
    vocab: &VocabularyIndex,
    lineno: usize,
) -> Result<RawEntry> {
    let (head, qual_part) = match entry.split_once('/') {
        Some((h, q)) => (h, Some(q)),
        None => (entry, None),
    };
    let (term_id, major) = match head.strip_suffix('*') {
        Some(id) => (id, true),
        None => (head, false),
    };
    if term_id.is_empty() || term_id.contains(ILLEGAL_ID_CHARS) {
        return Err(Error::MalformedLine {
            line: lineno,
            reason: format!("invalid term entry `{entry}`"),
        });
    }
    let term = vocab.resolve(term_id).ok_or_else(|| Error::UnknownRecordTerm {
        doc_id: doc_id.to_owned(),
        term_id: term_id.to_owned(),
    })?;
    let mut qualifiers = Vec::new();
    if let Some(quals) = qual_part {
        for q in quals.split(',') {
            if q.is_empty() || q.contains(ILLEGAL_ID_CHARS) {
                return Err(Error::MalformedLine {
                    line: lineno,
                    reason: format!("invalid qualifier in entry `{entry}`"),
                });
            }
            qualifiers.push(q.to_owned());
        }
    }
    Ok(RawEntry {
        term,
        major,
        qualifiers,
    })
}
