//! The prepared index bundle: vocabulary, corpus, IC table, and both term
//! graphs with their distance caches, plus a versioned on-disk format so the
//! expensive derivation work is done once per data set.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::{Corpus, PublicationRecord, QualifierIdx, TermAnnotation};
use crate::error::{Error, Result};
use crate::graph::{build_graph, DistanceCache, GraphOptions, GraphVariant, TermGraph};
use crate::ic::{compute_ic, term_frequencies, FrequencyTable, IcConfig, IcTable};
use crate::vocab::{Term, TermIdx, TreeNumber, VocabularyIndex};

/// Everything the measures need, built once and then immutable (the distance
/// caches fill in lazily behind their own locks).
pub struct Indexes {
    pub vocab: VocabularyIndex,
    pub corpus: Corpus,
    pub freqs: FrequencyTable,
    pub ic: IcTable,
    pub ic_config: IcConfig,
    pub graph_options: GraphOptions,
    pub unit_graph: TermGraph,
    pub delta_graph: TermGraph,
    pub unit_cache: DistanceCache,
    pub delta_cache: DistanceCache,
}

impl Indexes {
    pub fn build(
        vocab: VocabularyIndex,
        corpus: Corpus,
        ic_config: IcConfig,
        graph_options: GraphOptions,
    ) -> Result<Self> {
        let freqs = term_frequencies(&corpus, &vocab);
        let ic = compute_ic(&vocab, &freqs, &ic_config);
        Self::assemble(vocab, corpus, freqs, ic, ic_config, graph_options)
    }

    fn assemble(
        vocab: VocabularyIndex,
        corpus: Corpus,
        freqs: FrequencyTable,
        ic: IcTable,
        ic_config: IcConfig,
        graph_options: GraphOptions,
    ) -> Result<Self> {
        let unit_graph = build_graph(&vocab, GraphVariant::Unit, None, graph_options)?;
        let delta_graph = build_graph(&vocab, GraphVariant::DeltaIc, Some(&ic), graph_options)?;
        Ok(Self {
            vocab,
            corpus,
            freqs,
            ic,
            ic_config,
            graph_options,
            unit_graph,
            delta_graph,
            unit_cache: DistanceCache::new(),
            delta_cache: DistanceCache::new(),
        })
    }

    pub fn graph(&self, variant: GraphVariant) -> (&TermGraph, &DistanceCache) {
        match variant {
            GraphVariant::Unit => (&self.unit_graph, &self.unit_cache),
            GraphVariant::DeltaIc => (&self.delta_graph, &self.delta_cache),
        }
    }

    /// Writes the versioned, checksummed binary index file.
    pub fn save(&self, path: &Path) -> Result<()> {
        let payload = Payload::from_indexes(self);
        let bytes = bincode::serialize(&payload).map_err(|e| Error::IndexEncoding(e.to_string()))?;
        let digest = Sha256::digest(&bytes);

        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(MAGIC)?;
        w.write_all(&FORMAT_VERSION.to_le_bytes())?;
        w.write_all(&digest)?;
        w.write_all(&bytes)?;
        w.flush()?;
        Ok(())
    }

    /// Loads an index file written by [`Self::save`]. Scores computed from a
    /// loaded index are bit-identical to in-memory construction: IC values
    /// are stored verbatim and the graphs re-derive deterministically.
    pub fn load(path: &Path) -> Result<Self> {
        let mut r = BufReader::new(File::open(path)?);

        let mut magic = [0u8; 8];
        r.read_exact(&mut magic).map_err(|_| Error::BadMagic)?;
        if &magic != MAGIC {
            return Err(Error::BadMagic);
        }
        let mut version = [0u8; 4];
        r.read_exact(&mut version)?;
        let version = u32::from_le_bytes(version);
        if version != FORMAT_VERSION {
            return Err(Error::UnsupportedVersion {
                found: version,
                expected: FORMAT_VERSION,
            });
        }
        let mut digest = [0u8; 32];
        r.read_exact(&mut digest)?;
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        if Sha256::digest(&bytes).as_slice() != digest {
            return Err(Error::ChecksumMismatch);
        }

        let payload: Payload =
            bincode::deserialize(&bytes).map_err(|e| Error::IndexEncoding(e.to_string()))?;
        payload.into_indexes()
    }
}

pub const MAGIC: &[u8; 8] = b"VOCRELIX";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct TermDto {
    id: String,
    name: String,
    tree_numbers: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct RecordDto {
    doc_id: String,
    annotations: Vec<(u32, bool, Vec<u32>)>,
}

#[derive(Serialize, Deserialize)]
struct Payload {
    terms: Vec<TermDto>,
    qualifiers: Vec<String>,
    records: Vec<RecordDto>,
    counts: Vec<u64>,
    subtree_mass: Vec<u64>,
    ic: Vec<f64>,
    ic_config: IcConfig,
    graph_options: GraphOptions,
}

impl Payload {
    fn from_indexes(indexes: &Indexes) -> Self {
        Self {
            terms: indexes
                .vocab
                .terms()
                .iter()
                .map(|t| TermDto {
                    id: t.id.clone(),
                    name: t.name.clone(),
                    tree_numbers: t.tree_numbers().iter().map(|tn| tn.to_string()).collect(),
                })
                .collect(),
            qualifiers: indexes.corpus.qualifiers().to_vec(),
            records: indexes
                .corpus
                .records()
                .iter()
                .map(|r| RecordDto {
                    doc_id: r.doc_id.clone(),
                    annotations: r
                        .annotations()
                        .iter()
                        .map(|a| {
                            (
                                a.term.0,
                                a.major,
                                a.qualifiers.iter().map(|q| q.0).collect(),
                            )
                        })
                        .collect(),
                })
                .collect(),
            counts: indexes.freqs.counts().to_vec(),
            subtree_mass: indexes.ic.masses().to_vec(),
            ic: indexes.ic.values().to_vec(),
            ic_config: indexes.ic_config,
            graph_options: indexes.graph_options,
        }
    }

    fn into_indexes(self) -> Result<Indexes> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in self.terms {
            let tns = t
                .tree_numbers
                .iter()
                .map(|s| TreeNumber::parse(s))
                .collect::<Result<Vec<_>, String>>()
                .map_err(Error::IndexEncoding)?;
            terms.push(Term::new(t.id, t.name, tns)?);
        }
        let vocab = VocabularyIndex::new(terms)?;

        let mut records = Vec::with_capacity(self.records.len());
        for r in self.records {
            let annotations = r
                .annotations
                .into_iter()
                .map(|(term, major, quals)| TermAnnotation {
                    term: TermIdx(term),
                    major,
                    qualifiers: quals.into_iter().map(QualifierIdx).collect(),
                })
                .collect();
            records.push(PublicationRecord::new(r.doc_id, annotations)?);
        }
        let corpus = Corpus::new(records, self.qualifiers)?;

        if self.counts.len() != vocab.len()
            || self.subtree_mass.len() != vocab.len()
            || self.ic.len() != vocab.len()
        {
            return Err(Error::IndexEncoding(
                "table lengths do not match the vocabulary".into(),
            ));
        }
        let freqs = FrequencyTable::from_counts(self.counts);
        let ic = IcTable::from_parts(self.ic, self.subtree_mass);

        Indexes::assemble(vocab, corpus, freqs, ic, self.ic_config, self.graph_options)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::parse_corpus;
    use crate::vocab::parse_vocabulary;

    fn toy_indexes() -> Indexes {
        let vocab = parse_vocabulary(
            "R\troot\tA\nA\tmid\tA.1\nB\tmid b\tA.2\nA1\tleaf\tA.1.1\n".as_bytes(),
        )
        .unwrap();
        let corpus = parse_corpus(
            "p1\tA1*/q1\np2\tA1\np3\tB/q2\np4\tA\n".as_bytes(),
            &vocab,
        )
        .unwrap();
        Indexes::build(vocab, corpus, IcConfig::default(), GraphOptions::default()).unwrap()
    }

    #[test]
    fn save_load_round_trip() {
        let indexes = toy_indexes();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("toy.vix");
        indexes.save(&path).unwrap();
        let loaded = Indexes::load(&path).unwrap();
        assert_eq!(indexes.vocab, loaded.vocab);
        assert_eq!(indexes.corpus, loaded.corpus);
        assert_eq!(indexes.freqs, loaded.freqs);
        assert_eq!(indexes.ic, loaded.ic);
        for i in 0..indexes.vocab.len() {
            let idx = TermIdx(i as u32);
            assert_eq!(
                indexes.ic.ic(idx).to_bits(),
                loaded.ic.ic(idx).to_bits(),
                "ic bits must survive the round trip"
            );
        }
    }

    #[test]
    fn loaded_index_scores_bit_identically() {
        use crate::corpus::DocIdx;
        use crate::measures::{compute, Measure};

        let indexes = toy_indexes();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("toy.vix");
        indexes.save(&path).unwrap();
        let loaded = Indexes::load(&path).unwrap();
        let docs = indexes.corpus.len() as u32;
        for measure in Measure::ALL {
            for a in 0..docs {
                for b in 0..docs {
                    let (ra, rb) = (DocIdx(a), DocIdx(b));
                    let original = compute(
                        measure,
                        indexes.corpus.record(ra),
                        indexes.corpus.record(rb),
                        &indexes,
                    )
                    .unwrap();
                    let reloaded = compute(
                        measure,
                        loaded.corpus.record(ra),
                        loaded.corpus.record(rb),
                        &loaded,
                    )
                    .unwrap();
                    assert_eq!(original.value.to_bits(), reloaded.value.to_bits(), "{measure}");
                }
            }
        }
    }

    #[test]
    fn bad_magic_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("not-an-index");
        std::fs::write(&path, b"definitely not an index file").unwrap();
        assert!(matches!(Indexes::load(&path), Err(Error::BadMagic)));
    }

    #[test]
    fn version_mismatch_is_rejected() {
        let indexes = toy_indexes();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("toy.vix");
        indexes.save(&path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes[8] = 0xFF;
        std::fs::write(&path, bytes).unwrap();
        assert!(matches!(
            Indexes::load(&path),
            Err(Error::UnsupportedVersion { .. })
        ));
    }

    #[test]
    fn corruption_is_detected() {
        let indexes = toy_indexes();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("toy.vix");
        indexes.save(&path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        let last = bytes.len() - 1;
        bytes[last] ^= 0x01;
        std::fs::write(&path, bytes).unwrap();
        assert!(matches!(
            Indexes::load(&path),
            Err(Error::ChecksumMismatch)
        ));
    }
}
