//! Corpus-frequency information content.
//!
//! A term's weight is the negative log of its subtree frequency share: the
//! number of publications indexed with the term or any of its descendants,
//! divided by the total of those subtree masses over the whole vocabulary.
//! Rare, specific terms get high IC; broad terms get low IC.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::vocab::{TermIdx, VocabularyIndex};

/// Per-term document frequency: in how many publications the term appears.
/// Every vocabulary term has an entry, unused terms count 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrequencyTable {
    counts: Vec<u64>,
}

impl FrequencyTable {
    pub fn count(&self, idx: TermIdx) -> u64 {
        self.counts[idx.idx()]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub(crate) fn from_counts(counts: Vec<u64>) -> Self {
        Self { counts }
    }
}

/// Counts publications per term. A publication contributes at most one count
/// per term regardless of qualifiers (annotations are unique per term).
pub fn term_frequencies(corpus: &Corpus, vocab: &VocabularyIndex) -> FrequencyTable {
    let mut counts = vec![0u64; vocab.len()];
    for rec in corpus.records() {
        for ann in rec.annotations() {
            counts[ann.term.idx()] += 1;
        }
    }
    FrequencyTable { counts }
}

/// Which terms the IC denominator sums over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IcUniverse {
    /// Every vocabulary term (default).
    AllVocabulary,
    /// Only terms observed in the corpus (frequency > 0).
    Observed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IcConfig {
    /// Logarithm base. Rankings of the distance measures are base-invariant,
    /// but the IC-weighted cosine mixes IC entries with binary qualifier
    /// entries, so its values shift with the base.
    pub log_base: f64,
    pub universe: IcUniverse,
}

impl Default for IcConfig {
    fn default() -> Self {
        Self {
            log_base: std::f64::consts::E,
            universe: IcUniverse::AllVocabulary,
        }
    }
}

/// Information content per term, plus the smoothed subtree masses it was
/// computed from.
#[derive(Debug, Clone, PartialEq)]
pub struct IcTable {
    ic: Vec<f64>,
    subtree_mass: Vec<u64>,
}

impl IcTable {
    pub fn ic(&self, idx: TermIdx) -> f64 {
        self.ic[idx.idx()]
    }

    pub fn values(&self) -> &[f64] {
        &self.ic
    }

    /// The smoothed numerator mass: subtree frequency floored at 1.
    pub fn subtree_mass(&self, idx: TermIdx) -> u64 {
        self.subtree_mass[idx.idx()]
    }

    pub fn masses(&self) -> &[u64] {
        &self.subtree_mass
    }

    pub(crate) fn from_parts(ic: Vec<f64>, subtree_mass: Vec<u64>) -> Self {
        Self { ic, subtree_mass }
    }
}

/// Computes IC for every vocabulary term.
///
/// The raw mass of a term is its own frequency plus the frequencies of all
/// its distinct descendants. The denominator sums raw masses over the
/// configured universe (1 if that sum is zero). The numerator mass is floored
/// at 1 so unused terms get the largest finite IC instead of infinity; the
/// denominator keeps raw masses so smoothing never perturbs observed terms.
pub fn compute_ic(vocab: &VocabularyIndex, freqs: &FrequencyTable, config: &IcConfig) -> IcTable {
    let n = vocab.len();
    let counts = freqs.counts();

    let raw_mass: Vec<u64> = (0..n)
        .into_par_iter()
        .map_init(
            || (vec![0u32; n], 0u32),
            |(stamp, generation), i| {
                *generation += 1;
                let mut mass = counts[i];
                let mut stack: Vec<TermIdx> = vocab.children(TermIdx(i as u32)).to_vec();
                while let Some(v) = stack.pop() {
                    if stamp[v.idx()] == *generation {
                        continue;
                    }
                    stamp[v.idx()] = *generation;
                    mass += counts[v.idx()];
                    stack.extend_from_slice(vocab.children(v));
                }
                mass
            },
        )
        .collect();

    let denominator: u64 = match config.universe {
        IcUniverse::AllVocabulary => raw_mass.iter().sum(),
        IcUniverse::Observed => (0..n).filter(|&i| counts[i] > 0).map(|i| raw_mass[i]).sum(),
    };
    let denominator = denominator.max(1);

    let base_ln = config.log_base.ln();
    let natural = config.log_base == std::f64::consts::E;
    let mut ic = Vec::with_capacity(n);
    let mut subtree_mass = Vec::with_capacity(n);
    for &raw in &raw_mass {
        let mass = raw.max(1);
        subtree_mass.push(mass);
        let mut value = -((mass as f64 / denominator as f64).ln());
        if !natural {
            value /= base_ln;
        }
        ic.push(value.max(0.0));
    }
    IcTable { ic, subtree_mass }
}

/// One line per term, sorted by term id:
/// `term_id<TAB>frequency<TAB>subtree_mass<TAB>ic`.
pub fn dump_ic(vocab: &VocabularyIndex, freqs: &FrequencyTable, table: &IcTable) -> String {
    let mut out = String::new();
    for (i, term) in vocab.terms().iter().enumerate() {
        let idx = TermIdx(i as u32);
        out.push_str(&format!(
            "{}\t{}\t{}\t{:.6}\n",
            term.id,
            freqs.count(idx),
            table.subtree_mass(idx),
            table.ic(idx)
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::parse_corpus;
    use crate::vocab::parse_vocabulary;
    use approx::assert_abs_diff_eq;

    fn toy() -> (VocabularyIndex, Corpus) {
        let vocab = parse_vocabulary(
            "R\troot\tA\nA\tmid\tA.1\nB\tmid b\tA.2\nA1\tleaf\tA.1.1\n".as_bytes(),
        )
        .unwrap();
        let corpus =
            parse_corpus("p1\tA1\np2\tA1\np3\tB\np4\tA\n".as_bytes(), &vocab).unwrap();
        (vocab, corpus)
    }

    #[test]
    fn frequencies_count_publications() {
        let (vocab, corpus) = toy();
        let freqs = term_frequencies(&corpus, &vocab);
        assert_eq!(freqs.count(vocab.resolve("A1").unwrap()), 2);
        assert_eq!(freqs.count(vocab.resolve("A").unwrap()), 1);
        assert_eq!(freqs.count(vocab.resolve("B").unwrap()), 1);
        assert_eq!(freqs.count(vocab.resolve("R").unwrap()), 0);
    }

    #[test]
    fn empty_corpus_counts_zero() {
        let (vocab, _) = toy();
        let corpus = parse_corpus("".as_bytes(), &vocab).unwrap();
        let freqs = term_frequencies(&corpus, &vocab);
        assert!(freqs.counts().iter().all(|&c| c == 0));
    }

    #[test]
    fn qualifiers_do_not_multiply_counts() {
        let (vocab, _) = toy();
        let corpus = parse_corpus("p1\tA/q1;A/q2;A/q3\n".as_bytes(), &vocab).unwrap();
        let freqs = term_frequencies(&corpus, &vocab);
        assert_eq!(freqs.count(vocab.resolve("A").unwrap()), 1);
    }

    #[test]
    fn toy_ic_values() {
        let (vocab, corpus) = toy();
        let freqs = term_frequencies(&corpus, &vocab);
        let table = compute_ic(&vocab, &freqs, &IcConfig::default());
        // Masses: A1=2, A=3, B=1, R=4; denominator 10.
        assert_eq!(table.subtree_mass(vocab.resolve("A1").unwrap()), 2);
        assert_eq!(table.subtree_mass(vocab.resolve("A").unwrap()), 3);
        assert_eq!(table.subtree_mass(vocab.resolve("B").unwrap()), 1);
        assert_eq!(table.subtree_mass(vocab.resolve("R").unwrap()), 4);
        assert_abs_diff_eq!(table.ic(vocab.resolve("A1").unwrap()), 1.609, epsilon = 1e-3);
        assert_abs_diff_eq!(table.ic(vocab.resolve("A").unwrap()), 1.204, epsilon = 1e-3);
        assert_abs_diff_eq!(table.ic(vocab.resolve("B").unwrap()), 2.303, epsilon = 1e-3);
        assert_abs_diff_eq!(table.ic(vocab.resolve("R").unwrap()), 0.916, epsilon = 1e-3);
    }

    #[test]
    fn universal_term_has_zero_ic() {
        let vocab = parse_vocabulary("X\tonly\tA\n".as_bytes()).unwrap();
        let corpus = parse_corpus("p1\tX\np2\tX\n".as_bytes(), &vocab).unwrap();
        let freqs = term_frequencies(&corpus, &vocab);
        let table = compute_ic(&vocab, &freqs, &IcConfig::default());
        assert_eq!(table.ic(vocab.resolve("X").unwrap()), 0.0);
    }

    #[test]
    fn unused_term_smoothing() {
        let (vocab, _) = toy();
        // Leave B entirely unused; masses: A1=2, A=4, B=0 -> smoothed 1, R=4;
        // denominator stays at the raw 10.
        let corpus = parse_corpus("p1\tA1\np2\tA1\np3\tA\np4\tA\n".as_bytes(), &vocab).unwrap();
        let freqs = term_frequencies(&corpus, &vocab);
        let table = compute_ic(&vocab, &freqs, &IcConfig::default());
        assert_abs_diff_eq!(
            table.ic(vocab.resolve("B").unwrap()),
            -(0.1f64.ln()),
            epsilon = 1e-12
        );
        let b_ic = table.ic(vocab.resolve("B").unwrap());
        assert!(table.values().iter().all(|&v| v <= b_ic));
    }

    #[test]
    fn log_base_rescales() {
        let (vocab, corpus) = toy();
        let freqs = term_frequencies(&corpus, &vocab);
        let natural = compute_ic(&vocab, &freqs, &IcConfig::default());
        let base2 = compute_ic(
            &vocab,
            &freqs,
            &IcConfig {
                log_base: 2.0,
                ..IcConfig::default()
            },
        );
        for i in 0..vocab.len() {
            let idx = TermIdx(i as u32);
            assert_abs_diff_eq!(
                base2.ic(idx),
                natural.ic(idx) / 2.0f64.ln(),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn observed_universe_shrinks_denominator() {
        let (vocab, corpus) = toy();
        let freqs = term_frequencies(&corpus, &vocab);
        let table = compute_ic(
            &vocab,
            &freqs,
            &IcConfig {
                universe: IcUniverse::Observed,
                ..IcConfig::default()
            },
        );
        // Observed terms: A1, A, B with masses 2, 3, 1; denominator 6.
        assert_abs_diff_eq!(
            table.ic(vocab.resolve("A1").unwrap()),
            -((2.0f64 / 6.0).ln()),
            epsilon = 1e-12
        );
    }

    #[test]
    fn monotone_along_parent_child_edges() {
        let (vocab, corpus) = toy();
        let freqs = term_frequencies(&corpus, &vocab);
        let table = compute_ic(&vocab, &freqs, &IcConfig::default());
        for i in 0..vocab.len() {
            let p = TermIdx(i as u32);
            for &c in vocab.children(p) {
                assert!(table.ic(p) <= table.ic(c));
            }
        }
    }

    #[test]
    fn duplicated_corpus_leaves_ic_unchanged() {
        let (vocab, corpus) = toy();
        let freqs = term_frequencies(&corpus, &vocab);
        let base = compute_ic(&vocab, &freqs, &IcConfig::default());
        let doubled = parse_corpus(
            "p1\tA1\np2\tA1\np3\tB\np4\tA\nq1\tA1\nq2\tA1\nq3\tB\nq4\tA\n".as_bytes(),
            &vocab,
        )
        .unwrap();
        let freqs2 = term_frequencies(&doubled, &vocab);
        let table2 = compute_ic(&vocab, &freqs2, &IcConfig::default());
        for i in 0..vocab.len() {
            let idx = TermIdx(i as u32);
            assert_abs_diff_eq!(base.ic(idx), table2.ic(idx), epsilon = 1e-12);
        }
    }

    #[test]
    fn dump_is_sorted_and_stable() {
        let (vocab, corpus) = toy();
        let freqs = term_frequencies(&corpus, &vocab);
        let table = compute_ic(&vocab, &freqs, &IcConfig::default());
        let dump = dump_ic(&vocab, &freqs, &table);
        let expected = "\
A\t1\t3\t1.203973
A1\t2\t2\t1.609438
B\t1\t1\t2.302585
R\t0\t4\t0.916291
";
        assert_eq!(dump, expected);
    }
}
