//! Benchmarking relatedness measures against graded relevance judgements.
//!
//! Test 1 pools, per topic, all pairs of relevant publications (rr) and all
//! relevant/not-relevant pairs (nr-r), and reports Cliff's delta between the
//! two groups' relatedness scores. Test 2 repeatedly samples per topic a set
//! of relevant and a set of not-relevant publications, classifies every other
//! judged publication by which sample it is more related to, and scores the
//! pooled confusion matrix with precision, recall, and the Matthews
//! correlation coefficient.

use std::collections::{BTreeMap, HashMap};
use std::io::BufRead;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::corpus::DocIdx;
use crate::error::{Error, Result};
use crate::index::Indexes;
use crate::measures::{Measure, Orientation, PairScorer};
use crate::stats::{cliffs_delta, density_histogram, ConfusionMatrix, Histogram};

/// Expert relevance grade.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Grade {
    NotRelevant,
    PossiblyRelevant,
    Relevant,
}

impl Grade {
    pub fn value(self) -> u8 {
        match self {
            Grade::NotRelevant => 0,
            Grade::PossiblyRelevant => 1,
            Grade::Relevant => 2,
        }
    }

    pub fn from_text(text: &str) -> Result<Self> {
        match text {
            "0" => Ok(Grade::NotRelevant),
            "1" => Ok(Grade::PossiblyRelevant),
            "2" => Ok(Grade::Relevant),
            other => Err(Error::InvalidGrade {
                value: other.to_owned(),
            }),
        }
    }
}

/// One passage-level judgement; repeated (topic, doc) lines are expected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PassageJudgement {
    pub topic_id: String,
    pub doc_id: String,
    pub grade: Grade,
}

/// Parses the relevance file format: `topic_id<TAB>doc_id<TAB>grade` per
/// line, grades in {0, 1, 2}. Lines starting with `#` and blank lines are
/// skipped.
pub fn parse_judgements<R: BufRead>(reader: R) -> Result<Vec<PassageJudgement>> {
    let mut out = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = lineno + 1;
        let trimmed = line.trim_end_matches(['\r', '\n']);
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.split('\t');
        let (topic, doc, grade) =
            match (fields.next(), fields.next(), fields.next(), fields.next()) {
                (Some(t), Some(d), Some(g), None) if !t.is_empty() && !d.is_empty() => (t, d, g),
                _ => {
                    return Err(Error::MalformedLine {
                        line: lineno,
                        reason: "expected 3 tab-separated fields: topic, doc, grade".into(),
                    })
                }
            };
        let grade = Grade::from_text(grade).map_err(|e| Error::MalformedLine {
            line: lineno,
            reason: e.to_string(),
        })?;
        out.push(PassageJudgement {
            topic_id: topic.to_owned(),
            doc_id: doc.to_owned(),
            grade,
        });
    }
    Ok(out)
}

/// Document-level judgement: the maximum grade over the document's passages
/// for that topic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocJudgement {
    pub topic_id: String,
    pub doc_id: String,
    pub grade: Grade,
}

/// Collapses passage judgements to one judgement per (topic, document) by
/// taking the maximum grade. Output is sorted by (topic, document).
pub fn aggregate_judgements(passages: &[PassageJudgement]) -> Vec<DocJudgement> {
    let mut best: BTreeMap<(&str, &str), Grade> = BTreeMap::new();
    for p in passages {
        let entry = best
            .entry((p.topic_id.as_str(), p.doc_id.as_str()))
            .or_insert(p.grade);
        if p.grade > *entry {
            *entry = p.grade;
        }
    }
    best.into_iter()
        .map(|((topic, doc), grade)| DocJudgement {
            topic_id: topic.to_owned(),
            doc_id: doc.to_owned(),
            grade,
        })
        .collect()
}

/// One topic's document judgements, sorted by document id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TopicJudgements {
    pub topic_id: String,
    pub docs: Vec<(String, Grade)>,
}

impl TopicJudgements {
    pub fn docs_with_grade(&self, grade: Grade) -> impl Iterator<Item = &str> {
        self.docs
            .iter()
            .filter(move |(_, g)| *g == grade)
            .map(|(d, _)| d.as_str())
    }
}

/// Topics that survived the relevance-ratio filter, sorted by topic id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TopicSet {
    pub topics: Vec<TopicJudgements>,
}

/// Keeps a topic iff at least `threshold` of its judged documents have grade
/// 1 or 2. The threshold must lie in (0, 1].
pub fn filter_topics(judgements: &[DocJudgement], threshold: f64) -> Result<TopicSet> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::InvalidThreshold(threshold));
    }
    let mut by_topic: BTreeMap<&str, Vec<(String, Grade)>> = BTreeMap::new();
    for j in judgements {
        by_topic
            .entry(j.topic_id.as_str())
            .or_default()
            .push((j.doc_id.clone(), j.grade));
    }
    let topics = by_topic
        .into_iter()
        .filter(|(_, docs)| {
            let relevant_ish = docs
                .iter()
                .filter(|(_, g)| *g != Grade::NotRelevant)
                .count();
            relevant_ish as f64 / docs.len() as f64 >= threshold
        })
        .map(|(topic_id, mut docs)| {
            docs.sort();
            TopicJudgements {
                topic_id: topic_id.to_owned(),
                docs,
            }
        })
        .collect();
    Ok(TopicSet { topics })
}

/// Same-topic pair groups, pooled over all topics. `rr` pairs both grade 2;
/// `nrr` pairs one grade 0 with one grade 2. Unordered pairs appear once; no
/// pair crosses topics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairGroups {
    docs: Vec<String>,
    rr: Vec<(u32, u32)>,
    nrr: Vec<(u32, u32)>,
}

impl PairGroups {
    pub fn rr_count(&self) -> usize {
        self.rr.len()
    }

    pub fn nrr_count(&self) -> usize {
        self.nrr.len()
    }

    pub fn rr_pairs(&self) -> impl Iterator<Item = (&str, &str)> {
        self.rr
            .iter()
            .map(|&(a, b)| (self.docs[a as usize].as_str(), self.docs[b as usize].as_str()))
    }

    pub fn nrr_pairs(&self) -> impl Iterator<Item = (&str, &str)> {
        self.nrr
            .iter()
            .map(|&(a, b)| (self.docs[a as usize].as_str(), self.docs[b as usize].as_str()))
    }
}

/// Enumerates the rr and nr-r pair groups. Grade-1 documents contribute to
/// neither group.
pub fn enumerate_pairs(topics: &TopicSet) -> PairGroups {
    let mut docs: Vec<String> = Vec::new();
    let mut doc_ids: HashMap<String, u32> = HashMap::new();
    let mut intern = |doc: &str, docs: &mut Vec<String>| -> u32 {
        if let Some(&i) = doc_ids.get(doc) {
            return i;
        }
        let i = docs.len() as u32;
        docs.push(doc.to_owned());
        doc_ids.insert(doc.to_owned(), i);
        i
    };

    let mut rr = Vec::new();
    let mut nrr = Vec::new();
    for topic in &topics.topics {
        let relevant: Vec<u32> = topic
            .docs_with_grade(Grade::Relevant)
            .map(|d| intern(d, &mut docs))
            .collect();
        let not_relevant: Vec<u32> = topic
            .docs_with_grade(Grade::NotRelevant)
            .map(|d| intern(d, &mut docs))
            .collect();
        for i in 0..relevant.len() {
            for j in (i + 1)..relevant.len() {
                rr.push((relevant[i], relevant[j]));
            }
        }
        for &nr in &not_relevant {
            for &r in &relevant {
                nrr.push((nr, r));
            }
        }
    }
    PairGroups { docs, rr, nrr }
}

/// Group means and effect size of one measure over the pair groups.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Test1Result {
    pub mean_nrr: f64,
    pub mean_rr: f64,
    pub cliffs_delta: f64,
}

/// Scores every pair and compares the rr group against the nr-r group.
/// Distance scores are negated before the effect size so a positive delta
/// always means "rr pairs are more related"; the reported means stay raw.
pub fn run_test1(measure: Measure, pairs: &PairGroups, indexes: &Indexes) -> Result<Test1Result> {
    let scorer = PairScorer::new(measure, indexes)?;
    let (nrr, rr) = score_pair_groups(&scorer, pairs, indexes)?;
    test1_from_scores(measure, &nrr, &rr)
}

fn score_pair_groups(
    scorer: &PairScorer<'_>,
    pairs: &PairGroups,
    indexes: &Indexes,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let resolved: Vec<DocIdx> = pairs
        .docs
        .iter()
        .map(|d| indexes.corpus.require(d))
        .collect::<Result<_>>()?;
    let score_group = |group: &[(u32, u32)]| -> Result<Vec<f64>> {
        group
            .par_iter()
            .map(|&(a, b)| {
                scorer
                    .score(resolved[a as usize], resolved[b as usize])
                    .map(|s| s.value)
            })
            .collect()
    };
    Ok((score_group(&pairs.nrr)?, score_group(&pairs.rr)?))
}

fn test1_from_scores(measure: Measure, nrr: &[f64], rr: &[f64]) -> Result<Test1Result> {
    if nrr.is_empty() || rr.is_empty() {
        return Err(Error::EmptyGroup);
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let orient = |v: &[f64]| -> Vec<f64> {
        match measure.orientation() {
            Orientation::Similarity => v.to_vec(),
            Orientation::Distance => v.iter().map(|x| -x).collect(),
        }
    };
    let delta = cliffs_delta(&orient(rr), &orient(nrr))?;
    Ok(Test1Result {
        mean_nrr: mean(nrr),
        mean_rr: mean(rr),
        cliffs_delta: delta,
    })
}

/// Pooled confusion matrix of the sampling classifier, plus the topics that
/// were skipped for lacking `sample_size` documents in either grade class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Test2Outcome {
    pub matrix: ConfusionMatrix,
    pub skipped_topics: Vec<String>,
}

/// The seeded sampling classifier.
///
/// Per topic and iteration, samples `sample_size` relevant and `sample_size`
/// not-relevant documents without replacement, then classifies every
/// unsampled judged document as relevant iff its best relatedness to the
/// relevant sample strictly exceeds its best relatedness to the not-relevant
/// sample (ties classify as not relevant; for distance measures "best" is the
/// minimum distance). Counts are pooled over all topics and iterations.
///
/// The RNG substream of a cell depends only on (seed, topic, iteration), so
/// adding a topic never shifts another topic's samples and every measure sees
/// identical samples.
pub fn run_test2(
    measure: Measure,
    topics: &TopicSet,
    indexes: &Indexes,
    seed: u64,
    iterations: u32,
    sample_size: usize,
) -> Result<Test2Outcome> {
    let scorer = PairScorer::new(measure, indexes)?;
    let oriented =
        |a: DocIdx, b: DocIdx| -> Result<f64> { Ok(scorer.score(a, b)?.oriented()) };
    classify_topics(&oriented, topics, indexes, seed, iterations, sample_size)
}

/// Scorer-generic body of test 2; `oriented` must return higher-is-more-
/// related values.
///
/// Iterations within a topic revisit the same document pairs, so each
/// topic's pairwise scores are computed once into a symmetric matrix and the
/// sampling cells only index it.
fn classify_topics<S>(
    oriented: &S,
    topics: &TopicSet,
    indexes: &Indexes,
    seed: u64,
    iterations: u32,
    sample_size: usize,
) -> Result<Test2Outcome>
where
    S: Fn(DocIdx, DocIdx) -> Result<f64> + Sync,
{
    struct EligibleTopic<'t> {
        topic_id: &'t str,
        /// Relevant docs first, then not-relevant.
        docs: Vec<DocIdx>,
        relevant_count: usize,
    }

    let mut eligible = Vec::new();
    let mut skipped = Vec::new();
    for topic in &topics.topics {
        let resolve = |grade: Grade| -> Result<Vec<DocIdx>> {
            topic
                .docs_with_grade(grade)
                .map(|d| indexes.corpus.require(d))
                .collect()
        };
        let relevant = resolve(Grade::Relevant)?;
        let not_relevant = resolve(Grade::NotRelevant)?;
        if relevant.len() >= sample_size && not_relevant.len() >= sample_size {
            let relevant_count = relevant.len();
            let mut docs = relevant;
            docs.extend_from_slice(&not_relevant);
            eligible.push(EligibleTopic {
                topic_id: &topic.topic_id,
                docs,
                relevant_count,
            });
        } else {
            skipped.push(topic.topic_id.clone());
        }
    }
    if eligible.is_empty() {
        return Err(Error::NoEligibleTopics { sample_size });
    }

    let mut matrix = ConfusionMatrix::default();
    for topic in &eligible {
        let n = topic.docs.len();
        let rows: Vec<Vec<f64>> = (0..n)
            .into_par_iter()
            .map(|i| -> Result<Vec<f64>> {
                (i + 1..n)
                    .map(|j| oriented(topic.docs[i], topic.docs[j]))
                    .collect()
            })
            .collect::<Result<_>>()?;
        let score = |i: usize, j: usize| -> f64 {
            debug_assert_ne!(i, j);
            if i < j {
                rows[i][j - i - 1]
            } else {
                rows[j][i - j - 1]
            }
        };

        let topic_matrix = (0..iterations)
            .into_par_iter()
            .map(|iteration| {
                let mut rng = cell_rng(seed, topic.topic_id, iteration);
                let nrel = topic.relevant_count;
                let rel_sample = sample_without_replacement(&mut rng, nrel, sample_size);
                let nr_sample =
                    sample_without_replacement(&mut rng, n - nrel, sample_size);

                let mut sampled = vec![false; n];
                for &i in &rel_sample {
                    sampled[i] = true;
                }
                for &i in &nr_sample {
                    sampled[nrel + i] = true;
                }

                let mut cm = ConfusionMatrix::default();
                for (candidate, &is_sampled) in sampled.iter().enumerate() {
                    if is_sampled {
                        continue;
                    }
                    let best = |sample: &[usize], offset: usize| -> f64 {
                        sample
                            .iter()
                            .map(|&i| score(candidate, offset + i))
                            .fold(f64::NEG_INFINITY, f64::max)
                    };
                    let best_rel = best(&rel_sample, 0);
                    let best_nr = best(&nr_sample, nrel);
                    cm.record(best_rel > best_nr, candidate < nrel);
                }
                cm
            })
            .reduce(ConfusionMatrix::default, |mut a, b| {
                a.merge(&b);
                a
            });
        matrix.merge(&topic_matrix);
    }

    Ok(Test2Outcome {
        matrix,
        skipped_topics: skipped,
    })
}

/// Deterministic per-cell RNG; the substream depends only on the arguments.
fn cell_rng(seed: u64, topic_id: &str, iteration: u32) -> ChaCha12Rng {
    let mut hasher = Sha256::new();
    hasher.update(b"vocrel.test2.substream");
    hasher.update(seed.to_le_bytes());
    hasher.update(topic_id.as_bytes());
    hasher.update([0u8]);
    hasher.update(iteration.to_le_bytes());
    ChaCha12Rng::from_seed(hasher.finalize().into())
}

/// First `k` positions of a partial Fisher-Yates shuffle of `0..n`.
fn sample_without_replacement(rng: &mut ChaCha12Rng, n: usize, k: usize) -> Vec<usize> {
    debug_assert!(k <= n);
    let mut idx: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = rng.gen_range(i..n);
        idx.swap(i, j);
    }
    idx.truncate(k);
    idx
}

/// Benchmark knobs; every run is fully determined by these plus the data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BenchConfig {
    pub seed: u64,
    pub iterations: u32,
    pub sample_size: usize,
    pub topic_threshold: f64,
    pub histogram_bins: usize,
    /// Histogram range for similarity measures; roughly 1% of pairs overflow
    /// it on real data.
    pub similarity_histogram_range: (f64, f64),
    /// Histogram range for distance measures.
    pub distance_histogram_range: (f64, f64),
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            iterations: 30,
            sample_size: 10,
            topic_threshold: 0.10,
            histogram_bins: 50,
            similarity_histogram_range: (0.0, 0.5),
            distance_histogram_range: (0.0, 17.5),
        }
    }
}

/// One report row: both tests plus the score histogram for one measure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureReport {
    pub measure: Measure,
    pub mean_nrr: f64,
    pub mean_rr: f64,
    pub cliffs_delta: f64,
    pub matrix: ConfusionMatrix,
    pub precision: f64,
    pub recall: f64,
    pub mcc: f64,
    pub histogram: Histogram,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkReport {
    pub config: BenchConfig,
    pub nrr_pairs: usize,
    pub rr_pairs: usize,
    pub skipped_topics: Vec<String>,
    pub rows: Vec<MeasureReport>,
}

/// Runs both tests and the histogram for every measure. Deterministic given
/// the config seed, independent of thread count.
pub fn run_benchmark(
    measures: &[Measure],
    indexes: &Indexes,
    passages: &[PassageJudgement],
    config: &BenchConfig,
) -> Result<BenchmarkReport> {
    let docs = aggregate_judgements(passages);
    let topics = filter_topics(&docs, config.topic_threshold)?;
    let pairs = enumerate_pairs(&topics);

    let mut rows = Vec::with_capacity(measures.len());
    let mut skipped_topics = Vec::new();
    for &measure in measures {
        let scorer = PairScorer::new(measure, indexes)?;
        let (nrr_scores, rr_scores) = score_pair_groups(&scorer, &pairs, indexes)?;
        let test1 = test1_from_scores(measure, &nrr_scores, &rr_scores)?;

        let (lo, hi) = match measure.orientation() {
            Orientation::Similarity => config.similarity_histogram_range,
            Orientation::Distance => config.distance_histogram_range,
        };
        let mut pooled = nrr_scores;
        pooled.extend_from_slice(&rr_scores);
        let histogram = density_histogram(&pooled, config.histogram_bins, lo, hi)?;

        let test2 = run_test2(
            measure,
            &topics,
            indexes,
            config.seed,
            config.iterations,
            config.sample_size,
        )?;
        skipped_topics = test2.skipped_topics;

        rows.push(MeasureReport {
            measure,
            mean_nrr: test1.mean_nrr,
            mean_rr: test1.mean_rr,
            cliffs_delta: test1.cliffs_delta,
            matrix: test2.matrix,
            precision: test2.matrix.precision(),
            recall: test2.matrix.recall(),
            mcc: test2.matrix.mcc(),
            histogram,
        });
    }

    Ok(BenchmarkReport {
        config: *config,
        nrr_pairs: pairs.nrr_count(),
        rr_pairs: pairs.rr_count(),
        skipped_topics,
        rows,
    })
}

impl BenchmarkReport {
    /// Tab-separated table, one row per measure.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from(
            "measure\tmean_nrr\tmean_rr\tcliffs_d\ttp\tfp\ttn\tfn\tprecision\trecall\tmcc\n",
        );
        for row in &self.rows {
            out.push_str(&format!(
                "{}\t{:.6}\t{:.6}\t{:.6}\t{}\t{}\t{}\t{}\t{:.6}\t{:.6}\t{:.6}\n",
                row.measure,
                row.mean_nrr,
                row.mean_rr,
                row.cliffs_delta,
                row.matrix.true_positives,
                row.matrix.false_positives,
                row.matrix.true_negatives,
                row.matrix.false_negatives,
                row.precision,
                row.recall,
                row.mcc,
            ));
        }
        out
    }

    /// Machine-readable report carrying the same fields plus seed and config.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Histogram series per measure; the trailing row per measure is the
    /// overflow bucket (open upper bound, density 0 by convention).
    pub fn histograms_tsv(&self) -> String {
        let mut out = String::from("measure\tbin_lo\tbin_hi\tcount\tdensity\n");
        for row in &self.rows {
            for bin in &row.histogram.bins {
                out.push_str(&format!(
                    "{}\t{:.6}\t{:.6}\t{}\t{:.6}\n",
                    row.measure, bin.lo, bin.hi, bin.count, bin.density
                ));
            }
            out.push_str(&format!(
                "{}\t{:.6}\tinf\t{}\t0.000000\n",
                row.measure,
                row.histogram.bins.last().map(|b| b.hi).unwrap_or(0.0),
                row.histogram.overflow,
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::parse_corpus;
    use crate::graph::GraphOptions;
    use crate::ic::IcConfig;
    use crate::vocab::parse_vocabulary;
    use approx::assert_abs_diff_eq;

    fn passage(topic: &str, doc: &str, grade: u8) -> PassageJudgement {
        PassageJudgement {
            topic_id: topic.into(),
            doc_id: doc.into(),
            grade: Grade::from_text(&grade.to_string()).unwrap(),
        }
    }

    #[test]
    fn aggregation_takes_the_maximum() {
        let docs = aggregate_judgements(&[
            passage("t1", "d1", 0),
            passage("t1", "d1", 2),
            passage("t1", "d1", 1),
        ]);
        assert_eq!(docs.len(), 1);
        assert_eq!(docs[0].grade, Grade::Relevant);

        let single = aggregate_judgements(&[passage("t1", "d1", 1)]);
        assert_eq!(single[0].grade, Grade::PossiblyRelevant);
    }

    #[test]
    fn aggregation_keeps_topics_independent() {
        let docs = aggregate_judgements(&[passage("t1", "d1", 0), passage("t2", "d1", 2)]);
        assert_eq!(docs.len(), 2);
        assert_eq!(docs[0].grade, Grade::NotRelevant);
        assert_eq!(docs[1].grade, Grade::Relevant);
    }

    #[test]
    fn topic_filter_threshold() {
        let mut judgements = Vec::new();
        // 95 not-relevant + 5 relevant: ratio 0.05, excluded at 0.10.
        for i in 0..95 {
            judgements.push(passage("low", &format!("d{i}"), 0));
        }
        for i in 95..100 {
            judgements.push(passage("low", &format!("d{i}"), 2));
        }
        // Sizes mimicking a retained benchmark topic: 122 / 38 / 182.
        for i in 0..122 {
            judgements.push(passage("t181", &format!("e{i}"), 0));
        }
        for i in 0..38 {
            judgements.push(passage("t181", &format!("f{i}"), 1));
        }
        for i in 0..182 {
            judgements.push(passage("t181", &format!("g{i}"), 2));
        }
        let docs = aggregate_judgements(&judgements);
        let topics = filter_topics(&docs, 0.10).unwrap();
        assert_eq!(topics.topics.len(), 1);
        assert_eq!(topics.topics[0].topic_id, "t181");
        // 220 of 342 judged docs are grade 1 or 2.
        let kept = &topics.topics[0];
        let relevant_ish = kept
            .docs
            .iter()
            .filter(|(_, g)| *g != Grade::NotRelevant)
            .count();
        assert_eq!(relevant_ish, 220);
        assert_eq!(kept.docs.len(), 342);
    }

    #[test]
    fn threshold_one_keeps_only_all_relevant_topics() {
        let docs = aggregate_judgements(&[
            passage("pure", "d1", 2),
            passage("pure", "d2", 1),
            passage("mixed", "d3", 2),
            passage("mixed", "d4", 0),
        ]);
        let topics = filter_topics(&docs, 1.0).unwrap();
        assert_eq!(topics.topics.len(), 1);
        assert_eq!(topics.topics[0].topic_id, "pure");
    }

    #[test]
    fn threshold_validation() {
        assert!(matches!(
            filter_topics(&[], 0.0),
            Err(Error::InvalidThreshold(_))
        ));
        assert!(matches!(
            filter_topics(&[], 1.5),
            Err(Error::InvalidThreshold(_))
        ));
    }

    #[test]
    fn pair_enumeration() {
        let docs = aggregate_judgements(&[
            passage("t", "d1", 2),
            passage("t", "d2", 2),
            passage("t", "d3", 0),
            passage("t", "d4", 1),
        ]);
        let topics = filter_topics(&docs, 0.10).unwrap();
        let pairs = enumerate_pairs(&topics);
        let rr: Vec<_> = pairs.rr_pairs().collect();
        let nrr: Vec<_> = pairs.nrr_pairs().collect();
        assert_eq!(rr, [("d1", "d2")]);
        assert_eq!(nrr, [("d3", "d1"), ("d3", "d2")]);
    }

    #[test]
    fn pair_counts_match_per_topic_combinatorics() {
        let mut judgements = Vec::new();
        let sizes = [(4usize, 3usize, 5usize), (2, 0, 6), (7, 1, 2)];
        for (t, &(n0, n1, n2)) in sizes.iter().enumerate() {
            for i in 0..n0 {
                judgements.push(passage(&format!("t{t}"), &format!("t{t}n{i}"), 0));
            }
            for i in 0..n1 {
                judgements.push(passage(&format!("t{t}"), &format!("t{t}p{i}"), 1));
            }
            for i in 0..n2 {
                judgements.push(passage(&format!("t{t}"), &format!("t{t}r{i}"), 2));
            }
        }
        let docs = aggregate_judgements(&judgements);
        let topics = filter_topics(&docs, 0.10).unwrap();
        let pairs = enumerate_pairs(&topics);
        let expected_rr: usize = sizes.iter().map(|&(_, _, n2)| n2 * (n2 - 1) / 2).sum();
        let expected_nrr: usize = sizes.iter().map(|&(n0, _, n2)| n0 * n2).sum();
        assert_eq!(pairs.rr_count(), expected_rr);
        assert_eq!(pairs.nrr_count(), expected_nrr);
    }

    fn tiny_indexes() -> Indexes {
        let vocab = parse_vocabulary(
            "R\troot\tA\nA\tmid\tA.1\nB\tmid b\tA.2\nA1\tleaf\tA.1.1\n".as_bytes(),
        )
        .unwrap();
        // Relevant docs share A1; not-relevant docs use B.
        let corpus = parse_corpus(
            "r1\tA1;A\nr2\tA1\nr3\tA1;A\nn1\tB\nn2\tB;R\nn3\tB\n".as_bytes(),
            &vocab,
        )
        .unwrap();
        Indexes::build(vocab, corpus, IcConfig::default(), GraphOptions::default()).unwrap()
    }

    fn tiny_passages() -> Vec<PassageJudgement> {
        vec![
            passage("t", "r1", 2),
            passage("t", "r2", 2),
            passage("t", "r3", 2),
            passage("t", "n1", 0),
            passage("t", "n2", 0),
            passage("t", "n3", 0),
        ]
    }

    #[test]
    fn test1_dominant_measure_reaches_full_delta() {
        let indexes = tiny_indexes();
        let docs = aggregate_judgements(&tiny_passages());
        let topics = filter_topics(&docs, 0.10).unwrap();
        let pairs = enumerate_pairs(&topics);
        // Boudreau: rr pairs share A1 -> positive similarity, nr-r pairs share
        // nothing -> 0.
        let out = run_test1(Measure::Boudreau, &pairs, &indexes).unwrap();
        assert_eq!(out.cliffs_delta, 1.0);
        assert!(out.mean_rr > out.mean_nrr);
    }

    #[test]
    fn test1_distance_orientation_flips_sign() {
        let indexes = tiny_indexes();
        let docs = aggregate_judgements(&tiny_passages());
        let topics = filter_topics(&docs, 0.10).unwrap();
        let pairs = enumerate_pairs(&topics);
        let measure = Measure::Dist {
            weighting: crate::measures::MajorWeighting::Uniform,
            variant: crate::graph::GraphVariant::Unit,
        };
        let out = run_test1(measure, &pairs, &indexes).unwrap();
        // rr pairs are *closer*, so raw means go the other way while the
        // delta stays positive.
        assert!(out.mean_rr < out.mean_nrr);
        assert!(out.cliffs_delta > 0.0);
    }

    /// A distance measure and its negated-as-similarity twin agree on the
    /// effect size: exactly what the internal orientation handling does.
    #[test]
    fn test1_distance_delta_matches_negated_twin() {
        let indexes = tiny_indexes();
        let docs = aggregate_judgements(&tiny_passages());
        let topics = filter_topics(&docs, 0.10).unwrap();
        let pairs = enumerate_pairs(&topics);
        let measure = Measure::Dist {
            weighting: crate::measures::MajorWeighting::Double,
            variant: crate::graph::GraphVariant::DeltaIc,
        };
        let out = run_test1(measure, &pairs, &indexes).unwrap();

        let scorer = PairScorer::new(measure, &indexes).unwrap();
        let (nrr_raw, rr_raw) = score_pair_groups(&scorer, &pairs, &indexes).unwrap();
        let negate = |v: &[f64]| -> Vec<f64> { v.iter().map(|x| -x).collect() };
        let twin = cliffs_delta(&negate(&rr_raw), &negate(&nrr_raw)).unwrap();
        assert_eq!(out.cliffs_delta.to_bits(), twin.to_bits());
    }

    #[test]
    fn test1_missing_document_is_an_error() {
        let indexes = tiny_indexes();
        let docs = aggregate_judgements(&[
            passage("t", "r1", 2),
            passage("t", "ghost", 2),
            passage("t", "n1", 0),
        ]);
        let topics = filter_topics(&docs, 0.10).unwrap();
        let pairs = enumerate_pairs(&topics);
        let err = run_test1(Measure::Boudreau, &pairs, &indexes).unwrap_err();
        assert!(matches!(err, Error::UnknownDocument { .. }));
    }

    #[test]
    fn test2_degenerate_scorer_predicts_nothing() {
        let indexes = tiny_indexes();
        let docs = aggregate_judgements(&tiny_passages());
        let topics = filter_topics(&docs, 0.10).unwrap();
        let constant = |_a: DocIdx, _b: DocIdx| -> Result<f64> { Ok(0.25) };
        let out = classify_topics(&constant, &topics, &indexes, 7, 5, 1).unwrap();
        assert_eq!(out.matrix.true_positives, 0);
        assert_eq!(out.matrix.false_positives, 0);
        assert!(out.matrix.true_negatives > 0);
        assert!(out.matrix.false_negatives > 0);
    }

    #[test]
    fn test2_oracle_scorer_is_perfect() {
        let indexes = tiny_indexes();
        let docs = aggregate_judgements(&tiny_passages());
        let topics = filter_topics(&docs, 0.10).unwrap();
        // Relatedness 1 iff both docs share the expert grade (doc ids encode
        // the grade in this fixture).
        let oracle = {
            let corpus = &indexes.corpus;
            move |a: DocIdx, b: DocIdx| -> Result<f64> {
                let same = corpus.record(a).doc_id.as_bytes()[0]
                    == corpus.record(b).doc_id.as_bytes()[0];
                Ok(if same { 1.0 } else { 0.0 })
            }
        };
        let out = classify_topics(&oracle, &topics, &indexes, 7, 5, 1).unwrap();
        assert_eq!(out.matrix.false_positives, 0);
        assert_eq!(out.matrix.false_negatives, 0);
        assert!(out.matrix.true_positives > 0);
        assert!(out.matrix.true_negatives > 0);
    }

    #[test]
    fn test2_equal_seeds_agree_and_skip_small_topics() {
        let indexes = tiny_indexes();
        let mut passages = tiny_passages();
        passages.push(passage("small", "r1", 2));
        passages.push(passage("small", "n1", 0));
        let docs = aggregate_judgements(&passages);
        let topics = filter_topics(&docs, 0.10).unwrap();
        let a = run_test2(Measure::Boudreau, &topics, &indexes, 42, 5, 2).unwrap();
        let b = run_test2(Measure::Boudreau, &topics, &indexes, 42, 5, 2).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.skipped_topics, ["small"]);
    }

    #[test]
    fn test2_no_eligible_topics_is_an_error() {
        let indexes = tiny_indexes();
        let docs = aggregate_judgements(&tiny_passages());
        let topics = filter_topics(&docs, 0.10).unwrap();
        let err = run_test2(Measure::Boudreau, &topics, &indexes, 42, 5, 50).unwrap_err();
        assert!(matches!(err, Error::NoEligibleTopics { .. }));
    }

    #[test]
    fn judgement_parser_grammar() {
        let text = "# comment\nt1\td1\t2\nt1\td2\t0\n\n";
        let passages = parse_judgements(text.as_bytes()).unwrap();
        assert_eq!(passages.len(), 2);
        assert_eq!(passages[0].grade, Grade::Relevant);

        let bad_grade = parse_judgements("t1\td1\t3\n".as_bytes()).unwrap_err();
        match bad_grade {
            Error::MalformedLine { line, reason } => {
                assert_eq!(line, 1);
                assert!(reason.contains('3'));
            }
            other => panic!("unexpected error {other}"),
        }

        let bad_fields = parse_judgements("t1 d1 2\n".as_bytes()).unwrap_err();
        assert!(matches!(bad_fields, Error::MalformedLine { line: 1, .. }));
    }

    #[test]
    fn benchmark_report_shape_and_determinism() {
        let indexes = tiny_indexes();
        let passages = tiny_passages();
        let config = BenchConfig {
            iterations: 3,
            sample_size: 1,
            ..BenchConfig::default()
        };
        let measures = [Measure::Boudreau];
        let report = run_benchmark(&measures, &indexes, &passages, &config).unwrap();
        assert_eq!(report.rows.len(), 1);
        assert_eq!(report.rr_pairs, 3);
        assert_eq!(report.nrr_pairs, 9);
        let again = run_benchmark(&measures, &indexes, &passages, &config).unwrap();
        assert_eq!(report.to_tsv(), again.to_tsv());
        assert_eq!(report.to_json(), again.to_json());
        assert_eq!(report.histograms_tsv(), again.histograms_tsv());

        let full = run_benchmark(&Measure::ALL, &indexes, &passages, &config).unwrap();
        assert_eq!(full.rows.len(), 10);
        for (row, measure) in full.rows.iter().zip(Measure::ALL) {
            assert_eq!(row.measure, measure);
            assert!(row.precision >= 0.0 && row.recall >= 0.0);
        }
    }

    #[test]
    fn mean_rr_matches_hand_sum() {
        let indexes = tiny_indexes();
        let docs = aggregate_judgements(&tiny_passages());
        let topics = filter_topics(&docs, 0.10).unwrap();
        let pairs = enumerate_pairs(&topics);
        let out = run_test1(Measure::Boudreau, &pairs, &indexes).unwrap();
        // rr pairs: (r1,r2), (r1,r3), (r2,r3) with term sets {A1,A},{A1},{A1,A}.
        let expected = (1.0 / 2.0f64.sqrt() + 2.0 / 2.0 + 1.0 / 2.0f64.sqrt()) / 3.0;
        assert_abs_diff_eq!(out.mean_rr, expected, epsilon = 1e-12);
    }
}
