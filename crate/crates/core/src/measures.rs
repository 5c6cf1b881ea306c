//! The ten publication-relatedness measures.
//!
//! Two co-occurrence cosines:
//!
//! * `boudreau` — cosine of binary term vectors, which reduces to
//!   `|Ta ∩ Tb| / sqrt(|Ta|·|Tb|)`.
//! * `ahlgren` — cosine of sparse vectors holding each term's IC (doubled
//!   when the term is major) plus a binary entry per (term, qualifier) pair.
//!
//! Eight distance aggregations `dist{w}:{unit|dic}` for w in 0..=3: the sum
//! over both records of each term's distance to the nearest term on the other
//! side, weighted by `w` for major terms (weight 1 for minor), divided by the
//! total weight. `w = 0` instead restricts both sides to their major terms.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::corpus::PublicationRecord;
use crate::error::{Error, Result};
use crate::graph::{DistanceCache, GraphVariant, TermGraph};
use crate::ic::IcTable;
use crate::index::Indexes;
use crate::vocab::TermIdx;

/// How a score reads: similarities grow with relatedness and live in [0, 1];
/// distances shrink with relatedness and are non-negative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Similarity,
    Distance,
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Orientation::Similarity => write!(f, "similarity"),
            Orientation::Distance => write!(f, "distance"),
        }
    }
}

/// Major-term weighting of the distance aggregation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MajorWeighting {
    /// w = 0: use only major terms on both sides.
    MajorOnly,
    /// w = 1: every term weighs 1.
    Uniform,
    /// w = 2 for major terms.
    Double,
    /// w = 3 for major terms.
    Triple,
}

impl MajorWeighting {
    pub const ALL: [MajorWeighting; 4] = [
        MajorWeighting::MajorOnly,
        MajorWeighting::Uniform,
        MajorWeighting::Double,
        MajorWeighting::Triple,
    ];

    /// The weight applied to a major term; minor terms always weigh 1.
    pub fn major_weight(self) -> f64 {
        match self {
            MajorWeighting::MajorOnly | MajorWeighting::Uniform => 1.0,
            MajorWeighting::Double => 2.0,
            MajorWeighting::Triple => 3.0,
        }
    }

    pub fn digit(self) -> u8 {
        match self {
            MajorWeighting::MajorOnly => 0,
            MajorWeighting::Uniform => 1,
            MajorWeighting::Double => 2,
            MajorWeighting::Triple => 3,
        }
    }
}

/// One of the ten measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Measure {
    Boudreau,
    Ahlgren,
    Dist {
        weighting: MajorWeighting,
        variant: GraphVariant,
    },
}

impl Measure {
    /// All ten measures in report order: the IC-weighted distances, the
    /// unit-weight distances, then the two cosines.
    pub const ALL: [Measure; 10] = [
        Measure::Dist { weighting: MajorWeighting::Uniform, variant: GraphVariant::DeltaIc },
        Measure::Dist { weighting: MajorWeighting::Double, variant: GraphVariant::DeltaIc },
        Measure::Dist { weighting: MajorWeighting::Triple, variant: GraphVariant::DeltaIc },
        Measure::Dist { weighting: MajorWeighting::MajorOnly, variant: GraphVariant::DeltaIc },
        Measure::Dist { weighting: MajorWeighting::Uniform, variant: GraphVariant::Unit },
        Measure::Dist { weighting: MajorWeighting::Double, variant: GraphVariant::Unit },
        Measure::Dist { weighting: MajorWeighting::Triple, variant: GraphVariant::Unit },
        Measure::Dist { weighting: MajorWeighting::MajorOnly, variant: GraphVariant::Unit },
        Measure::Ahlgren,
        Measure::Boudreau,
    ];

    pub fn orientation(self) -> Orientation {
        match self {
            Measure::Boudreau | Measure::Ahlgren => Orientation::Similarity,
            Measure::Dist { .. } => Orientation::Distance,
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Measure::Boudreau => write!(f, "boudreau"),
            Measure::Ahlgren => write!(f, "ahlgren"),
            Measure::Dist { weighting, variant } => {
                let graph = match variant {
                    GraphVariant::Unit => "unit",
                    GraphVariant::DeltaIc => "dic",
                };
                write!(f, "dist{}:{}", weighting.digit(), graph)
            }
        }
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "boudreau" => return Ok(Measure::Boudreau),
            "ahlgren" => return Ok(Measure::Ahlgren),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("dist") {
            if let Some((digit, graph)) = rest.split_once(':') {
                let weighting = match digit {
                    "0" => Some(MajorWeighting::MajorOnly),
                    "1" => Some(MajorWeighting::Uniform),
                    "2" => Some(MajorWeighting::Double),
                    "3" => Some(MajorWeighting::Triple),
                    _ => None,
                };
                let variant = match graph {
                    "unit" => Some(GraphVariant::Unit),
                    "dic" => Some(GraphVariant::DeltaIc),
                    _ => None,
                };
                if let (Some(weighting), Some(variant)) = (weighting, variant) {
                    return Ok(Measure::Dist { weighting, variant });
                }
            }
        }
        Err(Error::UnknownMeasure(s.to_owned()))
    }
}

impl Serialize for Measure {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Degenerate inputs a measure handles by convention instead of erroring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Degeneracy {
    /// An IC-weighted vector had zero magnitude; the cosine is reported as 0.
    ZeroMagnitudeVector,
    /// A record had no major terms; the major-only distance fell back to the
    /// record's full term set.
    NoMajorTerms,
}

/// A relatedness value tagged with how to read it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RelatednessScore {
    pub value: f64,
    pub orientation: Orientation,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degeneracy: Option<Degeneracy>,
}

impl RelatednessScore {
    fn similarity(value: f64) -> Self {
        Self {
            value: value.clamp(0.0, 1.0),
            orientation: Orientation::Similarity,
            degeneracy: None,
        }
    }

    /// The score with higher-is-more-related reading: similarities unchanged,
    /// distances negated.
    pub fn oriented(self) -> f64 {
        match self.orientation {
            Orientation::Similarity => self.value,
            Orientation::Distance => -self.value,
        }
    }
}

/// Cosine of binary term vectors, reduced to its set-overlap closed form.
pub fn sim_boudreau(a: &PublicationRecord, b: &PublicationRecord) -> RelatednessScore {
    boudreau_from_sets(&a.term_set(), &b.term_set())
}

fn boudreau_from_sets(ta: &[TermIdx], tb: &[TermIdx]) -> RelatednessScore {
    let shared = sorted_intersection_len(ta, tb);
    let value = shared as f64 / ((ta.len() as f64) * (tb.len() as f64)).sqrt();
    RelatednessScore::similarity(value)
}

fn sorted_intersection_len(a: &[TermIdx], b: &[TermIdx]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Sparse coordinate key: `(term, 0)` is the term's IC coordinate and
/// `(term, q + 1)` the binary coordinate for qualifier `q` on that term. The
/// layout is deterministic given the vocabulary and qualifier universe.
type Coord = (u32, u32);

/// Sparse publication vector over the combined term / term-qualifier space.
/// Only nonzero entries are stored, sorted by coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVector {
    entries: Vec<(Coord, f64)>,
}

impl SparseVector {
    pub fn entries(&self) -> &[(Coord, f64)] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn dot(&self, other: &SparseVector) -> f64 {
        let (mut i, mut j) = (0, 0);
        let mut acc = 0.0;
        while i < self.entries.len() && j < other.entries.len() {
            match self.entries[i].0.cmp(&other.entries[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += self.entries[i].1 * other.entries[j].1;
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    pub fn norm_squared(&self) -> f64 {
        self.entries.iter().map(|&(_, v)| v * v).sum()
    }
}

/// Builds a record's IC-weighted vector: the term coordinate carries IC
/// (doubled for major terms), each (term, qualifier) coordinate carries 1.
/// Qualifier coordinates stay binary regardless of major status.
pub fn ahlgren_vector(record: &PublicationRecord, ic: &IcTable) -> SparseVector {
    let mut entries = Vec::new();
    for ann in record.annotations() {
        let weight = ic.ic(ann.term) * if ann.major { 2.0 } else { 1.0 };
        if weight != 0.0 {
            entries.push(((ann.term.0, 0), weight));
        }
        for &q in &ann.qualifiers {
            entries.push(((ann.term.0, q.0 + 1), 1.0));
        }
    }
    // Annotations are sorted by term and qualifiers within; entries arrive
    // sorted already.
    debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
    SparseVector { entries }
}

/// Cosine of the two IC-weighted vectors. A zero-magnitude vector yields
/// similarity 0 with a [`Degeneracy::ZeroMagnitudeVector`] tag instead of an
/// error.
pub fn sim_ahlgren(
    a: &PublicationRecord,
    b: &PublicationRecord,
    ic: &IcTable,
) -> RelatednessScore {
    let va = ahlgren_vector(a, ic);
    let vb = ahlgren_vector(b, ic);
    sim_ahlgren_from_vectors(&va, &vb)
}

pub(crate) fn sim_ahlgren_from_vectors(va: &SparseVector, vb: &SparseVector) -> RelatednessScore {
    if va.is_zero() || vb.is_zero() {
        return RelatednessScore {
            value: 0.0,
            orientation: Orientation::Similarity,
            degeneracy: Some(Degeneracy::ZeroMagnitudeVector),
        };
    }
    let value = va.dot(vb) / (va.norm_squared() * vb.norm_squared()).sqrt();
    RelatednessScore::similarity(value)
}

/// One record's terms prepared for distance aggregation: per-term weights
/// and the term's full single-source distance row, prefetched so scoring a
/// pair is lock-free.
struct DistSide {
    terms: Vec<TermIdx>,
    weights: Vec<f64>,
    rows: Vec<Arc<Vec<f64>>>,
    degenerate: bool,
}

impl DistSide {
    fn prepare(
        record: &PublicationRecord,
        graph: &TermGraph,
        cache: &DistanceCache,
        weighting: MajorWeighting,
    ) -> Result<Self> {
        let (terms, weights, degenerate) = match weighting {
            MajorWeighting::MajorOnly => {
                let majors = record.major_term_set();
                let degenerate = majors.is_empty();
                let terms = if degenerate { record.term_set() } else { majors };
                let weights = vec![1.0; terms.len()];
                (terms, weights, degenerate)
            }
            _ => {
                let terms = record.term_set();
                let w = weighting.major_weight();
                let weights = record
                    .annotations()
                    .iter()
                    .map(|ann| if ann.major { w } else { 1.0 })
                    .collect();
                (terms, weights, false)
            }
        };
        let rows = terms
            .iter()
            .map(|&t| graph.cached_run(cache, t))
            .collect::<Result<_>>()?;
        Ok(Self {
            terms,
            weights,
            rows,
            degenerate,
        })
    }
}

/// Nearest-term aggregation over two prepared sides. Distances between a
/// term pair always come from the lower-indexed term's row, which keeps the
/// result exactly symmetric in the two records.
fn dist_between(a: &DistSide, b: &DistSide) -> Result<RelatednessScore> {
    let side = |from: &DistSide, to: &DistSide| -> Result<(f64, f64)> {
        let mut weighted_sum = 0.0;
        let mut weight_sum = 0.0;
        for (i, &m) in from.terms.iter().enumerate() {
            let mut best = f64::INFINITY;
            for (j, &o) in to.terms.iter().enumerate() {
                let d = if m.0 <= o.0 {
                    from.rows[i][o.idx()]
                } else {
                    to.rows[j][m.idx()]
                };
                if d < best {
                    best = d;
                }
            }
            if !best.is_finite() {
                return Err(Error::Unreachable {
                    a: format!("#{}", m.0),
                    b: "the other record's terms".into(),
                });
            }
            weighted_sum += best * from.weights[i];
            weight_sum += from.weights[i];
        }
        Ok((weighted_sum, weight_sum))
    };
    let (sum_a, weights_a) = side(a, b)?;
    let (sum_b, weights_b) = side(b, a)?;
    let value = (sum_a + sum_b) / (weights_a + weights_b);
    Ok(RelatednessScore {
        value,
        orientation: Orientation::Distance,
        degeneracy: (a.degenerate || b.degenerate).then_some(Degeneracy::NoMajorTerms),
    })
}

/// Weighted aggregation of term distances into a publication distance.
///
/// For w in {1, 2, 3}: each term contributes its distance to the nearest term
/// of the other record, weighted by `w` when major; the total is divided by
/// the total weight. For w = 0 the aggregation runs unweighted over the major
/// subsets; a record without major terms falls back to its full term set and
/// tags the score [`Degeneracy::NoMajorTerms`].
pub fn dist_weighted(
    a: &PublicationRecord,
    b: &PublicationRecord,
    graph: &TermGraph,
    cache: &DistanceCache,
    weighting: MajorWeighting,
) -> Result<RelatednessScore> {
    let side_a = DistSide::prepare(a, graph, cache, weighting)?;
    let side_b = DistSide::prepare(b, graph, cache, weighting)?;
    dist_between(&side_a, &side_b)
}

/// Uniform dispatch over the ten measures.
pub fn compute(
    measure: Measure,
    a: &PublicationRecord,
    b: &PublicationRecord,
    indexes: &Indexes,
) -> Result<RelatednessScore> {
    match measure {
        Measure::Boudreau => Ok(sim_boudreau(a, b)),
        Measure::Ahlgren => Ok(sim_ahlgren(a, b, &indexes.ic)),
        Measure::Dist { weighting, variant } => {
            let (graph, cache) = indexes.graph(variant);
            dist_weighted(a, b, graph, cache, weighting)
        }
    }
}

enum Prepared {
    Boudreau { term_sets: Vec<Vec<TermIdx>> },
    Ahlgren { vectors: Vec<SparseVector> },
    Dist { sides: Vec<DistSide> },
}

/// A measure prepared against every document of the index bundle: vectors,
/// term sets, and distance rows are built once, so scoring a pair is cheap
/// and lock-free. Scoring is pure and thread-safe, and agrees bit-for-bit
/// with [`compute`].
pub struct PairScorer<'a> {
    measure: Measure,
    _indexes: &'a Indexes,
    prepared: Prepared,
}

impl<'a> PairScorer<'a> {
    pub fn new(measure: Measure, indexes: &'a Indexes) -> Result<Self> {
        let records = indexes.corpus.records();
        let prepared = match measure {
            Measure::Boudreau => Prepared::Boudreau {
                term_sets: records.iter().map(|r| r.term_set()).collect(),
            },
            Measure::Ahlgren => Prepared::Ahlgren {
                vectors: records
                    .iter()
                    .map(|r| ahlgren_vector(r, &indexes.ic))
                    .collect(),
            },
            Measure::Dist { weighting, variant } => {
                let (graph, cache) = indexes.graph(variant);
                // Warm the distinct sources in parallel before the per-record
                // preparation clones their rows.
                let mut sources: Vec<TermIdx> =
                    records.iter().flat_map(|r| r.term_set()).collect();
                sources.sort();
                sources.dedup();
                sources
                    .par_iter()
                    .try_for_each(|&t| graph.cached_run(cache, t).map(|_| ()))?;
                Prepared::Dist {
                    sides: records
                        .iter()
                        .map(|r| DistSide::prepare(r, graph, cache, weighting))
                        .collect::<Result<_>>()?,
                }
            }
        };
        Ok(Self {
            measure,
            _indexes: indexes,
            prepared,
        })
    }

    pub fn measure(&self) -> Measure {
        self.measure
    }

    pub fn score(&self, a: crate::corpus::DocIdx, b: crate::corpus::DocIdx) -> Result<RelatednessScore> {
        match &self.prepared {
            Prepared::Boudreau { term_sets } => {
                Ok(boudreau_from_sets(&term_sets[a.idx()], &term_sets[b.idx()]))
            }
            Prepared::Ahlgren { vectors } => {
                Ok(sim_ahlgren_from_vectors(&vectors[a.idx()], &vectors[b.idx()]))
            }
            Prepared::Dist { sides } => dist_between(&sides[a.idx()], &sides[b.idx()]),
        }
    }
}
