//! Brute-force reference implementations. Each one recomputes its result
//! from first principles so it shares no code path with the library
//! implementation it is checked against.

use std::collections::BTreeSet;

use vocrel::corpus::PublicationRecord;
use vocrel::ic::{FrequencyTable, IcConfig, IcUniverse};
use vocrel::vocab::{TermIdx, VocabularyIndex};

/// Descendant closure as a literal fixed point: union children sets until
/// nothing changes.
pub fn descendants_fixed_point(vocab: &VocabularyIndex, term: TermIdx) -> Vec<TermIdx> {
    let mut closure: BTreeSet<TermIdx> = vocab.children(term).iter().copied().collect();
    loop {
        let mut grew = false;
        let snapshot: Vec<TermIdx> = closure.iter().copied().collect();
        for t in snapshot {
            for &c in vocab.children(t) {
                grew |= closure.insert(c);
            }
        }
        if !grew {
            return closure.into_iter().collect();
        }
    }
}

/// IC recomputed per term with the closure above; mirrors the defining
/// formula with no shared mass computation.
pub fn ic_bruteforce(
    vocab: &VocabularyIndex,
    freqs: &FrequencyTable,
    config: &IcConfig,
) -> Vec<f64> {
    let n = vocab.len();
    let raw_mass = |t: TermIdx| -> u64 {
        let mut mass = freqs.count(t);
        for d in descendants_fixed_point(vocab, t) {
            mass += freqs.count(d);
        }
        mass
    };
    let mut denominator: u64 = 0;
    for i in 0..n {
        let t = TermIdx(i as u32);
        let include = match config.universe {
            IcUniverse::AllVocabulary => true,
            IcUniverse::Observed => freqs.count(t) > 0,
        };
        if include {
            denominator += raw_mass(t);
        }
    }
    let denominator = denominator.max(1);
    (0..n)
        .map(|i| {
            let mass = raw_mass(TermIdx(i as u32)).max(1);
            let mut ic = -((mass as f64 / denominator as f64).ln());
            if config.log_base != std::f64::consts::E {
                ic /= config.log_base.ln();
            }
            ic.max(0.0)
        })
        .collect()
}

/// All-pairs shortest paths by repeated edge relaxation until a fixed point.
/// `vertex_count` must cover every endpoint in `edges`.
pub fn all_pairs_relaxation(vertex_count: usize, edges: &[(u32, u32, f64)]) -> Vec<Vec<f64>> {
    let mut dist = vec![vec![f64::INFINITY; vertex_count]; vertex_count];
    for (i, row) in dist.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    loop {
        let mut changed = false;
        for row in dist.iter_mut() {
            for &(u, v, w) in edges {
                let (u, v) = (u as usize, v as usize);
                if row[u] + w < row[v] {
                    row[v] = row[u] + w;
                    changed = true;
                }
                if row[v] + w < row[u] {
                    row[u] = row[v] + w;
                    changed = true;
                }
            }
        }
        if !changed {
            return dist;
        }
    }
}

/// Cliff's delta straight from the definition: every cross pair compared.
pub fn cliffs_delta_quadratic(x: &[f64], y: &[f64]) -> f64 {
    let mut signed: i64 = 0;
    for &a in x {
        for &b in y {
            if a > b {
                signed += 1;
            } else if a < b {
                signed -= 1;
            }
        }
    }
    signed as f64 / (x.len() as f64 * y.len() as f64)
}

/// Binary-vector cosine over the full term universe; the closed form the
/// library uses must match this literal version.
pub fn binary_cosine(
    vocab: &VocabularyIndex,
    a: &PublicationRecord,
    b: &PublicationRecord,
) -> f64 {
    let dense = |rec: &PublicationRecord| -> Vec<f64> {
        let mut v = vec![0.0; vocab.len()];
        for ann in rec.annotations() {
            v[ann.term.idx()] = 1.0;
        }
        v
    };
    let va = dense(a);
    let vb = dense(b);
    let dot: f64 = va.iter().zip(&vb).map(|(x, y)| x * y).sum();
    let na: f64 = va.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = vb.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

/// The unweighted distance aggregation written out literally: sum of each
/// side's minimum cross distances over the pooled term count.
pub fn unweighted_min_distance_mean<D>(a: &[TermIdx], b: &[TermIdx], mut dist: D) -> f64
where
    D: FnMut(TermIdx, TermIdx) -> f64,
{
    let min_to = |from: TermIdx, others: &[TermIdx], dist: &mut D| -> f64 {
        others
            .iter()
            .map(|&o| dist(from, o))
            .fold(f64::INFINITY, f64::min)
    };
    let mut total = 0.0;
    for &m in a {
        total += min_to(m, b, &mut dist);
    }
    for &m in b {
        total += min_to(m, a, &mut dist);
    }
    total / (a.len() + b.len()) as f64
}
