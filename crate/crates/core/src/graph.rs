//! Term graphs and shortest-path distances.
//!
//! Both graph variants share the same topology: one vertex per term, one
//! undirected edge per derived parent-child pair, and (by default) a virtual
//! root tying the otherwise disjoint top-level category trees together so
//! every distance is finite. The unit variant weighs every edge 1; the
//! IC-difference variant weighs an edge by the absolute IC difference of its
//! endpoints, with the virtual root acting as a term of IC 0.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ic::IcTable;
use crate::vocab::{TermIdx, VocabularyIndex};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GraphVariant {
    /// Every edge has weight 1.
    Unit,
    /// Edge weight is the absolute IC difference of the endpoints.
    DeltaIc,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphOptions {
    /// Connect all parentless terms through a virtual root. Without it,
    /// distances across disjoint categories are errors.
    pub virtual_root: bool,
}

impl Default for GraphOptions {
    fn default() -> Self {
        Self { virtual_root: true }
    }
}

/// Weighted undirected term graph with shortest-path queries.
#[derive(Debug, Clone)]
pub struct TermGraph {
    variant: GraphVariant,
    /// Adjacency per vertex; vertex `term_count` is the virtual root.
    adj: Vec<Vec<(u32, f64)>>,
    term_count: u32,
    virtual_root: Option<u32>,
}

/// Builds the graph for one variant. `ic` must be present iff the variant is
/// [`GraphVariant::DeltaIc`].
pub fn build_graph(
    vocab: &VocabularyIndex,
    variant: GraphVariant,
    ic: Option<&IcTable>,
    options: GraphOptions,
) -> Result<TermGraph> {
    let ic = match (variant, ic) {
        (GraphVariant::DeltaIc, None) => return Err(Error::MissingIcTable),
        (GraphVariant::DeltaIc, Some(t)) => Some(t),
        (GraphVariant::Unit, _) => None,
    };

    let n = vocab.len();
    let vertex_count = if options.virtual_root { n + 1 } else { n };
    let mut adj: Vec<Vec<(u32, f64)>> = vec![Vec::new(); vertex_count];

    for c in 0..n {
        let child = TermIdx(c as u32);
        for &p in vocab.parents(child) {
            let weight = match ic {
                None => 1.0,
                Some(table) => (table.ic(p) - table.ic(child)).abs(),
            };
            adj[p.idx()].push((c as u32, weight));
            adj[c].push((p.0, weight));
        }
    }

    let virtual_root = options.virtual_root.then_some(n as u32);
    if let Some(vr) = virtual_root {
        // Attach every parentless term, not just declared roots, so the
        // connectivity guarantee survives inputs with unresolvable prefixes.
        for t in 0..n {
            if vocab.parents(TermIdx(t as u32)).is_empty() {
                let weight = match ic {
                    None => 1.0,
                    Some(table) => table.ic(TermIdx(t as u32)),
                };
                adj[vr as usize].push((t as u32, weight));
                adj[t].push((vr, weight));
            }
        }
    }

    Ok(TermGraph {
        variant,
        adj,
        term_count: n as u32,
        virtual_root,
    })
}

/// Memo of completed single-source shortest-path runs, keyed by source term.
/// Cached vectors equal a fresh computation bit-for-bit; concurrent inserts
/// of the same source are idempotent.
#[derive(Debug, Default)]
pub struct DistanceCache {
    memo: RwLock<HashMap<u32, Arc<Vec<f64>>>>,
}

impl DistanceCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.memo.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn get(&self, source: u32) -> Option<Arc<Vec<f64>>> {
        self.memo.read().unwrap().get(&source).cloned()
    }

    fn insert(&self, source: u32, dist: Vec<f64>) -> Arc<Vec<f64>> {
        let mut memo = self.memo.write().unwrap();
        memo.entry(source).or_insert_with(|| Arc::new(dist)).clone()
    }
}

struct HeapEntry {
    dist: f64,
    vertex: u32,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.dist == other.dist && self.vertex == other.vertex
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reversed: BinaryHeap is a max-heap, we want the smallest distance.
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl TermGraph {
    pub fn variant(&self) -> GraphVariant {
        self.variant
    }

    pub fn term_count(&self) -> u32 {
        self.term_count
    }

    pub fn has_virtual_root(&self) -> bool {
        self.virtual_root.is_some()
    }

    /// Undirected edges as (vertex, vertex, weight) with the lower vertex
    /// first; the virtual root appears as vertex `term_count`.
    pub fn edges(&self) -> Vec<(u32, u32, f64)> {
        let mut out = Vec::new();
        for (u, neighbours) in self.adj.iter().enumerate() {
            for &(v, w) in neighbours {
                if (u as u32) < v {
                    out.push((u as u32, v, w));
                }
            }
        }
        out.sort_by_key(|e| (e.0, e.1));
        out
    }

    /// Full single-source Dijkstra. Zero-weight edges are legal; all weights
    /// are non-negative by construction.
    fn shortest_paths_from(&self, source: u32) -> Vec<f64> {
        let mut dist = vec![f64::INFINITY; self.adj.len()];
        let mut heap = BinaryHeap::new();
        dist[source as usize] = 0.0;
        heap.push(HeapEntry {
            dist: 0.0,
            vertex: source,
        });
        while let Some(HeapEntry { dist: d, vertex: u }) = heap.pop() {
            if d > dist[u as usize] {
                continue;
            }
            for &(v, w) in &self.adj[u as usize] {
                let next = d + w;
                if next < dist[v as usize] {
                    dist[v as usize] = next;
                    heap.push(HeapEntry {
                        dist: next,
                        vertex: v,
                    });
                }
            }
        }
        dist
    }

    /// The full single-source run for `source`, computed once and shared.
    pub(crate) fn cached_run(&self, cache: &DistanceCache, source: TermIdx) -> Result<Arc<Vec<f64>>> {
        self.check_term(source)?;
        if let Some(hit) = cache.get(source.0) {
            return Ok(hit);
        }
        let run = self.shortest_paths_from(source.0);
        Ok(cache.insert(source.0, run))
    }

    fn check_term(&self, t: TermIdx) -> Result<()> {
        if t.0 < self.term_count {
            Ok(())
        } else {
            Err(Error::UnknownTerm {
                id: format!("#{}", t.0),
            })
        }
    }

    /// Shortest-path distance between two terms. Symmetric by construction:
    /// the run always starts from the lower-indexed endpoint, so both
    /// argument orders read the same cached value.
    pub fn distance(&self, cache: &DistanceCache, a: TermIdx, b: TermIdx) -> Result<f64> {
        self.check_term(a)?;
        self.check_term(b)?;
        if a == b {
            return Ok(0.0);
        }
        let (s, t) = if a.0 <= b.0 { (a, b) } else { (b, a) };
        let run = self.cached_run(cache, s)?;
        let d = run[t.idx()];
        if d.is_finite() {
            Ok(d)
        } else {
            Err(Error::Unreachable {
                a: format!("#{}", a.0),
                b: format!("#{}", b.0),
            })
        }
    }

    /// Batch form of [`Self::distance`]: distances from `source` to each
    /// target, in target order. Values equal `distance(source, target)`
    /// exactly, including the canonical-endpoint rule.
    pub fn single_source(
        &self,
        cache: &DistanceCache,
        source: TermIdx,
        targets: &[TermIdx],
    ) -> Result<Vec<(TermIdx, f64)>> {
        targets
            .iter()
            .map(|&t| self.distance(cache, source, t).map(|d| (t, d)))
            .collect()
    }
}
