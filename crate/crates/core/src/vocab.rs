//! Controlled-vocabulary terms and the hierarchy derived from tree numbers.
//!
//! A term carries one or more dotted tree numbers ("C14.280.383"); parenthood
//! is derived purely from tree-number prefixes: `a` is a parent of `b` iff
//! some tree number of `b`, truncated by one segment, is a tree number of `a`.
//! Terms with several tree numbers can therefore have several parents.

use std::collections::HashMap;
use std::fmt;
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Position of a term in the hierarchy, e.g. `C14.280.383`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TreeNumber {
    segments: Vec<String>,
}

impl TreeNumber {
    /// Parses a dotted tree number. Every segment must be non-empty ASCII
    /// alphanumeric.
    pub fn parse(text: &str) -> Result<Self, String> {
        if text.is_empty() {
            return Err("empty tree number".into());
        }
        let segments: Vec<String> = text.split('.').map(str::to_owned).collect();
        for seg in &segments {
            if seg.is_empty() {
                return Err(format!("tree number `{text}` has an empty segment"));
            }
            if !seg.bytes().all(|b| b.is_ascii_alphanumeric()) {
                return Err(format!("tree number `{text}` has a non-alphanumeric segment"));
            }
        }
        Ok(Self { segments })
    }

    pub fn segments(&self) -> &[String] {
        &self.segments
    }

    /// The same tree number minus its last segment; `None` for single-segment
    /// (top-of-category) numbers.
    pub fn parent(&self) -> Option<TreeNumber> {
        if self.segments.len() < 2 {
            return None;
        }
        Some(Self {
            segments: self.segments[..self.segments.len() - 1].to_vec(),
        })
    }

    pub fn is_top_level(&self) -> bool {
        self.segments.len() == 1
    }
}

impl fmt::Display for TreeNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.segments.join("."))
    }
}

impl std::str::FromStr for TreeNumber {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::parse(s)
    }
}

/// One vocabulary term: unique id, display name, and its tree numbers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub id: String,
    pub name: String,
    /// Sorted, deduplicated, never empty.
    tree_numbers: Vec<TreeNumber>,
}

impl Term {
    pub fn new(
        id: impl Into<String>,
        name: impl Into<String>,
        mut tree_numbers: Vec<TreeNumber>,
    ) -> Result<Self> {
        let id = id.into();
        tree_numbers.sort();
        tree_numbers.dedup();
        if tree_numbers.is_empty() {
            return Err(Error::EmptyTreeNumbers { id });
        }
        Ok(Self {
            id,
            name: name.into(),
            tree_numbers,
        })
    }

    pub fn tree_numbers(&self) -> &[TreeNumber] {
        &self.tree_numbers
    }
}

/// Dense handle for a term inside one [`VocabularyIndex`]. Indices follow the
/// lexicographic order of term ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TermIdx(pub u32);

impl TermIdx {
    #[inline]
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

/// Immutable term table plus the parent/child relation derived from
/// tree-number prefixes.
#[derive(Debug, Clone, PartialEq)]
pub struct VocabularyIndex {
    terms: Vec<Term>,
    by_id: HashMap<String, TermIdx>,
    by_tree_number: HashMap<TreeNumber, TermIdx>,
    parents: Vec<Vec<TermIdx>>,
    children: Vec<Vec<TermIdx>>,
    roots: Vec<TermIdx>,
}

impl VocabularyIndex {
    /// Builds the index, deriving hierarchy relations and checking all
    /// invariants (unique ids, globally unique tree numbers, acyclicity).
    pub fn new(mut terms: Vec<Term>) -> Result<Self> {
        terms.sort_by(|a, b| a.id.cmp(&b.id));

        let mut by_id = HashMap::with_capacity(terms.len());
        for (i, term) in terms.iter().enumerate() {
            if by_id.insert(term.id.clone(), TermIdx(i as u32)).is_some() {
                return Err(Error::DuplicateTermId { id: term.id.clone() });
            }
        }

        let mut by_tree_number = HashMap::new();
        for (i, term) in terms.iter().enumerate() {
            for tn in term.tree_numbers() {
                if let Some(prev) = by_tree_number.insert(tn.clone(), TermIdx(i as u32)) {
                    return Err(Error::DuplicateTreeNumber {
                        tree_number: tn.to_string(),
                        first: terms[prev.idx()].id.clone(),
                        second: term.id.clone(),
                    });
                }
            }
        }

        let mut parents: Vec<Vec<TermIdx>> = vec![Vec::new(); terms.len()];
        let mut children: Vec<Vec<TermIdx>> = vec![Vec::new(); terms.len()];
        for (i, term) in terms.iter().enumerate() {
            for tn in term.tree_numbers() {
                if let Some(parent_tn) = tn.parent() {
                    if let Some(&p) = by_tree_number.get(&parent_tn) {
                        parents[i].push(p);
                        children[p.idx()].push(TermIdx(i as u32));
                    }
                }
            }
        }
        for list in parents.iter_mut().chain(children.iter_mut()) {
            list.sort();
            list.dedup();
        }

        let roots: Vec<TermIdx> = terms
            .iter()
            .enumerate()
            .filter(|(_, t)| t.tree_numbers().iter().any(TreeNumber::is_top_level))
            .map(|(i, _)| TermIdx(i as u32))
            .collect();

        let index = Self {
            terms,
            by_id,
            by_tree_number,
            parents,
            children,
            roots,
        };
        if let Some(idx) = index.find_cycle() {
            return Err(Error::HierarchyCycle {
                id: index.terms[idx.idx()].id.clone(),
            });
        }
        Ok(index)
    }

    /// Iterative three-color DFS over the child relation; returns a vertex on
    /// a cycle, if any.
    fn find_cycle(&self) -> Option<TermIdx> {
        const WHITE: u8 = 0;
        const GRAY: u8 = 1;
        const BLACK: u8 = 2;
        let n = self.terms.len();
        let mut color = vec![WHITE; n];
        let mut stack: Vec<(usize, usize)> = Vec::new();
        for start in 0..n {
            if color[start] != WHITE {
                continue;
            }
            color[start] = GRAY;
            stack.push((start, 0));
            while let Some(&mut (v, ref mut next)) = stack.last_mut() {
                if *next < self.children[v].len() {
                    let c = self.children[v][*next].idx();
                    *next += 1;
                    match color[c] {
                        WHITE => {
                            color[c] = GRAY;
                            stack.push((c, 0));
                        }
                        GRAY => return Some(TermIdx(c as u32)),
                        _ => {}
                    }
                } else {
                    color[v] = BLACK;
                    stack.pop();
                }
            }
        }
        None
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn term(&self, idx: TermIdx) -> &Term {
        &self.terms[idx.idx()]
    }

    pub fn resolve(&self, id: &str) -> Option<TermIdx> {
        self.by_id.get(id).copied()
    }

    pub fn require(&self, id: &str) -> Result<TermIdx> {
        self.resolve(id).ok_or_else(|| Error::UnknownTerm { id: id.to_owned() })
    }

    /// The term owning a tree number, if any.
    pub fn by_tree_number(&self, tn: &TreeNumber) -> Option<TermIdx> {
        self.by_tree_number.get(tn).copied()
    }

    pub fn parents(&self, idx: TermIdx) -> &[TermIdx] {
        &self.parents[idx.idx()]
    }

    pub fn children(&self, idx: TermIdx) -> &[TermIdx] {
        &self.children[idx.idx()]
    }

    /// Terms with at least one single-segment tree number.
    pub fn roots(&self) -> &[TermIdx] {
        &self.roots
    }

    /// All transitive descendants of `idx`, sorted, excluding `idx` itself.
    /// Each descendant appears once even when reachable through several tree
    /// numbers.
    pub fn descendants_of(&self, idx: TermIdx) -> Vec<TermIdx> {
        let mut seen = vec![false; self.terms.len()];
        let mut stack: Vec<TermIdx> = self.children[idx.idx()].to_vec();
        let mut out = Vec::new();
        while let Some(v) = stack.pop() {
            if seen[v.idx()] {
                continue;
            }
            seen[v.idx()] = true;
            out.push(v);
            stack.extend_from_slice(&self.children[v.idx()]);
        }
        out.sort();
        out
    }

    /// Id-based wrapper around [`Self::descendants_of`].
    pub fn descendants_of_id(&self, id: &str) -> Result<Vec<&str>> {
        let idx = self.require(id)?;
        Ok(self
            .descendants_of(idx)
            .into_iter()
            .map(|d| self.terms[d.idx()].id.as_str())
            .collect())
    }

    /// Canonical text form: one term per line, `id<TAB>name<TAB>tn(;tn)*`,
    /// terms and tree numbers sorted. Re-parsing yields an identical index.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for term in &self.terms {
            let tns: Vec<String> = term.tree_numbers().iter().map(|t| t.to_string()).collect();
            out.push_str(&term.id);
            out.push('\t');
            out.push_str(&term.name);
            out.push('\t');
            out.push_str(&tns.join(";"));
            out.push('\n');
        }
        out
    }
}

/// Parses the vocabulary file format: one term per line,
/// `id<TAB>name<TAB>tree_number(;tree_number)*`. Lines starting with `#` and
/// blank lines are skipped.
pub fn parse_vocabulary<R: BufRead>(reader: R) -> Result<VocabularyIndex> {
    let mut terms = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = lineno + 1;
        let trimmed = line.trim_end_matches(['\r', '\n']);
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.split('\t');
        let (id, name, tns) = match (fields.next(), fields.next(), fields.next(), fields.next()) {
            (Some(id), Some(name), Some(tns), None) => (id, name, tns),
            _ => {
                return Err(Error::MalformedLine {
                    line: lineno,
                    reason: "expected 3 tab-separated fields: id, name, tree numbers".into(),
                })
            }
        };
        if id.is_empty() || id.contains(ILLEGAL_ID_CHARS) {
            return Err(Error::MalformedLine {
                line: lineno,
                reason: format!("invalid term id `{id}`"),
            });
        }
        if tns.is_empty() {
            return Err(Error::EmptyTreeNumbers { id: id.to_owned() });
        }
        let mut tree_numbers = Vec::new();
        for tok in tns.split(';') {
            let tn = TreeNumber::parse(tok)
                .map_err(|reason| Error::MalformedLine { line: lineno, reason })?;
            tree_numbers.push(tn);
        }
        terms.push(Term::new(id, name, tree_numbers)?);
    }
    VocabularyIndex::new(terms)
}

/// Characters that would collide with the corpus entry syntax.
pub(crate) const ILLEGAL_ID_CHARS: &[char] = &[';', '/', ',', '*', ' '];

#[cfg(test)]
mod tests {
    use super::*;

    fn toy5() -> VocabularyIndex {
        let input = "\
# toy hierarchy
R\troot term\tA
A\tmid term\tA.1
B\tother mid\tA.2
A1\tleaf\tA.1.1
";
        parse_vocabulary(input.as_bytes()).unwrap()
    }

    fn ids(vocab: &VocabularyIndex, idxs: &[TermIdx]) -> Vec<String> {
        idxs.iter().map(|&i| vocab.term(i).id.clone()).collect()
    }

    #[test]
    fn prefix_rule_derives_parents_and_roots() {
        let vocab = toy5();
        let a1 = vocab.resolve("A1").unwrap();
        let a = vocab.resolve("A").unwrap();
        let b = vocab.resolve("B").unwrap();
        let r = vocab.resolve("R").unwrap();
        assert_eq!(vocab.parents(a1), &[a]);
        assert_eq!(vocab.parents(a), &[r]);
        assert_eq!(vocab.parents(b), &[r]);
        assert_eq!(vocab.parents(r), &[]);
        assert_eq!(vocab.roots(), &[r]);
        assert_eq!(ids(&vocab, vocab.children(r)), ["A", "B"]);
    }

    #[test]
    fn multiple_tree_numbers_give_multiple_parents() {
        let input = "\
RA\troot a\tA
RB\troot b\tB
PA\tparent a\tA.1
PB\tparent b\tB.3
X\tdual\tA.1.2;B.3.1
";
        let vocab = parse_vocabulary(input.as_bytes()).unwrap();
        let x = vocab.resolve("X").unwrap();
        assert_eq!(ids(&vocab, vocab.parents(x)), ["PA", "PB"]);
    }

    #[test]
    fn duplicate_tree_number_rejected() {
        let input = "X\tx\tA.1\nY\ty\tA.1\n";
        let err = parse_vocabulary(input.as_bytes()).unwrap_err();
        assert!(matches!(err, Error::DuplicateTreeNumber { .. }), "{err}");
    }

    #[test]
    fn duplicate_id_rejected() {
        let input = "X\tx\tA.1\nX\tother\tA.2\n";
        let err = parse_vocabulary(input.as_bytes()).unwrap_err();
        assert!(matches!(err, Error::DuplicateTermId { .. }), "{err}");
    }

    #[test]
    fn empty_tree_numbers_rejected() {
        let input = "X\tx\t\n";
        let err = parse_vocabulary(input.as_bytes()).unwrap_err();
        assert!(matches!(err, Error::EmptyTreeNumbers { .. }), "{err}");
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let input = "R\troot\tA\njust one field\n";
        let err = parse_vocabulary(input.as_bytes()).unwrap_err();
        match err {
            Error::MalformedLine { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn cycle_via_multiple_tree_numbers_rejected() {
        // X owns A.1 and sits under B.2; Y owns B.2 and sits under A.1: a 2-cycle.
        let input = "\
RA\troot a\tA
RB\troot b\tB
X\tone\tA.1;B.2.9
Y\ttwo\tB.2;A.1.5
";
        let err = parse_vocabulary(input.as_bytes()).unwrap_err();
        assert!(matches!(err, Error::HierarchyCycle { .. }), "{err}");
    }

    #[test]
    fn descendants_closure() {
        let vocab = toy5();
        let r = vocab.resolve("R").unwrap();
        let a1 = vocab.resolve("A1").unwrap();
        assert_eq!(ids(&vocab, &vocab.descendants_of(r)), ["A", "A1", "B"]);
        assert!(vocab.descendants_of(a1).is_empty());
    }

    #[test]
    fn descendants_reachable_via_two_trees_counted_once() {
        let input = "\
RA\troot a\tA
RB\troot b\tB
X\tdual parent\tA.1;B.2
C1\tchild one\tA.1.1
C2\tchild two\tB.2.1
";
        let vocab = parse_vocabulary(input.as_bytes()).unwrap();
        let x = vocab.resolve("X").unwrap();
        assert_eq!(ids(&vocab, &vocab.descendants_of(x)), ["C1", "C2"]);
    }

    #[test]
    fn serialization_round_trips() {
        let vocab = toy5();
        let reparsed = parse_vocabulary(vocab.to_tsv().as_bytes()).unwrap();
        assert_eq!(vocab, reparsed);
    }

    #[test]
    fn parent_child_mutually_consistent() {
        let vocab = toy5();
        for i in 0..vocab.len() {
            let i = TermIdx(i as u32);
            for &c in vocab.children(i) {
                assert!(vocab.parents(c).contains(&i));
            }
            for &p in vocab.parents(i) {
                assert!(vocab.children(p).contains(&i));
            }
        }
    }
}
