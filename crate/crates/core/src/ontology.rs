//! Ontology DAG, term sets and consistent annotations.
//!
//! Terms are stored sorted by id, so a term's index doubles as its rank in
//! the canonical (lexicographic) ordering. [`TermSet`] keeps indices sorted,
//! which makes every set operation a linear merge and every serialization
//! deterministic.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TermId(String);

impl TermId {
    pub fn new(id: impl Into<String>) -> Result<Self> {
        let id = id.into();
        if id.trim().is_empty() {
            return Err(Error::Parameter("term id must be non-empty".into()));
        }
        Ok(TermId(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for TermId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for TermId {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// Gene Ontology sub-ontology, or anything else for generic DAGs.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Namespace {
    Mfo,
    Bpo,
    Cco,
    Other(String),
}

impl Namespace {
    pub fn from_obo(s: &str) -> Self {
        match s.trim() {
            "molecular_function" | "MFO" => Namespace::Mfo,
            "biological_process" | "BPO" => Namespace::Bpo,
            "cellular_component" | "CCO" => Namespace::Cco,
            other => Namespace::Other(other.to_string()),
        }
    }

    pub fn as_obo(&self) -> &str {
        match self {
            Namespace::Mfo => "molecular_function",
            Namespace::Bpo => "biological_process",
            Namespace::Cco => "cellular_component",
            Namespace::Other(s) => s,
        }
    }
}

impl Default for Namespace {
    fn default() -> Self {
        Namespace::Other(String::new())
    }
}

impl fmt::Display for Namespace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_obo())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub id: TermId,
    pub name: String,
    pub namespace: Namespace,
    /// Parent indices, ascending.
    pub parents: Vec<usize>,
}

/// A set of terms of one ontology, held as ascending term indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TermSet(Vec<usize>);

impl TermSet {
    pub fn new() -> Self {
        TermSet(Vec::new())
    }

    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Self {
        let mut v: Vec<usize> = indices.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        TermSet(v)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, idx: usize) -> bool {
        self.0.binary_search(&idx).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn union(&self, other: &TermSet) -> TermSet {
        let mut out = Vec::with_capacity(self.len() + other.len());
        merge_walk(&self.0, &other.0, |t, _| out.push(t));
        TermSet(out)
    }

    pub fn intersection(&self, other: &TermSet) -> TermSet {
        let mut out = Vec::new();
        merge_walk(&self.0, &other.0, |t, side| {
            if side == Side::Both {
                out.push(t)
            }
        });
        TermSet(out)
    }

    /// Terms of `self` absent from `other`.
    pub fn difference(&self, other: &TermSet) -> TermSet {
        let mut out = Vec::new();
        merge_walk(&self.0, &other.0, |t, side| {
            if side == Side::Left {
                out.push(t)
            }
        });
        TermSet(out)
    }

    pub fn is_subset(&self, other: &TermSet) -> bool {
        self.0.iter().all(|&t| other.contains(t))
    }
}

impl FromIterator<usize> for TermSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        TermSet::from_indices(iter)
    }
}

/// Which operand(s) of a sorted merge an element came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Side {
    Left,
    Right,
    Both,
}

/// Walks two ascending slices in lockstep, reporting each distinct element once.
#[inline]
pub(crate) fn merge_walk(a: &[usize], b: &[usize], mut visit: impl FnMut(usize, Side)) {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                visit(a[i], Side::Left);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                visit(b[j], Side::Right);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                visit(a[i], Side::Both);
                i += 1;
                j += 1;
            }
        }
    }
    for &t in &a[i..] {
        visit(t, Side::Left);
    }
    for &t in &b[j..] {
        visit(t, Side::Right);
    }
}

/// Counts reported while assembling an ontology from raw stanzas.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildReport {
    /// Parent references to unknown or obsolete terms that were discarded.
    pub dropped_edges: usize,
    pub dropped_obsolete: usize,
}

/// Raw term description fed to [`OntologyBuilder`].
#[derive(Debug, Clone, Default)]
pub struct TermEntry {
    pub id: String,
    pub name: String,
    pub namespace: Namespace,
    pub parents: Vec<String>,
    pub obsolete: bool,
}

#[derive(Debug, Default)]
pub struct OntologyBuilder {
    entries: Vec<TermEntry>,
}

impl OntologyBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn entry(&mut self, entry: TermEntry) -> &mut Self {
        self.entries.push(entry);
        self
    }

    /// Convenience for hand-built DAGs: a live term with the given parents.
    pub fn term(&mut self, id: &str, parents: &[&str]) -> &mut Self {
        self.entry(TermEntry {
            id: id.to_string(),
            name: id.to_string(),
            parents: parents.iter().map(|p| p.to_string()).collect(),
            ..Default::default()
        })
    }

    pub fn build(self) -> Result<Ontology> {
        self.build_with_report().map(|(o, _)| o)
    }

    pub fn build_with_report(self) -> Result<(Ontology, BuildReport)> {
        let mut report = BuildReport::default();
        let mut live: Vec<TermEntry> = Vec::with_capacity(self.entries.len());
        for e in self.entries {
            if e.obsolete {
                report.dropped_obsolete += 1;
            } else {
                TermId::new(e.id.clone())?;
                live.push(e);
            }
        }
        live.sort_by(|a, b| a.id.cmp(&b.id));
        for w in live.windows(2) {
            if w[0].id == w[1].id {
                return Err(Error::DuplicateTerm(w[0].id.clone()));
            }
        }
        let index: HashMap<String, usize> = live
            .iter()
            .enumerate()
            .map(|(i, e)| (e.id.clone(), i))
            .collect();

        let mut terms = Vec::with_capacity(live.len());
        for e in live {
            let mut parents = BTreeSet::new();
            for p in &e.parents {
                match index.get(p) {
                    Some(&pi) => {
                        parents.insert(pi);
                    }
                    None => report.dropped_edges += 1,
                }
            }
            terms.push(Term {
                id: TermId(e.id),
                name: e.name,
                namespace: e.namespace,
                parents: parents.into_iter().collect(),
            });
        }
        if report.dropped_edges > 0 {
            log::warn!(
                "dropped {} parent reference(s) to unknown or obsolete terms",
                report.dropped_edges
            );
        }
        Ok((Ontology::from_terms(terms, index)?, report))
    }
}

/// Immutable DAG of terms with parent edges.
#[derive(Debug, Clone)]
pub struct Ontology {
    terms: Vec<Term>,
    index: HashMap<String, usize>,
    children: Vec<Vec<usize>>,
    roots: Vec<usize>,
    topo: Vec<usize>,
}

impl PartialEq for Ontology {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl Ontology {
    pub fn builder() -> OntologyBuilder {
        OntologyBuilder::new()
    }

    fn from_terms(terms: Vec<Term>, index: HashMap<String, usize>) -> Result<Self> {
        let n = terms.len();
        let mut children = vec![Vec::new(); n];
        for (i, t) in terms.iter().enumerate() {
            for &p in &t.parents {
                children[p].push(i);
            }
        }
        let roots: Vec<usize> = (0..n).filter(|&i| terms[i].parents.is_empty()).collect();

        // Kahn's algorithm, always releasing the smallest ready index
        let mut pending: Vec<usize> = terms.iter().map(|t| t.parents.len()).collect();
        let mut ready: BTreeSet<usize> = roots.iter().copied().collect();
        let mut topo = Vec::with_capacity(n);
        while let Some(v) = ready.pop_first() {
            topo.push(v);
            for &c in &children[v] {
                pending[c] -= 1;
                if pending[c] == 0 {
                    ready.insert(c);
                }
            }
        }
        if topo.len() < n {
            // every unreleased term has an unreleased parent; walking parents
            // must revisit a term, and that term lies on a cycle
            let start = (0..n).find(|&i| pending[i] > 0).expect("unreleased term");
            let mut seen = vec![false; n];
            let mut v = start;
            while !seen[v] {
                seen[v] = true;
                v = *terms[v]
                    .parents
                    .iter()
                    .find(|&&p| pending[p] > 0)
                    .expect("unreleased parent");
            }
            return Err(Error::Cycle(terms[v].id.to_string()));
        }
        Ok(Ontology {
            terms,
            index,
            children,
            roots,
            topo,
        })
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

    pub fn term(&self, idx: usize) -> &Term {
        &self.terms[idx]
    }

    pub fn id(&self, idx: usize) -> &str {
        self.terms[idx].id.as_str()
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn resolve(&self, id: &str) -> Result<usize> {
        self.index_of(id)
            .ok_or_else(|| Error::UnknownTerm(id.to_string()))
    }

    pub fn parents(&self, idx: usize) -> &[usize] {
        &self.terms[idx].parents
    }

    pub fn children(&self, idx: usize) -> &[usize] {
        &self.children[idx]
    }

    /// Terms with no parents, ascending.
    pub fn roots(&self) -> &[usize] {
        &self.roots
    }

    pub fn is_root(&self, idx: usize) -> bool {
        self.terms[idx].parents.is_empty()
    }

    /// Every term once, parents before children.
    pub fn topo_order(&self) -> &[usize] {
        &self.topo
    }

    pub fn ids<'a>(&'a self, set: &'a TermSet) -> impl Iterator<Item = &'a str> + 'a {
        set.iter().map(move |i| self.id(i))
    }

    /// Ancestor closure of a set of term indices.
    pub fn close(&self, seeds: &TermSet) -> TermSet {
        let mut seen = vec![false; self.len()];
        let mut stack: Vec<usize> = seeds.iter().collect();
        let mut out = Vec::new();
        while let Some(v) = stack.pop() {
            if seen[v] {
                continue;
            }
            seen[v] = true;
            out.push(v);
            stack.extend(self.terms[v].parents.iter().copied().filter(|&p| !seen[p]));
        }
        TermSet::from_indices(out)
    }

    /// True iff every parent of every member is also a member.
    pub fn is_closed(&self, set: &TermSet) -> bool {
        set.iter()
            .all(|t| self.terms[t].parents.iter().all(|&p| set.contains(p)))
    }

    pub fn resolve_all<S: AsRef<str>>(&self, ids: &[S]) -> Result<TermSet> {
        ids.iter()
            .map(|s| self.resolve(s.as_ref()))
            .collect::<Result<Vec<_>>>()
            .map(TermSet::from_indices)
    }

    /// Leaves plus all their ancestors.
    pub fn propagate<S: AsRef<str>>(&self, leaves: &[S]) -> Result<TermSet> {
        Ok(self.close(&self.resolve_all(leaves)?))
    }

    /// Whether the given terms already form a consistent subgraph.
    pub fn is_consistent<S: AsRef<str>>(&self, terms: &[S]) -> Result<bool> {
        Ok(self.is_closed(&self.resolve_all(terms)?))
    }

    /// The single namespace shared by all members, `None` for the empty set.
    pub fn namespace_of(&self, set: &TermSet) -> Result<Option<&Namespace>> {
        let mut it = set.iter().map(|t| &self.terms[t].namespace);
        let Some(first) = it.next() else {
            return Ok(None);
        };
        for ns in it {
            if ns != first {
                return Err(Error::Namespace(format!("{first} and {ns}")));
            }
        }
        Ok(Some(first))
    }

    /// Rejects pairs of annotations drawn from different namespaces.
    pub fn check_same_namespace(&self, a: &TermSet, b: &TermSet) -> Result<()> {
        match (self.namespace_of(a)?, self.namespace_of(b)?) {
            (Some(x), Some(y)) if x != y => Err(Error::Namespace(format!("{x} and {y}"))),
            _ => Ok(()),
        }
    }
}

/// One protein's functional annotation: a consistent term set.
#[derive(Debug, Clone, PartialEq)]
pub struct Annotation {
    pub protein: String,
    pub species: String,
    terms: TermSet,
}

impl Annotation {
    /// Validates consistency and single-namespace membership.
    pub fn new(
        ontology: &Ontology,
        protein: impl Into<String>,
        species: impl Into<String>,
        terms: TermSet,
    ) -> Result<Self> {
        let protein = protein.into();
        if terms.iter().any(|t| t >= ontology.len()) {
            return Err(Error::UnknownTerm(format!("index out of range in {protein}")));
        }
        if !ontology.is_closed(&terms) {
            return Err(Error::Inconsistent(protein));
        }
        ontology
            .namespace_of(&terms)
            .map_err(|e| Error::Namespace(format!("protein {protein}: {e}")))?;
        Ok(Annotation {
            protein,
            species: species.into(),
            terms,
        })
    }

    /// Propagates the given ids to consistency before constructing.
    pub fn from_ids<S: AsRef<str>>(
        ontology: &Ontology,
        protein: impl Into<String>,
        species: impl Into<String>,
        ids: &[S],
    ) -> Result<Self> {
        let terms = ontology.propagate(ids)?;
        Self::new(ontology, protein, species, terms)
    }

    pub fn terms(&self) -> &TermSet {
        &self.terms
    }
}
