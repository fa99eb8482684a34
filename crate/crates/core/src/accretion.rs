//! Information accretion: `ia(v) = -log P(v | all parents of v present)`.
//!
//! Conditionals are estimated by counting over a corpus of consistent
//! annotations, one count per protein. Roots are present in every
//! annotation of their namespace, so `P(root) = 1` and `ia(root) = 0`.
//!
//! The information content of a consistent subgraph is the sum of the
//! accretion of its terms.

use std::fmt::Write as _;
use std::io::BufRead;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ontology::{Annotation, Ontology, TermId, TermSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum LogBase {
    #[default]
    Two,
    E,
}

impl LogBase {
    fn ln_base(self) -> f64 {
        match self {
            LogBase::Two => std::f64::consts::LN_2,
            LogBase::E => 1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LogBase::Two => "2",
            LogBase::E => "e",
        }
    }
}

impl FromStr for LogBase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "2" => Ok(LogBase::Two),
            "e" | "E" => Ok(LogBase::E),
            other => Err(Error::Parameter(format!("log base must be 2 or e, got {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermCounts {
    /// Annotations containing every parent of the term (all annotations for roots).
    pub parents_present: u64,
    pub term_present: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccretionEntry {
    pub ia: f64,
    pub counts: TermCounts,
}

/// Per-term accretion values, aligned with the indices of one ontology.
#[derive(Debug, Clone, PartialEq)]
pub struct AccretionTable {
    ids: Vec<TermId>,
    entries: Vec<Option<AccretionEntry>>,
    smoothing: f64,
    log_base: LogBase,
}

impl AccretionTable {
    /// Builds a table from explicit accretion values (`None` = no entry).
    /// Values must be non-negative and roots must carry zero.
    pub fn from_values(ontology: &Ontology, ia: &[Option<f64>], log_base: LogBase) -> Result<Self> {
        if ia.len() != ontology.len() {
            return Err(Error::Parameter(format!(
                "expected {} accretion values, got {}",
                ontology.len(),
                ia.len()
            )));
        }
        let mut entries = Vec::with_capacity(ia.len());
        for (t, v) in ia.iter().copied().enumerate() {
            if let Some(v) = v {
                check_value(ontology, t, v)?;
            }
            entries.push(v.map(|ia| AccretionEntry {
                ia,
                counts: TermCounts::default(),
            }));
        }
        Ok(AccretionTable {
            ids: ontology.terms().iter().map(|t| t.id.clone()).collect(),
            entries,
            smoothing: 0.0,
            log_base,
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn smoothing(&self) -> f64 {
        self.smoothing
    }

    pub fn log_base(&self) -> LogBase {
        self.log_base
    }

    pub fn entry(&self, idx: usize) -> Option<&AccretionEntry> {
        self.entries.get(idx).and_then(Option::as_ref)
    }

    pub fn ia(&self, idx: usize) -> Result<f64> {
        self.entry(idx).map(|e| e.ia).ok_or_else(|| {
            let id = self.ids.get(idx).map_or_else(|| format!("#{idx}"), |t| t.to_string());
            Error::MissingAccretion(id)
        })
    }

    pub(crate) fn term_id(&self, idx: usize) -> &str {
        self.ids[idx].as_str()
    }

    /// Terms whose accretion is infinite (never observed with zero smoothing).
    pub fn infinite_terms(&self) -> Vec<&str> {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, e)| e.is_some_and(|e| e.ia.is_infinite()))
            .map(|(i, _)| self.ids[i].as_str())
            .collect()
    }

    /// Dense accretion vector for a fast path; fails on the first term in
    /// `used` without an entry.
    pub(crate) fn dense_for(&self, used: impl IntoIterator<Item = usize>) -> Result<Vec<f64>> {
        for t in used {
            self.ia(t)?;
        }
        Ok(self
            .entries
            .iter()
            .map(|e| e.map_or(f64::NAN, |e| e.ia))
            .collect())
    }

    /// TSV with `#log_base` and `#smoothing` header lines, then
    /// `term_id, ia, term_present, parents_present` per term.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "#log_base\t{}", self.log_base.as_str());
        let _ = writeln!(out, "#smoothing\t{}", self.smoothing);
        for (id, e) in self.ids.iter().zip(&self.entries) {
            if let Some(e) = e {
                let _ = writeln!(
                    out,
                    "{id}\t{}\t{}\t{}",
                    e.ia, e.counts.term_present, e.counts.parents_present
                );
            }
        }
        out
    }

    pub fn read_tsv<R: BufRead>(reader: R, ontology: &Ontology) -> Result<Self> {
        let mut log_base = None;
        let mut smoothing = None;
        let mut entries = vec![None; ontology.len()];
        for (n, line) in reader.lines().enumerate() {
            let lineno = n + 1;
            let line = line?;
            let line = line.trim_end_matches(['\r', '\n']);
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if let Some(key) = fields[0].strip_prefix('#') {
                let value = fields
                    .get(1)
                    .ok_or_else(|| Error::parse(lineno, format!("header {key} has no value")))?;
                match key {
                    "log_base" => log_base = Some(value.parse::<LogBase>()?),
                    "smoothing" => {
                        smoothing = Some(value.trim().parse::<f64>().map_err(|_| {
                            Error::parse(lineno, format!("bad smoothing {value:?}"))
                        })?)
                    }
                    _ => {}
                }
                continue;
            }
            if fields.len() != 4 {
                return Err(Error::parse(lineno, format!("expected 4 fields, got {}", fields.len())));
            }
            let t = ontology
                .index_of(fields[0])
                .ok_or_else(|| Error::parse(lineno, format!("unknown term {}", fields[0])))?;
            let num = |s: &str| -> Result<u64> {
                s.trim()
                    .parse()
                    .map_err(|_| Error::parse(lineno, format!("bad count {s:?}")))
            };
            let ia: f64 = fields[1]
                .trim()
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad ia {:?}", fields[1])))?;
            check_value(ontology, t, ia).map_err(|e| Error::parse(lineno, e.to_string()))?;
            entries[t] = Some(AccretionEntry {
                ia,
                counts: TermCounts {
                    term_present: num(fields[2])?,
                    parents_present: num(fields[3])?,
                },
            });
        }
        Ok(AccretionTable {
            ids: ontology.terms().iter().map(|t| t.id.clone()).collect(),
            entries,
            smoothing: smoothing.ok_or_else(|| Error::parse(0, "missing #smoothing header"))?,
            log_base: log_base.ok_or_else(|| Error::parse(0, "missing #log_base header"))?,
        })
    }
}

fn check_value(ontology: &Ontology, t: usize, ia: f64) -> Result<()> {
    if ia.is_nan() || ia < 0.0 {
        return Err(Error::Domain(format!("ia({}) = {ia} is negative", ontology.id(t))));
    }
    if ontology.is_root(t) && ia != 0.0 {
        return Err(Error::Domain(format!("root {} must have ia = 0", ontology.id(t))));
    }
    Ok(())
}

/// Counts presence of every term and of its full parent set over `corpus`.
pub fn count_terms(ontology: &Ontology, corpus: &[&TermSet]) -> Vec<TermCounts> {
    let n = ontology.len();
    let mut counts = corpus
        .par_iter()
        .fold(
            || (vec![TermCounts::default(); n], vec![false; n], Vec::new()),
            |(mut acc, mut member, mut candidates), f| {
                for t in f.iter() {
                    member[t] = true;
                }
                for t in f.iter() {
                    acc[t].term_present += 1;
                    candidates.extend_from_slice(ontology.children(t));
                }
                candidates.sort_unstable();
                candidates.dedup();
                for &c in &candidates {
                    if ontology.parents(c).iter().all(|&p| member[p]) {
                        acc[c].parents_present += 1;
                    }
                }
                for t in f.iter() {
                    member[t] = false;
                }
                candidates.clear();
                (acc, member, candidates)
            },
        )
        .map(|(acc, _, _)| acc)
        .reduce(
            || vec![TermCounts::default(); n],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    x.parents_present += y.parents_present;
                    x.term_present += y.term_present;
                }
                a
            },
        );
    for &r in ontology.roots() {
        counts[r].parents_present = corpus.len() as u64;
    }
    counts
}

/// Smoothed conditional `(present + s) / (parents_present + 2s)`.
///
/// Returns `None` when the estimate is 0/0 (never observed, no smoothing).
pub fn conditional(counts: TermCounts, smoothing: f64) -> Option<f64> {
    let num = counts.term_present as f64 + smoothing;
    let den = counts.parents_present as f64 + 2.0 * smoothing;
    if den == 0.0 {
        None
    } else {
        Some(num / den)
    }
}

/// Estimates an accretion table from a corpus of consistent annotations.
pub fn estimate_accretion(
    ontology: &Ontology,
    corpus: &[Annotation],
    smoothing: f64,
    log_base: LogBase,
) -> Result<AccretionTable> {
    if !(smoothing >= 0.0 && smoothing.is_finite()) {
        return Err(Error::Parameter(format!("smoothing must be >= 0, got {smoothing}")));
    }
    for a in corpus {
        if a.terms().iter().any(|t| t >= ontology.len()) || !ontology.is_closed(a.terms()) {
            return Err(Error::Inconsistent(a.protein.clone()));
        }
    }
    let sets: Vec<&TermSet> = corpus.iter().map(Annotation::terms).collect();
    let counts = count_terms(ontology, &sets);
    let ln_base = log_base.ln_base();
    let entries: Vec<Option<AccretionEntry>> = counts
        .into_iter()
        .enumerate()
        .map(|(t, c)| {
            let ia = if ontology.is_root(t) {
                0.0
            } else {
                match conditional(c, smoothing) {
                    Some(p) if p > 0.0 => (-p.ln() / ln_base).max(0.0),
                    _ => f64::INFINITY,
                }
            };
            Some(AccretionEntry { ia, counts: c })
        })
        .collect();
    let table = AccretionTable {
        ids: ontology.terms().iter().map(|t| t.id.clone()).collect(),
        entries,
        smoothing,
        log_base,
    };
    let inf = table.infinite_terms();
    if !inf.is_empty() {
        log::warn!("{} term(s) have infinite accretion (never observed)", inf.len());
    }
    Ok(table)
}

/// `i(F)`: summed accretion of the terms of `f`.
pub fn information_content(table: &AccretionTable, f: &TermSet) -> Result<f64> {
    f.iter().map(|t| table.ia(t)).sum()
}
