//! Annotation corpora: `protein <TAB> species <TAB> term` rows.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::io::BufRead;

use crate::error::{Error, Result};
use crate::ontology::{Annotation, Namespace, Ontology};

/// All proteins of one species, from a single namespace.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeciesCorpus {
    species: String,
    annotations: Vec<Annotation>,
}

impl SpeciesCorpus {
    pub fn new(ontology: &Ontology, species: impl Into<String>, annotations: Vec<Annotation>) -> Result<Self> {
        let species = species.into();
        if annotations.is_empty() {
            return Err(Error::Parameter(format!("species {species} has no annotated proteins")));
        }
        let mut ns: Option<&Namespace> = None;
        for a in &annotations {
            if a.terms().iter().any(|t| t >= ontology.len()) || !ontology.is_closed(a.terms()) {
                return Err(Error::Inconsistent(a.protein.clone()));
            }
            if let Some(this) = ontology.namespace_of(a.terms())? {
                match ns {
                    Some(prev) if prev != this => {
                        return Err(Error::Namespace(format!(
                            "species {species} mixes {prev} and {this}"
                        )))
                    }
                    _ => ns = Some(this),
                }
            }
        }
        Ok(SpeciesCorpus {
            species,
            annotations,
        })
    }

    pub fn species(&self) -> &str {
        &self.species
    }

    pub fn annotations(&self) -> &[Annotation] {
        &self.annotations
    }

    pub fn len(&self) -> usize {
        self.annotations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.annotations.is_empty()
    }
}

/// Reads a corpus, propagating each protein's terms to consistency.
///
/// Rows whose term is unknown fail with their line number. With a
/// `namespace` filter, rows for terms of other namespaces are skipped.
/// Proteins keep their order of first appearance.
pub fn read_corpus<R: BufRead>(
    reader: R,
    ontology: &Ontology,
    namespace: Option<&Namespace>,
) -> Result<Vec<Annotation>> {
    let mut order: Vec<String> = Vec::new();
    let mut rows: HashMap<String, (String, Vec<usize>)> = HashMap::new();
    for (n, line) in reader.lines().enumerate() {
        let lineno = n + 1;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        let [protein, species, term] = fields[..] else {
            return Err(Error::parse(lineno, format!("expected 3 fields, got {}", fields.len())));
        };
        if protein.is_empty() || species.is_empty() {
            return Err(Error::parse(lineno, "empty protein or species id"));
        }
        let t = ontology
            .index_of(term)
            .ok_or_else(|| Error::parse(lineno, format!("unknown term {term}")))?;
        if namespace.is_some_and(|ns| &ontology.term(t).namespace != ns) {
            continue;
        }
        match rows.get_mut(protein) {
            Some((sp, terms)) => {
                if sp != species {
                    return Err(Error::parse(
                        lineno,
                        format!("protein {protein} listed under species {sp} and {species}"),
                    ));
                }
                terms.push(t);
            }
            None => {
                order.push(protein.to_string());
                rows.insert(protein.to_string(), (species.to_string(), vec![t]));
            }
        }
    }
    order
        .into_iter()
        .map(|protein| {
            let (species, terms) = rows.remove(&protein).expect("recorded protein");
            let closed = ontology.close(&terms.into_iter().collect());
            Annotation::new(ontology, protein, species, closed)
        })
        .collect()
}

/// One row per (protein, term) over the full consistent term sets.
pub fn write_corpus(ontology: &Ontology, annotations: &[Annotation]) -> String {
    let mut out = String::new();
    for a in annotations {
        for id in ontology.ids(a.terms()) {
            let _ = writeln!(out, "{}\t{}\t{}", a.protein, a.species, id);
        }
    }
    out
}

/// Groups annotations by species, ordered by species id.
pub fn group_by_species(ontology: &Ontology, annotations: Vec<Annotation>) -> Result<Vec<SpeciesCorpus>> {
    let mut groups: BTreeMap<String, Vec<Annotation>> = BTreeMap::new();
    for a in annotations {
        groups.entry(a.species.clone()).or_default().push(a);
    }
    groups
        .into_iter()
        .map(|(species, anns)| SpeciesCorpus::new(ontology, species, anns))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ontology::tests::diamond;

    #[test]
    fn reads_and_propagates() {
        let o = diamond();
        let text = "# comment\np1\tHS\tC\np2\tHS\tA\np1\tHS\tA\n\np3\tMM\tR\n";
        let anns = read_corpus(text.as_bytes(), &o, None).unwrap();
        assert_eq!(anns.len(), 3);
        assert_eq!(anns[0].protein, "p1");
        assert_eq!(o.ids(anns[0].terms()).collect::<Vec<_>>(), ["A", "B", "C", "R"]);
        let groups = group_by_species(&o, anns).unwrap();
        assert_eq!(groups.iter().map(|g| g.species()).collect::<Vec<_>>(), ["HS", "MM"]);
        assert_eq!(groups[0].len(), 2);
    }

    #[test]
    fn unknown_term_reports_row() {
        let o = diamond();
        let err = read_corpus("p1\tHS\tC\np2\tHS\tNOPE\n".as_bytes(), &o, None).unwrap_err();
        assert_eq!(err, Error::parse(2, "unknown term NOPE"));
        let err = read_corpus("p1\tHS\n".as_bytes(), &o, None).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = read_corpus("p1\tHS\tA\np1\tMM\tB\n".as_bytes(), &o, None).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn write_read_round_trip() {
        let o = diamond();
        let anns = read_corpus("p1\tHS\tC\np2\tMM\tB\n".as_bytes(), &o, None).unwrap();
        let again = read_corpus(write_corpus(&o, &anns).as_bytes(), &o, None).unwrap();
        assert_eq!(anns, again);
    }

    #[test]
    fn namespace_filter() {
        let text = "[Term]\nid: M\nnamespace: molecular_function\n\n[Term]\nid: P\nnamespace: biological_process\n";
        let (o, _) = crate::obo::parse_obo_str(text).unwrap();
        let rows = "x\tS\tM\nx\tS\tP\ny\tS\tP\n";
        assert_eq!(read_corpus(rows.as_bytes(), &o, None).unwrap_err().code(), "E-NAMESPACE");
        let only = read_corpus(rows.as_bytes(), &o, Some(&Namespace::Bpo)).unwrap();
        assert_eq!(only.len(), 2);
    }

    #[test]
    fn empty_species_rejected() {
        let o = diamond();
        assert!(SpeciesCorpus::new(&o, "X", vec![]).is_err());
    }
}
