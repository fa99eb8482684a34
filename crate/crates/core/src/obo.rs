//! Minimal OBO 1.2 reader and writer.
//!
//! Only `[Term]` stanzas are read, and within them only `id`, `name`,
//! `namespace`, `is_a` and `is_obsolete`. Other stanza types and tags
//! (including `relationship: part_of`) are skipped.

use std::fmt::Write as _;
use std::io::BufRead;

use crate::error::{Error, Result};
use crate::ontology::{BuildReport, Namespace, Ontology, TermEntry};

pub fn parse_obo<R: BufRead>(reader: R) -> Result<(Ontology, BuildReport)> {
    let mut builder = Ontology::builder();
    // (entry, line where the stanza opened)
    let mut current: Option<(TermEntry, usize, bool)> = None;

    fn finish(
        builder: &mut crate::ontology::OntologyBuilder,
        current: &mut Option<(TermEntry, usize, bool)>,
    ) -> Result<()> {
        if let Some((entry, line, has_id)) = current.take() {
            if !has_id {
                return Err(Error::parse(line, "[Term] stanza without an id"));
            }
            builder.entry(entry);
        }
        Ok(())
    }

    let mut in_term = false;
    for (n, line) in reader.lines().enumerate() {
        let lineno = n + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('!') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let Some(name) = rest.strip_suffix(']') else {
                return Err(Error::parse(lineno, format!("unterminated stanza header {line:?}")));
            };
            finish(&mut builder, &mut current)?;
            in_term = name.trim() == "Term";
            if in_term {
                current = Some((TermEntry::default(), lineno, false));
            }
            continue;
        }
        let Some((tag, value)) = line.split_once(':') else {
            return Err(Error::parse(lineno, format!("expected `tag: value`, got {line:?}")));
        };
        let tag = tag.trim();
        if tag.is_empty() {
            return Err(Error::parse(lineno, "empty tag"));
        }
        if !in_term {
            continue;
        }
        let (entry, _, has_id) = current.as_mut().expect("inside a term stanza");
        let value = value.trim();
        match tag {
            "id" => {
                if *has_id {
                    return Err(Error::parse(lineno, "second id in one stanza"));
                }
                let id = first_token(value);
                if id.is_empty() {
                    return Err(Error::parse(lineno, "empty id"));
                }
                entry.id = id.to_string();
                *has_id = true;
            }
            "name" => entry.name = value.to_string(),
            "namespace" => entry.namespace = Namespace::from_obo(first_token(value)),
            "is_a" => {
                let parent = first_token(value);
                if parent.is_empty() {
                    return Err(Error::parse(lineno, "empty is_a"));
                }
                entry.parents.push(parent.to_string());
            }
            "is_obsolete" => entry.obsolete = first_token(value) == "true",
            _ => {}
        }
    }
    finish(&mut builder, &mut current)?;
    builder.build_with_report()
}

/// Value up to the first whitespace, trailing `! comment` or `{modifier}`.
fn first_token(value: &str) -> &str {
    value
        .split(|c: char| c.is_whitespace() || c == '!' || c == '{')
        .next()
        .unwrap_or("")
}

pub fn parse_obo_str(text: &str) -> Result<(Ontology, BuildReport)> {
    parse_obo(text.as_bytes())
}

/// Serializes an ontology as OBO text; terms and parents in id order.
pub fn write_obo(ontology: &Ontology) -> String {
    let mut out = String::from("format-version: 1.2\n");
    for t in ontology.terms() {
        out.push_str("\n[Term]\n");
        let _ = writeln!(out, "id: {}", t.id);
        if !t.name.is_empty() {
            let _ = writeln!(out, "name: {}", t.name);
        }
        let ns = t.namespace.as_obo();
        if !ns.is_empty() {
            let _ = writeln!(out, "namespace: {ns}");
        }
        for &p in &t.parents {
            let _ = writeln!(out, "is_a: {}", ontology.id(p));
        }
    }
    out
}
