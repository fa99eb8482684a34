//! Remaining uncertainty, misinformation and the semantic distances between
//! consistent annotations.
//!
//! For annotations `F` and `G`, `mi(F, G)` sums the accretion of `F - G` and
//! `ru(F, G)` sums the accretion of `G - F`; the semantic distance combines
//! the two with a p-norm, and its normalized form divides by the accretion of
//! `F ∪ G` (zero over zero is zero).

use serde::{Deserialize, Serialize};

use crate::accretion::AccretionTable;
use crate::error::Result;
use crate::ontology::{merge_walk, Side, TermSet};
use crate::param::PParam;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RuMi {
    pub ru: f64,
    pub mi: f64,
}

/// Accretion sums over `F - G`, `G - F` and `F ∩ G`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub(crate) struct Split {
    pub only_f: f64,
    pub only_g: f64,
    pub shared: f64,
}

impl Split {
    #[inline]
    pub(crate) fn of(ia: &[f64], f: &[usize], g: &[usize]) -> Split {
        let mut s = Split::default();
        merge_walk(f, g, |t, side| match side {
            Side::Left => s.only_f += ia[t],
            Side::Right => s.only_g += ia[t],
            Side::Both => s.shared += ia[t],
        });
        s
    }

    #[inline]
    pub(crate) fn distance(self, p: PParam) -> f64 {
        p.combine(self.only_g, self.only_f)
    }

    #[inline]
    pub(crate) fn normalized(self, p: PParam) -> f64 {
        let den = self.only_f + self.only_g + self.shared;
        if den == 0.0 {
            0.0
        } else {
            self.distance(p) / den
        }
    }
}

fn split(table: &AccretionTable, f: &TermSet, g: &TermSet) -> Result<Split> {
    let mut s = Split::default();
    let mut err = None;
    merge_walk(f.as_slice(), g.as_slice(), |t, side| {
        if err.is_some() {
            return;
        }
        match table.ia(t) {
            Ok(v) => match side {
                Side::Left => s.only_f += v,
                Side::Right => s.only_g += v,
                Side::Both => s.shared += v,
            },
            Err(e) => err = Some(e),
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(s),
    }
}

pub fn ru_mi(table: &AccretionTable, f: &TermSet, g: &TermSet) -> Result<RuMi> {
    let s = split(table, f, g)?;
    Ok(RuMi {
        ru: s.only_g,
        mi: s.only_f,
    })
}

pub fn semantic_distance(table: &AccretionTable, f: &TermSet, g: &TermSet, p: PParam) -> Result<f64> {
    let p = p.validate()?;
    Ok(split(table, f, g)?.distance(p))
}

pub fn semantic_distance_normalized(
    table: &AccretionTable,
    f: &TermSet,
    g: &TermSet,
    p: PParam,
) -> Result<f64> {
    let p = p.validate()?;
    Ok(split(table, f, g)?.normalized(p))
}

/// Which of the two semantic distances to use when comparing proteins.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub enum SemanticMetric {
    #[default]
    Normalized,
    Unnormalized,
}

impl SemanticMetric {
    #[inline]
    pub(crate) fn eval_dense(self, ia: &[f64], f: &[usize], g: &[usize], p: PParam) -> f64 {
        let s = Split::of(ia, f, g);
        match self {
            SemanticMetric::Normalized => s.normalized(p),
            SemanticMetric::Unnormalized => s.distance(p),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::accretion::LogBase;
    use crate::ontology::Ontology;

    fn rab() -> (Ontology, AccretionTable) {
        let mut b = Ontology::builder();
        b.term("R", &[]).term("A", &["R"]).term("B", &["R"]);
        let o = b.build().unwrap();
        // index order A, B, R
        let t = AccretionTable::from_values(&o, &[Some(1.0), Some(1.0), Some(0.0)], LogBase::Two)
            .unwrap();
        (o, t)
    }

    #[test]
    fn identical_annotations() {
        let (o, t) = rab();
        let f = o.propagate(&["A"]).unwrap();
        assert_eq!(ru_mi(&t, &f, &f).unwrap(), RuMi { ru: 0.0, mi: 0.0 });
        for p in [PParam::ONE, PParam::TWO, PParam::Infinity] {
            assert_eq!(semantic_distance(&t, &f, &f, p).unwrap(), 0.0);
            assert_eq!(semantic_distance_normalized(&t, &f, &f, p).unwrap(), 0.0);
        }
    }

    #[test]
    fn orientation() {
        let (o, t) = rab();
        let f = o.propagate(&["A"]).unwrap();
        let g = o.propagate(&["R"]).unwrap();
        assert_eq!(ru_mi(&t, &f, &g).unwrap(), RuMi { ru: 0.0, mi: 1.0 });
        assert_eq!(ru_mi(&t, &g, &f).unwrap(), RuMi { ru: 1.0, mi: 0.0 });
        assert_eq!(semantic_distance(&t, &f, &g, PParam::ONE).unwrap(), 1.0);
    }

    #[test]
    fn disjoint_informative_parts() {
        let (o, t) = rab();
        let f = o.propagate(&["A"]).unwrap();
        let g = o.propagate(&["B"]).unwrap();
        let d2 = semantic_distance(&t, &f, &g, PParam::TWO).unwrap();
        assert!((d2 - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(semantic_distance_normalized(&t, &f, &g, PParam::ONE).unwrap(), 1.0);
        assert_eq!(semantic_distance(&t, &f, &g, PParam::Infinity).unwrap(), 1.0);
    }

    #[test]
    fn zero_denominator_is_zero() {
        let (o, t) = rab();
        let r = o.propagate(&["R"]).unwrap();
        assert_eq!(semantic_distance_normalized(&t, &r, &r, PParam::ONE).unwrap(), 0.0);
        assert_eq!(
            semantic_distance_normalized(&t, &TermSet::new(), &TermSet::new(), PParam::ONE).unwrap(),
            0.0
        );
    }

    #[test]
    fn bad_p_and_missing_entry() {
        let (o, t) = rab();
        let f = o.propagate(&["A"]).unwrap();
        assert!(semantic_distance(&t, &f, &f, PParam::Finite(0.2)).is_err());
        let partial =
            AccretionTable::from_values(&o, &[None, Some(1.0), Some(0.0)], LogBase::Two).unwrap();
        assert_eq!(ru_mi(&partial, &f, &f).unwrap_err().code(), "E-MISSING-IA");
    }
}
