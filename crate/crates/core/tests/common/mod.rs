#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

use ontometric::{AccretionTable, LogBase, Ontology, StepFunction, TermSet};
use rand::Rng;

pub fn random_set<R: Rng>(rng: &mut R, universe: u32) -> HashSet<u32> {
    let density = rng.random_range(0.0..1.0);
    (0..universe).filter(|_| rng.random_bool(density)).collect()
}

/// Random DAG whose term ids sort in index order, with positive accretion
/// on non-roots.
pub struct RandomDag {
    pub ontology: Ontology,
    pub parents: Vec<Vec<usize>>,
    pub ia: Vec<f64>,
    pub table: AccretionTable,
}

pub fn term_id(i: usize) -> String {
    format!("T{i:02}")
}

impl RandomDag {
    pub fn new<R: Rng>(rng: &mut R, max_nodes: usize) -> Self {
        let n = rng.random_range(1..=max_nodes);
        let mut parents = vec![Vec::new(); n];
        for (i, ps) in parents.iter_mut().enumerate().skip(1) {
            // an occasional second root
            if i == 1 && rng.random_bool(0.1) {
                continue;
            }
            let k = rng.random_range(1..=3.min(i));
            let mut chosen = BTreeSet::new();
            while chosen.len() < k {
                chosen.insert(rng.random_range(0..i));
            }
            ps.extend(chosen);
        }
        let mut b = Ontology::builder();
        for (i, ps) in parents.iter().enumerate() {
            let ids: Vec<String> = ps.iter().map(|&q| term_id(q)).collect();
            let refs: Vec<&str> = ids.iter().map(String::as_str).collect();
            b.term(&term_id(i), &refs);
        }
        let ontology = b.build().unwrap();
        for i in 0..n {
            assert_eq!(ontology.index_of(&term_id(i)), Some(i));
        }
        let ia: Vec<f64> = parents
            .iter()
            .map(|ps| if ps.is_empty() { 0.0 } else { rng.random_range(0.01..5.0) })
            .collect();
        let table = AccretionTable::from_values(
            &ontology,
            &ia.iter().copied().map(Some).collect::<Vec<_>>(),
            LogBase::Two,
        )
        .unwrap();
        RandomDag {
            ontology,
            parents,
            ia,
            table,
        }
    }

    /// Upward closure of random seeds, computed by plain fixpoint iteration.
    pub fn random_closed<R: Rng>(&self, rng: &mut R) -> BTreeSet<usize> {
        let n = self.parents.len();
        let density = rng.random_range(0.0..0.4);
        let mut set: BTreeSet<usize> = (0..n).filter(|_| rng.random_bool(density)).collect();
        loop {
            let extra: Vec<usize> = set
                .iter()
                .flat_map(|&t| self.parents[t].iter().copied())
                .filter(|q| !set.contains(q))
                .collect();
            if extra.is_empty() {
                return set;
            }
            set.extend(extra);
        }
    }
}

pub fn term_set(s: &BTreeSet<usize>) -> TermSet {
    TermSet::from_indices(s.iter().copied())
}

/// Oracle semantic distance: direct sums over the set differences.
pub fn semantic_oracle(ia: &[f64], f: &BTreeSet<usize>, g: &BTreeSet<usize>, p: f64, normalized: bool) -> f64 {
    let mi: f64 = f.difference(g).map(|&t| ia[t]).sum();
    let ru: f64 = g.difference(f).map(|&t| ia[t]).sum();
    let d = if p.is_infinite() {
        mi.max(ru)
    } else {
        (mi.powf(p) + ru.powf(p)).powf(1.0 / p)
    };
    if !normalized {
        return d;
    }
    let total: f64 = f.union(g).map(|&t| ia[t]).sum();
    if total == 0.0 {
        0.0
    } else {
        d / total
    }
}

/// Raw step function: sorted breakpoints and one value per interval.
#[derive(Debug, Clone)]
pub struct RawStep {
    pub breakpoints: Vec<f64>,
    pub values: Vec<f64>,
}

impl RawStep {
    pub fn random<R: Rng>(rng: &mut R, max_breakpoints: usize) -> Self {
        let k = rng.random_range(0..=max_breakpoints);
        if k < 2 {
            return RawStep {
                breakpoints: vec![],
                values: vec![],
            };
        }
        let mut bps: Vec<f64> = (0..k).map(|_| rng.random_range(-10.0..10.0)).collect();
        bps.sort_by(f64::total_cmp);
        bps.dedup();
        let values = (1..bps.len())
            .map(|_| if rng.random_bool(0.2) { 0.0 } else { rng.random_range(-5.0..5.0) })
            .collect();
        RawStep {
            breakpoints: bps,
            values,
        }
    }

    pub fn to_step(&self) -> StepFunction {
        StepFunction::new(self.breakpoints.clone(), self.values.clone()).unwrap()
    }

    pub fn at(&self, x: f64) -> f64 {
        for (i, w) in self.breakpoints.windows(2).enumerate() {
            if w[0] <= x && x < w[1] {
                return self.values[i];
            }
        }
        0.0
    }
}

/// Marczewski-Steinhaus distance `∫|f-g| / ∫max(|f|, |g|, |f-g|)`, integrated
/// by evaluating both functions at interval midpoints.
pub fn marczewski_steinhaus(f: &RawStep, g: &RawStep) -> f64 {
    let mut xs: Vec<f64> = f.breakpoints.iter().chain(&g.breakpoints).copied().collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let (mut num, mut den) = (0.0, 0.0);
    for w in xs.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        let (a, b) = (f.at(mid), g.at(mid));
        num += (a - b).abs() * (w[1] - w[0]);
        den += a.abs().max(b.abs()).max((a - b).abs()) * (w[1] - w[0]);
    }
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}
