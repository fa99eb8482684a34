//! Synthetic corpora: annotations drawn from a Bayesian network shaped like
//! the ontology, then perturbed down a planted species tree.

use std::collections::{BTreeMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ontology::{Annotation, Ontology, TermSet};
use crate::tree::NewickNode;

/// Each term appears with probability `conditionals[t]` once all of its
/// parents are present. Roots are always present.
#[derive(Debug, Clone)]
pub struct BayesNet {
    ontology: Ontology,
    conditionals: Vec<f64>,
}

impl BayesNet {
    /// `conditionals` maps term ids to probabilities in (0, 1]. Roots may be
    /// omitted; if given they must be 1. Every other term needs a value.
    pub fn new(ontology: Ontology, conditionals: &BTreeMap<String, f64>) -> Result<Self> {
        for id in conditionals.keys() {
            ontology.resolve(id)?;
        }
        let mut probs = Vec::with_capacity(ontology.len());
        for t in 0..ontology.len() {
            let id = ontology.id(t);
            let p = match (conditionals.get(id), ontology.is_root(t)) {
                (None, true) => 1.0,
                (Some(&1.0), true) => 1.0,
                (Some(&p), true) => {
                    return Err(Error::Parameter(format!("root {id} must have probability 1, got {p}")))
                }
                (Some(&p), false) if p > 0.0 && p <= 1.0 => p,
                (Some(&p), false) => {
                    return Err(Error::Parameter(format!("probability for {id} must be in (0, 1], got {p}")))
                }
                (None, false) => return Err(Error::Parameter(format!("no probability for {id}"))),
            };
            probs.push(p);
        }
        Ok(BayesNet {
            ontology,
            conditionals: probs,
        })
    }

    /// Random single-rooted DAG with ids `SYN:0000`, `SYN:0001`, ... Each
    /// term has one or two earlier parents and a conditional in [0.2, 0.9].
    pub fn random<R: Rng>(n_terms: usize, rng: &mut R) -> Result<Self> {
        if n_terms == 0 {
            return Err(Error::Parameter("need at least one term".into()));
        }
        let ids: Vec<String> = (0..n_terms).map(|i| format!("SYN:{i:04}")).collect();
        let mut b = Ontology::builder();
        let mut conditionals = BTreeMap::new();
        b.term(&ids[0], &[]);
        for i in 1..n_terms {
            let mut parents = vec![rng.random_range(0..i)];
            if i > 1 && rng.random_bool(0.3) {
                let q = rng.random_range(0..i);
                if q != parents[0] {
                    parents.push(q);
                }
            }
            let parents: Vec<&str> = parents.iter().map(|&q| ids[q].as_str()).collect();
            b.term(&ids[i], &parents);
            conditionals.insert(ids[i].clone(), rng.random_range(0.2..0.9));
        }
        BayesNet::new(b.build()?, &conditionals)
    }

    pub fn ontology(&self) -> &Ontology {
        &self.ontology
    }

    pub fn conditional(&self, t: usize) -> f64 {
        self.conditionals[t]
    }

    /// Top-down Bernoulli draw; the result is always consistent.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> TermSet {
        let mut present = vec![false; self.ontology.len()];
        for &t in self.ontology.topo_order() {
            present[t] = self.ontology.parents(t).iter().all(|&q| present[q])
                && (self.ontology.is_root(t) || rng.random::<f64>() < self.conditionals[t]);
        }
        TermSet::from_indices((0..present.len()).filter(|&t| present[t]))
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticSpec {
    /// Planted species tree; branch lengths are perturbation rates.
    pub tree: NewickNode,
    /// Rate for branches without a length.
    pub default_rate: f64,
    pub proteins_per_species: usize,
    pub network: BayesNet,
}

/// Samples `proteins_per_species` annotations at the root of the planted
/// tree, then walks down it: along a branch with rate `r`, each protein is
/// independently redrawn from the network with probability `r` and
/// otherwise inherited. Leaves become species; protein `k` of leaf `L` is
/// named `L_k`.
pub fn generate_synthetic(spec: &SyntheticSpec, seed: u64) -> Result<Vec<Annotation>> {
    if spec.proteins_per_species == 0 {
        return Err(Error::Parameter("proteins per species must be >= 1".into()));
    }
    check_rate(spec.default_rate)?;
    let mut seen = HashSet::new();
    for leaf in leaf_labels(&spec.tree) {
        if !seen.insert(leaf) {
            return Err(Error::Newick(format!("leaf {leaf} appears twice")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let root: Vec<TermSet> = (0..spec.proteins_per_species)
        .map(|_| spec.network.sample(&mut rng))
        .collect();
    let mut out = Vec::new();
    descend(spec, &spec.tree, root, &mut rng, &mut out)?;
    Ok(out)
}

fn check_rate(r: f64) -> Result<()> {
    if (0.0..=1.0).contains(&r) {
        Ok(())
    } else {
        Err(Error::Parameter(format!("perturbation rate must be in [0, 1], got {r}")))
    }
}

fn leaf_labels(node: &NewickNode) -> Vec<&str> {
    if node.is_leaf() {
        return vec![node.label.as_deref().unwrap_or("")];
    }
    node.children.iter().flat_map(leaf_labels).collect()
}

fn descend(
    spec: &SyntheticSpec,
    node: &NewickNode,
    proteins: Vec<TermSet>,
    rng: &mut ChaCha8Rng,
    out: &mut Vec<Annotation>,
) -> Result<()> {
    if node.is_leaf() {
        let label = node.label.as_deref().unwrap_or("");
        for (k, terms) in proteins.into_iter().enumerate() {
            out.push(Annotation::new(
                spec.network.ontology(),
                format!("{label}_{k}"),
                label,
                terms,
            )?);
        }
        return Ok(());
    }
    for child in &node.children {
        let rate = child.length.unwrap_or(spec.default_rate);
        check_rate(rate)?;
        let moved = proteins
            .iter()
            .map(|f| {
                if rng.random::<f64>() < rate {
                    spec.network.sample(rng)
                } else {
                    f.clone()
                }
            })
            .collect();
        descend(spec, child, moved, rng, out)?;
    }
    Ok(())
}
