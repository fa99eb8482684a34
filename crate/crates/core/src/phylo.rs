//! Functional phylogeny: bootstrap species distances from protein
//! annotations, agglomerative clustering and the resulting merge tree.
//!
//! For a focal species, each bootstrap iteration resamples `N` proteins from
//! every species. Each focal protein votes for the competitor holding its
//! nearest protein (ties broken uniformly at random); the directional
//! distance to a competitor is one minus its vote share, averaged over `B`
//! iterations. Species distances average the two directions.
//!
//! Randomness comes from ChaCha8 streams keyed by the seed and indexed by
//! `(iteration, slot)`, so running iterations in parallel cannot change the
//! result.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::io::BufRead;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::accretion::AccretionTable;
use crate::corpus::SpeciesCorpus;
use crate::error::{Error, Result};
use crate::param::PParam;
use crate::semantic::SemanticMetric;
use crate::tree::ClusterTree;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    /// Proteins drawn (with replacement) per species per iteration.
    pub n: usize,
    /// Bootstrap iterations.
    pub b: usize,
    pub p: PParam,
    pub seed: u64,
    pub metric: SemanticMetric,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig {
            n: 1000,
            b: 1000,
            p: PParam::ONE,
            seed: 0,
            metric: SemanticMetric::Normalized,
        }
    }
}

impl BootstrapConfig {
    fn validate(&self) -> Result<()> {
        if self.n == 0 || self.b == 0 {
            return Err(Error::Parameter(format!(
                "N and B must be >= 1, got N={} B={}",
                self.n, self.b
            )));
        }
        self.p.validate()?;
        Ok(())
    }
}

/// Blocks above this many entries are evaluated on demand instead of cached.
const DENSE_BLOCK_LIMIT: usize = 1 << 25;

/// Protein-by-protein distances between two species.
enum Block<'a> {
    Dense { cols: usize, d: Vec<f64> },
    Lazy { rows: Vec<&'a [usize]>, cols: Vec<&'a [usize]> },
}

struct Pairwise {
    ia: Vec<f64>,
    cfg: BootstrapConfig,
}

impl Pairwise {
    fn new(table: &AccretionTable, corpora: &[&SpeciesCorpus], cfg: BootstrapConfig) -> Result<Self> {
        let used: HashSet<usize> = corpora
            .iter()
            .flat_map(|c| c.annotations())
            .flat_map(|a| a.terms().iter())
            .collect();
        if let Some(&bad) = used.iter().find(|&&t| t >= table.len()) {
            return Err(Error::MissingAccretion(format!("#{bad}")));
        }
        let ia = table.dense_for(used.iter().copied())?;
        if let Some(&t) = used.iter().find(|&&t| !ia[t].is_finite()) {
            return Err(Error::Domain(format!(
                "term {} has infinite accretion; estimate with smoothing > 0",
                table.term_id(t)
            )));
        }
        Ok(Pairwise { ia, cfg })
    }

    fn block<'a>(&self, a: &'a SpeciesCorpus, b: &'a SpeciesCorpus) -> Block<'a> {
        let rows: Vec<&[usize]> = a.annotations().iter().map(|x| x.terms().as_slice()).collect();
        let cols: Vec<&[usize]> = b.annotations().iter().map(|x| x.terms().as_slice()).collect();
        if rows.len() * cols.len() > DENSE_BLOCK_LIMIT {
            return Block::Lazy { rows, cols };
        }
        let d: Vec<f64> = rows
            .par_iter()
            .flat_map_iter(|r| cols.iter().map(move |c| self.eval(r, c)))
            .collect();
        Block::Dense {
            cols: cols.len(),
            d,
        }
    }

    #[inline]
    fn eval(&self, f: &[usize], g: &[usize]) -> f64 {
        self.cfg.metric.eval_dense(&self.ia, f, g, self.cfg.p)
    }

    #[inline]
    fn get(&self, block: &Block<'_>, i: usize, j: usize) -> f64 {
        match block {
            Block::Dense { cols, d } => d[i * cols + j],
            Block::Lazy { rows, cols } => self.eval(rows[i], cols[j]),
        }
    }
}

/// Independent generator for `(iteration, slot)` under `key`.
fn stream(key: u64, iteration: usize, slot: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    rng.set_stream(((iteration as u64) << 20) | slot as u64);
    rng
}

/// splitmix64 finalizer, used to derive per-focal keys from one seed.
fn mix(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn sample(rng: &mut ChaCha8Rng, n: usize, len: usize) -> Vec<usize> {
    (0..n).map(|_| rng.random_range(0..len)).collect()
}

/// One bootstrap iteration: `1 - votes/N` per competitor.
fn iteration(
    pw: &Pairwise,
    blocks: &[Block<'_>],
    focal_len: usize,
    other_lens: &[usize],
    key: u64,
    b: usize,
) -> Vec<f64> {
    let n = pw.cfg.n;
    let focal = sample(&mut stream(key, b, 0), n, focal_len);
    let pools: Vec<Vec<usize>> = other_lens
        .iter()
        .enumerate()
        .map(|(k, &len)| {
            let mut s = sample(&mut stream(key, b, k + 1), n, len);
            // the minimum is unaffected by repeated draws
            s.sort_unstable();
            s.dedup();
            s
        })
        .collect();
    let mut ties = stream(key, b, other_lens.len() + 1);
    let mut votes = vec![0usize; other_lens.len()];
    let mut best_species = Vec::with_capacity(other_lens.len());
    for &i in &focal {
        let mut best = f64::INFINITY;
        best_species.clear();
        for (k, pool) in pools.iter().enumerate() {
            let m = pool
                .iter()
                .map(|&j| pw.get(&blocks[k], i, j))
                .fold(f64::INFINITY, f64::min);
            if m < best {
                best = m;
                best_species.clear();
                best_species.push(k);
            } else if m == best {
                best_species.push(k);
            }
        }
        let winner = if best_species.len() == 1 {
            best_species[0]
        } else {
            best_species[ties.random_range(0..best_species.len())]
        };
        votes[winner] += 1;
    }
    votes.iter().map(|&v| 1.0 - v as f64 / n as f64).collect()
}

fn run_bootstrap(
    pw: &Pairwise,
    focal: &SpeciesCorpus,
    others: &[&SpeciesCorpus],
    blocks: &[Block<'_>],
    key: u64,
) -> Vec<f64> {
    let other_lens: Vec<usize> = others.iter().map(|c| c.len()).collect();
    let per_iter: Vec<Vec<f64>> = (0..pw.cfg.b)
        .into_par_iter()
        .map(|b| iteration(pw, blocks, focal.len(), &other_lens, key, b))
        .collect();
    // summed in iteration order so the result is independent of scheduling
    let mut total = vec![0.0; others.len()];
    for row in &per_iter {
        for (t, v) in total.iter_mut().zip(row) {
            *t += v;
        }
    }
    total.iter().map(|t| t / pw.cfg.b as f64).collect()
}

fn check_labels<'a>(labels: impl IntoIterator<Item = &'a str>) -> Result<()> {
    let mut seen = HashSet::new();
    for l in labels {
        if !seen.insert(l) {
            return Err(Error::Parameter(format!("species {l} appears twice")));
        }
    }
    Ok(())
}

/// Directional distances from `focal` to each competitor species.
pub fn directional_distances(
    focal: &SpeciesCorpus,
    others: &[SpeciesCorpus],
    table: &AccretionTable,
    cfg: &BootstrapConfig,
) -> Result<BTreeMap<String, f64>> {
    cfg.validate()?;
    if others.is_empty() {
        return Err(Error::Parameter("need at least one competitor species".into()));
    }
    check_labels(std::iter::once(focal.species()).chain(others.iter().map(|c| c.species())))?;
    let refs: Vec<&SpeciesCorpus> = others.iter().collect();
    let all: Vec<&SpeciesCorpus> = std::iter::once(focal).chain(refs.iter().copied()).collect();
    let pw = Pairwise::new(table, &all, *cfg)?;
    let blocks: Vec<Block<'_>> = refs.iter().map(|o| pw.block(focal, o)).collect();
    let d = run_bootstrap(&pw, focal, &refs, &blocks, cfg.seed);
    Ok(refs
        .iter()
        .map(|c| c.species().to_string())
        .zip(d)
        .collect())
}

/// Symmetric species distance matrix with zero diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceMatrix {
    labels: Vec<String>,
    values: Vec<Vec<f64>>,
}

impl DistanceMatrix {
    /// Validates shape, symmetry, zero diagonal and non-negativity.
    pub fn new(labels: Vec<String>, values: Vec<Vec<f64>>) -> Result<Self> {
        let n = labels.len();
        if values.len() != n || values.iter().any(|r| r.len() != n) {
            return Err(Error::Matrix(format!("expected a {n}x{n} matrix")));
        }
        check_labels(labels.iter().map(String::as_str)).map_err(|e| Error::Matrix(e.to_string()))?;
        for i in 0..n {
            if values[i][i] != 0.0 {
                return Err(Error::Matrix(format!("non-zero diagonal at {}", labels[i])));
            }
            for j in 0..n {
                let v = values[i][j];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::Matrix(format!(
                        "entry ({}, {}) = {v} is negative or not finite",
                        labels[i], labels[j]
                    )));
                }
                if (v - values[j][i]).abs() > 1e-12 {
                    return Err(Error::Matrix(format!(
                        "not symmetric at ({}, {})",
                        labels[i], labels[j]
                    )));
                }
            }
        }
        Ok(DistanceMatrix { labels, values })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i][j]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.values
    }

    /// Header row and first column hold the species ids.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("species");
        for l in &self.labels {
            let _ = write!(out, "\t{l}");
        }
        out.push('\n');
        for (l, row) in self.labels.iter().zip(&self.values) {
            out.push_str(l);
            for v in row {
                let _ = write!(out, "\t{v}");
            }
            out.push('\n');
        }
        out
    }

    pub fn read_tsv<R: BufRead>(reader: R) -> Result<Self> {
        let mut lines = reader.lines().enumerate();
        let header = loop {
            match lines.next() {
                Some((_, l)) => {
                    let l = l?;
                    if !l.trim().is_empty() {
                        break l;
                    }
                }
                None => return Err(Error::parse(0, "empty matrix file")),
            }
        };
        let labels: Vec<String> = header.split('\t').skip(1).map(|s| s.trim().to_string()).collect();
        let mut values = Vec::with_capacity(labels.len());
        for (n, line) in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split('\t');
            let label = fields.next().unwrap_or("").trim();
            if labels.get(values.len()).map(String::as_str) != Some(label) {
                return Err(Error::parse(n + 1, format!("row label {label:?} out of order")));
            }
            let row = fields
                .map(|f| {
                    f.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::parse(n + 1, format!("bad number {f:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            values.push(row);
        }
        DistanceMatrix::new(labels, values)
    }
}

/// Runs the bootstrap with every species as focal and averages directions.
pub fn species_distance_matrix(
    corpora: &[SpeciesCorpus],
    table: &AccretionTable,
    cfg: &BootstrapConfig,
) -> Result<DistanceMatrix> {
    cfg.validate()?;
    if corpora.len() < 2 {
        return Err(Error::Parameter("need at least two species".into()));
    }
    check_labels(corpora.iter().map(|c| c.species()))?;
    let all: Vec<&SpeciesCorpus> = corpora.iter().collect();
    let pw = Pairwise::new(table, &all, *cfg)?;
    let n = corpora.len();
    let mut directional = vec![vec![0.0; n]; n];
    for f in 0..n {
        let others: Vec<usize> = (0..n).filter(|&k| k != f).collect();
        let refs: Vec<&SpeciesCorpus> = others.iter().map(|&k| &corpora[k]).collect();
        let blocks: Vec<Block<'_>> = refs.iter().map(|o| pw.block(&corpora[f], o)).collect();
        let d = run_bootstrap(&pw, &corpora[f], &refs, &blocks, mix(cfg.seed, f as u64));
        for (&k, v) in others.iter().zip(d) {
            directional[f][k] = v;
        }
    }
    let mut values = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (directional[i][j] + directional[j][i]);
            values[i][j] = v;
            values[j][i] = v;
        }
    }
    DistanceMatrix::new(corpora.iter().map(|c| c.species().to_string()).collect(), values)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Linkage {
    #[default]
    Single,
    Complete,
    Average,
}

impl std::str::FromStr for Linkage {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "single" => Ok(Linkage::Single),
            "complete" => Ok(Linkage::Complete),
            "average" => Ok(Linkage::Average),
            _ => Err(Error::Parameter(format!(
                "linkage must be single, complete or average, got {s:?}"
            ))),
        }
    }
}

struct Cluster {
    tree: ClusterTree,
    min_label: String,
    size: usize,
}

/// Agglomerative clustering. Among equally close pairs, the pair whose
/// smallest member labels sort first is merged; the cluster with the
/// smaller label becomes the left child.
pub fn agglomerate(matrix: &DistanceMatrix, linkage: Linkage) -> Result<ClusterTree> {
    let m = DistanceMatrix::new(matrix.labels.clone(), matrix.values.clone())?;
    if m.len() < 2 {
        return Err(Error::Matrix("need at least two labels".into()));
    }
    let mut clusters: Vec<Option<Cluster>> = m
        .labels
        .iter()
        .map(|l| {
            Some(Cluster {
                tree: ClusterTree::Leaf(l.clone()),
                min_label: l.clone(),
                size: 1,
            })
        })
        .collect();
    let mut d = m.values;
    let n = clusters.len();
    for _ in 1..n {
        let mut best: Option<(f64, &str, &str, usize, usize)> = None;
        for a in 0..n {
            let Some(ca) = &clusters[a] else { continue };
            for b in (a + 1)..n {
                let Some(cb) = &clusters[b] else { continue };
                let (la, lb) = if ca.min_label <= cb.min_label {
                    (ca.min_label.as_str(), cb.min_label.as_str())
                } else {
                    (cb.min_label.as_str(), ca.min_label.as_str())
                };
                let better = match best {
                    None => true,
                    Some((bd, bl, br, _, _)) => d[a][b] < bd || (d[a][b] == bd && (la, lb) < (bl, br)),
                };
                if better {
                    best = Some((d[a][b], la, lb, a, b));
                }
            }
        }
        let (height, _, _, a, b) = best.expect("at least two clusters remain");
        let ca = clusters[a].take().expect("active");
        let cb = clusters[b].take().expect("active");
        for k in 0..n {
            if k == a || k == b || clusters[k].is_none() {
                continue;
            }
            let (x, y) = (d[a][k], d[b][k]);
            let v = match linkage {
                Linkage::Single => x.min(y),
                Linkage::Complete => x.max(y),
                Linkage::Average if x == y => x,
                Linkage::Average => (ca.size as f64 * x + cb.size as f64 * y) / (ca.size + cb.size) as f64,
            };
            d[a][k] = v;
            d[k][a] = v;
        }
        let (left, right) = if ca.min_label <= cb.min_label { (ca, cb) } else { (cb, ca) };
        clusters[a] = Some(Cluster {
            min_label: left.min_label.clone(),
            size: left.size + right.size,
            tree: ClusterTree::Merge {
                left: Box::new(left.tree),
                right: Box::new(right.tree),
                height,
            },
        });
    }
    Ok(clusters
        .into_iter()
        .flatten()
        .next()
        .expect("one cluster remains")
        .tree)
}
