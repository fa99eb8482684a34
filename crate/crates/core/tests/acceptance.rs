//! Acceptance suite. Each test covers one criterion and prints a single
//! `criterion N ... PASS|FAIL` line (visible with `--nocapture`).

mod common;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::time::{Duration, Instant};

use common::{marczewski_steinhaus, random_set, semantic_oracle, term_set, RandomDag, RawStep};
use ontometric::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EXACT: f64 = 1e-12;
const AXIOM_TOL: f64 = 1e-9;
const P_VALUES: [f64; 5] = [1.0, 1.5, 2.0, 4.0, f64::INFINITY];

fn report(n: u32, name: &str, ok: bool, detail: &str, elapsed: Duration) {
    let verdict = if ok { "PASS" } else { "FAIL" };
    println!("criterion {n} {name}: {verdict} ({detail}; {:.2?})", elapsed);
}

fn pp(p: f64) -> PParam {
    PParam::new(p).unwrap()
}

#[test]
fn criterion_1_numeric_example() {
    let t0 = Instant::now();
    let a: HashSet<u32> = [1, 2, 4].into();
    let b: HashSet<u32> = [2, 3, 4, 5].into();
    let d1 = set_distance(&a, &b, PParam::ONE).unwrap();
    let d2 = set_distance(&a, &b, PParam::TWO).unwrap();
    let (ea, eb) = (binary_encoding(&a, 5), binary_encoding(&b, 5));
    let m1 = minkowski_distance(&ea, &eb, PParam::ONE).unwrap();
    let m2 = minkowski_distance(&ea, &eb, PParam::TWO).unwrap();
    let elapsed = t0.elapsed();
    let ok = (d1 - 3.0).abs() <= EXACT
        && (d2 - 5f64.sqrt()).abs() <= EXACT
        && (m1 - 3.0).abs() <= EXACT
        && (m2 - 3f64.sqrt()).abs() <= EXACT
        && m2 < d2
        && elapsed < Duration::from_secs(1);
    report(
        1,
        "numeric example",
        ok,
        &format!("d1={d1} d2={d2} dM1={m1} dM2={m2}"),
        elapsed,
    );
    assert!(ok);
}

/// Counts axiom violations of `d` (and its normalized form `dn`) on one triple.
fn axiom_violations(d: impl Fn(usize, usize) -> (f64, f64)) -> usize {
    let mut bad = 0;
    let mut m = [[(0.0, 0.0); 3]; 3];
    for (i, row) in m.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = d(i, j);
        }
    }
    for i in 0..3 {
        for part in [0, 1] {
            let get = |a: usize, b: usize| if part == 0 { m[a][b].0 } else { m[a][b].1 };
            if get(i, i).abs() > AXIOM_TOL {
                bad += 1;
            }
            for j in 0..3 {
                let v = get(i, j);
                if v.is_nan() || v < 0.0 || (get(i, j) - get(j, i)).abs() > AXIOM_TOL {
                    bad += 1;
                }
                if part == 1 && v > 1.0 + AXIOM_TOL {
                    bad += 1;
                }
                for k in 0..3 {
                    if get(i, k) > get(i, j) + get(j, k) + AXIOM_TOL {
                        bad += 1;
                    }
                }
            }
        }
    }
    bad
}

#[test]
fn criterion_2_metric_axioms() {
    const TRIPLES: usize = 10_000;
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut violations: BTreeMap<&str, usize> = BTreeMap::new();

    for _ in 0..TRIPLES {
        let s: Vec<HashSet<u32>> = (0..3).map(|_| random_set(&mut rng, 20)).collect();
        for &p in &P_VALUES {
            let v = axiom_violations(|i, j| {
                (
                    set_distance(&s[i], &s[j], pp(p)).unwrap(),
                    set_distance_normalized(&s[i], &s[j], pp(p)).unwrap(),
                )
            });
            *violations.entry("sets").or_default() += v;
        }
    }

    for _ in 0..TRIPLES {
        let dag = RandomDag::new(&mut rng, 30);
        let s: Vec<TermSet> = (0..3).map(|_| term_set(&dag.random_closed(&mut rng))).collect();
        for &p in &P_VALUES {
            let v = axiom_violations(|i, j| {
                (
                    semantic_distance(&dag.table, &s[i], &s[j], pp(p)).unwrap(),
                    semantic_distance_normalized(&dag.table, &s[i], &s[j], pp(p)).unwrap(),
                )
            });
            *violations.entry("ontology").or_default() += v;
        }
    }

    for _ in 0..TRIPLES {
        let s: Vec<StepFunction> = (0..3).map(|_| RawStep::random(&mut rng, 8).to_step()).collect();
        for &p in &P_VALUES {
            let v = axiom_violations(|i, j| {
                (
                    function_distance(&s[i], &s[j], pp(p)).unwrap(),
                    function_distance_normalized(&s[i], &s[j], pp(p)).unwrap(),
                )
            });
            *violations.entry("functions").or_default() += v;
        }
    }

    let elapsed = t0.elapsed();
    let total: usize = violations.values().sum();
    let ok = total == 0 && elapsed < Duration::from_secs(60);
    report(
        2,
        "metric axioms",
        ok,
        &format!("{TRIPLES} triples per space, violations {violations:?}"),
        elapsed,
    );
    assert!(ok);
}

#[test]
fn criterion_3_special_cases() {
    const CASES: usize = 1000;
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: BTreeMap<&str, f64> = BTreeMap::new();
    let mut note = |k: &'static str, e: f64| {
        let w = worst.entry(k).or_insert(0.0);
        *w = w.max(if e.is_nan() { f64::INFINITY } else { e });
    };

    for _ in 0..CASES {
        let a: BTreeSet<u32> = random_set(&mut rng, 30).into_iter().collect();
        let b: BTreeSet<u32> = random_set(&mut rng, 30).into_iter().collect();
        let union = a.union(&b).count();
        let jaccard = if union == 0 {
            0.0
        } else {
            1.0 - a.intersection(&b).count() as f64 / union as f64
        };
        let bag = a.difference(&b).count().max(b.difference(&a).count()) as f64;
        let (ha, hb): (HashSet<u32>, HashSet<u32>) = (a.iter().copied().collect(), b.iter().copied().collect());
        note("jaccard", (set_distance_normalized(&ha, &hb, PParam::ONE).unwrap() - jaccard).abs());
        note("bag", (set_distance(&ha, &hb, PParam::Infinity).unwrap() - bag).abs());
    }

    for _ in 0..CASES {
        let f = RawStep::random(&mut rng, 8);
        let g = RawStep::random(&mut rng, 8);
        let ms = marczewski_steinhaus(&f, &g);
        let dn = function_distance_normalized(&f.to_step(), &g.to_step(), PParam::ONE).unwrap();
        note("marczewski-steinhaus", (dn - ms).abs());
    }

    // depth-one ontology: accretion of each term is its smoothed inverse
    // document frequency, and the semantic distance is a weighted Jaccard
    let words = 20;
    let ids: Vec<String> = (0..words).map(|i| format!("W{i:02}")).collect();
    let mut b = Ontology::builder();
    b.term("R", &[]);
    for id in &ids {
        b.term(id, &["R"]);
    }
    let o = b.build().unwrap();
    let doc = |rng: &mut ChaCha8Rng| -> BTreeSet<usize> {
        let density = rng.random_range(0.0..0.5);
        (0..words).filter(|_| rng.random_bool(density)).collect()
    };
    let docs: Vec<BTreeSet<usize>> = (0..300).map(|_| doc(&mut rng)).collect();
    let anns: Vec<Annotation> = docs
        .iter()
        .enumerate()
        .map(|(k, d)| {
            let mut terms: Vec<&str> = d.iter().map(|&w| ids[w].as_str()).collect();
            terms.push("R");
            Annotation::from_ids(&o, format!("d{k}"), "corpus", &terms).unwrap()
        })
        .collect();
    let table = estimate_accretion(&o, &anns, 1.0, LogBase::Two).unwrap();
    let idf: Vec<f64> = (0..words)
        .map(|w| {
            let df = docs.iter().filter(|d| d.contains(&w)).count() as f64;
            -((df + 1.0) / (docs.len() as f64 + 2.0)).log2()
        })
        .collect();
    for _ in 0..CASES {
        let (x, y) = (doc(&mut rng), doc(&mut rng));
        let (mut lo, mut hi) = (0.0, 0.0);
        for (w, &weight) in idf.iter().enumerate() {
            let a = if x.contains(&w) { weight } else { 0.0 };
            let b = if y.contains(&w) { weight } else { 0.0 };
            lo += f64::min(a, b);
            hi += f64::max(a, b);
        }
        let weighted_jaccard = if hi == 0.0 { 0.0 } else { 1.0 - lo / hi };
        let to_set = |s: &BTreeSet<usize>| {
            let mut terms: Vec<&str> = s.iter().map(|&w| ids[w].as_str()).collect();
            terms.push("R");
            o.propagate(&terms).unwrap()
        };
        let d = semantic_distance_normalized(&table, &to_set(&x), &to_set(&y), PParam::ONE).unwrap();
        note("depth-one idf", (d - weighted_jaccard).abs());
    }

    let elapsed = t0.elapsed();
    let ok = worst.len() == 4 && worst.values().all(|&e| e <= EXACT);
    report(
        3,
        "special-case equivalences",
        ok,
        &format!("{CASES} cases each, max abs error {worst:?}"),
        elapsed,
    );
    assert!(ok);
}

/// The three pointwise identities, written out directly.
fn lemmas_hold(f: f64, g: f64, h: f64) -> bool {
    let pos = |x: f64| x.max(0.0);
    let tol = 1e-12 * (1.0 + f.abs() + g.abs() + h.abs());
    let split = {
        let opposite = if f * g < 0.0 { f.abs().min(g.abs()) } else { 0.0 };
        (pos(f) + pos(g) - opposite - pos(f + g)).abs() <= tol
    };
    let gap = {
        let inner = g.abs().max((f - g).abs()).max((g - h).abs());
        let outer = f.abs().max(h.abs()).max((f - h).abs());
        pos(f - g) + pos(g - h) - pos(inner - outer) >= pos(f - h) - tol
    };
    let max = (f.max(g) - f - pos(g - f)).abs() <= tol;
    split && gap && max
}

#[test]
fn criterion_4_pointwise_lemmas() {
    let t0 = Instant::now();
    let mut failures = 0usize;
    let mut checked = 0usize;
    let grid = [-2.0, -1.0, 0.0, 1.0, 2.0];
    let mut check = |f: f64, g: f64, h: f64| {
        checked += 1;
        if !lemmas_hold(f, g, h) || !lemma_pointwise_checks(f, g, h).unwrap() {
            failures += 1;
        }
    };
    for &f in &grid {
        for &g in &grid {
            for &h in &grid {
                check(f, g, h);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..100_000 {
        check(
            rng.random_range(-10.0..10.0),
            rng.random_range(-10.0..10.0),
            rng.random_range(-10.0..10.0),
        );
    }
    let elapsed = t0.elapsed();
    let ok = failures == 0 && checked == 125 + 100_000 && elapsed < Duration::from_secs(10);
    report(
        4,
        "pointwise lemmas",
        ok,
        &format!("{checked} triples, {failures} violations"),
        elapsed,
    );
    assert!(ok);
}

#[test]
fn criterion_5_accretion_consistency() {
    const ANNOTATIONS: usize = 50_000;
    let t0 = Instant::now();
    // (term, parents, P(term | parents))
    let network: [(&str, &[&str], f64); 10] = [
        ("R", &[], 1.0),
        ("A", &["R"], 0.9),
        ("B", &["R"], 0.8),
        ("C", &["R"], 0.7),
        ("D", &["A"], 0.6),
        ("E", &["A", "B"], 0.7),
        ("F", &["B", "C"], 0.5),
        ("G", &["D", "E"], 0.5),
        ("H", &["F"], 0.8),
        ("I", &["G", "C"], 0.7),
    ];
    let mut b = Ontology::builder();
    for (id, parents, _) in &network {
        b.term(id, parents);
    }
    let o = b.build().unwrap();

    // ancestral sampling, listed in topological order above
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let anns: Vec<Annotation> = (0..ANNOTATIONS)
        .map(|k| {
            let mut present: BTreeSet<&str> = BTreeSet::new();
            for (id, parents, prob) in &network {
                if parents.iter().all(|q| present.contains(q)) && rng.random::<f64>() < *prob {
                    present.insert(id);
                }
            }
            let ids: Vec<&str> = present.into_iter().collect();
            Annotation::new(&o, format!("p{k}"), "s", o.resolve_all(&ids).unwrap()).unwrap()
        })
        .collect();

    let table = estimate_accretion(&o, &anns, 0.0, LogBase::Two).unwrap();
    let mut worst = 0.0f64;
    let mut assessed = 0;
    for (id, _, prob) in &network {
        let t = o.index_of(id).unwrap();
        let entry = table.entry(t).unwrap();
        if entry.counts.parents_present >= 1000 {
            assessed += 1;
            worst = worst.max((entry.ia - (-prob.log2())).abs());
        }
    }
    let elapsed = t0.elapsed();
    let ok = assessed > 0 && worst <= 0.05 && elapsed < Duration::from_secs(30);
    report(
        5,
        "accretion estimator consistency",
        ok,
        &format!("{assessed} terms assessed, max error {worst:.4} bits"),
        elapsed,
    );
    assert!(ok);
}

/// Exact mean and variance of the per-iteration directional distance at
/// N = 2, enumerating every bootstrap draw and tie outcome.
fn enumerate_n2(dist: &dyn Fn(usize, usize, usize) -> f64, focal: usize, others: &[usize]) -> Vec<(f64, f64)> {
    let k = others.len();
    let mut mean = vec![0.0; k];
    let mut second = vec![0.0; k];
    let mut draws: Vec<Vec<(usize, usize)>> = vec![(0..focal).flat_map(|a| (0..focal).map(move |b| (a, b))).collect()];
    for &m in others {
        draws.push((0..m).flat_map(|a| (0..m).map(move |b| (a, b))).collect());
    }
    let total: usize = draws.iter().map(Vec::len).product();
    let weight = 1.0 / total as f64;
    let mut idx = vec![0usize; draws.len()];
    for _ in 0..total {
        let (f1, f2) = draws[0][idx[0]];
        // probability that competitor s wins each focal draw
        let win = |i: usize| -> Vec<f64> {
            let mins: Vec<f64> = (0..k)
                .map(|s| {
                    let (a, b) = draws[s + 1][idx[s + 1]];
                    dist(i, s, a).min(dist(i, s, b))
                })
                .collect();
            let best = mins.iter().copied().fold(f64::INFINITY, f64::min);
            let ties = mins.iter().filter(|&&m| m == best).count() as f64;
            mins.iter().map(|&m| if m == best { 1.0 / ties } else { 0.0 }).collect()
        };
        let (q1, q2) = (win(f1), win(f2));
        for s in 0..k {
            // votes = Bernoulli(q1) + Bernoulli(q2); d = 1 - votes/2
            let p0 = (1.0 - q1[s]) * (1.0 - q2[s]);
            let p2 = q1[s] * q2[s];
            let p1 = 1.0 - p0 - p2;
            mean[s] += weight * (p0 + 0.5 * p1);
            second[s] += weight * (p0 + 0.25 * p1);
        }
        for (d, i) in draws.iter().zip(idx.iter_mut()) {
            *i += 1;
            if *i < d.len() {
                break;
            }
            *i = 0;
        }
    }
    mean.iter().zip(&second).map(|(&m, &s)| (m, s - m * m)).collect()
}

#[test]
fn criterion_6_bootstrap_oracle() {
    const B: usize = 10_000;
    let t0 = Instant::now();
    let mut b = Ontology::builder();
    b.term("R", &[])
        .term("a", &["R"])
        .term("b", &["R"])
        .term("c", &["a"])
        .term("d", &["a", "b"]);
    let o = b.build().unwrap();
    let ia: BTreeMap<&str, f64> = [("R", 0.0), ("a", 1.0), ("b", 0.5), ("c", 2.0), ("d", 0.25)].into();
    let table = AccretionTable::from_values(
        &o,
        &o.terms().iter().map(|t| Some(ia[t.id.as_str()])).collect::<Vec<_>>(),
        LogBase::Two,
    )
    .unwrap();
    // dyadic accretion values keep tied distances exactly tied
    let species: [(&str, &[&[&str]]); 4] = [
        ("F", &[&["c"], &["d"], &["b"]]),
        ("X", &[&["c"], &["b"], &["R"]]),
        ("Y", &[&["d"], &["c"]]),
        ("Z", &[&["b"], &["a"]]),
    ];
    let sets: Vec<Vec<BTreeSet<usize>>> = species
        .iter()
        .map(|(_, prots)| {
            prots
                .iter()
                .map(|ids| o.propagate(ids).unwrap().iter().collect())
                .collect()
        })
        .collect();
    let corpora: Vec<SpeciesCorpus> = species
        .iter()
        .map(|(name, prots)| {
            let anns = prots
                .iter()
                .enumerate()
                .map(|(k, ids)| Annotation::from_ids(&o, format!("{name}{k}"), *name, ids).unwrap())
                .collect();
            SpeciesCorpus::new(&o, *name, anns).unwrap()
        })
        .collect();
    let dense: Vec<f64> = (0..o.len()).map(|t| ia[o.id(t)]).collect();

    let mut lines = Vec::new();
    let mut ok = true;
    for p in [1.0, 2.0] {
        let dist = |i: usize, s: usize, j: usize| semantic_oracle(&dense, &sets[0][i], &sets[s + 1][j], p, true);
        let exact = enumerate_n2(&dist, sets[0].len(), &sets[1..].iter().map(Vec::len).collect::<Vec<_>>());
        let cfg = BootstrapConfig {
            n: 2,
            b: B,
            p: pp(p),
            seed: 6,
            metric: SemanticMetric::Normalized,
        };
        let got = directional_distances(&corpora[0], &corpora[1..], &table, &cfg).unwrap();
        for (s, (mean, var)) in exact.iter().enumerate() {
            let name = species[s + 1].0;
            let se = (var / B as f64).sqrt();
            let z = (got[name] - mean).abs() / se;
            ok &= if se == 0.0 { (got[name] - mean).abs() <= EXACT } else { z <= 3.0 };
            lines.push(format!("p={p} {name}: {:.4} vs {:.4} ({z:.2} SE)", got[name], mean));
        }
    }
    let elapsed = t0.elapsed();
    ok &= elapsed < Duration::from_secs(60);
    report(6, "bootstrap oracle", ok, &lines.join(", "), elapsed);
    assert!(ok);
}

const PLANTED: &str = "(((A:0.1,B:0.1):0.3,C:0.2):0.3,(D:0.1,E:0.1):0.5);";

#[test]
fn criterion_7_planted_tree_recovery() {
    const TRIALS: u64 = 100;
    let t0 = Instant::now();
    let planted = parse_newick(PLANTED).unwrap();
    let (mut recovered, mut agree) = (0, 0);
    for trial in 0..TRIALS {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + trial);
        let network = BayesNet::random(60, &mut rng).unwrap();
        let spec = SyntheticSpec {
            tree: planted.clone(),
            default_rate: 0.0,
            proteins_per_species: 200,
            network,
        };
        let anns = generate_synthetic(&spec, trial).unwrap();
        let o = spec.network.ontology();
        let table = estimate_accretion(o, &anns, 1.0, LogBase::Two).unwrap();
        let corpora = group_by_species(o, anns).unwrap();
        let cfg = BootstrapConfig {
            n: 100,
            b: 50,
            seed: trial,
            ..Default::default()
        };
        let m = species_distance_matrix(&corpora, &table, &cfg).unwrap();
        let clades: Vec<_> = [Linkage::Single, Linkage::Complete, Linkage::Average]
            .iter()
            .map(|&l| agglomerate(&m, l).unwrap().to_node().clades())
            .collect();
        if clades[0] == planted.clades() {
            recovered += 1;
        }
        if clades[1] == clades[0] && clades[2] == clades[0] {
            agree += 1;
        }
    }
    let elapsed = t0.elapsed();
    let ok = recovered >= 95 && agree >= 90 && elapsed < Duration::from_secs(300);
    report(
        7,
        "planted-tree recovery",
        ok,
        &format!("single linkage recovered {recovered}/{TRIALS}, linkages agree {agree}/{TRIALS}"),
        elapsed,
    );
    assert!(ok);
}

#[test]
fn criterion_8_non_metric_baseline() {
    let t0 = Instant::now();
    let a: HashSet<u32> = [1].into();
    let b: HashSet<u32> = [1, 2].into();
    let c: HashSet<u32> = [2].into();
    let ab = czekanowsky_dice_distance(&a, &b);
    let bc = czekanowsky_dice_distance(&b, &c);
    let ac = czekanowsky_dice_distance(&a, &c);
    // 1 - 2|A ∩ B| / (|A| + |B|)
    let third = 1.0 - 2.0 * 1.0 / 3.0;
    let ok = ab == third && bc == third && ac == 1.0 && ac > ab + bc;
    report(
        8,
        "czekanowsky-dice triangle violation",
        ok,
        &format!("d(A,C)={ac} > d(A,B)+d(B,C)={}", ab + bc),
        t0.elapsed(),
    );
    assert!(ok);
}
