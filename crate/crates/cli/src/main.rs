use std::collections::{BTreeMap, HashSet};
use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgAction, Parser, Subcommand, ValueEnum};
use ontometric::{
    agglomerate, estimate_accretion, function_distance, function_distance_normalized, generate_synthetic,
    group_by_species, parse_newick, parse_obo, read_corpus, semantic_distance, semantic_distance_normalized,
    set_distance, set_distance_normalized, species_distance_matrix, write_corpus, write_obo, AccretionTable,
    BayesNet, BootstrapConfig, Error, Linkage, LogBase, Namespace, Ontology, PParam, SemanticMetric, StepFunction,
    SyntheticSpec,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(name = "ontometric", version, about = "Metrics on sets, ontologies and functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Tsv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Distance between two sets of whitespace-separated elements. Without
    /// positional arguments, the two sets are read as two lines of stdin.
    Setdist {
        #[arg(long, default_value = "1")]
        p: PParam,
        #[arg(long, default_value_t = false, action = ArgAction::Set)]
        normalized: bool,
        a: Option<String>,
        b: Option<String>,
    },
    /// Semantic distance between two term lists (comma or space separated),
    /// each propagated to its ancestors first.
    Semdist {
        #[arg(long)]
        ia: PathBuf,
        #[arg(long)]
        obo: PathBuf,
        #[arg(long, default_value = "1")]
        p: PParam,
        #[arg(long, default_value_t = true, action = ArgAction::Set)]
        normalized: bool,
        f: String,
        g: String,
    },
    /// Distance between two step functions given as `[[breakpoints], [values]]`.
    Funcdist {
        #[arg(long, default_value = "1")]
        p: PParam,
        #[arg(long, default_value_t = true, action = ArgAction::Set)]
        normalized: bool,
        f: String,
        g: String,
    },
    /// Estimate information accretion from an annotation corpus.
    IaEstimate {
        #[arg(long)]
        obo: PathBuf,
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        smoothing: f64,
        #[arg(long, default_value = "2")]
        base: LogBase,
        /// Keep only rows whose term is in this namespace.
        #[arg(long)]
        namespace: Option<String>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "tsv")]
        format: Format,
    },
    /// Bootstrap species distances and cluster them into a tree.
    Phylo {
        #[arg(long)]
        obo: PathBuf,
        #[arg(long)]
        ia: PathBuf,
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long = "N", default_value_t = 1000)]
        n: usize,
        #[arg(long = "B", default_value_t = 1000)]
        b: usize,
        #[arg(long, default_value = "1")]
        p: PParam,
        /// Compare proteins with the normalized semantic distance.
        #[arg(long, default_value_t = true, action = ArgAction::Set)]
        normalized: bool,
        #[arg(long, default_value = "single")]
        linkage: Linkage,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        namespace: Option<String>,
        #[arg(long)]
        out_matrix: PathBuf,
        #[arg(long)]
        out_tree: PathBuf,
        #[arg(long, value_enum, default_value = "tsv")]
        format: Format,
    },
    /// Generate a synthetic ontology and corpus along a planted species tree.
    Generate {
        /// Newick tree; branch lengths are per-branch perturbation rates.
        #[arg(long)]
        tree: String,
        /// Rate for branches without a length.
        #[arg(long, default_value_t = 0.1)]
        rate: f64,
        #[arg(long, default_value_t = 200)]
        proteins: usize,
        /// Size of the random network (ignored with --network).
        #[arg(long, default_value_t = 60)]
        terms: usize,
        /// Use this ontology with --conditionals instead of a random network.
        #[arg(long, requires = "conditionals")]
        network: Option<PathBuf>,
        /// JSON object mapping term ids to P(term | parents present).
        #[arg(long, requires = "network")]
        conditionals: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out_obo: PathBuf,
        #[arg(long)]
        out_corpus: PathBuf,
    },
}

/// Stable error code plus a one-line message.
struct Failure {
    code: &'static str,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: e.code(),
            message: e.to_string(),
        }
    }
}

type CliResult<T> = Result<T, Failure>;

fn in_file<T>(path: &Path, r: ontometric::Result<T>) -> CliResult<T> {
    r.map_err(|e| Failure {
        code: e.code(),
        message: format!("{}: {e}", path.display()),
    })
}

fn open(path: &Path) -> CliResult<BufReader<File>> {
    let f = File::open(path).map_err(|e| Failure {
        code: "E-IO",
        message: format!("{}: {e}", path.display()),
    })?;
    Ok(BufReader::new(f))
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| Failure {
        code: "E-IO",
        message: format!("{}: {e}", path.display()),
    })
}

fn load_obo(path: &Path) -> CliResult<Ontology> {
    let (o, report) = in_file(path, parse_obo(open(path)?))?;
    if report.dropped_edges > 0 {
        log::warn!("{}: dropped {} edges to unknown terms", path.display(), report.dropped_edges);
    }
    Ok(o)
}

fn load_ia(path: &Path, o: &Ontology) -> CliResult<AccretionTable> {
    in_file(path, AccretionTable::read_tsv(open(path)?, o))
}

fn load_corpus(path: &Path, o: &Ontology, namespace: Option<&str>) -> CliResult<Vec<ontometric::Annotation>> {
    let ns = namespace.map(Namespace::from_obo);
    in_file(path, read_corpus(open(path)?, o, ns.as_ref()))
}

fn term_list(s: &str) -> Vec<&str> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .collect()
}

fn parse_step(s: &str) -> CliResult<StepFunction> {
    serde_json::from_str(s).map_err(|e| Failure {
        code: "E-PARSE",
        message: format!("step function {s:?}: {e}"),
    })
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Setdist { p, normalized, a, b } => {
            let (a, b) = match (a, b) {
                (Some(a), Some(b)) => (a, b),
                (None, None) => {
                    let mut lines = io::stdin().lock().lines();
                    let mut next = || -> CliResult<String> {
                        lines.next().transpose().map_err(Error::from)?.ok_or_else(|| Failure {
                            code: "E-PARSE",
                            message: "expected two lines on stdin".into(),
                        })
                    };
                    (next()?, next()?)
                }
                _ => {
                    return Err(Failure {
                        code: "E-PARAM",
                        message: "give both sets or neither".into(),
                    })
                }
            };
            let a: HashSet<&str> = a.split_whitespace().collect();
            let b: HashSet<&str> = b.split_whitespace().collect();
            let d = if normalized {
                set_distance_normalized(&a, &b, p)?
            } else {
                set_distance(&a, &b, p)?
            };
            println!("{d}");
        }
        Command::Semdist {
            ia,
            obo,
            p,
            normalized,
            f,
            g,
        } => {
            let o = load_obo(&obo)?;
            let table = load_ia(&ia, &o)?;
            let f = o.propagate(&term_list(&f))?;
            let g = o.propagate(&term_list(&g))?;
            o.check_same_namespace(&f, &g)?;
            let d = if normalized {
                semantic_distance_normalized(&table, &f, &g, p)?
            } else {
                semantic_distance(&table, &f, &g, p)?
            };
            println!("{d}");
        }
        Command::Funcdist { p, normalized, f, g } => {
            let (f, g) = (parse_step(&f)?, parse_step(&g)?);
            let d = if normalized {
                function_distance_normalized(&f, &g, p)?
            } else {
                function_distance(&f, &g, p)?
            };
            println!("{d}");
        }
        Command::IaEstimate {
            obo,
            corpus,
            smoothing,
            base,
            namespace,
            out,
            format,
        } => {
            let o = load_obo(&obo)?;
            let anns = load_corpus(&corpus, &o, namespace.as_deref())?;
            let table = estimate_accretion(&o, &anns, smoothing, base)?;
            let text = match format {
                Format::Tsv => table.to_tsv(),
                Format::Json => accretion_json(&o, &table),
            };
            write_file(&out, &text)?;
        }
        Command::Phylo {
            obo,
            ia,
            corpus,
            n,
            b,
            p,
            normalized,
            linkage,
            seed,
            namespace,
            out_matrix,
            out_tree,
            format,
        } => {
            let o = load_obo(&obo)?;
            let table = load_ia(&ia, &o)?;
            let anns = load_corpus(&corpus, &o, namespace.as_deref())?;
            let corpora = group_by_species(&o, anns)?;
            let cfg = BootstrapConfig {
                n,
                b,
                p,
                seed,
                metric: if normalized {
                    SemanticMetric::Normalized
                } else {
                    SemanticMetric::Unnormalized
                },
            };
            let m = species_distance_matrix(&corpora, &table, &cfg)?;
            let tree = agglomerate(&m, linkage)?;
            let matrix_text = match format {
                Format::Tsv => m.to_tsv(),
                Format::Json => json_line(&m),
            };
            write_file(&out_matrix, &matrix_text)?;
            write_file(&out_tree, &format!("{}\n", tree.to_newick(true)))?;
        }
        Command::Generate {
            tree,
            rate,
            proteins,
            terms,
            network,
            conditionals,
            seed,
            out_obo,
            out_corpus,
        } => {
            let tree = parse_newick(&tree)?;
            let network = match (network, conditionals) {
                (Some(obo), Some(cond)) => {
                    let o = load_obo(&obo)?;
                    let probs: BTreeMap<String, f64> =
                        serde_json::from_reader(open(&cond)?).map_err(|e| Failure {
                            code: "E-PARSE",
                            message: format!("{}: {e}", cond.display()),
                        })?;
                    BayesNet::new(o, &probs)?
                }
                _ => BayesNet::random(terms, &mut ChaCha8Rng::seed_from_u64(seed))?,
            };
            let spec = SyntheticSpec {
                tree,
                default_rate: rate,
                proteins_per_species: proteins,
                network,
            };
            let anns = generate_synthetic(&spec, seed)?;
            let o = spec.network.ontology();
            write_file(&out_obo, &write_obo(o))?;
            write_file(&out_corpus, &write_corpus(o, &anns))?;
        }
    }
    Ok(())
}

fn json_line<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

/// Same content as the TSV; infinite accretion is written as `null`.
fn accretion_json(o: &Ontology, table: &AccretionTable) -> String {
    let terms: Vec<serde_json::Value> = (0..o.len())
        .filter_map(|t| {
            table.entry(t).map(|e| {
                serde_json::json!({
                    "id": o.id(t),
                    "ia": e.ia,
                    "term_present": e.counts.term_present,
                    "parents_present": e.counts.parents_present,
                })
            })
        })
        .collect();
    json_line(&serde_json::json!({
        "log_base": table.log_base().as_str(),
        "smoothing": table.smoothing(),
        "terms": terms,
    }))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let _ = writeln!(io::stderr(), "error[{}]: {}", f.code, f.message);
            ExitCode::FAILURE
        }
    }
}
