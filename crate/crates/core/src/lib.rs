//! Metrics on sets, ontology annotations and functions, with accretion
//! estimation and bootstrap functional phylogeny.
//!
//! The family of distances here is built from two asymmetric discrepancies
//! combined by a p-norm. On sets the discrepancies are the sizes of `A - B`
//! and `B - A`; on annotations they are the information accreted by the
//! terms on either side; on step functions they are the integrals of the
//! positive and negative parts of `f - g`. Each has a normalized form with
//! values in `[0, 1]`.

pub mod accretion;
pub mod corpus;
pub mod error;
pub mod function;
pub mod obo;
pub mod ontology;
pub mod param;
pub mod phylo;
pub mod semantic;
pub mod set_metrics;
pub mod synthetic;
pub mod tree;

pub use accretion::{
    conditional, count_terms, estimate_accretion, information_content, AccretionEntry, AccretionTable, LogBase,
    TermCounts,
};
pub use corpus::{group_by_species, read_corpus, write_corpus, SpeciesCorpus};
pub use error::{Error, Result};
pub use function::{
    align, function_distance, function_distance_normalized, integrals, lemma_pointwise_checks, Integrals,
    StepFunction,
};
pub use obo::{parse_obo, parse_obo_str, write_obo};
pub use ontology::{Annotation, BuildReport, Namespace, Ontology, OntologyBuilder, Term, TermEntry, TermId, TermSet};
pub use param::PParam;
pub use phylo::{
    agglomerate, directional_distances, species_distance_matrix, BootstrapConfig, DistanceMatrix, Linkage,
};
pub use semantic::{ru_mi, semantic_distance, semantic_distance_normalized, RuMi, SemanticMetric};
pub use set_metrics::{
    asymmetric_differences, binary_encoding, czekanowsky_dice_distance, maryland_bridge_distance,
    minkowski_distance, set_distance, set_distance_normalized,
};
pub use synthetic::{generate_synthetic, BayesNet, SyntheticSpec};
pub use tree::{parse_newick, ClusterTree, NewickNode};
