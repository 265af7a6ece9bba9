//! Library for probing language models about causal structure.
//!
//! The crate bundles everything the `causal-probe` CLI is built from:
//!
//! - [`scm`] — exact representation and inference for finite-domain acyclic
//!   structural causal models, including interventions and answering
//!   interventional queries from an observational table plus a graph.
//! - [`graph`] — the four-state causal graph shared by all modules
//!   (absent / forward / backward / symmetric per unordered pair).
//! - [`datasets`] — benchmark datasets with ground-truth graphs.
//! - [`prompts`] — the five pairwise query templates, causal-chain prompts
//!   and their variants, chain-of-thought prefixes, and question banks.
//! - [`gateway`] — provider-agnostic chat/embedding access with durable
//!   caching, retries, rate limiting, and a scripted mock provider.
//! - [`verdicts`] — answer classification and the manual labeling round trip.
//! - [`discovery`] — pairwise probing of a dataset and graph assembly from
//!   verdict tables.
//! - [`metrics`] — SHD, SID, F1, sparsity, decisiveness, and the asymmetric
//!   decision score.
//! - [`knn`] — knowledge-base fact ingestion, templated statement embedding,
//!   a binary vector store, and 1-NN edge prediction.

pub mod datasets;
pub mod discovery;
pub mod gateway;
pub mod graph;
pub mod knn;
pub mod metrics;
pub mod prompts;
pub mod scm;
pub mod verdicts;
