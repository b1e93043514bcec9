//! Topic-model disambiguation. Every candidate entity is a topic seeded
//! with the term frequencies of its knowledge-base document; a domain-field
//! topic, an unseeded NIL topic, and a corpus-wide background topic round
//! out the model. A per-token switch decides background vs topical, and a
//! collapsed Gibbs sampler infers the assignment posterior over the query
//! document. The label ranked first is the candidate (or NIL) whose topic
//! claims the largest mean share of topical tokens.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::deadline::Deadline;
use crate::error::{Error, Result};
use crate::index::{generate_candidates, Candidate, CandidateGenConfig, InvertedIndex};
use crate::kb::{DisambiguationResult, KnowledgeBase, Label, Query};
use crate::textproc::{doc_terms, normalize_name};

/// Dirichlet/Beta pseudo-counts. `alpha*` weight topics in the document,
/// `beta*` weight words in topics, `gamma1`/`gamma2` weight the
/// background/topical sides of the per-token switch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Hyperparameters {
    pub alpha: f64,
    pub alpha_df: f64,
    pub beta: f64,
    pub beta_df: f64,
    pub beta_bg: f64,
    pub gamma1: f64,
    pub gamma2: f64,
}

impl Default for Hyperparameters {
    fn default() -> Self {
        Hyperparameters {
            alpha: 0.001,
            alpha_df: 0.01,
            beta: 0.001,
            beta_df: 0.01,
            beta_bg: 0.1,
            gamma1: 0.0003,
            gamma2: 0.001,
        }
    }
}

impl Hyperparameters {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("alpha", self.alpha),
            ("alpha_df", self.alpha_df),
            ("beta", self.beta),
            ("beta_df", self.beta_df),
            ("beta_bg", self.beta_bg),
            ("gamma1", self.gamma1),
            ("gamma2", self.gamma2),
        ];
        for (name, value) in fields {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::Config(format!(
                    "hyperparameter {name} must be strictly positive, got {value}"
                )));
            }
        }
        Ok(())
    }
}

/// Inference schedule. Samples are recorded after `burn_in` sweeps, every
/// `sample_every`-th sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SamplerConfig {
    pub sweeps: usize,
    pub burn_in: usize,
    pub sample_every: usize,
    pub seed: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            sweeps: 500,
            burn_in: 200,
            sample_every: 10,
            seed: 0,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sample_every == 0 {
            return Err(Error::Config("sample_every must be at least 1".into()));
        }
        if self.sweeps < self.burn_in + self.sample_every {
            return Err(Error::Config(format!(
                "sweeps ({}) must cover burn_in ({}) plus at least one sampling interval ({})",
                self.sweeps, self.burn_in, self.sample_every
            )));
        }
        Ok(())
    }
}

/// Identity of a topical topic. The background topic is not listed here;
/// it is reachable only through the switch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TopicKind {
    Entity(crate::kb::EntityId),
    DomainField,
    Nil,
}

/// Per-token state: either the background side of the switch or one of
/// the topical topics (index into `TopicModelState::topics`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Assignment {
    Background,
    Topical(usize),
}

/// Collapsed sampler state for a single query document.
///
/// Seed counts are fixed pseudo-observations and never change during
/// sampling; all mutable counts cover only the query's own tokens.
#[derive(Debug, Clone)]
pub struct TopicModelState {
    pub(crate) topics: Vec<TopicKind>,
    pub(crate) hp: Hyperparameters,
    /// Distinct query terms; term ids index into per-topic rows.
    pub(crate) terms: Vec<String>,
    /// Query document as term ids, in token order.
    pub(crate) tokens: Vec<usize>,
    pub(crate) assignments: Vec<Assignment>,
    /// |index vocabulary ∪ query terms|, the smoothing support size.
    pub(crate) vocab_size: usize,
    // Per topical topic, parallel to `topics`.
    pub(crate) alpha: Vec<f64>,
    pub(crate) beta: Vec<f64>,
    pub(crate) seed: Vec<Vec<f64>>,
    pub(crate) seed_total: Vec<f64>,
    pub(crate) word_counts: Vec<Vec<u32>>,
    pub(crate) word_total: Vec<u32>,
    pub(crate) doc_topic: Vec<u32>,
    pub(crate) alpha_sum: f64,
    // Background topic.
    pub(crate) bg_seed: Vec<f64>,
    pub(crate) bg_seed_total: f64,
    pub(crate) bg_word_counts: Vec<u32>,
    pub(crate) bg_word_total: u32,
    pub(crate) n_bg: u32,
    pub(crate) n_top: u32,
}

/// Snapshot of the document-level counts at one recorded sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct TopicSample {
    pub doc_topic: Vec<u32>,
    pub n_top: u32,
}

/// One topic per candidate entity (seeded with that entity's document
/// terms), plus the domain-field, NIL, and background topics. Token
/// assignments start uniformly at random.
pub fn build_model<R: Rng>(
    query: &Query,
    candidates: &[Candidate],
    kb: &KnowledgeBase,
    index: &InvertedIndex,
    hp: &Hyperparameters,
    rng: &mut R,
) -> Result<TopicModelState> {
    hp.validate()?;
    let doc = doc_terms(&query.context_document);
    if doc.is_empty() {
        return Err(Error::EmptyQueryDocument);
    }

    let mut term_ids: BTreeMap<&str, usize> = BTreeMap::new();
    let mut terms: Vec<String> = Vec::new();
    let mut tokens = Vec::with_capacity(doc.len());
    for word in &doc {
        let next = terms.len();
        let id = *term_ids.entry(word.as_str()).or_insert(next);
        if id == next {
            terms.push(word.clone());
        }
        tokens.push(id);
    }

    let novel_terms = terms.iter().filter(|t| index.doc_freq(t) == 0).count();
    let vocab_size = index.terms().count() + novel_terms;

    let mut topics: Vec<TopicKind> = Vec::with_capacity(candidates.len() + 2);
    let mut alpha = Vec::new();
    let mut beta = Vec::new();
    let mut seed = Vec::new();
    let mut seed_total = Vec::new();
    for candidate in candidates {
        let id = &candidate.entity_id;
        kb.get(id)?;
        seed.push(
            terms
                .iter()
                .map(|t| f64::from(index.term_frequency(t, id)))
                .collect(),
        );
        seed_total.push(index.doc_len(id).unwrap_or(0) as f64);
        topics.push(TopicKind::Entity(id.clone()));
        alpha.push(hp.alpha);
        beta.push(hp.beta);
    }
    topics.push(TopicKind::DomainField);
    alpha.push(hp.alpha_df);
    beta.push(hp.beta_df);
    seed.push(vec![0.0; terms.len()]);
    seed_total.push(0.0);
    topics.push(TopicKind::Nil);
    alpha.push(hp.alpha);
    beta.push(hp.beta);
    seed.push(vec![0.0; terms.len()]);
    seed_total.push(0.0);
    let alpha_sum: f64 = alpha.iter().sum();

    // Background seeds are corpus term frequencies scaled down to one
    // average-length document.
    let num_docs = index.num_docs() as f64;
    let bg_seed: Vec<f64> = terms
        .iter()
        .map(|t| {
            if num_docs > 0.0 {
                index.corpus_count(t) as f64 / num_docs
            } else {
                0.0
            }
        })
        .collect();
    let bg_seed_total = index.avg_doc_len();

    let topical = topics.len();
    let mut state = TopicModelState {
        topics,
        hp: *hp,
        assignments: Vec::with_capacity(tokens.len()),
        vocab_size,
        alpha,
        beta,
        seed,
        seed_total,
        word_counts: vec![vec![0; terms.len()]; topical],
        word_total: vec![0; topical],
        doc_topic: vec![0; topical],
        alpha_sum,
        bg_seed,
        bg_seed_total,
        bg_word_counts: vec![0; terms.len()],
        bg_word_total: 0,
        n_bg: 0,
        n_top: 0,
        terms,
        tokens,
    };
    for i in 0..state.tokens.len() {
        let pick = rng.gen_range(0..=topical);
        let assignment = if pick == topical {
            Assignment::Background
        } else {
            Assignment::Topical(pick)
        };
        state.assignments.push(assignment);
        state.increment(i, assignment);
    }
    debug_assert!(state.counts_consistent());
    Ok(state)
}

impl TopicModelState {
    pub fn topics(&self) -> &[TopicKind] {
        &self.topics
    }

    pub fn assignments(&self) -> &[Assignment] {
        &self.assignments
    }

    pub fn token_count(&self) -> usize {
        self.tokens.len()
    }

    /// Count conservation: every query token is counted exactly once, on
    /// exactly one side of the switch.
    pub fn counts_consistent(&self) -> bool {
        let tokens = self.tokens.len() as u32;
        self.n_bg + self.n_top == tokens
            && self.doc_topic.iter().sum::<u32>() == self.n_top
            && self.bg_word_total == self.n_bg
            && self.bg_word_counts.iter().sum::<u32>() == self.bg_word_total
            && self
                .word_counts
                .iter()
                .zip(&self.word_total)
                .zip(&self.doc_topic)
                .all(|((row, total), doc)| row.iter().sum::<u32>() == *total && total == doc)
    }

    fn increment(&mut self, token: usize, assignment: Assignment) {
        let w = self.tokens[token];
        match assignment {
            Assignment::Background => {
                self.bg_word_counts[w] += 1;
                self.bg_word_total += 1;
                self.n_bg += 1;
            }
            Assignment::Topical(t) => {
                self.word_counts[t][w] += 1;
                self.word_total[t] += 1;
                self.doc_topic[t] += 1;
                self.n_top += 1;
            }
        }
    }

    fn decrement(&mut self, token: usize, assignment: Assignment) {
        let w = self.tokens[token];
        match assignment {
            Assignment::Background => {
                self.bg_word_counts[w] -= 1;
                self.bg_word_total -= 1;
                self.n_bg -= 1;
            }
            Assignment::Topical(t) => {
                self.word_counts[t][w] -= 1;
                self.word_total[t] -= 1;
                self.doc_topic[t] -= 1;
                self.n_top -= 1;
            }
        }
    }

    /// Unnormalized probability of assigning term `w` to the background,
    /// with the token itself already decremented.
    fn background_weight(&self, w: usize) -> f64 {
        let hp = &self.hp;
        (f64::from(self.n_bg) + hp.gamma1)
            * (f64::from(self.bg_word_counts[w]) + self.bg_seed[w] + hp.beta_bg)
            / (f64::from(self.bg_word_total)
                + self.bg_seed_total
                + self.vocab_size as f64 * hp.beta_bg)
    }

    /// Unnormalized probability of assigning term `w` to topical topic
    /// `t`. The (n_top + alpha_sum) divisor varies with the switch counts
    /// and therefore stays.
    fn topical_weight(&self, t: usize, w: usize) -> f64 {
        let hp = &self.hp;
        (f64::from(self.n_top) + hp.gamma2) * (f64::from(self.doc_topic[t]) + self.alpha[t])
            / (f64::from(self.n_top) + self.alpha_sum)
            * (f64::from(self.word_counts[t][w]) + self.seed[t][w] + self.beta[t])
            / (f64::from(self.word_total[t])
                + self.seed_total[t]
                + self.vocab_size as f64 * self.beta[t])
    }

    /// One full sweep: every token in order is decremented, resampled
    /// from its exact conditional, and reincremented.
    pub fn gibbs_sweep<R: Rng>(&mut self, rng: &mut R) {
        let topical = self.topics.len();
        let mut weights = vec![0.0f64; topical + 1];
        for i in 0..self.tokens.len() {
            let w = self.tokens[i];
            self.decrement(i, self.assignments[i]);

            for (t, slot) in weights.iter_mut().take(topical).enumerate() {
                *slot = self.topical_weight(t, w);
            }
            weights[topical] = self.background_weight(w);
            let total: f64 = weights.iter().sum();

            let mut draw = rng.gen::<f64>() * total;
            let mut pick = topical;
            for (j, weight) in weights.iter().enumerate() {
                draw -= weight;
                if draw < 0.0 {
                    pick = j;
                    break;
                }
            }
            let assignment = if pick == topical {
                Assignment::Background
            } else {
                Assignment::Topical(pick)
            };
            self.assignments[i] = assignment;
            self.increment(i, assignment);
        }
        debug_assert!(self.counts_consistent());
    }
}

/// Runs the configured sweeps, recording document-count snapshots after
/// burn-in. The deadline is checked before every sweep.
pub fn run_sampler<R: Rng>(
    state: &mut TopicModelState,
    config: &SamplerConfig,
    rng: &mut R,
    deadline: &Deadline,
) -> Result<Vec<TopicSample>> {
    config.validate()?;
    let mut samples = Vec::new();
    for sweep in 1..=config.sweeps {
        deadline.check()?;
        state.gibbs_sweep(rng);
        if sweep > config.burn_in && (sweep - config.burn_in) % config.sample_every == 0 {
            samples.push(TopicSample {
                doc_topic: state.doc_topic.clone(),
                n_top: state.n_top,
            });
        }
    }
    Ok(samples)
}

/// Candidate and NIL labels scored by their mean share of topical tokens
/// across recorded samples; the domain-field and background topics are
/// not labels. With no candidate topics NIL is the only label.
pub fn rank_labels(state: &TopicModelState, samples: &[TopicSample]) -> Vec<(Label, f64)> {
    let labels: Vec<(usize, Label)> = state
        .topics
        .iter()
        .enumerate()
        .filter_map(|(t, kind)| match kind {
            TopicKind::Entity(id) => Some((t, Label::Entity(id.clone()))),
            TopicKind::Nil => Some((t, Label::Nil)),
            TopicKind::DomainField => None,
        })
        .collect();
    if labels.len() == 1 {
        return vec![(Label::Nil, 1.0)];
    }
    assert!(!samples.is_empty(), "rank_labels needs a recorded sample");

    let mut ranked: Vec<(Label, f64)> = labels
        .into_iter()
        .map(|(t, label)| {
            let mean = samples
                .iter()
                .map(|s| {
                    (f64::from(s.doc_topic[t]) + state.alpha[t])
                        / (f64::from(s.n_top) + state.alpha_sum)
                })
                .sum::<f64>()
                / samples.len() as f64;
            (label, mean)
        })
        .collect();
    DisambiguationResult::sort_ranked(&mut ranked);
    ranked
}

/// Everything the topic strategy needs beyond the KB and index.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct TopicConfig {
    pub hp: Hyperparameters,
    pub sampler: SamplerConfig,
    pub candidates: CandidateGenConfig,
}

/// Full query pipeline: preprocess the document, generate candidates for
/// the query name with the document as context, sample, rank.
pub fn disambiguate_query(
    kb: &KnowledgeBase,
    index: &InvertedIndex,
    query: &Query,
    config: &TopicConfig,
    deadline: &Deadline,
) -> Result<DisambiguationResult> {
    if normalize_name(&query.name).is_empty() {
        return Err(Error::InvalidQuery(format!(
            "query {} has an empty name",
            query.query_id
        )));
    }
    let context = doc_terms(&query.context_document);
    let candidates = generate_candidates(kb, index, &query.name, &context, &config.candidates)?;
    deadline.check()?;

    let mut rng = ChaCha8Rng::seed_from_u64(config.sampler.seed);
    let mut state = build_model(query, &candidates, kb, index, &config.hp, &mut rng)?;
    let samples = run_sampler(&mut state, &config.sampler, &mut rng, deadline)?;
    let ranked = rank_labels(&state, &samples);
    Ok(DisambiguationResult {
        query_id: query.query_id.clone(),
        ranked,
        annotations: None,
    })
}
