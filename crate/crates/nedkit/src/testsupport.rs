//! Independent reference implementations used as test oracles. These work
//! by naive enumeration instead of the production data structures; tests
//! require the production paths to match them exactly (search, graph
//! objective) or within stated tolerances (sampling).

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use crate::graph::MentionEntityGraph;
use crate::kb::{EntityId, KnowledgeBase};
use crate::textproc::doc_terms;
use crate::topic::{Assignment, TopicModelState};

/// Scores every document by scanning it directly, no postings involved.
/// The arithmetic deliberately mirrors the index scorer expression by
/// expression; the tests demand exact equality, so keep them in sync.
pub fn brute_force_search(kb: &KnowledgeBase, query_tokens: &[String]) -> Vec<(EntityId, f64)> {
    let mut distinct: Vec<&str> = Vec::new();
    for t in query_tokens {
        if !distinct.iter().any(|d| *d == t.as_str()) {
            distinct.push(t.as_str());
        }
    }

    let docs: Vec<(EntityId, Vec<String>)> = kb
        .entities()
        .map(|r| (r.id.clone(), doc_terms(&r.text)))
        .collect();
    let num_docs = docs.len() as f64;

    let mut out: Vec<(EntityId, f64)> = Vec::new();
    for (id, doc) in &docs {
        let mut matched = 0usize;
        let mut sum = 0.0f64;
        for &term in &distinct {
            let tf = doc.iter().filter(|w| w.as_str() == term).count() as u32;
            if tf > 0 {
                let df = docs
                    .iter()
                    .filter(|(_, d)| d.iter().any(|w| w.as_str() == term))
                    .count();
                let idf = 1.0 + (num_docs / (df as f64 + 1.0)).ln();
                sum += (tf as f64).sqrt() * idf * idf;
                matched += 1;
            }
        }
        if matched > 0 {
            let coord = matched as f64 / distinct.len() as f64;
            out.push((id.clone(), sum * coord / (doc.len() as f64).sqrt()));
        }
    }
    out.sort_by(|(ia, sa), (ib, sb)| {
        sb.partial_cmp(sa)
            .expect("scores are finite")
            .then_with(|| ia.cmp(ib))
    });
    out
}

/// Term frequencies of a text, counted naively. Used by sampling oracles.
pub fn naive_term_frequencies(text: &str) -> BTreeMap<String, u64> {
    let mut tf = BTreeMap::new();
    for term in doc_terms(text) {
        *tf.entry(term).or_insert(0) += 1;
    }
    tf
}

/// Minimum weighted degree of the subgraph induced by one joint
/// assignment: nodes are the distinct assigned entities; each node's
/// degree sums the me weights of the mentions assigned to it plus its ee
/// weights to the other assigned entities. `None` when nothing was
/// assigned.
pub fn assignment_objective(
    graph: &MentionEntityGraph,
    assignment: &[Option<EntityId>],
) -> Option<f64> {
    let chosen: BTreeSet<&EntityId> = assignment.iter().flatten().collect();
    if chosen.is_empty() {
        return None;
    }
    let mut minimum = f64::INFINITY;
    for entity in &chosen {
        let mut degree = 0.0;
        for (m, pick) in assignment.iter().enumerate() {
            if pick.as_ref() == Some(*entity) {
                degree += graph.me_edges[m][*entity];
            }
        }
        for other in &chosen {
            if other != entity {
                degree += graph.ee_weight(entity, other);
            }
        }
        minimum = minimum.min(degree);
    }
    Some(minimum)
}

/// Best achievable [`assignment_objective`] over every joint assignment,
/// found by exhaustive enumeration. Only tractable for tiny graphs.
pub fn optimal_assignment_objective(graph: &MentionEntityGraph) -> Option<f64> {
    let choices: Vec<Vec<&EntityId>> = graph
        .me_edges
        .iter()
        .map(|row| row.keys().collect())
        .collect();
    let total: usize = choices.iter().map(|c| c.len().max(1)).product();

    let mut best: Option<f64> = None;
    for mut code in 0..total {
        let assignment: Vec<Option<EntityId>> = choices
            .iter()
            .map(|c| {
                if c.is_empty() {
                    return None;
                }
                let pick = c[code % c.len()].clone();
                code /= c.len();
                Some(pick)
            })
            .collect();
        if let Some(objective) = assignment_objective(graph, &assignment) {
            best = Some(best.map_or(objective, |b: f64| b.max(objective)));
        }
    }
    best
}

/// Exact assignment posterior of a freshly built topic model, by direct
/// enumeration of every joint (switch, topic) configuration. Probabilities
/// come from the sequential form of the collapsed joint, which is
/// exchangeable over tokens; the sampler's per-token conditionals must
/// agree with it. Only feasible for a handful of tokens.
pub fn enumerate_topic_posterior(state: &TopicModelState) -> BTreeMap<Vec<Assignment>, f64> {
    let topical = state.topics.len();
    let options = topical + 1;
    let tokens = &state.tokens;
    let hp = &state.hp;
    let vocab = state.vocab_size as f64;

    let mut posterior: BTreeMap<Vec<Assignment>, f64> = BTreeMap::new();
    let total_configs = options
        .checked_pow(tokens.len() as u32)
        .expect("enumeration stays small");
    let mut normalizer = 0.0f64;
    for mut code in 0..total_configs {
        let assignment: Vec<Assignment> = (0..tokens.len())
            .map(|_| {
                let pick = code % options;
                code /= options;
                if pick == topical {
                    Assignment::Background
                } else {
                    Assignment::Topical(pick)
                }
            })
            .collect();

        let terms = state.terms.len();
        let mut n_bg = 0.0f64;
        let mut n_top = 0.0f64;
        let mut doc_topic = vec![0.0f64; topical];
        let mut counts = vec![vec![0.0f64; terms]; topical];
        let mut totals = vec![0.0f64; topical];
        let mut bg_counts = vec![0.0f64; terms];
        let mut bg_total = 0.0f64;

        let mut p = 1.0f64;
        for (i, (&w, &a)) in tokens.iter().zip(&assignment).enumerate() {
            let switch_denom = i as f64 + hp.gamma1 + hp.gamma2;
            match a {
                Assignment::Background => {
                    p *= (n_bg + hp.gamma1) / switch_denom
                        * (bg_counts[w] + state.bg_seed[w] + hp.beta_bg)
                        / (bg_total + state.bg_seed_total + vocab * hp.beta_bg);
                    n_bg += 1.0;
                    bg_counts[w] += 1.0;
                    bg_total += 1.0;
                }
                Assignment::Topical(t) => {
                    p *= (n_top + hp.gamma2) / switch_denom * (doc_topic[t] + state.alpha[t])
                        / (n_top + state.alpha_sum)
                        * (counts[t][w] + state.seed[t][w] + state.beta[t])
                        / (totals[t] + state.seed_total[t] + vocab * state.beta[t]);
                    n_top += 1.0;
                    doc_topic[t] += 1.0;
                    counts[t][w] += 1.0;
                    totals[t] += 1.0;
                }
            }
        }
        normalizer += p;
        posterior.insert(assignment, p);
    }
    for p in posterior.values_mut() {
        *p /= normalizer;
    }
    posterior
}
