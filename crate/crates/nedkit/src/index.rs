//! Inverted index over entity documents with TF-IDF scoring, plus
//! candidate generation for mentions (alias hits unioned with search
//! hits).
//!
//! The scoring formula is pinned so results are bit-reproducible:
//!
//! ```text
//! score(q, d) = (Σ_{t ∈ distinct(q), tf(t,d) > 0} sqrt(tf(t,d)) · idf(t)²)
//!               · coord(q, d) / sqrt(doc_len(d))
//! idf(t)      = 1 + ln(num_docs / (doc_freq(t) + 1))
//! coord(q, d) = matched distinct terms / total distinct terms
//! ```
//!
//! Distinct query terms keep first-appearance order, which fixes the
//! floating-point summation order.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::candidate_priors;
use crate::kb::{EntityId, KnowledgeBase};
use crate::textproc::doc_terms;

/// Header line of the persisted index format.
const INDEX_MAGIC: &str = "NEDIDX 1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvertedIndex {
    num_docs: usize,
    /// Content-token count per document (after stop-word removal).
    doc_len: BTreeMap<EntityId, usize>,
    /// term -> document -> term frequency; only nonzero entries stored.
    postings: BTreeMap<String, BTreeMap<EntityId, u32>>,
}

impl InvertedIndex {
    /// Indexes the stop-word-filtered, lowercased tokens of every entity
    /// document. Deterministic for a given knowledge base.
    pub fn build(kb: &KnowledgeBase) -> Self {
        let mut doc_len = BTreeMap::new();
        let mut postings: BTreeMap<String, BTreeMap<EntityId, u32>> = BTreeMap::new();
        for record in kb.entities() {
            let terms = doc_terms(&record.text);
            doc_len.insert(record.id.clone(), terms.len());
            for term in terms {
                *postings
                    .entry(term)
                    .or_default()
                    .entry(record.id.clone())
                    .or_insert(0) += 1;
            }
        }
        InvertedIndex {
            num_docs: doc_len.len(),
            doc_len,
            postings,
        }
    }

    pub fn num_docs(&self) -> usize {
        self.num_docs
    }

    pub fn doc_len(&self, id: &EntityId) -> Option<usize> {
        self.doc_len.get(id).copied()
    }

    pub fn doc_freq(&self, term: &str) -> usize {
        self.postings.get(term).map_or(0, BTreeMap::len)
    }

    pub fn term_frequency(&self, term: &str, id: &EntityId) -> u32 {
        self.postings
            .get(term)
            .and_then(|row| row.get(id))
            .copied()
            .unwrap_or(0)
    }

    /// Total corpus occurrences of `term`, summed over all documents.
    pub fn corpus_count(&self, term: &str) -> u64 {
        self.postings
            .get(term)
            .map_or(0, |row| row.values().map(|&tf| tf as u64).sum())
    }

    /// All indexed terms, ascending.
    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.postings.keys().map(String::as_str)
    }

    /// Mean content-token length of the indexed documents.
    pub fn avg_doc_len(&self) -> f64 {
        if self.num_docs == 0 {
            return 0.0;
        }
        self.doc_len.values().sum::<usize>() as f64 / self.num_docs as f64
    }

    pub fn idf(&self, term: &str) -> f64 {
        1.0 + (self.num_docs as f64 / (self.doc_freq(term) as f64 + 1.0)).ln()
    }

    /// TF-IDF relevance of the query tokens against one document.
    pub fn tfidf_score(&self, query_tokens: &[String], id: &EntityId) -> Result<f64> {
        if !self.doc_len.contains_key(id) {
            return Err(Error::EntityNotFound(id.to_string()));
        }
        Ok(self.score_known(&distinct_terms(query_tokens), id))
    }

    fn score_known(&self, distinct: &[&str], id: &EntityId) -> f64 {
        let mut matched = 0usize;
        let mut sum = 0.0f64;
        for &term in distinct {
            let tf = self.term_frequency(term, id);
            if tf > 0 {
                let idf = self.idf(term);
                sum += (tf as f64).sqrt() * idf * idf;
                matched += 1;
            }
        }
        if matched == 0 {
            return 0.0;
        }
        let coord = matched as f64 / distinct.len() as f64;
        sum * coord / (self.doc_len[id] as f64).sqrt()
    }

    /// Top-k documents by TF-IDF, score-descending with lexicographic
    /// entity-id tiebreak. Only documents sharing at least one term with
    /// the query appear; every such document scores above zero.
    pub fn search(&self, query_tokens: &[String], k: usize) -> Vec<(EntityId, f64)> {
        let distinct = distinct_terms(query_tokens);
        let mut hits: BTreeSet<&EntityId> = BTreeSet::new();
        for &term in &distinct {
            if let Some(row) = self.postings.get(term) {
                hits.extend(row.keys());
            }
        }
        let mut scored: Vec<(EntityId, f64)> = hits
            .into_iter()
            .map(|id| (id.clone(), self.score_known(&distinct, id)))
            .collect();
        scored.sort_by(|(ia, sa), (ib, sb)| {
            sb.partial_cmp(sa)
                .expect("scores are finite")
                .then_with(|| ia.cmp(ib))
        });
        scored.truncate(k);
        scored
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut out = String::from(INDEX_MAGIC);
        out.push('\n');
        out.push_str(&serde_json::to_string(self)?);
        out.push('\n');
        fs::write(path, out)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let data = fs::read_to_string(path)?;
        let Some((header, body)) = data.split_once('\n') else {
            return Err(Error::BadIndexFile("missing header line".into()));
        };
        if header.trim_end() != INDEX_MAGIC {
            return Err(Error::BadIndexFile(format!(
                "unsupported header {:?}, expected {INDEX_MAGIC:?}",
                header.trim_end()
            )));
        }
        serde_json::from_str(body).map_err(|e| Error::BadIndexFile(e.to_string()))
    }
}

/// Distinct terms in first-appearance order.
fn distinct_terms(query_tokens: &[String]) -> Vec<&str> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for t in query_tokens {
        if seen.insert(t.as_str()) {
            out.push(t.as_str());
        }
    }
    out
}

/// A knowledge-base entity hypothesized as the referent of a mention.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub entity_id: EntityId,
    /// True when the mention surface hit the alias table directly.
    pub name_matched: bool,
    /// TF-IDF score of the candidate query (surface + context) against
    /// this entity's document.
    pub relevance: f64,
    /// Link-popularity prior within this candidate set, in [0,1].
    pub prior: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct CandidateGenConfig {
    /// Search hits retained per mention.
    pub k: usize,
    /// Whether document context terms join the mention surface in the
    /// candidate search query.
    pub use_context: bool,
    /// Cap on context terms fed to the search.
    pub max_context_terms: usize,
}

impl Default for CandidateGenConfig {
    fn default() -> Self {
        CandidateGenConfig {
            k: 20,
            use_context: true,
            max_context_terms: 200,
        }
    }
}

/// Candidates for one mention surface: alias-table hits unioned with
/// top-k index search hits for surface-plus-context, deduplicated keeping
/// `name_matched`. Sorted by descending relevance, entity-id tiebreak.
/// Errors indicate a knowledge base / index mismatch.
pub fn generate_candidates(
    kb: &KnowledgeBase,
    index: &InvertedIndex,
    surface: &str,
    context_tokens: &[String],
    config: &CandidateGenConfig,
) -> Result<Vec<Candidate>> {
    let mut query: Vec<String> = doc_terms(surface);
    if config.use_context {
        query.extend(
            context_tokens
                .iter()
                .take(config.max_context_terms)
                .cloned(),
        );
    }

    let alias_hits = kb.alias_lookup(surface);
    let mut ids: BTreeSet<EntityId> = alias_hits.clone();
    for (id, _) in index.search(&query, config.k) {
        ids.insert(id);
    }

    // The link-popularity prior is defined over the candidates sharing the
    // surface; search-only candidates carry no prior mass.
    let priors = candidate_priors(kb, &alias_hits)?;
    let mut out = ids
        .iter()
        .map(|id| {
            Ok(Candidate {
                entity_id: id.clone(),
                name_matched: alias_hits.contains(id),
                relevance: index.tfidf_score(&query, id)?,
                prior: priors.get(id).copied().unwrap_or(0.0),
            })
        })
        .collect::<Result<Vec<Candidate>>>()?;
    out.sort_by(|a, b| {
        b.relevance
            .partial_cmp(&a.relevance)
            .expect("scores are finite")
            .then_with(|| a.entity_id.cmp(&b.entity_id))
    });
    Ok(out)
}
