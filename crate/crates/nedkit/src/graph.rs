//! Collective graph-coherence disambiguation. All mentions of a document
//! are resolved jointly: candidates become nodes of a mention-entity
//! graph, link-overlap coherence connects entity nodes, and a greedy
//! densification keeps the subgraph whose weakest node is strongest.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::deadline::Deadline;
use crate::error::{Error, Result};
use crate::index::{generate_candidates, Candidate, CandidateGenConfig, InvertedIndex};
use crate::kb::{Annotation, DisambiguationResult, EntityId, KnowledgeBase, Label};
use crate::textproc::{is_stopword, spot_mentions, tokenize, Mention, Token};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct GraphConfig {
    /// Weight of the link-popularity prior in mention-entity edges.
    pub w_prior: f64,
    /// Weight of the normalized TF-IDF relevance in mention-entity edges.
    pub w_context: f64,
    /// Weight applied to coherence in entity-entity edges.
    pub w_coherence: f64,
    /// Candidates per mention densification must never drop below.
    pub min_candidates_kept: usize,
    pub candidates: CandidateGenConfig,
}

impl Default for GraphConfig {
    fn default() -> Self {
        GraphConfig {
            w_prior: 0.3,
            w_context: 0.4,
            w_coherence: 0.3,
            min_candidates_kept: 1,
            candidates: CandidateGenConfig::default(),
        }
    }
}

impl GraphConfig {
    pub fn validate(&self) -> Result<()> {
        if self.w_prior < 0.0 || self.w_context < 0.0 || self.w_coherence < 0.0 {
            return Err(Error::Config("graph weights must be nonnegative".into()));
        }
        let sum = self.w_prior + self.w_context + self.w_coherence;
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "graph weights must sum to 1, got {sum}"
            )));
        }
        if self.min_candidates_kept < 1 {
            return Err(Error::Config("min_candidates_kept must be >= 1".into()));
        }
        Ok(())
    }
}

/// Normalized inlink shares over one candidate set; uniform when no
/// candidate has any inlinks. Empty input yields an empty map.
pub(crate) fn candidate_priors(
    kb: &KnowledgeBase,
    candidates: &BTreeSet<EntityId>,
) -> Result<BTreeMap<EntityId, f64>> {
    let mut counts: BTreeMap<EntityId, f64> = BTreeMap::new();
    for id in candidates {
        counts.insert(id.clone(), kb.get(id)?.inlinks.len() as f64);
    }
    let total: f64 = counts.values().sum();
    Ok(counts
        .into_iter()
        .map(|(id, n)| {
            let p = if total > 0.0 {
                n / total
            } else {
                1.0 / candidates.len() as f64
            };
            (id, p)
        })
        .collect())
}

/// Link-popularity prior of `entity` given a mention surface: its inlink
/// share among the candidates the alias table returns for that surface.
/// Entities outside that candidate set get 0.
pub fn prior(kb: &KnowledgeBase, surface: &str, entity: &EntityId) -> Result<f64> {
    kb.get(entity)?;
    let candidates = kb.alias_lookup(surface);
    if !candidates.contains(entity) {
        return Ok(0.0);
    }
    Ok(candidate_priors(kb, &candidates)?[entity])
}

/// Inlink-overlap relatedness of two entities in [0,1]: 1 for identity, 0
/// for disjoint inlink sets, otherwise
/// 1 − (ln max(|L1|,|L2|) − ln |L1∩L2|) / (ln |E| − ln min(|L1|,|L2|)),
/// clamped. A non-positive denominator (tiny KB) saturates to 1.
pub fn coherence(kb: &KnowledgeBase, e1: &EntityId, e2: &EntityId) -> Result<f64> {
    let l1 = &kb.get(e1)?.inlinks;
    let l2 = &kb.get(e2)?.inlinks;
    if e1 == e2 {
        return Ok(1.0);
    }
    let inter = l1.intersection(l2).count() as f64;
    if inter == 0.0 {
        return Ok(0.0);
    }
    let larger = l1.len().max(l2.len()) as f64;
    let smaller = l1.len().min(l2.len()) as f64;
    let denom = (kb.total_entities() as f64).ln() - smaller.ln();
    if denom <= 0.0 {
        return Ok(1.0);
    }
    Ok((1.0 - (larger.ln() - inter.ln()) / denom).clamp(0.0, 1.0))
}

/// Joint disambiguation graph for one document. Mention-entity edges are
/// keyed per mention; an entity is a node iff it is some mention's
/// candidate, so every node has at least one incident me edge. Entity
/// pairs are stored with the smaller id first and only when their weight
/// is positive.
#[derive(Debug, Clone, PartialEq)]
pub struct MentionEntityGraph {
    pub mentions: Vec<Mention>,
    /// entity -> mixed prior/context weight, one map per mention. An empty
    /// map means the mention has no candidates (NIL downstream).
    pub me_edges: Vec<BTreeMap<EntityId, f64>>,
    /// (a, b) with a < b -> coherence-derived weight > 0.
    pub ee_edges: BTreeMap<(EntityId, EntityId), f64>,
}

fn ee_key(a: &EntityId, b: &EntityId) -> (EntityId, EntityId) {
    if a <= b {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    }
}

impl MentionEntityGraph {
    pub fn entity_nodes(&self) -> BTreeSet<EntityId> {
        self.me_edges
            .iter()
            .flat_map(|row| row.keys().cloned())
            .collect()
    }

    pub fn ee_weight(&self, a: &EntityId, b: &EntityId) -> f64 {
        if a == b {
            return 0.0;
        }
        self.ee_edges.get(&ee_key(a, b)).copied().unwrap_or(0.0)
    }

    /// Sum of all incident mention-entity and entity-entity weights,
    /// counting only edges to entities in `active`.
    pub fn weighted_degree(&self, entity: &EntityId, active: &BTreeSet<EntityId>) -> f64 {
        let mut degree = 0.0;
        for row in &self.me_edges {
            if let Some(w) = row.get(entity) {
                degree += w;
            }
        }
        for other in active {
            if other != entity {
                degree += self.ee_weight(entity, other);
            }
        }
        degree
    }
}

/// Builds the joint graph from per-mention candidate lists.
/// me weight = w_prior·prior + w_context·(relevance normalized to [0,1]
/// within the mention); ee weight = w_coherence·coherence, zero-weight
/// pairs omitted.
pub fn build_graph(
    kb: &KnowledgeBase,
    mention_candidates: Vec<(Mention, Vec<Candidate>)>,
    config: &GraphConfig,
) -> Result<MentionEntityGraph> {
    config.validate()?;
    let mut mentions = Vec::with_capacity(mention_candidates.len());
    let mut me_edges = Vec::with_capacity(mention_candidates.len());
    for (mention, candidates) in mention_candidates {
        let max_relevance = candidates.iter().map(|c| c.relevance).fold(0.0, f64::max);
        let mut row = BTreeMap::new();
        for c in &candidates {
            let context = if max_relevance > 0.0 {
                c.relevance / max_relevance
            } else {
                0.0
            };
            row.insert(
                c.entity_id.clone(),
                config.w_prior * c.prior + config.w_context * context,
            );
        }
        mentions.push(mention);
        me_edges.push(row);
    }

    let graph = MentionEntityGraph {
        mentions,
        me_edges,
        ee_edges: BTreeMap::new(),
    };
    let nodes: Vec<EntityId> = graph.entity_nodes().into_iter().collect();
    let mut ee_edges = BTreeMap::new();
    for (i, a) in nodes.iter().enumerate() {
        for b in &nodes[i + 1..] {
            let w = config.w_coherence * coherence(kb, a, b)?;
            if w > 0.0 {
                ee_edges.insert((a.clone(), b.clone()), w);
            }
        }
    }
    Ok(MentionEntityGraph { ee_edges, ..graph })
}

/// What densification produced: the per-mention assignment plus the
/// objective value of the retained subgraph.
#[derive(Debug, Clone, PartialEq)]
pub struct DensifyOutcome {
    /// Chosen entity per mention, parallel to the graph's mentions.
    /// `None` for mentions without candidates.
    pub assignment: Vec<Option<EntityId>>,
    /// Minimum weighted degree over the retained entity nodes; `None`
    /// when the graph had no entity nodes at all.
    pub objective: Option<f64>,
}

/// Greedy densification. Repeatedly removes the entity node of smallest
/// weighted degree (lexicographic id on ties) among those that are not
/// within `min_candidates_kept` of exhausting any mention, tracking the
/// state that maximizes the minimum weighted degree; on ties the later,
/// already-thinned state wins. Each mention then takes its highest
/// me-weight survivor (smaller id on ties); candidate-less mentions map
/// to `None`.
pub fn densify(graph: &MentionEntityGraph, config: &GraphConfig) -> DensifyOutcome {
    let mut active = graph.entity_nodes();
    let mut best_active = active.clone();
    let mut best_objective = f64::NEG_INFINITY;

    while !active.is_empty() {
        let objective = active
            .iter()
            .map(|e| graph.weighted_degree(e, &active))
            .fold(f64::INFINITY, f64::min);
        if objective >= best_objective {
            best_objective = objective;
            best_active = active.clone();
        }

        let victim = active
            .iter()
            .filter(|e| {
                graph.me_edges.iter().all(|row| {
                    !row.contains_key(*e)
                        || row.keys().filter(|k| active.contains(*k)).count()
                            > config.min_candidates_kept
                })
            })
            .map(|e| (graph.weighted_degree(e, &active), e.clone()))
            .min_by(|(da, ea), (db, eb)| {
                da.partial_cmp(db)
                    .expect("weights are finite")
                    .then_with(|| ea.cmp(eb))
            });
        match victim {
            Some((_, e)) => active.remove(&e),
            None => break,
        };
    }

    let assignment = graph
        .me_edges
        .iter()
        .map(|row| {
            if row.is_empty() {
                return None;
            }
            let survivors: Vec<(&EntityId, f64)> = row
                .iter()
                .filter(|(e, _)| best_active.contains(*e))
                .map(|(e, w)| (e, *w))
                .collect();
            debug_assert!(
                !survivors.is_empty(),
                "densify kept at least one candidate per mention"
            );
            survivors
                .into_iter()
                .max_by(|(ea, wa), (eb, wb)| {
                    wa.partial_cmp(wb)
                        .expect("weights are finite")
                        .then_with(|| eb.cmp(ea))
                })
                .map(|(e, _)| e.clone())
        })
        .collect();
    let objective = if best_objective == f64::NEG_INFINITY {
        None
    } else {
        Some(best_objective)
    };
    DensifyOutcome {
        assignment,
        objective,
    }
}

/// Full document pipeline: spot mentions, generate candidates, build the
/// graph, densify, and report distinct assigned entities ranked by their
/// strongest mention-entity weight. Documents yielding no assignment rank
/// NIL alone.
pub fn disambiguate_document(
    kb: &KnowledgeBase,
    index: &InvertedIndex,
    query_id: &str,
    text: &str,
    config: &GraphConfig,
    deadline: &Deadline,
) -> Result<DisambiguationResult> {
    config.validate()?;
    let tokens = tokenize(text);
    let context: Vec<String> = tokens
        .iter()
        .filter(|t| !is_stopword(&t.surface))
        .map(Token::lower)
        .collect();
    let mentions = spot_mentions(&tokens, kb.aliases(), None);
    deadline.check()?;

    let mut pairs = Vec::with_capacity(mentions.len());
    for mention in mentions {
        // Only surface-matching candidates become graph nodes. Search-only
        // hits would let one strongly-relevant article absorb unrelated
        // mentions, since the min-degree objective rewards piling mentions
        // onto a single node.
        let candidates: Vec<Candidate> =
            generate_candidates(kb, index, &mention.surface, &context, &config.candidates)?
                .into_iter()
                .filter(|c| c.name_matched)
                .collect();
        pairs.push((mention, candidates));
        deadline.check()?;
    }
    let graph = build_graph(kb, pairs, config)?;
    deadline.check()?;
    let assignment = densify(&graph, config).assignment;

    let mut annotations = Vec::new();
    let mut strongest: BTreeMap<EntityId, f64> = BTreeMap::new();
    for (m, chosen) in assignment.iter().enumerate() {
        let Some(entity) = chosen else { continue };
        let weight = graph.me_edges[m][entity];
        strongest
            .entry(entity.clone())
            .and_modify(|w| *w = w.max(weight))
            .or_insert(weight);
        if let Some((start, end)) = graph.mentions[m].byte_span(&tokens) {
            annotations.push(Annotation {
                surface: graph.mentions[m].surface.clone(),
                start,
                end,
                entity: entity.clone(),
            });
        }
    }

    let mut ranked: Vec<(Label, f64)> = strongest
        .into_iter()
        .map(|(e, w)| (Label::Entity(e), w))
        .collect();
    if ranked.is_empty() {
        ranked.push((Label::Nil, 1.0));
    }
    DisambiguationResult::sort_ranked(&mut ranked);
    Ok(DisambiguationResult {
        query_id: query_id.to_string(),
        ranked,
        annotations: Some(annotations),
    })
}

/// Renders annotations back into the text, prefixing each mention with a
/// kb:// URL built from its entity id.
pub fn annotate_text(text: &str, annotations: &[Annotation]) -> String {
    let mut sorted: Vec<&Annotation> = annotations.iter().collect();
    sorted.sort_by_key(|a| a.start);
    let mut out = String::with_capacity(text.len() + sorted.len() * 16);
    let mut cursor = 0;
    for a in sorted {
        out.push_str(&text[cursor..a.start]);
        out.push_str("kb://");
        out.push_str(a.entity.as_str());
        out.push(' ');
        cursor = a.start;
    }
    out.push_str(&text[cursor..]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::InvertedIndex;
    use crate::testsupport::optimal_assignment_objective;
    use crate::textproc::MentionSource;
    use proptest::prelude::*;

    const EXAMPLES_KB: &str = include_str!("../tests/fixtures/examples_kb.jsonl");

    fn examples_kb() -> KnowledgeBase {
        KnowledgeBase::from_dump_str(EXAMPLES_KB).unwrap().0
    }

    fn id(s: &str) -> EntityId {
        EntityId::new(s)
    }

    #[test]
    fn single_candidate_prior_is_one() {
        let kb = examples_kb();
        assert_eq!(prior(&kb, "Einstein", &id("Albert_Einstein")).unwrap(), 1.0);
    }

    #[test]
    fn priors_split_by_inlink_share() {
        // "Les Paul" resolves to the guitar (3 inlinks) and the person (1).
        let kb = examples_kb();
        assert_eq!(
            prior(&kb, "Les Paul", &id("Gibson_Les_Paul")).unwrap(),
            0.75
        );
        assert_eq!(prior(&kb, "Les Paul", &id("Les_Paul")).unwrap(), 0.25);
    }

    #[test]
    fn all_zero_inlinks_fall_back_to_uniform() {
        let dump = (b'A'..=b'D')
            .map(|c| {
                format!(
                    r#"{{"id":"E{0}","name":"E{0}","aliases":["shared"],"text":"","links":[]}}"#,
                    c as char
                )
            })
            .collect::<Vec<_>>()
            .join("\n");
        let kb = KnowledgeBase::from_dump_str(&dump).unwrap().0;
        for c in ["EA", "EB", "EC", "ED"] {
            assert_eq!(prior(&kb, "shared", &id(c)).unwrap(), 0.25);
        }
    }

    #[test]
    fn prior_outside_candidate_set_is_zero() {
        let kb = examples_kb();
        assert_eq!(prior(&kb, "Einstein", &id("Ulm")).unwrap(), 0.0);
        assert!(prior(&kb, "Einstein", &id("Nobody")).is_err());
    }

    #[test]
    fn coherence_identity_and_disjoint() {
        let kb = examples_kb();
        assert_eq!(coherence(&kb, &id("Ulm"), &id("Ulm")).unwrap(), 1.0);
        // the Kashmir region shares no inlinkers with the festival
        assert_eq!(
            coherence(&kb, &id("Kashmir"), &id("Knebworth_Festival_1979")).unwrap(),
            0.0
        );
    }

    #[test]
    fn coherence_matches_hand_evaluation() {
        // |L1|=4, |L2|=2, |L1∩L2|=2, |E|=100:
        // 1 − (ln 4 − ln 2)/(ln 100 − ln 2) ≈ 0.822816.
        let mut lines = vec![
            r#"{"id":"T1","name":"T1","links":[]}"#.to_string(),
            r#"{"id":"T2","name":"T2","links":[]}"#.to_string(),
        ];
        for i in 0..4 {
            // F0..F3 link to T1; F2, F3 also link to T2.
            let links = if i >= 2 {
                r#"["T1","T2"]"#
            } else {
                r#"["T1"]"#
            };
            lines.push(format!(r#"{{"id":"F{i}","name":"F{i}","links":{links}}}"#));
        }
        for i in 0..94 {
            lines.push(format!(r#"{{"id":"P{i:02}","name":"P{i:02}","links":[]}}"#));
        }
        let kb = KnowledgeBase::from_dump_str(&lines.join("\n")).unwrap().0;
        assert_eq!(kb.total_entities(), 100);
        let c = coherence(&kb, &id("T1"), &id("T2")).unwrap();
        assert!((c - 0.822816).abs() < 1e-4, "got {c}");
    }

    #[test]
    fn coherence_is_symmetric_on_fixture() {
        let kb = examples_kb();
        let ids: Vec<EntityId> = kb.ids().cloned().collect();
        for a in &ids {
            for b in &ids {
                let ab = coherence(&kb, a, b).unwrap();
                let ba = coherence(&kb, b, a).unwrap();
                assert_eq!(ab, ba, "coherence({a},{b})");
                assert!((0.0..=1.0).contains(&ab));
            }
        }
    }

    fn mention(surface: &str) -> Mention {
        Mention {
            surface: surface.to_string(),
            token_span: None,
            source: MentionSource::Spotted,
        }
    }

    fn candidate(eid: &str, relevance: f64, prior: f64) -> Candidate {
        Candidate {
            entity_id: id(eid),
            name_matched: true,
            relevance,
            prior,
        }
    }

    #[test]
    fn unlinked_candidates_give_no_ee_edges() {
        let dump = r#"{"id":"A","name":"A"}
{"id":"B","name":"B"}"#;
        let kb = KnowledgeBase::from_dump_str(dump).unwrap().0;
        let graph = build_graph(
            &kb,
            vec![(
                mention("a"),
                vec![candidate("A", 1.0, 0.5), candidate("B", 0.5, 0.5)],
            )],
            &GraphConfig::default(),
        )
        .unwrap();
        assert_eq!(graph.me_edges[0].len(), 2);
        assert!(graph.ee_edges.is_empty());
    }

    #[test]
    fn linked_entities_get_an_ee_edge() {
        let kb = examples_kb();
        let graph = build_graph(
            &kb,
            vec![
                (
                    mention("Einstein"),
                    vec![candidate("Albert_Einstein", 1.0, 1.0)],
                ),
                (mention("Ulm"), vec![candidate("Ulm", 1.0, 1.0)]),
            ],
            &GraphConfig::default(),
        )
        .unwrap();
        assert!(graph.ee_weight(&id("Albert_Einstein"), &id("Ulm")) > 0.0);
    }

    #[test]
    fn me_weights_stay_in_unit_interval() {
        let kb = examples_kb();
        let graph = build_graph(
            &kb,
            vec![(
                mention("x"),
                vec![
                    candidate("Ulm", 3.7, 0.9),
                    candidate("Germany", 1.1, 0.1),
                    candidate("India", 0.0, 0.0),
                ],
            )],
            &GraphConfig::default(),
        )
        .unwrap();
        for (_, w) in &graph.me_edges[0] {
            assert!((0.0..=1.0).contains(w), "me weight {w}");
        }
        // top-relevance candidate gets the full context share
        let w = graph.me_edges[0][&id("Ulm")];
        assert!((w - (0.3 * 0.9 + 0.4)).abs() < 1e-12);
    }

    #[test]
    fn invalid_weights_are_rejected() {
        let bad = GraphConfig {
            w_prior: 0.5,
            w_context: 0.9,
            ..GraphConfig::default()
        };
        assert!(matches!(bad.validate(), Err(Error::Config(_))));
        let negative = GraphConfig {
            w_prior: -0.1,
            w_context: 0.8,
            w_coherence: 0.3,
            ..GraphConfig::default()
        };
        assert!(matches!(negative.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn forced_assignment_with_single_candidates() {
        let kb = examples_kb();
        let graph = build_graph(
            &kb,
            vec![
                (
                    mention("Einstein"),
                    vec![candidate("Albert_Einstein", 0.0, 1.0)],
                ),
                (mention("Ulm"), vec![candidate("Ulm", 0.0, 1.0)]),
            ],
            &GraphConfig::default(),
        )
        .unwrap();
        let outcome = densify(&graph, &GraphConfig::default());
        assert_eq!(
            outcome.assignment,
            vec![Some(id("Albert_Einstein")), Some(id("Ulm"))]
        );
        assert!(outcome.objective.unwrap() > 0.0);
    }

    #[test]
    fn candidate_less_mentions_resolve_to_none() {
        let kb = examples_kb();
        let graph = build_graph(
            &kb,
            vec![
                (mention("nothing"), vec![]),
                (mention("Ulm"), vec![candidate("Ulm", 1.0, 1.0)]),
            ],
            &GraphConfig::default(),
        )
        .unwrap();
        let assignment = densify(&graph, &GraphConfig::default()).assignment;
        assert_eq!(assignment, vec![None, Some(id("Ulm"))]);
    }

    fn pipeline(text: &str) -> (KnowledgeBase, DisambiguationResult) {
        let kb = examples_kb();
        let index = InvertedIndex::build(&kb);
        let result = disambiguate_document(
            &kb,
            &index,
            "q",
            text,
            &GraphConfig::default(),
            &Deadline::never(),
        )
        .unwrap();
        (kb, result)
    }

    #[test]
    fn einstein_sentence_annotates_both_mentions() {
        let (_, result) = pipeline("Einstein was born in Ulm.");
        let annotations = result.annotations.as_ref().unwrap();
        let map: BTreeMap<&str, &str> = annotations
            .iter()
            .map(|a| (a.surface.as_str(), a.entity.as_str()))
            .collect();
        assert_eq!(map["Einstein"], "Albert_Einstein");
        assert_eq!(map["Ulm"], "Ulm");
        assert_eq!(annotations.len(), 2);
    }

    #[test]
    fn page_sentence_resolves_the_music_reading() {
        let (_, result) =
            pipeline("When Page played Kashmir at Knebworth, his Les Paul was uniquely tuned.");
        let annotations = result.annotations.as_ref().unwrap();
        let map: BTreeMap<&str, &str> = annotations
            .iter()
            .map(|a| (a.surface.as_str(), a.entity.as_str()))
            .collect();
        assert_eq!(map["Kashmir"], "Kashmir_(song)");
        assert_eq!(map["Knebworth"], "Knebworth_Festival_1979");
        assert_eq!(map["Les Paul"], "Gibson_Les_Paul");
        let labels: Vec<&str> = result.ranked.iter().map(|(l, _)| l.as_str()).collect();
        assert!(labels.contains(&"Gibson_Les_Paul"));
        assert!(labels.contains(&"Knebworth_Festival_1979"));
    }

    #[test]
    fn empty_text_ranks_nil() {
        let (_, result) = pipeline("");
        assert_eq!(result.ranked, vec![(Label::Nil, 1.0)]);
        assert_eq!(result.annotations, Some(vec![]));
    }

    #[test]
    fn unspottable_text_ranks_nil() {
        let (_, result) = pipeline("nothing matches any dictionary entry");
        assert_eq!(result.ranked, vec![(Label::Nil, 1.0)]);
    }

    #[test]
    fn annotated_text_prefixes_mentions_with_urls() {
        let text = "Einstein was born in Ulm.";
        let (_, result) = pipeline(text);
        let rendered = annotate_text(text, result.annotations.as_ref().unwrap());
        assert_eq!(
            rendered,
            "kb://Albert_Einstein Einstein was born in kb://Ulm Ulm."
        );
    }

    #[test]
    fn expired_deadline_stops_the_pipeline() {
        let kb = examples_kb();
        let index = InvertedIndex::build(&kb);
        let deadline = Deadline::after_secs(1e-9);
        std::thread::sleep(std::time::Duration::from_millis(2));
        let err = disambiguate_document(
            &kb,
            &index,
            "q",
            "Einstein was born in Ulm.",
            &GraphConfig::default(),
            &deadline,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Timeout));
    }

    // Random small graphs for the greedy-vs-enumeration checks. Entities
    // E0..E5; each mention holds 0..=3 of them with arbitrary me weights.
    fn arb_graph() -> impl Strategy<Value = MentionEntityGraph> {
        let me = proptest::collection::vec(
            proptest::collection::vec((0usize..6, 0.0f64..1.0), 0..=3),
            1..=3,
        );
        let ee = proptest::collection::vec(((0usize..6, 0usize..6), 0.0f64..1.0), 0..=8);
        (me, ee).prop_map(|(me, ee)| {
            let me_edges: Vec<BTreeMap<EntityId, f64>> = me
                .into_iter()
                .map(|row| {
                    row.into_iter()
                        .map(|(e, w)| (id(&format!("E{e}")), w))
                        .collect()
                })
                .collect();
            let mentions = (0..me_edges.len())
                .map(|i| mention(&format!("m{i}")))
                .collect();
            let graph = MentionEntityGraph {
                mentions,
                me_edges,
                ee_edges: BTreeMap::new(),
            };
            let nodes = graph.entity_nodes();
            let mut ee_edges = BTreeMap::new();
            for ((a, b), w) in ee {
                let (a, b) = (id(&format!("E{a}")), id(&format!("E{b}")));
                if a != b && nodes.contains(&a) && nodes.contains(&b) && w > 0.0 {
                    ee_edges.insert(ee_key(&a, &b), w);
                }
            }
            MentionEntityGraph { ee_edges, ..graph }
        })
    }

    proptest! {
        #[test]
        fn greedy_objective_is_near_optimal(graph in arb_graph()) {
            let config = GraphConfig::default();
            let outcome = densify(&graph, &config);
            for (row, chosen) in graph.me_edges.iter().zip(&outcome.assignment) {
                prop_assert_eq!(row.is_empty(), chosen.is_none());
            }
            if let Some(optimal) = optimal_assignment_objective(&graph) {
                let achieved = outcome.objective.expect("graph has entity nodes");
                prop_assert!(
                    achieved >= 0.8 * optimal - 1e-12,
                    "achieved {} < 0.8 * optimal {}", achieved, optimal
                );
            }
        }

        #[test]
        // Power-of-two scales multiply exactly, so the argmin/argmax
        // comparisons are preserved bit-for-bit.
        fn densify_is_scale_invariant(
            graph in arb_graph(),
            scale in prop_oneof![Just(0.25f64), Just(0.5), Just(2.0), Just(4.0), Just(8.0)],
        ) {
            let config = GraphConfig::default();
            let baseline = densify(&graph, &config);
            let scaled = MentionEntityGraph {
                mentions: graph.mentions.clone(),
                me_edges: graph
                    .me_edges
                    .iter()
                    .map(|row| row.iter().map(|(e, w)| (e.clone(), w * scale)).collect())
                    .collect(),
                ee_edges: graph
                    .ee_edges
                    .iter()
                    .map(|(k, w)| (k.clone(), w * scale))
                    .collect(),
            };
            let rescaled = densify(&scaled, &config);
            prop_assert_eq!(&baseline.assignment, &rescaled.assignment);
            prop_assert_eq!(baseline.objective.map(|o| o * scale), rescaled.objective);
        }

        #[test]
        fn densify_is_deterministic(graph in arb_graph()) {
            let config = GraphConfig::default();
            prop_assert_eq!(densify(&graph, &config), densify(&graph, &config));
        }
    }
}
