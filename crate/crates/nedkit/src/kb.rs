//! Knowledge-base data model: entity records with link structure, the
//! alias table used for candidate lookup and mention spotting, and the
//! JSONL dump format. Also owns the query/label/result types shared by
//! both disambiguation strategies.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::textproc::{doc_terms, normalize_name, tokenize, MAX_MENTION_TOKENS};

/// Identifier of a knowledge-base entity, unique within one dump.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EntityId(String);

impl EntityId {
    pub fn new(id: impl Into<String>) -> Self {
        EntityId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EntityId({})", self.0)
    }
}

impl From<&str> for EntityId {
    fn from(s: &str) -> Self {
        EntityId::new(s)
    }
}

/// One entity of the knowledge base. `inlinks` is derived from the other
/// records' `outlinks` at load time; both only ever contain ids that exist
/// in the same knowledge base.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntityRecord {
    pub id: EntityId,
    pub canonical_name: String,
    /// All surface forms, canonical name included.
    pub aliases: BTreeSet<String>,
    pub text: String,
    pub outlinks: BTreeSet<EntityId>,
    pub inlinks: BTreeSet<EntityId>,
    /// Bag-of-words features. Term frequencies of the preprocessed `text`
    /// unless the dump supplied an explicit vector.
    pub features: BTreeMap<String, f64>,
}

impl EntityRecord {
    /// Term frequencies of the preprocessed description text, the default
    /// feature vector.
    pub fn derived_features(text: &str) -> BTreeMap<String, f64> {
        let mut tf = BTreeMap::new();
        for term in doc_terms(text) {
            *tf.entry(term).or_insert(0.0) += 1.0;
        }
        tf
    }
}

/// On-disk shape of one dump line.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct DumpRecord {
    id: String,
    name: String,
    #[serde(default)]
    aliases: Vec<String>,
    #[serde(default)]
    text: String,
    #[serde(default)]
    links: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    features: Option<BTreeMap<String, f64>>,
}

/// Normalized surface form -> candidate entity ids.
#[derive(Debug, Default, Clone, PartialEq, Serialize, Deserialize)]
pub struct AliasTable {
    map: BTreeMap<String, BTreeSet<EntityId>>,
}

impl AliasTable {
    /// Registers `alias` for `id`. Aliases longer than
    /// [`MAX_MENTION_TOKENS`] tokens are keyed by their leading tokens;
    /// returns true when that truncation happened so the caller can report
    /// it.
    pub fn insert(&mut self, alias: &str, id: EntityId) -> bool {
        let tokens = tokenize(alias);
        let truncated = tokens.len() > MAX_MENTION_TOKENS;
        let source = if truncated {
            tokens[..MAX_MENTION_TOKENS]
                .iter()
                .map(|t| t.surface.as_str())
                .collect::<Vec<_>>()
                .join(" ")
        } else {
            alias.to_string()
        };
        let key = normalize_name(&source);
        if !key.is_empty() {
            self.map.entry(key).or_default().insert(id);
        }
        truncated
    }

    /// Case-insensitive lookup of a raw surface form.
    pub fn lookup(&self, name: &str) -> BTreeSet<EntityId> {
        self.lookup_normalized(&normalize_name(name))
            .cloned()
            .unwrap_or_default()
    }

    /// Lookup of an already-normalized key, as produced by
    /// [`normalize_name`].
    pub fn lookup_normalized(&self, key: &str) -> Option<&BTreeSet<EntityId>> {
        self.map.get(key)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &BTreeSet<EntityId>)> {
        self.map.iter().map(|(k, v)| (k.as_str(), v))
    }
}

/// Everything unusual the loader saw but could repair.
#[derive(Debug, Default, Clone)]
pub struct LoadReport {
    pub entities_loaded: usize,
    /// (source entity, dangling target) pairs removed from outlinks.
    pub dropped_links: Vec<(EntityId, EntityId)>,
    /// (entity, original alias) pairs whose alias-table key was truncated.
    pub truncated_aliases: Vec<(EntityId, String)>,
}

impl LoadReport {
    pub fn is_clean(&self) -> bool {
        self.dropped_links.is_empty() && self.truncated_aliases.is_empty()
    }

    pub fn lines(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (src, dst) in &self.dropped_links {
            out.push(format!("dropped dangling link {src} -> {dst}"));
        }
        for (id, alias) in &self.truncated_aliases {
            out.push(format!(
                "alias {alias:?} of {id} truncated to {MAX_MENTION_TOKENS} tokens in the alias table"
            ));
        }
        out
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct KnowledgeBase {
    entities: BTreeMap<EntityId, EntityRecord>,
    alias_table: AliasTable,
}

impl KnowledgeBase {
    /// Loads a JSONL dump. Malformed lines and duplicate ids are hard
    /// errors naming the offending line; dangling outlinks and over-long
    /// aliases are repaired and recorded in the report.
    pub fn load_dump(path: impl AsRef<Path>) -> Result<(Self, LoadReport)> {
        Self::from_dump_str(&fs::read_to_string(path)?)
    }

    pub fn from_dump_str(dump: &str) -> Result<(Self, LoadReport)> {
        let mut records: BTreeMap<EntityId, (EntityRecord, Vec<String>)> = BTreeMap::new();
        let mut order_seen: BTreeMap<EntityId, usize> = BTreeMap::new();
        for (idx, line) in dump.lines().enumerate() {
            let line_no = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let raw: DumpRecord =
                serde_json::from_str(line).map_err(|e| Error::MalformedRecord {
                    line: line_no,
                    message: e.to_string(),
                })?;
            if raw.id.is_empty() || raw.name.is_empty() {
                return Err(Error::MalformedRecord {
                    line: line_no,
                    message: "id and name must be non-empty".into(),
                });
            }
            let id = EntityId::new(raw.id);
            if order_seen.contains_key(&id) {
                return Err(Error::DuplicateEntityId {
                    id: id.to_string(),
                    line: line_no,
                });
            }
            order_seen.insert(id.clone(), line_no);

            let mut aliases: BTreeSet<String> = raw.aliases.into_iter().collect();
            aliases.insert(raw.name.clone());
            let features = match raw.features {
                Some(f) => f,
                None => EntityRecord::derived_features(&raw.text),
            };
            let record = EntityRecord {
                id: id.clone(),
                canonical_name: raw.name,
                aliases,
                text: raw.text,
                outlinks: BTreeSet::new(),
                inlinks: BTreeSet::new(),
                features,
            };
            records.insert(id, (record, raw.links));
        }

        let known: BTreeSet<EntityId> = records.keys().cloned().collect();
        let mut report = LoadReport {
            entities_loaded: records.len(),
            ..LoadReport::default()
        };

        let mut kb = KnowledgeBase::default();
        let mut inlinks: BTreeMap<EntityId, BTreeSet<EntityId>> = BTreeMap::new();
        for (id, (mut record, links)) in records {
            for target in links {
                let target = EntityId::new(target);
                if known.contains(&target) {
                    inlinks
                        .entry(target.clone())
                        .or_default()
                        .insert(id.clone());
                    record.outlinks.insert(target);
                } else {
                    report.dropped_links.push((id.clone(), target));
                }
            }
            kb.entities.insert(id, record);
        }
        for (id, sources) in inlinks {
            kb.entities
                .get_mut(&id)
                .expect("inlink targets are known ids")
                .inlinks = sources;
        }

        for record in kb.entities.values() {
            for alias in &record.aliases {
                if kb.alias_table.insert(alias, record.id.clone()) {
                    report
                        .truncated_aliases
                        .push((record.id.clone(), alias.clone()));
                }
            }
        }
        Ok((kb, report))
    }

    pub fn save_dump(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_dump_string()?)?;
        Ok(())
    }

    /// Serializes back to JSONL, one entity per line in id order. The
    /// feature vector is written only when it differs from the one that
    /// would be re-derived from the text, so load -> save -> load is
    /// semantically the identity.
    pub fn to_dump_string(&self) -> Result<String> {
        let mut out = String::new();
        for record in self.entities.values() {
            let derived = EntityRecord::derived_features(&record.text);
            let features = if record.features == derived {
                None
            } else {
                Some(record.features.clone())
            };
            let raw = DumpRecord {
                id: record.id.to_string(),
                name: record.canonical_name.clone(),
                aliases: record.aliases.iter().cloned().collect(),
                text: record.text.clone(),
                links: record.outlinks.iter().map(|e| e.to_string()).collect(),
                features,
            };
            out.push_str(&serde_json::to_string(&raw)?);
            out.push('\n');
        }
        Ok(out)
    }

    pub fn total_entities(&self) -> usize {
        self.entities.len()
    }

    pub fn get(&self, id: &EntityId) -> Result<&EntityRecord> {
        self.entities
            .get(id)
            .ok_or_else(|| Error::EntityNotFound(id.to_string()))
    }

    pub fn contains(&self, id: &EntityId) -> bool {
        self.entities.contains_key(id)
    }

    pub fn entities(&self) -> impl Iterator<Item = &EntityRecord> {
        self.entities.values()
    }

    pub fn ids(&self) -> impl Iterator<Item = &EntityId> {
        self.entities.keys()
    }

    /// Case-insensitive candidate lookup by surface form.
    pub fn alias_lookup(&self, name: &str) -> BTreeSet<EntityId> {
        self.alias_table.lookup(name)
    }

    pub fn aliases(&self) -> &AliasTable {
        &self.alias_table
    }
}

/// Kind of entity a benchmark query asks about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QueryType {
    Person,
    GeoPolitical,
    Topic,
    #[default]
    Unknown,
}

/// One benchmark query: a name to resolve inside a context document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Query {
    pub query_id: String,
    #[serde(rename = "type", default)]
    pub query_type: QueryType,
    pub name: String,
    #[serde(rename = "doc", default)]
    pub context_document: String,
}

/// Loads a JSONL query file, erroring on malformed lines, duplicate query
/// ids, or empty names.
pub fn load_queries(path: impl AsRef<Path>) -> Result<Vec<Query>> {
    queries_from_str(&fs::read_to_string(path)?)
}

pub fn queries_from_str(data: &str) -> Result<Vec<Query>> {
    let mut queries: Vec<Query> = Vec::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    for (idx, line) in data.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let q: Query = serde_json::from_str(line).map_err(|e| Error::MalformedRecord {
            line: line_no,
            message: e.to_string(),
        })?;
        if q.query_id.is_empty() || q.name.is_empty() {
            return Err(Error::MalformedRecord {
                line: line_no,
                message: "query_id and name must be non-empty".into(),
            });
        }
        if !seen.insert(q.query_id.clone()) {
            return Err(Error::MalformedRecord {
                line: line_no,
                message: format!("duplicate query id {:?}", q.query_id),
            });
        }
        queries.push(q);
    }
    Ok(queries)
}

/// Answer label: either a knowledge-base entity or NIL for
/// not-in-knowledge-base. Ordering and serialization treat NIL as the
/// literal string "NIL".
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Label {
    Entity(EntityId),
    Nil,
}

pub const NIL_LABEL: &str = "NIL";

impl Label {
    pub fn as_str(&self) -> &str {
        match self {
            Label::Entity(id) => id.as_str(),
            Label::Nil => NIL_LABEL,
        }
    }

    pub fn is_nil(&self) -> bool {
        matches!(self, Label::Nil)
    }
}

impl FromStr for Label {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(if s == NIL_LABEL {
            Label::Nil
        } else {
            Label::Entity(EntityId::new(s))
        })
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Ord for Label {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.as_str().cmp(other.as_str())
    }
}

impl PartialOrd for Label {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Serialize for Label {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Ok(s.parse().expect("label parsing is infallible"))
    }
}

/// Loads a gold file: one `query_id<TAB>label` pair per line.
pub fn load_gold(path: impl AsRef<Path>) -> Result<BTreeMap<String, Label>> {
    gold_from_str(&fs::read_to_string(path)?)
}

pub fn gold_from_str(data: &str) -> Result<BTreeMap<String, Label>> {
    let mut gold = BTreeMap::new();
    for (idx, line) in data.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split('\t');
        let (Some(query_id), Some(label), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::MalformedRecord {
                line: line_no,
                message: "expected exactly two tab-separated fields".into(),
            });
        };
        if query_id.is_empty() || label.is_empty() {
            return Err(Error::MalformedRecord {
                line: line_no,
                message: "query id and label must be non-empty".into(),
            });
        }
        if gold
            .insert(
                query_id.to_string(),
                label.parse().expect("label parsing is infallible"),
            )
            .is_some()
        {
            return Err(Error::MalformedRecord {
                line: line_no,
                message: format!("duplicate query id {query_id:?}"),
            });
        }
    }
    Ok(gold)
}

/// One resolved mention in an annotated document. `start`/`end` are byte
/// offsets into the original text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Annotation {
    pub surface: String,
    pub start: usize,
    pub end: usize,
    pub entity: EntityId,
}

/// Outcome of disambiguating one query: labels ranked best-first, plus
/// per-mention annotations when the strategy assigns mentions individually.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisambiguationResult {
    pub query_id: String,
    /// (label, score), sorted by descending score with ties broken by
    /// ascending label string. Contains NIL at most once.
    pub ranked: Vec<(Label, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub annotations: Option<Vec<Annotation>>,
}

impl DisambiguationResult {
    pub fn top(&self) -> Option<&Label> {
        self.ranked.first().map(|(l, _)| l)
    }

    /// Canonical ordering for ranked label lists: score descending, label
    /// string ascending on ties.
    pub fn sort_ranked(ranked: &mut [(Label, f64)]) {
        ranked.sort_by(|(la, sa), (lb, sb)| {
            sb.partial_cmp(sa)
                .expect("scores are finite")
                .then_with(|| la.cmp(lb))
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dump_line(id: &str, name: &str, aliases: &[&str], text: &str, links: &[&str]) -> String {
        serde_json::to_string(&serde_json::json!({
            "id": id, "name": name, "aliases": aliases, "text": text, "links": links,
        }))
        .unwrap()
    }

    fn small_dump() -> String {
        [
            dump_line(
                "Albert_Einstein",
                "Albert Einstein",
                &["Einstein"],
                "Theoretical physicist born in Ulm",
                &["Ulm"],
            ),
            dump_line("Ulm", "Ulm", &[], "City in Germany on the Danube", &[]),
            dump_line(
                "Mileva_Maric",
                "Mileva Maric",
                &["Mileva"],
                "Physicist married to Albert Einstein",
                &["Albert_Einstein"],
            ),
        ]
        .join("\n")
    }

    #[test]
    fn loads_three_entities() {
        let (kb, report) = KnowledgeBase::from_dump_str(&small_dump()).unwrap();
        assert_eq!(kb.total_entities(), 3);
        assert_eq!(report.entities_loaded, 3);
        assert!(report.is_clean());
    }

    #[test]
    fn derives_inlinks_from_outlinks() {
        let (kb, _) = KnowledgeBase::from_dump_str(&small_dump()).unwrap();
        let ulm = kb.get(&EntityId::new("Ulm")).unwrap();
        assert_eq!(
            ulm.inlinks,
            BTreeSet::from([EntityId::new("Albert_Einstein")])
        );
        let einstein = kb.get(&EntityId::new("Albert_Einstein")).unwrap();
        assert_eq!(
            einstein.inlinks,
            BTreeSet::from([EntityId::new("Mileva_Maric")])
        );
        assert!(kb
            .get(&EntityId::new("Mileva_Maric"))
            .unwrap()
            .inlinks
            .is_empty());
    }

    #[test]
    fn duplicate_id_is_an_error_naming_id_and_line() {
        let dump = [
            dump_line("E1", "One", &[], "", &[]),
            dump_line("E2", "Two", &[], "", &[]),
            dump_line("E1", "One again", &[], "", &[]),
        ]
        .join("\n");
        let err = KnowledgeBase::from_dump_str(&dump).unwrap_err();
        match err {
            Error::DuplicateEntityId { id, line } => {
                assert_eq!(id, "E1");
                assert_eq!(line, 3);
            }
            other => panic!("unexpected error: {other:?}"),
        }
    }

    #[test]
    fn malformed_line_is_an_error_with_line_number() {
        let dump = format!("{}\nnot json\n", dump_line("E1", "One", &[], "", &[]));
        let err = KnowledgeBase::from_dump_str(&dump).unwrap_err();
        match err {
            Error::MalformedRecord { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error: {other:?}"),
        }
    }

    #[test]
    fn alias_lookup_is_case_insensitive() {
        let (kb, _) = KnowledgeBase::from_dump_str(&small_dump()).unwrap();
        let hits = kb.alias_lookup("einstein");
        assert_eq!(hits, BTreeSet::from([EntityId::new("Albert_Einstein")]));
        assert!(kb.alias_lookup("zzz-no-such-name").is_empty());
    }

    #[test]
    fn ambiguous_alias_returns_all_candidates() {
        let dump = [
            dump_line("Kashmir_(song)", "Kashmir (song)", &["Kashmir"], "", &[]),
            dump_line("Kashmir", "Kashmir", &[], "", &[]),
        ]
        .join("\n");
        let (kb, _) = KnowledgeBase::from_dump_str(&dump).unwrap();
        assert_eq!(
            kb.alias_lookup("Kashmir"),
            BTreeSet::from([EntityId::new("Kashmir"), EntityId::new("Kashmir_(song)")])
        );
    }

    #[test]
    fn dangling_link_is_dropped_and_reported() {
        let dump = [
            dump_line("A", "A", &[], "", &["B", "Nowhere"]),
            dump_line("B", "B", &[], "", &[]),
        ]
        .join("\n");
        let (kb, report) = KnowledgeBase::from_dump_str(&dump).unwrap();
        assert_eq!(
            report.dropped_links,
            vec![(EntityId::new("A"), EntityId::new("Nowhere"))]
        );
        let a = kb.get(&EntityId::new("A")).unwrap();
        assert_eq!(a.outlinks, BTreeSet::from([EntityId::new("B")]));
    }

    #[test]
    fn overlong_alias_is_truncated_and_reported() {
        let dump = dump_line(
            "E1",
            "Short Name",
            &["one two three four five six seven"],
            "",
            &[],
        );
        let (kb, report) = KnowledgeBase::from_dump_str(&dump).unwrap();
        assert_eq!(report.truncated_aliases.len(), 1);
        assert_eq!(
            kb.alias_lookup("one two three four five"),
            BTreeSet::from([EntityId::new("E1")])
        );
        assert!(kb
            .alias_lookup("one two three four five six seven")
            .is_empty());
        // the record itself keeps the original alias
        let rec = kb.get(&EntityId::new("E1")).unwrap();
        assert!(rec.aliases.contains("one two three four five six seven"));
    }

    #[test]
    fn features_default_to_text_term_frequencies() {
        let (kb, _) = KnowledgeBase::from_dump_str(&small_dump()).unwrap();
        let ulm = kb.get(&EntityId::new("Ulm")).unwrap();
        assert_eq!(ulm.features.get("city"), Some(&1.0));
        assert_eq!(ulm.features.get("danube"), Some(&1.0));
        // "in" and "on" are stop words
        assert!(!ulm.features.contains_key("in"));
    }

    #[test]
    fn explicit_features_survive_round_trip() {
        let line = r#"{"id":"E1","name":"One","text":"alpha beta","features":{"custom":2.5}}"#;
        let (kb, _) = KnowledgeBase::from_dump_str(line).unwrap();
        let saved = kb.to_dump_string().unwrap();
        assert!(saved.contains("\"features\""));
        let (kb2, _) = KnowledgeBase::from_dump_str(&saved).unwrap();
        assert_eq!(kb, kb2);
    }

    #[test]
    fn round_trip_is_semantically_identity() {
        let (kb, _) = KnowledgeBase::from_dump_str(&small_dump()).unwrap();
        let saved = kb.to_dump_string().unwrap();
        // derived features are not materialized in the dump
        assert!(!saved.contains("\"features\""));
        let (kb2, _) = KnowledgeBase::from_dump_str(&saved).unwrap();
        assert_eq!(kb, kb2);
    }

    #[test]
    fn get_unknown_id_errors() {
        let (kb, _) = KnowledgeBase::from_dump_str(&small_dump()).unwrap();
        assert!(matches!(
            kb.get(&EntityId::new("Niels_Bohr")),
            Err(Error::EntityNotFound(_))
        ));
    }

    #[test]
    fn parses_query_lines() {
        let data = concat!(
            r#"{"query_id":"q1","type":"person","name":"Einstein","doc":"Einstein was born in Ulm."}"#,
            "\n",
            r#"{"query_id":"q2","name":"Ulm"}"#,
            "\n"
        );
        let queries = queries_from_str(data).unwrap();
        assert_eq!(queries.len(), 2);
        assert_eq!(queries[0].query_type, QueryType::Person);
        assert_eq!(queries[1].query_type, QueryType::Unknown);
        assert_eq!(queries[1].context_document, "");
    }

    #[test]
    fn rejects_duplicate_query_ids() {
        let data = concat!(
            r#"{"query_id":"q1","name":"A"}"#,
            "\n",
            r#"{"query_id":"q1","name":"B"}"#,
            "\n"
        );
        assert!(matches!(
            queries_from_str(data),
            Err(Error::MalformedRecord { line: 2, .. })
        ));
    }

    #[test]
    fn geo_political_uses_kebab_case() {
        let q: Query =
            serde_json::from_str(r#"{"query_id":"q","type":"geo-political","name":"Ulm"}"#)
                .unwrap();
        assert_eq!(q.query_type, QueryType::GeoPolitical);
    }

    #[test]
    fn gold_file_parses_and_rejects_bad_lines() {
        let gold = gold_from_str("q1\tAlbert_Einstein\nq2\tNIL\n").unwrap();
        assert_eq!(gold["q1"], Label::Entity(EntityId::new("Albert_Einstein")));
        assert_eq!(gold["q2"], Label::Nil);
        assert!(gold_from_str("q1 only-one-field\n").is_err());
        assert!(gold_from_str("q1\ta\tb\n").is_err());
    }

    #[test]
    fn labels_order_as_strings() {
        let mut labels = vec![
            Label::Entity(EntityId::new("Zed")),
            Label::Nil,
            Label::Entity(EntityId::new("Alice")),
        ];
        labels.sort();
        assert_eq!(
            labels.iter().map(Label::as_str).collect::<Vec<_>>(),
            ["Alice", "NIL", "Zed"]
        );
    }

    #[test]
    fn ranked_sort_breaks_ties_by_label() {
        let mut ranked = vec![
            (Label::Entity(EntityId::new("B")), 0.5),
            (Label::Entity(EntityId::new("A")), 0.5),
            (Label::Nil, 0.9),
        ];
        DisambiguationResult::sort_ranked(&mut ranked);
        assert_eq!(ranked[0].0, Label::Nil);
        assert_eq!(ranked[1].0, Label::Entity(EntityId::new("A")));
        assert_eq!(ranked[2].0, Label::Entity(EntityId::new("B")));
    }
}
