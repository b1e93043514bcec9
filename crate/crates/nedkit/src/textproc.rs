//! Deterministic text preprocessing: whitespace tokenization with rough
//! punctuation stripping, stop-word removal against a bundled list, and
//! dictionary-based mention spotting over token n-grams.

use std::collections::HashSet;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::kb::AliasTable;

/// Longest alias, in tokens, the spotter will match. Longer aliases are
/// truncated to this many tokens at ingestion.
pub const MAX_MENTION_TOKENS: usize = 5;

static STOPWORD_FILE: &str = include_str!("../resources/stopwords.txt");
static STOPWORDS: OnceLock<HashSet<&'static str>> = OnceLock::new();

fn stopword_set() -> &'static HashSet<&'static str> {
    STOPWORDS.get_or_init(|| {
        STOPWORD_FILE
            .lines()
            .map(str::trim)
            .filter(|w| !w.is_empty())
            .collect()
    })
}

pub fn is_stopword(word: &str) -> bool {
    stopword_set().contains(word.to_lowercase().as_str())
}

/// One token of the source text. `span` is the byte range of `surface`
/// within the source, so `&text[span.0..span.1] == surface`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    /// Index of this token in the tokenizer output, 0-based. Stop-word
    /// removal keeps the original positions.
    pub position: usize,
    pub span: (usize, usize),
}

impl Token {
    pub fn lower(&self) -> String {
        self.surface.to_lowercase()
    }
}

/// Where a mention came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MentionSource {
    /// Injected from the query name, whether or not the surface occurs in
    /// the alias table (or even in the text).
    QueryName,
    /// Matched against the alias table by the spotter.
    Spotted,
}

/// A span of text referring to some real-world entity.
///
/// `token_span` is an inclusive `(first, last)` pair of token positions.
/// It is `None` only for a query-name mention whose surface does not occur
/// in the tokenized text at all.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mention {
    pub surface: String,
    pub token_span: Option<(usize, usize)>,
    pub source: MentionSource,
}

impl Mention {
    /// Byte range of the mention in the original text, if it is anchored.
    pub fn byte_span(&self, tokens: &[Token]) -> Option<(usize, usize)> {
        let (first, last) = self.token_span?;
        Some((tokens[first].span.0, tokens[last].span.1))
    }
}

fn looks_like_url(word: &str) -> bool {
    let lower = word.to_lowercase();
    lower.contains("://") || lower.starts_with("www.")
}

/// Splits on whitespace, strips leading and trailing punctuation from each
/// word, and drops words that look like URLs. Tokens that are pure
/// punctuation disappear. Surfaces keep their original case.
pub fn tokenize(text: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut offset = 0;
    for word in text.split_whitespace() {
        // split_whitespace loses offsets; recover them by searching forward.
        let start = offset + text[offset..].find(word).expect("word comes from text");
        offset = start + word.len();

        if looks_like_url(word) {
            continue;
        }
        let Some((lead, _)) = word.char_indices().find(|(_, c)| c.is_alphanumeric()) else {
            continue;
        };
        let trail = word
            .char_indices()
            .rev()
            .find(|(_, c)| c.is_alphanumeric())
            .map(|(i, c)| i + c.len_utf8())
            .expect("a leading alphanumeric char exists");
        tokens.push(Token {
            surface: word[lead..trail].to_string(),
            position: tokens.len(),
            span: (start + lead, start + trail),
        });
    }
    tokens
}

/// Removes tokens whose lowercase form is on the bundled stop list.
/// Order and original `position` fields are preserved, so the operation is
/// idempotent.
pub fn remove_stopwords(tokens: &[Token]) -> Vec<Token> {
    tokens
        .iter()
        .filter(|t| !is_stopword(&t.surface))
        .cloned()
        .collect()
}

/// Lowercased content terms of a document: tokenize, drop stop words.
/// This is the preprocessing shared by the index, the candidate search and
/// the topic model.
pub fn doc_terms(text: &str) -> Vec<String> {
    tokenize(text)
        .iter()
        .filter(|t| !is_stopword(&t.surface))
        .map(Token::lower)
        .collect()
}

/// Canonical form used for alias-table keys and lookups: case-folded,
/// internal whitespace collapsed to single spaces, surrounding punctuation
/// stripped.
pub fn normalize_name(name: &str) -> String {
    let lowered = name.to_lowercase();
    let collapsed: Vec<&str> = lowered.split_whitespace().collect();
    collapsed
        .join(" ")
        .trim_matches(|c: char| !c.is_alphanumeric() && !c.is_whitespace())
        .to_string()
}

fn ngram_key(tokens: &[Token], first: usize, n: usize) -> String {
    let joined = tokens[first..first + n]
        .iter()
        .map(|t| t.surface.as_str())
        .collect::<Vec<_>>()
        .join(" ");
    normalize_name(&joined)
}

fn joined_surface(tokens: &[Token], first: usize, last: usize) -> String {
    tokens[first..=last]
        .iter()
        .map(|t| t.surface.as_str())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Greedy longest-leftmost scan of token n-grams (n ≤ [`MAX_MENTION_TOKENS`])
/// against the alias table. Spotted mentions never overlap.
///
/// When `query_name` is given it is always represented in the output: an
/// existing spotted mention with the same normalized surface is relabeled,
/// otherwise the first non-overlapping occurrence of the name in the token
/// stream is emitted, otherwise an unanchored mention is appended.
pub fn spot_mentions(
    tokens: &[Token],
    aliases: &AliasTable,
    query_name: Option<&str>,
) -> Vec<Mention> {
    let mut mentions = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let max_n = MAX_MENTION_TOKENS.min(tokens.len() - i);
        let mut matched = false;
        for n in (1..=max_n).rev() {
            let key = ngram_key(tokens, i, n);
            if !key.is_empty() && aliases.lookup_normalized(&key).is_some() {
                mentions.push(Mention {
                    surface: joined_surface(tokens, i, i + n - 1),
                    token_span: Some((i, i + n - 1)),
                    source: MentionSource::Spotted,
                });
                i += n;
                matched = true;
                break;
            }
        }
        if !matched {
            i += 1;
        }
    }

    if let Some(name) = query_name {
        inject_query_name(&mut mentions, tokens, name);
    }
    mentions
}

fn inject_query_name(mentions: &mut Vec<Mention>, tokens: &[Token], name: &str) {
    let target = normalize_name(name);
    if target.is_empty() {
        return;
    }
    if let Some(m) = mentions
        .iter_mut()
        .find(|m| normalize_name(&m.surface) == target)
    {
        m.source = MentionSource::QueryName;
        return;
    }

    let name_len = tokenize(name).len().max(1);
    let occupied: Vec<(usize, usize)> = mentions.iter().filter_map(|m| m.token_span).collect();
    let overlaps =
        |first: usize, last: usize| occupied.iter().any(|&(a, b)| first <= b && a <= last);
    if name_len <= tokens.len() {
        for first in 0..=tokens.len() - name_len {
            let last = first + name_len - 1;
            if ngram_key(tokens, first, name_len) == target && !overlaps(first, last) {
                let at = mentions
                    .iter()
                    .position(|m| m.token_span.is_some_and(|(a, _)| a > first))
                    .unwrap_or(mentions.len());
                mentions.insert(
                    at,
                    Mention {
                        surface: joined_surface(tokens, first, last),
                        token_span: Some((first, last)),
                        source: MentionSource::QueryName,
                    },
                );
                return;
            }
        }
    }
    mentions.push(Mention {
        surface: name.to_string(),
        token_span: None,
        source: MentionSource::QueryName,
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::EntityId;

    fn table(aliases: &[(&str, &str)]) -> AliasTable {
        let mut t = AliasTable::default();
        for (alias, id) in aliases {
            t.insert(alias, EntityId::new(*id));
        }
        t
    }

    fn surfaces(tokens: &[Token]) -> Vec<&str> {
        tokens.iter().map(|t| t.surface.as_str()).collect()
    }

    #[test]
    fn tokenize_plain_sentence() {
        let toks = tokenize("Einstein was born in Ulm.");
        assert_eq!(surfaces(&toks), ["Einstein", "was", "born", "in", "Ulm"]);
    }

    #[test]
    fn tokenize_empty() {
        assert!(tokenize("").is_empty());
    }

    #[test]
    fn tokenize_drops_urls() {
        let toks = tokenize("see http://x.y/z now");
        assert_eq!(surfaces(&toks), ["see", "now"]);
        let toks = tokenize("visit www.example.org today");
        assert_eq!(surfaces(&toks), ["visit", "today"]);
    }

    #[test]
    fn tokenize_strips_surrounding_punctuation_only() {
        let toks = tokenize("(Ulm). don't geo-political --");
        assert_eq!(surfaces(&toks), ["Ulm", "don't", "geo-political"]);
    }

    #[test]
    fn token_spans_slice_source() {
        let text = "  Als (Ulm). war, http://a.b x  ";
        for t in tokenize(text) {
            assert_eq!(&text[t.span.0..t.span.1], t.surface);
        }
    }

    #[test]
    fn stopword_removal() {
        let toks = tokenize("Einstein was born in Ulm.");
        let kept = remove_stopwords(&toks);
        assert_eq!(surfaces(&kept), ["Einstein", "born", "Ulm"]);
        // positions are the original ones
        assert_eq!(
            kept.iter().map(|t| t.position).collect::<Vec<_>>(),
            [0, 2, 4]
        );
    }

    #[test]
    fn stopword_removal_empty_and_idempotent() {
        assert!(remove_stopwords(&[]).is_empty());
        let toks = tokenize("the Einstein of physics was here");
        let once = remove_stopwords(&toks);
        let twice = remove_stopwords(&once);
        assert_eq!(once, twice);
    }

    #[test]
    fn normalize_folds_case_and_whitespace() {
        assert_eq!(normalize_name("  Les   Paul! "), "les paul");
        assert_eq!(normalize_name("EINSTEIN"), "einstein");
        assert_eq!(normalize_name("\"Kashmir\""), "kashmir");
    }

    #[test]
    fn spots_all_four_mentions() {
        let t = table(&[
            ("Page", "Jimmy_Page"),
            ("Kashmir", "Kashmir_(song)"),
            ("Knebworth", "Knebworth_Festival_1979"),
            ("Les Paul", "Gibson_Les_Paul"),
        ]);
        let tokens =
            tokenize("When Page played Kashmir at Knebworth, his Les Paul was uniquely tuned.");
        let mentions = spot_mentions(&tokens, &t, None);
        let got: Vec<&str> = mentions.iter().map(|m| m.surface.as_str()).collect();
        assert_eq!(got, ["Page", "Kashmir", "Knebworth", "Les Paul"]);
    }

    #[test]
    fn query_name_injected_when_nothing_matches() {
        let t = table(&[("Ulm", "Ulm")]);
        let tokens = tokenize("nothing relevant here");
        let mentions = spot_mentions(&tokens, &t, Some("John"));
        assert_eq!(mentions.len(), 1);
        assert_eq!(mentions[0].surface, "John");
        assert_eq!(mentions[0].source, MentionSource::QueryName);
        assert_eq!(mentions[0].token_span, None);
    }

    #[test]
    fn query_name_anchors_to_text_occurrence() {
        let t = table(&[("Ulm", "Ulm")]);
        let tokens = tokenize("John visited Ulm");
        let mentions = spot_mentions(&tokens, &t, Some("john"));
        assert_eq!(mentions.len(), 2);
        assert_eq!(mentions[0].surface, "John");
        assert_eq!(mentions[0].token_span, Some((0, 0)));
        assert_eq!(mentions[0].source, MentionSource::QueryName);
        assert_eq!(mentions[1].surface, "Ulm");
    }

    #[test]
    fn query_name_relabels_spotted_mention() {
        let t = table(&[("Ulm", "Ulm")]);
        let tokens = tokenize("born in Ulm");
        let mentions = spot_mentions(&tokens, &t, Some("ULM"));
        assert_eq!(mentions.len(), 1);
        assert_eq!(mentions[0].source, MentionSource::QueryName);
    }

    #[test]
    fn longest_leftmost_wins() {
        let t = table(&[("New York", "New_York"), ("York", "York")]);
        let tokens = tokenize("in New York");
        let mentions = spot_mentions(&tokens, &t, None);
        assert_eq!(mentions.len(), 1);
        assert_eq!(mentions[0].surface, "New York");
    }

    #[test]
    fn spotted_mentions_do_not_overlap_and_are_sorted() {
        let t = table(&[("a b", "AB"), ("b c", "BC"), ("c", "C")]);
        let tokens = tokenize("a b c a b c");
        let mentions = spot_mentions(&tokens, &t, None);
        let spans: Vec<(usize, usize)> = mentions.iter().filter_map(|m| m.token_span).collect();
        for w in spans.windows(2) {
            assert!(w[0].1 < w[1].0, "overlapping or unsorted spans: {spans:?}");
        }
    }
}
