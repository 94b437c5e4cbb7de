//! Document ingestion, retweet filtering, tokenization, group inventories and
//! seeded sampling.

mod inventory;
mod sample;
mod store;

use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use inventory::{build_inventory, eligible_groups, GroupCounts, GroupInventory};
pub use sample::{sample_baseline, sample_group, sample_groups, SamplingPlan};
pub use store::{CorpusStore, DocRef, Lexicon, StoreSample};

/// Marker that identifies a retweet or quote tweet.
pub const RETWEET_MARKER: &str = "RT @";

/// One raw record from the input stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub group_id: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenizedDocument {
    pub group_id: String,
    pub tokens: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterDecision {
    Keep,
    Drop,
}

/// Anything that belongs to a group and can therefore be stratified.
pub trait Grouped {
    fn group_id(&self) -> &str;
}

impl Grouped for TokenizedDocument {
    fn group_id(&self) -> &str {
        &self.group_id
    }
}

impl Grouped for Document {
    fn group_id(&self) -> &str {
        &self.group_id
    }
}

impl<T: Grouped + ?Sized> Grouped for &T {
    fn group_id(&self) -> &str {
        (**self).group_id()
    }
}

/// A re-iterable collection of token sequences.
///
/// Training and counting code is written against this trait so that owned
/// documents and interned corpus samples can be used interchangeably.
pub trait TokenSource {
    fn for_each_document(&self, f: &mut dyn FnMut(&mut dyn Iterator<Item = &str>));
}

impl TokenSource for [TokenizedDocument] {
    fn for_each_document(&self, f: &mut dyn FnMut(&mut dyn Iterator<Item = &str>)) {
        for doc in self {
            f(&mut doc.tokens.iter().map(String::as_str));
        }
    }
}

impl TokenSource for Vec<TokenizedDocument> {
    fn for_each_document(&self, f: &mut dyn FnMut(&mut dyn Iterator<Item = &str>)) {
        self.as_slice().for_each_document(f)
    }
}

impl TokenSource for [&TokenizedDocument] {
    fn for_each_document(&self, f: &mut dyn FnMut(&mut dyn Iterator<Item = &str>)) {
        for doc in self {
            f(&mut doc.tokens.iter().map(String::as_str));
        }
    }
}

pub fn filter_retweets(doc: &Document) -> FilterDecision {
    if doc.text.contains(RETWEET_MARKER) {
        FilterDecision::Drop
    } else {
        FilterDecision::Keep
    }
}

fn is_url(token: &str) -> bool {
    token.starts_with("http://") || token.starts_with("https://") || token.starts_with("www.")
}

/// Lowercases, drops URLs and @-mentions, strips hashtag marks and any
/// leading or trailing non-alphanumeric characters, and splits on whitespace.
pub fn tokenize(doc: &Document) -> TokenizedDocument {
    let lowered = doc.text.to_lowercase();
    let tokens = lowered
        .split_whitespace()
        .filter(|raw| !raw.starts_with('@') && !is_url(raw))
        .map(|raw| raw.trim_matches(|c: char| !c.is_alphanumeric()))
        // Trimming can expose a URL prefix, e.g. "(www.example.com)".
        .filter(|t| !t.is_empty() && !is_url(t))
        .map(str::to_owned)
        .collect();
    TokenizedDocument {
        group_id: doc.group_id.clone(),
        tokens,
    }
}

#[derive(Deserialize)]
struct RawRecord {
    group_id: String,
    text: String,
}

/// Parses one JSONL record. `line` is only used for error reporting.
pub fn parse_record(line: usize, text: &str) -> Result<Document> {
    let rec: RawRecord =
        serde_json::from_str(text).map_err(|e| Error::parse(line, e.to_string()))?;
    if rec.group_id.is_empty() {
        return Err(Error::parse(line, "group_id must be non-empty"));
    }
    Ok(Document {
        group_id: rec.group_id,
        text: rec.text,
    })
}

/// Streams documents from newline-delimited JSON. Blank lines are skipped.
pub fn read_documents<R: BufRead>(reader: R) -> impl Iterator<Item = Result<Document>> {
    reader
        .lines()
        .enumerate()
        .filter_map(|(i, line)| match line {
            Ok(l) if l.trim().is_empty() => None,
            Ok(l) => Some(parse_record(i + 1, &l)),
            Err(e) => Some(Err(Error::from(e))),
        })
}

/// Full ingestion path for one record: retweet filter, tokenization, and the
/// empty-document drop.
pub fn prepare(doc: &Document) -> Option<TokenizedDocument> {
    if filter_retweets(doc) == FilterDecision::Drop {
        return None;
    }
    let tokenized = tokenize(doc);
    (!tokenized.tokens.is_empty()).then_some(tokenized)
}

/// What ingestion kept and dropped.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct IngestStats {
    pub records: u64,
    pub retweets: u64,
    /// Records with no tokens left after tokenization.
    pub empty: u64,
}

/// Reads JSONL records into an interned store, applying [`prepare`].
pub fn load_store<R: BufRead>(reader: R) -> Result<(CorpusStore, IngestStats)> {
    let mut store = CorpusStore::new();
    let mut stats = IngestStats::default();
    for doc in read_documents(reader) {
        let doc = doc?;
        stats.records += 1;
        if filter_retweets(&doc) == FilterDecision::Drop {
            stats.retweets += 1;
            continue;
        }
        let tokenized = tokenize(&doc);
        if tokenized.tokens.is_empty() {
            stats.empty += 1;
            continue;
        }
        store.push(&tokenized);
    }
    Ok((store, stats))
}

pub fn document_to_json(doc: &Document) -> String {
    serde_json::json!({ "group_id": doc.group_id, "text": doc.text }).to_string()
}
